//! Catalog of compact Lie algebras with exact structure constants, invariant
//! symmetric tensors and the odd-order cocycle tensors built from them.
//!
//! Structure constants are never tabulated by hand: [`catalog_load`] derives
//! them from the defining representation through [`crate::oracle`]. Structure
//! constants are stored with layout `[i, j, k] = C^k_{ij}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::exact::ExactScalar;
use crate::oracle::{self, MatrixRep, OracleError};
use crate::tensor::{factorial, signed_permutations, ExactTensor, SymmetryTag, TensorError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("unknown algebra {0:?}")]
    UnknownAlgebra(String),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("invariant tensor of order {m} is not supported for {algebra} (supported: {supported:?})")]
    UnsupportedOrder { algebra: String, m: usize, supported: Vec<usize> },
    #[error("{0} has no matrix representation attached")]
    NoRepresentation(String),
    #[error("Killing form of {0} is not a multiple of the identity in the catalog basis")]
    KillingNotDiagonal(String),
    #[error("cocycle candidate of order {order} is not fully antisymmetric")]
    NotAntisymmetric { order: usize },
    #[error("invariant tensor belongs to {tensor}, not {algebra}")]
    AlgebraMismatch { algebra: String, tensor: String },
}

#[derive(Debug, Clone)]
pub struct LieAlgebra {
    pub name: String,
    pub dim: usize,
    /// `[i, j, k] = C^k_{ij}`.
    pub structure: ExactTensor,
    /// `k_ij = C^m_{il} C^l_{jm}`.
    pub killing: ExactTensor,
    pub rep: Option<MatrixRep>,
}

/// Loads a catalog algebra (`su2`, `su3`, `so3`, `so4`, `so5`).
pub fn catalog_load(name: &str) -> Result<LieAlgebra, LieError> {
    let rep = match oracle::load_rep(name) {
        Ok(rep) => rep,
        Err(OracleError::UnknownRepresentation(n)) => return Err(LieError::UnknownAlgebra(n)),
        Err(e) => return Err(e.into()),
    };
    rep.validate()?;
    let structure = oracle::structure_constants_from_rep(&rep)?;
    let mut g = LieAlgebra::from_structure_constants(name, structure)?;
    g.rep = Some(rep);
    Ok(g)
}

impl LieAlgebra {
    /// Wraps arbitrary constants (they need not satisfy the Jacobi identity).
    pub fn from_structure_constants(name: &str, structure: ExactTensor) -> Result<Self, LieError> {
        if structure.rank() != 3 {
            return Err(TensorError::BadIndex { index: vec![], rank: structure.rank(), dim: structure.dim() }.into());
        }
        let killing = ExactTensor::contract(&structure, &structure, &[(1, 2), (2, 1)])?;
        Ok(Self { name: name.to_string(), dim: structure.dim(), structure, killing, rep: None })
    }

    pub fn rep_dim(&self) -> Option<usize> {
        self.rep.as_ref().map(|r| r.n)
    }

    /// `c` with `killing = c·δ`, if the Killing form is a multiple of the identity.
    pub fn killing_scale(&self) -> Option<ExactScalar> {
        self.killing.proportionality(&ExactTensor::identity(self.dim))
    }

    pub fn killing_is_negative_definite(&self) -> bool {
        // diagonal basis: negative diagonal, zero off-diagonal
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let v = self.killing.get(&[i, j]);
                if i == j {
                    v.is_negative()
                } else {
                    v.is_zero()
                }
            })
        })
    }

    /// The positive invariant metric used to identify upper and lower indices:
    /// the Killing form divided by its (negative) scale, i.e. `δ_ij`.
    pub fn metric(&self) -> Result<ExactTensor, LieError> {
        let c = self.killing_scale().ok_or_else(|| LieError::KillingNotDiagonal(self.name.clone()))?;
        Ok(self.killing.scale(&c.inv().expect("nonzero scale")).with_symmetry(SymmetryTag::FullySymmetric))
    }

    /// `C_{ijk} = C^l_{ij} g_{lk}`.
    pub fn lowered_structure_constants(&self) -> Result<ExactTensor, LieError> {
        Ok(ExactTensor::contract(&self.structure, &self.metric()?, &[(2, 0)])?)
    }

    /// `Alt_{i1 i2 i3}(C^ρ_{i1 i2} C^σ_{ρ i3})`, unnormalized, layout `[i1, i2, i3, σ]`.
    pub fn jacobi_residual(&self) -> ExactTensor {
        let raw = ExactTensor::contract(&self.structure, &self.structure, &[(2, 0)])
            .expect("same dimension");
        raw.antisymmetrize(&[0, 1, 2], false).expect("valid positions")
    }

    /// Orders `m` of primitive invariant tensors this catalog can produce.
    pub fn supported_orders(&self) -> Vec<usize> {
        match self.name.as_str() {
            "su3" => vec![2, 3],
            _ => vec![2],
        }
    }
}

#[derive(Debug, Clone)]
pub struct InvariantSymmetricTensor {
    pub m: usize,
    pub tensor: ExactTensor,
    pub algebra: String,
    /// `tensor = normalization · reference`, where the reference is the
    /// Killing form for `m = 2` and the trace-derived `d_ijk` for su3, `m = 3`.
    pub normalization: ExactScalar,
    pub reference: &'static str,
}

/// Primitive invariant symmetric tensor of order `m`.
///
/// `m = 2` gives the sign-normalized Killing metric `δ_ij`; `m ≥ 3` gives the
/// fully symmetrized trace of Hermitian generators in the defining
/// representation.
pub fn invariant_symmetric_tensor(g: &LieAlgebra, m: usize) -> Result<InvariantSymmetricTensor, LieError> {
    let supported = g.supported_orders();
    if !supported.contains(&m) {
        return Err(LieError::UnsupportedOrder { algebra: g.name.clone(), m, supported });
    }
    if m == 2 {
        let c = g.killing_scale().ok_or_else(|| LieError::KillingNotDiagonal(g.name.clone()))?;
        return Ok(InvariantSymmetricTensor {
            m,
            tensor: g.metric()?,
            algebra: g.name.clone(),
            normalization: c.inv().expect("nonzero scale"),
            reference: "killing",
        });
    }
    let rep = g.rep.as_ref().ok_or_else(|| LieError::NoRepresentation(g.name.clone()))?;
    let tensor = oracle::symmetrized_trace(rep, m);
    let (normalization, reference) = if g.name == "su3" && m == 3 {
        let d = oracle::d_tensor_from_traces(rep)?;
        let ratio = tensor.proportionality(&d).expect("symmetrized trace is proportional to d");
        (ratio, "d_ijk")
    } else {
        (ExactScalar::one(), "symmetrized_trace")
    };
    Ok(InvariantSymmetricTensor { m, tensor, algebra: g.name.clone(), normalization, reference })
}

/// `Σ_a C^ρ_{l i_a} k_{i1…ρ…im}`, layout `[l, i1, …, im]`; zero iff `k` is ad-invariant.
pub fn ad_invariance_check(g: &LieAlgebra, k: &InvariantSymmetricTensor) -> ExactTensor {
    adjoint_action_residual(g, &k.tensor)
}

fn adjoint_action_residual(g: &LieAlgebra, k: &ExactTensor) -> ExactTensor {
    let m = k.rank();
    let mut out = ExactTensor::zeros(m + 1, g.dim);
    for a in 0..m {
        // [l, i_a, rest of k in order]
        let part = ExactTensor::contract(&g.structure, k, &[(2, a)]).expect("same dimension");
        let mut perm = vec![0; m + 1];
        perm[1 + a] = 1;
        for b in 0..m {
            if b < a {
                perm[1 + b] = 2 + b;
            } else if b > a {
                perm[1 + b] = 1 + b;
            }
        }
        let part = part.permute_axes(&perm).expect("valid permutation");
        out = out.try_add(&part).expect("same shape");
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CocycleConstruction {
    /// Generalized-Kronecker alternation of the middle block.
    Kronecker,
    /// Signed sum over all permutations of the arguments.
    PermutationSum,
    /// Supplied directly (for instance a perturbed copy).
    External,
}

#[derive(Debug, Clone)]
pub struct CocycleTensor {
    pub order: usize,
    pub omega: ExactTensor,
    pub algebra: String,
    pub construction: CocycleConstruction,
    /// Scalar applied on top of the bare construction formula.
    pub normalization: ExactScalar,
}

impl CocycleTensor {
    /// Wraps a fully antisymmetric odd-order tensor.
    pub fn from_tensor(algebra: &str, omega: ExactTensor) -> Result<Self, LieError> {
        let order = omega.rank();
        if !omega.is_fully_antisymmetric() {
            return Err(LieError::NotAntisymmetric { order });
        }
        Ok(Self {
            order,
            omega: omega.with_symmetry(SymmetryTag::FullyAntisymmetric),
            algebra: algebra.to_string(),
            construction: CocycleConstruction::External,
            normalization: ExactScalar::one(),
        })
    }

    /// Half the bracket arity, `p = (order - 1) / 2`.
    pub fn p(&self) -> usize {
        (self.order - 1) / 2
    }

    /// Adds `delta·sign(s)` at every permutation `s` of `index`, keeping full
    /// antisymmetry. Indices must be distinct.
    pub fn perturbed(&self, index: &[usize], delta: &ExactScalar) -> Result<Self, LieError> {
        let mut omega = self.omega.clone();
        if index.len() != self.order || index.iter().any(|&i| i >= omega.dim()) {
            return Err(TensorError::BadIndex { index: index.to_vec(), rank: self.order, dim: omega.dim() }.into());
        }
        let mut sorted = index.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != index.len() {
            return Err(LieError::NotAntisymmetric { order: self.order });
        }
        let neg = -delta;
        for (perm, sign) in signed_permutations(self.order) {
            let idx: Vec<usize> = perm.iter().map(|&p| index[p]).collect();
            omega.add_at(&idx, if sign > 0 { delta } else { &neg });
        }
        Ok(Self { omega, construction: CocycleConstruction::External, ..self.clone() })
    }
}

/// `ω̃_{t0 t1 … t_{2m-3} σ} = k_{i1…i_{m-1}σ} C^{i1}_{t0 t1} C^{i2}_{t2 t3} ⋯`.
fn chain_tensor(g: &LieAlgebra, k: &ExactTensor) -> ExactTensor {
    let m = k.rank();
    let order = 2 * m - 1;
    let mut by_upper: Vec<Vec<(usize, usize, ExactScalar)>> = vec![Vec::new(); g.dim];
    for (idx, v) in g.structure.nonzeros() {
        by_upper[idx[2]].push((idx[0], idx[1], v.clone()));
    }
    let mut out = ExactTensor::zeros(order, g.dim);
    let mut slots = vec![0usize; order];
    for (kidx, kv) in k.nonzeros() {
        slots[order - 1] = kidx[m - 1];
        expand_chain(&by_upper, &kidx[..m - 1], 0, kv.clone(), &mut slots, &mut out);
    }
    out
}

fn expand_chain(
    by_upper: &[Vec<(usize, usize, ExactScalar)>],
    uppers: &[usize],
    depth: usize,
    acc: ExactScalar,
    slots: &mut [usize],
    out: &mut ExactTensor,
) {
    if depth == uppers.len() {
        out.add_at(slots, &acc);
        return;
    }
    for (x, y, c) in &by_upper[uppers[depth]] {
        slots[2 * depth] = *x;
        slots[2 * depth + 1] = *y;
        expand_chain(by_upper, uppers, depth + 1, &acc * c, slots, out);
    }
}

fn check_algebra(g: &LieAlgebra, k: &InvariantSymmetricTensor) -> Result<(), LieError> {
    if g.name != k.algebra || g.dim != k.tensor.dim() {
        return Err(LieError::AlgebraMismatch { algebra: g.name.clone(), tensor: k.algebra.clone() });
    }
    Ok(())
}

/// Cocycle of order `2m-1` from an invariant tensor of order `m`.
///
/// The chain `k C ⋯ C` is alternated over its middle `2m-3` positions with
/// the generalized Kronecker delta, normalized by `1/(2m-3)!`. Full
/// antisymmetry over all positions is then verified; a non-invariant `k`
/// fails here.
pub fn build_cocycle(g: &LieAlgebra, k: &InvariantSymmetricTensor) -> Result<CocycleTensor, LieError> {
    check_algebra(g, k)?;
    let m = k.m;
    let order = 2 * m - 1;
    let chain = chain_tensor(g, &k.tensor);
    let middle: Vec<usize> = (1..order - 1).collect();
    let omega = chain.antisymmetrize(&middle, true)?;
    if !omega.is_fully_antisymmetric() {
        return Err(LieError::NotAntisymmetric { order });
    }
    Ok(CocycleTensor {
        order,
        omega: omega.with_symmetry(SymmetryTag::FullyAntisymmetric),
        algebra: g.name.clone(),
        construction: CocycleConstruction::Kronecker,
        normalization: ExactScalar::from_rational(BigRational::new(BigInt::from(1), factorial(middle.len()))),
    })
}

/// `k([e_{a1}, e_{a2}], …, [e_{a_{2m-3}}, e_{a_{2m-2}}], e_{a_{2m-1}})` with the
/// brackets expanded through the structure constants.
fn bracket_chain_value(g: &LieAlgebra, k: &ExactTensor, args: &[usize]) -> ExactScalar {
    let m = k.rank();
    let mut slots = vec![0usize; m];
    slots[m - 1] = args[2 * m - 2];
    fn rec(g: &LieAlgebra, k: &ExactTensor, args: &[usize], depth: usize, acc: ExactScalar, slots: &mut [usize]) -> ExactScalar {
        let m = slots.len();
        if depth == m - 1 {
            return &acc * k.get(slots);
        }
        let (a, b) = (args[2 * depth], args[2 * depth + 1]);
        let mut sum = ExactScalar::zero();
        for upper in 0..g.dim {
            let c = g.structure.get(&[a, b, upper]);
            if c.is_zero() {
                continue;
            }
            slots[depth] = upper;
            sum += &rec(g, k, args, depth + 1, &acc * c, slots);
        }
        sum
    }
    rec(g, k, args, 0, ExactScalar::one(), &mut slots)
}

/// One component of the permutation-sum cocycle, for any argument tuple.
pub fn permsum_component(g: &LieAlgebra, k: &InvariantSymmetricTensor, args: &[usize]) -> ExactScalar {
    let n = args.len();
    let mut total = ExactScalar::zero();
    let mut permuted = vec![0; n];
    for (perm, sign) in signed_permutations(n) {
        for (slot, &p) in permuted.iter_mut().zip(&perm) {
            *slot = args[p];
        }
        let v = bracket_chain_value(g, &k.tensor, &permuted);
        if sign > 0 {
            total += &v;
        } else {
            total -= &v;
        }
    }
    total
}

/// Cocycle from the signed sum over all `(2m-1)!` argument permutations.
///
/// Components are evaluated on strictly increasing index tuples and spread
/// to their permuted images with the permutation sign; tuples with a repeated
/// index vanish identically in an alternating sum.
pub fn build_cocycle_permsum(g: &LieAlgebra, k: &InvariantSymmetricTensor) -> Result<CocycleTensor, LieError> {
    use itertools::Itertools;
    use rayon::prelude::*;
    check_algebra(g, k)?;
    let order = 2 * k.m - 1;
    let tuples: Vec<Vec<usize>> = (0..g.dim).combinations(order).collect();
    let values: Vec<(Vec<usize>, ExactScalar)> = tuples
        .into_par_iter()
        .map(|t| {
            let v = permsum_component(g, k, &t);
            (t, v)
        })
        .filter(|(_, v)| !v.is_zero())
        .collect();
    let perms = signed_permutations(order);
    let mut omega = ExactTensor::zeros(order, g.dim);
    for (t, v) in values {
        let neg = -&v;
        for (perm, sign) in &perms {
            let idx: Vec<usize> = perm.iter().map(|&p| t[p]).collect();
            omega.set(&idx, if *sign > 0 { v.clone() } else { neg.clone() });
        }
    }
    Ok(CocycleTensor {
        order,
        omega: omega.with_symmetry(SymmetryTag::FullyAntisymmetric),
        algebra: g.name.clone(),
        construction: CocycleConstruction::PermutationSum,
        normalization: ExactScalar::one(),
    })
}
