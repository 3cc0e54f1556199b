//! Matrix-representation oracles.
//!
//! Everything here is computed from explicit defining-representation matrices
//! over ℚ(√3)(i): structure constants by commutators, invariant tensors by
//! traces, and the fully antisymmetrized four-fold product. These results
//! serve as independent witnesses for the tensor-level constructions in
//! [`crate::liealg`].

use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::Serialize;
use thiserror::Error;

use crate::exact::{ExactComplex, ExactScalar};
use crate::tensor::{signed_permutations, ExactTensor, SymmetryTag};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("unknown representation {0:?}")]
    UnknownRepresentation(String),
    #[error("commutator [e{i}, e{j}] leaves the span of the generators")]
    ClosureResidual { i: usize, j: usize },
    #[error("commutator [e{i}, e{j}] has non-real structure constants")]
    NonRealConstants { i: usize, j: usize },
    #[error("operation requires the su3 defining representation, got {0}")]
    NotSu3(String),
    #[error("anticommutator identity fails for ({i}, {j})")]
    AnticommutatorResidual { i: usize, j: usize },
    #[error("indices must lie in 0..{dim}, got {indices:?}")]
    BadIndices { indices: Vec<usize>, dim: usize },
    #[error("generator {0} violates the basis conventions: {1}")]
    BadGenerator(usize, &'static str),
}

/// Square matrix over ℚ(√d)(i), row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<ExactComplex>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![ExactComplex::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, ExactComplex::real(ExactScalar::one()));
        }
        m
    }

    pub fn from_entries(n: usize, entries: &[(usize, usize, ExactComplex)]) -> Self {
        let mut m = Self::zeros(n);
        for (r, c, v) in entries {
            m.set(*r, *c, v.clone());
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, r: usize, c: usize) -> &ExactComplex {
        &self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: ExactComplex) {
        self.data[r * self.n + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(ExactComplex::is_zero)
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn trace(&self) -> ExactComplex {
        let mut t = ExactComplex::zero();
        for i in 0..self.n {
            t += self.get(i, i);
        }
        t
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                m.set(c, r, self.get(r, c).conj());
            }
        }
        m
    }

    pub fn scale(&self, s: &ExactComplex) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = rhs.get(k, c);
                    if !b.is_zero() {
                        out.data[r * n + c] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// Defining representation in the anti-Hermitian basis `e_a = -i T_a`, where
/// the Hermitian `T_a` satisfy `Tr(T_a T_b) = trace_norm · δ_ab`.
#[derive(Debug, Clone)]
pub struct MatrixRep {
    pub name: String,
    pub n: usize,
    pub generators: Vec<ComplexMatrix>,
    pub trace_norm: ExactScalar,
}

fn re(v: ExactScalar) -> ExactComplex {
    ExactComplex::real(v)
}

fn im(v: ExactScalar) -> ExactComplex {
    ExactComplex::imag(v)
}

fn half() -> ExactScalar {
    ExactScalar::from_frac(1, 2)
}

/// Gell-Mann matrices λ_1 … λ_8.
pub fn gell_mann() -> Vec<ComplexMatrix> {
    let one = || ExactScalar::one();
    let m1 = || -ExactScalar::one();
    let inv_sqrt3 = ExactScalar::sqrt_frac(1, 3);
    vec![
        ComplexMatrix::from_entries(3, &[(0, 1, re(one())), (1, 0, re(one()))]),
        ComplexMatrix::from_entries(3, &[(0, 1, im(m1())), (1, 0, im(one()))]),
        ComplexMatrix::from_entries(3, &[(0, 0, re(one())), (1, 1, re(m1()))]),
        ComplexMatrix::from_entries(3, &[(0, 2, re(one())), (2, 0, re(one()))]),
        ComplexMatrix::from_entries(3, &[(0, 2, im(m1())), (2, 0, im(one()))]),
        ComplexMatrix::from_entries(3, &[(1, 2, re(one())), (2, 1, re(one()))]),
        ComplexMatrix::from_entries(3, &[(1, 2, im(m1())), (2, 1, im(one()))]),
        ComplexMatrix::from_entries(
            3,
            &[
                (0, 0, re(inv_sqrt3.clone())),
                (1, 1, re(inv_sqrt3.clone())),
                (2, 2, re(&inv_sqrt3 * &ExactScalar::from_int(-2))),
            ],
        ),
    ]
}

/// Pauli matrices σ_1, σ_2, σ_3.
pub fn pauli() -> Vec<ComplexMatrix> {
    let one = || ExactScalar::one();
    let m1 = || -ExactScalar::one();
    vec![
        ComplexMatrix::from_entries(2, &[(0, 1, re(one())), (1, 0, re(one()))]),
        ComplexMatrix::from_entries(2, &[(0, 1, im(m1())), (1, 0, im(one()))]),
        ComplexMatrix::from_entries(2, &[(0, 0, re(one())), (1, 1, re(m1()))]),
    ]
}

fn from_hermitian(name: &str, n: usize, hermitian: Vec<ComplexMatrix>, trace_norm: ExactScalar) -> MatrixRep {
    let minus_i = im(-ExactScalar::one());
    MatrixRep {
        name: name.to_string(),
        n,
        generators: hermitian.iter().map(|t| t.scale(&minus_i)).collect(),
        trace_norm,
    }
}

/// Elementary antisymmetric generators `E_ab - E_ba`, `a < b`, lexicographic.
fn so_generators(n: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            out.push(ComplexMatrix::from_entries(
                n,
                &[(a, b, re(ExactScalar::one())), (b, a, re(-ExactScalar::one()))],
            ));
        }
    }
    out
}

pub const CATALOG: [&str; 5] = ["su2", "su3", "so3", "so4", "so5"];

/// Exact defining representation of a catalog algebra.
pub fn load_rep(name: &str) -> Result<MatrixRep, OracleError> {
    let half_scale = re(half());
    match name {
        "su2" => Ok(from_hermitian("su2", 2, pauli().iter().map(|s| s.scale(&half_scale)).collect(), half())),
        "su3" => Ok(from_hermitian("su3", 3, gell_mann().iter().map(|l| l.scale(&half_scale)).collect(), half())),
        "so3" | "so4" | "so5" => {
            let n: usize = name[2..].parse().expect("catalog name");
            // real antisymmetric matrices are already anti-Hermitian; with
            // T = i·e the trace form is Tr(T_a T_b) = 2 δ_ab
            Ok(MatrixRep {
                name: name.to_string(),
                n,
                generators: so_generators(n),
                trace_norm: ExactScalar::from_int(2),
            })
        }
        other => Err(OracleError::UnknownRepresentation(other.to_string())),
    }
}

impl MatrixRep {
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    /// Hermitian generator `T_a = i e_a`.
    pub fn hermitian(&self, a: usize) -> ComplexMatrix {
        self.generators[a].scale(&ExactComplex::i())
    }

    /// Checks anti-Hermiticity, tracelessness and `Tr(T_a T_b) = trace_norm·δ_ab`.
    pub fn validate(&self) -> Result<(), OracleError> {
        for (a, e) in self.generators.iter().enumerate() {
            if !(&e.adjoint() + e).is_zero() {
                return Err(OracleError::BadGenerator(a, "not anti-Hermitian"));
            }
            if !e.trace().is_zero() {
                return Err(OracleError::BadGenerator(a, "not traceless"));
            }
        }
        for a in 0..self.dim() {
            let ta = self.hermitian(a);
            for b in 0..self.dim() {
                let tr = (&ta * &self.hermitian(b)).trace();
                let expect = if a == b { re(self.trace_norm.clone()) } else { ExactComplex::zero() };
                if tr != expect {
                    return Err(OracleError::BadGenerator(a, "trace form not diagonal with trace_norm"));
                }
            }
        }
        Ok(())
    }

    /// Coordinates of `m` in the Hermitian basis: `Tr(m T_σ) / trace_norm`.
    /// Also returns the remainder `m − Σ c_σ T_σ` (real parts only).
    pub fn decompose_hermitian(&self, m: &ComplexMatrix) -> (Vec<ExactComplex>, ComplexMatrix) {
        let inv = self.trace_norm.inv().expect("trace_norm nonzero");
        let mut coords = Vec::with_capacity(self.dim());
        let mut remainder = m.clone();
        for s in 0..self.dim() {
            let ts = self.hermitian(s);
            let c = (m * &ts).trace().scale(&inv);
            remainder = &remainder - &ts.scale(&re(c.re.clone()));
            coords.push(c);
        }
        (coords, remainder)
    }
}

/// `C^k_{ij}` from `[e_i, e_j] = C^k_{ij} e_k`, laid out `[i, j, k]`.
///
/// Each commutator is projected onto the basis with the trace form and the
/// projection remainder must vanish exactly.
pub fn structure_constants_from_rep(rep: &MatrixRep) -> Result<ExactTensor, OracleError> {
    let r = rep.dim();
    let mut c = ExactTensor::zeros(3, r);
    // Tr(e_k e_l) = -trace_norm δ_kl, so C^l = -Tr([e_i,e_j] e_l) / trace_norm
    let scale = -rep.trace_norm.inv().expect("trace_norm nonzero");
    for i in 0..r {
        for j in 0..r {
            let comm = rep.generators[i].commutator(&rep.generators[j]);
            let mut remainder = comm.clone();
            for k in 0..r {
                let coef = (&comm * &rep.generators[k]).trace().scale(&scale);
                if !coef.is_real() {
                    return Err(OracleError::NonRealConstants { i, j });
                }
                if !coef.re.is_zero() {
                    remainder = &remainder - &rep.generators[k].scale(&coef);
                    c.set(&[i, j, k], coef.re);
                }
            }
            if !remainder.is_zero() {
                return Err(OracleError::ClosureResidual { i, j });
            }
        }
    }
    Ok(c)
}

/// `d_ijk = Tr(λ_i {λ_j, λ_k}) / 4` for su3, certified against
/// `{λ_i, λ_j} = (4/3) δ_ij 1 + 2 d_ijk λ_k`.
pub fn d_tensor_from_traces(rep: &MatrixRep) -> Result<ExactTensor, OracleError> {
    if rep.name != "su3" || rep.dim() != 8 {
        return Err(OracleError::NotSu3(rep.name.clone()));
    }
    // λ_a = 2 T_a
    let two = re(ExactScalar::from_int(2));
    let lambdas: Vec<ComplexMatrix> = (0..8).map(|a| rep.hermitian(a).scale(&two)).collect();
    let quarter = ExactScalar::from_frac(1, 4);
    let mut d = ExactTensor::zeros(3, 8);
    for i in 0..8 {
        for j in 0..8 {
            let anti = lambdas[j].anticommutator(&lambdas[i]);
            for k in 0..8 {
                let tr = (&lambdas[k] * &anti).trace().scale(&quarter);
                debug_assert!(tr.is_real());
                if !tr.re.is_zero() {
                    d.set(&[k, i, j], tr.re);
                }
            }
        }
    }
    let identity = ComplexMatrix::identity(3);
    for i in 0..8 {
        for j in 0..8 {
            let mut rhs = if i == j {
                identity.scale(&re(ExactScalar::from_frac(4, 3)))
            } else {
                ComplexMatrix::zeros(3)
            };
            for k in 0..8 {
                let c = d.get(&[i, j, k]);
                if !c.is_zero() {
                    rhs = &rhs + &lambdas[k].scale(&re(c * &ExactScalar::from_int(2)));
                }
            }
            if lambdas[i].anticommutator(&lambdas[j]) != rhs {
                return Err(OracleError::AnticommutatorResidual { i, j });
            }
        }
    }
    Ok(d.with_symmetry(SymmetryTag::FullySymmetric))
}

/// Fully symmetrized trace `(1/m!) Σ_s Tr(T_{s(i1)} ⋯ T_{s(im)})` in the
/// Hermitian basis, as a rank-`m` tensor.
pub fn symmetrized_trace(rep: &MatrixRep, m: usize) -> ExactTensor {
    let r = rep.dim();
    let ts: Vec<ComplexMatrix> = (0..r).map(|a| rep.hermitian(a)).collect();
    let perms = signed_permutations(m);
    let inv = ExactScalar::from_rational(num_rational::BigRational::new(
        1.into(),
        crate::tensor::factorial(m),
    ));
    let mut out = ExactTensor::zeros(m, r);
    let mut cache: std::collections::HashMap<Vec<usize>, ExactComplex> = std::collections::HashMap::new();
    let mut trace_of = |word: &[usize]| -> ExactComplex {
        // traces are cyclic; key on the lexicographically least rotation
        let k = word.len();
        let key = (0..k)
            .map(|s| word[s..].iter().chain(&word[..s]).copied().collect::<Vec<_>>())
            .min()
            .expect("non-empty word");
        cache
            .entry(key)
            .or_insert_with_key(|key| {
                let mut prod = ts[key[0]].clone();
                for &a in &key[1..] {
                    prod = &prod * &ts[a];
                }
                prod.trace()
            })
            .clone()
    };
    for multiset in itertools::Itertools::combinations_with_replacement(0..r, m) {
        let mut sum = ExactComplex::zero();
        for (perm, _) in &perms {
            let word: Vec<usize> = perm.iter().map(|&p| multiset[p]).collect();
            sum += &trace_of(&word);
        }
        debug_assert!(sum.is_real(), "symmetrized trace of Hermitian matrices is real");
        let value = &sum.re * &inv;
        if value.is_zero() {
            continue;
        }
        for (perm, _) in &perms {
            let idx: Vec<usize> = perm.iter().map(|&p| multiset[p]).collect();
            out.set(&idx, value.clone());
        }
    }
    out.with_symmetry(SymmetryTag::FullySymmetric)
}

/// Result of decomposing a four-commutator onto the Hermitian basis.
#[derive(Debug, Clone, Serialize)]
pub struct FourCommutator {
    pub indices: [usize; 4],
    /// Coordinates `c_σ` with `[T_j1, T_j2, T_j3, T_j4] = Σ c_σ T_σ + remainder`.
    pub components: Vec<ExactScalar>,
    #[serde(skip)]
    pub offspan_residual: ComplexMatrix,
    /// Nonzero entries of the remainder, zero iff the result lies in the algebra.
    pub offspan_nonzero: usize,
}

impl FourCommutator {
    pub fn in_algebra(&self) -> bool {
        self.offspan_nonzero == 0
    }
}

/// `Σ_{s∈S_4} π(s) T_{s(j1)} T_{s(j2)} T_{s(j3)} T_{s(j4)}` with `T` Hermitian.
pub fn four_commutator(rep: &MatrixRep, indices: [usize; 4]) -> Result<FourCommutator, OracleError> {
    if indices.iter().any(|&j| j >= rep.dim()) {
        return Err(OracleError::BadIndices { indices: indices.to_vec(), dim: rep.dim() });
    }
    let ts: Vec<ComplexMatrix> = indices.iter().map(|&j| rep.hermitian(j)).collect();
    let mut sum = ComplexMatrix::zeros(rep.n);
    let minus = re(-ExactScalar::one());
    for (perm, sign) in signed_permutations(4) {
        let prod = &(&ts[perm[0]] * &ts[perm[1]]) * &(&ts[perm[2]] * &ts[perm[3]]);
        sum = if sign > 0 { &sum + &prod } else { &sum + &prod.scale(&minus) };
    }
    let (coords, mut remainder) = rep.decompose_hermitian(&sum);
    let mut components = Vec::with_capacity(coords.len());
    for (s, c) in coords.into_iter().enumerate() {
        if !c.im.is_zero() {
            // an imaginary coordinate is off-span for a real Lie algebra
            remainder = &remainder - &rep.hermitian(s).scale(&im(c.im.clone()));
        }
        components.push(c.re);
    }
    let offspan_nonzero = remainder.nonzero_count();
    Ok(FourCommutator { indices, components, offspan_residual: remainder, offspan_nonzero })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_reps_satisfy_conventions() {
        for name in CATALOG {
            let rep = load_rep(name).unwrap();
            rep.validate().unwrap();
        }
        assert!(matches!(load_rep("g2"), Err(OracleError::UnknownRepresentation(_))));
    }

    #[test]
    fn su2_trace_norm_is_half() {
        let rep = load_rep("su2").unwrap();
        assert_eq!(rep.dim(), 3);
        let tr = (&rep.hermitian(0) * &rep.hermitian(0)).trace();
        assert_eq!(tr, ExactComplex::real(ExactScalar::from_frac(1, 2)));
        assert_eq!(rep.trace_norm, ExactScalar::from_frac(1, 2));
    }

    #[test]
    fn su3_t8_entries() {
        let rep = load_rep("su3").unwrap();
        let t8 = rep.hermitian(7);
        // 1/(2√3) = √3/6, -1/√3 = -√3/3
        assert_eq!(*t8.get(0, 0), ExactComplex::real(ExactScalar::sqrt_frac(1, 6)));
        assert_eq!(*t8.get(1, 1), ExactComplex::real(ExactScalar::sqrt_frac(1, 6)));
        assert_eq!(*t8.get(2, 2), ExactComplex::real(ExactScalar::sqrt_frac(-1, 3)));
    }

    #[test]
    fn su2_structure_constants_are_epsilon() {
        let c = structure_constants_from_rep(&load_rep("su2").unwrap()).unwrap();
        for (perm, sign) in signed_permutations(3) {
            assert_eq!(*c.get(&perm), ExactScalar::from_int(sign));
        }
        assert_eq!(c.nonzero_count(), 6);
    }

    #[test]
    fn su3_structure_constants() {
        let c = structure_constants_from_rep(&load_rep("su3").unwrap()).unwrap();
        assert_eq!(*c.get(&[0, 1, 2]), ExactScalar::one());
        assert_eq!(*c.get(&[0, 3, 6]), ExactScalar::from_frac(1, 2));
        assert_eq!(*c.get(&[3, 4, 7]), ExactScalar::sqrt_frac(1, 2));
        assert_eq!(*c.get(&[4, 3, 7]), ExactScalar::sqrt_frac(-1, 2));
        assert!(c.is_fully_antisymmetric());
    }

    #[test]
    fn non_closed_set_is_rejected() {
        let mut rep = load_rep("su2").unwrap();
        rep.generators.truncate(2);
        assert_eq!(structure_constants_from_rep(&rep), Err(OracleError::ClosureResidual { i: 0, j: 1 }));
        // padding with the identity also breaks closure projection
        let mut rep = load_rep("su2").unwrap();
        rep.generators[2] = ComplexMatrix::identity(2).scale(&ExactComplex::i());
        assert!(structure_constants_from_rep(&rep).is_err());
    }

    #[test]
    fn d_tensor_values() {
        let d = d_tensor_from_traces(&load_rep("su3").unwrap()).unwrap();
        assert_eq!(*d.get(&[0, 0, 7]), ExactScalar::sqrt_frac(1, 3));
        assert_eq!(*d.get(&[0, 3, 5]), ExactScalar::from_frac(1, 2));
        assert_eq!(*d.get(&[7, 7, 7]), ExactScalar::sqrt_frac(-1, 3));
        assert!(d.is_fully_symmetric());
        assert!(matches!(d_tensor_from_traces(&load_rep("su2").unwrap()), Err(OracleError::NotSu3(_))));
    }

    #[test]
    fn four_commutator_repeated_index_is_zero() {
        let rep = load_rep("su3").unwrap();
        let fc = four_commutator(&rep, [0, 0, 1, 2]).unwrap();
        assert!(fc.components.iter().all(ExactScalar::is_zero));
        assert!(fc.in_algebra());
        assert!(four_commutator(&rep, [0, 1, 2, 8]).is_err());
    }

    #[test]
    fn symmetrized_trace_su2_cubic_vanishes() {
        let rep = load_rep("su2").unwrap();
        assert!(symmetrized_trace(&rep, 3).is_zero());
        let k2 = symmetrized_trace(&rep, 2);
        assert_eq!(k2, ExactTensor::identity(3).scale(&ExactScalar::from_frac(1, 2)));
    }
}
