//! Linear generalized Poisson structures built from cocycle tensors.
//!
//! For a cocycle `ω` of order `2p+1` the structure is the multivector
//! `Λ = 1/(2p)! ω_{l1…l2p}^σ x_σ ∂_{l1}∧…∧∂_{l2p}`, whose canonical
//! coefficient on an increasing blade `J` is `ω_{Jσ} x_σ`. Upper and lower
//! algebra indices are identified through the metric `δ`.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact::ExactScalar;
use crate::liealg::CocycleTensor;
use crate::multivec::{Monomial, MultivecError, PolyMultivector};
use crate::tensor::{factorial, shuffles, ExactTensor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpsError {
    #[error("cocycle order {0} is not odd and at least 3")]
    BadOrder(usize),
    #[error("cocycle tensor is not fully antisymmetric")]
    NotAntisymmetric,
    #[error("generalized Jacobi identity fails: {} nonzero residual components", .residual.nonzero_count())]
    GjiViolation { residual: Box<GjiResidual>, snb_nonzero_count: usize },
    #[error("bracket takes {expected} arguments, got {found}")]
    Arity { expected: usize, found: usize },
    #[error("involution check needs at least {expected} functions, got {found}")]
    TooFewFunctions { expected: usize, found: usize },
    #[error("structures live on different algebras: {0} vs {1}")]
    AlgebraMismatch(String, String),
    #[error(transparent)]
    Multivec(#[from] MultivecError),
}

/// `R_J^σ = Alt_J(ω_{j1…j_{2p-1} k}^σ ω_{j_{2p}…j_{4p-1}}^k)`, stored on
/// strictly increasing `J` only (the residual is alternating in `J`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GjiResidual {
    pub p: usize,
    pub dim: usize,
    /// Nonzero components keyed by `(J increasing, σ)`.
    pub entries: BTreeMap<(Vec<usize>, usize), ExactScalar>,
    /// Number of shuffle groups in the alternation, `C(4p-1, 2p-1)`.
    pub term_groups: usize,
    /// Multiplicity `(2p-1)!(2p)!` of each shuffle group.
    pub group_multiplicity: ExactScalar,
}

impl GjiResidual {
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero canonical components `(J increasing, σ)`.
    pub fn nonzero_count(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, j: &[usize], sigma: usize) -> ExactScalar {
        let mut sorted = j.to_vec();
        let Some(sign) = crate::multivec::canonical_blade(&mut sorted) else {
            return ExactScalar::zero();
        };
        match self.entries.get(&(sorted, sigma)) {
            Some(v) if sign > 0 => v.clone(),
            Some(v) => -v,
            None => ExactScalar::zero(),
        }
    }

    /// Dense rank-`4p` tensor `[j1, …, j_{4p-1}, σ]`; `None` above 2^22 entries.
    pub fn to_tensor(&self) -> Option<ExactTensor> {
        let rank = 4 * self.p;
        if (self.dim as f64).powi(rank as i32) > (1u64 << 22) as f64 {
            return None;
        }
        let mut t = ExactTensor::zeros(rank, self.dim);
        let n = rank - 1;
        for ((j, sigma), v) in &self.entries {
            let neg = -v;
            for perm in (0..n).permutations(n) {
                let mut idx: Vec<usize> = perm.iter().map(|&q| j[q]).collect();
                let sign = crate::tensor::permutation_sign(&perm);
                idx.push(*sigma);
                t.set(&idx, if sign > 0 { v.clone() } else { neg.clone() });
            }
        }
        Some(t)
    }

    /// The residual as a multivector `Σ_J R_J^σ x_σ ∂_J` of order `4p-1`.
    pub fn as_multivector(&self) -> PolyMultivector {
        let mut out = PolyMultivector::zero(self.dim, 4 * self.p - 1);
        for ((j, sigma), v) in &self.entries {
            let t = PolyMultivector::monomial_term(self.dim, Monomial::variable(self.dim, *sigma), j, v.clone())
                .expect("increasing blade in range");
            out = out.try_add(&t).expect("same shape");
        }
        out
    }
}

fn check_cocycle_shape(omega: &ExactTensor) -> Result<usize, GpsError> {
    let order = omega.rank();
    if order < 3 || order.is_multiple_of(2) {
        return Err(GpsError::BadOrder(order));
    }
    Ok((order - 1) / 2)
}

/// Direct residual of the generalized Jacobi identity for the linear
/// structure defined by `omega` (order `2p+1`, last index `σ`).
pub fn gji_residual(omega: &ExactTensor) -> Result<GjiResidual, GpsError> {
    let p = check_cocycle_shape(omega)?;
    let dim = omega.dim();
    let n = 4 * p - 1;
    let groups = shuffles(n, 2 * p - 1);
    let multiplicity = ExactScalar::from_rational(BigRational::from_integer(
        factorial(2 * p - 1) * factorial(2 * p),
    ));
    let tasks: Vec<(Vec<usize>, usize)> = (0..dim)
        .combinations(n)
        .flat_map(|j| (0..dim).map(move |s| (j.clone(), s)))
        .collect();
    let entries: BTreeMap<(Vec<usize>, usize), ExactScalar> = tasks
        .into_par_iter()
        .filter_map(|(j, sigma)| {
            let mut total = ExactScalar::zero();
            let mut left = vec![0usize; 2 * p + 1];
            let mut right = vec![0usize; 2 * p + 1];
            for g in &groups {
                for (slot, &a) in left.iter_mut().zip(&g.first) {
                    *slot = j[a];
                }
                left[2 * p] = sigma;
                for (slot, &b) in right.iter_mut().zip(&g.second) {
                    *slot = j[b];
                }
                let mut acc = ExactScalar::zero();
                for k in 0..dim {
                    left[2 * p - 1] = k;
                    right[2 * p] = k;
                    let a = omega.get(&left);
                    if a.is_zero() {
                        continue;
                    }
                    let b = omega.get(&right);
                    if !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                if g.sign > 0 {
                    total += &acc;
                } else {
                    total -= &acc;
                }
            }
            let total = &total * &multiplicity;
            (!total.is_zero()).then_some(((j, sigma), total))
        })
        .collect();
    Ok(GjiResidual { p, dim, entries, term_groups: groups.len(), group_multiplicity: multiplicity })
}

/// `Λ = 1/(2p)! ω_{l1…l2p}^σ x_σ ∂_{l1}∧…∧∂_{l2p}` in canonical form.
pub fn lambda_from_omega(omega: &ExactTensor) -> Result<PolyMultivector, GpsError> {
    let p = check_cocycle_shape(omega)?;
    let dim = omega.dim();
    let mut out = PolyMultivector::zero(dim, 2 * p);
    for (idx, v) in omega.nonzeros() {
        let (blade, sigma) = idx.split_at(2 * p);
        if blade.windows(2).all(|w| w[0] < w[1]) {
            out.add_term(Monomial::variable(dim, sigma[0]), blade.to_vec(), v.clone());
        }
    }
    Ok(out)
}

/// Positive multiple `c` with `[Λ, Λ] = c · Σ R_J^σ x_σ ∂_J`, when both are
/// nonzero and proportional.
pub fn snb_residual_ratio(lambda: &PolyMultivector, residual: &GjiResidual) -> Result<Option<ExactScalar>, GpsError> {
    let snb = lambda.schouten_nijenhuis(lambda)?;
    Ok(multivector_ratio(&snb, &residual.as_multivector()))
}

/// `a = c·b` for a single scalar `c`, if it exists and both are nonzero.
pub fn multivector_ratio(a: &PolyMultivector, b: &PolyMultivector) -> Option<ExactScalar> {
    if a.is_zero() || b.is_zero() || a.len() != b.len() {
        return None;
    }
    let (_, _, a0) = a.terms().next()?;
    let (_, _, b0) = b.terms().next()?;
    let c = a0.checked_div(b0).ok()?;
    (*a == b.scale(&c)).then_some(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GpsCertificate {
    pub verified: bool,
    pub residual_nonzero_count: usize,
    pub snb_nonzero_count: usize,
    pub term_groups: usize,
    pub certificates_agree: bool,
}

#[derive(Debug, Clone)]
pub struct GeneralizedPoissonStructure {
    pub p: usize,
    pub omega: CocycleTensor,
    pub lambda: PolyMultivector,
    pub algebra: String,
    pub certificate: GpsCertificate,
}

impl GeneralizedPoissonStructure {
    /// Builds `Λ` and certifies it with both the direct residual and
    /// `[Λ, Λ]`; refuses the construction if either is nonzero.
    pub fn from_cocycle(w: CocycleTensor) -> Result<Self, GpsError> {
        let s = Self::from_cocycle_unverified(w)?;
        let residual = gji_residual(&s.omega.omega)?;
        let snb = s.lambda.schouten_nijenhuis(&s.lambda)?;
        if !residual.is_zero() || !snb.is_zero() {
            return Err(GpsError::GjiViolation { residual: Box::new(residual), snb_nonzero_count: snb.len() });
        }
        let certificate = GpsCertificate {
            verified: true,
            residual_nonzero_count: 0,
            snb_nonzero_count: 0,
            term_groups: residual.term_groups,
            certificates_agree: true,
        };
        Ok(Self { certificate, ..s })
    }

    /// Builds `Λ` without running the identity checks; the certificate is
    /// marked unverified.
    pub fn from_cocycle_unverified(w: CocycleTensor) -> Result<Self, GpsError> {
        let p = check_cocycle_shape(&w.omega)?;
        if !w.omega.is_fully_antisymmetric() {
            return Err(GpsError::NotAntisymmetric);
        }
        let lambda = lambda_from_omega(&w.omega)?;
        let n = 4 * p - 1;
        let term_groups = shuffles(n, 2 * p - 1).len();
        Ok(Self {
            p,
            algebra: w.algebra.clone(),
            omega: w,
            lambda,
            certificate: GpsCertificate {
                verified: false,
                residual_nonzero_count: 0,
                snb_nonzero_count: 0,
                term_groups,
                certificates_agree: false,
            },
        })
    }

    /// Runs both certificates and reports them without refusing anything.
    pub fn certify(&self) -> Result<(GpsCertificate, GjiResidual, PolyMultivector), GpsError> {
        let residual = gji_residual(&self.omega.omega)?;
        let snb = self.lambda.schouten_nijenhuis(&self.lambda)?;
        let agree = match (residual.is_zero(), snb.is_zero()) {
            (true, true) => true,
            (false, false) => multivector_ratio(&snb, &residual.as_multivector()).is_some_and(|c| c.is_positive()),
            _ => false,
        };
        let cert = GpsCertificate {
            verified: residual.is_zero() && snb.is_zero(),
            residual_nonzero_count: residual.nonzero_count(),
            snb_nonzero_count: snb.len(),
            term_groups: residual.term_groups,
            certificates_agree: agree,
        };
        Ok((cert, residual, snb))
    }

    pub fn dim(&self) -> usize {
        self.lambda.dim()
    }

    /// `{f_1, …, f_{2p}} = i_{df_{2p}} ⋯ i_{df_1} Λ`.
    pub fn gpb_eval(&self, fs: &[PolyMultivector]) -> Result<PolyMultivector, GpsError> {
        if fs.len() != 2 * self.p {
            return Err(GpsError::Arity { expected: 2 * self.p, found: fs.len() });
        }
        let mut acc = self.lambda.clone();
        for f in fs {
            acc = acc.interior_df(f)?;
        }
        Ok(acc)
    }

    /// True iff every bracket of `2p-1` coordinate functions with `c` vanishes.
    pub fn casimir_check(&self, c: &PolyMultivector) -> Result<CasimirReport, GpsError> {
        let dim = self.dim();
        for ks in (0..dim).combinations(2 * self.p - 1) {
            let mut args: Vec<PolyMultivector> = ks.iter().map(|&k| PolyMultivector::coordinate(dim, k)).collect();
            args.push(c.clone());
            let v = self.gpb_eval(&args)?;
            if !v.is_zero() {
                return Ok(CasimirReport { is_casimir: false, witness: Some((ks, v)), reduction: CASIMIR_REDUCTION });
            }
        }
        Ok(CasimirReport { is_casimir: true, witness: None, reduction: CASIMIR_REDUCTION })
    }

    /// True iff the bracket vanishes on every `2p`-subset of `fs`.
    pub fn involution_check(&self, fs: &[PolyMultivector]) -> Result<InvolutionReport, GpsError> {
        let n = 2 * self.p;
        if fs.len() < n {
            return Err(GpsError::TooFewFunctions { expected: n, found: fs.len() });
        }
        for subset in (0..fs.len()).combinations(n) {
            let args: Vec<PolyMultivector> = subset.iter().map(|&i| fs[i].clone()).collect();
            let v = self.gpb_eval(&args)?;
            if !v.is_zero() {
                return Ok(InvolutionReport { involutive: false, witness: Some((subset, v)) });
            }
        }
        Ok(InvolutionReport { involutive: true, witness: None })
    }
}

pub const CASIMIR_REDUCTION: &str =
    "coordinates generate the polynomial ring; by multilinearity and the Leibniz rule in each slot, \
     vanishing on all coordinate tuples implies vanishing on all polynomial arguments";

#[derive(Debug, Clone)]
pub struct CasimirReport {
    pub is_casimir: bool,
    /// Coordinate indices of the first `2p-1` arguments and the bracket value.
    pub witness: Option<(Vec<usize>, PolyMultivector)>,
    pub reduction: &'static str,
}

#[derive(Debug, Clone)]
pub struct InvolutionReport {
    pub involutive: bool,
    /// Positions in the input list and the nonzero bracket value.
    pub witness: Option<(Vec<usize>, PolyMultivector)>,
}

/// `[Λ_1, Λ_2]`; zero means the structures are compatible.
pub fn compatibility_residual(
    s1: &GeneralizedPoissonStructure,
    s2: &GeneralizedPoissonStructure,
) -> Result<PolyMultivector, GpsError> {
    if s1.algebra != s2.algebra {
        return Err(GpsError::AlgebraMismatch(s1.algebra.clone(), s2.algebra.clone()));
    }
    Ok(s1.lambda.schouten_nijenhuis(&s2.lambda)?)
}

/// Scalar `(2p)!` relating `ω_J^σ x_σ` to the fully summed
/// `ω_{l1…l2p}^σ x_σ ∂_{l1}⊗…⊗∂_{l2p}` expansion of `Λ`.
pub fn lambda_normalization(p: usize) -> ExactScalar {
    ExactScalar::from_rational(BigRational::new(BigInt::from(1), factorial(2 * p)))
}

/// `[Λ,Λ] / R` for the residual `R` of [`gji_residual`]: `2 / ((2p-1)! (2p)!)`.
pub fn snb_normalization(p: usize) -> ExactScalar {
    ExactScalar::from_rational(BigRational::new(BigInt::from(2), factorial(2 * p - 1) * factorial(2 * p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::{build_cocycle, catalog_load, invariant_symmetric_tensor};
    use crate::multivec::parse_polynomial;
    use crate::tensor::signed_permutations;

    fn structure(name: &str, m: usize) -> GeneralizedPoissonStructure {
        let g = catalog_load(name).unwrap();
        let k = invariant_symmetric_tensor(&g, m).unwrap();
        GeneralizedPoissonStructure::from_cocycle(build_cocycle(&g, &k).unwrap()).unwrap()
    }

    fn x(dim: usize, i: usize) -> PolyMultivector {
        PolyMultivector::coordinate(dim, i)
    }

    /// Full permutation sum for one residual component.
    fn brute_component(omega: &ExactTensor, j: &[usize], sigma: usize) -> ExactScalar {
        let p = (omega.rank() - 1) / 2;
        let n = 4 * p - 1;
        let mut total = ExactScalar::zero();
        for (perm, sign) in signed_permutations(n) {
            let js: Vec<usize> = perm.iter().map(|&q| j[q]).collect();
            for k in 0..omega.dim() {
                let mut l = js[..2 * p - 1].to_vec();
                l.extend([k, sigma]);
                let mut r = js[2 * p - 1..].to_vec();
                r.push(k);
                let v = omega.get(&l) * omega.get(&r);
                if sign > 0 {
                    total += &v;
                } else {
                    total -= &v;
                }
            }
        }
        total
    }

    #[test]
    fn su2_is_lie_poisson() {
        let s = structure("su2", 2);
        assert_eq!(s.p, 1);
        assert_eq!(s.gpb_eval(&[x(3, 0), x(3, 1)]).unwrap(), x(3, 2));
        assert_eq!(s.gpb_eval(&[x(3, 1), x(3, 0)]).unwrap(), x(3, 2).neg());
        assert!(s.gpb_eval(&[x(3, 0)]).is_err());
        assert_eq!(s.certificate.term_groups, 3);
    }

    #[test]
    fn su3_structure_brackets_coordinates() {
        let s = structure("su3", 3);
        assert_eq!(s.p, 2);
        assert_eq!(s.certificate.term_groups, 35);
        let w = &s.omega.omega;
        for idx in (0..8).combinations(4).take(20) {
            let args: Vec<_> = idx.iter().map(|&i| x(8, i)).collect();
            let got = s.gpb_eval(&args).unwrap();
            let mut want = PolyMultivector::zero(8, 0);
            for sigma in 0..8 {
                let mut full = idx.clone();
                full.push(sigma);
                want = want.try_add(&x(8, sigma).scale(w.get(&full))).unwrap();
            }
            assert_eq!(got, want, "{idx:?}");
        }
        let f = parse_polynomial(8, "x1*x2 + x3").unwrap();
        let args = [f.clone(), f, x(8, 4), x(8, 5)];
        assert!(s.gpb_eval(&args).unwrap().is_zero());
    }

    fn su3_cocycle() -> CocycleTensor {
        let g = catalog_load("su3").unwrap();
        let k = invariant_symmetric_tensor(&g, 3).unwrap();
        build_cocycle(&g, &k).unwrap()
    }

    /// Zero-pads `w` to a larger dimension.
    fn embed(w: &CocycleTensor, dim: usize) -> CocycleTensor {
        let small = w.omega.dim();
        let t = ExactTensor::from_fn(w.order, dim, |i| {
            if i.iter().all(|&a| a < small) {
                w.omega.get(i).clone()
            } else {
                ExactScalar::zero()
            }
        });
        CocycleTensor::from_tensor("su3+u1", t).unwrap()
    }

    #[test]
    fn residual_matches_brute_force() {
        let w = embed(&su3_cocycle(), 9).perturbed(&[0, 1, 2, 3, 8], &ExactScalar::one()).unwrap();
        let r = gji_residual(&w.omega).unwrap();
        assert!(!r.is_zero());
        for j in (0..9).combinations(7).step_by(5) {
            for sigma in [0, 3, 8] {
                assert_eq!(r.get(&j, sigma), brute_component(&w.omega, &j, sigma), "{j:?} {sigma}");
            }
        }
    }

    #[test]
    fn perturbed_su3_residual_matches_brute_force() {
        let w = su3_cocycle().perturbed(&[0, 1, 2, 3, 4], &ExactScalar::one()).unwrap();
        let r = gji_residual(&w.omega).unwrap();
        for j in (0..8).combinations(7).step_by(3) {
            for sigma in [1, 4, 6] {
                assert_eq!(r.get(&j, sigma), brute_component(&w.omega, &j, sigma), "{j:?} {sigma}");
            }
        }
        // in eight dimensions the quadratic residual of any 5-form vanishes
        assert!(r.is_zero());
    }

    #[test]
    fn p1_residual_is_jacobi_pattern() {
        let g = catalog_load("su3").unwrap();
        let mut c = g.lowered_structure_constants().unwrap();
        // antisymmetric mutation breaks Jacobi but keeps the cocycle shape
        for (perm, sign) in signed_permutations(3) {
            let base = [0usize, 1, 2];
            let idx: Vec<usize> = perm.iter().map(|&q| base[q]).collect();
            c.set(&idx, ExactScalar::from_int(2 * sign));
        }
        let r = gji_residual(&c).unwrap();
        let dense = r.to_tensor().unwrap();
        let bad = crate::liealg::LieAlgebra::from_structure_constants("m", c.clone()).unwrap();
        let jac = bad.jacobi_residual();
        // R = Alt(ω_{j1 k σ} ω_{j2 j3 k}) = -Alt(C^k_{j2 j3} C^σ_{k j1}) and the cyclic shift is even
        assert_eq!(dense.proportionality(&jac), Some(ExactScalar::from_int(-1)));
    }

    #[test]
    fn zeroed_component_is_refused() {
        let w = embed(&su3_cocycle(), 9);
        assert!(GeneralizedPoissonStructure::from_cocycle(w.clone()).is_ok());
        let bad = w.perturbed(&[0, 1, 2, 3, 8], &ExactScalar::one()).unwrap();
        match GeneralizedPoissonStructure::from_cocycle(bad) {
            Err(GpsError::GjiViolation { residual, snb_nonzero_count }) => {
                assert!(residual.nonzero_count() > 0 && snb_nonzero_count > 0);
            }
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn zeroed_su3_component_still_passes() {
        let w = su3_cocycle();
        let (idx, v) = w.omega.nonzeros().next().map(|(i, v)| (i, v.clone())).unwrap();
        let z = w.perturbed(&idx, &-v).unwrap();
        assert!(z.omega.get(&idx).is_zero());
        assert!(GeneralizedPoissonStructure::from_cocycle(z).is_ok());
    }

    #[test]
    fn snb_is_positive_multiple_of_residual() {
        let g = catalog_load("su3").unwrap();
        let k = invariant_symmetric_tensor(&g, 2).unwrap();
        let w3 = build_cocycle(&g, &k).unwrap().perturbed(&[0, 1, 2], &ExactScalar::one()).unwrap();
        let w5 = embed(&su3_cocycle(), 9).perturbed(&[0, 1, 2, 3, 8], &ExactScalar::one()).unwrap();
        // [Λ, Λ] = 2/((2p-1)!(2p)!) · R
        for (w, want) in [(w3, ExactScalar::one()), (w5, ExactScalar::from_frac(1, 72))] {
            assert_eq!(snb_normalization(w.p()), want);
            let s = GeneralizedPoissonStructure::from_cocycle_unverified(w).unwrap();
            let (cert, residual, _) = s.certify().unwrap();
            let ratio = snb_residual_ratio(&s.lambda, &residual).unwrap().expect("proportional");
            assert!(ratio.is_positive(), "p={}: {ratio}", s.p);
            assert_eq!(ratio, want);
            assert!(cert.certificates_agree && !cert.verified);
        }
    }

    #[test]
    fn compatibility() {
        let s2 = structure("su3", 2);
        let s4 = structure("su3", 3);
        assert!(compatibility_residual(&s2, &s4).unwrap().is_zero());
        let su2 = structure("su2", 2);
        assert!(compatibility_residual(&su2, &su2).unwrap().is_zero());
        assert!(matches!(compatibility_residual(&su2, &s4), Err(GpsError::AlgebraMismatch(..))));
        let bad = s4.omega.perturbed(&[0, 1, 2, 3, 4], &ExactScalar::one()).unwrap();
        let bad = GeneralizedPoissonStructure::from_cocycle_unverified(bad).unwrap();
        assert!(!compatibility_residual(&s2, &bad).unwrap().is_zero());
    }

    #[test]
    fn casimirs() {
        let su2 = structure("su2", 2);
        let c2 = parse_polynomial(3, "x1^2+x2^2+x3^2").unwrap();
        assert!(su2.casimir_check(&c2).unwrap().is_casimir);
        let r = su2.casimir_check(&x(3, 0)).unwrap();
        assert!(!r.is_casimir);
        let (ks, v) = r.witness.unwrap();
        assert_eq!(ks, vec![1]);
        assert_eq!(v, x(3, 2).neg());
        let su3 = structure("su3", 3);
        let c8 = parse_polynomial(8, "x1^2+x2^2+x3^2+x4^2+x5^2+x6^2+x7^2+x8^2").unwrap();
        assert!(su3.casimir_check(&c8).unwrap().is_casimir);
    }

    #[test]
    fn involution() {
        let s = structure("su3", 3);
        let c8 = parse_polynomial(8, "x1^2+x2^2+x3^2+x4^2+x5^2+x6^2+x7^2+x8^2").unwrap();
        let coords: Vec<_> = (0..4).map(|i| x(8, i)).collect();
        let r = s.involution_check(&coords).unwrap();
        assert!(!r.involutive);
        assert_eq!(r.witness.unwrap().0, vec![0, 1, 2, 3]);
        let padded = [x(8, 0), x(8, 0), x(8, 1), x(8, 2), x(8, 0)];
        assert!(s.involution_check(&padded).unwrap().involutive);
        // the single 4-subset contains the Casimir
        let with_c = [x(8, 0), x(8, 1), x(8, 2), c8.clone()];
        assert!(s.involution_check(&with_c).unwrap().involutive);
        let mixed = [x(8, 0), x(8, 1), x(8, 2), c8, x(8, 3)];
        let r = s.involution_check(&mixed).unwrap();
        assert_eq!(r.witness.unwrap().0, vec![0, 1, 2, 4]);
        assert!(matches!(s.involution_check(&coords[..3]), Err(GpsError::TooFewFunctions { .. })));
    }

    #[test]
    fn scaling_preserves_identity() {
        let s = structure("su3", 3);
        let scaled = s.omega.omega.scale(&ExactScalar::sqrt_frac(2, 5));
        assert!(gji_residual(&scaled).unwrap().is_zero());
    }

    #[test]
    fn rebuild_lambda_is_exact() {
        let s = structure("su3", 3);
        assert_eq!(lambda_from_omega(&s.omega.omega).unwrap(), s.lambda);
        assert_eq!(s.lambda.len(), s.omega.omega.nonzero_count() / 24);
    }

    #[test]
    fn even_order_rejected() {
        assert!(matches!(gji_residual(&ExactTensor::zeros(4, 3)), Err(GpsError::BadOrder(4))));
    }
}
