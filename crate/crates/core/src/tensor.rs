//! Dense exact tensors with a single common index range.
//!
//! Upper and lower index positions are not distinguished: every catalog algebra
//! is presented in a basis whose invariant metric is a multiple of the
//! identity, so raising and lowering is bookkeeping only.

use std::collections::HashMap;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::ExactScalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("index position {position} out of range for rank {rank}")]
    PositionOutOfRange { position: usize, rank: usize },
    #[error("index position {0} selected more than once")]
    RepeatedPosition(usize),
    #[error("index ranges differ: {0} vs {1}")]
    RangeMismatch(usize, usize),
    #[error("multi-index {index:?} invalid for rank {rank}, dim {dim}")]
    BadIndex { index: Vec<usize>, rank: usize, dim: usize },
    #[error("malformed tensor dump: {0}")]
    Dump(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryTag {
    None,
    FullyAntisymmetric,
    FullySymmetric,
}

/// Parity of a permutation given in one-line notation: `+1` or `-1`.
pub fn permutation_sign(perm: &[usize]) -> i64 {
    let mut inversions = 0usize;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// All permutations of `0..n` with their parity.
pub fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    (0..n)
        .permutations(n)
        .map(|p| {
            let s = permutation_sign(&p);
            (p, s)
        })
        .collect()
}

/// A shuffle of `0..n` into an increasing block of size `k` followed by an
/// increasing block of size `n - k`, together with its parity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shuffle {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub sign: i64,
}

/// The `C(n, k)` shuffles used when alternating a product that is already
/// antisymmetric within each factor.
pub fn shuffles(n: usize, k: usize) -> Vec<Shuffle> {
    (0..n)
        .combinations(k)
        .map(|first| {
            let second: Vec<usize> = (0..n).filter(|i| !first.contains(i)).collect();
            let perm: Vec<usize> = first.iter().chain(second.iter()).copied().collect();
            let sign = permutation_sign(&perm);
            Shuffle { first, second, sign }
        })
        .collect()
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k))
}

#[derive(Clone)]
pub struct ExactTensor {
    rank: usize,
    dim: usize,
    data: Vec<ExactScalar>,
    symmetry: SymmetryTag,
}

// the symmetry tag is advisory and does not take part in equality
impl PartialEq for ExactTensor {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.dim == other.dim && self.data == other.data
    }
}

impl Eq for ExactTensor {}

impl std::fmt::Debug for ExactTensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExactTensor")
            .field("rank", &self.rank)
            .field("dim", &self.dim)
            .field("nonzero", &self.nonzero_count())
            .field("symmetry", &self.symmetry)
            .finish()
    }
}

impl ExactTensor {
    pub fn zeros(rank: usize, dim: usize) -> Self {
        let len = dim.pow(rank as u32);
        Self { rank, dim, data: vec![ExactScalar::zero(); len], symmetry: SymmetryTag::None }
    }

    /// Kronecker delta on `dim` indices.
    pub fn identity(dim: usize) -> Self {
        let mut t = Self::zeros(2, dim);
        for i in 0..dim {
            t.set(&[i, i], ExactScalar::one());
        }
        t.symmetry = SymmetryTag::FullySymmetric;
        t
    }

    pub fn from_fn(rank: usize, dim: usize, mut f: impl FnMut(&[usize]) -> ExactScalar) -> Self {
        let mut t = Self::zeros(rank, dim);
        for off in 0..t.data.len() {
            let idx = t.multi_index(off);
            t.data[off] = f(&idx);
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn symmetry(&self) -> SymmetryTag {
        self.symmetry
    }

    pub fn with_symmetry(mut self, tag: SymmetryTag) -> Self {
        self.symmetry = tag;
        self
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| {
            debug_assert!(i < self.dim);
            acc * self.dim + i
        })
    }

    pub fn multi_index(&self, mut offset: usize) -> Vec<usize> {
        let mut idx = vec![0; self.rank];
        for slot in idx.iter_mut().rev() {
            *slot = offset % self.dim;
            offset /= self.dim;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> &ExactScalar {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: ExactScalar) {
        let off = self.offset(idx);
        self.data[off] = value;
    }

    pub fn add_at(&mut self, idx: &[usize], value: &ExactScalar) {
        let off = self.offset(idx);
        self.data[off] += value;
    }

    pub fn checked_get(&self, idx: &[usize]) -> Result<&ExactScalar, TensorError> {
        if idx.len() != self.rank || idx.iter().any(|&i| i >= self.dim) {
            return Err(TensorError::BadIndex { index: idx.to_vec(), rank: self.rank, dim: self.dim });
        }
        Ok(self.get(idx))
    }

    /// Nonzero entries in row-major order.
    pub fn nonzeros(&self) -> impl Iterator<Item = (Vec<usize>, &ExactScalar)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(off, v)| (self.multi_index(off), v))
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(ExactScalar::is_zero)
    }

    pub fn scale(&self, s: &ExactScalar) -> Self {
        Self {
            rank: self.rank,
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
            symmetry: self.symmetry,
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), TensorError> {
        if self.dim != other.dim {
            return Err(TensorError::RangeMismatch(self.dim, other.dim));
        }
        if self.rank != other.rank {
            return Err(TensorError::BadIndex { index: vec![], rank: other.rank, dim: other.dim });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        let symmetry = if self.symmetry == other.symmetry { self.symmetry } else { SymmetryTag::None };
        Ok(Self { rank: self.rank, dim: self.dim, data, symmetry })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, TensorError> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        let symmetry = if self.symmetry == other.symmetry { self.symmetry } else { SymmetryTag::None };
        Ok(Self { rank: self.rank, dim: self.dim, data, symmetry })
    }

    /// Reorders index positions: output position `a` is input position `perm[a]`.
    pub fn permute_axes(&self, perm: &[usize]) -> Result<Self, TensorError> {
        self.check_positions(perm)?;
        if perm.len() != self.rank {
            return Err(TensorError::BadIndex { index: perm.to_vec(), rank: self.rank, dim: self.dim });
        }
        let mut out = Self::zeros(self.rank, self.dim);
        for (idx, v) in self.nonzeros() {
            let new_idx: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
            out.set(&new_idx, v.clone());
        }
        Ok(out)
    }

    fn check_positions(&self, positions: &[usize]) -> Result<(), TensorError> {
        for (a, &p) in positions.iter().enumerate() {
            if p >= self.rank {
                return Err(TensorError::PositionOutOfRange { position: p, rank: self.rank });
            }
            if positions[..a].contains(&p) {
                return Err(TensorError::RepeatedPosition(p));
            }
        }
        Ok(())
    }

    fn alternate(&self, positions: &[usize], signed: bool, normalized: bool) -> Result<Self, TensorError> {
        self.check_positions(positions)?;
        let k = positions.len();
        let perms = signed_permutations(k);
        let mut out = Self::zeros(self.rank, self.dim);
        let mut new_idx = vec![0; self.rank];
        for (idx, v) in self.nonzeros() {
            let neg = -v;
            for (perm, sign) in &perms {
                new_idx.copy_from_slice(&idx);
                for (a, &pa) in positions.iter().enumerate() {
                    new_idx[pa] = idx[positions[perm[a]]];
                }
                if signed && *sign < 0 {
                    out.add_at(&new_idx, &neg);
                } else {
                    out.add_at(&new_idx, v);
                }
            }
        }
        if normalized {
            let inv = ExactScalar::from_rational(BigRational::new(BigInt::from(1), factorial(k)));
            out = out.scale(&inv);
        }
        if k == self.rank {
            out.symmetry = if signed { SymmetryTag::FullyAntisymmetric } else { SymmetryTag::FullySymmetric };
        }
        Ok(out)
    }

    /// `Σ_s sign(s) T∘s` over permutations `s` of the selected positions,
    /// divided by `k!` when `normalized`.
    pub fn antisymmetrize(&self, positions: &[usize], normalized: bool) -> Result<Self, TensorError> {
        self.alternate(positions, true, normalized)
    }

    pub fn symmetrize(&self, positions: &[usize], normalized: bool) -> Result<Self, TensorError> {
        self.alternate(positions, false, normalized)
    }

    /// Sums over the paired positions. The result carries the free positions
    /// of `a` in order, followed by the free positions of `b`.
    pub fn contract(a: &Self, b: &Self, pairs: &[(usize, usize)]) -> Result<Self, TensorError> {
        if a.dim != b.dim {
            return Err(TensorError::RangeMismatch(a.dim, b.dim));
        }
        let pa: Vec<usize> = pairs.iter().map(|p| p.0).collect();
        let pb: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        a.check_positions(&pa)?;
        b.check_positions(&pb)?;
        let free_a: Vec<usize> = (0..a.rank).filter(|p| !pa.contains(p)).collect();
        let free_b: Vec<usize> = (0..b.rank).filter(|p| !pb.contains(p)).collect();

        let mut by_key: HashMap<Vec<usize>, Vec<(Vec<usize>, &ExactScalar)>> = HashMap::new();
        for (idx, v) in b.nonzeros() {
            let key: Vec<usize> = pb.iter().map(|&p| idx[p]).collect();
            let rest: Vec<usize> = free_b.iter().map(|&p| idx[p]).collect();
            by_key.entry(key).or_default().push((rest, v));
        }

        let mut out = Self::zeros(free_a.len() + free_b.len(), a.dim);
        let mut out_idx = vec![0; out.rank];
        for (idx, va) in a.nonzeros() {
            let key: Vec<usize> = pa.iter().map(|&p| idx[p]).collect();
            let Some(matches) = by_key.get(&key) else { continue };
            for (slot, &p) in free_a.iter().enumerate() {
                out_idx[slot] = idx[p];
            }
            for (rest, vb) in matches {
                out_idx[free_a.len()..].copy_from_slice(rest);
                out.add_at(&out_idx, &(va * *vb));
            }
        }
        Ok(out)
    }

    /// Rank-`2n` tensor `δ^{j1…jn}_{l1…ln}` laid out as `[j1…jn, l1…ln]`:
    /// `Σ_s sign(s) Π_a δ^{j_{s(a)}}_{l_a}`, unnormalized.
    pub fn generalized_kronecker(n: usize, dim: usize) -> Self {
        let mut out = Self::zeros(2 * n, dim);
        let perms = signed_permutations(n);
        let mut idx = vec![0; 2 * n];
        for upper in (0..dim).permutations(n) {
            for (perm, sign) in &perms {
                idx[..n].copy_from_slice(&upper);
                for a in 0..n {
                    idx[n + a] = upper[perm[a]];
                }
                out.set(&idx, ExactScalar::from_int(*sign));
            }
        }
        out
    }

    /// Exhaustive check that every transposition of positions flips the sign.
    pub fn is_fully_antisymmetric(&self) -> bool {
        self.check_transpositions(true)
    }

    pub fn is_fully_symmetric(&self) -> bool {
        self.check_transpositions(false)
    }

    fn check_transpositions(&self, antisymmetric: bool) -> bool {
        // adjacent transpositions generate the symmetric group
        for off in 0..self.data.len() {
            let idx = self.multi_index(off);
            let v = &self.data[off];
            for a in 0..self.rank.saturating_sub(1) {
                let mut swapped = idx.clone();
                swapped.swap(a, a + 1);
                let w = self.get(&swapped);
                let ok = if antisymmetric { (v + w).is_zero() } else { v == w };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// The scalar `c` with `self = c·other`, if one exists and `other` is nonzero.
    pub fn proportionality(&self, other: &Self) -> Option<ExactScalar> {
        if self.rank != other.rank || self.dim != other.dim {
            return None;
        }
        let mut ratio: Option<ExactScalar> = None;
        for (a, b) in self.data.iter().zip(&other.data) {
            match (a.is_zero(), b.is_zero()) {
                (true, true) => {}
                (false, true) => return None,
                (_, false) => {
                    let r = a.checked_div(b).ok()?;
                    match &ratio {
                        None => ratio = Some(r),
                        Some(c) if *c == r => {}
                        Some(_) => return None,
                    }
                }
            }
        }
        ratio
    }

    pub fn to_dump(&self) -> TensorDump {
        TensorDump {
            rank: self.rank,
            dim: self.dim,
            entries: self
                .nonzeros()
                .map(|(idx, v)| (idx.iter().map(|i| i + 1).collect(), v.clone()))
                .collect(),
        }
    }

    pub fn from_dump(dump: &TensorDump) -> Result<Self, TensorError> {
        let capacity = dump.dim.checked_pow(dump.rank as u32).ok_or_else(|| {
            TensorError::Dump(format!("dim {} rank {} too large", dump.dim, dump.rank))
        })?;
        if capacity > 1 << 26 {
            return Err(TensorError::Dump(format!("{capacity} entries exceeds dense limit")));
        }
        let mut t = Self::zeros(dump.rank, dump.dim);
        for (idx, v) in &dump.entries {
            if idx.len() != dump.rank || idx.iter().any(|&i| i == 0 || i > dump.dim) {
                return Err(TensorError::BadIndex { index: idx.clone(), rank: dump.rank, dim: dump.dim });
            }
            let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
            t.set(&zero_based, v.clone());
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_dump()).expect("tensor dump serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, TensorError> {
        let dump: TensorDump = serde_json::from_str(s).map_err(|e| TensorError::Dump(e.to_string()))?;
        Self::from_dump(&dump)
    }
}

/// Nonzero-entry listing with one-based multi-indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorDump {
    pub rank: usize,
    pub dim: usize,
    pub entries: Vec<(Vec<usize>, ExactScalar)>,
}
