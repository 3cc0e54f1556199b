//! Multivector fields with polynomial coefficients on an `r`-dimensional
//! coordinate space, with wedge, interior product and the
//! Schouten–Nijenhuis bracket.
//!
//! A term is `c · x^α ∂_{j1} ∧ … ∧ ∂_{jn}` with `j1 < … < jn` (0-based
//! internally, printed 1-based). Order-0 multivectors are polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::ExactScalar;

pub const MAX_DEGREE: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MultivecError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("order mismatch: expected {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },
    #[error("monomial degree {0} exceeds the bound {MAX_DEGREE}")]
    DegreeOverflow(u32),
    #[error("coordinate index {index} out of range for dimension {dim}")]
    BadCoordinate { index: usize, dim: usize },
    #[error("derivation indices must be distinct and in range: {0:?}")]
    BadBlade(Vec<usize>),
    #[error("polynomial parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    pub fn variable(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self(e)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Result<Self, MultivecError> {
        let deg: u32 = exps.iter().sum();
        if deg > MAX_DEGREE {
            return Err(MultivecError::DegreeOverflow(deg));
        }
        Ok(Self(exps))
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, MultivecError> {
        let deg = self.degree() + other.degree();
        if deg > MAX_DEGREE {
            return Err(MultivecError::DegreeOverflow(deg));
        }
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    /// `∂_i x^α = α_i x^{α - e_i}`, as `(α_i, x^{α - e_i})`.
    pub fn derivative(&self, i: usize) -> Option<(u32, Self)> {
        let e = self.0[i];
        if e == 0 {
            return None;
        }
        let mut out = self.0.clone();
        out[i] -= 1;
        Some((e, Self(out)))
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&e, &v)| v.powi(e as i32)).product()
    }

    pub fn eval_exact(&self, x: &[ExactScalar]) -> ExactScalar {
        let mut acc = ExactScalar::one();
        for (&e, v) in self.0.iter().zip(x) {
            for _ in 0..e {
                acc = &acc * v;
            }
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Sorts `idx` in place and returns the permutation sign, or `None` on a repeat.
pub fn canonical_blade(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    // insertion sort, counting transpositions
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && idx[j - 1] == idx[j] {
            return None;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}

pub type TermKey = (Monomial, Vec<usize>);

#[derive(Debug, Clone, Eq)]
pub struct PolyMultivector {
    dim: usize,
    order: usize,
    terms: BTreeMap<TermKey, ExactScalar>,
}

/// The zero multivector compares equal across orders.
impl PartialEq for PolyMultivector {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.terms == other.terms && (self.order == other.order || self.terms.is_empty())
    }
}

impl PolyMultivector {
    pub fn zero(dim: usize, order: usize) -> Self {
        Self { dim, order, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: ExactScalar) -> Self {
        let mut p = Self::zero(dim, 0);
        p.add_term(Monomial::one(dim), vec![], c);
        p
    }

    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut p = Self::zero(dim, 0);
        p.add_term(Monomial::variable(dim, i), vec![], ExactScalar::one());
        p
    }

    /// The constant field `∂_i`.
    pub fn partial(dim: usize, i: usize) -> Self {
        let mut p = Self::zero(dim, 1);
        p.add_term(Monomial::one(dim), vec![i], ExactScalar::one());
        p
    }

    /// `c · x^α ∂_{idx}` with `idx` in any order (sign applied) and in range.
    pub fn monomial_term(dim: usize, mono: Monomial, idx: &[usize], c: ExactScalar) -> Result<Self, MultivecError> {
        if mono.0.len() != dim {
            return Err(MultivecError::DimensionMismatch(dim, mono.0.len()));
        }
        if idx.iter().any(|&i| i >= dim) {
            return Err(MultivecError::BadBlade(idx.to_vec()));
        }
        let mut blade = idx.to_vec();
        let sign = canonical_blade(&mut blade).ok_or_else(|| MultivecError::BadBlade(idx.to_vec()))?;
        let mut p = Self::zero(dim, idx.len());
        p.add_term(mono, blade, if sign > 0 { c } else { -c });
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Degree in the graded sense, `order - 1`.
    pub fn degree(&self) -> i64 {
        self.order as i64 - 1
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &[usize], &ExactScalar)> {
        self.terms.iter().map(|((m, b), c)| (m, b.as_slice(), c))
    }

    /// Coefficient polynomial of the canonical blade `blade`.
    pub fn component(&self, blade: &[usize]) -> PolyMultivector {
        let mut p = Self::zero(self.dim, 0);
        for ((m, b), c) in &self.terms {
            if b == blade {
                p.add_term(m.clone(), vec![], c.clone());
            }
        }
        p
    }

    /// Highest monomial degree appearing.
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    /// Adds `c` at a canonical key; the blade must already be sorted.
    pub(crate) fn add_term(&mut self, mono: Monomial, blade: Vec<usize>, c: ExactScalar) {
        debug_assert_eq!(blade.len(), self.order);
        if c.is_zero() {
            return;
        }
        let key = (mono, blade);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<(), MultivecError> {
        if self.dim != other.dim {
            return Err(MultivecError::DimensionMismatch(self.dim, other.dim));
        }
        if self.order != other.order && !self.is_zero() && !other.is_zero() {
            return Err(MultivecError::OrderMismatch { expected: self.order, found: other.order });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, MultivecError> {
        self.check_same(other)?;
        let mut out = if self.is_zero() { Self::zero(self.dim, other.order) } else { self.clone() };
        for ((m, b), c) in &other.terms {
            out.add_term(m.clone(), b.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, MultivecError> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&ExactScalar::from_int(-1))
    }

    pub fn scale(&self, s: &ExactScalar) -> Self {
        let mut out = Self::zero(self.dim, self.order);
        if s.is_zero() {
            return out;
        }
        out.terms = self.terms.iter().map(|(k, c)| (k.clone(), c * s)).collect();
        out
    }

    pub fn wedge(&self, other: &Self) -> Result<Self, MultivecError> {
        if self.dim != other.dim {
            return Err(MultivecError::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = Self::zero(self.dim, self.order + other.order);
        for ((ma, ba), ca) in &self.terms {
            for ((mb, bb), cb) in &other.terms {
                let mut blade: Vec<usize> = ba.iter().chain(bb).copied().collect();
                let Some(sign) = canonical_blade(&mut blade) else { continue };
                let c = ca * cb;
                out.add_term(ma.mul(mb)?, blade, if sign > 0 { c } else { -c });
            }
        }
        Ok(out)
    }

    /// Polynomial product; the same as wedge when one side has order 0.
    pub fn mul(&self, other: &Self) -> Result<Self, MultivecError> {
        self.wedge(other)
    }

    pub fn pow(&self, e: u32) -> Result<Self, MultivecError> {
        if self.order != 0 {
            return Err(MultivecError::OrderMismatch { expected: 0, found: self.order });
        }
        let mut acc = Self::constant(self.dim, ExactScalar::one());
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Coefficient-wise `∂/∂x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim, self.order);
        for ((m, b), c) in &self.terms {
            if let Some((e, dm)) = m.derivative(i) {
                out.add_term(dm, b.clone(), c.scale(&BigRational::from_integer(BigInt::from(e))));
            }
        }
        out
    }

    pub fn gradient(&self) -> Result<Vec<Self>, MultivecError> {
        if self.order != 0 {
            return Err(MultivecError::OrderMismatch { expected: 0, found: self.order });
        }
        Ok((0..self.dim).map(|i| self.derivative(i)).collect())
    }

    /// `i_{df} A`, with `i_{df}(∂_{j1}∧…∧∂_{jn}) = Σ_a (−1)^{a−1} ∂_{ja}f ∂_{J∖ja}`.
    pub fn interior_df(&self, f: &Self) -> Result<Self, MultivecError> {
        if self.dim != f.dim {
            return Err(MultivecError::DimensionMismatch(self.dim, f.dim));
        }
        if f.order != 0 {
            return Err(MultivecError::OrderMismatch { expected: 0, found: f.order });
        }
        if self.order == 0 {
            return Err(MultivecError::OrderMismatch { expected: 1, found: 0 });
        }
        let grad = f.gradient()?;
        let mut out = Self::zero(self.dim, self.order - 1);
        for ((m, b), c) in &self.terms {
            for (a, &j) in b.iter().enumerate() {
                let rest: Vec<usize> = b.iter().enumerate().filter(|&(k, _)| k != a).map(|(_, &v)| v).collect();
                let sign = if a % 2 == 0 { c.clone() } else { -c };
                for ((gm, _), gc) in &grad[j].terms {
                    out.add_term(m.mul(gm)?, rest.clone(), &sign * gc);
                }
            }
        }
        Ok(out)
    }

    /// `X_f = i_{df} L` for a bivector `L`.
    pub fn hamiltonian_vector_field(&self, f: &Self) -> Result<Self, MultivecError> {
        if self.order != 2 {
            return Err(MultivecError::OrderMismatch { expected: 2, found: self.order });
        }
        self.interior_df(f)
    }

    /// `X(f) = Σ_j X^j ∂_j f` for a vector field `X`.
    pub fn apply_vector_field(&self, f: &Self) -> Result<Self, MultivecError> {
        if self.order != 1 {
            return Err(MultivecError::OrderMismatch { expected: 1, found: self.order });
        }
        self.interior_df(f)
    }

    /// Exact evaluation of every coefficient polynomial at `x`, as a map blade → value.
    pub fn eval_exact(&self, x: &[ExactScalar]) -> BTreeMap<Vec<usize>, ExactScalar> {
        let mut out: BTreeMap<Vec<usize>, ExactScalar> = BTreeMap::new();
        for ((m, b), c) in &self.terms {
            let v = c * &m.eval_exact(x);
            let e = out.entry(b.clone()).or_default();
            *e += &v;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// Schouten–Nijenhuis bracket `[A, B]`, of order `a + b − 1`.
    pub fn schouten_nijenhuis(&self, other: &Self) -> Result<Self, MultivecError> {
        if self.dim != other.dim {
            return Err(MultivecError::DimensionMismatch(self.dim, other.dim));
        }
        let dim = self.dim;
        if self.order + other.order == 0 {
            return Ok(Self::zero(dim, 0));
        }
        let order = self.order + other.order - 1;
        let a_terms: Vec<_> = self.terms.iter().collect();
        let b_terms: Vec<_> = other.terms.iter().collect();
        let merged = a_terms
            .par_iter()
            .map(|((ma, ba), ca)| -> Result<BTreeMap<TermKey, ExactScalar>, MultivecError> {
                let fa = factors(ma, ba);
                let mut acc: BTreeMap<TermKey, ExactScalar> = BTreeMap::new();
                for ((mb, bb), cb) in &b_terms {
                    let fb = factors(mb, bb);
                    let coef = *ca * *cb;
                    for (k, list) in bracket_factors(&fa, &fb) {
                        if let Some((sign, key)) = collapse(dim, &list)? {
                            let v = coef.scale(&BigRational::from_integer(BigInt::from(k * sign)));
                            let e = acc.entry(key).or_default();
                            *e += &v;
                        }
                    }
                }
                Ok(acc)
            })
            .try_reduce(BTreeMap::new, |mut x, y| {
                for (k, v) in y {
                    let e = x.entry(k).or_default();
                    *e += &v;
                }
                Ok(x)
            })?;
        let mut out = Self::zero(dim, order);
        out.terms = merged.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_dump()).expect("multivector dump serializes")
    }

    pub fn to_dump(&self) -> MultivectorDump {
        MultivectorDump {
            dim: self.dim,
            order: self.order,
            terms: self
                .terms
                .iter()
                .map(|((m, b), c)| (m.0.clone(), b.iter().map(|i| i + 1).collect(), c.clone()))
                .collect(),
        }
    }

    pub fn from_dump(d: &MultivectorDump) -> Result<Self, MultivecError> {
        let mut out = Self::zero(d.dim, d.order);
        for (exps, idx, c) in &d.terms {
            if idx.len() != d.order || idx.iter().any(|&i| i == 0 || i > d.dim) {
                return Err(MultivecError::BadBlade(idx.clone()));
            }
            let zero_based: Vec<usize> = idx.iter().map(|i| i - 1).collect();
            let mono = Monomial::from_exponents(exps.clone())?;
            let t = Self::monomial_term(d.dim, mono, &zero_based, c.clone())?;
            out = out.try_add(&t)?;
        }
        Ok(out)
    }

    /// Returns a reusable `f64` evaluator for an order-0 multivector.
    pub fn compile(&self) -> Result<CompiledPoly, MultivecError> {
        if self.order != 0 {
            return Err(MultivecError::OrderMismatch { expected: 0, found: self.order });
        }
        Ok(CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|((m, _), c)| {
                    let powers = m.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e as i32)).collect();
                    (c.to_f64(), powers)
                })
                .collect(),
        })
    }
}

impl fmt::Display for PolyMultivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, ((m, b), c)) in self.terms.iter().enumerate() {
            let mut cs = c.to_string();
            let simple = !cs[1..].contains(['+', '-']);
            if n > 0 {
                if simple && cs.starts_with('-') {
                    cs.remove(0);
                    write!(f, " - ")?;
                } else {
                    write!(f, " + ")?;
                }
            }
            let bare = m.degree() == 0 && b.is_empty();
            match cs.as_str() {
                "1" if !bare => {}
                "-1" if !bare => write!(f, "-")?,
                _ if simple => write!(f, "{cs}")?,
                _ => write!(f, "({cs})")?,
            }
            let shown_coef = bare || !matches!(cs.as_str(), "1" | "-1");
            if m.degree() > 0 {
                if shown_coef {
                    write!(f, "*")?;
                }
                write!(f, "{m}")?;
            }
            for (k, j) in b.iter().enumerate() {
                let sep = if k > 0 {
                    "^"
                } else if m.degree() > 0 || shown_coef {
                    " "
                } else {
                    ""
                };
                write!(f, "{sep}d{}", j + 1)?;
            }
        }
        Ok(())
    }
}

/// JSON term list: `{dim, order, terms: [[exponents], [1-based blade], "scalar"]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MultivectorDump {
    pub dim: usize,
    pub order: usize,
    pub terms: Vec<(Vec<u32>, Vec<usize>, ExactScalar)>,
}

#[derive(Debug, Clone)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, pw)| pw.iter().fold(*c, |acc, &(i, e)| acc * x[i].powi(e)))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Factor {
    Func(Monomial),
    Partial(usize),
}

fn factors(m: &Monomial, b: &[usize]) -> Vec<Factor> {
    let mut v = Vec::with_capacity(b.len() + 1);
    v.push(Factor::Func(m.clone()));
    v.extend(b.iter().map(|&j| Factor::Partial(j)));
    v
}

fn factor_order(list: &[Factor]) -> i64 {
    list.iter().filter(|f| matches!(f, Factor::Partial(_))).count() as i64
}

fn parity_sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Bracket of two wedge words, as a sum of integer multiples of wedge words.
///
/// Leibniz in the second slot, graded antisymmetry to bring a single factor
/// into the first slot, and the base rules `[∂_i, f] = ∂_i f`,
/// `[f, ∂_i] = −∂_i f`, `[f, g] = [∂_i, ∂_j] = 0`.
fn bracket_factors(a: &[Factor], b: &[Factor]) -> Vec<(i64, Vec<Factor>)> {
    let ord_a = factor_order(a);
    if b.len() > 1 {
        let mut out = Vec::new();
        let mut before = 0;
        for k in 0..b.len() {
            let sign = parity_sign((ord_a - 1) * before);
            for (c, inner) in bracket_factors(a, &b[k..k + 1]) {
                let mut word = Vec::with_capacity(b.len() + inner.len());
                word.extend_from_slice(&b[..k]);
                word.extend(inner);
                word.extend_from_slice(&b[k + 1..]);
                out.push((sign * c, word));
            }
            before += factor_order(&b[k..k + 1]);
        }
        return out;
    }
    if a.len() > 1 {
        let ord_b = factor_order(b);
        let sign = -parity_sign((ord_a - 1) * (ord_b - 1));
        return bracket_factors(b, a).into_iter().map(|(c, w)| (sign * c, w)).collect();
    }
    match (&a[0], &b[0]) {
        (Factor::Partial(i), Factor::Func(m)) => match m.derivative(*i) {
            Some((e, dm)) => vec![(e as i64, vec![Factor::Func(dm)])],
            None => vec![],
        },
        (Factor::Func(m), Factor::Partial(i)) => match m.derivative(*i) {
            Some((e, dm)) => vec![(-(e as i64), vec![Factor::Func(dm)])],
            None => vec![],
        },
        _ => vec![],
    }
}

fn collapse(dim: usize, word: &[Factor]) -> Result<Option<(i64, TermKey)>, MultivecError> {
    let mut mono = Monomial::one(dim);
    let mut blade = Vec::new();
    for f in word {
        match f {
            Factor::Func(m) => mono = mono.mul(m)?,
            Factor::Partial(j) => blade.push(*j),
        }
    }
    Ok(canonical_blade(&mut blade).map(|s| (s, (mono, blade))))
}

/// Parses a polynomial over `x1..x{dim}` with rational coefficients,
/// `+ - * ^` and parentheses, e.g. `"3/2*x1^2 - (x2 + 1)*x3"`.
pub fn parse_polynomial(dim: usize, src: &str) -> Result<PolyMultivector, MultivecError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, dim };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> MultivecError {
        MultivecError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<PolyMultivector, MultivecError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { acc.try_add(&rhs)? } else { acc.try_sub(&rhs)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PolyMultivector, MultivecError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = acc.mul(&rhs)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<PolyMultivector, MultivecError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<PolyMultivector, MultivecError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            if e > MAX_DEGREE {
                return Err(MultivecError::DegreeOverflow(e));
            }
            return base.pow(e);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64, MultivecError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| MultivecError::Parse { pos: start, msg: "integer too large".into() })
    }

    fn atom(&mut self) -> Result<PolyMultivector, MultivecError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                let i = self.integer()? as usize;
                if i == 0 || i > self.dim {
                    return Err(MultivecError::Parse { pos: start, msg: format!("variable x{i} outside x1..x{}", self.dim) });
                }
                Ok(PolyMultivector::coordinate(self.dim, i - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let mut den = 1u64;
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    den = self.integer()?;
                    if den == 0 {
                        return Err(self.err("zero denominator"));
                    }
                }
                let q = BigRational::new(BigInt::from(num), BigInt::from(den));
                Ok(PolyMultivector::constant(self.dim, ExactScalar::from_rational(q)))
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }
}
