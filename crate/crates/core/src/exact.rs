//! Exact arithmetic over the real quadratic field ℚ(√d) and its complex
//! extension ℚ(√d)(i).
//!
//! Every value is stored as `rat + rad·√d` with both components in lowest
//! terms. The radicand `d` is a process-wide setting (default 3): values do
//! not carry it, so mixing values produced under different radicands is a
//! logic error. Set it once at startup with [`set_radicand`] if 3 is not the
//! wanted field.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

static RADICAND: AtomicU64 = AtomicU64::new(3);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("radicand {0} is not a square-free integer greater than 1")]
    InvalidRadicand(u64),
    #[error("radicand mismatch: value uses sqrt({found}) but the session radicand is {expected}")]
    RadicandMismatch { expected: u64, found: u64 },
    #[error("cannot parse exact scalar from {0:?}")]
    Parse(String),
}

/// Sets the session radicand. Must be square-free and greater than one.
pub fn set_radicand(d: u64) -> Result<(), ExactError> {
    if !is_square_free(d) {
        return Err(ExactError::InvalidRadicand(d));
    }
    RADICAND.store(d, AtomicOrdering::SeqCst);
    Ok(())
}

/// The current session radicand.
pub fn radicand() -> u64 {
    RADICAND.load(AtomicOrdering::SeqCst)
}

fn is_square_free(d: u64) -> bool {
    if d < 2 {
        return false;
    }
    let mut f = 2u64;
    while f * f <= d {
        if d.is_multiple_of(f * f) {
            return false;
        }
        f += 1;
    }
    true
}

/// An element `rat + rad·√d` of ℚ(√d).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    rat: BigRational,
    rad: BigRational,
}

impl ExactScalar {
    pub fn new(rat: BigRational, rad: BigRational) -> Self {
        // BigRational keeps itself reduced with a positive denominator.
        Self { rat, rad }
    }

    pub fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)), BigRational::zero())
    }

    /// The rational `num/den`. Panics if `den == 0`.
    pub fn from_frac(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    pub fn from_rational(rat: BigRational) -> Self {
        Self::new(rat, BigRational::zero())
    }

    /// `(num/den)·√d`.
    pub fn sqrt_frac(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::zero(),
            BigRational::new(BigInt::from(num), BigInt::from(den)),
        )
    }

    pub fn rat(&self) -> &BigRational {
        &self.rat
    }

    pub fn rad(&self) -> &BigRational {
        &self.rad
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.rad.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.rad.is_zero()
    }

    /// The Galois conjugate `rat − rad·√d`.
    pub fn conjugate(&self) -> Self {
        Self::new(self.rat.clone(), -&self.rad)
    }

    /// Field norm `rat² − d·rad²`; zero only for the zero element.
    pub fn norm(&self) -> BigRational {
        let d = BigRational::from_integer(BigInt::from(radicand()));
        &self.rat * &self.rat - d * &self.rad * &self.rad
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, ExactError> {
        Ok(self * &other.inv()?)
    }

    pub fn inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if self.rad.is_zero() {
            return Ok(Self::from_rational(self.rat.recip()));
        }
        let n = self.norm();
        let c = self.conjugate();
        Ok(Self::new(c.rat / &n, c.rad / n))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::new(&self.rat * q, &self.rad * q)
    }

    /// Sign of the real number `rat + rad·√d`.
    pub fn signum(&self) -> Ordering {
        let a = self.rat.signum();
        let b = self.rad.signum();
        let zero = BigRational::zero();
        match (a.cmp(&zero), b.cmp(&zero)) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (sa, sb) if sa == sb => sa,
            (sa, _) => {
                // opposite signs: compare rat² with d·rad²
                let d = BigRational::from_integer(BigInt::from(radicand()));
                let lhs = &self.rat * &self.rat;
                let rhs = d * &self.rad * &self.rad;
                match lhs.cmp(&rhs) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.rat.to_f64().unwrap_or(f64::NAN);
        if self.rad.is_zero() {
            return a;
        }
        let b = self.rad.to_f64().unwrap_or(f64::NAN);
        a + b * (radicand() as f64).sqrt()
    }
}

impl Default for ExactScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for ExactScalar {
    fn from(q: BigRational) -> Self {
        Self::from_rational(q)
    }
}

impl<'a> Add<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.rat + &rhs.rat, &self.rad + &rhs.rad)
    }
}

impl<'a> Sub<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        ExactScalar::new(&self.rat - &rhs.rat, &self.rad - &rhs.rad)
    }
}

impl<'a> Mul<&'a ExactScalar> for &'a ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        match (self.rad.is_zero(), rhs.rad.is_zero()) {
            (true, true) => ExactScalar::from_rational(&self.rat * &rhs.rat),
            (true, false) => ExactScalar::new(&self.rat * &rhs.rat, &self.rat * &rhs.rad),
            (false, true) => ExactScalar::new(&self.rat * &rhs.rat, &self.rad * &rhs.rat),
            (false, false) => {
                let d = BigRational::from_integer(BigInt::from(radicand()));
                ExactScalar::new(
                    &self.rat * &rhs.rat + d * &self.rad * &rhs.rad,
                    &self.rat * &rhs.rad + &self.rad * &rhs.rat,
                )
            }
        }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-&self.rat, -&self.rad)
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-self.rat, -self.rad)
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl AddAssign<&ExactScalar> for ExactScalar {
    fn add_assign(&mut self, rhs: &ExactScalar) {
        self.rat += &rhs.rat;
        self.rad += &rhs.rad;
    }
}

impl SubAssign<&ExactScalar> for ExactScalar {
    fn sub_assign(&mut self, rhs: &ExactScalar) {
        self.rat -= &rhs.rat;
        self.rad -= &rhs.rad;
    }
}

impl std::iter::Sum for ExactScalar {
    fn sum<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

fn fmt_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = radicand();
        if self.rad.is_zero() {
            return f.write_str(&fmt_rational(&self.rat));
        }
        let rad = if self.rad.is_one() {
            format!("sqrt({d})")
        } else if (-&self.rad).is_one() {
            format!("-sqrt({d})")
        } else {
            format!("{}*sqrt({d})", fmt_rational(&self.rad))
        };
        if self.rat.is_zero() {
            f.write_str(&rad)
        } else if self.rad.is_positive() {
            write!(f, "{}+{}", fmt_rational(&self.rat), rad)
        } else {
            write!(f, "{}{}", fmt_rational(&self.rat), rad)
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.strip_prefix('+').unwrap_or(s);
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.parse().ok()?;
            let d: BigInt = d.parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl FromStr for ExactScalar {
    type Err = ExactError;

    /// Accepts `p`, `p/q`, `r/s*sqrt(d)`, `sqrt(d)`, `-sqrt(d)` and sums such
    /// as `p/q+r/s*sqrt(d)`. The radicand must match the session radicand.
    fn from_str(input: &str) -> Result<Self, ExactError> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || ExactError::Parse(input.to_string());
        let Some(pos) = s.find("sqrt(") else {
            return parse_rational(&s).map(Self::from_rational).ok_or_else(err);
        };
        let tail = &s[pos + 5..];
        let close = tail.find(')').ok_or_else(err)?;
        if close + 1 != tail.len() {
            return Err(err());
        }
        let found: u64 = tail[..close].parse().map_err(|_| err())?;
        if found != radicand() {
            return Err(ExactError::RadicandMismatch { expected: radicand(), found });
        }
        let mut prefix = &s[..pos];
        if let Some(p) = prefix.strip_suffix('*') {
            prefix = p;
        }
        let split = prefix
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (rat_str, coef_str) = match split {
            Some(i) => (&prefix[..i], &prefix[i..]),
            None => ("", prefix),
        };
        let rat = if rat_str.is_empty() {
            BigRational::zero()
        } else {
            parse_rational(rat_str).ok_or_else(err)?
        };
        let rad = match coef_str {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            c => parse_rational(c).ok_or_else(err)?,
        };
        Ok(Self::new(rat, rad))
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An element `re + i·im` of ℚ(√d)(i).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactComplex {
    pub re: ExactScalar,
    pub im: ExactScalar,
}

impl ExactComplex {
    pub fn new(re: ExactScalar, im: ExactScalar) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn real(re: ExactScalar) -> Self {
        Self::new(re, ExactScalar::zero())
    }

    pub fn imag(im: ExactScalar) -> Self {
        Self::new(ExactScalar::zero(), im)
    }

    pub fn i() -> Self {
        Self::imag(ExactScalar::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    pub fn scale(&self, s: &ExactScalar) -> Self {
        Self::new(&self.re * s, &self.im * s)
    }
}

impl<'a> Add<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn add(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn sub(self, rhs: &ExactComplex) -> ExactComplex {
        ExactComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a ExactComplex> for &'a ExactComplex {
    type Output = ExactComplex;
    fn mul(self, rhs: &ExactComplex) -> ExactComplex {
        if self.is_zero() || rhs.is_zero() {
            return ExactComplex::zero();
        }
        ExactComplex::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &ExactComplex {
    type Output = ExactComplex;
    fn neg(self) -> ExactComplex {
        ExactComplex::new(-&self.re, -&self.im)
    }
}

impl AddAssign<&ExactComplex> for ExactComplex {
    fn add_assign(&mut self, rhs: &ExactComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl fmt::Display for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "({})*i", self.im),
            (false, false) => write!(f, "{}+({})*i", self.re, self.im),
        }
    }
}

impl fmt::Debug for ExactComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::from_frac(n, d)
    }

    #[test]
    fn multiplication_rule() {
        let a = q(1, 2);
        let b = ExactScalar::sqrt_frac(1, 1);
        assert_eq!(&a * &b, ExactScalar::sqrt_frac(1, 2));
    }

    #[test]
    fn division_rationalizes() {
        let denom = &ExactScalar::one() + &ExactScalar::sqrt_frac(1, 1);
        let r = ExactScalar::one().checked_div(&denom).unwrap();
        assert_eq!(r, &q(-1, 2) + &ExactScalar::sqrt_frac(1, 2));
    }

    #[test]
    fn rational_addition() {
        assert_eq!(&q(2, 3) + &q(1, 3), ExactScalar::one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            ExactScalar::one().checked_div(&ExactScalar::zero()),
            Err(ExactError::DivisionByZero)
        );
    }

    #[test]
    fn to_float_values() {
        assert_eq!(q(1, 2).to_f64(), 0.5);
        assert_eq!(ExactScalar::zero().to_f64(), 0.0);
        let v = ExactScalar::sqrt_frac(1, 2).to_f64();
        let expected = 0.8660254037844386_f64;
        assert!((v - expected).abs() <= expected * f64::EPSILON);
    }

    #[test]
    fn signum_mixed_components() {
        // 2 - sqrt(3) > 0, 1 - sqrt(3) < 0
        assert!((&q(2, 1) - &ExactScalar::sqrt_frac(1, 1)).is_positive());
        assert!((&q(1, 1) - &ExactScalar::sqrt_frac(1, 1)).is_negative());
        assert!((&q(-2, 1) + &ExactScalar::sqrt_frac(1, 1)).is_negative());
    }

    #[test]
    fn text_form_round_trips() {
        for s in ["0", "-7/3", "sqrt(3)", "-sqrt(3)", "1/2*sqrt(3)", "-1/2+1/2*sqrt(3)", "3-2/5*sqrt(3)"] {
            let x: ExactScalar = s.parse().unwrap();
            assert_eq!(x.to_string(), s);
            assert_eq!(x.to_string().parse::<ExactScalar>().unwrap(), x);
        }
        assert!(matches!(
            "sqrt(5)".parse::<ExactScalar>(),
            Err(ExactError::RadicandMismatch { .. })
        ));
        assert!("1/0".parse::<ExactScalar>().is_err());
        assert!("abc".parse::<ExactScalar>().is_err());
    }

    #[test]
    fn square_free_validation() {
        assert!(is_square_free(3));
        assert!(is_square_free(30));
        assert!(!is_square_free(12));
        assert!(!is_square_free(1));
        assert_eq!(set_radicand(4), Err(ExactError::InvalidRadicand(4)));
        assert_eq!(radicand(), 3);
    }

    #[test]
    fn complex_conjugation_is_involution() {
        let z = ExactComplex::new(q(1, 2), ExactScalar::sqrt_frac(-1, 3));
        assert_eq!(z.conj().conj(), z);
        let i = ExactComplex::i();
        assert_eq!(&i * &i, ExactComplex::real(ExactScalar::from_int(-1)));
    }

    fn small_scalar() -> impl Strategy<Value = ExactScalar> {
        (-20i64..20, 1i64..12, -20i64..20, 1i64..12).prop_map(|(a, b, c, d)| {
            &ExactScalar::from_frac(a, b) + &ExactScalar::sqrt_frac(c, d)
        })
    }

    fn nonneg_scalar() -> impl Strategy<Value = ExactScalar> {
        (0i64..20, 1i64..12, 0i64..20, 1i64..12).prop_map(|(a, b, c, d)| {
            &ExactScalar::from_frac(a, b) + &ExactScalar::sqrt_frac(c, d)
        })
    }

    proptest! {
        #[test]
        fn field_axioms(a in small_scalar(), b in small_scalar(), c in small_scalar()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.inv().unwrap(), ExactScalar::one());
            }
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn float_image_is_multiplicative(a in nonneg_scalar(), b in nonneg_scalar()) {
            // components share a sign so the float images carry no cancellation
            let exact = (&a * &b).to_f64();
            let float = a.to_f64() * b.to_f64();
            prop_assert!((exact - float).abs() <= 4.0 * f64::EPSILON * exact.abs(), "{exact} vs {float}");
        }

        #[test]
        fn display_parse_round_trip(a in small_scalar()) {
            prop_assert_eq!(a.to_string().parse::<ExactScalar>().unwrap(), a);
        }

        #[test]
        fn ordering_agrees_with_floats(a in small_scalar(), b in small_scalar()) {
            let fa = a.to_f64();
            let fb = b.to_f64();
            if (fa - fb).abs() > 1e-9 {
                prop_assert_eq!(a.cmp(&b), fa.partial_cmp(&fb).unwrap());
            }
        }
    }
}
