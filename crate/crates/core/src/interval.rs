//! Exact-rational interval arithmetic with certified enclosures.
//!
//! Every endpoint is a `BigRational`; the only outward-rounding sites are the
//! series tail bounds (atanh for ln, alternating arctan for pi) and the
//! explicit `round_out` decimal simplification. An operation applied to
//! intervals containing its exact operands returns an interval containing the
//! exact result.

use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntervalError {
    #[error("interval endpoints out of order: lo > hi")]
    EndpointsOutOfOrder,
    #[error("division by an interval containing zero")]
    DivisionByIntervalContainingZero,
    #[error("square root of a negative input")]
    NegativeInput,
    #[error("logarithm of a non-positive input")]
    NonpositiveInput,
}

/// Comparison verdict between two intervals. `Less`/`Greater` certify the
/// strict inequality between the contained real values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Less,
    Greater,
    Overlap,
}

/// Width target and refinement budget for enclosure computations.
#[derive(Debug, Clone, PartialEq)]
pub struct Precision {
    pub target_width: Rational,
    pub max_refinements: u32,
}

impl Default for Precision {
    fn default() -> Self {
        // width 10^-30, doubling digits on demand up to 20 refinements
        Precision::from_digits(30)
    }
}

impl Precision {
    pub fn from_digits(digits: u32) -> Self {
        Precision {
            target_width: Rational::new(BigInt::one(), pow10(digits)),
            max_refinements: 20,
        }
    }

    /// Number of decimal digits needed so that 10^-digits <= target_width.
    pub fn digits(&self) -> u32 {
        let mut s = 0u32;
        let mut w = Rational::one();
        let tenth = Rational::new(BigInt::one(), BigInt::from(10));
        while w > self.target_width && s < 100_000 {
            w *= &tenth;
            s += 1;
        }
        s.max(1)
    }
}

pub(crate) fn pow10(s: u32) -> BigInt {
    BigInt::from(10u32).pow(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, IntervalError> {
        if lo > hi {
            return Err(IntervalError::EndpointsOutOfOrder);
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Interval::point(Rational::from_integer(n.into()))
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let p1 = &self.lo * &other.lo;
        let p2 = &self.lo * &other.hi;
        let p3 = &self.hi * &other.lo;
        let p4 = &self.hi * &other.hi;
        let mut lo = p1.clone();
        let mut hi = p1;
        for p in [p2, p3, p4] {
            if p < lo {
                lo = p.clone();
            }
            if p > hi {
                hi = p;
            }
        }
        Interval { lo, hi }
    }

    pub fn div(&self, other: &Interval) -> Result<Interval, IntervalError> {
        if other.contains_zero() {
            return Err(IntervalError::DivisionByIntervalContainingZero);
        }
        // endpoints share a sign, so reciprocal just swaps them
        let inv = Interval {
            lo: other.hi.recip(),
            hi: other.lo.recip(),
        };
        Ok(self.mul(&inv))
    }

    pub fn scale(&self, k: &Rational) -> Interval {
        self.mul(&Interval::point(k.clone()))
    }

    /// x^n with sign case analysis; tight on even powers of intervals
    /// straddling zero.
    pub fn pow_int(&self, n: u32) -> Interval {
        if n == 0 {
            return Interval::point(Rational::one());
        }
        let lo_n = rat_pow(&self.lo, n);
        let hi_n = rat_pow(&self.hi, n);
        if n % 2 == 1 {
            return Interval { lo: lo_n, hi: hi_n };
        }
        if !self.lo.is_negative() {
            Interval { lo: lo_n, hi: hi_n }
        } else if !self.hi.is_positive() {
            Interval { lo: hi_n, hi: lo_n }
        } else {
            Interval {
                lo: Rational::zero(),
                hi: lo_n.max(hi_n),
            }
        }
    }

    /// Round endpoints outward to denominator 10^digits. Keeps rational
    /// growth bounded at the cost of at most 2*10^-digits of extra width.
    pub fn round_out(&self, digits: u32) -> Interval {
        let scale = pow10(digits);
        Interval {
            lo: round_rat_down(&self.lo, &scale),
            hi: round_rat_up(&self.hi, &scale),
        }
    }

    pub fn compare(&self, other: &Interval) -> Verdict {
        if self.hi < other.lo {
            Verdict::Less
        } else if self.lo > other.hi {
            Verdict::Greater
        } else {
            Verdict::Overlap
        }
    }
}

fn rat_pow(x: &Rational, n: u32) -> Rational {
    num_traits::pow::pow(x.clone(), n as usize)
}

fn round_rat_down(x: &Rational, scale: &BigInt) -> Rational {
    let n = (x.numer() * scale).div_floor(x.denom());
    Rational::new(n, scale.clone())
}

fn round_rat_up(x: &Rational, scale: &BigInt) -> Rational {
    let n = (x.numer() * scale).div_ceil(x.denom());
    Rational::new(n, scale.clone())
}

/// Enclosure of sqrt(x) of width <= 10^-digits, via integer square root of
/// the scaled numerator times denominator.
pub fn sqrt_enclosure(x: &Rational, prec: &Precision) -> Result<Interval, IntervalError> {
    sqrt_enclosure_digits(x, prec.digits())
}

pub(crate) fn sqrt_enclosure_digits(x: &Rational, digits: u32) -> Result<Interval, IntervalError> {
    if x.is_negative() {
        return Err(IntervalError::NegativeInput);
    }
    if x.is_zero() {
        return Ok(Interval::point(Rational::zero()));
    }
    let p = x.numer();
    let q = x.denom();
    let scale = pow10(digits);
    // sqrt(p/q) = sqrt(p*q)/q
    let t = p * q * &scale * &scale;
    let r = t.sqrt();
    let denom = q * &scale;
    let lo = Rational::new(r.clone(), denom.clone());
    let hi = if &r * &r == t {
        lo.clone()
    } else {
        Rational::new(r + 1, denom)
    };
    Ok(Interval { lo, hi })
}

// atanh(y) = sum_{j>=0} y^(2j+1)/(2j+1) for 0 <= y < 1, with the tail after
// the y^(2j+1) term bounded by y^(2j+3)/((2j+3)(1-y^2)).
fn atanh_series(y: &Rational, digits: u32) -> Interval {
    debug_assert!(!y.is_negative() && y < &Rational::one());
    if y.is_zero() {
        return Interval::point(Rational::zero());
    }
    let guard = digits + 10;
    let eps = Rational::new(BigInt::one(), pow10(guard));
    let y_iv = Interval::point(y.clone()).round_out(guard);
    let y2 = y_iv.mul(&y_iv).round_out(guard);
    let mut pow = y_iv.clone(); // y^(2j+1)
    let mut sum = y_iv;
    let mut j: u64 = 0;
    loop {
        j += 1;
        pow = pow.mul(&y2).round_out(guard);
        let term = pow.scale(&Rational::new(BigInt::one(), BigInt::from(2 * j + 1)));
        sum = sum.add(&term).round_out(guard);
        // tail bound for everything beyond the term just added
        let one_minus = Rational::one() - y2.hi();
        let tail = pow.hi() * y2.hi() / (Rational::from_integer(BigInt::from(2 * j + 3)) * one_minus);
        if tail < eps {
            let tail_iv = Interval {
                lo: Rational::zero(),
                hi: tail,
            };
            return sum.add(&tail_iv);
        }
    }
}

static LN2_CACHE: Lazy<Mutex<Option<(u32, Interval)>>> = Lazy::new(|| Mutex::new(None));
static PI_CACHE: Lazy<Mutex<Option<(u32, Interval)>>> = Lazy::new(|| Mutex::new(None));

pub(crate) fn ln2_digits(digits: u32) -> Interval {
    {
        let cache = LN2_CACHE.lock().unwrap();
        if let Some((d, iv)) = cache.as_ref() {
            if *d >= digits {
                return iv.round_out(digits + 5);
            }
        }
    }
    // ln 2 = 2 atanh(1/3)
    let y = Rational::new(BigInt::one(), BigInt::from(3));
    let iv = atanh_series(&y, digits + 5).scale(&Rational::from_integer(BigInt::from(2)));
    let mut cache = LN2_CACHE.lock().unwrap();
    *cache = Some((digits, iv.clone()));
    iv
}

/// Enclosure of ln x for rational x > 0, width <= 10^-digits.
///
/// Writes x = m * 2^k with m in [1,2), encloses ln m by the atanh series at
/// y = (m-1)/(m+1), and adds k times an enclosure of ln 2.
pub fn ln_enclosure(x: &Rational, prec: &Precision) -> Result<Interval, IntervalError> {
    ln_enclosure_digits(x, prec.digits())
}

pub(crate) fn ln_enclosure_digits(x: &Rational, digits: u32) -> Result<Interval, IntervalError> {
    if !x.is_positive() {
        return Err(IntervalError::NonpositiveInput);
    }
    if x.is_one() {
        return Ok(Interval::point(Rational::zero()));
    }
    // binary exponent: m = x / 2^k in [1, 2)
    let mut k: i64 = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = Rational::from_integer(BigInt::from(2));
    let mut m = x / rat_pow2(k);
    while m >= two {
        m /= &two;
        k += 1;
    }
    while m < Rational::one() {
        m *= &two;
        k -= 1;
    }
    let guard = digits + 10;
    let y = (&m - Rational::one()) / (&m + Rational::one());
    let ln_m = atanh_series(&y, guard).scale(&Rational::from_integer(BigInt::from(2)));
    let result = if k == 0 {
        ln_m
    } else {
        let ln2 = ln2_digits(guard + 6);
        ln_m.add(&ln2.scale(&Rational::from_integer(BigInt::from(k))))
    };
    Ok(result.round_out(digits))
}

fn rat_pow2(k: i64) -> Rational {
    if k >= 0 {
        Rational::from_integer(BigInt::one() << (k as u64))
    } else {
        Rational::new(BigInt::one(), BigInt::one() << ((-k) as u64))
    }
}

/// Enclosure of ln over an interval (monotone in the argument).
pub fn ln_interval(x: &Interval, prec: &Precision) -> Result<Interval, IntervalError> {
    ln_interval_digits(x, prec.digits())
}

pub(crate) fn ln_interval_digits(x: &Interval, digits: u32) -> Result<Interval, IntervalError> {
    let lo = ln_enclosure_digits(x.lo(), digits)?;
    let hi = ln_enclosure_digits(x.hi(), digits)?;
    Ok(Interval {
        lo: lo.lo,
        hi: hi.hi,
    })
}

// arctan(1/t) alternating series; remainder bounded by the first omitted term
fn atan_inv(t: u64, digits: u32) -> Interval {
    let guard = digits + 10;
    let eps = Rational::new(BigInt::one(), pow10(guard));
    let t_big = BigInt::from(t);
    let t2 = &t_big * &t_big;
    let mut tpow = t_big; // t^(2j+1)
    let mut sum = Interval::point(Rational::new(BigInt::one(), tpow.clone()));
    let mut j: u64 = 0;
    loop {
        j += 1;
        tpow *= &t2;
        let term = Rational::new(BigInt::one(), BigInt::from(2 * j + 1) * &tpow);
        let signed = if j % 2 == 1 {
            Interval::point(-term.clone())
        } else {
            Interval::point(term.clone())
        };
        sum = sum.add(&signed).round_out(guard);
        if term < eps {
            // remainder has the sign of the next term; [-term, term] covers it
            let rem = Interval {
                lo: -term.clone(),
                hi: term,
            };
            return sum.add(&rem);
        }
    }
}

/// Enclosure of pi via Machin's formula 16 atan(1/5) - 4 atan(1/239).
pub fn pi_enclosure(prec: &Precision) -> Interval {
    pi_enclosure_digits(prec.digits())
}

pub(crate) fn pi_enclosure_digits(digits: u32) -> Interval {
    {
        let cache = PI_CACHE.lock().unwrap();
        if let Some((d, iv)) = cache.as_ref() {
            if *d >= digits {
                return iv.round_out(digits + 2);
            }
        }
    }
    let guard = digits + 5;
    let a = atan_inv(5, guard).scale(&Rational::from_integer(BigInt::from(16)));
    let b = atan_inv(239, guard).scale(&Rational::from_integer(BigInt::from(4)));
    let iv = a.sub(&b).round_out(digits + 2);
    let mut cache = PI_CACHE.lock().unwrap();
    *cache = Some((digits, iv.clone()));
    iv
}

/// Serialized form of an interval: decimal-string rational endpoints.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct IntervalRepr {
    pub lo: String,
    pub hi: String,
}

pub fn rational_to_string(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn rational_from_string(s: &str) -> Option<Rational> {
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        Some(Rational::new(p, q))
    } else if let Some((int, frac)) = s.split_once('.') {
        // decimal notation, e.g. "0.655"
        let digits = frac.len() as u32;
        let combined: BigInt = format!("{}{}", int.trim(), frac.trim()).parse().ok()?;
        Some(Rational::new(combined, pow10(digits)))
    } else {
        let p: BigInt = s.trim().parse().ok()?;
        Some(Rational::from_integer(p))
    }
}

impl Interval {
    pub fn to_repr(&self) -> IntervalRepr {
        IntervalRepr {
            lo: rational_to_string(&self.lo),
            hi: rational_to_string(&self.hi),
        }
    }

    pub fn from_repr(repr: &IntervalRepr) -> Option<Interval> {
        let lo = rational_from_string(&repr.lo)?;
        let hi = rational_from_string(&repr.hi)?;
        Interval::new(lo, hi).ok()
    }

    /// Decimal approximation of the midpoint, for display only.
    pub fn approx_f64(&self) -> f64 {
        let mid = (&self.lo + &self.hi) / Rational::from_integer(BigInt::from(2));
        mid.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> Rational {
        Rational::new(BigInt::from(p), BigInt::from(q))
    }

    fn iv(lo: (i64, i64), hi: (i64, i64)) -> Interval {
        Interval::new(rat(lo.0, lo.1), rat(hi.0, hi.1)).unwrap()
    }

    #[test]
    fn point_arithmetic_is_exact() {
        let a = iv((1, 1), (2, 1));
        let b = iv((3, 1), (4, 1));
        let s = a.add(&b);
        assert_eq!(s.lo(), &rat(4, 1));
        assert_eq!(s.hi(), &rat(6, 1));
        let m = iv((-1, 1), (2, 1)).mul(&iv((3, 1), (4, 1)));
        assert_eq!(m.lo(), &rat(-4, 1));
        assert_eq!(m.hi(), &rat(8, 1));
        let d = Interval::from_int(1).div(&Interval::from_int(2)).unwrap();
        assert_eq!(d.lo(), &rat(1, 2));
        assert_eq!(d.hi(), &rat(1, 2));
    }

    #[test]
    fn div_by_zero_interval_rejected() {
        let z = iv((-1, 1), (1, 1));
        assert_eq!(
            Interval::from_int(1).div(&z),
            Err(IntervalError::DivisionByIntervalContainingZero)
        );
    }

    #[test]
    fn sqrt_exact_square() {
        let s = sqrt_enclosure_digits(&rat(4, 1), 10).unwrap();
        assert_eq!(s.lo(), &rat(2, 1));
        assert_eq!(s.hi(), &rat(2, 1));
    }

    #[test]
    fn sqrt_two_enclosure() {
        let s = sqrt_enclosure_digits(&rat(2, 1), 8).unwrap();
        assert!(s.width() <= rat(1, 100_000_000));
        // 1.41421356 is inside
        assert!(s.contains(&rat(141_421_356, 100_000_000)) || s.lo() > &rat(141_421_356, 100_000_000));
        assert!(s.lo() < &rat(141_421_357, 100_000_000));
        assert!(s.hi() > &rat(141_421_356, 100_000_000));
    }

    #[test]
    fn sqrt_331_over_2_exceeds_nine() {
        let s = sqrt_enclosure_digits(&rat(331, 1), 30).unwrap();
        let half = s.scale(&rat(1, 2));
        assert!(half.lo() > &rat(9, 1));
    }

    #[test]
    fn ln_one_is_zero() {
        let l = ln_enclosure_digits(&rat(1, 1), 20).unwrap();
        assert!(l.lo().is_zero() && l.hi().is_zero());
    }

    #[test]
    fn ln_two_enclosure() {
        let l = ln_enclosure_digits(&rat(2, 1), 9).unwrap();
        // 0.693147180 <= ln 2 <= 0.693147181
        assert!(l.contains(&rat(693_147_180, 1_000_000_000)) || l.lo() > &rat(693_147_180, 1_000_000_000));
        assert!(l.lo() < &rat(693_147_181, 1_000_000_000));
        assert!(l.hi() > &rat(693_147_180, 1_000_000_000));
        assert!(l.width() <= rat(1, 1_000_000_000));
    }

    #[test]
    fn ln_small_argument() {
        // ln(1/2) = -ln 2
        let l = ln_enclosure_digits(&rat(1, 2), 12).unwrap();
        let l2 = ln_enclosure_digits(&rat(2, 1), 12).unwrap();
        assert!(l.neg().intersects(&l2));
    }

    #[test]
    fn pi_enclosure_basic() {
        let p = pi_enclosure_digits(10);
        assert!(p.lo() > &rat(3, 1));
        assert!(p.hi() < &rat(4, 1));
        // 3.14159265358979
        assert!(p.contains(&rat(314_159_265_358_979, 100_000_000_000_000)));
        assert!(p.width() <= rat(1, 10_000_000_000));
    }

    #[test]
    fn pi_nested_refinement() {
        let coarse = pi_enclosure_digits(5);
        let fine = pi_enclosure_digits(10);
        assert!(coarse.intersects(&fine));
        assert!(coarse.width() >= fine.width());
    }

    #[test]
    fn pow_int_examples() {
        let p = Interval::from_int(2).pow_int(65);
        let expected = Rational::from_integer("36893488147419103232".parse().unwrap());
        assert_eq!(p.lo(), &expected);
        assert_eq!(p.hi(), &expected);

        let even = iv((-1, 1), (1, 1)).pow_int(2);
        assert!(even.lo().is_zero());
        assert_eq!(even.hi(), &rat(1, 1));

        let zero = iv((-5, 1), (7, 1)).pow_int(0);
        assert_eq!(zero.lo(), &rat(1, 1));
        assert_eq!(zero.hi(), &rat(1, 1));
    }

    #[test]
    fn compare_verdicts() {
        assert_eq!(iv((1, 1), (2, 1)).compare(&iv((3, 1), (4, 1))), Verdict::Less);
        assert_eq!(iv((3, 1), (4, 1)).compare(&iv((1, 1), (2, 1))), Verdict::Greater);
        assert_eq!(iv((1, 1), (3, 1)).compare(&iv((2, 1), (4, 1))), Verdict::Overlap);
    }

    #[test]
    fn repr_round_trip() {
        let x = iv((-7, 3), (22, 7));
        let r = x.to_repr();
        assert_eq!(r.lo, "-7/3");
        assert_eq!(r.hi, "22/7");
        assert_eq!(Interval::from_repr(&r).unwrap(), x);
    }

    #[test]
    fn rational_from_decimal_string() {
        assert_eq!(rational_from_string("0.655").unwrap(), rat(655, 1000));
        assert_eq!(rational_from_string("1").unwrap(), rat(1, 1));
        assert_eq!(rational_from_string("3/4").unwrap(), rat(3, 4));
        assert!(rational_from_string("1/0").is_none());
    }
}
