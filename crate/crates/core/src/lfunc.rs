//! Real odd Dirichlet characters: Kronecker symbol, exact character sums,
//! L(1, chi) from the analytic class number formula, and checks of assumed
//! lower bounds of the shape L(1, chi) >= c (log d)^-A.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::validate_discriminant;
use crate::interval::{
    ln_enclosure_digits, pi_enclosure_digits, rational_from_string, rational_to_string,
    sqrt_enclosure_digits, Interval, Precision, Rational, Verdict,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LFuncError {
    #[error("-{0} is not a fundamental discriminant")]
    NotFundamental(u64),
    #[error("analytic class number for d={0} came out non-integral (implementation bug)")]
    NonIntegralResult(u64),
    #[error("hypothesis coefficient must be positive")]
    NonpositiveCoefficient,
    #[error("hypothesis exponent must be at least 1")]
    ZeroExponent,
}

/// Parameters of an assumed lower bound L(1, chi) >= c (log d)^-A.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundHypothesis {
    pub coeff: Rational,
    pub exponent: u32,
}

impl BoundHypothesis {
    pub fn new(coeff: Rational, exponent: u32) -> Result<Self, LFuncError> {
        if !coeff.is_positive() {
            return Err(LFuncError::NonpositiveCoefficient);
        }
        if exponent == 0 {
            return Err(LFuncError::ZeroExponent);
        }
        Ok(BoundHypothesis { coeff, exponent })
    }

    /// c = 1, A = 18 (the best bound available without GRH assumptions).
    pub fn conrey_iwaniec() -> Self {
        BoundHypothesis {
            coeff: Rational::one(),
            exponent: 18,
        }
    }

    /// Rational under-approximation of 0.655/e with A = 1. Valid only for
    /// sufficiently large d; cutoffs computed from it are conditional.
    pub fn tatuzawa() -> Self {
        BoundHypothesis {
            coeff: Rational::new(BigInt::from(240_969), BigInt::from(1_000_000)),
            exponent: 1,
        }
    }

    pub fn to_repr(&self) -> BoundHypothesisRepr {
        BoundHypothesisRepr {
            c: rational_to_string(&self.coeff),
            a: self.exponent,
        }
    }

    pub fn from_repr(repr: &BoundHypothesisRepr) -> Option<Self> {
        BoundHypothesis::new(rational_from_string(&repr.c)?, repr.a).ok()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BoundHypothesisRepr {
    pub c: String,
    #[serde(rename = "A")]
    pub a: u32,
}

/// Number of units of Q(sqrt(-d)): 6 for d=3, 4 for d=4, else 2.
pub fn unit_count(d: u64) -> u32 {
    match d {
        3 => 6,
        4 => 4,
        _ => 2,
    }
}

/// Kronecker symbol (a|n), fully multiplicative extension of Jacobi.
pub fn kronecker(a: &BigInt, n: &BigInt) -> i32 {
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    if a.is_even() && n.is_even() {
        return 0;
    }
    let mut n = n.clone();
    let mut k = 1i32;
    // factor out 2s from n: (a|2) = 0, 1, -1 for a = 0, +-1, +-3 mod 8
    let mut v = 0u64;
    while n.is_even() {
        n /= 2;
        v += 1;
    }
    if v % 2 == 1 {
        let a8 = a.mod_floor_u8();
        k = match a8 {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => return 0, // a even
        };
    }
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            k = -k;
        }
    }
    if n.is_one() {
        return k;
    }
    // Jacobi loop on odd positive n
    let mut a = num_integer::Integer::mod_floor(a, &n);
    while !a.is_zero() {
        while a.is_even() {
            a /= 2;
            let n8 = n.mod_floor_u8();
            if n8 == 3 || n8 == 5 {
                k = -k;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a.mod_floor_u8() % 4 == 3 && n.mod_floor_u8() % 4 == 3 {
            k = -k;
        }
        a = num_integer::Integer::mod_floor(&a, &n);
    }
    if n.is_one() {
        k
    } else {
        0
    }
}

trait ModFloorU8 {
    fn mod_floor_u8(&self) -> u8;
}

impl ModFloorU8 for BigInt {
    fn mod_floor_u8(&self) -> u8 {
        use num_traits::ToPrimitive;
        num_integer::Integer::mod_floor(self, &BigInt::from(8)).to_u8().unwrap()
    }
}

/// i64 fast path, same algorithm.
pub fn kronecker_i64(a: i64, n: i64) -> i32 {
    if n == 0 {
        return i32::from(a == 1 || a == -1);
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut n = n;
    let mut k = 1i32;
    let mut v = 0;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    if v % 2 == 1 {
        k = match a.rem_euclid(8) {
            1 | 7 => 1,
            3 | 5 => -1,
            _ => return 0,
        };
    }
    if n < 0 {
        n = -n;
        if a < 0 {
            k = -k;
        }
    }
    if n == 1 {
        return k;
    }
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            match n % 8 {
                3 | 5 => k = -k,
                _ => {}
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            k = -k;
        }
        a %= n;
    }
    if n == 1 {
        k
    } else {
        0
    }
}

fn require_fundamental(d: u64) -> Result<(), LFuncError> {
    let valid = i64::try_from(d)
        .ok()
        .and_then(|dv| validate_discriminant(-dv).ok())
        .map(|disc| disc.is_fundamental)
        .unwrap_or(false);
    if valid {
        Ok(())
    } else {
        Err(LFuncError::NotFundamental(d))
    }
}

/// S = sum_{a=1}^{d-1} chi(a) a with chi(a) = kronecker(-d, a). Exact.
pub fn character_sum(d: u64) -> Result<BigInt, LFuncError> {
    require_fundamental(d)?;
    let neg_d = -(d as i64);
    let mut s: i128 = 0;
    for a in 1..d as i64 {
        s += (kronecker_i64(neg_d, a) as i128) * a as i128;
    }
    Ok(BigInt::from(s))
}

/// h = w |S| / (2d); errors if the division is not exact.
pub fn analytic_class_number(d: u64) -> Result<u64, LFuncError> {
    let s = character_sum(d)?;
    let num = BigInt::from(unit_count(d)) * s.abs();
    let den = BigInt::from(2 * d);
    let (q, r) = num_integer::Integer::div_rem(&num, &den);
    if !r.is_zero() || !q.is_positive() {
        return Err(LFuncError::NonIntegralResult(d));
    }
    use num_traits::ToPrimitive;
    Ok(q.to_u64().expect("class number fits u64"))
}

/// Enclosure of L(1, chi) = pi |S| / d^(3/2).
pub fn l_one(d: u64, prec: &Precision) -> Result<Interval, LFuncError> {
    let digits = prec.digits();
    l_one_digits(d, digits)
}

pub(crate) fn l_one_digits(d: u64, digits: u32) -> Result<Interval, LFuncError> {
    let s = character_sum(d)?;
    let guard = digits + 10;
    let pi = pi_enclosure_digits(guard);
    let sqrt_d = sqrt_enclosure_digits(&Rational::from_integer(BigInt::from(d)), guard)
        .expect("d positive");
    // d^(3/2) = d * sqrt(d)
    let d32 = sqrt_d.scale(&Rational::from_integer(BigInt::from(d)));
    let num = pi.scale(&Rational::from_integer(s.abs()));
    Ok(num.div(&d32).expect("positive denominator").round_out(digits))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundVerdict {
    Holds,
    Fails,
    Indeterminate,
}

/// Compares L(1, chi) against c (ln d)^-A with precision escalation.
pub fn bound_check(d: u64, hyp: &BoundHypothesis, prec: &Precision) -> Result<BoundVerdict, LFuncError> {
    require_fundamental(d)?;
    let mut digits = prec.digits();
    for _ in 0..=prec.max_refinements {
        let lhs = l_one_digits(d, digits)?;
        let ln_d = ln_enclosure_digits(&Rational::from_integer(BigInt::from(d)), digits)
            .expect("d >= 3");
        let rhs = Interval::point(hyp.coeff.clone())
            .div(&ln_d.pow_int(hyp.exponent))
            .expect("ln d > 0 for d >= 3");
        match lhs.compare(&rhs) {
            Verdict::Greater => return Ok(BoundVerdict::Holds),
            Verdict::Less => return Ok(BoundVerdict::Fails),
            Verdict::Overlap => digits *= 2,
        }
    }
    Ok(BoundVerdict::Indeterminate)
}

/// CLI-facing record for lvalue/boundcheck output.
#[derive(Debug, Clone, Serialize)]
pub struct LValueReport {
    pub d: u64,
    #[serde(rename = "S")]
    pub s: String,
    pub h: u64,
    pub w: u32,
    pub l1_lo: String,
    pub l1_hi: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_lo: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_hi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<BoundVerdict>,
}

pub fn l_value_report(d: u64, prec: &Precision, hyp: Option<&BoundHypothesis>) -> Result<LValueReport, LFuncError> {
    let s = character_sum(d)?;
    let h = analytic_class_number(d)?;
    let l1 = l_one(d, prec)?;
    let (mut bound_lo, mut bound_hi, mut verdict) = (None, None, None);
    if let Some(hyp) = hyp {
        let digits = prec.digits();
        let ln_d = ln_enclosure_digits(&Rational::from_integer(BigInt::from(d)), digits)
            .expect("d >= 3");
        let rhs = Interval::point(hyp.coeff.clone())
            .div(&ln_d.pow_int(hyp.exponent))
            .expect("ln d > 0")
            .round_out(digits);
        bound_lo = Some(rational_to_string(rhs.lo()));
        bound_hi = Some(rational_to_string(rhs.hi()));
        verdict = Some(bound_check(d, hyp, prec)?);
    }
    Ok(LValueReport {
        d,
        s: s.to_string(),
        h,
        w: unit_count(d),
        l1_lo: rational_to_string(l1.lo()),
        l1_hi: rational_to_string(l1.hi()),
        bound_lo,
        bound_hi,
        verdict,
    })
}
