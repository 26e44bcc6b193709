//! Certified cutoff engine: for a hypothesis L(1, chi) >= c (log d)^-A,
//! finds the genus index g* such that no fundamental discriminant with one
//! class per genus exceeds the primorial d_{g*}, and emits a certificate of
//! the four inequalities that carry the contradiction argument.
//!
//! Writing F(d) = c sqrt(d) / (pi (ln d)^A), the checks at a candidate g0
//! with p the (g0+1)-th prime, L = ln d_{g0} and m = ln p are:
//!
//! - domain: ln d_{g0} > 2A, so F is increasing on [d_{g0}, oo)
//! - head:   F(d_{g0}) > 2^(g0-1), killing the case g <= g0
//! - tail: c sqrt(d_{g0}) (sqrt(p)/2) / (pi (L+m)^A) > 2^(g0-1), the
//!   g = g0+1 instance of the tail inequality
//! - slope: L ln(sqrt(p)/2) > A m, so the tail expression is increasing in
//!   g - g0 and the g = g0+1 instance dominates all larger g

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{
    ln2_digits, ln_enclosure_digits, pi_enclosure_digits, sqrt_enclosure_digits, Interval,
    IntervalRepr, Precision, Rational, Verdict,
};
use crate::lfunc::{BoundHypothesis, BoundHypothesisRepr};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CutoffError {
    #[error("no cutoff found with g0 <= {0}")]
    NoCutoffFound(u32),
    #[error("precision budget exhausted before all comparisons separated")]
    PrecisionExhausted,
}

/// The n-th prime (1-indexed: nth_prime(1) = 2), by sieve.
pub fn nth_prime(n: usize) -> u64 {
    first_primes(n)[n - 1]
}

/// The first n primes.
pub fn first_primes(n: usize) -> Vec<u64> {
    assert!(n >= 1);
    let bound = if n < 6 {
        16usize
    } else {
        let nf = n as f64;
        (nf * (nf.ln() + nf.ln().ln())).ceil() as usize + 16
    };
    let mut is_comp = vec![false; bound + 1];
    let mut primes = Vec::with_capacity(n);
    for p in 2..=bound {
        if !is_comp[p] {
            primes.push(p as u64);
            if primes.len() == n {
                break;
            }
            let mut q = p * p;
            while q <= bound {
                is_comp[q] = true;
                q += p;
            }
        }
    }
    assert!(primes.len() == n, "sieve bound too small");
    primes
}

/// Product of the first g primes.
pub fn primorial(g: usize) -> BigInt {
    first_primes(g)
        .into_iter()
        .fold(BigInt::one(), |acc, p| acc * BigInt::from(p))
}

/// Primes, primorials and log-primorial enclosures shared by the scan.
pub struct PrimorialTable {
    primes: Vec<u64>,
    primorials: Vec<BigInt>,   // primorials[g-1] = d_g
    ln_digits: u32,
    ln_primes: Vec<Interval>,  // ln_primes[n-1] encloses ln p_n
    ln_sums: Vec<Interval>,    // ln_sums[g-1] encloses ln d_g
}

impl PrimorialTable {
    pub fn new(g_max: usize, digits: u32) -> Self {
        let mut table = PrimorialTable::with_digits(digits);
        table.ensure(g_max);
        table
    }

    pub fn with_digits(digits: u32) -> Self {
        PrimorialTable {
            primes: first_primes(16),
            primorials: Vec::new(),
            ln_digits: digits,
            ln_primes: Vec::new(),
            ln_sums: Vec::new(),
        }
    }

    /// Extends the table so that d_g, ln d_g, and the (g+1)-th prime are
    /// available. Work already done is reused.
    pub fn ensure(&mut self, g: usize) {
        let need = g + 1;
        if self.primes.len() < need {
            self.primes = first_primes(need.max(self.primes.len() * 2));
        }
        while self.ln_primes.len() < need {
            let p = self.primes[self.ln_primes.len()];
            let lp = ln_enclosure_digits(&Rational::from_integer(BigInt::from(p)), self.ln_digits)
                .expect("prime > 0");
            self.ln_primes.push(lp);
        }
        while self.primorials.len() < g {
            let i = self.primorials.len();
            let prev = if i == 0 {
                BigInt::one()
            } else {
                self.primorials[i - 1].clone()
            };
            self.primorials.push(prev * BigInt::from(self.primes[i]));
            let prev_ln = if i == 0 {
                Interval::point(Rational::from_integer(BigInt::from(0)))
            } else {
                self.ln_sums[i - 1].clone()
            };
            self.ln_sums.push(prev_ln.add(&self.ln_primes[i]));
        }
    }

    pub fn ln_prime(&self, n: usize) -> &Interval {
        &self.ln_primes[n - 1]
    }

    pub fn prime(&self, n: usize) -> u64 {
        self.primes[n - 1]
    }

    pub fn d_g(&self, g: usize) -> &BigInt {
        &self.primorials[g - 1]
    }

    pub fn ln_dg(&self, g: usize) -> &Interval {
        &self.ln_sums[g - 1]
    }

    pub fn digits(&self) -> u32 {
        self.ln_digits
    }

    pub fn g_max(&self) -> usize {
        self.primorials.len()
    }
}

/// Enclosure of F(d) = c sqrt(d) / (pi (ln d)^A).
pub fn f_eval(
    hyp: &BoundHypothesis,
    d: &BigInt,
    ln_d: &Interval,
    prec: &Precision,
) -> Interval {
    f_eval_digits(hyp, d, ln_d, prec.digits())
}

fn f_eval_digits(hyp: &BoundHypothesis, d: &BigInt, ln_d: &Interval, digits: u32) -> Interval {
    let sqrt_d = sqrt_enclosure_digits(&Rational::from_integer(d.clone()), digits)
        .expect("d positive");
    let pi = pi_enclosure_digits(digits);
    let denom = pi.mul(&ln_d.pow_int(hyp.exponent).round_out(digits));
    sqrt_d
        .scale(&hyp.coeff)
        .div(&denom)
        .expect("denominator is positive")
        .round_out(digits)
}

pub const CHECK_NAMES: [&str; 4] = ["domain_check", "head_check", "tail_check", "slope_check"];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: Interval,
    pub rhs: Interval,
    pub verdict: Verdict,
}

impl CheckRecord {
    fn new(name: &str, lhs: Interval, rhs: Interval) -> Self {
        let verdict = lhs.compare(&rhs);
        CheckRecord {
            name: name.to_string(),
            lhs,
            rhs,
            verdict,
        }
    }

    pub fn to_json(&self) -> CheckRecordJson {
        CheckRecordJson {
            name: self.name.clone(),
            lhs: self.lhs.to_repr(),
            rhs: self.rhs.to_repr(),
            verdict: self.verdict,
        }
    }

    pub fn from_json(j: &CheckRecordJson) -> Option<Self> {
        Some(CheckRecord {
            name: j.name.clone(),
            lhs: Interval::from_repr(&j.lhs)?,
            rhs: Interval::from_repr(&j.rhs)?,
            verdict: j.verdict,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckRecordJson {
    pub name: String,
    pub lhs: IntervalRepr,
    pub rhs: IntervalRepr,
    pub verdict: Verdict,
}

fn two_pow(k: u32) -> Interval {
    Interval::point(Rational::from_integer(BigInt::one() << k))
}

/// The four inequality records at candidate index g0.
pub fn evaluate_checks(hyp: &BoundHypothesis, table: &PrimorialTable, g0: usize) -> Vec<CheckRecord> {
    let digits = table.digits();
    let d_g0 = table.d_g(g0);
    let ln_dg = table.ln_dg(g0);
    let p = table.prime(g0 + 1);
    let a = hyp.exponent;

    let domain = CheckRecord::new(
        CHECK_NAMES[0],
        ln_dg.clone(),
        Interval::from_int(2 * a as i64),
    );

    let head = CheckRecord::new(
        CHECK_NAMES[1],
        f_eval_digits(hyp, d_g0, ln_dg, digits),
        two_pow(g0 as u32 - 1),
    );

    let sqrt_p = sqrt_enclosure_digits(&Rational::from_integer(BigInt::from(p)), digits)
        .expect("prime positive");
    let half_sqrt_p = sqrt_p.scale(&Rational::new(BigInt::one(), BigInt::from(2)));
    let m = table.ln_prime(g0 + 1);
    let sqrt_d = sqrt_enclosure_digits(&Rational::from_integer(d_g0.clone()), digits)
        .expect("primorial positive");
    let pi = pi_enclosure_digits(digits);
    let tail_lhs = sqrt_d
        .scale(&hyp.coeff)
        .mul(&half_sqrt_p)
        .div(&pi.mul(&ln_dg.add(m).pow_int(a).round_out(digits)))
        .expect("denominator positive")
        .round_out(digits);
    let tail = CheckRecord::new(CHECK_NAMES[2], tail_lhs, two_pow(g0 as u32 - 1));

    // ln(sqrt(p)/2) = ln(p)/2 - ln 2
    let ln_half_sqrt_p = m
        .scale(&Rational::new(BigInt::one(), BigInt::from(2)))
        .sub(&ln2_digits(digits));
    let slope = CheckRecord::new(
        CHECK_NAMES[3],
        ln_dg.mul(&ln_half_sqrt_p).round_out(digits),
        m.scale(&Rational::from_integer(BigInt::from(a))).round_out(digits),
    );

    vec![domain, head, tail, slope]
}

/// Smallest g with 2^(g-1) strictly above the certified lower endpoint of
/// F(d_{g0}).
pub fn min_genus_bound(hyp: &BoundHypothesis, g0: usize, prec: &Precision) -> u32 {
    let digits = prec.digits();
    let table = PrimorialTable::new(g0, digits);
    min_genus_from_f_lo(f_eval_digits(hyp, table.d_g(g0), table.ln_dg(g0), digits).lo())
}

fn min_genus_from_f_lo(f_lo: &Rational) -> u32 {
    let mut k = 0u32;
    let mut pow = Rational::one();
    let two = Rational::from_integer(BigInt::from(2));
    while &pow <= f_lo {
        pow *= &two;
        k += 1;
    }
    k + 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct CutoffCertificate {
    pub hypothesis: BoundHypothesis,
    pub g_star: u32,
    pub d_g_star: BigInt,
    pub next_prime: u64,
    pub min_genus: u32,
    pub checks: Vec<CheckRecord>,
    /// Verdicts at g_star - 1, documenting why g_star is the first success.
    pub previous_checks: Vec<CheckRecord>,
    pub precision_digits: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CutoffCertificateJson {
    pub hypothesis: BoundHypothesisRepr,
    pub g_star: u32,
    pub d_g_star: String,
    pub next_prime: u64,
    pub min_genus: u32,
    pub checks: Vec<CheckRecordJson>,
    pub previous_checks: Vec<CheckRecordJson>,
    pub engine: EngineInfo,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EngineInfo {
    pub precision_digits: u32,
}

impl CutoffCertificate {
    pub fn to_json(&self) -> CutoffCertificateJson {
        CutoffCertificateJson {
            hypothesis: self.hypothesis.to_repr(),
            g_star: self.g_star,
            d_g_star: self.d_g_star.to_string(),
            next_prime: self.next_prime,
            min_genus: self.min_genus,
            checks: self.checks.iter().map(CheckRecord::to_json).collect(),
            previous_checks: self.previous_checks.iter().map(CheckRecord::to_json).collect(),
            engine: EngineInfo {
                precision_digits: self.precision_digits,
            },
        }
    }

    pub fn from_json(j: &CutoffCertificateJson) -> Option<Self> {
        Some(CutoffCertificate {
            hypothesis: BoundHypothesis::from_repr(&j.hypothesis)?,
            g_star: j.g_star,
            d_g_star: j.d_g_star.parse().ok()?,
            next_prime: j.next_prime,
            min_genus: j.min_genus,
            checks: j
                .checks
                .iter()
                .map(CheckRecord::from_json)
                .collect::<Option<_>>()?,
            previous_checks: j
                .previous_checks
                .iter()
                .map(CheckRecord::from_json)
                .collect::<Option<_>>()?,
            precision_digits: j.engine.precision_digits,
        })
    }
}

/// Smallest g0 <= g_max at which all four checks separate strictly; escalates
/// precision whenever a comparison is inconclusive.
pub fn find_cutoff(
    hyp: &BoundHypothesis,
    g_max: usize,
    prec: &Precision,
) -> Result<CutoffCertificate, CutoffError> {
    let mut digits = prec.digits();
    for _ in 0..=prec.max_refinements {
        let mut table = PrimorialTable::with_digits(digits);
        let mut previous: Vec<CheckRecord> = Vec::new();
        let mut overlap = false;
        for g0 in 1..=g_max {
            table.ensure(g0);
            let checks = evaluate_checks(hyp, &table, g0);
            if checks.iter().all(|c| c.verdict == Verdict::Greater) {
                let f_lo = checks[1].lhs.lo().clone();
                return Ok(CutoffCertificate {
                    hypothesis: hyp.clone(),
                    g_star: g0 as u32,
                    d_g_star: table.d_g(g0).clone(),
                    next_prime: table.prime(g0 + 1),
                    min_genus: min_genus_from_f_lo(&f_lo),
                    checks,
                    previous_checks: previous,
                    precision_digits: digits,
                });
            }
            if checks.iter().any(|c| c.verdict == Verdict::Overlap) {
                overlap = true;
                break;
            }
            previous = checks;
        }
        if !overlap {
            return Err(CutoffError::NoCutoffFound(g_max as u32));
        }
        digits *= 2;
    }
    Err(CutoffError::PrecisionExhausted)
}

/// Re-derives every inequality in a certificate from scratch and confirms
/// the recorded verdicts. Returns false on any inconsistency.
pub fn verify_certificate(cert: &CutoffCertificate, prec: &Precision) -> bool {
    let g0 = cert.g_star as usize;
    if g0 == 0 || !cert.hypothesis.coeff.is_positive() || cert.hypothesis.exponent == 0 {
        return false;
    }
    if cert.checks.len() != 4 {
        return false;
    }
    for (check, name) in cert.checks.iter().zip(CHECK_NAMES) {
        if check.name != name {
            return false;
        }
        // recorded endpoints must themselves witness the recorded verdict,
        // and a cutoff certificate only carries strict Greater separations
        if check.verdict != Verdict::Greater || check.lhs.compare(&check.rhs) != Verdict::Greater {
            return false;
        }
    }
    let digits = prec.digits();
    let table = PrimorialTable::new(g0, digits);
    if table.d_g(g0) != &cert.d_g_star {
        return false;
    }
    if table.prime(g0 + 1) != cert.next_prime {
        return false;
    }
    let fresh = evaluate_checks(&cert.hypothesis, &table, g0);
    for (f, r) in fresh.iter().zip(&cert.checks) {
        if f.verdict != Verdict::Greater {
            return false;
        }
        // both enclose the same real values, so they must intersect
        if !f.lhs.intersects(&r.lhs) || !f.rhs.intersects(&r.rhs) {
            return false;
        }
    }
    if min_genus_from_f_lo(fresh[1].lhs.lo()) != cert.min_genus {
        return false;
    }
    true
}

/// Exponent map of the zero-spacing theorem: substituting
/// log T = (log d)^(A+6) into (log T)^-2 (log d)^(-2A-6) gives 4A + 18.
pub fn ci_exponent(a: u32) -> u32 {
    4 * a + 18
}
