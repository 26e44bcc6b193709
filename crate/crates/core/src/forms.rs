//! Binary quadratic forms of negative discriminant: reduction, enumeration,
//! Dirichlet composition, class numbers, genus counting, and the
//! one-class-per-genus search.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormsError {
    #[error("{0} is not a negative discriminant (need D < 0 and D = 0 or 1 mod 4)")]
    NotADiscriminant(BigInt),
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("forms have different discriminants")]
    DiscriminantMismatch,
    #[error("genus cross-check failed for D = {0}: ambiguous count {1}, expected 2^(omega-1) = {2}")]
    GenusCrossCheckFailed(BigInt, u64, u64),
}

/// A positive definite form a x^2 + b xy + c y^2, discriminant b^2 - 4ac < 0.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadraticForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl QuadraticForm {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
    ) -> Result<Self, FormsError> {
        let f = QuadraticForm {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        };
        if !f.a.is_positive() || !f.discriminant().is_negative() {
            return Err(FormsError::NotPositiveDefinite);
        }
        Ok(f)
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn is_reduced(&self) -> bool {
        let babs = self.b.abs();
        if babs > self.a || self.a > self.c {
            return false;
        }
        if (babs == self.a || self.a == self.c) && self.b.is_negative() {
            return false;
        }
        true
    }

    /// Ambiguous reduced forms (order <= 2 classes) have b = 0, a = b, or a = c.
    pub fn is_ambiguous(&self) -> bool {
        self.b.is_zero() || self.a == self.b || self.a == self.c
    }

    pub fn as_triple(&self) -> (BigInt, BigInt, BigInt) {
        (self.a.clone(), self.b.clone(), self.c.clone())
    }
}

/// The principal form: (1,0,|D|/4) for D = 0 mod 4, (1,1,(1+|D|)/4) for D = 1 mod 4.
pub fn principal_form(d: &Discriminant) -> QuadraticForm {
    let abs = -&d.value;
    if d.value.mod_floor(&BigInt::from(4)).is_zero() {
        QuadraticForm {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: abs / 4,
        }
    } else {
        QuadraticForm {
            a: BigInt::one(),
            b: BigInt::one(),
            c: (abs + 1) / 4,
        }
    }
}

/// A validated negative discriminant with fundamentality flag and the count
/// of distinct primes dividing |D|.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discriminant {
    pub value: BigInt,
    pub is_fundamental: bool,
    pub distinct_prime_factors: u32,
}

/// Trial-division factorization of |n|; fine for the search ranges we target.
fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        if n.mod_floor(&p).is_zero() {
            let mut e = 0;
            while n.mod_floor(&p).is_zero() {
                n /= &p;
                e += 1;
            }
            out.push((p.clone(), e));
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

pub fn validate_discriminant(d: impl Into<BigInt>) -> Result<Discriminant, FormsError> {
    let value: BigInt = d.into();
    let residue = value.mod_floor(&BigInt::from(4));
    if !value.is_negative() || !(residue.is_zero() || residue.is_one()) {
        return Err(FormsError::NotADiscriminant(value));
    }
    let abs = -&value;
    let factors = factor(&abs);
    let distinct_prime_factors = factors.len() as u32;
    let squarefree = |fs: &[(BigInt, u32)]| fs.iter().all(|(_, e)| *e == 1);
    let is_fundamental = if residue.is_one() {
        squarefree(&factors)
    } else {
        // D = 4m, fundamental iff m = 2 or 3 mod 4 and squarefree
        let m: BigInt = &value / 4;
        let mr = m.mod_floor(&BigInt::from(4));
        (mr == BigInt::from(2) || mr == BigInt::from(3)) && squarefree(&factor(&m))
    };
    Ok(Discriminant {
        value,
        is_fundamental,
        distinct_prime_factors,
    })
}

/// Classical normalize-translate reduction loop. Ties resolved to b >= 0
/// when |b| = a or a = c.
pub fn reduce(f: &QuadraticForm) -> Result<QuadraticForm, FormsError> {
    if !f.a.is_positive() || !f.discriminant().is_negative() {
        return Err(FormsError::NotPositiveDefinite);
    }
    let d = f.discriminant();
    let mut a = f.a.clone();
    let mut b = f.b.clone();
    let mut c = f.c.clone();
    loop {
        // normalize b into (-a, a]
        let two_a = &a * 2;
        let mut r = b.mod_floor(&two_a);
        if r > a {
            r -= &two_a;
        }
        if r != b {
            b = r;
            c = (&b * &b - &d) / (BigInt::from(4) * &a);
        }
        if a > c {
            // swap via (a,b,c) -> (c,-b,a)
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if b.is_negative() && (b.abs() == a || a == c) {
            b = -b;
        }
        break;
    }
    debug_assert_eq!(&b * &b - BigInt::from(4) * &a * &c, d);
    Ok(QuadraticForm { a, b, c })
}

/// All reduced forms of discriminant D, sorted by (a, b).
pub fn enumerate_reduced(d: &Discriminant) -> Vec<QuadraticForm> {
    if let (Some(dv), true) = (to_i64(&d.value), d.value >= BigInt::from(-(1i64 << 62))) {
        return enumerate_reduced_small(dv)
            .into_iter()
            .map(|(a, b, c)| QuadraticForm {
                a: BigInt::from(a),
                b: BigInt::from(b),
                c: BigInt::from(c),
            })
            .collect();
    }
    enumerate_reduced_big(&d.value)
}

fn to_i64(n: &BigInt) -> Option<i64> {
    use num_traits::ToPrimitive;
    n.to_i64()
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    num_integer::gcd(a, b)
}

fn isqrt_i128(n: i128) -> i128 {
    if n < 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn enumerate_reduced_small(d: i64) -> Vec<(i64, i64, i64)> {
    let abs = -(d as i128);
    let amax = isqrt_i128(abs / 3) as i64;
    let mut out = Vec::new();
    for a in 1..=amax.max(1) {
        let a128 = a as i128;
        for b in (-a + 1)..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = (b as i128) * (b as i128) + abs;
            if num % (4 * a128) != 0 {
                continue;
            }
            let c = num / (4 * a128);
            if c < a128 {
                continue;
            }
            if b < 0 && a128 == c {
                continue;
            }
            // only primitive forms lie in the class group
            if gcd_i128(gcd_i128(a128, b.unsigned_abs() as i128), c) != 1 {
                continue;
            }
            out.push((a, b, c as i64));
        }
    }
    out.sort();
    out
}

fn enumerate_reduced_big(d: &BigInt) -> Vec<QuadraticForm> {
    let abs = -d;
    let amax = (&abs / 3u32).sqrt();
    let mut out = Vec::new();
    let mut a = BigInt::one();
    while a <= amax {
        let four_a = BigInt::from(4) * &a;
        let mut b: BigInt = -&a + 1;
        while b <= a {
            if ((&b - d) as BigInt).mod_floor(&BigInt::from(2)).is_zero() {
                let num: BigInt = &b * &b + &abs;
                if num.mod_floor(&four_a).is_zero() {
                    let c = num / &four_a;
                    if c >= a
                        && !(b.is_negative() && a == c)
                        && a.gcd(&b).gcd(&c).is_one()
                    {
                        out.push(QuadraticForm {
                            a: a.clone(),
                            b: b.clone(),
                            c,
                        });
                    }
                }
            }
            b += 1;
        }
        a += 1;
    }
    out.sort();
    out
}

pub fn class_number(d: &Discriminant) -> u64 {
    enumerate_reduced(d).len() as u64
}

struct ExtGcd {
    g: BigInt,
    x: BigInt,
    y: BigInt,
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> ExtGcd {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_x, mut x) = (BigInt::one(), BigInt::zero());
    let (mut old_y, mut y) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let tmp = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, tmp);
        let tmp = &old_x - &q * &x;
        old_x = std::mem::replace(&mut x, tmp);
        let tmp = &old_y - &q * &y;
        old_y = std::mem::replace(&mut y, tmp);
    }
    if old_r.is_negative() {
        ExtGcd {
            g: -old_r,
            x: -old_x,
            y: -old_y,
        }
    } else {
        ExtGcd {
            g: old_r,
            x: old_x,
            y: old_y,
        }
    }
}

// g = x*a + y*b + z*c
fn ext_gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> (BigInt, BigInt, BigInt, BigInt) {
    let r1 = ext_gcd(a, b);
    let r2 = ext_gcd(&r1.g, c);
    (r2.g, &r2.x * &r1.x, &r2.x * &r1.y, r2.y)
}

/// Dirichlet composition of two classes; returns the reduced representative.
///
/// With s = (b1+b2)/2 and e = gcd(a1, a2, s) = x a1 + y a2 + z s:
/// a3 = a1 a2 / e^2 and b3 = (x a1 b2 + y a2 b1 + z (b1 b2 + D)/2) / e mod 2 a3.
pub fn compose(f: &QuadraticForm, g: &QuadraticForm) -> Result<QuadraticForm, FormsError> {
    let d = f.discriminant();
    if d != g.discriminant() {
        return Err(FormsError::DiscriminantMismatch);
    }
    let s = (&f.b + &g.b) / 2;
    let (e, x, y, z) = ext_gcd3(&f.a, &g.a, &s);
    let a3 = &f.a * &g.a / (&e * &e);
    let mixed = (&f.b * &g.b + &d) / 2;
    let b3_num: BigInt = x * &f.a * &g.b + y * &g.a * &f.b + z * mixed;
    debug_assert!(b3_num.mod_floor(&e).is_zero());
    let two_a3 = &a3 * 2;
    let b3 = (b3_num / &e).mod_floor(&two_a3);
    let c3 = (&b3 * &b3 - &d) / (BigInt::from(4) * &a3);
    reduce(&QuadraticForm {
        a: a3,
        b: b3,
        c: c3,
    })
}

/// Per-discriminant class and genus summary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusReport {
    pub discriminant: Discriminant,
    pub h: u64,
    pub ambiguous_count: u64,
    pub genus_count: u64,
    pub one_class_per_genus: bool,
    pub reduced_forms: Vec<QuadraticForm>,
}

impl GenusReport {
    /// JSON object {d, h, ambiguous, genera, ocpg, forms} with big integers
    /// as decimal strings.
    pub fn to_json(&self) -> GenusReportJson {
        GenusReportJson {
            d: self.discriminant.value.to_string(),
            h: self.h,
            ambiguous: self.ambiguous_count,
            genera: self.genus_count,
            ocpg: self.one_class_per_genus,
            forms: self
                .reduced_forms
                .iter()
                .map(|f| [f.a.to_string(), f.b.to_string(), f.c.to_string()])
                .collect(),
        }
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.discriminant.value, self.h, self.ambiguous_count, self.genus_count, self.one_class_per_genus
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GenusReportJson {
    pub d: String,
    pub h: u64,
    pub ambiguous: u64,
    pub genera: u64,
    pub ocpg: bool,
    pub forms: Vec<[String; 3]>,
}

/// Genera are counted as ambiguous reduced classes (the 2-torsion subgroup),
/// which is valid for non-maximal orders too. For fundamental D the count is
/// cross-checked against 2^(omega-1).
pub fn genus_report(d: &Discriminant) -> Result<GenusReport, FormsError> {
    let reduced_forms = enumerate_reduced(d);
    let h = reduced_forms.len() as u64;
    let ambiguous_count = reduced_forms.iter().filter(|f| f.is_ambiguous()).count() as u64;
    if d.is_fundamental {
        let expected = 1u64 << (d.distinct_prime_factors - 1);
        if ambiguous_count != expected {
            return Err(FormsError::GenusCrossCheckFailed(
                d.value.clone(),
                ambiguous_count,
                expected,
            ));
        }
    }
    Ok(GenusReport {
        discriminant: d.clone(),
        h,
        ambiguous_count,
        genus_count: ambiguous_count,
        one_class_per_genus: h == ambiguous_count,
        reduced_forms,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    All,
    Fundamental,
    Idoneal,
}

/// One-class-per-genus scan. For `All`/`Fundamental` the limit bounds |D|;
/// for `Idoneal` it bounds n with D = -4n. Results ascend by |D|.
pub fn search_ocpg(limit: u64, mode: SearchMode) -> Vec<GenusReport> {
    let candidates: Vec<i64> = match mode {
        SearchMode::Idoneal => (1..=limit as i64).map(|n| -4 * n).collect(),
        _ => (3..=limit as i64)
            .filter(|m| m % 4 == 0 || m % 4 == 3)
            .map(|m| -m)
            .collect(),
    };
    let mut reports: Vec<GenusReport> = candidates
        .into_par_iter()
        .filter_map(|dv| {
            let d = validate_discriminant(dv).ok()?;
            if mode == SearchMode::Fundamental && !d.is_fundamental {
                return None;
            }
            let report = genus_report(&d).expect("genus cross-check");
            report.one_class_per_genus.then_some(report)
        })
        .collect();
    reports.sort_by(|a, b| b.discriminant.value.cmp(&a.discriminant.value));
    reports
}
