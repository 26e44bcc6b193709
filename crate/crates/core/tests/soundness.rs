//! Soundness of the interval layer: every enclosure at a coarse precision
//! must contain the same quantity computed at a much finer precision, and
//! the derived cutoff quantities must respect the identities they encode.

use num_bigint::BigInt;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ocpg_core::cutoff::{f_eval, PrimorialTable};
use ocpg_core::interval::{
    ln_enclosure, ln_interval, pi_enclosure, rational_from_string, rational_to_string,
    sqrt_enclosure, Interval,
};
use ocpg_core::lfunc::BoundHypothesis;
use ocpg_core::{Precision, Rational, Verdict};

fn random_positive_rational(rng: &mut StdRng) -> Rational {
    let p: u64 = rng.gen_range(1..=1_000_000_000);
    let q: u64 = rng.gen_range(1..=1_000_000);
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[test]
fn sqrt_and_ln_enclosures_nest_under_refinement() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let coarse = Precision::from_digits(12);
    let fine = Precision::from_digits(40);
    for _ in 0..200 {
        let x = random_positive_rational(&mut rng);

        let s_coarse = sqrt_enclosure(&x, &coarse).unwrap();
        let s_fine = sqrt_enclosure(&x, &fine).unwrap();
        assert!(
            s_coarse.contains_interval(&s_fine),
            "sqrt enclosures must nest at x = {}",
            rational_to_string(&x)
        );
        // certified bracket: lo^2 <= x <= hi^2
        assert!(s_coarse.lo() * s_coarse.lo() <= x);
        assert!(x <= s_coarse.hi() * s_coarse.hi());

        let l_coarse = ln_enclosure(&x, &coarse).unwrap();
        let l_fine = ln_enclosure(&x, &fine).unwrap();
        assert!(
            l_coarse.contains_interval(&l_fine),
            "ln enclosures must nest at x = {}",
            rational_to_string(&x)
        );
    }
}

#[test]
fn ln_is_additive_on_products() {
    let mut rng = StdRng::seed_from_u64(42);
    let prec = Precision::from_digits(25);
    for _ in 0..100 {
        let x = random_positive_rational(&mut rng);
        let y = random_positive_rational(&mut rng);
        let lx = ln_enclosure(&x, &prec).unwrap();
        let ly = ln_enclosure(&y, &prec).unwrap();
        let lxy = ln_enclosure(&(&x * &y), &prec).unwrap();
        assert!(
            lxy.intersects(&lx.add(&ly)),
            "ln(xy) and ln(x)+ln(y) must overlap for x = {}, y = {}",
            rational_to_string(&x),
            rational_to_string(&y)
        );
    }
}

#[test]
fn pi_enclosures_nest_and_match_reference_digits() {
    let coarse = pi_enclosure(&Precision::from_digits(10));
    let fine = pi_enclosure(&Precision::from_digits(60));
    assert!(coarse.contains_interval(&fine));
    // 30-digit reference bracket computed independently
    let lo = rational_from_string("3.141592653589793238462643383279").unwrap();
    let hi = rational_from_string("3.141592653589793238462643383280").unwrap();
    assert!(fine.lo() >= &lo && fine.hi() <= &hi);
}

#[test]
fn ln_interval_covers_both_endpoints() {
    let prec = Precision::from_digits(20);
    let x = Interval::new(
        Rational::new(BigInt::from(3), BigInt::from(2)),
        Rational::new(BigInt::from(7), BigInt::from(2)),
    )
    .unwrap();
    let l = ln_interval(&x, &prec).unwrap();
    let l_lo = ln_enclosure(x.lo(), &prec).unwrap();
    let l_hi = ln_enclosure(x.hi(), &prec).unwrap();
    assert!(l.lo() <= l_lo.hi());
    assert!(l.hi() >= l_hi.lo());
}

#[test]
fn compare_is_consistent_with_endpoints() {
    let a = Interval::new(
        Rational::from_integer(BigInt::one()),
        Rational::from_integer(BigInt::from(2)),
    )
    .unwrap();
    let b = Interval::new(
        Rational::from_integer(BigInt::from(3)),
        Rational::from_integer(BigInt::from(4)),
    )
    .unwrap();
    assert_eq!(a.compare(&b), Verdict::Less);
    assert_eq!(b.compare(&a), Verdict::Greater);
    let c = Interval::new(
        Rational::new(BigInt::from(3), BigInt::from(2)),
        Rational::from_integer(BigInt::from(3)),
    )
    .unwrap();
    assert_eq!(a.compare(&c), Verdict::Overlap);
}

#[test]
fn primorial_log_matches_sum_of_prime_logs() {
    let prec = Precision::from_digits(30);
    let mut table = PrimorialTable::with_digits(30);
    table.ensure(20);
    for g in [1usize, 5, 12, 20] {
        let direct = ln_enclosure(&Rational::from_integer(table.d_g(g).clone()), &prec).unwrap();
        assert!(
            table.ln_dg(g).intersects(&direct),
            "cached ln d_{g} disagrees with direct evaluation"
        );
    }
}

#[test]
fn bound_function_increases_past_turning_point() {
    // F(d) = c sqrt(d) / (pi (ln d)^A) is increasing once ln d > 2A, so with
    // A = 18 doubling any d beyond e^36 ~ 4.3e15 must certifiably raise F.
    let hyp = BoundHypothesis::conrey_iwaniec();
    let prec = Precision::from_digits(40);
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..20 {
        // random d around 10^17..10^19, beyond e^36 ~ 4.3e15
        let d1 = BigInt::from(rng.gen_range(10u64.pow(17)..10u64.pow(19)));
        let d2: BigInt = &d1 * 2;
        let ln1 = ln_enclosure(&Rational::from_integer(d1.clone()), &prec).unwrap();
        let ln2 = ln_enclosure(&Rational::from_integer(d2.clone()), &prec).unwrap();
        let f1 = f_eval(&hyp, &d1, &ln1, &prec);
        let f2 = f_eval(&hyp, &d2, &ln2, &prec);
        assert_eq!(
            f1.compare(&f2),
            Verdict::Less,
            "F must increase past the turning point at d = {d1}"
        );
    }
}

#[test]
fn string_round_trips_preserve_rationals() {
    let mut rng = StdRng::seed_from_u64(99);
    for _ in 0..100 {
        let x = random_positive_rational(&mut rng);
        let s = rational_to_string(&x);
        assert_eq!(rational_from_string(&s).unwrap(), x);
    }
}
