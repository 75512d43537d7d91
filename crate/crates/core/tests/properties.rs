mod common;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::{random_element, random_point, rng, suite};
use padic_dynamics::certify::{certify, classify, shell_offsets, CertifyOutcome, Classification};
use padic_dynamics::finite_dynamics::{find_periodic_point, reduce_map, LocusStatus};
use padic_dynamics::mahler::{analyticity_exponent, mahler_coefficients, FnMap, LocalIterate, SelfMap};
use padic_dynamics::map::{RationalFunction, RationalSelfMap};
use padic_dynamics::padic::{binomial_eval, factorial_valuation, PadicContext, PadicElement, Valuation};
use padic_dynamics::ring::RingElem;
use padic_dynamics::series::{expand_at, poly_eval, MultiPoly, TruncatedSeries};
use padic_dynamics::Error;

const PRECISION: u32 = 12;

fn contexts() -> Vec<Arc<PadicContext>> {
    vec![
        PadicContext::prime(3, PRECISION).unwrap(),
        PadicContext::prime(7, PRECISION).unwrap(),
        PadicContext::unramified(5, 2, PRECISION).unwrap(),
        PadicContext::ramified(3, 2, PRECISION).unwrap(),
        PadicContext::ramified(5, 3, PRECISION).unwrap(),
    ]
}

/// A random element of valuation at least `shift`.
fn shifted(r: &mut ChaCha8Rng, ctx: &Arc<PadicContext>, shift: u32) -> PadicElement {
    let mut x = random_element(r, ctx);
    for _ in 0..shift {
        x = x.mul_uniformizer();
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ultrametric(which in 0usize..5, seed: u64, a in 0u32..6, b in 0u32..6) {
        let ctx = &contexts()[which];
        let mut r = rng(seed);
        let x = shifted(&mut r, ctx, a);
        let y = shifted(&mut r, ctx, b);
        let s = x.try_add(&y).unwrap();
        if let (Valuation::Finite(vx), Valuation::Finite(vy)) = (x.valuation(), y.valuation()) {
            prop_assert!(s.valuation().at_least(vx.min(vy)));
            if vx != vy {
                prop_assert_eq!(s.valuation(), Valuation::Finite(vx.min(vy)));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn valuation_is_multiplicative(which in 0usize..5, seed: u64, a in 0u32..8, b in 0u32..8) {
        let ctx = &contexts()[which];
        let mut r = rng(seed);
        let x = shifted(&mut r, ctx, a);
        let y = shifted(&mut r, ctx, b);
        if let (Valuation::Finite(vx), Valuation::Finite(vy)) = (x.valuation(), y.valuation()) {
            if vx + vy < (ctx.precision() * ctx.e()) as i64 {
                prop_assert_eq!(x.try_mul(&y).unwrap().valuation(), Valuation::Finite(vx + vy));
            }
        }
    }

    #[test]
    fn reduction_is_a_ring_homomorphism(which in 0usize..5, seed: u64) {
        let ctx = &contexts()[which];
        let mut r = rng(seed);
        let x = random_element(&mut r, ctx);
        let y = random_element(&mut r, ctx);
        prop_assert_eq!(x.try_mul(&y).unwrap().residue(), x.residue().mul_ref(&y.residue()));
        prop_assert_eq!(x.try_add(&y).unwrap().residue(), x.residue().add_ref(&y.residue()));
    }

    #[test]
    fn inverse_of_units(which in 0usize..5, seed: u64) {
        let ctx = &contexts()[which];
        let x = random_element(&mut rng(seed), ctx);
        if x.is_unit() {
            prop_assert!(x.try_mul(&x.invert().unwrap()).unwrap().congruent(&PadicElement::one(ctx)));
        } else {
            prop_assert!(matches!(x.invert(), Err(Error::DivisionByNonUnit)));
        }
    }
}

#[test]
fn legendre_formula() {
    for p in [3u64, 5, 7] {
        for k in 0..=10_000u64 {
            let mut expected = 0;
            let mut pi = p;
            while pi <= k {
                expected += k / pi;
                pi *= p;
            }
            assert_eq!(factorial_valuation(k, p), expected, "k = {k}, p = {p}");
        }
    }
}

#[test]
fn binomials_match_pascal_triangle() {
    let mut rows = vec![vec![BigInt::from(1)]];
    for m in 1..=30usize {
        let prev = &rows[m - 1];
        let row = (0..=m)
            .map(|k| {
                let left = if k > 0 { prev[k - 1].clone() } else { BigInt::from(0) };
                left + prev.get(k).cloned().unwrap_or_default()
            })
            .collect();
        rows.push(row);
    }
    for p in [3u64, 5] {
        let ctx = PadicContext::prime(p, 20).unwrap();
        for (m, row) in rows.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                let got = binomial_eval(&PadicElement::from_int(&ctx, m as i64), k as u64).unwrap();
                assert!(got.congruent(&PadicElement::from_bigint(&ctx, c)), "C({m}, {k}) at p = {p}");
            }
        }
    }
}

fn small(r: &mut ChaCha8Rng, ctx: &Arc<PadicContext>) -> PadicElement {
    PadicElement::from_int(ctx, r.gen_range(-4..=4))
}

/// Random series with small integer coefficients.
fn random_series(
    r: &mut ChaCha8Rng,
    ctx: &Arc<PadicContext>,
    n: usize,
    cap: u32,
    constant: bool,
) -> TruncatedSeries {
    let mut terms = Vec::new();
    for _ in 0..6 {
        let exps: Vec<u32> = (0..n).map(|_| r.gen_range(0..=3)).collect();
        let deg: u32 = exps.iter().sum();
        if deg == 0 && !constant {
            continue;
        }
        terms.push((exps, small(r, ctx)));
    }
    TruncatedSeries::from_coeffs(ctx, n, cap, terms)
}

fn compose_all(outer: &[TruncatedSeries], inner: &[TruncatedSeries]) -> Vec<TruncatedSeries> {
    outer.iter().map(|s| s.compose(inner).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn composition_is_associative(seed: u64, n in 1usize..=2, cap in 1u32..=6) {
        let ctx = PadicContext::prime(5, PRECISION).unwrap();
        let mut r = rng(seed);
        let a = random_series(&mut r, &ctx, n, cap, true);
        let b: Vec<_> = (0..n).map(|_| random_series(&mut r, &ctx, n, cap, false)).collect();
        let c: Vec<_> = (0..n).map(|_| random_series(&mut r, &ctx, n, cap, false)).collect();
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&compose_all(&b, &c)).unwrap();
        prop_assert!(left.congruent(&right));
    }

    #[test]
    fn composition_is_degree_stable(seed: u64, n in 1usize..=2, cap in 1u32..=5) {
        let ctx = PadicContext::prime(3, PRECISION).unwrap();
        let mut r = rng(seed);
        let a = random_series(&mut r, &ctx, n, cap + 2, true);
        let b: Vec<_> = (0..n).map(|_| random_series(&mut r, &ctx, n, cap + 2, false)).collect();
        let wide = a.compose(&b).unwrap().truncate(cap);
        let narrow_b: Vec<_> = b.iter().map(|s| s.truncate(cap)).collect();
        let narrow = a.truncate(cap).compose(&narrow_b).unwrap();
        prop_assert!(wide.congruent(&narrow));
    }

    #[test]
    fn expansion_agrees_with_evaluation(seed: u64, n in 1usize..=2, cap in 1u32..=6) {
        let ctx = PadicContext::prime(5, PRECISION).unwrap();
        let mut r = rng(seed);
        let poly = |r: &mut ChaCha8Rng| {
            let terms: Vec<(Vec<u32>, BigRational)> = (0..4)
                .map(|_| {
                    let exps = (0..n).map(|_| r.gen_range(0..=3)).collect();
                    (exps, BigRational::from_integer(BigInt::from(r.gen_range(-6..=6))))
                })
                .collect();
            MultiPoly::from_terms(n, terms)
        };
        let num = poly(&mut r);
        let den = poly(&mut r).add(&MultiPoly::one(n));
        let center = random_point(&mut r, &ctx, n);
        let series = match expand_at(&num, &den, &center, cap) {
            Ok(s) => s,
            Err(Error::IndeterminacyAdjacent) => {
                prop_assert!(!poly_eval(&den, &center).unwrap().is_unit());
                return Ok(());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let p = PadicElement::from_int(&ctx, 5);
        let shift: Vec<_> = random_point(&mut r, &ctx, n).iter().map(|u| p.try_mul(u).unwrap()).collect();
        let point: Vec<_> = center.iter().zip(&shift).map(|(c, s)| c.try_add(s).unwrap()).collect();
        let direct = poly_eval(&num, &point).unwrap().try_mul(&poly_eval(&den, &point).unwrap().invert().unwrap()).unwrap();
        let via_series = series.eval(&shift).unwrap();
        prop_assert!(direct.try_sub(&via_series).unwrap().valuation().at_least(cap as i64 + 1));
    }
}

fn random_map(r: &mut ChaCha8Rng, n: usize) -> RationalSelfMap {
    let comps = (0..n)
        .map(|_| {
            let terms: Vec<(Vec<u32>, BigRational)> = (0..3)
                .map(|_| {
                    let exps = (0..n).map(|_| r.gen_range(0..=3)).collect();
                    (exps, BigRational::from_integer(BigInt::from(r.gen_range(-3..=3))))
                })
                .collect();
            RationalFunction::polynomial(MultiPoly::from_terms(n, terms))
        })
        .collect();
    RationalSelfMap::new(comps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn periodic_records_reverify(seed: u64, n in 1usize..=2, pi in 0usize..2) {
        let p = [3u64, 5][pi];
        let mut r = rng(seed);
        let f = random_map(&mut r, n);
        let fbar = reduce_map(&f, p);
        prop_assume!(fbar.is_ok(), "reduction rejected: {:?}", fbar.as_ref().err());
        let fbar = fbar.unwrap();
        match find_periodic_point(&fbar, 2) {
            Ok(rec) => {
                prop_assert!(rec.reverify(&fbar));
                prop_assert!(rec.orbit_clear && rec.jacobian_invertible);
                let mut x = rec.point.clone();
                for j in 1..=rec.period {
                    x = fbar.apply(&x).unwrap();
                    prop_assert_eq!(x == rec.point, j == rec.period);
                    prop_assert_eq!(fbar.locus_check(&x), LocusStatus::Clear);
                }
            }
            Err(Error::NoPeriodicPoint(_)) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }
}

#[test]
fn analyticity_exponent_is_monotone() {
    let primes = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
    for e in 1..=12u32 {
        let ls: Vec<u32> = primes.iter().map(|&p| analyticity_exponent(p, e)).collect();
        assert!(ls.windows(2).all(|w| w[1] <= w[0]), "e = {e}: {ls:?}");
        for (&p, &l) in primes.iter().zip(&ls) {
            assert_eq!(l == 0, p > 2 * (e as u64 + 1));
        }
    }
}

#[test]
fn constancy_dichotomy() {
    let ctx = PadicContext::ramified(5, 2, 16).unwrap();
    let id = FnMap::new(2, |x: &[PadicElement]| Ok(x.to_vec()));
    let mut r = rng(9);
    let omega = random_point(&mut r, &ctx, 2);
    let interp = mahler_coefficients(&id, &omega, 12).unwrap();
    assert!(interp.is_constant());
    let z = PadicElement::from_int(&ctx, 17);
    let v = interp.evaluate(&z).unwrap();
    assert!(v.coords.iter().zip(&omega).all(|(a, b)| a.congruent(b)));

    let cube = suite().into_iter().find(|m| m.name == "x^3 @5").unwrap().run();
    let phi = LocalIterate::phi(&cube.nbhd);
    let fixed = vec![PadicElement::zero(cube.nbhd.context())];
    let interp = mahler_coefficients(&phi, &fixed, 16).unwrap();
    assert!(interp.is_constant());
    assert!(phi.apply(&fixed).unwrap()[0].is_zero());
    let moving = vec![PadicElement::one(cube.nbhd.context())];
    assert!(!mahler_coefficients(&phi, &moving, 16).unwrap().is_constant());
}

#[test]
fn interpolation_of_psi_matches_classification() {
    for m in suite().iter().filter(|m| m.name != "x^2+1 @5") {
        let run = m.run();
        let nbhd = &run.nbhd;
        let field = run.field();
        let psi = LocalIterate::new(nbhd, nbhd.l_ord() * run.bound.s as u128);
        for offset in shell_offsets(nbhd.dim()).take(8) {
            let omega = nbhd.global_point(&field, &offset).unwrap();
            let t = nbhd.to_local(&nbhd.to_padic_point(&omega).unwrap()).unwrap();
            let interp = mahler_coefficients(&psi, &t, 6).unwrap();
            let class = classify(nbhd, &run.bound, &omega, run.config.exact_bits).unwrap();
            assert_eq!(
                !interp.is_constant(),
                matches!(class, Classification::NonPreperiodic(_)),
                "{} at offset {offset:?}",
                m.name
            );
        }
    }
}

#[test]
fn certificates_are_deterministic() {
    for m in suite() {
        let emit = || match certify(&m.map(), &m.config()).unwrap().1 {
            CertifyOutcome::Certified(c) => c.to_json(),
            _ => panic!("{}: no certificate", m.name),
        };
        assert_eq!(emit(), emit(), "{}", m.name);
    }
}
