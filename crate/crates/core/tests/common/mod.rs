#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use padic_dynamics::certify::{run_pipeline, Config, PipelineRun, PrimeChoice};
use padic_dynamics::map::RationalSelfMap;
use padic_dynamics::neighborhood::LiftKind;
use padic_dynamics::padic::{PadicContext, PadicElement};

pub const KMAX: usize = 32;

pub struct SuiteMap {
    pub name: &'static str,
    pub numerators: &'static [&'static str],
    pub p: u64,
    pub lift: LiftKind,
}

pub fn suite() -> Vec<SuiteMap> {
    vec![
        SuiteMap { name: "x^2+1 @3", numerators: &["x1^2 + 1"], p: 3, lift: LiftKind::Naive },
        SuiteMap { name: "x^2+1 @5", numerators: &["x1^2 + 1"], p: 5, lift: LiftKind::Teichmuller },
        SuiteMap { name: "x^2 @5", numerators: &["x1^2"], p: 5, lift: LiftKind::Teichmuller },
        SuiteMap { name: "x^3 @5", numerators: &["x1^3"], p: 5, lift: LiftKind::Teichmuller },
        SuiteMap { name: "x^3 @7", numerators: &["x1^3"], p: 7, lift: LiftKind::Teichmuller },
        SuiteMap {
            name: "(x^2+y, y^2+x) @5",
            numerators: &["x1^2 + x2", "x2^2 + x1"],
            p: 5,
            lift: LiftKind::Teichmuller,
        },
    ]
}

impl SuiteMap {
    pub fn map(&self) -> RationalSelfMap {
        RationalSelfMap::parse::<&str>(self.numerators.len(), self.numerators, &[]).unwrap()
    }

    pub fn config(&self) -> Config {
        Config { prime: PrimeChoice::Fixed(self.p), lift: self.lift, kmax: KMAX, ..Config::default() }
    }

    pub fn run(&self) -> PipelineRun {
        run_pipeline(&self.map(), &self.config()).unwrap_or_else(|e| panic!("{}: {e}", self.name))
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_digits(rng: &mut ChaCha8Rng, p: u64, digits: u32) -> BigInt {
    (0..digits).fold(BigInt::from(0), |acc, _| acc * p + rng.gen_range(0..p))
}

/// Uniform element of `O_p` to full precision.
pub fn random_element(rng: &mut ChaCha8Rng, ctx: &Arc<PadicContext>) -> PadicElement {
    let coords: Vec<BigInt> = (0..ctx.rank()).map(|_| random_digits(rng, ctx.p(), ctx.precision())).collect();
    PadicElement::from_basis(ctx, &coords).unwrap()
}

/// Uniform element of `Z_p` to full precision.
pub fn random_zp(rng: &mut ChaCha8Rng, ctx: &Arc<PadicContext>) -> PadicElement {
    PadicElement::from_bigint(ctx, &random_digits(rng, ctx.p(), ctx.precision()))
}

pub fn random_point(rng: &mut ChaCha8Rng, ctx: &Arc<PadicContext>, n: usize) -> Vec<PadicElement> {
    (0..n).map(|_| random_element(rng, ctx)).collect()
}

pub fn congruent_to(a: &PadicElement, b: &PadicElement, bound: i64) -> bool {
    a.try_sub(b).unwrap().valuation().at_least(bound)
}
