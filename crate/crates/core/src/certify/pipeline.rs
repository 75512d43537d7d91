//! From a map to a neighborhood with its period bound, and classification
//! of global points in that neighborhood.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::map_spec::{Config, PrimeChoice};
use crate::error::{Error, Result};
use crate::finite_dynamics::{find_periodic_point, reduce_map, PeriodicPointRecord};
use crate::mahler::analyticity_exponent_for;
use crate::map::RationalSelfMap;
use crate::neighborhood::{
    build_neighborhood, choose_good_prime, context_for, good_primes, hensel_lift, reduction_defect,
    GoodPrimeReport, PadicNeighborhood,
};
use crate::numfield::{NfElement, NumberField};
use crate::padic::{PadicContext, PadicElement, Valuation};

/// `N = k · l_ord · s` with `s = p^{l_an}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodBound {
    pub k: u64,
    pub l_ord: u64,
    pub l_an: u32,
    pub s: u64,
    pub n: u64,
}

pub fn period_bound(nbhd: &PadicNeighborhood) -> Result<PeriodBound> {
    let ctx = nbhd.context();
    let l_an = analyticity_exponent_for(ctx);
    let overflow = || Error::Inconsistency("period bound overflows u64".into());
    let s = ctx.p().checked_pow(l_an).ok_or_else(overflow)?;
    let l_ord: u64 = nbhd.l_ord().try_into().map_err(|_| overflow())?;
    let n = nbhd.period().checked_mul(l_ord).and_then(|x| x.checked_mul(s)).ok_or_else(overflow)?;
    Ok(PeriodBound { k: nbhd.period(), l_ord, l_an, s, n })
}

/// Everything computed before the witness search.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub map: RationalSelfMap,
    pub config: Config,
    pub prime: GoodPrimeReport,
    pub record: PeriodicPointRecord,
    pub ctx: Arc<PadicContext>,
    pub nbhd: PadicNeighborhood,
    pub bound: PeriodBound,
}

impl PipelineRun {
    pub fn field(&self) -> Arc<NumberField> {
        NumberField::for_context(&self.ctx)
    }
}

fn candidate_primes(map: &RationalSelfMap, config: &Config) -> Result<Vec<GoodPrimeReport>> {
    match config.prime {
        PrimeChoice::Fixed(p) => {
            if let Some(why) = reduction_defect(map, p) {
                return Err(Error::BadReduction(format!("prime {p}: {why}")));
            }
            if !map.is_dominant() {
                return Err(Error::NotDominant);
            }
            let fallback = p <= 2 * (config.e as u64 + 1);
            Ok(vec![GoodPrimeReport { p, e: config.e, fallback, rejections: Vec::new() }])
        }
        PrimeChoice::Auto => {
            let first = choose_good_prime(map, 3..=config.prime_scan, config.e)?;
            let mut out = vec![first.clone()];
            let (preferred, fallback): (Vec<_>, Vec<_>) =
                good_primes(map, 3..=config.prime_scan, config.e).into_iter().partition(|(_, fb)| !fb);
            for (p, fb) in preferred.into_iter().chain(fallback) {
                if p != first.p {
                    out.push(GoodPrimeReport {
                        p,
                        e: config.e,
                        fallback: fb,
                        rejections: first.rejections.clone(),
                    });
                }
            }
            Ok(out)
        }
    }
}

/// Good prime, periodic point, lift, neighborhood and period bound.
/// With an automatic prime the next good prime is tried whenever the
/// finite-field search comes up empty.
pub fn run_pipeline(map: &RationalSelfMap, config: &Config) -> Result<PipelineRun> {
    let mut last_err = None;
    for report in candidate_primes(map, config)?.into_iter().take(8) {
        let reduced = reduce_map(map, report.p)?;
        let record = match find_periodic_point(&reduced, config.m_max) {
            Ok(r) => r,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        let ctx = context_for(report.p, record.m, config.e, config.precision)?;
        let y = hensel_lift(&record, &ctx, config.lift)?;
        let nbhd = build_neighborhood(map, record.period, &y, &ctx, config.degree)?;
        let bound = period_bound(&nbhd)?;
        return Ok(PipelineRun {
            map: map.clone(),
            config: config.clone(),
            prime: report,
            record,
            ctx,
            nbhd,
            bound,
        });
    }
    Err(last_err.unwrap_or(Error::NoGoodPrime(3, config.prime_scan)))
}

/// How a non-preperiodicity claim is backed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayloadKind {
    /// Exact value of `f^N(ω)` in `K`.
    Exact,
    /// `f^N(ω)` in `O_p` modulo `p^precision`, used when the exact value
    /// exceeds the size limit.
    Residue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IterateValue {
    Exact(Vec<NfElement>),
    Residue(Vec<PadicElement>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    pub value: IterateValue,
    pub differing_coordinate: usize,
    pub difference_valuation: Valuation,
}

impl Evidence {
    pub fn kind(&self) -> PayloadKind {
        match self.value {
            IterateValue::Exact(_) => PayloadKind::Exact,
            IterateValue::Residue(_) => PayloadKind::Residue,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    Periodic {
        period: u64,
    },
    NonPreperiodic(Box<Evidence>),
    OutsideNeighborhood,
    /// The exact iterate outgrew the size limit and the p-adic iterate
    /// agrees with `ω` to full precision.
    Undecided,
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::Periodic { .. } => "periodic",
            Classification::NonPreperiodic(_) => "non_preperiodic",
            Classification::OutsideNeighborhood => "outside_neighborhood",
            Classification::Undecided => "undecided",
        }
    }
}

/// `f^times(x)` exactly, or `None` once a coordinate exceeds `max_bits`.
pub fn iterate_exact_bounded(
    f: &RationalSelfMap,
    x: &[NfElement],
    times: u64,
    max_bits: u64,
) -> Result<Option<Vec<NfElement>>> {
    let mut x = x.to_vec();
    for _ in 0..times {
        x = f.eval_exact(&x)?;
        if x.iter().any(|c| c.height_bits() > max_bits) {
            return Ok(None);
        }
    }
    Ok(Some(x))
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Decides whether `ω` is periodic with period dividing `N` or not
/// preperiodic at all. Equality is decided exactly whenever the exact
/// iterate stays within `max_bits`; otherwise a nonzero p-adic difference
/// still proves `f^N(ω) ≠ ω`.
pub fn classify(
    nbhd: &PadicNeighborhood,
    bound: &PeriodBound,
    omega: &[NfElement],
    max_bits: u64,
) -> Result<Classification> {
    if !nbhd.membership_exact(omega) {
        return Ok(Classification::OutsideNeighborhood);
    }
    let map = nbhd.map();
    let z = nbhd.to_padic_point(omega)?;
    let fz = map.iterate_padic(&z, bound.n as u128)?;
    let diffs: Vec<Valuation> =
        fz.iter().zip(&z).map(|(a, b)| a.try_sub(b).map(|d| d.valuation())).collect::<Result<_>>()?;
    let padic_witness = diffs.iter().position(|v| v.finite().is_some());
    match iterate_exact_bounded(map, omega, bound.n, max_bits) {
        Err(Error::IndeterminacyAdjacent) => Err(Error::Inconsistency(
            "exact orbit of a member hit a pole while the p-adic orbit stayed integral".into(),
        )),
        Err(e) => Err(e),
        Ok(Some(value)) => {
            if value.iter().any(|c| !c.is_p_integral(nbhd.context().p())) {
                return Err(Error::Inconsistency("exact iterate of a member is not p-integral".into()));
            }
            match value.iter().zip(omega).position(|(a, b)| a != b) {
                None => {
                    if let Some(i) = padic_witness {
                        return Err(Error::Inconsistency(format!(
                            "f^N(ω) = ω exactly but coordinate {i} differs p-adically"
                        )));
                    }
                    for d in divisors(bound.n) {
                        let x = iterate_exact_bounded(map, omega, d, max_bits)?;
                        if x.as_deref() == Some(omega) {
                            return Ok(Classification::Periodic { period: d });
                        }
                    }
                    unreachable!("N itself is a divisor")
                }
                Some(i) => Ok(Classification::NonPreperiodic(Box::new(Evidence {
                    value: IterateValue::Exact(value),
                    differing_coordinate: i,
                    difference_valuation: diffs[i],
                }))),
            }
        }
        Ok(None) => match padic_witness {
            Some(i) => Ok(Classification::NonPreperiodic(Box::new(Evidence {
                value: IterateValue::Residue(fz),
                differing_coordinate: i,
                difference_valuation: diffs[i],
            }))),
            None => Ok(Classification::Undecided),
        },
    }
}

/// Integer vectors ordered by max-norm, then lexicographically in the
/// order `0, 1, −1, 2, −2, …` of each coordinate.
pub fn shell_offsets(n: usize) -> impl Iterator<Item = Vec<i64>> {
    (0i64..).flat_map(move |s| {
        // side[j] has zigzag index j, so counting in base side.len() is the
        // required lexicographic order
        let side: Vec<i64> = (0..=2 * s).map(|j| if j % 2 == 1 { (j + 1) / 2 } else { -(j / 2) }).collect();
        let m = side.len();
        (0..m.pow(n as u32)).filter_map(move |mut idx| {
            let mut v = vec![0i64; n];
            for slot in (0..n).rev() {
                v[slot] = side[idx % m];
                idx /= m;
            }
            (v.iter().map(|x| x.abs()).max().unwrap_or(0) == s).then_some(v)
        })
    })
}

#[derive(Debug, Clone)]
pub struct ScannedPoint {
    pub offset: Vec<i64>,
    pub omega: Vec<NfElement>,
    pub classification: Classification,
}

#[derive(Debug, Clone)]
pub enum WitnessOutcome {
    Found {
        omega: Vec<NfElement>,
        evidence: Evidence,
        scanned: Vec<ScannedPoint>,
    },
    /// Every scanned point was periodic with one common period dividing `N`.
    FiniteOrderSuspected {
        period: u64,
        scanned: Vec<ScannedPoint>,
    },
    BudgetExhausted {
        scanned: Vec<ScannedPoint>,
    },
}

/// Scans `ŷ + p·v` over [`shell_offsets`] and stops at the first point that
/// is not preperiodic.
pub fn find_witness(run: &PipelineRun, budget: usize) -> Result<WitnessOutcome> {
    let field = run.field();
    let mut scanned = Vec::new();
    for offset in shell_offsets(run.nbhd.dim()).take(budget) {
        let omega = run.nbhd.global_point(&field, &offset)?;
        let class = classify(&run.nbhd, &run.bound, &omega, run.config.exact_bits)?;
        if let Classification::NonPreperiodic(ev) = &class {
            let evidence = (**ev).clone();
            scanned.push(ScannedPoint { offset, omega: omega.clone(), classification: class });
            return Ok(WitnessOutcome::Found { omega, evidence, scanned });
        }
        scanned.push(ScannedPoint { offset, omega, classification: class });
    }
    let periods: Vec<u64> = scanned
        .iter()
        .filter_map(|s| match s.classification {
            Classification::Periodic { period } => Some(period),
            _ => None,
        })
        .collect();
    if !scanned.is_empty() && periods.len() == scanned.len() {
        let first = periods[0];
        if periods.iter().all(|&q| q == first) && run.bound.n.is_multiple_of(first) {
            return Ok(WitnessOutcome::FiniteOrderSuspected { period: first, scanned });
        }
    }
    Ok(WitnessOutcome::BudgetExhausted { scanned })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_follow_shells() {
        let one: Vec<Vec<i64>> = shell_offsets(1).take(5).collect();
        assert_eq!(one, vec![vec![0], vec![1], vec![-1], vec![2], vec![-2]]);
        let two: Vec<Vec<i64>> = shell_offsets(2).take(9).collect();
        assert_eq!(two[0], vec![0, 0]);
        assert_eq!(
            &two[1..9],
            &[
                vec![0, 1],
                vec![0, -1],
                vec![1, 0],
                vec![1, 1],
                vec![1, -1],
                vec![-1, 0],
                vec![-1, 1],
                vec![-1, -1]
            ]
        );
        assert_eq!(shell_offsets(2).nth(9).unwrap(), vec![0, 2]);
    }

    #[test]
    fn divisor_list() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(9), vec![1, 3, 9]);
        assert_eq!(divisors(1), vec![1]);
    }
}
