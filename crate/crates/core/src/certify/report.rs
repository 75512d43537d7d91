//! Diagnostic report of the Mahler interpolation at a point.

use serde::{Deserialize, Serialize};

use super::pipeline::PipelineRun;
use crate::error::{Error, Result};
use crate::mahler::{lemma5_certify, mahler_coefficients, LocalIterate, MarginRow};
use crate::numfield::NfElement;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceSummary {
    pub l: u32,
    pub guaranteed_slope: String,
    pub nonnegative: bool,
    pub eventually_increasing: bool,
    pub certified: bool,
    pub margins: Vec<MarginRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub map_sha256: String,
    pub p: u64,
    pub e: u32,
    pub d: u32,
    pub k: u64,
    pub l_ord: u64,
    pub l_an: u32,
    /// Number of applications of `F` per step of the interpolated map.
    pub power: u64,
    pub point: Vec<String>,
    /// Local coordinates `(ω − y)/r`, as `O_p` digits.
    pub local_point: Vec<Vec<String>>,
    pub kmax: usize,
    pub tail_bound: i64,
    /// `v_r(b_{ik})` for `k = 1..=kmax`; `null` when zero to precision.
    pub valuation_profile: Vec<Vec<Option<i64>>>,
    pub constant: bool,
    pub convergence: Vec<ConvergenceSummary>,
}

/// Interpolates `Φ^power`, `Φ = F^{l_ord}`, at the member `omega`.
pub fn interpolation_report(
    run: &PipelineRun,
    omega: &[NfElement],
    kmax: usize,
    power: u64,
) -> Result<InterpolationReport> {
    let nbhd = &run.nbhd;
    if !nbhd.membership_exact(omega) {
        return Err(Error::BadReduction("point is not in the neighborhood".into()));
    }
    let t = nbhd.to_local(&nbhd.to_padic_point(omega)?)?;
    let phi = LocalIterate::new(nbhd, nbhd.l_ord() * power as u128);
    let interp = mahler_coefficients(&phi, &t, kmax)?;
    let mut ls = vec![interp.l_an()];
    if interp.l_an() >= 1 {
        ls.push(interp.l_an() - 1);
    }
    let convergence = ls
        .into_iter()
        .map(|l| {
            let rep = lemma5_certify(&interp, l);
            ConvergenceSummary {
                l,
                guaranteed_slope: rep.guaranteed_slope.to_string(),
                nonnegative: rep.nonnegative,
                eventually_increasing: rep.eventually_increasing,
                certified: rep.certified,
                margins: rep.rows(),
            }
        })
        .collect();
    Ok(InterpolationReport {
        map_sha256: run.map.hash_hex(),
        p: run.ctx.p(),
        e: run.ctx.e(),
        d: run.ctx.d(),
        k: run.bound.k,
        l_ord: run.bound.l_ord,
        l_an: run.bound.l_an,
        power,
        point: omega.iter().map(|c| c.to_text()).collect(),
        local_point: t.iter().map(|c| c.digit_strings()).collect(),
        kmax,
        tail_bound: interp.tail_bound(),
        valuation_profile: interp
            .valuation_profile()
            .iter()
            .map(|col| col.iter().map(|v| v.finite()).collect())
            .collect(),
        constant: interp.is_constant(),
        convergence,
    })
}
