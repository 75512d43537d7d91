//! Mahler-series interpolation `g(z) = ω + Σ b_k binom(z, k)` of the orbit
//! `j ↦ Φ^j(ω)` of a self-map of `O_p^n` that is congruent to the identity
//! modulo `r`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::RationalSelfMap;
use crate::neighborhood::PadicNeighborhood;
use crate::numfield::NfElement;
use crate::padic::{
    binomial_eval, factorial_valuation, integer_binomial, PadicContext, PadicElement, Valuation,
};

/// A self-map of `O_p^n` that can be evaluated numerically.
pub trait SelfMap {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[PadicElement]) -> Result<Vec<PadicElement>>;

    /// `x, Φ(x), …, Φ^count(x)`.
    fn orbit(&self, start: &[PadicElement], count: usize) -> Result<Vec<Vec<PadicElement>>> {
        let mut out = vec![start.to_vec()];
        for j in 1..=count {
            let next = self.apply(&out[j - 1])?;
            check_precision(&next, j)?;
            out.push(next);
        }
        Ok(out)
    }
}

fn check_precision(x: &[PadicElement], index: usize) -> Result<()> {
    if x.iter().any(|c| c.precision() == 0) {
        return Err(Error::PrecisionExhausted(format!("orbit point {index} has no digits left")));
    }
    Ok(())
}

/// A self-map given by a closure.
pub struct FnMap<F> {
    n: usize,
    f: F,
}

impl<F> FnMap<F>
where
    F: Fn(&[PadicElement]) -> Result<Vec<PadicElement>>,
{
    pub fn new(n: usize, f: F) -> Self {
        FnMap { n, f }
    }
}

impl<F> SelfMap for FnMap<F>
where
    F: Fn(&[PadicElement]) -> Result<Vec<PadicElement>>,
{
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[PadicElement]) -> Result<Vec<PadicElement>> {
        (self.f)(x)
    }
}

/// `Φ = F^power` on the local coordinates of a neighborhood, where `F` is
/// the normalized `f^k`. Orbits are iterated in ambient coordinates so that
/// no precision is lost from one step to the next.
pub struct LocalIterate<'a> {
    nbhd: &'a PadicNeighborhood,
    power: u128,
}

impl<'a> LocalIterate<'a> {
    pub fn new(nbhd: &'a PadicNeighborhood, power: u128) -> Self {
        LocalIterate { nbhd, power }
    }

    /// `Φ = F^{l_ord}`.
    pub fn phi(nbhd: &'a PadicNeighborhood) -> Self {
        Self::new(nbhd, nbhd.l_ord())
    }

    /// Number of applications of `f` per step.
    pub fn f_steps(&self) -> u128 {
        self.power * self.nbhd.period() as u128
    }

    fn ambient_step(&self, x: &[PadicElement]) -> Result<Vec<PadicElement>> {
        self.nbhd.map().iterate_padic(x, self.f_steps())
    }
}

impl SelfMap for LocalIterate<'_> {
    fn dim(&self) -> usize {
        self.nbhd.dim()
    }

    fn apply(&self, t: &[PadicElement]) -> Result<Vec<PadicElement>> {
        let x = self.nbhd.from_local(t)?;
        self.nbhd.to_local(&self.ambient_step(&x)?)
    }

    fn orbit(&self, start: &[PadicElement], count: usize) -> Result<Vec<Vec<PadicElement>>> {
        let mut x = self.nbhd.from_local(start)?;
        let mut out = vec![start.to_vec()];
        for j in 1..=count {
            x = self.ambient_step(&x)?;
            let t = self.nbhd.to_local(&x)?;
            check_precision(&t, j)?;
            out.push(t);
        }
        Ok(out)
    }
}

/// Exact orbit `x, g(x), …, g^count(x)` with `g = f^steps`.
pub fn exact_orbit(
    f: &RationalSelfMap,
    start: &[NfElement],
    steps: u128,
    count: usize,
) -> Result<Vec<Vec<NfElement>>> {
    let mut out = vec![start.to_vec()];
    for j in 1..=count {
        let mut x = out[j - 1].clone();
        for _ in 0..steps {
            x = f.eval_exact(&x)?;
        }
        out.push(x);
    }
    Ok(out)
}

/// `ceil((k+1)/2)`, the guaranteed `r`-adic valuation of `b_k`.
pub fn coefficient_bound(k: usize) -> i64 {
    (k as i64 + 2) / 2
}

/// Least `l ≥ 0` with `(p − 1) p^l > 2e`.
pub fn analyticity_exponent(p: u64, e: u32) -> u32 {
    let mut l = 0;
    let mut lhs = (p - 1) as u128;
    while lhs <= 2 * e as u128 {
        lhs *= p as u128;
        l += 1;
    }
    l
}

pub fn analyticity_exponent_for(ctx: &PadicContext) -> u32 {
    analyticity_exponent(ctx.p(), ctx.e())
}

#[derive(Debug, Clone)]
pub struct MahlerInterpolation {
    ctx: Arc<PadicContext>,
    center: Vec<PadicElement>,
    /// `coeffs[i][k-1] = b_{ik}`.
    coeffs: Vec<Vec<PadicElement>>,
    l_an: u32,
}

/// Forward differences `Δ^k x_i (0)` of a sequence of points.
pub fn finite_differences(orbit: &[Vec<PadicElement>]) -> Result<Vec<Vec<PadicElement>>> {
    let n = orbit.first().map_or(0, |x| x.len());
    let k_max = orbit.len().saturating_sub(1);
    let mut out = vec![Vec::with_capacity(k_max); n];
    for k in 1..=k_max {
        let binoms: Vec<BigInt> = (0..=k).map(|j| integer_binomial(&BigInt::from(k), j as u64)).collect();
        for (i, col) in out.iter_mut().enumerate() {
            let ctx = orbit[0][i].context();
            let mut acc = PadicElement::zero(ctx);
            for (j, point) in orbit[..=k].iter().enumerate() {
                let mut c = binoms[j].clone();
                if (k - j) % 2 == 1 {
                    c = -c;
                }
                acc = acc.try_add(&point[i].try_mul(&PadicElement::from_bigint(ctx, &c))?)?;
            }
            col.push(acc);
        }
    }
    Ok(out)
}

/// Mahler coefficients of `j ↦ Φ^j(ω)` for `k ≤ k_max`, with the valuation
/// law `v_r(b_k) ≥ ceil((k+1)/2)` checked for every coefficient.
pub fn mahler_coefficients(
    phi: &dyn SelfMap,
    omega: &[PadicElement],
    k_max: usize,
) -> Result<MahlerInterpolation> {
    let ctx = match omega.first() {
        Some(x) => x.context().clone(),
        None => return Err(Error::DimensionMismatch { expected: phi.dim(), got: 0 }),
    };
    if omega.len() != phi.dim() {
        return Err(Error::DimensionMismatch { expected: phi.dim(), got: omega.len() });
    }
    let orbit = phi.orbit(omega, k_max)?;
    let coeffs = finite_differences(&orbit)?;
    let e = ctx.e() as i64;
    for (i, col) in coeffs.iter().enumerate() {
        for (idx, b) in col.iter().enumerate() {
            let k = idx + 1;
            let bound = coefficient_bound(k);
            let v = b.valuation();
            if !v.at_least(bound) {
                return Err(Error::TheoryViolation { coord: i, k, valuation: v.known_lower_bound(), bound });
            }
            if v.is_zero_to_precision() && e * (b.precision() as i64) < bound {
                return Err(Error::PrecisionExhausted(format!(
                    "b_{k} is known only to r-adic order {}, below the bound {bound}",
                    e * b.precision() as i64
                )));
            }
        }
    }
    let l_an = analyticity_exponent_for(&ctx);
    Ok(MahlerInterpolation { ctx, center: omega.to_vec(), coeffs, l_an })
}

/// A value of the interpolation: exact partial sum plus the guaranteed
/// valuation of the omitted tail.
#[derive(Debug, Clone)]
pub struct MahlerValue {
    pub coords: Vec<PadicElement>,
    pub tail_valuation: i64,
}

impl MahlerValue {
    /// `r`-adic order to which the value is known: the tail bound or the
    /// retained precision, whichever is smaller.
    pub fn resolution(&self) -> i64 {
        let e = self.coords.first().map_or(1, |c| c.context().e() as i64);
        self.coords.iter().map(|c| e * c.precision() as i64).fold(self.tail_valuation, i64::min)
    }

    /// Agreement with `other` to within the resolution of both.
    pub fn agrees_with(&self, other: &[PadicElement], other_resolution: i64) -> bool {
        let tol = self.resolution().min(other_resolution);
        self.coords.iter().zip(other).all(|(a, b)| match a.try_sub(b) {
            Ok(d) => d.valuation().at_least(tol),
            Err(_) => false,
        })
    }
}

impl MahlerInterpolation {
    pub fn context(&self) -> &Arc<PadicContext> {
        &self.ctx
    }

    pub fn center(&self) -> &[PadicElement] {
        &self.center
    }

    pub fn k_max(&self) -> usize {
        self.coeffs.first().map_or(0, |c| c.len())
    }

    pub fn l_an(&self) -> u32 {
        self.l_an
    }

    /// `b_{ik}`, `k ≥ 1`.
    pub fn coefficient(&self, i: usize, k: usize) -> &PadicElement {
        &self.coeffs[i][k - 1]
    }

    pub fn coefficients(&self) -> &[Vec<PadicElement>] {
        &self.coeffs
    }

    pub fn valuation_profile(&self) -> Vec<Vec<Valuation>> {
        self.coeffs.iter().map(|col| col.iter().map(|b| b.valuation()).collect()).collect()
    }

    /// `min_i v_r(b_{ik})`.
    pub fn min_valuation(&self, k: usize) -> Valuation {
        self.coeffs
            .iter()
            .map(|col| col[k - 1].valuation())
            .reduce(Valuation::min)
            .expect("at least one coordinate")
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().flatten().all(|b| b.is_zero())
    }

    /// `ceil((K_max + 2)/2)`.
    pub fn tail_bound(&self) -> i64 {
        coefficient_bound(self.k_max() + 1)
    }

    pub fn evaluate(&self, z: &PadicElement) -> Result<MahlerValue> {
        let binoms = (1..=self.k_max()).map(|k| binomial_eval(z, k as u64)).collect::<Result<Vec<_>>>()?;
        let coords = self
            .center
            .iter()
            .zip(&self.coeffs)
            .map(|(w, col)| {
                col.iter().zip(&binoms).try_fold(w.clone(), |acc, (b, c)| acc.try_add(&b.try_mul(c)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MahlerValue { coords, tail_valuation: self.tail_bound() })
    }
}

pub fn evaluate(interp: &MahlerInterpolation, z: &PadicElement) -> Result<MahlerValue> {
    interp.evaluate(z)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarginRow {
    pub k: usize,
    /// `None` when every `b_{ik}` vanishes to precision.
    pub margin: Option<String>,
    pub ck_margin: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lemma5Report {
    pub l: u32,
    pub margins: Vec<(usize, Option<BigRational>)>,
    pub ck_margins: Vec<(usize, Option<BigRational>)>,
    /// `1/(2e) + (p^l − 1)/((p − 1)p^l) − 1/(p − 1)`.
    pub guaranteed_slope: BigRational,
    pub nonnegative: bool,
    pub eventually_increasing: bool,
    pub certified: bool,
}

impl Lemma5Report {
    pub fn rows(&self) -> Vec<MarginRow> {
        self.margins
            .iter()
            .zip(&self.ck_margins)
            .map(|((k, m), (_, c))| MarginRow {
                k: *k,
                margin: m.as_ref().map(|x| x.to_string()),
                ck_margin: c.as_ref().map(|x| x.to_string()),
            })
            .collect()
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `k (p^l − 1)/((p − 1) p^l)`.
fn geometric_weight(k: usize, p: u64, l: u32) -> BigRational {
    let pl = BigInt::from(p).pow(l);
    BigRational::new(BigInt::from(k) * (&pl - 1), BigInt::from(p - 1) * pl)
}

/// `v_p(C_k) = −v_p(k!) + l + Σ_{i=1}^{l} floor((k−1)/p^i)`.
pub fn ck_valuation(k: usize, p: u64, l: u32) -> i64 {
    let mut v = l as i64 - factorial_valuation(k as u64, p) as i64;
    let mut pi = 1u128;
    for _ in 0..l {
        pi *= p as u128;
        v += ((k as u128 - 1) / pi) as i64;
    }
    v
}

pub fn guaranteed_slope(p: u64, e: u32, l: u32) -> BigRational {
    rat(1, 2 * e as i64) + geometric_weight(1, p, l) - rat(1, p as i64 - 1)
}

/// Margins of the convergence criterion on `p^l Z_p`, in units of `v_r`:
/// `μ_k = v_r(b_k) + e·k(p^l−1)/((p−1)p^l) − e·v_p(k!)`.
pub fn lemma5_certify(interp: &MahlerInterpolation, l: u32) -> Lemma5Report {
    let p = interp.ctx.p();
    let e = interp.ctx.e();
    let eb = BigRational::from_integer(BigInt::from(e));
    let mut margins = Vec::new();
    let mut ck_margins = Vec::new();
    for k in 1..=interp.k_max() {
        let v = match interp.min_valuation(k) {
            Valuation::Finite(v) => Some(BigRational::from_integer(BigInt::from(v))),
            Valuation::ZeroToPrecision(_) => None,
        };
        let fact = BigRational::from_integer(BigInt::from(factorial_valuation(k as u64, p)));
        let mu = v.clone().map(|v| v + &eb * geometric_weight(k, p, l) - &eb * &fact);
        let ck = v.map(|v| v + &eb * BigRational::from_integer(BigInt::from(ck_valuation(k, p, l))));
        margins.push((k, mu));
        ck_margins.push((k, ck));
    }
    let slope = guaranteed_slope(p, e, l);
    let nonnegative = margins.iter().all(|(_, m)| m.as_ref().is_none_or(|m| !m.is_negative()));
    let half = margins.len() / 2;
    let min_of = |rows: &[(usize, Option<BigRational>)]| -> Option<BigRational> {
        rows.iter().filter_map(|(_, m)| m.clone()).min()
    };
    let trend_up = match (min_of(&margins[..half]), min_of(&margins[half..])) {
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(a), Some(b)) => b > a,
    };
    let eventually_increasing = slope.is_positive() && trend_up;
    Lemma5Report {
        l,
        margins,
        ck_margins,
        certified: nonnegative && eventually_increasing,
        guaranteed_slope: slope,
        nonnegative,
        eventually_increasing,
    }
}

/// Smallest `s` with `Φ^s` analytic: `p^{l_an}`.
pub fn analytic_step(p: u64, l_an: u32) -> u128 {
    (p as u128).pow(l_an)
}
