//! Good primes, lifting of a finite-field periodic point, and the
//! `f^k`-invariant residue disc around the lift with its normalized local
//! series `F(t) = r⁻¹ H(r t)`.

use std::ops::RangeInclusive;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_dynamics::{reduce_map, LocusStatus, PeriodicPointRecord, ReducedMap};
use crate::map::RationalSelfMap;
use crate::numfield::{NfElement, NumberField};
use crate::padic::{is_prime, FfElem, FiniteField, PadicContext, PadicElement};
use crate::ring::RingElem;
use crate::series::{expand_at, TruncatedSeries};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodPrimeReport {
    pub p: u64,
    pub e: u32,
    /// `p ≤ 2(e+1)`: analyticity is only available on a smaller disc.
    pub fallback: bool,
    pub rejections: Vec<(u64, String)>,
}

/// Why `p` is unusable for `f`, or `None` if it has good reduction.
pub fn reduction_defect(f: &RationalSelfMap, p: u64) -> Option<String> {
    if p == 2 {
        return Some("p must be odd".into());
    }
    if !is_prime(p) {
        return Some("not prime".into());
    }
    match reduce_map(f, p) {
        Ok(_) => None,
        Err(e) => Some(e.to_string()),
    }
}

/// Odd primes of good reduction in `range`, each with its fallback flag.
pub fn good_primes(f: &RationalSelfMap, range: RangeInclusive<u64>, e: u32) -> Vec<(u64, bool)> {
    range.filter(|&p| reduction_defect(f, p).is_none()).map(|p| (p, p <= 2 * (e as u64 + 1))).collect()
}

/// The smallest good prime with `p > 2(e+1)`, or failing that the smallest
/// good prime, flagged.
pub fn choose_good_prime(f: &RationalSelfMap, range: RangeInclusive<u64>, e: u32) -> Result<GoodPrimeReport> {
    if !f.is_dominant() {
        return Err(Error::NotDominant);
    }
    let threshold = 2 * (e as u64 + 1);
    let mut rejections = Vec::new();
    let mut first_fallback = None;
    for p in range.clone() {
        if p < 2 || !is_prime(p) {
            continue;
        }
        if let Some(reason) = reduction_defect(f, p) {
            rejections.push((p, reason));
            continue;
        }
        if p <= threshold {
            rejections.push((p, format!("p <= 2(e+1) = {threshold}; usable only with fallback")));
            first_fallback.get_or_insert(p);
            continue;
        }
        return Ok(GoodPrimeReport { p, e, fallback: false, rejections });
    }
    match first_fallback {
        Some(p) => {
            rejections.retain(|(q, _)| *q != p);
            Ok(GoodPrimeReport { p, e, fallback: true, rejections })
        }
        None => Err(Error::NoGoodPrime(*range.start(), *range.end())),
    }
}

/// Context whose residue field is `F_{p^d}`, ramified by `x^e − p` on top.
pub fn context_for(p: u64, d: u32, e: u32, precision: u32) -> Result<Arc<PadicContext>> {
    let base = PadicContext::unramified(p, d, precision)?;
    let mut eis = vec![BigInt::zero(); e as usize + 1];
    eis[0] = -BigInt::from(p);
    eis[e as usize] = BigInt::from(1);
    PadicContext::new(p, base.unram_poly().to_vec(), eis, precision)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LiftKind {
    #[default]
    Teichmuller,
    Naive,
}

/// Maps an element of `F_{p^m}` into the residue field of `ctx`.
pub fn embed_residue(x: &FfElem, ctx: &PadicContext) -> Result<FfElem> {
    let target = ctx.residue_field();
    let source = x.field();
    if source == target {
        return Ok(target.element(x.coeffs()));
    }
    let (m, d) = (source.degree(), target.degree());
    if source.characteristic() != target.characteristic() || d % m != 0 {
        return Err(Error::ResidueFieldMismatch { point: m, context: d });
    }
    let theta = image_of_generator(source, target)?;
    let mut acc = target.zero();
    let mut power = target.one();
    for &c in x.coeffs() {
        acc = acc.add_ref(&target.from_int(c as i64).mul_ref(&power));
        power = power.mul_ref(&theta);
    }
    Ok(acc)
}

// First root, in enumeration order, of the source modulus in the target.
fn image_of_generator(source: &FiniteField, target: &Arc<FiniteField>) -> Result<FfElem> {
    target
        .elements()
        .find(|z| {
            let mut acc = target.zero();
            for &c in source.modulus().iter().rev() {
                acc = acc.mul_ref(z).add_ref(&target.from_int(c as i64));
            }
            acc.is_zero()
        })
        .ok_or(Error::ResidueFieldMismatch { point: source.degree(), context: target.degree() })
}

/// Lifts each coordinate of the periodic point to `O_p`.
pub fn hensel_lift(
    record: &PeriodicPointRecord,
    ctx: &Arc<PadicContext>,
    kind: LiftKind,
) -> Result<Vec<PadicElement>> {
    record
        .point
        .iter()
        .map(|x| {
            let x = embed_residue(x, ctx)?;
            match kind {
                LiftKind::Teichmuller => PadicElement::teichmuller(ctx, &x),
                LiftKind::Naive => PadicElement::naive_lift(ctx, &x),
            }
        })
        .collect()
}

/// Global representative of the residue disc of `center`: coordinates in
/// `[0, p)` on the basis `1, β, …`.
pub fn naive_global_center(center: &[PadicElement], field: &Arc<NumberField>) -> Result<Vec<NfElement>> {
    center
        .iter()
        .map(|y| {
            let coeffs: Vec<num_rational::BigRational> = y
                .residue()
                .coeffs()
                .iter()
                .map(|&c| num_rational::BigRational::from_integer(BigInt::from(c)))
                .collect();
            field.element(coeffs)
        })
        .collect()
}

/// The disc `{x : x ≡ y mod r}` with the local data of `f^k` at `y`.
#[derive(Debug, Clone)]
pub struct PadicNeighborhood {
    ctx: Arc<PadicContext>,
    map: RationalSelfMap,
    reduced: ReducedMap,
    center: Vec<PadicElement>,
    orbit: Vec<Vec<PadicElement>>,
    period: u64,
    degree_cap: u32,
    h: Vec<TruncatedSeries>,
    f: Vec<TruncatedSeries>,
    l_ord: u128,
}

/// Expands `f^k` at `y`, normalizes and checks the result.
pub fn build_neighborhood(
    f: &RationalSelfMap,
    k: u64,
    y: &[PadicElement],
    ctx: &Arc<PadicContext>,
    cap: u32,
) -> Result<PadicNeighborhood> {
    let n = f.dim();
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: y.len() });
    }
    if k == 0 {
        return Err(Error::InvalidContext("period must be positive".into()));
    }
    let reduced = reduce_map(f, ctx.p())?;
    let mut orbit = vec![y.to_vec()];
    let ident: Vec<TruncatedSeries> = (0..n).map(|i| TruncatedSeries::var(ctx, n, cap, i)).collect();
    let mut g = ident;
    for j in 0..k as usize {
        let yj = orbit[j].clone();
        let residues: Vec<FfElem> = yj.iter().map(|c| c.residue()).collect();
        if reduced.locus_check(&residues) != LocusStatus::Clear {
            return Err(Error::OrbitNotClear(j));
        }
        let mut next = Vec::with_capacity(n);
        let mut h = Vec::with_capacity(n);
        for comp in f.components() {
            let s = expand_at(&comp.num, &comp.den, &yj, cap)?;
            next.push(s.constant_term());
            h.push(s.without_constant_term());
        }
        g = h.iter().map(|hi| hi.compose(&g)).collect::<Result<_>>()?;
        orbit.push(next);
    }
    let yk = orbit.pop().expect("orbit has k+1 entries");
    let mut h_series = Vec::with_capacity(n);
    for (i, gi) in g.into_iter().enumerate() {
        let shift = yk[i].try_sub(&y[i])?;
        if !shift.valuation().at_least(1) {
            return Err(Error::DivisibilityViolation { coord: i, index: vec![0; n] });
        }
        let c = TruncatedSeries::constant(ctx, n, cap, shift);
        h_series.push(gi.try_add(&c)?);
    }
    let r = PadicElement::uniformizer(ctx);
    let mut f_series = Vec::with_capacity(n);
    for (i, hi) in h_series.iter().enumerate() {
        let scaled = hi.rescale_argument(&r);
        let coeffs = scaled
            .terms()
            .map(|(m, c)| {
                c.div_uniformizer()
                    .map(|q| (m.0.clone(), q))
                    .map_err(|_| Error::DivisibilityViolation { coord: i, index: m.0.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        f_series.push(TruncatedSeries::from_coeffs(ctx, n, cap, coeffs));
    }
    let mut nb = PadicNeighborhood {
        ctx: ctx.clone(),
        map: f.clone(),
        reduced,
        center: y.to_vec(),
        orbit,
        period: k,
        degree_cap: cap,
        h: h_series,
        f: f_series,
        l_ord: 0,
    };
    nb.check_divisibility()?;
    nb.l_ord = reduced_affine_order(&nb)?;
    Ok(nb)
}

impl PadicNeighborhood {
    pub fn context(&self) -> &Arc<PadicContext> {
        &self.ctx
    }

    pub fn map(&self) -> &RationalSelfMap {
        &self.map
    }

    pub fn reduced_map(&self) -> &ReducedMap {
        &self.reduced
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[PadicElement] {
        &self.center
    }

    /// `y, f(y), …, f^{k−1}(y)`.
    pub fn orbit(&self) -> &[Vec<PadicElement>] {
        &self.orbit
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn degree_cap(&self) -> u32 {
        self.degree_cap
    }

    /// `H = f^k(y + t) − y`.
    pub fn h_series(&self) -> &[TruncatedSeries] {
        &self.h
    }

    /// `F(t) = r⁻¹ H(r t)`.
    pub fn f_series(&self) -> &[TruncatedSeries] {
        &self.f
    }

    pub fn l_ord(&self) -> u128 {
        self.l_ord
    }

    /// Checks `v_r(F_i[K]) ≥ |K| − 1` through the degree cap and that the
    /// constant terms of `H` are divisible by `r`.
    pub fn check_divisibility(&self) -> Result<()> {
        for (i, (h, f)) in self.h.iter().zip(&self.f).enumerate() {
            if !h.constant_term().valuation().at_least(1) {
                return Err(Error::DivisibilityViolation { coord: i, index: vec![0; self.dim()] });
            }
            for (m, c) in f.terms() {
                let need = (m.degree() as i64 - 1).max(0);
                if !c.valuation().at_least(need) {
                    return Err(Error::DivisibilityViolation { coord: i, index: m.0.clone() });
                }
            }
        }
        Ok(())
    }

    /// Whether every coordinate of `x` is congruent to the center mod `r`.
    pub fn membership(&self, x: &[PadicElement]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.center)
                .all(|(a, b)| a.try_sub(b).map(|d| d.valuation().at_least(1)).unwrap_or(false))
    }

    /// Membership of a point with exact coordinates; points that are not
    /// p-integral are never members.
    pub fn membership_exact(&self, x: &[NfElement]) -> bool {
        self.to_padic_point(x).map(|z| self.membership(&z)).unwrap_or(false)
    }

    pub fn to_padic_point(&self, x: &[NfElement]) -> Result<Vec<PadicElement>> {
        x.iter()
            .map(|c| {
                if !c.is_p_integral(self.ctx.p()) {
                    return Err(Error::BadReduction(format!("{c} is not {}-integral", self.ctx.p())));
                }
                c.to_padic(&self.ctx)
            })
            .collect()
    }

    /// Local coordinates `t = (x − y)/r` of a member.
    pub fn to_local(&self, x: &[PadicElement]) -> Result<Vec<PadicElement>> {
        x.iter().zip(&self.center).map(|(a, b)| a.try_sub(b)?.div_uniformizer()).collect()
    }

    /// `y + r t`.
    pub fn from_local(&self, t: &[PadicElement]) -> Result<Vec<PadicElement>> {
        t.iter().zip(&self.center).map(|(a, b)| b.try_add(&a.mul_uniformizer())).collect()
    }

    /// `f^k` in ambient coordinates.
    pub fn apply_fk(&self, x: &[PadicElement]) -> Result<Vec<PadicElement>> {
        self.map.iterate_padic(x, self.period as u128)
    }

    /// One application of the local series `F`, exact modulo `r^D`.
    pub fn apply_series(&self, t: &[PadicElement]) -> Result<Vec<PadicElement>> {
        self.f.iter().map(|fi| fi.eval(t)).collect()
    }

    /// Linear part `L` and constant `c` of `F mod r`.
    pub fn reduced_affine(&self) -> (Vec<Vec<FfElem>>, Vec<FfElem>) {
        let n = self.dim();
        let lin = self
            .f
            .iter()
            .map(|fi| {
                (0..n)
                    .map(|j| {
                        let mut e = vec![0u32; n];
                        e[j] = 1;
                        fi.coeff(&e).residue()
                    })
                    .collect()
            })
            .collect();
        let c = self.f.iter().map(|fi| fi.constant_term().residue()).collect();
        (lin, c)
    }

    /// Global points `ŷ + p·v` of the disc, `ŷ` the naive lift of the
    /// center's residue.
    pub fn global_point(&self, field: &Arc<NumberField>, offset: &[i64]) -> Result<Vec<NfElement>> {
        let base = naive_global_center(&self.center, field)?;
        let p = field.from_int(self.ctx.p() as i64);
        Ok(base.iter().zip(offset).map(|(b, &v)| b.add_ref(&p.mul_ref(&field.from_int(v)))).collect())
    }

    /// A global point within `r`-adic distance `≥ j` of the member `z`, for
    /// unramified contexts: `z` truncated to `j` digits.
    pub fn rational_approximation(&self, z: &[PadicElement], j: u32) -> Result<Vec<NfElement>> {
        if self.ctx.e() != 1 {
            return Err(Error::InvalidContext("global approximation needs e = 1".into()));
        }
        let field = NumberField::for_context(&self.ctx);
        let modulus = self.ctx.p_big().pow(j);
        z.iter()
            .map(|c| {
                let coeffs = c
                    .coords()
                    .iter()
                    .map(|x| num_rational::BigRational::from_integer(x.mod_floor(&modulus)))
                    .collect();
                field.element(coeffs)
            })
            .collect()
    }
}

pub fn affine_apply(lin: &[Vec<FfElem>], c: &[FfElem], z: &[FfElem]) -> Vec<FfElem> {
    lin.iter()
        .zip(c)
        .map(|(row, ci)| row.iter().zip(z).fold(ci.clone(), |acc, (a, b)| acc.add_ref(&a.mul_ref(b))))
        .collect()
}

/// `|AGL(n, q)| = q^n ∏_{i<n} (q^n − q^i)`, saturating.
pub fn affine_group_order(n: u32, q: u128) -> u128 {
    let qn = q.saturating_pow(n);
    (0..n).fold(qn, |acc, i| acc.saturating_mul(qn - q.pow(i)))
}

/// Order of the affine map `z ↦ L z + c` on `F_q^n`, by iterating the pair
/// `(L^j, Σ_{i<j} L^i c)` until it returns to `(I, 0)`.
pub fn reduced_affine_order(nbhd: &PadicNeighborhood) -> Result<u128> {
    let (lin, c) = nbhd.reduced_affine();
    let field = nbhd.ctx.residue_field().clone();
    affine_order(&lin, &c, &field)
}

pub fn affine_order(lin: &[Vec<FfElem>], c: &[FfElem], field: &Arc<FiniteField>) -> Result<u128> {
    let n = lin.len();
    if crate::padic::finite_field::determinant(lin.to_vec(), field).is_zero() {
        return Err(Error::SingularLinearPart);
    }
    let identity: Vec<Vec<FfElem>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect()).collect();
    let cap = affine_group_order(n as u32, field.order());
    let mut m = lin.to_vec();
    let mut v = c.to_vec();
    let mut j: u128 = 1;
    while !(m == identity && v.iter().all(|x| x.is_zero())) {
        if j >= cap {
            return Err(Error::OrderCapExceeded(cap));
        }
        m = mat_mul(lin, &m);
        v = affine_apply(lin, c, &v);
        j += 1;
    }
    Ok(j)
}

fn mat_mul(a: &[Vec<FfElem>], b: &[Vec<FfElem>]) -> Vec<Vec<FfElem>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(a[i][0].zero_like(), |acc, k| acc.add_ref(&a[i][k].mul_ref(&b[k][j]))))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_dynamics::find_periodic_point;

    fn map1(num: &str) -> RationalSelfMap {
        RationalSelfMap::parse(1, &[num], &[]).unwrap()
    }

    fn signed(c: &PadicElement) -> i64 {
        let v = c.base_integer().unwrap();
        let m = c.context().p_big().pow(c.precision());
        let v = if &v * 2 > m { v - m } else { v };
        v.try_into().unwrap()
    }

    fn series_ints(s: &TruncatedSeries) -> Vec<(u32, i64)> {
        s.terms().map(|(m, c)| (m.0[0], signed(c))).collect()
    }

    #[test]
    fn good_prime_examples() {
        let r = choose_good_prime(&map1("x1^2 + 1"), 3..=50, 1).unwrap();
        assert_eq!((r.p, r.fallback), (5, false));
        assert!(r.rejections.iter().any(|(p, why)| *p == 3 && why.contains("fallback")));
        let r = choose_good_prime(&map1("x1^2 + 1"), 3..=3, 1).unwrap();
        assert_eq!((r.p, r.fallback), (3, true));
        let r = choose_good_prime(&map1("1/6*x1"), 3..=50, 1).unwrap();
        assert!(r.rejections.iter().any(|(p, why)| *p == 3 && why.contains("integral")));
        assert_eq!(r.p, 5);
        assert_eq!(good_primes(&map1("x1^2"), 3..=10, 1), vec![(3, true), (5, false), (7, false)]);
        assert_eq!(choose_good_prime(&map1("4"), 3..=50, 1).unwrap_err(), Error::NotDominant);
    }

    #[test]
    fn lift_examples() {
        let ctx = PadicContext::prime(3, 20).unwrap();
        let f3 = FiniteField::prime_field(3);
        let rec = |x: i64| PeriodicPointRecord {
            m: 1,
            field: f3.clone(),
            point: vec![f3.from_int(x)],
            period: 1,
            orbit: vec![vec![f3.from_int(x)]],
            orbit_clear: true,
            jacobian_invertible: true,
        };
        assert!(hensel_lift(&rec(0), &ctx, LiftKind::Teichmuller).unwrap()[0].is_zero());
        assert_eq!(hensel_lift(&rec(2), &ctx, LiftKind::Naive).unwrap()[0], PadicElement::from_int(&ctx, 2));
        assert_eq!(
            hensel_lift(&rec(2), &ctx, LiftKind::Teichmuller).unwrap()[0],
            PadicElement::from_int(&ctx, -1)
        );
        let ctx5 = PadicContext::prime(5, 20).unwrap();
        assert!(matches!(
            hensel_lift(&rec(1), &ctx5, LiftKind::Naive),
            Err(Error::ResidueFieldMismatch { .. })
        ));
    }

    #[test]
    fn embedding_into_larger_field() {
        let ctx = PadicContext::unramified(3, 4, 8).unwrap();
        let f9 = FiniteField::standard(3, 2);
        let a = f9.element(&[1, 1]);
        let b = f9.element(&[2, 1]);
        let ea = embed_residue(&a, &ctx).unwrap();
        let eb = embed_residue(&b, &ctx).unwrap();
        assert_eq!(embed_residue(&a.mul_ref(&b), &ctx).unwrap(), ea.mul_ref(&eb));
        assert_eq!(embed_residue(&a.add_ref(&b), &ctx).unwrap(), ea.add_ref(&eb));
        let ctx3 = PadicContext::unramified(3, 3, 8).unwrap();
        assert!(embed_residue(&a, &ctx3).is_err());
    }

    #[test]
    fn square_plus_one_worked_example() {
        let ctx = PadicContext::prime(3, 20).unwrap();
        let f = map1("x1^2 + 1");
        let y = [PadicElement::from_int(&ctx, 2)];
        let nb = build_neighborhood(&f, 1, &y, &ctx, 4).unwrap();
        assert_eq!(series_ints(&nb.h_series()[0]), vec![(0, 3), (1, 4), (2, 1)]);
        assert_eq!(series_ints(&nb.f_series()[0]), vec![(0, 1), (1, 4), (2, 3)]);
        assert_eq!(nb.l_ord(), 3);
        assert!(nb.membership(&[PadicElement::from_int(&ctx, 5)]));
        assert!(!nb.membership(&[PadicElement::from_int(&ctx, 3)]));
        assert!(nb.membership(&y));
    }

    #[test]
    fn squaring_and_identity() {
        let ctx = PadicContext::prime(5, 20).unwrap();
        let y = [PadicElement::one(&ctx)];
        let nb = build_neighborhood(&map1("x1^2"), 1, &y, &ctx, 4).unwrap();
        assert_eq!(series_ints(&nb.h_series()[0]), vec![(1, 2), (2, 1)]);
        assert_eq!(series_ints(&nb.f_series()[0]), vec![(1, 2), (2, 5)]);
        assert_eq!(nb.l_ord(), 4);
        let id = RationalSelfMap::identity(1);
        let nb = build_neighborhood(&id, 1, &[PadicElement::from_int(&ctx, 3)], &ctx, 4).unwrap();
        assert_eq!(series_ints(&nb.f_series()[0]), vec![(1, 1)]);
        assert_eq!(nb.l_ord(), 1);
    }

    #[test]
    fn period_three_translation() {
        let ctx = PadicContext::prime(3, 20).unwrap();
        let f = map1("x1 + 1");
        let rec = find_periodic_point(&reduce_map(&f, 3).unwrap(), 1).unwrap();
        let y = hensel_lift(&rec, &ctx, LiftKind::Naive).unwrap();
        let nb = build_neighborhood(&f, rec.period, &y, &ctx, 3).unwrap();
        // f^3(t) = t + 3, so F(t) = t + 1
        assert_eq!(series_ints(&nb.f_series()[0]), vec![(0, 1), (1, 1)]);
        assert_eq!(nb.l_ord(), 3);
    }

    #[test]
    fn orbit_through_ramification_is_rejected() {
        let ctx = PadicContext::prime(3, 10).unwrap();
        let err = build_neighborhood(&map1("x1^2 + 1"), 1, &[PadicElement::zero(&ctx)], &ctx, 3);
        assert_eq!(err.unwrap_err(), Error::OrbitNotClear(0));
    }

    #[test]
    fn affine_group_orders() {
        assert_eq!(affine_group_order(1, 3), 6);
        assert_eq!(affine_group_order(2, 2), 24);
    }
}
