use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::context::PadicContext;
use super::finite_field::FfElem;
use crate::error::{Error, Result};
use crate::ring::RingElem;

/// r-adic valuation of an element known to finite precision.
///
/// `ZeroToPrecision(b)` means every retained digit vanishes, so the true
/// valuation is at least `b`; nothing more can be said.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    ZeroToPrecision(i64),
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::ZeroToPrecision(_) => None,
        }
    }

    pub fn is_zero_to_precision(self) -> bool {
        matches!(self, Valuation::ZeroToPrecision(_))
    }

    /// Whether the value is consistent with `v_r >= bound`. An element that
    /// is zero to precision is consistent with every bound.
    pub fn at_least(self, bound: i64) -> bool {
        match self {
            Valuation::Finite(v) => v >= bound,
            Valuation::ZeroToPrecision(_) => true,
        }
    }

    /// Lower bound that is actually known: the value itself, or the
    /// precision bound for a zero.
    pub fn known_lower_bound(self) -> i64 {
        match self {
            Valuation::Finite(v) | Valuation::ZeroToPrecision(v) => v,
        }
    }

    pub fn min(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a.min(b)),
            (Valuation::Finite(a), Valuation::ZeroToPrecision(_))
            | (Valuation::ZeroToPrecision(_), Valuation::Finite(a)) => Valuation::Finite(a),
            (Valuation::ZeroToPrecision(a), Valuation::ZeroToPrecision(b)) => {
                Valuation::ZeroToPrecision(a.min(b))
            }
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.partial_cmp(b),
            (Valuation::Finite(_), Valuation::ZeroToPrecision(_)) => Some(Ordering::Less),
            (Valuation::ZeroToPrecision(_), Valuation::Finite(_)) => Some(Ordering::Greater),
            (Valuation::ZeroToPrecision(_), Valuation::ZeroToPrecision(_)) => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::ZeroToPrecision(b) => write!(f, "inf(>={b})"),
        }
    }
}

/// Element of `O_p`, stored as `d·e` integers modulo `p^prec` on the basis
/// `β^i ρ^j` (coordinate index `j·d + i`).
///
/// `prec` is the number of p-adic digits known on every coordinate. It never
/// exceeds the context precision and only decreases through operations that
/// genuinely lose information (division by the uniformizer, binomials).
#[derive(Clone)]
pub struct PadicElement {
    ctx: Arc<PadicContext>,
    coords: Vec<BigInt>,
    prec: u32,
}

impl PadicElement {
    fn from_coords(ctx: &Arc<PadicContext>, mut coords: Vec<BigInt>, prec: u32) -> Self {
        let m = ctx.p_pow(prec);
        for c in coords.iter_mut() {
            *c = c.mod_floor(m);
        }
        PadicElement { ctx: ctx.clone(), coords, prec }
    }

    pub fn zero(ctx: &Arc<PadicContext>) -> Self {
        PadicElement { ctx: ctx.clone(), coords: vec![BigInt::zero(); ctx.rank()], prec: ctx.precision() }
    }

    pub fn one(ctx: &Arc<PadicContext>) -> Self {
        Self::from_int(ctx, 1)
    }

    pub fn from_int(ctx: &Arc<PadicContext>, n: i64) -> Self {
        Self::from_bigint(ctx, &BigInt::from(n))
    }

    pub fn from_bigint(ctx: &Arc<PadicContext>, n: &BigInt) -> Self {
        let mut coords = vec![BigInt::zero(); ctx.rank()];
        coords[0] = n.clone();
        Self::from_coords(ctx, coords, ctx.precision())
    }

    /// Embeds a p-integral rational number.
    pub fn from_rational(ctx: &Arc<PadicContext>, q: &BigRational) -> Result<Self> {
        let den = q.denom();
        if !ctx.coeff_is_unit_mod_p(den) {
            return Err(Error::BadReduction(format!("{q} is not {}-integral", ctx.p())));
        }
        let m = ctx.p_pow(ctx.precision());
        let inv = mod_inverse(den, m).expect("denominator is a unit");
        Ok(Self::from_bigint(ctx, &(q.numer() * inv)))
    }

    /// Element with explicit coordinates on the `β^i ρ^j` basis.
    pub fn from_basis(ctx: &Arc<PadicContext>, coords: &[BigInt]) -> Result<Self> {
        if coords.len() != ctx.rank() {
            return Err(Error::DimensionMismatch { expected: ctx.rank(), got: coords.len() });
        }
        Ok(Self::from_coords(ctx, coords.to_vec(), ctx.precision()))
    }

    pub fn from_basis_with_precision(ctx: &Arc<PadicContext>, coords: &[BigInt], prec: u32) -> Result<Self> {
        if coords.len() != ctx.rank() {
            return Err(Error::DimensionMismatch { expected: ctx.rank(), got: coords.len() });
        }
        if prec > ctx.precision() {
            return Err(Error::InvalidContext(format!(
                "precision {prec} exceeds context precision {}",
                ctx.precision()
            )));
        }
        Ok(Self::from_coords(ctx, coords.to_vec(), prec))
    }

    /// The unramified generator `β`.
    pub fn beta(ctx: &Arc<PadicContext>) -> Self {
        let mut coords = vec![BigInt::zero(); ctx.rank()];
        if ctx.d() > 1 {
            coords[1] = BigInt::one();
        } else {
            // x - c with c = -unram_poly[0]
            coords[0] = -ctx.unram_poly()[0].clone();
        }
        Self::from_coords(ctx, coords, ctx.precision())
    }

    /// The uniformizer `r`: `ρ` for a ramified tower, `p` otherwise.
    pub fn uniformizer(ctx: &Arc<PadicContext>) -> Self {
        if ctx.e() == 1 {
            return Self::from_bigint(ctx, ctx.p_big());
        }
        let mut coords = vec![BigInt::zero(); ctx.rank()];
        coords[ctx.d() as usize] = BigInt::one();
        Self::from_coords(ctx, coords, ctx.precision())
    }

    /// Lifts a residue-field element coordinatewise to integers in `[0, p)`.
    pub fn naive_lift(ctx: &Arc<PadicContext>, x: &FfElem) -> Result<Self> {
        check_residue(ctx, x)?;
        let mut coords = vec![BigInt::zero(); ctx.rank()];
        for (i, c) in x.coeffs().iter().enumerate() {
            coords[i] = BigInt::from(*c);
        }
        Ok(Self::from_coords(ctx, coords, ctx.precision()))
    }

    /// The Teichmüller representative: the unique `(q-1)`-th root of unity
    /// (or zero) reducing to `x`.
    pub fn teichmuller(ctx: &Arc<PadicContext>, x: &FfElem) -> Result<Self> {
        let mut y = Self::naive_lift(ctx, x)?;
        if x.is_zero() {
            return Ok(y);
        }
        let q = ctx.q();
        let q64: u64 = q.try_into().map_err(|_| Error::InvalidContext("residue field too large".into()))?;
        for _ in 0..ctx.precision() {
            let next = y.pow(q64);
            if next == y {
                break;
            }
            y = next;
        }
        Ok(y)
    }

    pub fn context(&self) -> &Arc<PadicContext> {
        &self.ctx
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Forgets digits beyond `prec`.
    pub fn truncate(&self, prec: u32) -> Self {
        Self::from_coords(&self.ctx, self.coords.clone(), prec.min(self.prec))
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if self.ctx.same_as(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(Self::from_coords(&self.ctx, coords, self.prec.min(other.prec)))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        Ok(Self::from_coords(&self.ctx, coords, self.prec.min(other.prec)))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let d = self.ctx.d() as usize;
        let e = self.ctx.e() as usize;
        let prec = self.prec.min(other.prec);
        let modulus = self.ctx.p_pow(prec);
        let layer = |x: &Self, j: usize| x.coords[j * d..(j + 1) * d].to_vec();

        // product in R[ρ] before reducing by the Eisenstein relation
        let mut acc: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); d]; 2 * e - 1];
        for a in 0..e {
            let xa = layer(self, a);
            if xa.iter().all(|c| c.is_zero()) {
                continue;
            }
            for b in 0..e {
                let yb = layer(other, b);
                let prod = self.unram_mul(&xa, &yb, modulus);
                for (slot, v) in acc[a + b].iter_mut().zip(prod) {
                    *slot += v;
                }
            }
        }
        // ρ^e = -Σ_{j<e} a_j ρ^j
        let eis = self.ctx.eis_poly();
        if e > 1 {
            for k in (e..2 * e - 1).rev() {
                let top = std::mem::replace(&mut acc[k], vec![BigInt::zero(); d]);
                if top.iter().all(|c| c.is_zero()) {
                    continue;
                }
                for (j, a_j) in eis[..e].iter().enumerate() {
                    if a_j.is_zero() {
                        continue;
                    }
                    for (slot, t) in acc[k - e + j].iter_mut().zip(&top) {
                        *slot -= a_j * t;
                        *slot = slot.mod_floor(modulus);
                    }
                }
            }
        }
        let coords = acc.into_iter().take(e).flatten().collect();
        Ok(Self::from_coords(&self.ctx, coords, prec))
    }

    fn unram_mul(&self, x: &[BigInt], y: &[BigInt], modulus: &BigInt) -> Vec<BigInt> {
        let d = x.len();
        if d == 1 {
            return vec![(&x[0] * &y[0]).mod_floor(modulus)];
        }
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        let poly = self.ctx.unram_poly();
        for k in (d..2 * d - 1).rev() {
            let top = std::mem::take(&mut prod[k]);
            if top.is_zero() {
                continue;
            }
            for (j, c) in poly[..d].iter().enumerate() {
                prod[k - d + j] -= c * &top;
            }
        }
        prod.truncate(d);
        prod.into_iter().map(|c| c.mod_floor(modulus)).collect()
    }

    pub fn valuation(&self) -> Valuation {
        let d = self.ctx.d() as usize;
        let e = self.ctx.e() as i64;
        let p = self.ctx.p_big();
        let mut best: Option<i64> = None;
        for (j, layer) in self.coords.chunks(d).enumerate() {
            for c in layer {
                if c.is_zero() {
                    continue;
                }
                let v = e * v_p_nonzero(c, p) as i64 + j as i64;
                best = Some(best.map_or(v, |b: i64| b.min(v)));
            }
        }
        match best {
            Some(v) => Valuation::Finite(v),
            None => Valuation::ZeroToPrecision(e * self.prec as i64),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Image in the residue field `O_p / r`.
    pub fn residue(&self) -> FfElem {
        let d = self.ctx.d() as usize;
        let p = self.ctx.p_big();
        let c: Vec<u64> = self.coords[..d]
            .iter()
            .map(|c| c.mod_floor(p).try_into().expect("residue digit fits u64"))
            .collect();
        self.ctx.residue_field().element(&c)
    }

    pub fn is_unit(&self) -> bool {
        !self.residue().is_zero()
    }

    /// Multiplicative inverse of a unit, by Newton iteration from the
    /// residue-field inverse.
    pub fn invert(&self) -> Result<Self> {
        let res = self.residue();
        let inv_res = res.inv().ok_or(Error::DivisionByNonUnit)?;
        let mut x = Self::naive_lift(&self.ctx, &inv_res)?.truncate(self.prec);
        let one = Self::one(&self.ctx).truncate(self.prec);
        let two = Self::from_int(&self.ctx, 2);
        for _ in 0..128 {
            let err = self.try_mul(&x)?.try_sub(&one)?;
            if err.is_zero() {
                return Ok(x);
            }
            x = x.try_mul(&two.try_sub(&self.try_mul(&x)?)?)?;
        }
        Err(Error::Inconsistency("Newton inversion failed to converge".into()))
    }

    /// Exact division by the uniformizer. Costs one p-adic digit.
    pub fn div_uniformizer(&self) -> Result<Self> {
        if !self.valuation().at_least(1) {
            return Err(Error::NotDivisibleByUniformizer);
        }
        if self.prec == 0 {
            return Err(Error::PrecisionExhausted("division by uniformizer".into()));
        }
        let ctx = &self.ctx;
        let d = ctx.d() as usize;
        let e = ctx.e() as usize;
        let p = ctx.p_big();
        let prec = self.prec - 1;
        if e == 1 {
            let coords = self.coords.iter().map(|c| c / p).collect();
            return Ok(Self::from_coords(ctx, coords, prec));
        }
        // x = c_0 + ρ·rest  and  1/ρ = -(ρ^{e-1} + a_{e-1}ρ^{e-2} + … + a_1)/a_0
        let mut coords = vec![BigInt::zero(); ctx.rank()];
        for j in 1..e {
            coords[(j - 1) * d..j * d].clone_from_slice(&self.coords[j * d..(j + 1) * d]);
        }
        let eis = ctx.eis_poly();
        let unit = &eis[0] / p;
        let m = ctx.p_pow(prec);
        let unit_inv = mod_inverse(&unit, m).expect("a_0/p is a unit");
        // c0 / a_0 = (c0 / p) · (a_0 / p)^{-1}
        let scaled: Vec<BigInt> = self.coords[..d].iter().map(|c| (c / p) * &unit_inv).collect();
        for j in 0..e {
            // coefficient of ρ^j in -(ρ^{e-1} + … + a_1) is -a_{j+1}
            let a = &eis[j + 1];
            if a.is_zero() {
                continue;
            }
            for i in 0..d {
                coords[j * d + i] -= a * &scaled[i];
            }
        }
        Ok(Self::from_coords(ctx, coords, prec))
    }

    /// Multiplication by the uniformizer. For `e = 1` this gains a digit.
    pub fn mul_uniformizer(&self) -> Self {
        let ctx = &self.ctx;
        if ctx.e() == 1 {
            let prec = (self.prec + 1).min(ctx.precision());
            let coords = self.coords.iter().map(|c| c * ctx.p_big()).collect();
            return Self::from_coords(ctx, coords, prec);
        }
        self.try_mul(&Self::uniformizer(ctx)).expect("same context")
    }

    /// Representative in `[0, p^prec)` when the element lies in `Z_p`.
    pub fn base_integer(&self) -> Result<BigInt> {
        if self.coords[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::NotInBaseRing);
        }
        Ok(self.coords[0].clone())
    }

    /// Coordinates written as decimal digit strings, for serialization.
    pub fn digit_strings(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.to_string()).collect()
    }

    /// Equality up to the smaller of the two precisions.
    pub fn congruent(&self, other: &Self) -> bool {
        match self.try_sub(other) {
            Ok(diff) => diff.is_zero(),
            Err(_) => false,
        }
    }
}

fn check_residue(ctx: &PadicContext, x: &FfElem) -> Result<()> {
    if **x.field() != **ctx.residue_field() {
        return Err(Error::ResidueFieldMismatch { point: x.field().degree(), context: ctx.d() });
    }
    Ok(())
}

fn v_p_nonzero(c: &BigInt, p: &BigInt) -> u32 {
    let mut x = c.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// Inverse of `a` modulo `m` for coprime arguments.
pub(crate) fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.abs().is_one() {
        return None;
    }
    let x = if g.gcd.is_negative() { -g.x } else { g.x };
    Some(x.mod_floor(m))
}

impl PartialEq for PadicElement {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.same_as(&other.ctx) && self.prec == other.prec && self.coords == other.coords
    }
}

impl Eq for PadicElement {}

impl fmt::Debug for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            write!(f, "{} + O(p^{})", self.coords[0], self.prec)
        } else {
            let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
            write!(f, "[{}] + O(p^{})", parts.join(", "), self.prec)
        }
    }
}

impl RingElem for PadicElement {
    fn zero_like(&self) -> Self {
        Self::zero(&self.ctx)
    }
    fn one_like(&self) -> Self {
        Self::one(&self.ctx)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.try_add(other).expect("context mismatch")
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.try_sub(other).expect("context mismatch")
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.try_mul(other).expect("context mismatch")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl<'a> $tr<&'a PadicElement> for &'a PadicElement {
            type Output = PadicElement;
            /// Panics on a context mismatch; use the `try_` form to handle it.
            fn $m(self, rhs: &'a PadicElement) -> PadicElement {
                self.$f(rhs).expect("context mismatch")
            }
        }
        impl $tr for PadicElement {
            type Output = PadicElement;
            fn $m(self, rhs: PadicElement) -> PadicElement {
                (&self).$f(&rhs).expect("context mismatch")
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &PadicElement {
    type Output = PadicElement;
    fn neg(self) -> PadicElement {
        let coords = self.coords.iter().map(|c| -c).collect();
        PadicElement::from_coords(&self.ctx, coords, self.prec)
    }
}
