use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicElement, Valuation};
use crate::ring::RingElem;

use super::poly::Monomial;

/// Power series in `n` variables over `O_p`, truncated above total degree
/// `cap`. Every stored coefficient lies in `O_p`.
#[derive(Clone)]
pub struct TruncatedSeries {
    ctx: Arc<PadicContext>,
    n: usize,
    cap: u32,
    coeffs: BTreeMap<Monomial, PadicElement>,
}

impl TruncatedSeries {
    pub fn zero(ctx: &Arc<PadicContext>, n: usize, cap: u32) -> Self {
        TruncatedSeries { ctx: ctx.clone(), n, cap, coeffs: BTreeMap::new() }
    }

    pub fn constant(ctx: &Arc<PadicContext>, n: usize, cap: u32, c: PadicElement) -> Self {
        let mut s = Self::zero(ctx, n, cap);
        s.set(Monomial::one(n), c);
        s
    }

    /// The coordinate function `t_i`.
    pub fn var(ctx: &Arc<PadicContext>, n: usize, cap: u32, i: usize) -> Self {
        let mut s = Self::zero(ctx, n, cap);
        if cap >= 1 {
            s.set(Monomial::var(n, i), PadicElement::one(ctx));
        }
        s
    }

    pub fn from_coeffs(
        ctx: &Arc<PadicContext>,
        n: usize,
        cap: u32,
        coeffs: impl IntoIterator<Item = (Vec<u32>, PadicElement)>,
    ) -> Self {
        let mut s = Self::zero(ctx, n, cap);
        for (e, c) in coeffs {
            s.accumulate(Monomial(e), c);
        }
        s
    }

    fn set(&mut self, m: Monomial, c: PadicElement) {
        if m.degree() > self.cap || c.is_zero() {
            self.coeffs.remove(&m);
        } else {
            self.coeffs.insert(m, c);
        }
    }

    fn accumulate(&mut self, m: Monomial, c: PadicElement) {
        if m.degree() > self.cap {
            return;
        }
        let next = match self.coeffs.get(&m) {
            Some(old) => old.add_ref(&c),
            None => c,
        };
        self.set(m, next);
    }

    pub fn context(&self) -> &Arc<PadicContext> {
        &self.ctx
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn degree_cap(&self) -> u32 {
        self.cap
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &PadicElement)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> PadicElement {
        self.coeffs.get(&Monomial(exps.to_vec())).cloned().unwrap_or_else(|| PadicElement::zero(&self.ctx))
    }

    pub fn constant_term(&self) -> PadicElement {
        self.coeff(&vec![0; self.n])
    }

    pub fn has_zero_constant_term(&self) -> bool {
        self.constant_term().is_zero()
    }

    pub fn without_constant_term(&self) -> Self {
        let mut s = self.clone();
        s.coeffs.remove(&Monomial::one(self.n));
        s
    }

    /// Same series with the cap lowered to `cap`.
    pub fn truncate(&self, cap: u32) -> Self {
        let mut s = Self::zero(&self.ctx, self.n, cap.min(self.cap));
        for (m, c) in &self.coeffs {
            s.set(m.clone(), c.clone());
        }
        s
    }

    pub fn scale(&self, c: &PadicElement) -> Self {
        let mut s = Self::zero(&self.ctx, self.n, self.cap);
        for (m, x) in &self.coeffs {
            s.set(m.clone(), x.mul_ref(c));
        }
        s
    }

    /// Minimum coefficient valuation over the monomials of total degree `deg`.
    pub fn min_valuation_in_degree(&self, deg: u32) -> Valuation {
        self.coeffs
            .iter()
            .filter(|(m, _)| m.degree() == deg)
            .map(|(_, c)| c.valuation())
            .fold(Valuation::ZeroToPrecision(i64::MAX), Valuation::min)
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.ctx.same_as(&other.ctx) {
            return Err(Error::ContextMismatch);
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        if self.cap != other.cap {
            return Err(Error::DegreeCapMismatch(self.cap as usize, other.cap as usize));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut s = self.clone();
        for (m, c) in &other.coeffs {
            s.accumulate(m.clone(), c.clone());
        }
        Ok(s)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut s = self.clone();
        for (m, c) in &other.coeffs {
            s.accumulate(m.clone(), -c);
        }
        Ok(s)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut s = Self::zero(&self.ctx, self.n, self.cap);
        for (m1, c1) in &self.coeffs {
            let d1 = m1.degree();
            for (m2, c2) in &other.coeffs {
                if d1 + m2.degree() > self.cap {
                    continue;
                }
                s.accumulate(m1.mul(m2), c1.mul_ref(c2));
            }
        }
        Ok(s)
    }

    /// Multiplicative inverse of a series whose constant term is a unit.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.constant_term();
        let c0_inv = c0.invert().map_err(|_| Error::IndeterminacyAdjacent)?;
        // self = c0 (1 + u), u without constant term
        let u = self.without_constant_term().scale(&c0_inv);
        let one = Self::constant(&self.ctx, self.n, self.cap, PadicElement::one(&self.ctx));
        let mut acc = one.clone();
        let mut term = one;
        let minus_u = u.scale(&PadicElement::from_int(&self.ctx, -1));
        for _ in 0..self.cap {
            term = term.try_mul(&minus_u)?;
            acc = acc.try_add(&term)?;
        }
        Ok(acc.scale(&c0_inv))
    }

    /// `self(inner_1, …, inner_n)`. Every inner series must have zero
    /// constant term, which keeps truncation at the common cap exact.
    pub fn compose(&self, inner: &[TruncatedSeries]) -> Result<Self> {
        if inner.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: inner.len() });
        }
        let m = inner.first().map_or(self.n, |s| s.n);
        for s in inner {
            if !s.ctx.same_as(&self.ctx) {
                return Err(Error::ContextMismatch);
            }
            if s.cap != self.cap {
                return Err(Error::DegreeCapMismatch(self.cap as usize, s.cap as usize));
            }
            if s.n != m {
                return Err(Error::DimensionMismatch { expected: m, got: s.n });
            }
            if !s.has_zero_constant_term() {
                return Err(Error::RecenteringRequired);
            }
        }
        let one = Self::constant(&self.ctx, m, self.cap, PadicElement::one(&self.ctx));
        let mut powers: Vec<Vec<TruncatedSeries>> = inner.iter().map(|_| vec![one.clone()]).collect();
        let mut out = Self::zero(&self.ctx, m, self.cap);
        for (mono, c) in &self.coeffs {
            let mut term = one.scale(c);
            for (i, &e) in mono.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().expect("nonempty").try_mul(&inner[i])?;
                    powers[i].push(next);
                }
                if e > 0 {
                    term = term.try_mul(&powers[i][e as usize])?;
                }
            }
            out = out.try_add(&term)?;
        }
        Ok(out)
    }

    /// Evaluates at a point of `O_p^n`. Exact only modulo the first omitted
    /// degree, i.e. the caller must account for the truncated tail.
    pub fn eval(&self, point: &[PadicElement]) -> Result<PadicElement> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.len() });
        }
        let mut acc = PadicElement::zero(&self.ctx);
        for (m, c) in &self.coeffs {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    term = term.try_mul(&x.pow(e as u64))?;
                }
            }
            acc = acc.try_add(&term)?;
        }
        Ok(acc)
    }

    /// `t ↦ self(s·t)`: multiplies the coefficient of `t^K` by `s^|K|`.
    pub fn rescale_argument(&self, s: &PadicElement) -> Self {
        let mut out = Self::zero(&self.ctx, self.n, self.cap);
        for (m, c) in &self.coeffs {
            out.set(m.clone(), c.mul_ref(&s.pow(m.degree() as u64)));
        }
        out
    }

    /// Checks equality of all coefficients up to their common precision.
    pub fn congruent(&self, other: &Self) -> bool {
        if self.check_compatible(other).is_err() {
            return false;
        }
        let keys: std::collections::BTreeSet<&Monomial> =
            self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.into_iter().all(|m| self.coeff(&m.0).congruent(&other.coeff(&m.0)))
    }
}

impl RingElem for TruncatedSeries {
    fn zero_like(&self) -> Self {
        Self::zero(&self.ctx, self.n, self.cap)
    }
    fn one_like(&self) -> Self {
        Self::constant(&self.ctx, self.n, self.cap, PadicElement::one(&self.ctx))
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.try_add(other).expect("incompatible series")
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.try_sub(other).expect("incompatible series")
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.try_mul(other).expect("incompatible series")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0 + O(deg {})", self.cap + 1);
        }
        let mut first = true;
        for (m, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let coeff = if c.coords().len() == 1 {
                c.coords()[0].to_string()
            } else {
                format!("({})", c.digit_strings().join(","))
            };
            let vars: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| if e == 1 { format!("t{}", i + 1) } else { format!("t{}^{e}", i + 1) })
                    .collect();
            if vars.is_empty() {
                write!(f, "{coeff}")?;
            } else {
                write!(f, "{coeff}*{}", vars.join("*"))?;
            }
        }
        write!(f, " + O(deg {})", self.cap + 1)
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(ctx: &Arc<PadicContext>, cap: u32, coeffs: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_coeffs(
            ctx,
            1,
            cap,
            coeffs.iter().enumerate().map(|(k, &c)| (vec![k as u32], PadicElement::from_int(ctx, c))),
        )
    }

    #[test]
    fn identity_outer() {
        let ctx = PadicContext::prime(5, 12).unwrap();
        let t = TruncatedSeries::var(&ctx, 1, 4, 0);
        let s = series(&ctx, 4, &[0, 3, 7, 1]);
        assert!(t.compose(std::slice::from_ref(&s)).unwrap().congruent(&s));
    }

    #[test]
    fn square_of_t_plus_t2() {
        let ctx = PadicContext::prime(5, 12).unwrap();
        let outer = series(&ctx, 3, &[0, 0, 1]);
        let inner = series(&ctx, 3, &[0, 1, 1]);
        let got = outer.compose(&[inner]).unwrap();
        assert!(got.congruent(&series(&ctx, 3, &[0, 0, 1, 2])));
    }

    #[test]
    fn nonzero_inner_constant_rejected() {
        let ctx = PadicContext::prime(5, 12).unwrap();
        let outer = series(&ctx, 3, &[0, 1]);
        let inner = series(&ctx, 3, &[1, 1]);
        assert_eq!(outer.compose(&[inner]).unwrap_err(), Error::RecenteringRequired);
    }

    #[test]
    fn geometric_inverse() {
        let ctx = PadicContext::prime(5, 12).unwrap();
        let s = series(&ctx, 5, &[1, 1]);
        let inv = s.invert().unwrap();
        assert!(inv.congruent(&series(&ctx, 5, &[1, -1, 1, -1, 1, -1])));
        assert!(series(&ctx, 5, &[5, 1]).invert().is_err());
    }
}
