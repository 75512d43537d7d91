//! Exact arithmetic in `K = Q(β)`, `β` a root of a monic integer polynomial
//! that is irreducible modulo some prime (hence over `Q`).
//!
//! Witness points and iterates are computed here so that `f^N(ω) ≠ ω` is an
//! exact statement rather than a statement about truncated p-adic digits.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicElement};
use crate::ring::RingElem;
use crate::series::parse_rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NumberField {
    /// Monic defining polynomial, lowest degree first.
    modulus: Vec<BigInt>,
}

impl NumberField {
    pub fn new(modulus: Vec<BigInt>) -> Result<Arc<Self>> {
        if modulus.len() < 2 || !modulus.last().is_some_and(|c| c.is_one()) {
            return Err(Error::InvalidContext("number field modulus must be monic of degree >= 1".into()));
        }
        Ok(Arc::new(NumberField { modulus }))
    }

    pub fn rationals() -> Arc<Self> {
        Arc::new(NumberField { modulus: vec![BigInt::zero(), BigInt::one()] })
    }

    /// The global field whose completion is the unramified layer of `ctx`.
    pub fn for_context(ctx: &PadicContext) -> Arc<Self> {
        Arc::new(NumberField { modulus: ctx.unram_poly().to_vec() })
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    pub fn zero(self: &Arc<Self>) -> NfElement {
        NfElement { field: self.clone(), coeffs: vec![BigRational::zero(); self.degree()] }
    }

    pub fn from_rational(self: &Arc<Self>, q: BigRational) -> NfElement {
        let mut x = self.zero();
        x.coeffs[0] = q;
        x
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> NfElement {
        self.from_rational(BigRational::from_integer(n.into()))
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<BigRational>) -> Result<NfElement> {
        if coeffs.len() > self.degree() {
            return Err(Error::DimensionMismatch { expected: self.degree(), got: coeffs.len() });
        }
        let mut c = coeffs;
        c.resize(self.degree(), BigRational::zero());
        Ok(NfElement { field: self.clone(), coeffs: c })
    }

    /// Parses `c0;c1;…` (coefficients on `1, β, …`), each a rational.
    pub fn parse_element(self: &Arc<Self>, text: &str) -> Result<NfElement> {
        let coeffs = text.split(';').map(parse_rational).collect::<Result<Vec<_>>>()?;
        self.element(coeffs)
    }
}

/// Element `Σ c_i β^i` of a [`NumberField`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NfElement {
    field: Arc<NumberField>,
    coeffs: Vec<BigRational>,
}

impl NfElement {
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        let p = BigInt::from(p);
        self.coeffs.iter().all(|c| !(c.denom() % &p).is_zero())
    }

    /// Image in `O_p` for a context whose unramified polynomial is the
    /// field's modulus.
    pub fn to_padic(&self, ctx: &Arc<PadicContext>) -> Result<PadicElement> {
        if ctx.unram_poly() != self.field.modulus.as_slice() {
            return Err(Error::ContextMismatch);
        }
        let d = self.field.degree();
        let mut acc = PadicElement::zero(ctx);
        let beta = PadicElement::beta(ctx);
        let mut power = PadicElement::one(ctx);
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc.try_add(&PadicElement::from_rational(ctx, c)?.try_mul(&power)?)?;
            }
            if i + 1 < d {
                power = power.try_mul(&beta)?;
            }
        }
        Ok(acc)
    }

    /// Total bit length of all numerators and denominators.
    pub fn height_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.numer().bits() + c.denom().bits()).sum()
    }

    pub fn inverse(&self) -> Option<NfElement> {
        if self.is_zero() {
            return None;
        }
        let d = self.field.degree();
        if d == 1 {
            return Some(NfElement { field: self.field.clone(), coeffs: vec![self.coeffs[0].recip()] });
        }
        // extended Euclid in Q[x]: s·a + t·m = g, g a nonzero constant
        let m: Vec<BigRational> = self.field.modulus.iter().cloned().map(BigRational::from_integer).collect();
        let (g, s) = ext_gcd(trim(self.coeffs.clone()), trim(m));
        if g.len() != 1 {
            return None;
        }
        let inv_g = g[0].recip();
        let mut coeffs: Vec<BigRational> = s.into_iter().map(|c| c * &inv_g).collect();
        coeffs.resize(d, BigRational::zero());
        Some(NfElement { field: self.field.clone(), coeffs })
    }

    pub fn to_text(&self) -> String {
        self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";")
    }

    fn check(&self, other: &Self) {
        assert!(Arc::ptr_eq(&self.field, &other.field) || self.field == other.field, "number field mismatch");
    }
}

fn trim(mut a: Vec<BigRational>) -> Vec<BigRational> {
    while a.last().is_some_and(|c| c.is_zero()) {
        a.pop();
    }
    a
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    let lead = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let f = &r[dr] / &lead;
        for (i, c) in b.iter().enumerate() {
            let t = &f * c;
            r[dr - db + i] -= t;
        }
        q[dr - db] = f;
        r = trim(r);
        if r.len() <= db {
            break;
        }
    }
    (q, r)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z)).collect())
}

/// Returns `(g, s)` with `s·a ≡ g (mod m)`.
fn ext_gcd(a: Vec<BigRational>, m: Vec<BigRational>) -> (Vec<BigRational>, Vec<BigRational>) {
    let (mut r0, mut r1) = (m, a);
    let (mut s0, mut s1) = (Vec::new(), vec![BigRational::one()]);
    while !r1.is_empty() {
        let (q, r) = poly_divrem(&r0, &r1);
        let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    (r0, s0)
}

impl RingElem for NfElement {
    fn zero_like(&self) -> Self {
        self.field.zero()
    }
    fn one_like(&self) -> Self {
        self.field.from_int(1)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.check(other);
        NfElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.check(other);
        NfElement {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.check(other);
        let d = self.field.degree();
        if d == 1 {
            return NfElement { field: self.field.clone(), coeffs: vec![&self.coeffs[0] * &other.coeffs[0]] };
        }
        let mut prod = vec![BigRational::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                prod[i + j] += a * b;
            }
        }
        let m = &self.field.modulus;
        for k in (d..2 * d - 1).rev() {
            let top = std::mem::replace(&mut prod[k], BigRational::zero());
            if top.is_zero() {
                continue;
            }
            for (j, c) in m[..d].iter().enumerate() {
                prod[k - d + j] -= &top * BigRational::from_integer(c.clone());
            }
        }
        prod.truncate(d);
        NfElement { field: self.field.clone(), coeffs: prod }
    }
}

impl fmt::Display for NfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => c.to_string(),
                1 => format!("({c})*b"),
                _ => format!("({c})*b^{i}"),
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl fmt::Debug for NfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Sign-insensitive size of a rational, for growth diagnostics.
pub fn rational_bits(q: &BigRational) -> u64 {
    q.numer().abs().bits() + q.denom().bits()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_in_quadratic_field() {
        // Q(sqrt(-2))
        let k = NumberField::new(vec![BigInt::from(2), BigInt::zero(), BigInt::one()]).unwrap();
        let x = k.parse_element("3;1/2").unwrap();
        let y = x.inverse().unwrap();
        assert_eq!(x.mul_ref(&y), k.from_int(1));
        let beta = k.parse_element("0;1").unwrap();
        assert_eq!(beta.mul_ref(&beta), k.from_int(-2));
    }

    #[test]
    fn padic_image_respects_products() {
        let ctx = PadicContext::unramified(5, 2, 12).unwrap();
        let k = NumberField::for_context(&ctx);
        let x = k.parse_element("3;1/2").unwrap();
        let y = k.parse_element("-1;7").unwrap();
        let lhs = x.mul_ref(&y).to_padic(&ctx).unwrap();
        let rhs = x.to_padic(&ctx).unwrap().mul_ref(&y.to_padic(&ctx).unwrap());
        assert!(lhs.congruent(&rhs));
    }

    #[test]
    fn rationals_field() {
        let q = NumberField::rationals();
        let x = q.parse_element("-4/6").unwrap();
        assert_eq!(x.to_text(), "-2/3");
        assert_eq!(x.inverse().unwrap().to_text(), "-3/2");
    }
}
