//! Finite fields `F_p[x]/(m(x))` for small primes.
//!
//! These serve two roles: the residue field `O_p / r` of a p-adic context and
//! the extension fields `F_{p^m}` searched for periodic points.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::RingElem;

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod_p(a: u64, p: u64) -> Option<u64> {
    if a.is_multiple_of(p) {
        return None;
    }
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    Some(t.rem_euclid(p as i128) as u64)
}

/// Dense univariate polynomials over `F_p`, lowest degree first.
pub mod unipoly {
    use super::{inv_mod_p, mulmod};

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn degree(a: &[u64]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
            }
        }
        trim(out)
    }

    /// Remainder of `a` modulo a nonzero `m`.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let dm = degree(m).expect("division by zero polynomial");
        let lead_inv = inv_mod_p(m[dm], p).expect("leading coefficient is a unit");
        while let Some(da) = degree(&a) {
            if da < dm {
                break;
            }
            let factor = mulmod(a[da], lead_inv, p);
            let shift = da - dm;
            for (i, &c) in m.iter().enumerate().take(dm + 1) {
                let t = mulmod(factor, c, p);
                a[i + shift] = (a[i + shift] + p - t) % p;
            }
            a = trim(a);
        }
        a
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// `base^exp mod m`.
    pub fn powmod(base: &[u64], mut exp: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, m, p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), m, p);
            }
            exp >>= 1;
            if exp > 0 {
                b = rem(&mul(&b, &b, p), m, p);
            }
        }
        acc
    }

    /// Rabin's irreducibility test for a polynomial of degree >= 1.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let f = trim(f.iter().map(|c| c % p).collect());
        let Some(d) = degree(&f) else { return false };
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        // x^(p^d) == x mod f
        let mut xp = x.clone();
        for _ in 0..d {
            xp = powmod(&xp, p as u128, &f, p);
        }
        if !rem(&sub(&xp, &x, p), &f, p).is_empty() {
            return false;
        }
        // gcd(x^(p^(d/q)) - x, f) == 1 for each prime q | d
        let mut primes = Vec::new();
        let mut n = d;
        let mut q = 2;
        while q * q <= n {
            if n % q == 0 {
                primes.push(q);
                while n % q == 0 {
                    n /= q;
                }
            }
            q += 1;
        }
        if n > 1 {
            primes.push(n);
        }
        for q in primes {
            let mut xp = x.clone();
            for _ in 0..(d / q) {
                xp = powmod(&xp, p as u128, &f, p);
            }
            let g = gcd(&sub(&xp, &x, p), &f, p);
            if degree(&g) != Some(0) {
                return false;
            }
        }
        true
    }

    /// The monic irreducible polynomial of degree `m` over `F_p` that comes
    /// first when the coefficients below the leading one are read as a
    /// base-`p` number with the constant term least significant.
    pub fn first_irreducible(p: u64, m: u32) -> Vec<u64> {
        if m == 1 {
            return vec![0, 1];
        }
        let count = (p as u128).pow(m);
        for idx in 0..count {
            let mut poly = vec![0u64; m as usize + 1];
            let mut rest = idx;
            for slot in poly.iter_mut().take(m as usize) {
                *slot = (rest % p as u128) as u64;
                rest /= p as u128;
            }
            poly[m as usize] = 1;
            if is_irreducible(&poly, p) {
                return poly;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }
}

/// The field `F_p[x]/(modulus)`, `modulus` monic irreducible of degree `degree`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteField {
    p: u64,
    degree: u32,
    modulus: Vec<u64>,
}

impl FiniteField {
    pub fn new(p: u64, modulus: Vec<u64>) -> Result<Arc<Self>> {
        let modulus = unipoly::trim(modulus.into_iter().map(|c| c % p).collect());
        let degree = unipoly::degree(&modulus)
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::InvalidContext("field modulus must have degree >= 1".into()))?;
        if modulus[degree] != 1 {
            return Err(Error::InvalidContext("field modulus must be monic".into()));
        }
        if !unipoly::is_irreducible(&modulus, p) {
            return Err(Error::InvalidContext(format!("modulus {modulus:?} is reducible mod {p}")));
        }
        Ok(Arc::new(FiniteField { p, degree: degree as u32, modulus }))
    }

    /// `F_{p^m}` built on [`unipoly::first_irreducible`].
    pub fn standard(p: u64, m: u32) -> Arc<Self> {
        Self::new(p, unipoly::first_irreducible(p, m)).expect("standard modulus is irreducible")
    }

    pub fn prime_field(p: u64) -> Arc<Self> {
        Self::standard(p, 1)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.degree)
    }

    pub fn zero(self: &Arc<Self>) -> FfElem {
        FfElem { field: self.clone(), coeffs: vec![0; self.degree as usize] }
    }

    pub fn one(self: &Arc<Self>) -> FfElem {
        self.from_int(1)
    }

    pub fn from_int(self: &Arc<Self>, n: i64) -> FfElem {
        let mut c = vec![0; self.degree as usize];
        c[0] = n.rem_euclid(self.p as i64) as u64;
        FfElem { field: self.clone(), coeffs: c }
    }

    /// Element with the given coordinates on the power basis `1, x, …`.
    pub fn element(self: &Arc<Self>, coeffs: &[u64]) -> FfElem {
        let mut c = vec![0; self.degree as usize];
        for (i, v) in coeffs.iter().enumerate() {
            if i < c.len() {
                c[i] = v % self.p;
            } else {
                // reduce higher powers through the modulus
                let mut mono = vec![0u64; i + 1];
                mono[i] = v % self.p;
                let r = unipoly::rem(&mono, &self.modulus, self.p);
                for (j, x) in r.iter().enumerate() {
                    c[j] = (c[j] + x) % self.p;
                }
            }
        }
        FfElem { field: self.clone(), coeffs: c }
    }

    /// Element number `index` in enumeration order: base-`p` digits of the
    /// index are the coordinates, constant coordinate most significant.
    pub fn from_index(self: &Arc<Self>, mut index: u128) -> FfElem {
        let d = self.degree as usize;
        let mut c = vec![0u64; d];
        for slot in (0..d).rev() {
            c[slot] = (index % self.p as u128) as u64;
            index /= self.p as u128;
        }
        FfElem { field: self.clone(), coeffs: c }
    }

    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = FfElem> + '_ {
        (0..self.order()).map(move |i| self.from_index(i))
    }
}

/// Element of a [`FiniteField`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FfElem {
    field: Arc<FiniteField>,
    coeffs: Vec<u64>,
}

impl FfElem {
    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn index(&self) -> u128 {
        self.coeffs.iter().fold(0u128, |acc, &c| acc * self.field.p as u128 + c as u128)
    }

    pub fn neg(&self) -> FfElem {
        let p = self.field.p;
        FfElem { field: self.field.clone(), coeffs: self.coeffs.iter().map(|&c| (p - c) % p).collect() }
    }

    pub fn inv(&self) -> Option<FfElem> {
        if self.is_zero() {
            return None;
        }
        Some(self.pow((self.field.order() - 2) as u64))
    }

    /// `x ↦ x^(p^j)`.
    pub fn frobenius(&self, j: u32) -> FfElem {
        let mut x = self.clone();
        for _ in 0..j {
            x = x.pow(self.field.p);
        }
        x
    }

    /// Degree of the smallest subfield `F_{p^j}` containing the element,
    /// i.e. the length of its orbit under `x ↦ x^p`.
    pub fn frobenius_orbit_length(&self, base_exp: u32) -> u32 {
        let mut j = 1;
        let mut x = self.pow_u128((self.field.p as u128).pow(base_exp));
        while x != *self {
            x = x.pow_u128((self.field.p as u128).pow(base_exp));
            j += 1;
        }
        j
    }

    fn pow_u128(&self, mut exp: u128) -> FfElem {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }

    fn check(&self, other: &FfElem) {
        assert!(Arc::ptr_eq(&self.field, &other.field) || self.field == other.field, "finite field mismatch");
    }
}

impl RingElem for FfElem {
    fn zero_like(&self) -> Self {
        self.field.zero()
    }

    fn one_like(&self) -> Self {
        self.field.one()
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.check(other);
        let p = self.field.p;
        FfElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + b) % p).collect(),
        }
    }

    fn sub_ref(&self, other: &Self) -> Self {
        self.check(other);
        let p = self.field.p;
        FfElem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a + p - b) % p).collect(),
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self.check(other);
        let p = self.field.p;
        let prod = unipoly::mul(&self.coeffs, &other.coeffs, p);
        let r = unipoly::rem(&prod, &self.field.modulus, p);
        let mut coeffs = vec![0u64; self.field.degree as usize];
        coeffs[..r.len()].copy_from_slice(&r);
        FfElem { field: self.field.clone(), coeffs }
    }
}

impl fmt::Debug for FfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FfElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree == 1 {
            return write!(f, "{}", self.coeffs[0]);
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "a".to_string(),
                (1, c) => format!("{c}*a"),
                (i, 1) => format!("a^{i}"),
                (i, c) => format!("{c}*a^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Solves nothing fancy: determinant of a square matrix over a finite field
/// by Gaussian elimination.
pub fn determinant(mut m: Vec<Vec<FfElem>>, field: &Arc<FiniteField>) -> FfElem {
    let n = m.len();
    let mut det = field.one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return field.zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = det.neg();
        }
        let inv = m[col][col].inv().expect("pivot is nonzero");
        det = det.mul_ref(&m[col][col]);
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].mul_ref(&inv);
            let (top, bottom) = m.split_at_mut(r);
            for (x, y) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x = x.sub_ref(&factor.mul_ref(y));
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_irreducibles() {
        assert_eq!(unipoly::first_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(unipoly::first_irreducible(5, 2), vec![2, 0, 1]);
        assert!(unipoly::is_irreducible(&[1, 1, 0, 1], 2));
        assert!(!unipoly::is_irreducible(&[1, 0, 1], 5));
    }

    #[test]
    fn field_inverse_and_frobenius() {
        let f9 = FiniteField::standard(3, 2);
        for x in f9.elements().filter(|x| !x.is_zero()) {
            assert_eq!(x.mul_ref(&x.inv().unwrap()), f9.one());
            assert_eq!(x.frobenius(2), x);
        }
        let alpha = f9.element(&[0, 1]);
        assert_eq!(alpha.frobenius_orbit_length(1), 2);
        assert_eq!(f9.from_int(2).frobenius_orbit_length(1), 1);
    }

    #[test]
    fn index_round_trip() {
        let f25 = FiniteField::standard(5, 2);
        for i in 0..25 {
            assert_eq!(f25.from_index(i).index(), i);
        }
    }
}
