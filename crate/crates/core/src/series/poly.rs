use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ring::RingElem;

/// Exponent vector of a monomial.
///
/// Ordered by total degree first, then lexicographically, so iterating a
/// `BTreeMap<Monomial, _>` backwards yields the canonical printing order.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// All exponent vectors in `n` variables with total degree `<= cap`,
    /// in increasing monomial order.
    pub fn up_to_degree(n: usize, cap: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        fn rec(n: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if cur.len() == n {
                out.push(Monomial(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur.push(e);
                rec(n, left - e, cur, out);
                cur.pop();
            }
        }
        rec(n, cap, &mut Vec::new(), &mut out);
        out.sort();
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `n` variables with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    n: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    pub fn zero(n: usize) -> Self {
        MultiPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: BigRational) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial::one(n), c);
        p
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigRational::one())
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Monomial::var(n, i), BigRational::one());
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>) -> Self {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            assert_eq!(e.len(), n, "exponent length must equal variable count");
            p.add_term(Monomial(e), c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MultiPoly { n: self.n, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.n);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    /// Formal partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            out.add_term(m2, c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Whether every coefficient has nonnegative `p`-adic valuation.
    pub fn is_p_integral(&self, p: u64) -> bool {
        let p = BigInt::from(p);
        self.terms.values().all(|c| !(c.denom() % &p).is_zero())
    }

    /// Coefficients reduced into `F_p`; `None` if some coefficient is not
    /// `p`-integral.
    pub fn reduce_mod(&self, p: u64) -> Option<BTreeMap<Monomial, u64>> {
        let pb = BigInt::from(p);
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let den = c.denom() % &pb;
            if den.is_zero() {
                return None;
            }
            let den: u64 = ((den + &pb) % &pb).try_into().ok()?;
            let num: u64 = (((c.numer() % &pb) + &pb) % &pb).try_into().ok()?;
            let inv = pow_mod(den, p - 2, p);
            let v = ((num as u128 * inv as u128) % p as u128) as u64;
            if v != 0 {
                out.insert(m.clone(), v);
            }
        }
        Some(out)
    }

    /// Evaluates at a point in any ring, converting coefficients with `coeff`.
    pub fn eval_with<R: RingElem>(
        &self,
        point: &[R],
        one: &R,
        coeff: impl Fn(&BigRational) -> Result<R>,
    ) -> Result<R> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.len() });
        }
        let max_exp: Vec<u32> =
            (0..self.n).map(|i| self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0)).collect();
        let powers: Vec<Vec<R>> = point
            .iter()
            .zip(&max_exp)
            .map(|(x, &top)| {
                let mut v = vec![one.clone()];
                for k in 1..=top as usize {
                    let next = v[k - 1].mul_ref(x);
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = one.zero_like();
        for (m, c) in &self.terms {
            let mut term = coeff(c)?;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul_ref(&powers[i][e as usize]);
                }
            }
            acc = acc.add_ref(&term);
        }
        Ok(acc)
    }

    /// Evaluates at a rational point.
    pub fn eval_rational(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.len() });
        }
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                term *= num_traits::pow(x.clone(), e as usize);
            }
            acc += term;
        }
        Ok(acc)
    }

    /// Parses the canonical text form, e.g. `3*x1^2*x2 - 1/2`.
    pub fn parse(n: usize, text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut out = Self::zero(n);
        let mut start = 0;
        let bytes = s.as_bytes();
        let mut pieces = Vec::new();
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'*' | b'^' | b'/') {
                pieces.push(&s[start..i]);
                start = i;
            }
        }
        pieces.push(&s[start..]);
        for piece in pieces {
            let (sign, body) = match piece.as_bytes()[0] {
                b'+' => (1, &piece[1..]),
                b'-' => (-1, &piece[1..]),
                _ => (1, piece),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in `{text}`")));
            }
            let mut coeff = BigRational::from_integer(BigInt::from(sign));
            let mut mono = vec![0u32; n];
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in `{text}`")));
                }
                if let Some(rest) = factor.strip_prefix('x') {
                    let (idx, exp) = match rest.split_once('^') {
                        Some((i, e)) => (i, e.parse::<u32>().map_err(|_| bad(factor))?),
                        None => (rest, 1),
                    };
                    let idx: usize = idx.parse().map_err(|_| bad(factor))?;
                    if idx == 0 || idx > n {
                        return Err(Error::Parse(format!("variable x{idx} out of range for {n} variables")));
                    }
                    mono[idx - 1] += exp;
                } else {
                    coeff *= parse_rational(factor)?;
                }
            }
            out.add_term(Monomial(mono), coeff);
        }
        Ok(out)
    }
}

fn pow_mod(b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u128;
    let mut base = b as u128 % p as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

fn bad(factor: &str) -> Error {
    Error::Parse(format!("cannot parse factor `{factor}`"))
}

/// Parses `a` or `a/b` with integer `a`, nonzero integer `b`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num.trim()).map_err(|_| Error::Parse(format!("bad number `{s}`")))?;
    let den = BigInt::from_str(den.trim()).map_err(|_| Error::Parse(format!("bad number `{s}`")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(num, den))
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            let vars: Vec<String> =
                m.0.iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
                    .collect();
            if vars.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{a}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

impl RingElem for MultiPoly {
    fn zero_like(&self) -> Self {
        MultiPoly::zero(self.n)
    }
    fn one_like(&self) -> Self {
        MultiPoly::one(self.n)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn parse_and_print() {
        let p = MultiPoly::parse(2, "3*x1^2*x2 - 1/2").unwrap();
        assert_eq!(p.to_string(), "3*x1^2*x2 - 1/2");
        let p = MultiPoly::parse(1, "1 + x1^2").unwrap();
        assert_eq!(p.to_string(), "x1^2 + 1");
        let p = MultiPoly::parse(2, "-x2 + x1 - x1").unwrap();
        assert_eq!(p.to_string(), "-x2");
        assert_eq!(MultiPoly::parse(1, "0").unwrap().to_string(), "0");
        assert_eq!(MultiPoly::parse(2, "2*3/4*x1*x1").unwrap().to_string(), "3/2*x1^2");
        assert!(MultiPoly::parse(1, "x2").is_err());
        assert!(MultiPoly::parse(1, "x1 +").is_err());
        assert!(MultiPoly::parse(1, "1/0").is_err());
    }

    #[test]
    fn evaluation_and_derivative() {
        let p = MultiPoly::parse(1, "x1^2 + 1").unwrap();
        assert_eq!(p.eval_rational(&[q(2)]).unwrap(), q(5));
        assert_eq!(p.derivative(0).to_string(), "2*x1");
        let p = MultiPoly::parse(2, "x1^2*x2 + 3*x2").unwrap();
        assert_eq!(p.derivative(1).to_string(), "x1^2 + 3");
    }

    #[test]
    fn reduction_mod_p() {
        let p = MultiPoly::parse(1, "1/2*x1 + 3").unwrap();
        let r = p.reduce_mod(3).unwrap();
        assert_eq!(r.get(&Monomial(vec![1])), Some(&2));
        assert_eq!(r.get(&Monomial(vec![0])), None);
        assert!(MultiPoly::parse(1, "x1/3").is_err());
        assert!(MultiPoly::parse(1, "1/3*x1").unwrap().reduce_mod(3).is_none());
    }
}
