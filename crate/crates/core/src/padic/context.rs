use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::finite_field::{unipoly, FiniteField};
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 64;

/// The ring `O_p = Z_p[β][ρ]`: an unramified extension of degree `d`
/// generated by a root `β` of `unram_poly`, followed by a totally ramified
/// layer of degree `e` generated by a root `ρ` of the Eisenstein polynomial
/// `eis_poly`.
///
/// The uniformizer is `ρ` when `e > 1` and `p` otherwise. Polynomials are
/// stored lowest degree first and are monic.
#[derive(Clone, PartialEq, Eq)]
pub struct PadicContext {
    p: u64,
    unram_poly: Vec<BigInt>,
    eis_poly: Vec<BigInt>,
    precision: u32,
    powers: Vec<BigInt>,
    residue: Arc<FiniteField>,
}

/// Serializable description of a context, as embedded in certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextParams {
    pub p: u64,
    pub unram_poly: Vec<String>,
    pub eis_poly: Vec<String>,
    pub precision: u32,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn v_p(x: &BigInt, p: &BigInt) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let mut x = x.clone();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        x = q;
        v += 1;
    }
}

impl PadicContext {
    pub fn new(p: u64, unram_poly: Vec<BigInt>, eis_poly: Vec<BigInt>, precision: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::InvalidContext(format!("{p} is not prime")));
        }
        if precision == 0 {
            return Err(Error::InvalidContext("precision must be positive".into()));
        }
        let pb = BigInt::from(p);
        let d = unram_poly
            .len()
            .checked_sub(1)
            .filter(|&d| d >= 1)
            .ok_or_else(|| Error::InvalidContext("unramified polynomial must have degree >= 1".into()))?;
        if !unram_poly[d].is_one() {
            return Err(Error::InvalidContext("unramified polynomial must be monic".into()));
        }
        let reduced: Vec<u64> =
            unram_poly.iter().map(|c| c.mod_floor(&pb).try_into().expect("residue fits u64")).collect();
        if !unipoly::is_irreducible(&reduced, p) {
            return Err(Error::InvalidContext(format!("unramified polynomial is reducible modulo {p}")));
        }
        let e = eis_poly
            .len()
            .checked_sub(1)
            .filter(|&e| e >= 1)
            .ok_or_else(|| Error::InvalidContext("Eisenstein polynomial must have degree >= 1".into()))?;
        if !eis_poly[e].is_one() {
            return Err(Error::InvalidContext("Eisenstein polynomial must be monic".into()));
        }
        for (j, a) in eis_poly[..e].iter().enumerate() {
            let v = v_p(a, &pb);
            let ok = if j == 0 { v == Some(1) } else { v.is_none_or(|v| v >= 1) };
            if !ok {
                return Err(Error::InvalidContext(format!(
                    "polynomial fails the Eisenstein criterion at coefficient {j}"
                )));
            }
        }
        let mut powers = Vec::with_capacity(precision as usize + 2);
        let mut acc = BigInt::one();
        for _ in 0..=precision + 1 {
            powers.push(acc.clone());
            acc *= &pb;
        }
        let residue = FiniteField::new(p, reduced)?;
        Ok(Arc::new(PadicContext { p, unram_poly, eis_poly, precision, powers, residue }))
    }

    /// `Z_p` itself.
    pub fn prime(p: u64, precision: u32) -> Result<Arc<Self>> {
        Self::new(p, vec![BigInt::zero(), BigInt::one()], vec![-BigInt::from(p), BigInt::one()], precision)
    }

    /// Unramified extension of degree `d` built on the standard modulus of
    /// [`FiniteField::standard`].
    pub fn unramified(p: u64, d: u32, precision: u32) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::InvalidContext(format!("{p} is not prime")));
        }
        let poly = unipoly::first_irreducible(p, d).into_iter().map(BigInt::from).collect();
        Self::new(p, poly, vec![-BigInt::from(p), BigInt::one()], precision)
    }

    /// Totally ramified extension `Z_p[ρ]`, `ρ^e = p`.
    pub fn ramified(p: u64, e: u32, precision: u32) -> Result<Arc<Self>> {
        let mut eis = vec![BigInt::zero(); e as usize + 1];
        eis[0] = -BigInt::from(p);
        eis[e as usize] = BigInt::one();
        Self::new(p, vec![BigInt::zero(), BigInt::one()], eis, precision)
    }

    pub fn from_params(params: &ContextParams) -> Result<Arc<Self>> {
        let parse = |v: &[String]| -> Result<Vec<BigInt>> {
            v.iter().map(|s| s.parse::<BigInt>().map_err(|e| Error::Parse(e.to_string()))).collect()
        };
        Self::new(params.p, parse(&params.unram_poly)?, parse(&params.eis_poly)?, params.precision)
    }

    pub fn params(&self) -> ContextParams {
        ContextParams {
            p: self.p,
            unram_poly: self.unram_poly.iter().map(|c| c.to_string()).collect(),
            eis_poly: self.eis_poly.iter().map(|c| c.to_string()).collect(),
            precision: self.precision,
        }
    }

    /// Same tower at a different precision.
    pub fn with_precision(&self, precision: u32) -> Result<Arc<Self>> {
        Self::new(self.p, self.unram_poly.clone(), self.eis_poly.clone(), precision)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn p_big(&self) -> &BigInt {
        &self.powers[1]
    }

    /// Residue degree.
    pub fn d(&self) -> u32 {
        (self.unram_poly.len() - 1) as u32
    }

    /// Ramification index.
    pub fn e(&self) -> u32 {
        (self.eis_poly.len() - 1) as u32
    }

    pub fn q(&self) -> u128 {
        (self.p as u128).pow(self.d())
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn unram_poly(&self) -> &[BigInt] {
        &self.unram_poly
    }

    pub fn eis_poly(&self) -> &[BigInt] {
        &self.eis_poly
    }

    pub fn residue_field(&self) -> &Arc<FiniteField> {
        &self.residue
    }

    /// Number of base-ring coordinates of an element, `d·e`.
    pub fn rank(&self) -> usize {
        (self.d() * self.e()) as usize
    }

    pub(crate) fn p_pow(&self, k: u32) -> &BigInt {
        &self.powers[k as usize]
    }

    pub fn same_as(&self, other: &PadicContext) -> bool {
        std::ptr::eq(self, other) || self == other
    }

    pub(crate) fn coeff_is_unit_mod_p(&self, c: &BigInt) -> bool {
        !c.mod_floor(self.p_big()).is_zero()
    }
}

impl fmt::Debug for PadicContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PadicContext")
            .field("p", &self.p)
            .field("d", &self.d())
            .field("e", &self.e())
            .field("precision", &self.precision)
            .finish()
    }
}
