//! Rational self-maps of affine `n`-space with exact rational coefficients.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numfield::NfElement;
use crate::padic::PadicElement;
use crate::ring::{cofactor_determinant, RingElem};
use crate::series::{poly_eval, MultiPoly};

/// `num / den` in `n` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl RationalFunction {
    pub fn new(num: MultiPoly, den: MultiPoly) -> Result<Self> {
        if num.nvars() != den.nvars() {
            return Err(Error::DimensionMismatch { expected: num.nvars(), got: den.nvars() });
        }
        if den.is_zero() {
            return Err(Error::Parse("denominator is the zero polynomial".into()));
        }
        Ok(RationalFunction { num, den })
    }

    pub fn polynomial(num: MultiPoly) -> Self {
        let den = MultiPoly::one(num.nvars());
        RationalFunction { num, den }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den == MultiPoly::one(self.den.nvars())
    }

    /// Numerator of `∂/∂x_j (num/den)`, whose denominator is `den²`.
    pub fn derivative_numerator(&self, j: usize) -> MultiPoly {
        self.num.derivative(j).mul(&self.den).sub(&self.num.mul(&self.den.derivative(j)))
    }

    pub fn eval_padic(&self, point: &[PadicElement]) -> Result<PadicElement> {
        let d = poly_eval(&self.den, point)?;
        if !d.is_unit() {
            return Err(Error::IndeterminacyAdjacent);
        }
        poly_eval(&self.num, point)?.try_mul(&d.invert()?)
    }

    pub fn eval_exact(&self, point: &[NfElement]) -> Result<NfElement> {
        let field = match point.first() {
            Some(x) => x.field().clone(),
            None => return Err(Error::DimensionMismatch { expected: self.num.nvars(), got: 0 }),
        };
        let one = field.from_int(1);
        let lift = |c: &BigRational| Ok(field.from_rational(c.clone()));
        let d = self.den.eval_with(point, &one, lift)?;
        let inv = d.inverse().ok_or(Error::IndeterminacyAdjacent)?;
        Ok(self.num.eval_with(point, &one, lift)?.mul_ref(&inv))
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// The map `x ↦ (f_1(x), …, f_n(x))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalSelfMap {
    n: usize,
    components: Vec<RationalFunction>,
}

impl RationalSelfMap {
    pub fn new(components: Vec<RationalFunction>) -> Result<Self> {
        let n = components.len();
        if n == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for c in &components {
            if c.num.nvars() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.num.nvars() });
            }
        }
        Ok(RationalSelfMap { n, components })
    }

    /// Parses numerators and (optionally empty) denominators written in the
    /// canonical polynomial text form.
    pub fn parse<S: AsRef<str>>(n: usize, numerators: &[S], denominators: &[S]) -> Result<Self> {
        if numerators.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: numerators.len() });
        }
        if !denominators.is_empty() && denominators.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: denominators.len() });
        }
        let mut comps = Vec::with_capacity(n);
        for (i, num) in numerators.iter().enumerate() {
            let num = MultiPoly::parse(n, num.as_ref())?;
            let den = match denominators.get(i) {
                Some(d) => MultiPoly::parse(n, d.as_ref())?,
                None => MultiPoly::one(n),
            };
            comps.push(RationalFunction::new(num, den)?);
        }
        Self::new(comps)
    }

    pub fn identity(n: usize) -> Self {
        let components = (0..n).map(|i| RationalFunction::polynomial(MultiPoly::var(n, i))).collect();
        RationalSelfMap { n, components }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.components
    }

    pub fn eval_padic(&self, point: &[PadicElement]) -> Result<Vec<PadicElement>> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.len() });
        }
        self.components.iter().map(|c| c.eval_padic(point)).collect()
    }

    pub fn iterate_padic(&self, point: &[PadicElement], times: u128) -> Result<Vec<PadicElement>> {
        let mut x = point.to_vec();
        for _ in 0..times {
            x = self.eval_padic(&x)?;
        }
        Ok(x)
    }

    pub fn eval_exact(&self, point: &[NfElement]) -> Result<Vec<NfElement>> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: point.len() });
        }
        self.components.iter().map(|c| c.eval_exact(point)).collect()
    }

    /// `J_ij = ∂_j f_i · den_i²` as polynomials.
    pub fn jacobian_numerators(&self) -> Vec<Vec<MultiPoly>> {
        self.components.iter().map(|c| (0..self.n).map(|j| c.derivative_numerator(j)).collect()).collect()
    }

    /// Numerator of the Jacobian determinant; the denominator is
    /// `∏ den_i²`.
    pub fn jacobian_determinant_numerator(&self) -> MultiPoly {
        cofactor_determinant(&self.jacobian_numerators(), &MultiPoly::one(self.n))
    }

    /// Nonvanishing Jacobian determinant, which over characteristic zero
    /// is equivalent to dominance.
    pub fn is_dominant(&self) -> bool {
        !self.jacobian_determinant_numerator().is_zero()
    }

    pub fn is_p_integral(&self, p: u64) -> bool {
        self.components.iter().all(|c| c.num.is_p_integral(p) && c.den.is_p_integral(p))
    }

    pub fn numerator_texts(&self) -> Vec<String> {
        self.components.iter().map(|c| c.num.to_string()).collect()
    }

    pub fn denominator_texts(&self) -> Vec<String> {
        self.components.iter().map(|c| c.den.to_string()).collect()
    }

    /// Canonical text, one `num | den` line per component.
    pub fn canonical_text(&self) -> String {
        let mut s = format!("n={}\n", self.n);
        for c in &self.components {
            s.push_str(&format!("{} | {}\n", c.num, c.den));
        }
        s
    }

    pub fn hash_hex(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_text().as_bytes()))
    }

    /// All coefficients of all numerators and denominators.
    pub fn coefficients(&self) -> impl Iterator<Item = &BigRational> {
        self.components
            .iter()
            .flat_map(|c| c.num.terms().chain(c.den.terms()).map(|(_, q)| q))
            .filter(|q| !q.is_zero())
    }
}

impl fmt::Display for RationalSelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}
