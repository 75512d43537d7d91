//! Exact multivariate polynomials over `Q` and truncated power series over
//! `O_p`.

mod poly;
mod truncated;

use std::sync::Arc;

pub use poly::{parse_rational, Monomial, MultiPoly};
pub use truncated::TruncatedSeries;

use crate::error::{Error, Result};
use crate::padic::{PadicContext, PadicElement};

/// Evaluates `poly` at a point of `O_p^n`. Every coefficient must be
/// p-integral.
pub fn poly_eval(poly: &MultiPoly, point: &[PadicElement]) -> Result<PadicElement> {
    let ctx = match point.first() {
        Some(x) => x.context().clone(),
        None => return Err(Error::DimensionMismatch { expected: poly.nvars(), got: 0 }),
    };
    poly.eval_with(point, &PadicElement::one(&ctx), |c| PadicElement::from_rational(&ctx, c))
}

/// Taylor expansion of `num/den` at `center`, in the shifted variables
/// `t = x − center`, through total degree `cap`.
pub fn expand_at(
    num: &MultiPoly,
    den: &MultiPoly,
    center: &[PadicElement],
    cap: u32,
) -> Result<TruncatedSeries> {
    let n = num.nvars();
    if center.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: center.len() });
    }
    if den.nvars() != n {
        return Err(Error::DimensionMismatch { expected: n, got: den.nvars() });
    }
    let ctx: Arc<PadicContext> = match center.first() {
        Some(c) => c.context().clone(),
        None => return Err(Error::DimensionMismatch { expected: 1, got: 0 }),
    };
    let shifted: Vec<TruncatedSeries> = center
        .iter()
        .enumerate()
        .map(|(i, c)| {
            TruncatedSeries::constant(&ctx, n, cap, c.clone()).try_add(&TruncatedSeries::var(&ctx, n, cap, i))
        })
        .collect::<Result<_>>()?;
    let one = TruncatedSeries::constant(&ctx, n, cap, PadicElement::one(&ctx));
    let lift = |c: &num_rational::BigRational| {
        Ok(TruncatedSeries::constant(&ctx, n, cap, PadicElement::from_rational(&ctx, c)?))
    };
    let top = num.eval_with(&shifted, &one, lift)?;
    let bottom = den.eval_with(&shifted, &one, lift)?;
    if !bottom.constant_term().is_unit() {
        return Err(Error::IndeterminacyAdjacent);
    }
    top.try_mul(&bottom.invert()?)
}
