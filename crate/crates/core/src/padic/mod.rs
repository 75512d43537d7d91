//! Exact arithmetic in `Z_p` and its unramified/Eisenstein extensions at a
//! fixed, explicitly tracked precision.

mod context;
mod element;
pub mod finite_field;

pub use context::{ContextParams, PadicContext, DEFAULT_PRECISION};
pub use element::{PadicElement, Valuation};
pub use finite_field::{FfElem, FiniteField};

pub(crate) use context::is_prime;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// `v_p(k!)` by Legendre's formula `(k - s_p(k)) / (p - 1)`.
pub fn factorial_valuation(k: u64, p: u64) -> u64 {
    let mut digit_sum = 0;
    let mut n = k;
    while n > 0 {
        digit_sum += n % p;
        n /= p;
    }
    (k - digit_sum) / (p - 1)
}

/// `floor(log_p k)` for `k >= 1`, zero for `k = 0`.
pub(crate) fn floor_log(k: u64, p: u64) -> u32 {
    let mut n = k;
    let mut l = 0;
    while n >= p {
        n /= p;
        l += 1;
    }
    l
}

/// Exact integer binomial coefficient `C(n, k)` for `n >= 0`.
pub fn integer_binomial(n: &BigInt, k: u64) -> BigInt {
    if k == 0 {
        return BigInt::one();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        let factor = n - BigInt::from(i);
        if factor.is_zero() {
            return BigInt::zero();
        }
        acc = acc * factor / BigInt::from(i + 1);
    }
    acc
}

/// `binom(z, k)` for `z` in the base ring `Z_p`.
///
/// Changing `z` by `p^N` moves `binom(z, k)` by at least `p^(N - floor(log_p k))`,
/// so the result carries that many fewer digits than `z`.
pub fn binomial_eval(z: &PadicElement, k: u64) -> Result<PadicElement> {
    let ctx = z.context();
    let rep = z.base_integer()?;
    let loss = floor_log(k, ctx.p());
    if loss >= z.precision() {
        return Err(Error::PrecisionExhausted(format!(
            "binomial of order {k} needs more than {} digits",
            z.precision()
        )));
    }
    let value = integer_binomial(&rep, k);
    Ok(PadicElement::from_bigint(ctx, &value).truncate(z.precision() - loss))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_sum(k: u64, p: u64) -> u64 {
        let mut total = 0;
        let mut pk = p;
        while pk <= k {
            total += k / pk;
            pk *= p;
        }
        total
    }

    #[test]
    fn factorial_valuation_examples() {
        assert_eq!(factorial_valuation(0, 3), 0);
        // 720 = 3^2 · 80
        assert_eq!(factorial_valuation(6, 3), 2);
        assert_eq!(factorial_valuation(25, 5), legendre_sum(25, 5));
        assert_eq!(factorial_valuation(25, 5), 6);
    }

    #[test]
    fn legendre_consistency() {
        for p in [3, 5, 7] {
            for k in 0..=10_000 {
                let v = factorial_valuation(k, p);
                assert_eq!(v, legendre_sum(k, p));
                if k > 0 {
                    assert!((v as f64) < k as f64 / (p - 1) as f64);
                }
            }
        }
    }

    #[test]
    fn binomials() {
        let ctx = PadicContext::prime(3, 20).unwrap();
        let z = PadicElement::from_int(&ctx, 9);
        assert_eq!(binomial_eval(&z, 2).unwrap().base_integer().unwrap(), BigInt::from(36));
        assert!(binomial_eval(&PadicElement::zero(&ctx), 4).unwrap().is_zero());
        assert_eq!(binomial_eval(&z, 0).unwrap(), PadicElement::one(&ctx));
        for m in 0..=30i64 {
            for k in 0..=m as u64 {
                let got = binomial_eval(&PadicElement::from_int(&ctx, m), k).unwrap();
                let mut pascal = BigInt::one();
                for i in 0..k {
                    pascal = pascal * BigInt::from(m - i as i64) / BigInt::from(i + 1);
                }
                assert!(got.congruent(&PadicElement::from_bigint(&ctx, &pascal)));
            }
        }
    }

    #[test]
    fn binomial_of_minus_one() {
        let ctx = PadicContext::prime(5, 20).unwrap();
        let m1 = PadicElement::from_int(&ctx, -1);
        for k in 0..12 {
            let expect = PadicElement::from_int(&ctx, if k % 2 == 0 { 1 } else { -1 });
            assert!(binomial_eval(&m1, k).unwrap().congruent(&expect));
        }
    }

    #[test]
    fn binomial_requires_base_ring() {
        let ctx = PadicContext::unramified(3, 2, 10).unwrap();
        let beta = PadicElement::beta(&ctx);
        assert_eq!(binomial_eval(&beta, 2), Err(Error::NotInBaseRing));
    }
}
