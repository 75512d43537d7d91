//! Minimal ring interface shared by every coefficient type that polynomials
//! get evaluated in: p-adic elements, truncated series, finite-field elements
//! and exact number-field elements.

pub trait RingElem: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_ref(&self, other: &Self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;

    fn pow(&self, mut exp: u64) -> Self {
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
}

/// Determinant by cofactor expansion along the first row. Meant for the
/// small symbolic matrices (Jacobians of maps in a handful of variables)
/// where no division is available.
pub fn cofactor_determinant<R: RingElem>(m: &[Vec<R>], one: &R) -> R {
    let n = m.len();
    match n {
        0 => one.clone(),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = one.zero_like();
            for col in 0..n {
                let minor: Vec<Vec<R>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect()
                    })
                    .collect();
                let term = m[0][col].mul_ref(&cofactor_determinant(&minor, one));
                acc = if col % 2 == 0 { acc.add_ref(&term) } else { acc.sub_ref(&term) };
            }
            acc
        }
    }
}
