//! Reduction of a self-map modulo `p` and exhaustive search of `F_{p^m}^n`
//! for periodic points whose whole cycle avoids the indeterminacy and
//! ramification loci.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::RationalSelfMap;
use crate::padic::{is_prime, FfElem, FiniteField};
use crate::ring::RingElem;
use crate::series::Monomial;

/// Polynomial with coefficients in `F_p`, evaluable over any `F_{p^m}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    n: usize,
    p: u64,
    terms: BTreeMap<Monomial, u64>,
}

impl FpPoly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &u64)> {
        self.terms.iter()
    }

    pub fn eval(&self, point: &[FfElem]) -> FfElem {
        let field = point[0].field();
        let mut acc = field.zero();
        for (m, &c) in &self.terms {
            let mut term = field.from_int(c as i64);
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    term = term.mul_ref(&x.pow(e as u64));
                }
            }
            acc = acc.add_ref(&term);
        }
        acc
    }
}

/// The reduction `f̄` of a self-map modulo `p`.
#[derive(Debug, Clone)]
pub struct ReducedMap {
    n: usize,
    p: u64,
    numerators: Vec<FpPoly>,
    denominators: Vec<FpPoly>,
    jacobian: Vec<Vec<FpPoly>>,
    jacobian_det: FpPoly,
}

fn reduce_poly(poly: &crate::series::MultiPoly, p: u64) -> Result<FpPoly> {
    let terms = poly
        .reduce_mod(p)
        .ok_or_else(|| Error::BadReduction(format!("a coefficient of {poly} is not {p}-integral")))?;
    Ok(FpPoly { n: poly.nvars(), p, terms })
}

/// Reduces `f` modulo `p`. The Jacobian entries are stored as the
/// numerators `∂_j num_i · den_i − num_i · ∂_j den_i`.
pub fn reduce_map(f: &RationalSelfMap, p: u64) -> Result<ReducedMap> {
    if !is_prime(p) {
        return Err(Error::InvalidContext(format!("{p} is not prime")));
    }
    let mut numerators = Vec::new();
    let mut denominators = Vec::new();
    for c in f.components() {
        numerators.push(reduce_poly(&c.num, p)?);
        let den = reduce_poly(&c.den, p)?;
        if den.is_zero() {
            return Err(Error::DenominatorVanishes(p));
        }
        denominators.push(den);
    }
    let jacobian = f
        .jacobian_numerators()
        .iter()
        .map(|row| row.iter().map(|e| reduce_poly(e, p)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let jacobian_det = reduce_poly(&f.jacobian_determinant_numerator(), p)?;
    if jacobian_det.is_zero() {
        return Err(Error::InseparableReduction(p));
    }
    Ok(ReducedMap { n: f.dim(), p, numerators, denominators, jacobian, jacobian_det })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocusStatus {
    Clear,
    Indeterminate,
    Ramified,
}

impl ReducedMap {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn numerators(&self) -> &[FpPoly] {
        &self.numerators
    }

    pub fn denominators(&self) -> &[FpPoly] {
        &self.denominators
    }

    pub fn jacobian(&self) -> &[Vec<FpPoly>] {
        &self.jacobian
    }

    /// `f̄(x)`, or `None` at a point of indeterminacy.
    pub fn apply(&self, point: &[FfElem]) -> Option<Vec<FfElem>> {
        self.numerators
            .iter()
            .zip(&self.denominators)
            .map(|(num, den)| Some(num.eval(point).mul_ref(&den.eval(point).inv()?)))
            .collect()
    }

    pub fn locus_check(&self, point: &[FfElem]) -> LocusStatus {
        if self.denominators.iter().any(|d| d.eval(point).is_zero()) {
            LocusStatus::Indeterminate
        } else if self.jacobian_det.eval(point).is_zero() {
            LocusStatus::Ramified
        } else {
            LocusStatus::Clear
        }
    }

    /// Coefficient set of the reduced map, as elements of `field`.
    pub fn coefficients_in(&self, field: &Arc<FiniteField>) -> Vec<FfElem> {
        self.numerators
            .iter()
            .chain(&self.denominators)
            .flat_map(|poly| poly.terms.values().map(|&c| field.from_int(c as i64)))
            .collect()
    }
}

/// A purely periodic point of `f̄` found by [`find_periodic_point`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicPointRecord {
    pub m: u32,
    pub field: Arc<FiniteField>,
    pub point: Vec<FfElem>,
    pub period: u64,
    pub orbit: Vec<Vec<FfElem>>,
    pub orbit_clear: bool,
    pub jacobian_invertible: bool,
}

impl PeriodicPointRecord {
    /// Recomputes the orbit and the locus status of each member.
    pub fn reverify(&self, fbar: &ReducedMap) -> bool {
        let mut x = self.point.clone();
        for (j, member) in self.orbit.iter().enumerate() {
            if *member != x || fbar.locus_check(&x) != LocusStatus::Clear {
                return false;
            }
            x = match fbar.apply(&x) {
                Some(y) => y,
                None => return false,
            };
            if j + 1 < self.orbit.len() && x == self.point {
                return false;
            }
        }
        x == self.point
    }
}

/// Search statistics, kept for tests of exhaustiveness.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Starting points taken from the enumeration, per extension degree.
    pub visited: Vec<(u32, u128)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Tail,
    Cycle { clear: bool },
}

/// Point-space size beyond which a degree is skipped.
pub const MAX_POINTS: u128 = 1 << 22;

pub fn point_from_index(field: &Arc<FiniteField>, n: usize, mut index: u128) -> Vec<FfElem> {
    let q = field.order();
    let mut coords = vec![field.zero(); n];
    for slot in (0..n).rev() {
        coords[slot] = field.from_index(index % q);
        index /= q;
    }
    coords
}

fn point_index(point: &[FfElem]) -> u128 {
    let q = point[0].field().order();
    point.iter().fold(0, |acc, x| acc * q + x.index())
}

/// Enumerates `F_{p^m}^n` for `m = 1..=m_max` in index order and returns
/// the first point lying on a cycle of `f̄` all of whose members are clear.
pub fn find_periodic_point(fbar: &ReducedMap, m_max: u32) -> Result<PeriodicPointRecord> {
    find_periodic_point_with_stats(fbar, m_max).0
}

pub fn find_periodic_point_with_stats(
    fbar: &ReducedMap,
    m_max: u32,
) -> (Result<PeriodicPointRecord>, SearchStats) {
    let mut stats = SearchStats::default();
    for m in 1..=m_max {
        let field = FiniteField::standard(fbar.p, m);
        let total = match field.order().checked_pow(fbar.n as u32) {
            Some(t) if t <= MAX_POINTS => t,
            _ => break,
        };
        let mut status: HashMap<u128, Status> = HashMap::new();
        let mut visited = 0u128;
        for start in 0..total {
            visited += 1;
            if !status.contains_key(&start) {
                classify_from(fbar, &field, start, &mut status);
            }
            if status[&start] == (Status::Cycle { clear: true }) {
                stats.visited.push((m, visited));
                let point = point_from_index(&field, fbar.n, start);
                let mut orbit = vec![point.clone()];
                let mut x = fbar.apply(&point).expect("cycle members are regular");
                while x != point {
                    orbit.push(x.clone());
                    x = fbar.apply(&x).expect("cycle members are regular");
                }
                let record = PeriodicPointRecord {
                    m,
                    field,
                    point,
                    period: orbit.len() as u64,
                    orbit,
                    orbit_clear: true,
                    jacobian_invertible: true,
                };
                return (Ok(record), stats);
            }
        }
        stats.visited.push((m, visited));
    }
    (Err(Error::NoPeriodicPoint(m_max)), stats)
}

// Walks the functional graph from `start` until reaching a classified point,
// a repeat within the walk, or a point of indeterminacy.
fn classify_from(
    fbar: &ReducedMap,
    field: &Arc<FiniteField>,
    start: u128,
    status: &mut HashMap<u128, Status>,
) {
    let mut path: Vec<(u128, LocusStatus)> = Vec::new();
    let mut pos: HashMap<u128, usize> = HashMap::new();
    let mut idx = start;
    let mut point = point_from_index(field, fbar.n, start);
    loop {
        if status.contains_key(&idx) {
            break;
        }
        if let Some(&i) = pos.get(&idx) {
            let clear = path[i..].iter().all(|(_, s)| *s == LocusStatus::Clear);
            for (j, _) in &path[i..] {
                status.insert(*j, Status::Cycle { clear });
            }
            break;
        }
        let locus = fbar.locus_check(&point);
        pos.insert(idx, path.len());
        path.push((idx, locus));
        match fbar.apply(&point) {
            Some(next) => {
                idx = point_index(&next);
                point = next;
            }
            None => break,
        }
    }
    for (j, _) in path {
        status.entry(j).or_insert(Status::Tail);
    }
}

/// Smallest `k` such that `φ_q^k`, `q = p^base_exp`, fixes every element.
pub fn frobenius_orbit_period(coefficients: &[FfElem], base_exp: u32) -> u32 {
    coefficients.iter().map(|c| c.frobenius_orbit_length(base_exp)).fold(1, num_integer::lcm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map1(num: &str, den: &str) -> RationalSelfMap {
        let dens: Vec<&str> = if den.is_empty() { vec![] } else { vec![den] };
        RationalSelfMap::parse(1, &[num], &dens).unwrap()
    }

    fn ints(v: &[FfElem]) -> Vec<u128> {
        v.iter().map(|x| x.index()).collect()
    }

    #[test]
    fn reduction_examples() {
        let r = reduce_map(&map1("x1^2 + 1", ""), 3).unwrap();
        assert_eq!(
            r.jacobian[0][0].terms().map(|(m, c)| (m.0.clone(), *c)).collect::<Vec<_>>(),
            vec![(vec![1], 2)]
        );
        assert!(matches!(reduce_map(&map1("1/3*x1", ""), 3), Err(Error::BadReduction(_))));
        assert_eq!(reduce_map(&map1("x1^3", ""), 3).unwrap_err(), Error::InseparableReduction(3));
        assert_eq!(reduce_map(&map1("x1", "3"), 3).unwrap_err(), Error::DenominatorVanishes(3));
    }

    #[test]
    fn locus_examples() {
        let f3 = FiniteField::prime_field(3);
        let r = reduce_map(&map1("x1^2 + 1", ""), 3).unwrap();
        assert_eq!(r.locus_check(&[f3.from_int(0)]), LocusStatus::Ramified);
        assert_eq!(r.locus_check(&[f3.from_int(2)]), LocusStatus::Clear);
        let inv = reduce_map(&map1("1", "x1"), 3).unwrap();
        assert_eq!(inv.locus_check(&[f3.from_int(0)]), LocusStatus::Indeterminate);
    }

    #[test]
    fn periodic_point_examples() {
        let r = reduce_map(&map1("x1^2 + 1", ""), 3).unwrap();
        let (rec, stats) = find_periodic_point_with_stats(&r, 1);
        let rec = rec.unwrap();
        assert_eq!((ints(&rec.point), rec.period), (vec![2], 1));
        assert_eq!(stats.visited, vec![(1, 3)]);
        assert!(rec.reverify(&r));

        let r = reduce_map(&map1("x1^2", ""), 5).unwrap();
        let rec = find_periodic_point(&r, 1).unwrap();
        assert_eq!((ints(&rec.point), rec.period), (vec![1], 1));

        let r = reduce_map(&map1("x1 + 1", ""), 3).unwrap();
        let rec = find_periodic_point(&r, 1).unwrap();
        assert_eq!((ints(&rec.point), rec.period), (vec![0], 3));
        assert_eq!(rec.orbit.iter().map(|x| ints(x)[0]).collect::<Vec<_>>(), vec![0, 1, 2]);
    }

    #[test]
    fn frobenius_periods() {
        let f9 = FiniteField::standard(3, 2);
        assert_eq!(frobenius_orbit_period(&[f9.from_int(2), f9.from_int(1)], 1), 1);
        assert_eq!(frobenius_orbit_period(&[f9.element(&[0, 1])], 1), 2);
        assert_eq!(frobenius_orbit_period(&[], 1), 1);
    }
}
