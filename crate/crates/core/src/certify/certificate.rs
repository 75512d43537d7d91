//! Certificates that a point is not preperiodic, and their verifier.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::pipeline::{
    iterate_exact_bounded, period_bound, Evidence, IterateValue, PayloadKind, PipelineRun,
};
use crate::error::{Error, Result};
use crate::finite_dynamics::{reduce_map, LocusStatus, PeriodicPointRecord};
use crate::mahler::analyticity_exponent;
use crate::map::RationalSelfMap;
use crate::neighborhood::{build_neighborhood, hensel_lift, reduction_defect, LiftKind};
use crate::numfield::{NfElement, NumberField};
use crate::padic::{ContextParams, FiniteField, PadicContext, PadicElement, Valuation};

pub const FORMAT: &str = "padyn-certificate/1";
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapRecord {
    pub n: usize,
    pub numerators: Vec<String>,
    pub denominators: Vec<String>,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointRecord {
    /// Degree of `F_{p^m}` over `F_p`.
    pub m: u32,
    pub field_modulus: Vec<u64>,
    pub point: Vec<Vec<u64>>,
    pub period: u64,
    pub orbit: Vec<Vec<Vec<u64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeighborhoodRecord {
    pub lift: LiftKind,
    /// Coordinates of the lifted center on the basis `β^i ρ^j`.
    pub center: Vec<Vec<String>>,
    pub k: u64,
    pub l_ord: u64,
    pub degree_checked: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundRecord {
    pub k: u64,
    pub l_ord: u64,
    pub l_an: u32,
    /// `s = p^{l_an}`: `ψ = φ^s = f^N` is the iterate evaluated on `p^{l_an} Z_p`.
    pub s: u64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalText {
    pub num: String,
    pub den: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Payload {
    pub kind: PayloadKind,
    /// Exact: per coordinate, the rational coefficients on `1, β, …`.
    /// Residue: per coordinate, the `O_p` digits modulo `p^precision`.
    pub value: Vec<Vec<RationalText>>,
    pub differing_coordinate: usize,
    /// `v_r(f^N(ω)_i − ω_i)`, absent when zero to precision.
    pub difference_valuation: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub format: String,
    pub toolkit_version: String,
    pub map: MapRecord,
    pub context: ContextParams,
    pub fallback_prime: bool,
    pub periodic_point: PointRecord,
    pub neighborhood: NeighborhoodRecord,
    pub bound: BoundRecord,
    /// Witness coordinates, each `c0;c1;…` on the basis `1, β, …`.
    pub witness: Vec<String>,
    pub payload: Payload,
    pub exact_bits: u64,
    /// SHA-256 of the certificate serialized with this field empty.
    pub digest: String,
}

fn rational_text(q: &BigRational) -> RationalText {
    RationalText { num: q.numer().to_string(), den: q.denom().to_string() }
}

fn parse_rational_text(t: &RationalText) -> Result<BigRational> {
    let num: BigInt = t.num.parse().map_err(|_| Error::Parse(format!("bad numerator '{}'", t.num)))?;
    let den: BigInt = t.den.parse().map_err(|_| Error::Parse(format!("bad denominator '{}'", t.den)))?;
    if den == BigInt::from(0) {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(BigRational::new(num, den))
}

fn point_record(rec: &PeriodicPointRecord) -> PointRecord {
    let coords = |pt: &[crate::padic::FfElem]| pt.iter().map(|x| x.coeffs().to_vec()).collect::<Vec<_>>();
    PointRecord {
        m: rec.m,
        field_modulus: rec.field.modulus().to_vec(),
        point: coords(&rec.point),
        period: rec.period,
        orbit: rec.orbit.iter().map(|pt| coords(pt)).collect(),
    }
}

fn payload_of(evidence: &Evidence) -> Payload {
    let value = match &evidence.value {
        IterateValue::Exact(v) => v.iter().map(|c| c.coeffs().iter().map(rational_text).collect()).collect(),
        IterateValue::Residue(v) => v
            .iter()
            .map(|c| {
                c.coords().iter().map(|d| RationalText { num: d.to_string(), den: "1".into() }).collect()
            })
            .collect(),
    };
    Payload {
        kind: evidence.kind(),
        value,
        differing_coordinate: evidence.differing_coordinate,
        difference_valuation: evidence.difference_valuation.finite(),
    }
}

impl Certificate {
    pub fn assemble(run: &PipelineRun, omega: &[NfElement], evidence: &Evidence) -> Certificate {
        let mut cert = Certificate {
            format: FORMAT.into(),
            toolkit_version: TOOLKIT_VERSION.into(),
            map: MapRecord {
                n: run.map.dim(),
                numerators: run.map.numerator_texts(),
                denominators: run.map.denominator_texts(),
                sha256: run.map.hash_hex(),
            },
            context: run.ctx.params(),
            fallback_prime: run.prime.fallback,
            periodic_point: point_record(&run.record),
            neighborhood: NeighborhoodRecord {
                lift: run.config.lift,
                center: run.nbhd.center().iter().map(|c| c.digit_strings()).collect(),
                k: run.nbhd.period(),
                l_ord: run.bound.l_ord,
                degree_checked: run.nbhd.degree_cap(),
            },
            bound: BoundRecord {
                k: run.bound.k,
                l_ord: run.bound.l_ord,
                l_an: run.bound.l_an,
                s: run.bound.s,
                n: run.bound.n,
            },
            witness: omega.iter().map(|c| c.to_text()).collect(),
            payload: payload_of(evidence),
            exact_bits: run.config.exact_bits,
            digest: String::new(),
        };
        cert.digest = cert.compute_digest();
        cert
    }

    pub fn compute_digest(&self) -> String {
        let mut blank = self.clone();
        blank.digest = String::new();
        let bytes = serde_json::to_vec(&blank).expect("certificate serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn fail(stage: &str, reason: impl Into<String>) -> Error {
    Error::Verification { stage: stage.into(), reason: reason.into() }
}

/// Replays every step behind the certificate. On failure the error names
/// the first stage that did not reproduce; the digest is checked last so
/// that semantic stages report first.
pub fn verify_certificate(cert: &Certificate) -> Result<()> {
    if cert.format != FORMAT {
        return Err(fail("format", format!("unknown format '{}'", cert.format)));
    }

    // map
    let map = RationalSelfMap::parse(cert.map.n, &cert.map.numerators, &cert.map.denominators)
        .map_err(|e| fail("map", e.to_string()))?;
    if map.hash_hex() != cert.map.sha256 {
        return Err(fail("map", "hash does not match the map"));
    }

    // context and prime
    let ctx = PadicContext::from_params(&cert.context).map_err(|e| fail("context", e.to_string()))?;
    let p = ctx.p();
    if let Some(why) = reduction_defect(&map, p) {
        return Err(fail("prime", why));
    }
    if !map.is_dominant() {
        return Err(fail("prime", "map is not dominant"));
    }
    let expected_eis = {
        let mut v = vec!["0".to_string(); ctx.e() as usize + 1];
        v[0] = (-(p as i64)).to_string();
        v[ctx.e() as usize] = "1".into();
        v
    };
    if cert.context.eis_poly != expected_eis {
        return Err(fail("context", "ramified layer is not x^e - p"));
    }
    if cert.fallback_prime != (p <= 2 * (ctx.e() as u64 + 1)) {
        return Err(fail("prime", "fallback flag does not match p and e"));
    }

    // periodic point
    let pp = &cert.periodic_point;
    let field =
        FiniteField::new(p, pp.field_modulus.clone()).map_err(|e| fail("periodic-point", e.to_string()))?;
    if field.degree() != pp.m || ctx.d() % pp.m != 0 {
        return Err(fail("periodic-point", "field degree does not fit the context"));
    }
    let to_point = |coords: &Vec<Vec<u64>>| -> Result<Vec<crate::padic::FfElem>> {
        if coords.len() != map.dim()
            || coords.iter().any(|c| c.len() != pp.m as usize || c.iter().any(|&x| x >= p))
        {
            return Err(fail("periodic-point", "malformed point"));
        }
        Ok(coords.iter().map(|c| field.element(c)).collect())
    };
    let record = PeriodicPointRecord {
        m: pp.m,
        field: field.clone(),
        point: to_point(&pp.point)?,
        period: pp.period,
        orbit: pp.orbit.iter().map(to_point).collect::<Result<_>>()?,
        orbit_clear: true,
        jacobian_invertible: true,
    };
    let reduced = reduce_map(&map, p).map_err(|e| fail("periodic-point", e.to_string()))?;
    if record.orbit.len() as u64 != record.period || !record.reverify(&reduced) {
        return Err(fail("periodic-point", "point is not periodic with a clear orbit of the stated period"));
    }
    if record.orbit.iter().any(|x| reduced.locus_check(x) != LocusStatus::Clear) {
        return Err(fail("periodic-point", "orbit meets the indeterminacy or ramification locus"));
    }

    // neighborhood
    let nb = &cert.neighborhood;
    if nb.k != pp.period {
        return Err(fail("neighborhood", "period differs from the periodic point"));
    }
    let y = hensel_lift(&record, &ctx, nb.lift).map_err(|e| fail("neighborhood", e.to_string()))?;
    let digits: Vec<Vec<String>> = y.iter().map(|c| c.digit_strings()).collect();
    if digits != nb.center {
        return Err(fail("neighborhood", "center is not the recorded lift"));
    }
    let nbhd = build_neighborhood(&map, nb.k, &y, &ctx, nb.degree_checked)
        .map_err(|e| fail("neighborhood", e.to_string()))?;
    nbhd.check_divisibility().map_err(|e| fail("neighborhood", e.to_string()))?;

    // order, analyticity, bound
    if nbhd.l_ord() != nb.l_ord as u128 {
        return Err(fail("order", format!("l_ord recomputes to {}", nbhd.l_ord())));
    }
    let l_an = analyticity_exponent(p, ctx.e());
    if l_an != cert.bound.l_an {
        return Err(fail("analyticity", format!("l_an recomputes to {l_an}")));
    }
    let bound = period_bound(&nbhd).map_err(|e| fail("bound", e.to_string()))?;
    let b = &cert.bound;
    if (b.k, b.l_ord, b.l_an, b.s, b.n) != (bound.k, bound.l_ord, bound.l_an, bound.s, bound.n) {
        return Err(fail(
            "bound",
            format!("N recomputes to {} = {}·{}·{}", bound.n, bound.k, bound.l_ord, bound.s),
        ));
    }

    // membership
    let kfield = NumberField::for_context(&ctx);
    let omega = cert
        .witness
        .iter()
        .map(|s| kfield.parse_element(s))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| fail("membership", e.to_string()))?;
    if omega.len() != map.dim() || !nbhd.membership_exact(&omega) {
        return Err(fail("membership", "witness is not in the neighborhood"));
    }

    // inequality
    verify_payload(cert, &map, &ctx, &kfield, &omega, bound.n)?;

    if cert.digest != cert.compute_digest() {
        return Err(fail("digest", "digest does not match the certificate contents"));
    }
    Ok(())
}

fn verify_payload(
    cert: &Certificate,
    map: &RationalSelfMap,
    ctx: &std::sync::Arc<PadicContext>,
    kfield: &std::sync::Arc<NumberField>,
    omega: &[NfElement],
    n: u64,
) -> Result<()> {
    let stage = "inequality";
    let pl = &cert.payload;
    let i = pl.differing_coordinate;
    if i >= omega.len() || pl.value.len() != omega.len() {
        return Err(fail(stage, "payload shape does not match the witness"));
    }
    let z: Vec<PadicElement> = omega.iter().map(|c| c.to_padic(ctx)).collect::<Result<_>>()?;
    let fz = map.iterate_padic(&z, n as u128).map_err(|e| fail(stage, e.to_string()))?;
    let valuation = fz[i].try_sub(&z[i])?.valuation();
    if valuation.finite() != pl.difference_valuation {
        return Err(fail(stage, format!("difference valuation recomputes to {valuation}")));
    }
    match pl.kind {
        PayloadKind::Exact => {
            let value = iterate_exact_bounded(map, omega, n, cert.exact_bits)
                .map_err(|e| fail(stage, e.to_string()))?
                .ok_or_else(|| fail(stage, "exact iterate exceeds the recorded size limit"))?;
            let claimed = pl
                .value
                .iter()
                .map(|c| kfield.element(c.iter().map(parse_rational_text).collect::<Result<_>>()?))
                .collect::<Result<Vec<_>>>()
                .map_err(|e| fail(stage, e.to_string()))?;
            if claimed != value {
                return Err(fail(stage, "recorded f^N(ω) does not match the exact replay"));
            }
            if value[i] == omega[i] {
                return Err(fail(stage, "f^N(ω) equals ω at the recorded coordinate"));
            }
        }
        PayloadKind::Residue => {
            let claimed: Vec<Vec<String>> = pl
                .value
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|t| {
                            if t.den == "1" {
                                Ok(t.num.clone())
                            } else {
                                Err(fail(stage, "residue digits must be integers"))
                            }
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            let replay: Vec<Vec<String>> = fz.iter().map(|c| c.digit_strings()).collect();
            if claimed != replay {
                return Err(fail(stage, "recorded residues of f^N(ω) do not match the replay"));
            }
            if matches!(valuation, Valuation::ZeroToPrecision(_)) {
                return Err(fail(stage, "f^N(ω) agrees with ω to full precision"));
            }
        }
    }
    Ok(())
}

/// Reads and verifies a certificate file.
pub fn verify_file(path: &std::path::Path) -> Result<Certificate> {
    let text = std::fs::read_to_string(path)?;
    let cert = Certificate::from_json(&text).map_err(|e| fail("format", e.to_string()))?;
    verify_certificate(&cert)?;
    Ok(cert)
}
