//! The end-to-end pipeline: period bound, classification of global points,
//! witness search, certificates and their verification.

mod certificate;
mod map_spec;
mod pipeline;
mod report;

pub use certificate::{
    verify_certificate, verify_file, BoundRecord, Certificate, MapRecord, NeighborhoodRecord, Payload,
    PointRecord, RationalText, FORMAT, TOOLKIT_VERSION,
};
pub use map_spec::{Config, MapSpec, PrimeChoice};
pub use pipeline::{
    classify, find_witness, iterate_exact_bounded, period_bound, run_pipeline, shell_offsets, Classification,
    Evidence, IterateValue, PayloadKind, PeriodBound, PipelineRun, ScannedPoint, WitnessOutcome,
};
pub use report::{interpolation_report, ConvergenceSummary, InterpolationReport};

use crate::error::Result;
use crate::map::RationalSelfMap;

/// Result of [`certify`].
#[derive(Debug, Clone)]
pub enum CertifyOutcome {
    Certified(Box<Certificate>),
    FiniteOrderSuspected { period: u64, scanned: Vec<ScannedPoint> },
    NoWitness { scanned: Vec<ScannedPoint> },
}

/// Runs the pipeline and the witness search and assembles a certificate.
pub fn certify(map: &RationalSelfMap, config: &Config) -> Result<(PipelineRun, CertifyOutcome)> {
    let run = run_pipeline(map, config)?;
    let outcome = match find_witness(&run, config.budget)? {
        WitnessOutcome::Found { omega, evidence, .. } => {
            CertifyOutcome::Certified(Box::new(Certificate::assemble(&run, &omega, &evidence)))
        }
        WitnessOutcome::FiniteOrderSuspected { period, scanned } => {
            CertifyOutcome::FiniteOrderSuspected { period, scanned }
        }
        WitnessOutcome::BudgetExhausted { scanned } => CertifyOutcome::NoWitness { scanned },
    };
    Ok((run, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighborhood::LiftKind;

    fn cfg(p: u64) -> Config {
        Config { prime: PrimeChoice::Fixed(p), lift: LiftKind::Naive, ..Config::default() }
    }

    fn map1(s: &str) -> RationalSelfMap {
        RationalSelfMap::parse(1, &[s], &[]).unwrap()
    }

    #[test]
    fn worked_example_bound_and_certificate() {
        let (run, out) = certify(&map1("x1^2 + 1"), &cfg(3)).unwrap();
        assert_eq!((run.bound.k, run.bound.l_ord, run.bound.l_an, run.bound.n), (1, 3, 1, 9));
        let CertifyOutcome::Certified(cert) = out else { panic!("no certificate") };
        assert_eq!(cert.witness, vec!["2".to_string()]);
        assert_eq!(cert.payload.kind, PayloadKind::Exact);
        verify_certificate(&cert).unwrap();
        let again = Certificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(again, *cert);
    }

    #[test]
    fn cube_classification() {
        let run = run_pipeline(&map1("x1^3"), &cfg(5)).unwrap();
        assert_eq!(run.bound.n, 4);
        let q = run.field();
        assert_eq!(
            classify(&run.nbhd, &run.bound, &[q.from_int(1)], 1 << 16).unwrap(),
            Classification::Periodic { period: 1 }
        );
        assert_eq!(
            classify(&run.nbhd, &run.bound, &[q.from_int(6)], 1 << 16).unwrap().label(),
            "non_preperiodic"
        );
        assert_eq!(
            classify(&run.nbhd, &run.bound, &[q.from_int(2)], 1 << 16).unwrap(),
            Classification::OutsideNeighborhood
        );
    }

    #[test]
    fn identity_is_flagged() {
        let c = Config { prime: PrimeChoice::Fixed(5), budget: 6, ..Config::default() };
        let (run, out) = certify(&RationalSelfMap::identity(1), &c).unwrap();
        assert_eq!(run.bound.n, 1);
        assert!(matches!(out, CertifyOutcome::FiniteOrderSuspected { period: 1, .. }));
    }

    #[test]
    fn tampered_bound_fails_at_bound_stage() {
        let (_, out) = certify(&map1("x1^2"), &cfg(5)).unwrap();
        let CertifyOutcome::Certified(cert) = out else { panic!("no certificate") };
        assert_eq!(cert.bound.n, 4);
        assert_eq!(cert.witness, vec!["6".to_string()]);
        let mut bad = (*cert).clone();
        bad.bound.n -= 1;
        match verify_certificate(&bad) {
            Err(crate::Error::Verification { stage, .. }) => assert_eq!(stage, "bound"),
            other => panic!("unexpected {other:?}"),
        }
        let mut bad = (*cert).clone();
        bad.witness = vec!["1".into()];
        match verify_certificate(&bad) {
            Err(crate::Error::Verification { stage, .. }) => assert_eq!(stage, "inequality"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
