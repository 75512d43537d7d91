use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use padic_dynamics::certify::{
    certify, interpolation_report, run_pipeline, verify_file, CertifyOutcome, Config, MapSpec, PrimeChoice,
    ScannedPoint,
};
use padic_dynamics::map::RationalSelfMap;
use padic_dynamics::numfield::NumberField;
use padic_dynamics::Error;

const EXIT_NO_WITNESS: u8 = 2;
const EXIT_INVALID: u8 = 3;

#[derive(Parser)]
#[command(name = "padyn", version, about = "Non-preperiodicity certificates for rational self-maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Overrides {
    /// `auto` or a prime number.
    #[arg(long)]
    prime: Option<PrimeChoice>,
    /// Requested ramification index.
    #[arg(long)]
    e: Option<u32>,
    /// p-adic digits retained.
    #[arg(long)]
    precision: Option<u32>,
    /// Degree cap of the local series.
    #[arg(long)]
    degree: Option<u32>,
    /// Number of Mahler coefficients.
    #[arg(long)]
    kmax: Option<usize>,
    /// Number of witness candidates to scan.
    #[arg(long)]
    budget: Option<usize>,
}

impl Overrides {
    fn apply(&self, mut c: Config) -> Config {
        if let Some(p) = self.prime {
            c.prime = p;
        }
        if let Some(e) = self.e {
            c.e = e;
        }
        if let Some(x) = self.precision {
            c.precision = x;
        }
        if let Some(x) = self.degree {
            c.degree = x;
        }
        if let Some(x) = self.kmax {
            c.kmax = x;
        }
        if let Some(x) = self.budget {
            c.budget = x;
        }
        c
    }
}

#[derive(Subcommand)]
enum Command {
    /// Search for a non-preperiodic witness and write its certificate.
    Certify {
        #[arg(long)]
        map: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a certificate.
    Verify {
        #[arg(long)]
        cert: PathBuf,
    },
    /// Mahler interpolation of the local orbit through a point.
    Interpolate {
        #[arg(long)]
        map: PathBuf,
        /// Coordinates separated by `,`; basis components of each by `;`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(map: &Path, overrides: &Overrides) -> Result<(RationalSelfMap, Config), Error> {
    let spec = MapSpec::load(map)?;
    Ok((spec.map()?, overrides.apply(spec.config()?)))
}

fn summary(scanned: &[ScannedPoint]) -> String {
    scanned
        .iter()
        .map(|s| {
            let pt: Vec<String> = s.omega.iter().map(|c| c.to_text()).collect();
            format!("  ({}) {}", pt.join(", "), s.classification.label())
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Certify { map, overrides, out } => {
            let (f, config) = load(&map, &overrides)?;
            let (run, outcome) = certify(&f, &config)?;
            eprintln!(
                "p = {}, d = {}, e = {}, k = {}, l_ord = {}, l_an = {}, N = {}",
                run.ctx.p(),
                run.ctx.d(),
                run.ctx.e(),
                run.bound.k,
                run.bound.l_ord,
                run.bound.l_an,
                run.bound.n
            );
            match outcome {
                CertifyOutcome::Certified(cert) => {
                    std::fs::write(&out, cert.to_json())?;
                    println!("certified witness ({}) -> {}", cert.witness.join(", "), out.display());
                    Ok(ExitCode::SUCCESS)
                }
                CertifyOutcome::FiniteOrderSuspected { period, scanned } => {
                    println!(
                        "finite order suspected: all {} scanned points have period {period}\n{}",
                        scanned.len(),
                        summary(&scanned)
                    );
                    Ok(ExitCode::from(EXIT_NO_WITNESS))
                }
                CertifyOutcome::NoWitness { scanned } => {
                    println!("no witness within budget\n{}", summary(&scanned));
                    Ok(ExitCode::from(EXIT_NO_WITNESS))
                }
            }
        }
        Command::Verify { cert } => match verify_file(&cert) {
            Ok(c) => {
                println!("valid: witness ({}) is not preperiodic, N = {}", c.witness.join(", "), c.bound.n);
                Ok(ExitCode::SUCCESS)
            }
            Err(Error::Verification { stage, reason }) => {
                println!("invalid at stage '{stage}': {reason}");
                Ok(ExitCode::from(EXIT_INVALID))
            }
            Err(e) => {
                println!("invalid: {e}");
                Ok(ExitCode::from(EXIT_INVALID))
            }
        },
        Command::Interpolate { map, point, overrides, out } => {
            let (f, config) = load(&map, &overrides)?;
            let run = run_pipeline(&f, &config)?;
            let field = NumberField::for_context(&run.ctx);
            let omega =
                point.split(',').map(|s| field.parse_element(s.trim())).collect::<Result<Vec<_>, _>>()?;
            let report = interpolation_report(&run, &omega, config.kmax, 1)?;
            let mut text = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
            text.push('\n');
            std::fs::write(&out, text)?;
            println!("interpolation report -> {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
