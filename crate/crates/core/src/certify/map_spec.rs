//! The map-specification file (TOML) and the pipeline configuration.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::RationalSelfMap;
use crate::neighborhood::LiftKind;
use crate::padic::DEFAULT_PRECISION;

pub const DEFAULT_DEGREE: u32 = 8;
pub const DEFAULT_KMAX: usize = 32;
pub const DEFAULT_M_MAX: u32 = 6;
pub const DEFAULT_BUDGET: usize = 64;
pub const DEFAULT_PRIME_SCAN: u64 = 200;
pub const DEFAULT_EXACT_BITS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrimeChoice {
    #[default]
    Auto,
    Fixed(u64),
}

impl FromStr for PrimeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(PrimeChoice::Auto);
        }
        s.parse::<u64>()
            .map(PrimeChoice::Fixed)
            .map_err(|_| Error::Parse(format!("prime must be 'auto' or an integer, got '{s}'")))
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
enum PrimeField {
    Number(u64),
    Text(String),
}

/// Contents of a map-specification file.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub n: usize,
    pub numerators: Vec<String>,
    #[serde(default)]
    pub denominators: Vec<String>,
    #[serde(default)]
    prime: Option<PrimeField>,
    pub e: Option<u32>,
    pub precision: Option<u32>,
    pub degree: Option<u32>,
    pub kmax: Option<usize>,
    pub m_max: Option<u32>,
    pub budget: Option<usize>,
    pub lift: Option<LiftKind>,
}

impl MapSpec {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn map(&self) -> Result<RationalSelfMap> {
        RationalSelfMap::parse(self.n, &self.numerators, &self.denominators)
    }

    pub fn prime(&self) -> Result<PrimeChoice> {
        match &self.prime {
            None => Ok(PrimeChoice::Auto),
            Some(PrimeField::Number(p)) => Ok(PrimeChoice::Fixed(*p)),
            Some(PrimeField::Text(s)) => s.parse(),
        }
    }

    pub fn config(&self) -> Result<Config> {
        let d = Config::default();
        Ok(Config {
            prime: self.prime()?,
            e: self.e.unwrap_or(d.e),
            precision: self.precision.unwrap_or(d.precision),
            degree: self.degree.unwrap_or(d.degree),
            kmax: self.kmax.unwrap_or(d.kmax),
            m_max: self.m_max.unwrap_or(d.m_max),
            budget: self.budget.unwrap_or(d.budget),
            lift: self.lift.unwrap_or(d.lift),
            ..d
        })
    }
}

/// Every tunable of the pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub prime: PrimeChoice,
    pub e: u32,
    pub precision: u32,
    pub degree: u32,
    pub kmax: usize,
    pub m_max: u32,
    pub budget: usize,
    pub lift: LiftKind,
    /// Upper end of the automatic prime scan.
    pub prime_scan: u64,
    /// Size limit, in bits per coordinate, for exact iteration.
    pub exact_bits: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            prime: PrimeChoice::Auto,
            e: 1,
            precision: DEFAULT_PRECISION,
            degree: DEFAULT_DEGREE,
            kmax: DEFAULT_KMAX,
            m_max: DEFAULT_M_MAX,
            budget: DEFAULT_BUDGET,
            lift: LiftKind::Teichmuller,
            prime_scan: DEFAULT_PRIME_SCAN,
            exact_bits: DEFAULT_EXACT_BITS,
        }
    }
}
