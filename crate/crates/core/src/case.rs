//! JSON case descriptions consumed by the command line driver. A case file
//! names either a unitary setup (prime, orbits with signatures, a slot
//! subset) or a Hilbert setup (prime, orbit sizes, an embedding subset,
//! weights to classify). Parsing validates everything up front so the
//! driver can map any error here to its input-error exit code.

use serde::Deserialize;
use thiserror::Error;

use crate::dieudonne::{
    CMTypeDatum, DieudonneError, OrbitDatum, OrbitKind, OrbitSlot, SignatureFn,
};
use crate::hilbert::{HilbertError, SplittingDatum, Weight};

/// Driver-level size caps. The library itself scales past these; the caps
/// keep command invocations inside desk-scale runtimes.
pub const MAX_P: u64 = 97;
pub const MAX_D: usize = 12;
pub const MAX_G: usize = 12;
pub const MAX_KAPPA_DEGREE: usize = 12;
pub const MAX_WEIGHT_ENTRY: i64 = 1_000_000;

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("malformed case file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("case file must be a JSON object with a \"kind\" field")]
    MissingKind,
    #[error("unknown case kind {0:?}, expected \"unitary\" or \"hilbert\"")]
    UnknownKind(String),
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("p = {p} exceeds the driver cap {max}")]
    PrimeCap { p: u64, max: u64 },
    #[error("d = {d} exceeds the driver cap {max}")]
    DimensionCap { d: usize, max: usize },
    #[error("g = {g} exceeds the driver cap {max}")]
    DegreeCap { g: usize, max: usize },
    #[error("orbit sizes sum to {sum}, case declares g = {g}")]
    DegreeMismatch { g: usize, sum: usize },
    #[error("weight {index} has {got} entries, case has degree {expected}")]
    WeightLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("weight entry {value} exceeds the driver cap {max} in magnitude")]
    WeightEntryCap { value: i64, max: i64 },
    #[error("kappaDegree = {degree} exceeds the driver cap {max}")]
    KappaDegreeCap { degree: usize, max: usize },
    #[error("orbit {orbit} has size {size}, which does not divide kappaDegree {degree}")]
    KappaDegreeIndivisible {
        orbit: usize,
        size: usize,
        degree: usize,
    },
    #[error("unknown orbit kind {0:?}, expected \"inert\" or \"split\"")]
    UnknownOrbitKind(String),
    #[error(transparent)]
    Dieudonne(#[from] DieudonneError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<OutputFormat, String> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawOrbit {
    size: usize,
    kind: String,
    signature: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawUnitary {
    #[allow(dead_code)]
    kind: String,
    p: u64,
    d: usize,
    orbits: Vec<RawOrbit>,
    #[serde(default)]
    sigma: Vec<usize>,
    #[serde(default)]
    format: Option<OutputFormat>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawHilbert {
    #[allow(dead_code)]
    kind: String,
    p: u64,
    g: usize,
    orbit_sizes: Vec<usize>,
    #[serde(default)]
    sigma: Vec<usize>,
    #[serde(default)]
    weights: Vec<Vec<i64>>,
    #[serde(default)]
    kappa_degree: Option<usize>,
    #[serde(default)]
    format: Option<OutputFormat>,
}

/// A validated unitary case: the datum plus the requested slot subset,
/// sorted and deduplicated.
#[derive(Debug, Clone)]
pub struct UnitaryCase {
    pub p: u64,
    pub datum: CMTypeDatum,
    pub sigma: Vec<usize>,
    pub format: Option<OutputFormat>,
}

/// A validated Hilbert case: the splitting datum, the requested embedding
/// subset (sorted, deduplicated), the weights to classify, and an optional
/// coefficient field degree for the idempotent check.
#[derive(Debug, Clone)]
pub struct HilbertCase {
    pub datum: SplittingDatum,
    pub sigma: Vec<usize>,
    pub weights: Vec<Weight>,
    pub kappa_degree: Option<usize>,
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Clone)]
pub enum CaseDescription {
    Unitary(UnitaryCase),
    Hilbert(HilbertCase),
}

impl CaseDescription {
    pub fn format(&self) -> Option<OutputFormat> {
        match self {
            CaseDescription::Unitary(c) => c.format,
            CaseDescription::Hilbert(c) => c.format,
        }
    }
}

pub fn parse_case(text: &str) -> Result<CaseDescription, CaseError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let kind = value
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or(CaseError::MissingKind)?;
    match kind {
        "unitary" => parse_unitary(serde_json::from_value(value)?),
        "hilbert" => parse_hilbert(serde_json::from_value(value)?),
        other => Err(CaseError::UnknownKind(other.to_string())),
    }
}

fn parse_unitary(raw: RawUnitary) -> Result<CaseDescription, CaseError> {
    if raw.p > MAX_P {
        return Err(CaseError::PrimeCap { p: raw.p, max: MAX_P });
    }
    if !crate::gfpn::is_prime(raw.p) {
        return Err(CaseError::NotPrime { p: raw.p });
    }
    if raw.d > MAX_D {
        return Err(CaseError::DimensionCap { d: raw.d, max: MAX_D });
    }
    let mut slots = Vec::with_capacity(raw.orbits.len());
    for orbit in raw.orbits {
        let kind = match orbit.kind.as_str() {
            "inert" => OrbitKind::Inert,
            "split" => OrbitKind::Split,
            other => return Err(CaseError::UnknownOrbitKind(other.to_string())),
        };
        slots.push(OrbitSlot {
            orbit: OrbitDatum::new(orbit.size, kind)?,
            sig: SignatureFn::new(raw.d, orbit.signature)?,
        });
    }
    let datum = CMTypeDatum::new(raw.d, slots)?;
    let mut sigma = raw.sigma;
    sigma.sort_unstable();
    sigma.dedup();
    datum.validate_sigma(&sigma)?;
    Ok(CaseDescription::Unitary(UnitaryCase {
        p: raw.p,
        datum,
        sigma,
        format: raw.format,
    }))
}

fn parse_hilbert(raw: RawHilbert) -> Result<CaseDescription, CaseError> {
    if raw.p > MAX_P {
        return Err(CaseError::PrimeCap { p: raw.p, max: MAX_P });
    }
    if raw.g > MAX_G {
        return Err(CaseError::DegreeCap { g: raw.g, max: MAX_G });
    }
    let sum: usize = raw.orbit_sizes.iter().sum();
    if sum != raw.g {
        return Err(CaseError::DegreeMismatch { g: raw.g, sum });
    }
    let datum = SplittingDatum::new(raw.p, raw.orbit_sizes)?;
    let sigma = datum.validate_sigma(&raw.sigma)?;
    let mut weights = Vec::with_capacity(raw.weights.len());
    for (index, k) in raw.weights.into_iter().enumerate() {
        if k.len() != datum.g() {
            return Err(CaseError::WeightLength {
                index,
                expected: datum.g(),
                got: k.len(),
            });
        }
        if let Some(&value) = k.iter().find(|v| v.unsigned_abs() > MAX_WEIGHT_ENTRY as u64) {
            return Err(CaseError::WeightEntryCap {
                value,
                max: MAX_WEIGHT_ENTRY,
            });
        }
        weights.push(Weight { k });
    }
    if let Some(degree) = raw.kappa_degree {
        if degree > MAX_KAPPA_DEGREE {
            return Err(CaseError::KappaDegreeCap {
                degree,
                max: MAX_KAPPA_DEGREE,
            });
        }
        for (orbit, &size) in datum.orbit_sizes().iter().enumerate() {
            if degree % size != 0 {
                return Err(CaseError::KappaDegreeIndivisible {
                    orbit,
                    size,
                    degree,
                });
            }
        }
    }
    Ok(CaseDescription::Hilbert(HilbertCase {
        datum,
        sigma,
        weights,
        kappa_degree: raw.kappa_degree,
        format: raw.format,
    }))
}
