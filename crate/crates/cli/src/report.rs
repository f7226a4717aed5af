//! Serializable outputs of each subcommand. Exact integers and rationals are
//! strings so no consumer truncates them to 53 bits.

use boltzpart::{BatchRecord, ClassSpec};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    pub lower: f64,
    pub upper: f64,
    pub central: f64,
    pub contains_lambda: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneReport {
    pub spec: ClassSpec,
    pub n: u64,
    pub lambda: f64,
    pub delta: f64,
    pub expectation: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub iterations: usize,
    pub variance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<WindowReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartRecord {
    pub size: u64,
    pub summand: String,
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub seed: u64,
    pub worker: u64,
    pub index: u64,
    pub size: u64,
    pub width: u64,
    pub attempts: u64,
    pub key: String,
    pub parts: Vec<PartRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ground_state_fraction: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub ground_state_fraction_value: Option<f64>,
}

impl SampleRecord {
    pub fn from_batch(seed: u64, record: &BatchRecord, particles: Option<u64>) -> boltzpart::Result<Self> {
        let p = &record.partition;
        let fraction = particles.map(|m| p.ground_state_fraction(m)).transpose()?;
        Ok(Self {
            seed,
            worker: record.worker,
            index: record.index,
            size: p.size(),
            width: p.width(),
            attempts: record.attempts,
            key: p.canonical_key().to_string(),
            parts: p
                .parts()
                .map(|(s, m)| PartRecord {
                    size: s.size(),
                    summand: s.to_string(),
                    multiplicity: m,
                })
                .collect(),
            ground_state_fraction: fraction.map(|r| r.to_string()),
            ground_state_fraction_value: fraction.map(|r| *r.numer() as f64 / *r.denom() as f64),
        })
    }

    pub const CSV_HEADER: &'static str = "seed,worker,index,size,width,attempts,ground_state_fraction,key";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},\"{}\"",
            self.seed,
            self.worker,
            self.index,
            self.size,
            self.width,
            self.attempts,
            self.ground_state_fraction.as_deref().unwrap_or(""),
            self.key
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub spec: ClassSpec,
    pub n: usize,
    pub counts: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleReport {
    pub position: u32,
    pub residue: String,
    pub residue_value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: u64,
    pub lambda: f64,
    pub variance: f64,
    /// Guaranteed for large `n`.
    pub acceptance_lower_bound: f64,
    /// `1 / sqrt(2 pi Var)` at the tuned parameter.
    pub local_limit: f64,
    /// Leading-order asymptotic from the Dirichlet profile.
    pub local_limit_asymptotic: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<WindowReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub points: usize,
    pub holding: usize,
    pub min_margin: f64,
    pub min_margin_delta: f64,
    pub min_margin_alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub spec: ClassSpec,
    pub degree: usize,
    pub coefficients: Vec<String>,
    pub newton: Vec<String>,
    pub poles: Vec<PoleReport>,
    pub rightmost_pole: u32,
    pub k2: f64,
    pub condition_iii: ConditionReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bounds: Option<BoundsReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub spec: ClassSpec,
    pub n: u64,
    pub seed: u64,
    pub workers: usize,
    pub samples: u64,
    pub universe: usize,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub alpha: f64,
    pub pass: bool,
    pub attempts: u64,
    pub acceptance_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchPoint {
    pub n: u64,
    pub seed: u64,
    pub lambda: f64,
    pub accepts: u64,
    pub attempts: u64,
    pub space_cap_rejections: u64,
    pub attempts_per_accept: f64,
    /// `sqrt(2 pi Var)`.
    pub predicted_attempts: f64,
    /// Reciprocal of the acceptance lower bound.
    pub bound_attempts: f64,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub spec: ClassSpec,
    pub seed: u64,
    pub workers: usize,
    pub samples_per_n: u64,
    pub points: Vec<BenchPoint>,
    /// Least-squares slope of ln(attempts per accept) on ln n.
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    /// `(r + 3) / (2 r + 4)`.
    pub reference_slope: f64,
}
