//! Weighted partitions as independent geometric multiplicities.
//!
//! At parameter `lambda` the multiplicity of each summand type of size `k`
//! is `Geometric(lambda^k)`, independently over all `(k, type)` pairs.

use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::class::ClassSpec;
use crate::distributions::{sample_negbin_positive, sample_weak_composition, Geometric, NegBinParams};
use crate::error::{Error, Result};
use crate::partition::{Partition, Summand};
use crate::rng::RandomSource;
use crate::samplers::multiset::Scratch;
use crate::samplers::stats::SamplerStats;

/// How the per-type multiplicities are generated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    /// One geometric draw per `(k, type)`; O(sum b_k) per draw.
    Naive,
    /// Per size `k`, the total `t_k ~ NegBin(b_k, lambda^k)` spread uniformly
    /// over the `b_k` types. Sizes with `t_k = 0` are skipped by thinning.
    #[default]
    Grouped,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Naive => "naive",
            Generator::Grouped => "grouped",
        })
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "naive" => Ok(Generator::Naive),
            "grouped" => Ok(Generator::Grouped),
            other => Err(Error::InvalidSpec(format!("unknown generator {other:?}"))),
        }
    }
}

/// Boltzmann sampler for a weighted-partition class with indexed summands.
#[derive(Clone, Debug)]
pub struct IndependentSampler {
    lambda: f64,
    generator: Generator,
    counts: Vec<u64>,
    /// `lambda^k`.
    powers: Vec<f64>,
    /// `P(t_k > 0) = 1 - (1 - lambda^k)^{b_k}`.
    nonzero: Vec<f64>,
    /// `max_{j >= k} P(t_j > 0)`, the thinning envelope.
    envelope: Vec<f64>,
}

impl IndependentSampler {
    pub fn new(spec: &ClassSpec, lambda: f64, generator: Generator) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::OutOfRange(format!("parameter {lambda} outside (0, 1)")));
        }
        let counts = spec
            .weight_counts()
            .iter()
            .map(|b| b.to_u64().ok_or_else(|| Error::BudgetExceeded("weight exceeds u64".into())))
            .collect::<Result<Vec<u64>>>()?;
        let ln = lambda.ln();
        let powers: Vec<f64> = (1..=counts.len()).map(|k| (k as f64 * ln).exp()).collect();
        let nonzero: Vec<f64> = counts
            .iter()
            .zip(&powers)
            .map(|(&b, &q)| -(b as f64 * (-q).ln_1p()).exp_m1())
            .collect();
        let mut envelope = nonzero.clone();
        for k in (0..envelope.len().saturating_sub(1)).rev() {
            envelope[k] = envelope[k].max(envelope[k + 1]);
        }
        Ok(Self {
            lambda,
            generator,
            counts,
            powers,
            nonzero,
            envelope,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn generator(&self) -> Generator {
        self.generator
    }

    pub fn sample(&self, rng: &mut RandomSource) -> Result<Partition> {
        let mut stats = SamplerStats::default();
        Ok(self.sample_capped(None, rng, &mut stats)?.expect("uncapped draw"))
    }

    /// One draw, abandoned (returning `None`) once its size reaches `cap`.
    pub fn sample_capped(
        &self,
        cap: Option<u64>,
        rng: &mut RandomSource,
        stats: &mut SamplerStats,
    ) -> Result<Option<Partition>> {
        let mut scratch = Scratch::default();
        Ok(self
            .run(cap, rng, stats, &mut scratch)?
            .map(|_| self.materialize(&scratch)))
    }

    pub(crate) fn run(
        &self,
        cap: Option<u64>,
        rng: &mut RandomSource,
        _stats: &mut SamplerStats,
        scratch: &mut Scratch,
    ) -> Result<Option<u64>> {
        scratch.clear();
        let limit = cap.unwrap_or(u64::MAX);
        match self.generator {
            Generator::Naive => self.run_naive(limit, rng, scratch),
            Generator::Grouped => self.run_grouped(limit, rng, scratch),
        }
    }

    fn run_naive(&self, limit: u64, rng: &mut RandomSource, scratch: &mut Scratch) -> Result<Option<u64>> {
        let mut size = 0u64;
        for (i, (&b, &q)) in self.counts.iter().zip(&self.powers).enumerate() {
            if q <= 0.0 {
                break;
            }
            let k = i as u64 + 1;
            let g = Geometric::new(q)?;
            for t in 1..=b {
                let y = g.sample(rng);
                if y > 0 {
                    scratch.records.extend([k, t]);
                    scratch.mults.push(y);
                    size += k * y;
                    if size >= limit {
                        return Ok(None);
                    }
                }
            }
        }
        Ok(Some(size))
    }

    fn run_grouped(&self, limit: u64, rng: &mut RandomSource, scratch: &mut Scratch) -> Result<Option<u64>> {
        let n = self.counts.len();
        let mut size = 0u64;
        let mut at = 0usize;
        while at < n {
            // Candidates arrive at rate `bound` per index; a candidate at `c`
            // is kept with probability `nonzero[c] / bound`.
            let bound = self.envelope[at];
            if bound <= 0.0 {
                break;
            }
            let c = if bound >= 1.0 {
                at
            } else {
                let skip = (rng.uniform_open().ln() / (-bound).ln_1p()).floor();
                if skip >= (n - at) as f64 {
                    break;
                }
                at + skip as usize
            };
            at = c + 1;
            if rng.uniform_open() * bound >= self.nonzero[c] {
                continue;
            }
            let k = c as u64 + 1;
            let b = self.counts[c];
            let total = sample_negbin_positive(NegBinParams::new(b, self.powers[c])?, rng)?;
            for (part, y) in sample_weak_composition(total, b, rng) {
                scratch.records.extend([k, part + 1]);
                scratch.mults.push(y);
            }
            size += k * total;
            if size >= limit {
                return Ok(None);
            }
        }
        Ok(Some(size))
    }

    pub(crate) fn materialize(&self, scratch: &Scratch) -> Partition {
        let mut p = Partition::empty();
        for (record, &y) in scratch.records.chunks_exact(2).zip(&scratch.mults) {
            p.add(Summand::indexed(record[0], record[1]).expect("positive size and index"), y);
        }
        p
    }
}
