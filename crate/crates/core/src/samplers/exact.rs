//! Rejection to exact size: draw at the tuned parameter until the size is `n`.

use std::time::Instant;

use crate::analysis::{acceptance_lower_bound, local_limit_probability};
use crate::class::{ClassKind, ClassSpec};
use crate::error::{Error, Result};
use crate::ogf::OgfTable;
use crate::partition::Partition;
use crate::rng::RandomSource;
use crate::samplers::independent::{Generator, IndependentSampler};
use crate::samplers::multiset::{ColoredSummands, MultisetSampler, Scratch};
use crate::samplers::stats::SamplerStats;
use crate::tuner::{tune_table, Tuned, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};

/// Multiple of the expected attempt count (from the acceptance lower bound)
/// after which the rejection loop gives up.
pub const RETRY_CAP_FACTOR: f64 = 1000.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplerOptions {
    /// Generator for polynomial-kind classes; colored classes always use the
    /// multiset sampler.
    pub generator: Generator,
    pub tolerance: f64,
    /// Abandon a draw once its partial size reaches `2n`.
    pub space_cap: bool,
    /// Overrides the default attempt cap.
    pub retry_cap: Option<u64>,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            generator: Generator::Grouped,
            tolerance: DEFAULT_TOLERANCE,
            space_cap: true,
            retry_cap: None,
        }
    }
}

#[derive(Clone, Debug)]
enum Engine {
    Multiset(MultisetSampler<ColoredSummands>),
    Independent(IndependentSampler),
}

impl Engine {
    fn run(
        &self,
        cap: Option<u64>,
        rng: &mut RandomSource,
        stats: &mut SamplerStats,
        scratch: &mut Scratch,
    ) -> Result<Option<u64>> {
        match self {
            Engine::Multiset(s) => s.run(cap, rng, stats, scratch),
            Engine::Independent(s) => s.run(cap, rng, stats, scratch),
        }
    }

    fn materialize(&self, scratch: &Scratch) -> Partition {
        match self {
            Engine::Multiset(s) => s.materialize(scratch),
            Engine::Independent(s) => s.materialize(scratch),
        }
    }
}

/// Uniform sampler for partitions of size exactly `n` in a class truncated at `n`.
#[derive(Clone, Debug)]
pub struct ExactSampler {
    spec: ClassSpec,
    target: u64,
    tuned: Tuned<f64>,
    variance: f64,
    engine: Engine,
    space_cap: Option<u64>,
    retry_cap: u64,
}

/// One partition from a batch, with its provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchRecord {
    pub worker: u64,
    pub index: u64,
    /// Attempts spent on this record, including the accepted one.
    pub attempts: u64,
    pub partition: Partition,
}

#[derive(Clone, Debug)]
pub struct Batch {
    /// Ordered by worker, then draw index.
    pub records: Vec<BatchRecord>,
    pub stats: SamplerStats,
}

impl ExactSampler {
    /// Tunes `lambda_n` for `spec` truncated at `n` and prepares the sampler.
    pub fn new(spec: &ClassSpec, n: u64, options: &SamplerOptions) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("exact size must be at least 1".into()));
        }
        let spec = spec.with_truncation(n as usize)?;
        let table = OgfTable::<f64>::new(&spec);
        let tuned = tune_table(&table, n, options.tolerance, DEFAULT_MAX_ITERATIONS)?;
        let variance = table.variance_size(tuned.lambda)?;
        let engine = match spec.kind() {
            ClassKind::Colored { colors } => {
                Engine::Multiset(MultisetSampler::new(ColoredSummands::new(*colors, n)?, tuned.lambda)?)
            }
            ClassKind::Polynomial { .. } => {
                Engine::Independent(IndependentSampler::new(&spec, tuned.lambda, options.generator)?)
            }
        };
        let retry_cap = options.retry_cap.unwrap_or_else(|| {
            let bound: f64 = acceptance_lower_bound(spec.degree(), n);
            (RETRY_CAP_FACTOR / bound).ceil() as u64
        });
        Ok(Self {
            spec,
            target: n,
            tuned,
            variance,
            engine,
            space_cap: options.space_cap.then_some(2 * n),
            retry_cap,
        })
    }

    /// Condensate model: three colors.
    pub fn bec(n: u64) -> Result<Self> {
        Self::new(&ClassSpec::bec(n as usize)?, n, &SamplerOptions::default())
    }

    pub fn spec(&self) -> &ClassSpec {
        &self.spec
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn tuned(&self) -> &Tuned<f64> {
        &self.tuned
    }

    pub fn lambda(&self) -> f64 {
        self.tuned.lambda
    }

    /// `Var(U_n)` at the tuned parameter.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    /// Local-limit estimate `1 / sqrt(2 pi Var)` of the acceptance rate.
    pub fn predicted_acceptance(&self) -> f64 {
        local_limit_probability(self.variance)
    }

    /// Guaranteed lower bound on the acceptance rate for large `n`.
    pub fn acceptance_lower_bound(&self) -> f64 {
        acceptance_lower_bound(self.spec.degree(), self.target)
    }

    pub fn retry_cap(&self) -> u64 {
        self.retry_cap
    }

    pub fn space_cap(&self) -> Option<u64> {
        self.space_cap
    }

    /// A single Boltzmann draw at `lambda_n`; `Some` only if it has size `n`.
    pub fn attempt(&self, rng: &mut RandomSource, stats: &mut SamplerStats) -> Result<Option<Partition>> {
        self.attempt_with(rng, stats, &mut Scratch::default())
    }

    fn attempt_with(
        &self,
        rng: &mut RandomSource,
        stats: &mut SamplerStats,
        scratch: &mut Scratch,
    ) -> Result<Option<Partition>> {
        stats.attempts += 1;
        match self.engine.run(self.space_cap, rng, stats, scratch)? {
            None => {
                stats.space_cap_rejections += 1;
                Ok(None)
            }
            Some(size) if size == self.target => {
                stats.acceptances += 1;
                let p = self.engine.materialize(scratch);
                assert_eq!(p.size(), self.target, "accepted partition has wrong size");
                Ok(Some(p))
            }
            Some(_) => Ok(None),
        }
    }

    /// Uniformly random partition of size exactly `n`.
    pub fn sample(&self, rng: &mut RandomSource, stats: &mut SamplerStats) -> Result<Partition> {
        let start = Instant::now();
        let mut scratch = Scratch::default();
        let result = (|| {
            for _ in 0..self.retry_cap {
                if let Some(p) = self.attempt_with(rng, stats, &mut scratch)? {
                    return Ok(p);
                }
            }
            Err(Error::RetryCapExhausted {
                context: "exact-size rejection",
                cap: self.retry_cap,
            })
        })();
        stats.elapsed += start.elapsed();
        result
    }

    /// Unconditioned Boltzmann draw at `lambda_n`, without the space cap.
    pub fn sample_boltzmann(&self, rng: &mut RandomSource) -> Result<Partition> {
        let mut scratch = Scratch::default();
        let mut stats = SamplerStats::default();
        self.engine.run(None, rng, &mut stats, &mut scratch)?;
        Ok(self.engine.materialize(&scratch))
    }

    /// `count` exact samples split over `workers` threads. Worker `w` draws
    /// from `RandomSource::for_worker(seed, w)`, so the output depends only on
    /// `(seed, workers)`.
    pub fn sample_batch(&self, count: u64, workers: usize, seed: u64) -> Result<Batch> {
        let workers = workers.max(1) as u64;
        let share = |w: u64| count / workers + u64::from(w < count % workers);
        let run = |w: u64| -> Result<(Vec<BatchRecord>, SamplerStats)> {
            let mut rng = RandomSource::for_worker(seed, w);
            let mut stats = SamplerStats::default();
            let mut records = Vec::with_capacity(share(w) as usize);
            for index in 0..share(w) {
                let before = stats.attempts;
                let partition = self.sample(&mut rng, &mut stats)?;
                records.push(BatchRecord {
                    worker: w,
                    index,
                    attempts: stats.attempts - before,
                    partition,
                });
            }
            Ok((records, stats))
        };
        let parts: Vec<Result<(Vec<BatchRecord>, SamplerStats)>> = if workers == 1 {
            vec![run(0)]
        } else {
            std::thread::scope(|scope| {
                let handles: Vec<_> = (0..workers).map(|w| scope.spawn(move || run(w))).collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("sampling worker panicked"))
                    .collect()
            })
        };
        let mut batch = Batch {
            records: Vec::with_capacity(count as usize),
            stats: SamplerStats::default(),
        };
        for part in parts {
            let (records, stats) = part?;
            batch.records.extend(records);
            batch.stats += stats;
        }
        Ok(batch)
    }
}

/// Uniform condensate configuration of total energy `n` over `colors` colors.
pub fn sample_bec_exact(n: u64, colors: u32, rng: &mut RandomSource) -> Result<Partition> {
    let spec = ClassSpec::colored(colors, n.max(1) as usize)?;
    ExactSampler::new(&spec, n, &SamplerOptions::default())?.sample(rng, &mut SamplerStats::default())
}

/// Uniform weighted partition of size `n` through independent geometric
/// multiplicities. Colored specs are expanded to their weight polynomial,
/// giving indexed summands.
pub fn sample_weighted_exact(
    spec: &ClassSpec,
    n: u64,
    generator: Generator,
    rng: &mut RandomSource,
) -> Result<Partition> {
    let spec = match spec.kind() {
        ClassKind::Polynomial { .. } => spec.clone(),
        ClassKind::Colored { .. } => ClassSpec::polynomial(spec.polynomial_coefficients(), spec.truncation())?,
    };
    let options = SamplerOptions {
        generator,
        ..SamplerOptions::default()
    };
    ExactSampler::new(&spec, n, &options)?.sample(rng, &mut SamplerStats::default())
}
