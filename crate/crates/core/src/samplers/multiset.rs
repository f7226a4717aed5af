//! The exp-log multiset sampler and the summand classes it drives.

use crate::distributions::{
    poisson_positive_unchecked, poisson_unchecked, sample_negbin_positive, sample_weak_composition,
    MaxIndex, NegBinParams,
};
use crate::class::ClassSpec;
use crate::error::{Error, Result};
use crate::partition::{EnergyState, Partition, Summand};
use crate::rng::RandomSource;
use crate::samplers::stats::SamplerStats;

use num_traits::ToPrimitive;

/// Cap on the size-test loop of an inner summand sampler.
pub const INNER_RETRY_CAP: u64 = 1_000_000;

/// Bar counts up to this are placed with Floyd's subset algorithm on the stack.
const SMALL_BARS: usize = 16;

/// A summand class with its own Boltzmann sampler, usable as the inner
/// class `A` of `MSet(A)`. Draws are written as fixed-width word records so
/// rejected attempts allocate nothing.
pub trait SummandClass {
    /// Words per encoded summand.
    fn record_len(&self) -> usize;

    /// `A(z)` for `z` in `[0, 1)`.
    fn ogf(&self, z: f64) -> f64;

    /// Appends one Boltzmann draw at parameter `z` to `out`; returns its size.
    fn draw_into(&self, z: f64, rng: &mut RandomSource, stats: &mut SamplerStats, out: &mut Vec<u64>)
        -> Result<u64>;

    fn decode(&self, record: &[u64]) -> Summand;
}

impl<T: SummandClass + ?Sized> SummandClass for &T {
    fn record_len(&self) -> usize {
        (**self).record_len()
    }

    fn ogf(&self, z: f64) -> f64 {
        (**self).ogf(z)
    }

    fn draw_into(&self, z: f64, rng: &mut RandomSource, stats: &mut SamplerStats, out: &mut Vec<u64>)
        -> Result<u64> {
        (**self).draw_into(z, rng, stats, out)
    }

    fn decode(&self, record: &[u64]) -> Summand {
        (**self).decode(record)
    }
}

fn horner(weights: &[f64], z: f64) -> f64 {
    weights.iter().rev().fold(0.0, |acc, &b| (acc + b) * z)
}

/// Nonempty multisets over `d` colors of size at most `n`; the energy
/// states of the condensate model.
#[derive(Clone, Debug)]
pub struct ColoredSummands {
    colors: usize,
    truncation: u64,
    weights: Vec<f64>,
}

impl ColoredSummands {
    pub fn new(colors: u32, truncation: u64) -> Result<Self> {
        if colors == 0 || truncation == 0 {
            return Err(Error::OutOfRange("colored summands need d >= 1 and n >= 1".into()));
        }
        let d = colors as f64;
        let mut weights = Vec::with_capacity(truncation as usize);
        let mut b = 1.0;
        for k in 1..=truncation {
            b *= (k as f64 + d - 1.0) / k as f64;
            weights.push(b);
        }
        Ok(Self {
            colors: colors as usize,
            truncation,
            weights,
        })
    }

    pub fn colors(&self) -> usize {
        self.colors
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }
}

impl SummandClass for ColoredSummands {
    fn record_len(&self) -> usize {
        self.colors
    }

    fn ogf(&self, z: f64) -> f64 {
        horner(&self.weights, z)
    }

    fn draw_into(&self, z: f64, rng: &mut RandomSource, stats: &mut SamplerStats, out: &mut Vec<u64>)
        -> Result<u64> {
        draw_colored(self.colors, self.truncation, z, rng, stats, out)
    }

    fn decode(&self, record: &[u64]) -> Summand {
        Summand::colored(EnergyState::new(record.to_vec()).expect("nonempty colored record"))
    }
}

/// Size by zero-truncated negative binomial, retried until it fits the
/// truncation, then a uniform multiset of that size.
fn draw_colored(
    colors: usize,
    truncation: u64,
    z: f64,
    rng: &mut RandomSource,
    stats: &mut SamplerStats,
    out: &mut Vec<u64>,
) -> Result<u64> {
    let params = NegBinParams::new(colors as u64, z)?;
    for _ in 0..INNER_RETRY_CAP {
        stats.inner_draws += 1;
        let m = sample_negbin_positive(params, rng)?;
        if m <= truncation {
            push_uniform_multiset(m, colors, rng, out);
            return Ok(m);
        }
        stats.inner_retries += 1;
    }
    Err(Error::RetryCapExhausted {
        context: "colored summand size test",
        cap: INNER_RETRY_CAP,
    })
}

/// Stars and bars into `out`, `d` words.
fn push_uniform_multiset(m: u64, d: usize, rng: &mut RandomSource, out: &mut Vec<u64>) {
    if d == 1 {
        out.push(m);
        return;
    }
    let bars = d - 1;
    if bars > SMALL_BARS {
        let base = out.len();
        out.resize(base + d, 0);
        for (part, c) in sample_weak_composition(m, d as u64, rng) {
            out[base + part as usize] = c;
        }
        return;
    }
    let slots = m + bars as u64;
    let mut chosen = [0u64; SMALL_BARS];
    for (filled, j) in (slots - bars as u64..slots).enumerate() {
        let t = rng.uniform_below(j + 1);
        chosen[filled] = if chosen[..filled].contains(&t) { j } else { t };
    }
    let chosen = &mut chosen[..bars];
    chosen.sort_unstable();
    let mut start = 0;
    for &p in chosen.iter() {
        out.push(p - start);
        start = p + 1;
    }
    out.push(slots - start);
}

/// One Boltzmann-distributed colored multiset of size at most `n` at
/// parameter `lambda`.
pub fn sample_colored_summand(colors: u32, truncation: u64, lambda: f64, rng: &mut RandomSource) -> Result<EnergyState> {
    if colors == 0 || truncation == 0 {
        return Err(Error::OutOfRange("colored summands need d >= 1 and n >= 1".into()));
    }
    let mut out = Vec::with_capacity(colors as usize);
    let mut stats = SamplerStats::default();
    draw_colored(colors as usize, truncation, lambda, rng, &mut stats, &mut out)?;
    EnergyState::new(out)
}

/// Summands of size `k <= n` in `b_k` distinct types labelled `1..=b_k`. The size draw inverts `b_k z^k / A(z)` term by
/// term, so each draw costs O(n); intended for moderate truncations.
#[derive(Clone, Debug)]
pub struct WeightedSummands {
    counts: Vec<u64>,
    weights: Vec<f64>,
}

impl WeightedSummands {
    pub fn new(spec: &ClassSpec) -> Result<Self> {
        let counts = spec
            .weight_counts()
            .iter()
            .map(|b| b.to_u64().ok_or_else(|| Error::BudgetExceeded("weight exceeds u64".into())))
            .collect::<Result<Vec<u64>>>()?;
        let weights = counts.iter().map(|&b| b as f64).collect();
        Ok(Self { counts, weights })
    }
}

impl SummandClass for WeightedSummands {
    fn record_len(&self) -> usize {
        2
    }

    fn ogf(&self, z: f64) -> f64 {
        horner(&self.weights, z)
    }

    fn draw_into(&self, z: f64, rng: &mut RandomSource, stats: &mut SamplerStats, out: &mut Vec<u64>)
        -> Result<u64> {
        stats.inner_draws += 1;
        let target = rng.uniform_open() * self.ogf(z);
        let mut acc = 0.0;
        let mut zk = 1.0;
        let mut last = 0;
        for (i, &b) in self.weights.iter().enumerate() {
            zk *= z;
            if b > 0.0 {
                last = i;
            }
            acc += b * zk;
            if acc >= target && b > 0.0 {
                break;
            }
        }
        let k = last as u64 + 1;
        out.push(k);
        out.push(rng.uniform_below(self.counts[last]) + 1);
        Ok(k)
    }

    fn decode(&self, record: &[u64]) -> Summand {
        Summand::indexed(record[0], record[1]).expect("positive size and index")
    }
}

/// Reusable buffers for one construction: encoded summands and the
/// multiplicity each contributes.
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    pub(crate) records: Vec<u64>,
    pub(crate) mults: Vec<u64>,
}

impl Scratch {
    pub(crate) fn clear(&mut self) {
        self.records.clear();
        self.mults.clear();
    }
}

/// Boltzmann sampler for `MSet(A)` at parameter `lambda`.
///
/// Draws the largest scale `k0`, then for each `k <= k0` a Poisson number of
/// inner objects at `lambda^k` (at least one at `k0`), each added with
/// multiplicity `k`.
#[derive(Clone, Debug)]
pub struct MultisetSampler<C> {
    class: C,
    lambda: f64,
    max_index: MaxIndex,
    powers: Vec<f64>,
}

impl<C: SummandClass> MultisetSampler<C> {
    pub fn new(class: C, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::OutOfRange(format!("multiset parameter {lambda} outside (0, 1)")));
        }
        let max_index = MaxIndex::new(|z| class.ogf(z), lambda)?;
        let ln = lambda.ln();
        let powers = (1..=max_index.support_end()).map(|k| (k as f64 * ln).exp()).collect();
        Ok(Self {
            class,
            lambda,
            max_index,
            powers,
        })
    }

    pub fn class(&self) -> &C {
        &self.class
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn max_index(&self) -> &MaxIndex {
        &self.max_index
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
        stats: &mut SamplerStats,
        scratch: &mut Scratch,
    ) -> Result<Option<u64>> {
        scratch.clear();
        let k0 = self.max_index.sample(rng);
        let limit = cap.unwrap_or(u64::MAX);
        let mut size = 0u64;
        for k in 1..=k0 {
            let rate = self.max_index.rate(k);
            let m = if k < k0 {
                poisson_unchecked(rate, rng)
            } else {
                poisson_positive_unchecked(rate, rng)?
            };
            let z = self.powers[k - 1];
            for _ in 0..m {
                let s = self.class.draw_into(z, rng, stats, &mut scratch.records)?;
                scratch.mults.push(k as u64);
                size += k as u64 * s;
                if size >= limit {
                    return Ok(None);
                }
            }
        }
        Ok(Some(size))
    }

    pub(crate) fn materialize(&self, scratch: &Scratch) -> Partition {
        let width = self.class.record_len();
        let mut p = Partition::empty();
        for (record, &k) in scratch.records.chunks_exact(width).zip(&scratch.mults) {
            p.add(self.class.decode(record), k);
        }
        p
    }
}

/// One Boltzmann draw from `MSet(inner)` at `lambda`.
pub fn sample_multiset_class<C: SummandClass>(inner: C, lambda: f64, rng: &mut RandomSource) -> Result<Partition> {
    MultisetSampler::new(inner, lambda)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_multiset_words_sum_to_size() {
        let mut rng = RandomSource::seeded(1);
        for d in [1usize, 2, 3, 7, 20] {
            for m in [1u64, 2, 5, 40] {
                let mut out = Vec::new();
                push_uniform_multiset(m, d, &mut rng, &mut out);
                assert_eq!(out.len(), d);
                assert_eq!(out.iter().sum::<u64>(), m);
            }
        }
    }

    #[test]
    fn tiny_parameter_gives_empty() {
        let s = MultisetSampler::new(ColoredSummands::new(3, 10).unwrap(), 1e-9).unwrap();
        let mut rng = RandomSource::seeded(5);
        let empties = (0..1000).filter(|_| s.sample(&mut rng).unwrap().is_empty()).count();
        assert!(empties >= 999);
    }

    #[test]
    fn cap_abandons_large_draws() {
        let s = MultisetSampler::new(ColoredSummands::new(3, 50).unwrap(), 0.8).unwrap();
        let mut rng = RandomSource::seeded(9);
        let mut stats = SamplerStats::default();
        for _ in 0..200 {
            if let Some(p) = s.sample_capped(Some(10), &mut rng, &mut stats).unwrap() {
                assert!(p.size() < 10);
            }
        }
    }

    #[test]
    fn colored_summand_respects_truncation() {
        let mut rng = RandomSource::seeded(2);
        for _ in 0..1000 {
            let e = sample_colored_summand(3, 4, 0.9, &mut rng).unwrap();
            assert!((1..=4).contains(&e.cardinality()));
            assert_eq!(e.colors(), 3);
        }
        assert!(sample_colored_summand(0, 4, 0.5, &mut rng).is_err());
        assert!(sample_colored_summand(3, 4, 1.5, &mut rng).is_err());
    }

    #[test]
    fn weighted_summand_sizes_are_in_range() {
        let w = WeightedSummands::new(&ClassSpec::polynomial_int(&[0, 1], 6).unwrap()).unwrap();
        let mut rng = RandomSource::seeded(3);
        let mut stats = SamplerStats::default();
        for _ in 0..1000 {
            let mut out = Vec::new();
            let k = w.draw_into(0.7, &mut rng, &mut stats, &mut out).unwrap();
            assert!((1..=6).contains(&k));
            assert!((1..=k).contains(&out[1]));
        }
    }
}
