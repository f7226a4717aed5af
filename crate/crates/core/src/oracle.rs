//! Ground truth for the samplers: exact counts, exhaustive enumeration and
//! chi-square goodness-of-fit.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::class::{ClassKind, ClassSpec};
use crate::error::{Error, Result};
use crate::partition::{CanonicalKey, EnergyState, Partition, Summand};

/// Largest degree accepted by [`count`].
pub const COUNT_BUDGET: usize = 10_000;
/// Largest universe accepted by [`enumerate`].
pub const ENUMERATION_BUDGET: u64 = 1_000_000;

/// Exact counts `c_0..=c_N` of the truncated class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    counts: Vec<BigUint>,
}

impl CountTable {
    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn get(&self, j: usize) -> Option<&BigUint> {
        self.counts.get(j)
    }

    pub fn max_degree(&self) -> usize {
        self.counts.len() - 1
    }
}

/// Coefficients of `prod_{k=1}^{n} (1 - z^k)^{-b_k}` up to `z^max_degree`.
///
/// Each size `k` multiplies the running series by the multichoose series
/// `sum_j C(j + b_k - 1, b_k - 1) z^{kj}`, in place from high degree down.
pub fn count(spec: &ClassSpec, max_degree: usize) -> Result<CountTable> {
    if max_degree > COUNT_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "count up to {max_degree} exceeds budget {COUNT_BUDGET}"
        )));
    }
    let mut counts = vec![BigUint::zero(); max_degree + 1];
    counts[0] = BigUint::one();
    for k in 1..=max_degree.min(spec.truncation()) {
        let b = spec.weight_count(k)?;
        let terms = max_degree / k;
        let mut series = Vec::with_capacity(terms + 1);
        series.push(BigUint::one());
        for j in 1..=terms {
            let prev: &BigUint = &series[j - 1];
            series.push(prev * (&b + BigUint::from(j - 1)) / BigUint::from(j));
        }
        for m in (k..=max_degree).rev() {
            let mut acc = BigUint::zero();
            for (j, coeff) in series.iter().enumerate().skip(1) {
                let shift = j * k;
                if shift > m {
                    break;
                }
                acc += coeff * &counts[m - shift];
            }
            counts[m] += acc;
        }
    }
    Ok(CountTable { counts })
}

/// Every partition of one size, sorted by canonical key.
#[derive(Clone, Debug)]
pub struct ConfigurationList {
    size: u64,
    partitions: Vec<Partition>,
    keys: Vec<CanonicalKey>,
}

impl ConfigurationList {
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn keys(&self) -> &[CanonicalKey] {
        &self.keys
    }

    pub fn index_of(&self, key: &CanonicalKey) -> Option<usize> {
        self.keys.binary_search(key).ok()
    }
}

/// Summand types of size `k` in canonical order.
fn summands_of_size(spec: &ClassSpec, k: u64) -> Result<Vec<Summand>> {
    Ok(match spec.kind() {
        ClassKind::Colored { colors } => EnergyState::all_with_cardinality(k, *colors as usize)
            .into_iter()
            .map(Summand::colored)
            .collect(),
        ClassKind::Polynomial { .. } => {
            let b = spec
                .weight_count(k as usize)?
                .to_u64()
                .ok_or_else(|| Error::BudgetExceeded(format!("b_{k} exceeds u64")))?;
            (1..=b).map(|i| Summand::indexed(k, i)).collect::<Result<_>>()?
        }
    })
}

/// All partitions of size `n`, by recursion over summands in order of
/// decreasing size.
pub fn enumerate(spec: &ClassSpec, n: u64) -> Result<ConfigurationList> {
    let expected = count(spec, n as usize)?.counts[n as usize].clone();
    if expected > BigUint::from(ENUMERATION_BUDGET) {
        return Err(Error::BudgetExceeded(format!(
            "{expected} configurations exceed budget {ENUMERATION_BUDGET}"
        )));
    }
    let mut items = Vec::new();
    for k in (1..=n.min(spec.truncation() as u64)).rev() {
        items.extend(summands_of_size(spec, k)?);
    }

    let mut out = Vec::new();
    let mut chosen: Vec<(usize, u64)> = Vec::new();
    walk(&items, 0, n, &mut chosen, &mut out);

    let mut partitions: Vec<Partition> = out
        .into_iter()
        .map(|parts| {
            Partition::from_parts(parts.into_iter().map(|(i, m)| (items[i].clone(), m)))
                .expect("positive multiplicities")
        })
        .collect();
    partitions.sort_by_cached_key(Partition::canonical_key);
    let keys: Vec<CanonicalKey> = partitions.iter().map(Partition::canonical_key).collect();
    debug_assert!(keys.windows(2).all(|w| w[0] < w[1]));
    debug_assert_eq!(BigUint::from(keys.len()), expected);
    Ok(ConfigurationList {
        size: n,
        partitions,
        keys,
    })
}

fn walk(
    items: &[Summand],
    at: usize,
    remaining: u64,
    chosen: &mut Vec<(usize, u64)>,
    out: &mut Vec<Vec<(usize, u64)>>,
) {
    if remaining == 0 {
        out.push(chosen.clone());
        return;
    }
    if at == items.len() {
        return;
    }
    let size = items[at].size();
    walk(items, at + 1, remaining, chosen, out);
    for mult in 1..=remaining / size {
        chosen.push((at, mult));
        walk(items, at + 1, remaining - mult * size, chosen, out);
        chosen.pop();
    }
}

/// Outcome of a Pearson chi-square test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub cells: usize,
}

fn survival(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .sf(statistic)
}

/// Pearson test of `samples` against the uniform law on `universe`.
pub fn chi_square_uniformity(samples: &[CanonicalKey], universe: &ConfigurationList) -> Result<ChiSquare> {
    let cells = universe.len();
    if cells == 0 {
        return Err(Error::OutOfRange("empty universe".into()));
    }
    let mut observed = vec![0u64; cells];
    for key in samples {
        let idx = universe
            .index_of(key)
            .ok_or_else(|| Error::SampleOutsideUniverse(key.to_string()))?;
        observed[idx] += 1;
    }
    let expected = samples.len() as f64 / cells as f64;
    if expected < 5.0 {
        return Err(Error::SparseCells { expected });
    }
    let statistic = observed
        .iter()
        .map(|&o| (o as f64 - expected).powi(2) / expected)
        .sum();
    Ok(ChiSquare {
        statistic,
        degrees_of_freedom: cells - 1,
        p_value: survival(statistic, cells - 1),
        cells,
    })
}

/// Pearson test of observed counts against cell probabilities.
///
/// Mass not covered by `probs` forms an extra tail cell whose observed count
/// is whatever `observed` does not account for out of `total`. Adjacent cells
/// are pooled left to right until each expects at least 5 draws.
pub fn chi_square_goodness_of_fit(observed: &[u64], probs: &[f64], total: u64) -> ChiSquare {
    assert_eq!(observed.len(), probs.len());
    let n = total as f64;
    let covered: f64 = probs.iter().sum();
    let seen: u64 = observed.iter().sum();
    let mut cells: Vec<(f64, f64)> = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| (o as f64, p * n))
        .collect();
    let tail_expected = (1.0 - covered).max(0.0) * n;
    let tail_observed = total.saturating_sub(seen) as f64;
    if tail_expected > 0.0 || tail_observed > 0.0 {
        cells.push((tail_observed, tail_expected));
    }

    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (o, e) in cells {
        acc.0 += o;
        acc.1 += e;
        if acc.1 >= 5.0 {
            pooled.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 > 0.0 || acc.1 > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => pooled.push(acc),
        }
    }
    let statistic = pooled
        .iter()
        .map(|&(o, e)| if e > 0.0 { (o - e).powi(2) / e } else if o > 0.0 { f64::INFINITY } else { 0.0 })
        .sum();
    let dof = pooled.len().saturating_sub(1);
    ChiSquare {
        statistic,
        degrees_of_freedom: dof,
        p_value: survival(statistic, dof),
        cells: pooled.len(),
    }
}

/// Pearson homogeneity test of two histograms over the same cells. Cells are
/// pooled left to right until each expects at least 5 draws in both samples.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquare {
    assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let total = (na + nb) as f64;
    let (fa, fb) = (na as f64 / total, nb as f64 / total);
    let mut pooled: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        acc.0 += x as f64;
        acc.1 += y as f64;
        let both = acc.0 + acc.1;
        if both * fa.min(fb) >= 5.0 {
            pooled.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.0 + acc.1 > 0.0 {
        match pooled.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => pooled.push(acc),
        }
    }
    let statistic = pooled
        .iter()
        .map(|&(x, y)| {
            let both = x + y;
            let (ea, eb) = (both * fa, both * fb);
            (x - ea).powi(2) / ea + (y - eb).powi(2) / eb
        })
        .sum();
    let dof = pooled.len().saturating_sub(1);
    ChiSquare {
        statistic,
        degrees_of_freedom: dof,
        p_value: survival(statistic, dof),
        cells: pooled.len(),
    }
}
