//! Exact samplers and mass/CDF evaluators for the primitive distributions.
//!
//! Conventions follow the multiset samplers that consume them:
//!
//! * `Geometric(q)` counts continuations: `P(j) = q^j (1 - q)`.
//! * `NegativeBinomial(r, q)` is a sum of `r` such geometrics:
//!   `P(k) = C(k + r - 1, r - 1) q^k (1 - q)^r`.
//! * `Poisson(rate)` and the zero-truncated `Poisson>=1(rate)`.
//! * `MaxIndex` is the law of the largest multiplicity scale in the exp-log
//!   decomposition of a multiset sampler.

use rand::seq::index;
use rand_distr::Distribution;
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};
use crate::partition::EnergyState;
use crate::rng::RandomSource;

/// Rates at or below this use sequential inversion.
pub const POISSON_INVERSION_MAX_RATE: f64 = 30.0;

/// Cap on retry loops inside primitive samplers.
pub const PRIMITIVE_RETRY_CAP: u64 = 1_000_000;

/// Residual log-mass below which the MaxIndex product is truncated.
pub const MAX_INDEX_TAIL_EPS: f64 = 1e-15;

/// Largest MaxIndex table; beyond this the parameter is too close to 1.
pub const MAX_INDEX_TABLE_LIMIT: usize = 10_000_000;

/// Failure counts up to this are sampled as explicit sums of geometrics.
const NEGBIN_DIRECT_MAX_FAILURES: u64 = 32;

fn check_unit_open(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OutOfRange(format!("{name} = {x} outside (0, 1)")));
    }
    Ok(())
}

/// Geometric law `P(j) = q^j (1 - q)` with continuation probability `q`.
#[derive(Clone, Copy, Debug)]
pub struct Geometric {
    q: f64,
    ln_q: f64,
}

impl Geometric {
    pub fn new(q: f64) -> Result<Self> {
        check_unit_open("geometric continuation probability", q)?;
        Ok(Self { q, ln_q: q.ln() })
    }

    pub fn continuation(&self) -> f64 {
        self.q
    }

    /// Inversion: `floor(ln u / ln q)`.
    #[inline]
    pub fn sample(&self, rng: &mut RandomSource) -> u64 {
        let u = rng.uniform_open();
        // floor(ln u / ln q) >= 1 exactly when u <= q.
        if u > self.q {
            return 0;
        }
        (u.ln() / self.ln_q).floor() as u64
    }

    pub fn pmf(&self, j: u64) -> f64 {
        (j as f64 * self.ln_q).exp() * (1.0 - self.q)
    }

    pub fn cdf(&self, j: u64) -> f64 {
        -((j + 1) as f64 * self.ln_q).exp_m1()
    }
}

pub fn sample_geometric(q: f64, rng: &mut RandomSource) -> Result<u64> {
    Ok(Geometric::new(q)?.sample(rng))
}

fn check_rate(rate: f64) -> Result<()> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::OutOfRange(format!("Poisson rate {rate} must be positive and finite")));
    }
    Ok(())
}

/// Poisson variate; sequential inversion for small rates, PTRS rejection above.
pub fn sample_poisson(rate: f64, rng: &mut RandomSource) -> Result<u64> {
    check_rate(rate)?;
    Ok(poisson_unchecked(rate, rng))
}

#[inline]
pub(crate) fn poisson_unchecked(rate: f64, rng: &mut RandomSource) -> u64 {
    if rate <= POISSON_INVERSION_MAX_RATE {
        let u = rng.uniform_open();
        let mut p = (-rate).exp();
        let mut cum = p;
        let mut k = 0u64;
        while u > cum {
            k += 1;
            p *= rate / k as f64;
            cum += p;
            if p < f64::MIN_POSITIVE {
                break;
            }
        }
        k
    } else {
        let law = rand_distr::Poisson::new(rate).expect("validated rate");
        law.sample(rng) as u64
    }
}

/// Zero-truncated Poisson variate.
///
/// Small rates invert the truncated mass function directly, starting at
/// `P(1) = rate / (e^rate - 1)`; large rates resample until nonzero.
pub fn sample_poisson_positive(rate: f64, rng: &mut RandomSource) -> Result<u64> {
    check_rate(rate)?;
    poisson_positive_unchecked(rate, rng)
}

pub(crate) fn poisson_positive_unchecked(rate: f64, rng: &mut RandomSource) -> Result<u64> {
    if rate <= POISSON_INVERSION_MAX_RATE {
        let u = rng.uniform_open();
        let mut p = rate / rate.exp_m1();
        let mut cum = p;
        let mut k = 1u64;
        while u > cum {
            k += 1;
            p *= rate / k as f64;
            cum += p;
            if p < f64::MIN_POSITIVE {
                break;
            }
        }
        Ok(k)
    } else {
        for _ in 0..PRIMITIVE_RETRY_CAP {
            let k = poisson_unchecked(rate, rng);
            if k > 0 {
                return Ok(k);
            }
        }
        Err(Error::RetryCapExhausted {
            context: "zero-truncated Poisson",
            cap: PRIMITIVE_RETRY_CAP,
        })
    }
}

pub fn poisson_pmf(rate: f64, k: u64) -> f64 {
    (k as f64 * rate.ln() - rate - ln_factorial(k)).exp()
}

pub fn poisson_positive_pmf(rate: f64, k: u64) -> f64 {
    if k == 0 {
        return 0.0;
    }
    (k as f64 * rate.ln() - ln_factorial(k)).exp() / rate.exp_m1()
}

fn ln_factorial(k: u64) -> f64 {
    statrs::function::gamma::ln_gamma(k as f64 + 1.0)
}

/// Negative binomial parameters: `failures` geometric blocks, each continuing
/// with probability `success`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NegBinParams {
    failures: u64,
    success: f64,
}

impl NegBinParams {
    pub fn new(failures: u64, success: f64) -> Result<Self> {
        if failures == 0 {
            return Err(Error::OutOfRange("negative binomial needs at least one failure".into()));
        }
        check_unit_open("negative binomial success probability", success)?;
        Ok(Self { failures, success })
    }

    pub fn failures(&self) -> u64 {
        self.failures
    }

    pub fn success(&self) -> f64 {
        self.success
    }

    pub fn mean(&self) -> f64 {
        self.failures as f64 * self.success / (1.0 - self.success)
    }

    /// `P(W = 0) = (1 - q)^r`.
    pub fn prob_zero(&self) -> f64 {
        (self.failures as f64 * (-self.success).ln_1p()).exp()
    }
}

/// Negative binomial variate.
///
/// Up to 32 failures this is the literal sum of geometrics; beyond that the
/// gamma-Poisson mixture is used, which has the same law.
pub fn sample_negbin(params: NegBinParams, rng: &mut RandomSource) -> u64 {
    let NegBinParams { failures, success } = params;
    if failures <= NEGBIN_DIRECT_MAX_FAILURES {
        let g = Geometric::new(success).expect("validated params");
        (0..failures).map(|_| g.sample(rng)).sum()
    } else {
        let scale = success / (1.0 - success);
        let gamma = rand_distr::Gamma::new(failures as f64, scale).expect("validated params");
        let rate: f64 = gamma.sample(rng);
        if rate > 0.0 && rate.is_finite() {
            poisson_unchecked(rate, rng)
        } else {
            0
        }
    }
}

/// Zero-truncated negative binomial variate.
///
/// For the geometric-sum route the first nonzero block is chosen by
/// inverting its truncated geometric index law; that block contributes
/// `1 + Geometric` by memorylessness and later blocks are unconstrained.
pub fn sample_negbin_positive(params: NegBinParams, rng: &mut RandomSource) -> Result<u64> {
    let NegBinParams { failures, success } = params;
    if failures <= NEGBIN_DIRECT_MAX_FAILURES {
        let g = Geometric::new(success).expect("validated params");
        let ln_zero = (-success).ln_1p();
        let mass_nonzero = -(failures as f64 * ln_zero).exp_m1();
        let u = rng.uniform_open();
        let skipped = ((-u * mass_nonzero).ln_1p() / ln_zero).floor();
        let first = if skipped.is_finite() && skipped >= 0.0 {
            (skipped as u64).min(failures - 1)
        } else {
            0
        };
        let rest: u64 = (first + 1..failures).map(|_| g.sample(rng)).sum();
        return Ok(1 + g.sample(rng) + rest);
    }

    let zero = params.prob_zero();
    if zero <= 0.75 {
        for _ in 0..PRIMITIVE_RETRY_CAP {
            let k = sample_negbin(params, rng);
            if k > 0 {
                return Ok(k);
            }
        }
        return Err(Error::RetryCapExhausted {
            context: "zero-truncated negative binomial",
            cap: PRIMITIVE_RETRY_CAP,
        });
    }
    // Small mean: invert the truncated mass function from k = 1.
    let r = failures as f64;
    let u = rng.uniform_open();
    let mut p = r * success * zero / (1.0 - zero);
    let mut cum = p;
    let mut k = 1u64;
    while u > cum {
        p *= (k as f64 + r) / (k as f64 + 1.0) * success;
        k += 1;
        cum += p;
        if p < f64::MIN_POSITIVE {
            break;
        }
    }
    Ok(k)
}

pub fn negbin_pmf(params: NegBinParams, k: u64) -> f64 {
    let r = params.failures as f64;
    let kf = k as f64;
    let ln_binom = statrs::function::gamma::ln_gamma(kf + r) - ln_factorial(k)
        - statrs::function::gamma::ln_gamma(r);
    (ln_binom + kf * params.success.ln() + r * (-params.success).ln_1p()).exp()
}

/// `P(W <= k) = 1 - I_q(k + 1, r)` through the regularized incomplete beta.
pub fn negbin_cdf(params: NegBinParams, k: u64) -> f64 {
    1.0 - beta_reg(k as f64 + 1.0, params.failures as f64, params.success)
}

/// Upper bound `1 - (1 - q^(n/r))^r` on `P(W > n)`.
pub fn negbin_tail_bound(params: NegBinParams, n: u64) -> f64 {
    let r = params.failures as f64;
    let x = (n as f64 / r * params.success.ln()).exp();
    -(r * (-x).ln_1p()).exp_m1()
}

/// Law of the largest multiplicity scale `k0` in the exp-log decomposition
/// of `MSet(A)` at parameter `lambda`:
/// `P(k0 <= k) = prod_{j > k} exp(-A(lambda^j) / j)`.
///
/// `k0 = 0` is the empty multiset, with probability `1 / C(lambda)`.
#[derive(Clone, Debug)]
pub struct MaxIndex {
    /// `A(lambda^j) / j` for `j = 1..=J`.
    rates: Vec<f64>,
    /// `sum_{j > k} rates` for `k = 0..=J`.
    tail: Vec<f64>,
    /// `sum_{j <= k} rates` for `k = 0..=J`.
    prefix: Vec<f64>,
}

impl MaxIndex {
    /// Tabulates the CDF. `ogf` is the inner generating function `A`, which
    /// must have nonnegative coefficients and no constant term.
    pub fn new<A: Fn(f64) -> f64>(ogf: A, lambda: f64) -> Result<Self> {
        check_unit_open("MaxIndex parameter", lambda)?;
        let ln_lambda = lambda.ln();
        let ratio = lambda / (1.0 - lambda);
        let mut rates = Vec::new();
        loop {
            let j = rates.len() + 1;
            let a = ogf((j as f64 * ln_lambda).exp());
            rates.push(a / j as f64);
            // A(c z) <= c A(z) for c <= 1, so the remainder after j is at
            // most A(lambda^j) / (j + 1) * lambda / (1 - lambda).
            if a / (j + 1) as f64 * ratio < MAX_INDEX_TAIL_EPS {
                break;
            }
            if rates.len() >= MAX_INDEX_TABLE_LIMIT {
                return Err(Error::BudgetExceeded(format!(
                    "MaxIndex table for lambda = {lambda} exceeds {MAX_INDEX_TABLE_LIMIT} entries"
                )));
            }
        }
        let len = rates.len();
        let mut tail = vec![0.0; len + 1];
        for k in (0..len).rev() {
            tail[k] = tail[k + 1] + rates[k];
        }
        let mut prefix = vec![0.0; len + 1];
        for k in 0..len {
            prefix[k + 1] = prefix[k] + rates[k];
        }
        Ok(Self { rates, tail, prefix })
    }

    /// Largest index with nonnegligible mass.
    pub fn support_end(&self) -> usize {
        self.rates.len()
    }

    /// `A(lambda^j) / j`, indexed from `j = 1`.
    pub fn rate(&self, j: usize) -> f64 {
        self.rates[j - 1]
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// `ln C(lambda)` as accumulated by the table.
    pub fn log_partition_function(&self) -> f64 {
        self.tail[0]
    }

    /// `P(k0 <= k)` in product form.
    pub fn cdf(&self, k: usize) -> f64 {
        match self.tail.get(k) {
            Some(&s) => (-s).exp(),
            None => 1.0,
        }
    }

    /// `P(k0 <= k)` in ratio form: `prod_{j <= k} / prod_{j <= J}`.
    pub fn cdf_ratio_form(&self, k: usize) -> f64 {
        let k = k.min(self.rates.len());
        (self.prefix[k] - self.prefix[self.rates.len()]).exp()
    }

    pub fn prob_empty(&self) -> f64 {
        self.cdf(0)
    }

    /// Inversion: the smallest `k` with `P(k0 <= k) >= u`.
    #[inline]
    pub fn sample(&self, rng: &mut RandomSource) -> usize {
        let threshold = -rng.uniform_open().ln();
        self.tail.partition_point(|&s| s > threshold)
    }
}

pub fn sample_max_index<A: Fn(f64) -> f64>(
    ogf: A,
    lambda: f64,
    rng: &mut RandomSource,
) -> Result<usize> {
    Ok(MaxIndex::new(ogf, lambda)?.sample(rng))
}

/// Uniform weak composition of `total` into `parts` ordered parts, returned
/// sparsely as `(part index, count)` with zero parts omitted, ascending.
///
/// Stars and bars: `total` stars and `parts - 1` bars over
/// `total + parts - 1` slots. Whichever of the two is rarer is placed by a
/// uniform subset draw.
pub fn sample_weak_composition(total: u64, parts: u64, rng: &mut RandomSource) -> Vec<(u64, u64)> {
    debug_assert!(parts >= 1);
    if total == 0 {
        return Vec::new();
    }
    if parts == 1 {
        return vec![(0, total)];
    }
    let slots = (total + parts - 1) as usize;
    let bars = parts - 1;
    let mut out: Vec<(u64, u64)> = Vec::new();
    if total <= bars {
        let mut stars = index::sample(rng, slots, total as usize).into_vec();
        stars.sort_unstable();
        for (i, &pos) in stars.iter().enumerate() {
            let part = (pos - i) as u64;
            match out.last_mut() {
                Some((p, c)) if *p == part => *c += 1,
                _ => out.push((part, 1)),
            }
        }
    } else {
        let mut bar_pos = index::sample(rng, slots, bars as usize).into_vec();
        bar_pos.sort_unstable();
        let mut prev: i64 = -1;
        for (part, &pos) in bar_pos.iter().enumerate() {
            let gap = (pos as i64 - prev - 1) as u64;
            if gap > 0 {
                out.push((part as u64, gap));
            }
            prev = pos as i64;
        }
        let gap = (slots as i64 - prev - 1) as u64;
        if gap > 0 {
            out.push((bars, gap));
        }
    }
    out
}

/// Uniform draw among the `C(m + d - 1, d - 1)` multisets of size `m` over `d` colors.
pub fn sample_uniform_multiset(m: u64, d: usize, rng: &mut RandomSource) -> Result<EnergyState> {
    if m == 0 {
        return Err(Error::OutOfRange("uniform multiset of size 0 requested".into()));
    }
    if d == 0 {
        return Err(Error::OutOfRange("uniform multiset over zero colors".into()));
    }
    let mut counts = vec![0u64; d];
    for (part, c) in sample_weak_composition(m, d as u64, rng) {
        counts[part as usize] = c;
    }
    EnergyState::new(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn kolmogorov(empirical: &[u64], draws: u64, cdf: impl Fn(u64) -> f64) -> f64 {
        let mut acc = 0u64;
        let mut worst: f64 = 0.0;
        for (k, &c) in empirical.iter().enumerate() {
            acc += c;
            worst = worst.max((acc as f64 / draws as f64 - cdf(k as u64)).abs());
        }
        worst
    }

    #[test]
    fn geometric_edge_parameters() {
        assert!(Geometric::new(0.0).is_err());
        assert!(Geometric::new(1.0).is_err());
        assert!(Geometric::new(f64::NAN).is_err());
        let g = Geometric::new(1e-300).unwrap();
        let mut rng = RandomSource::seeded(3);
        assert!((0..10_000).all(|_| g.sample(&mut rng) == 0));
    }

    #[test]
    fn geometric_moments() {
        let g = Geometric::new(0.5).unwrap();
        let mut rng = RandomSource::seeded(11);
        let n = 1_000_000;
        let mut sum = 0u64;
        let mut zeros = 0u64;
        for _ in 0..n {
            let x = g.sample(&mut rng);
            sum += x;
            zeros += (x == 0) as u64;
        }
        assert!((sum as f64 / n as f64 - 1.0).abs() < 0.01);
        assert!((zeros as f64 / n as f64 - 0.5).abs() < 0.005);

        let g = Geometric::new(0.25).unwrap();
        let zeros = (0..n).filter(|_| g.sample(&mut rng) == 0).count();
        assert!((zeros as f64 / n as f64 - 0.75).abs() < 0.005);
    }

    #[test]
    fn poisson_rejects_bad_rates() {
        let mut rng = RandomSource::seeded(0);
        for rate in [0.0, -1.0, f64::INFINITY, f64::NAN] {
            assert!(sample_poisson(rate, &mut rng).is_err());
            assert!(sample_poisson_positive(rate, &mut rng).is_err());
        }
    }

    #[test]
    fn poisson_mean_and_truncated_mass_at_one() {
        let mut rng = RandomSource::seeded(5);
        let n = 1_000_000;
        let mean = (0..n).map(|_| sample_poisson(2.0, &mut rng).unwrap()).sum::<u64>() as f64 / n as f64;
        assert!((mean - 2.0).abs() < 0.01, "mean {mean}");

        let expected = 0.1 / 0.1f64.exp_m1();
        assert_relative_eq!(poisson_positive_pmf(0.1, 1), expected, max_relative = 1e-12);
        assert!((expected - 0.9508).abs() < 1e-4);
        let ones = (0..n)
            .filter(|_| sample_poisson_positive(0.1, &mut rng).unwrap() == 1)
            .count();
        assert!((ones as f64 / n as f64 - expected).abs() < 0.002);
    }

    #[test]
    fn truncated_poisson_never_zero() {
        let mut rng = RandomSource::seeded(9);
        for rate in [1e-12, 1e-3, 0.5, 3.0, 45.0] {
            for _ in 0..200_000 {
                assert!(sample_poisson_positive(rate, &mut rng).unwrap() >= 1);
            }
        }
    }

    #[test]
    fn large_rate_poisson_mean() {
        let mut rng = RandomSource::seeded(21);
        let n = 200_000;
        let mean = (0..n).map(|_| sample_poisson(350.0, &mut rng).unwrap()).sum::<u64>() as f64 / n as f64;
        assert!((mean - 350.0).abs() < 0.3, "mean {mean}");
    }

    #[test]
    fn negbin_single_failure_is_geometric() {
        let params = NegBinParams::new(1, 0.5).unwrap();
        let g = Geometric::new(0.5).unwrap();
        let mut rng = RandomSource::seeded(17);
        let n = 1_000_000u64;
        let mut hist = vec![0u64; 64];
        for _ in 0..n {
            let k = sample_negbin(params, &mut rng) as usize;
            hist[k.min(63)] += 1;
        }
        assert!(kolmogorov(&hist, n, |k| g.cdf(k)) < 0.002);
    }

    #[test]
    fn negbin_moments_and_mass() {
        let params = NegBinParams::new(3, 0.5).unwrap();
        assert_relative_eq!(negbin_pmf(params, 2), 0.1875, max_relative = 1e-12);
        let mut rng = RandomSource::seeded(23);
        let n = 1_000_000;
        let mut sum = 0u64;
        let mut twos = 0u64;
        for _ in 0..n {
            let k = sample_negbin(params, &mut rng);
            sum += k;
            twos += (k == 2) as u64;
        }
        assert!((sum as f64 / n as f64 - 3.0).abs() < 0.02);
        assert!((twos as f64 / n as f64 - 0.1875).abs() < 0.002);
    }

    #[test]
    fn negbin_many_failures_mean() {
        let params = NegBinParams::new(500, 0.2).unwrap();
        let mut rng = RandomSource::seeded(29);
        let n = 200_000;
        let mean = (0..n).map(|_| sample_negbin(params, &mut rng)).sum::<u64>() as f64 / n as f64;
        assert!((mean - params.mean()).abs() < 0.1, "mean {mean} vs {}", params.mean());
    }

    #[test]
    fn negbin_cdf_closed_forms() {
        for &q in &[0.1, 0.5, 0.9] {
            let params = NegBinParams::new(1, q).unwrap();
            for k in 0..20u64 {
                assert_relative_eq!(negbin_cdf(params, k), 1.0 - q.powi(k as i32 + 1), epsilon = 1e-12);
            }
        }
        // sum_{j<=2} C(j+2,2) 0.5^j 0.5^3 = (1 + 1.5 + 1.5) / 8.
        let params = NegBinParams::new(3, 0.5).unwrap();
        assert!((negbin_cdf(params, 2) - 0.5).abs() < 1e-12);
        assert!((negbin_cdf(params, 10_000) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_bound_edge_cases() {
        let params = NegBinParams::new(4, 0.3).unwrap();
        assert_eq!(negbin_tail_bound(params, 0), 1.0);
        let params = NegBinParams::new(1, 0.7).unwrap();
        for n in 0..30u64 {
            let bound = negbin_tail_bound(params, n);
            assert_relative_eq!(bound, 0.7f64.powi(n as i32), max_relative = 1e-12);
            assert!(bound >= 0.7f64.powi(n as i32 + 1));
        }
    }

    #[test]
    fn max_index_empty_probability_limits() {
        let mut rng = RandomSource::seeded(31);
        let mi = MaxIndex::new(|z| 3.0 * z, 1e-9).unwrap();
        assert!((0..10_000).all(|_| mi.sample(&mut rng) == 0));
        assert!(MaxIndex::new(|z| z, 1.0).is_err());
        assert!(MaxIndex::new(|z| z, 0.0).is_err());
    }

    #[test]
    fn max_index_cdf_forms_agree() {
        let ogf = |z: f64| (1..=30).map(|k| (k * (k + 1) / 2 + k) as f64 * z.powi(k)).sum::<f64>();
        let mi = MaxIndex::new(ogf, 0.5).unwrap();
        let mut prev = 0.0;
        for k in 0..=mi.support_end() + 2 {
            let c = mi.cdf(k);
            assert!(c >= prev);
            assert!((c - mi.cdf_ratio_form(k)).abs() < 1e-12, "k={k}");
            prev = c;
        }
        assert_eq!(mi.cdf(mi.support_end()), 1.0);
    }

    #[test]
    fn uniform_multiset_single_color() {
        let mut rng = RandomSource::seeded(1);
        let s = sample_uniform_multiset(7, 1, &mut rng).unwrap();
        assert_eq!(s.counts(), &[7]);
        assert!(sample_uniform_multiset(0, 3, &mut rng).is_err());
    }

    #[test]
    fn weak_composition_totals() {
        let mut rng = RandomSource::seeded(2);
        for (total, parts) in [(0u64, 5u64), (1, 1), (3, 10), (10, 3), (7, 8), (50, 50)] {
            for _ in 0..200 {
                let comp = sample_weak_composition(total, parts, &mut rng);
                assert_eq!(comp.iter().map(|&(_, c)| c).sum::<u64>(), total);
                assert!(comp.iter().all(|&(p, c)| p < parts && c > 0));
                assert!(comp.windows(2).all(|w| w[0].0 < w[1].0));
            }
        }
    }
}
