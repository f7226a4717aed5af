//! Unconditioned samplers against the Boltzmann law `c_j lambda^j / C(lambda)`,
//! with `c_j` from the counting oracle and `C` from the product form.

use boltzpart::{
    chi_square_goodness_of_fit, chi_square_two_sample, chi_square_uniformity, count, enumerate, ClassSpec,
    ColoredSummands, ExactSampler, Generator, IndependentSampler, MultisetSampler, OgfTable64, Partition,
    RandomSource, SamplerOptions, WeightedSummands,
};
use num_traits::ToPrimitive;

const ALPHA: f64 = 1e-3;

fn size_law(spec: &ClassSpec, lambda: f64, max: usize) -> Vec<f64> {
    let c = count(spec, max).unwrap();
    let ln_partition = OgfTable64::new(spec).log_partition_function(lambda).unwrap();
    (0..=max)
        .map(|j| c.counts()[j].to_f64().unwrap() * lambda.powi(j as i32) * (-ln_partition).exp())
        .collect()
}

fn check_sizes(label: &str, spec: &ClassSpec, lambda: f64, draws: u64, mut draw: impl FnMut() -> Partition) {
    let max = 8;
    let mut hist = vec![0u64; max + 1];
    for _ in 0..draws {
        let size = draw().size() as usize;
        if size <= max {
            hist[size] += 1;
        }
    }
    let r = chi_square_goodness_of_fit(&hist, &size_law(spec, lambda, max), draws);
    assert!(r.p_value > ALPHA, "{label}: chi2 = {:.2} on {} dof, p = {:.2e}", r.statistic, r.degrees_of_freedom, r.p_value);
}

#[test]
fn multiset_sampler_size_law() {
    for (seed, (d, n, lambda)) in [(3u32, 8u64, 0.2), (3, 12, 0.45), (1, 10, 0.7), (2, 8, 0.6)].into_iter().enumerate() {
        let spec = ClassSpec::colored(d, n as usize).unwrap();
        let sampler = MultisetSampler::new(ColoredSummands::new(d, n).unwrap(), lambda).unwrap();
        let mut rng = RandomSource::seeded(seed as u64);
        check_sizes(&format!("multiset {spec} at {lambda}"), &spec, lambda, 300_000, || sampler.sample(&mut rng).unwrap());
    }
}

#[test]
fn multiset_sampler_with_weighted_summands() {
    let spec = ClassSpec::polynomial_int(&[0, 1], 8).unwrap();
    let sampler = MultisetSampler::new(WeightedSummands::new(&spec).unwrap(), 0.4).unwrap();
    let mut rng = RandomSource::seeded(11);
    check_sizes("multiset p(x)=x", &spec, 0.4, 300_000, || sampler.sample(&mut rng).unwrap());
}

#[test]
fn independent_sampler_size_law() {
    for (seed, generator) in [Generator::Naive, Generator::Grouped].into_iter().enumerate() {
        for spec in [
            ClassSpec::integer_partitions(8).unwrap(),
            ClassSpec::polynomial_int(&[1, 1, 1], 10).unwrap(),
        ] {
            let sampler = IndependentSampler::new(&spec, 0.6, generator).unwrap();
            let mut rng = RandomSource::seeded(20 + seed as u64);
            check_sizes(&format!("{generator} {spec}"), &spec, 0.6, 300_000, || sampler.sample(&mut rng).unwrap());
        }
    }
}

#[test]
fn every_small_configuration_has_boltzmann_weight() {
    // Truncation 3 at lambda = 0.2: each of the 1 + 3 + 12 + 38 objects of size <= 3
    // has probability lambda^size / C, with the remainder pooled.
    let spec = ClassSpec::bec(3).unwrap();
    let lambda: f64 = 0.2;
    let sampler = MultisetSampler::new(ColoredSummands::new(3, 3).unwrap(), lambda).unwrap();
    let universes: Vec<_> = (0..=3).map(|n| enumerate(&spec, n).unwrap()).collect();
    let norm = (-OgfTable64::new(&spec).log_partition_function(lambda).unwrap()).exp();
    let mut probs = Vec::new();
    for (n, u) in universes.iter().enumerate() {
        probs.extend(std::iter::repeat_n(lambda.powi(n as i32) * norm, u.len()));
    }
    let mut hist = vec![0u64; probs.len()];
    let draws = 1_000_000;
    let mut rng = RandomSource::seeded(31);
    for _ in 0..draws {
        let p = sampler.sample(&mut rng).unwrap();
        let n = p.size() as usize;
        if n <= 3 {
            let offset: usize = universes[..n].iter().map(|u| u.len()).sum();
            hist[offset + universes[n].index_of(&p.canonical_key()).expect("enumerated")] += 1;
        }
    }
    let r = chi_square_goodness_of_fit(&hist, &probs, draws);
    assert_eq!(probs.len(), 54);
    assert!(r.p_value > ALPHA, "chi2 = {:.2} on {} dof, p = {:.2e}", r.statistic, r.degrees_of_freedom, r.p_value);
}

#[test]
fn size_two_condensate_draws_are_uniform() {
    let spec = ClassSpec::bec(2).unwrap();
    let universe = enumerate(&spec, 2).unwrap();
    assert_eq!(universe.len(), 12);
    let sampler = MultisetSampler::new(ColoredSummands::new(3, 2).unwrap(), 0.2).unwrap();
    let mut rng = RandomSource::seeded(41);
    let mut keys = Vec::with_capacity(1_000_000);
    while keys.len() < 1_000_000 {
        let p = sampler.sample(&mut rng).unwrap();
        if p.size() == 2 {
            keys.push(p.canonical_key());
        }
    }
    let r = chi_square_uniformity(&keys, &universe).unwrap();
    assert!(r.p_value > ALPHA, "chi2 = {:.2}, p = {:.2e}", r.statistic, r.p_value);
}

#[test]
fn naive_and_grouped_agree_at_six() {
    let colored = ClassSpec::bec(6).unwrap();
    let spec = ClassSpec::polynomial(colored.polynomial_coefficients(), 6).unwrap();
    let lambda = ExactSampler::new(&spec, 6, &SamplerOptions::default()).unwrap().lambda();
    let hist = |generator: Generator, seed: u64| {
        let s = IndependentSampler::new(&spec, lambda, generator).unwrap();
        let mut rng = RandomSource::seeded(seed);
        let mut h = vec![0u64; 40];
        for _ in 0..200_000 {
            h[(s.sample(&mut rng).unwrap().size() as usize).min(39)] += 1;
        }
        h
    };
    let r = chi_square_two_sample(&hist(Generator::Naive, 51), &hist(Generator::Grouped, 52));
    assert!(r.p_value > ALPHA, "chi2 = {:.2} on {} dof, p = {:.2e}", r.statistic, r.degrees_of_freedom, r.p_value);
}
