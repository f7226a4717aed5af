//! Exact-size samplers against exhaustive enumeration.

use boltzpart::{
    chi_square_uniformity, enumerate, ClassSpec, ExactSampler, Generator, RandomSource, SamplerOptions,
    SamplerStats,
};

const SAMPLES: usize = 100_000;
const ALPHA: f64 = 1e-3;

fn check_uniform(spec: &ClassSpec, n: u64, generator: Generator, seed: u64) {
    let universe = enumerate(&spec.with_truncation(n as usize).unwrap(), n).unwrap();
    let options = SamplerOptions {
        generator,
        ..SamplerOptions::default()
    };
    let sampler = ExactSampler::new(spec, n, &options).unwrap();
    let mut rng = RandomSource::seeded(seed);
    let mut stats = SamplerStats::default();
    let keys: Vec<_> = (0..SAMPLES)
        .map(|_| {
            let p = sampler.sample(&mut rng, &mut stats).unwrap();
            assert_eq!(p.size(), n);
            p.canonical_key()
        })
        .collect();
    let r = chi_square_uniformity(&keys, &universe).unwrap();
    assert!(
        r.p_value > ALPHA,
        "{spec} n={n} {generator}: chi2 = {:.2} on {} dof, p = {:.2e}",
        r.statistic,
        r.degrees_of_freedom,
        r.p_value
    );
}

#[test]
fn two_color_condensate() {
    let spec = ClassSpec::colored(2, 5).unwrap();
    for n in 1..=5 {
        check_uniform(&spec, n, Generator::Grouped, 10 + n);
    }
}

#[test]
fn three_color_condensate() {
    let spec = ClassSpec::bec(5).unwrap();
    for n in 1..=5 {
        check_uniform(&spec, n, Generator::Grouped, 20 + n);
    }
}

#[test]
fn integer_partitions() {
    let spec = ClassSpec::integer_partitions(5).unwrap();
    for n in 1..=5 {
        check_uniform(&spec, n, Generator::Grouped, 30 + n);
    }
}

#[test]
fn linear_weights() {
    let spec = ClassSpec::polynomial_int(&[0, 1], 5).unwrap();
    for n in 1..=5 {
        check_uniform(&spec, n, Generator::Grouped, 40 + n);
    }
}

#[test]
fn naive_generator() {
    check_uniform(&ClassSpec::integer_partitions(5).unwrap(), 5, Generator::Naive, 51);
    check_uniform(&ClassSpec::polynomial_int(&[0, 1], 5).unwrap(), 5, Generator::Naive, 52);
}

#[test]
fn expanded_condensate_weights() {
    // Indexed summands with b_k = C(k + 2, 2), the polynomial form of three colors.
    let colored = ClassSpec::bec(4).unwrap();
    let spec = ClassSpec::polynomial(colored.polynomial_coefficients(), 4).unwrap();
    check_uniform(&spec, 4, Generator::Grouped, 61);
    check_uniform(&spec, 4, Generator::Naive, 62);
}
