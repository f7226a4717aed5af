use std::fs;
use std::io::Write;
use std::time::Instant;

use boltzpart::{
    chi_square_uniformity, condition_iii_witness, count, dirichlet_profile, enumerate, tune, tuning_window,
    ClassKind, ClassSpec, ExactSampler, OgfTable64, SamplerOptions, TuningWindow64,
};
use log::info;

use crate::args::*;
use crate::error::CliError;
use crate::report::*;

/// Inline JSON if the argument looks like an object, otherwise a file path.
pub fn load_spec(arg: &str) -> Result<ClassSpec, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::Config(format!("cannot read spec file {arg:?}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("malformed spec: {e}")))
}

fn options(args: &SamplingArgs) -> SamplerOptions {
    SamplerOptions {
        generator: args.generator,
        tolerance: args.tolerance,
        space_cap: !args.no_space_cap,
        retry_cap: None,
    }
}

fn window(spec: &ClassSpec, n: u64, lambda: f64) -> Result<Option<WindowReport>, CliError> {
    let ClassKind::Colored { colors } = spec.kind() else {
        return Ok(None);
    };
    let w: TuningWindow64 = tuning_window(*colors, n)?;
    Ok(Some(WindowReport {
        lower: w.lower,
        upper: w.upper,
        central: w.central,
        contains_lambda: w.lower <= lambda && lambda <= w.upper,
    }))
}

fn write_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, value).map_err(|e| CliError::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

pub fn tune_cmd(args: &TuneArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = load_spec(&args.spec.spec)?;
    let t = tune::<f64>(&spec, args.n, args.tolerance, args.max_iterations)?;
    let variance = OgfTable64::new(&spec).variance_size(t.lambda)?;
    let report = TuneReport {
        window: window(&spec, args.n, t.lambda)?,
        spec,
        n: args.n,
        lambda: t.lambda,
        delta: t.delta,
        expectation: t.expectation,
        residual: t.residual,
        tolerance: t.tolerance,
        iterations: t.iterations,
        variance,
    };
    write_json(out, &report)
}

pub fn sample_cmd(args: &SampleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = load_spec(&args.spec.spec)?;
    let sampler = ExactSampler::new(&spec, args.n, &options(&args.sampling))?;
    info!("lambda_n = {} for {}", sampler.lambda(), sampler.spec());
    let batch = sampler.sample_batch(args.count, args.sampling.workers, args.sampling.seed)?;
    info!(
        "{} samples in {} attempts ({} space-cap rejections)",
        batch.stats.acceptances, batch.stats.attempts, batch.stats.space_cap_rejections
    );
    if args.format == SampleFormat::Csv {
        writeln!(out, "{}", SampleRecord::CSV_HEADER)?;
    }
    for r in &batch.records {
        let record = SampleRecord::from_batch(args.sampling.seed, r, args.particles)?;
        match args.format {
            SampleFormat::Jsonl => write_json(out, &record)?,
            SampleFormat::Csv => writeln!(out, "{}", record.to_csv())?,
        }
    }
    Ok(())
}

pub fn count_cmd(args: &CountArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = load_spec(&args.spec.spec)?;
    let table = count(&spec, args.n)?;
    match args.format {
        CountFormat::Text => {
            for c in table.counts() {
                writeln!(out, "{c}")?;
            }
            Ok(())
        }
        CountFormat::Json => write_json(
            out,
            &CountReport {
                spec,
                n: args.n,
                counts: table.counts().iter().map(ToString::to_string).collect(),
            },
        ),
    }
}

const CONDITION_DELTAS: [f64; 7] = [0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001];
const CONDITION_ALPHAS_PER_DELTA: usize = 9;

fn condition_report(spec: &ClassSpec) -> Result<ConditionReport, CliError> {
    let mut points = Vec::new();
    for delta in CONDITION_DELTAS {
        let lo = delta.sqrt();
        let step = (0.5 - lo) / (CONDITION_ALPHAS_PER_DELTA - 1) as f64;
        let alphas: Vec<f64> = (0..CONDITION_ALPHAS_PER_DELTA)
            .map(|i| (lo + step * i as f64).min(0.5))
            .collect();
        points.extend(condition_iii_witness(spec, &[delta], &alphas)?);
    }
    let worst = points
        .iter()
        .min_by(|a, b| a.margin().total_cmp(&b.margin()))
        .expect("nonempty grid");
    Ok(ConditionReport {
        points: points.len(),
        holding: points.iter().filter(|p| p.holds()).count(),
        min_margin: worst.margin(),
        min_margin_delta: worst.delta,
        min_margin_alpha: worst.alpha,
    })
}

pub fn analyze_cmd(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = load_spec(&args.spec.spec)?;
    let profile = dirichlet_profile::<f64>(&spec)?;
    let bounds = match args.n {
        None => None,
        Some(n) => {
            let truncated = spec.with_truncation(n as usize)?;
            let t = tune::<f64>(&truncated, n, boltzpart::tuner::DEFAULT_TOLERANCE, 200)?;
            let variance = OgfTable64::new(&truncated).variance_size(t.lambda)?;
            Some(BoundsReport {
                n,
                lambda: t.lambda,
                variance,
                acceptance_lower_bound: profile.acceptance_lower_bound(n),
                local_limit: boltzpart::local_limit_probability(variance),
                local_limit_asymptotic: profile.local_limit_asymptotic(n),
                window: window(&spec, n, t.lambda)?,
            })
        }
    };
    let report = AnalyzeReport {
        degree: profile.degree,
        coefficients: profile.coefficients.iter().map(ToString::to_string).collect(),
        newton: profile.newton.deltas().iter().map(ToString::to_string).collect(),
        poles: profile
            .poles
            .iter()
            .map(|p| PoleReport {
                position: p.position,
                residue: p.residue.to_string(),
                residue_value: p.residue_value,
            })
            .collect(),
        rightmost_pole: profile.rightmost_pole(),
        k2: profile.k2,
        condition_iii: condition_report(&spec)?,
        bounds,
        spec,
    };
    write_json(out, &report)
}

/// Runs the uniformity check; the report is written even when it fails.
pub fn validate_cmd(args: &ValidateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = load_spec(&args.spec.spec)?;
    let universe = enumerate(&spec.with_truncation(args.n.max(1) as usize)?, args.n)?;
    let sampler = ExactSampler::new(&spec, args.n, &options(&args.sampling))?;
    let batch = sampler.sample_batch(args.samples, args.sampling.workers, args.sampling.seed)?;
    let keys: Vec<_> = batch.records.iter().map(|r| r.partition.canonical_key()).collect();
    let chi = chi_square_uniformity(&keys, &universe)?;
    let report = ValidateReport {
        n: args.n,
        seed: args.sampling.seed,
        workers: args.sampling.workers,
        samples: args.samples,
        universe: universe.len(),
        statistic: chi.statistic,
        degrees_of_freedom: chi.degrees_of_freedom,
        p_value: chi.p_value,
        alpha: args.alpha,
        pass: chi.p_value > args.alpha,
        attempts: batch.stats.attempts,
        acceptance_rate: batch.stats.acceptance_rate().unwrap_or(0.0),
        spec,
    };
    write_json(out, &report)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::ValidationFailed {
            p_value: report.p_value,
            alpha: report.alpha,
        })
    }
}

/// Ordinary least squares `y = a + b x`; returns `(b, se(b), a)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = if xs.len() > 2 { (ssr / (m - 2.0) / sxx).sqrt() } else { f64::NAN };
    (slope, stderr, intercept)
}

pub const MIN_BENCH_POINTS: usize = 4;

/// Grid point `i` samples with seed `seed + i`.
pub fn bench(
    spec: &ClassSpec,
    grid: &[u64],
    samples: u64,
    seed: u64,
    workers: usize,
    options: &SamplerOptions,
) -> Result<BenchReport, CliError> {
    if grid.len() < MIN_BENCH_POINTS {
        return Err(CliError::Config(format!(
            "bench grid needs at least {MIN_BENCH_POINTS} sizes, got {}",
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] == 0 {
        return Err(CliError::Config("bench grid must be positive and strictly ascending".into()));
    }
    if samples == 0 {
        return Err(CliError::Config("bench needs at least one sample per size".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for (i, &n) in grid.iter().enumerate() {
        let point_seed = seed.wrapping_add(i as u64);
        let start = Instant::now();
        let sampler = ExactSampler::new(spec, n, options)?;
        let batch = sampler.sample_batch(samples, workers, point_seed)?;
        let s = batch.stats;
        let point = BenchPoint {
            n,
            seed: point_seed,
            lambda: sampler.lambda(),
            accepts: s.acceptances,
            attempts: s.attempts,
            space_cap_rejections: s.space_cap_rejections,
            attempts_per_accept: s.attempts as f64 / s.acceptances as f64,
            predicted_attempts: sampler.predicted_acceptance().recip(),
            bound_attempts: sampler.acceptance_lower_bound().recip(),
            wall_seconds: start.elapsed().as_secs_f64(),
        };
        info!("bench n={n}: {:.1} attempts per accept", point.attempts_per_accept);
        points.push(point);
    }
    let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.attempts_per_accept.ln()).collect();
    let (slope, slope_stderr, intercept) = linear_fit(&xs, &ys);
    let r = spec.degree() as f64;
    Ok(BenchReport {
        spec: spec.clone(),
        seed,
        workers,
        samples_per_n: samples,
        points,
        slope,
        slope_stderr,
        intercept,
        reference_slope: (r + 3.0) / (2.0 * r + 4.0),
    })
}

pub fn bench_cmd(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = load_spec(&args.spec.spec)?;
    let report = bench(
        &spec,
        &args.grid,
        args.samples,
        args.sampling.seed,
        args.sampling.workers,
        &options(&args.sampling),
    )?;
    write_json(out, &report)
}
