//! Tuning the Boltzmann parameter so the expected size hits a target.

use crate::analysis::zeta_real;
use crate::class::ClassSpec;
use crate::error::{Error, Result};
use crate::ogf::OgfTable;
use crate::scalar::Real;

/// Relative tolerance on `|E[U_n] - n| / n` used when none is given.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
/// Smallest tolerance accepted by [`tune`].
pub const MIN_TOLERANCE: f64 = 1e-13;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;

/// A solved parameter `lambda_n` with `E_{lambda_n}[U_n] = n` up to tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Tuned<F: Real> {
    pub spec: ClassSpec,
    pub target: u64,
    pub lambda: F,
    /// `-ln(lambda)`, the variable actually bisected.
    pub delta: F,
    pub expectation: F,
    /// `|expectation - target|`.
    pub residual: F,
    /// Relative tolerance requested.
    pub tolerance: F,
    pub iterations: usize,
}

/// Bisection for `lambda_n` on the truncation of `spec`.
pub fn tune<F: Real>(spec: &ClassSpec, target: u64, tolerance: F, max_iterations: usize) -> Result<Tuned<F>> {
    tune_table(&OgfTable::new(spec), target, tolerance, max_iterations)
}

/// [`tune`] against a prebuilt table.
///
/// The expectation is strictly decreasing in `delta = -ln(lambda)`, so the
/// bracket `(eps, -ln eps)` always contains the root for sane targets. The
/// midpoint is geometric while the bracket spans more than a factor of 4,
/// which handles `lambda` close to 1 in few steps.
pub fn tune_table<F: Real>(
    table: &OgfTable<F>,
    target: u64,
    tolerance: F,
    max_iterations: usize,
) -> Result<Tuned<F>> {
    if target == 0 {
        return Err(Error::OutOfRange("tuning target must be at least 1".into()));
    }
    if target as usize > table.truncation() {
        return Err(Error::OutOfRange(format!(
            "tuning target {target} exceeds truncation {}",
            table.truncation()
        )));
    }
    if !(tolerance >= F::lit(MIN_TOLERANCE)) {
        return Err(Error::OutOfRange(format!(
            "tolerance {tolerance} below minimum {MIN_TOLERANCE:e}"
        )));
    }

    let n = F::lit(target as f64);
    let allowed = tolerance * n;
    let eps = F::epsilon();
    let mut lo = eps;
    let mut hi = -eps.ln();
    if table.expected_size_log(lo) < n || table.expected_size_log(hi) > n {
        return Err(Error::OutOfRange(format!("target {target} not bracketed")));
    }

    let mut best = (F::infinity(), hi, F::zero());
    for iteration in 1..=max_iterations {
        let mid = if hi > lo * F::lit(4.0) {
            (lo * hi).sqrt()
        } else {
            (lo + hi) / F::lit(2.0)
        };
        let e = table.expected_size_log(mid);
        let residual = (e - n).abs();
        if residual < best.0 {
            best = (residual, mid, e);
        }
        if residual <= allowed {
            return Ok(Tuned {
                spec: table.spec().clone(),
                target,
                lambda: (-mid).exp(),
                delta: mid,
                expectation: e,
                residual,
                tolerance,
                iterations: iteration,
            });
        }
        if mid <= lo || mid >= hi {
            // Bracket collapsed to adjacent floats without meeting tolerance.
            return Err(Error::NotConverged {
                iterations: iteration,
                residual: best.0.as_f64() / target as f64,
            });
        }
        if e > n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NotConverged {
        iterations: max_iterations,
        residual: best.0.as_f64() / target as f64,
    })
}

/// Asymptotic containment window for `lambda_n` of colored classes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TuningWindow<F: Real> {
    /// `exp(-2 n^{-1/(d+1)})`
    pub lower: F,
    /// `exp(-n^{-1/(d+1)} / 2)`
    pub upper: F,
    /// `exp(-(zeta(d+1) d)^{1/(d+1)} n^{-1/(d+1)})`
    pub central: F,
    /// The central `delta_n` estimate itself.
    pub central_delta: F,
}

pub fn tuning_window<F: Real>(colors: u32, n: u64) -> Result<TuningWindow<F>> {
    if colors == 0 || n == 0 {
        return Err(Error::OutOfRange("tuning window needs d >= 1 and n >= 1".into()));
    }
    let d = F::lit(colors as f64);
    let expo = -(d + F::one()).recip();
    let scale = F::lit(n as f64).powf(expo);
    let zeta = zeta_real(d + F::one())?;
    let central_delta = (zeta * d).powf((d + F::one()).recip()) * scale;
    Ok(TuningWindow {
        lower: (-F::lit(2.0) * scale).exp(),
        upper: (-scale / F::lit(2.0)).exp(),
        central: (-central_delta).exp(),
        central_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hand_solved_targets() {
        let t = tune::<f64>(&ClassSpec::bec(1).unwrap(), 1, 1e-12, 200).unwrap();
        assert_relative_eq!(t.lambda, 0.25, max_relative = 1e-11);
        let t = tune::<f64>(&ClassSpec::integer_partitions(1).unwrap(), 1, 1e-12, 200).unwrap();
        assert_relative_eq!(t.lambda, 0.5, max_relative = 1e-11);
        assert!(t.residual <= 1e-12);
    }

    #[test]
    fn precondition_errors() {
        let spec = ClassSpec::bec(5).unwrap();
        assert!(tune::<f64>(&spec, 0, 1e-12, 200).is_err());
        assert!(tune::<f64>(&spec, 6, 1e-12, 200).is_err());
        assert!(tune::<f64>(&spec, 5, 1e-15, 200).is_err());
        assert!(matches!(
            tune::<f64>(&spec, 5, 1e-12, 3),
            Err(Error::NotConverged { iterations: 3, .. })
        ));
    }

    #[test]
    fn tuned_root_is_unique_crossing() {
        for spec in [ClassSpec::bec(400).unwrap(), ClassSpec::integer_partitions(400).unwrap()] {
            let table = OgfTable::<f64>::new(&spec);
            let t = tune_table(&table, 400, 1e-12, 200).unwrap();
            let h = 1e-6 * t.lambda;
            assert!(table.expected_size(t.lambda - h).unwrap() < 400.0);
            assert!(table.expected_size(t.lambda + h).unwrap() > 400.0);
        }
    }

    #[test]
    fn window_is_ordered_and_contains_central() {
        for n in [1u64, 10, 1000, 1_000_000] {
            let w = tuning_window::<f64>(3, n).unwrap();
            assert!(w.lower < w.upper);
        }
        let w = tuning_window::<f64>(3, 1_000_000).unwrap();
        assert!(w.lower <= w.central && w.central <= w.upper);
    }

    #[test]
    fn window_central_delta_for_one_color() {
        let w = tuning_window::<f64>(1, 400).unwrap();
        let expected = std::f64::consts::PI / 6f64.sqrt() / 20.0;
        assert_relative_eq!(w.central_delta, expected, max_relative = 1e-12);
    }

    #[test]
    fn single_precision_tuning() {
        let t = tune::<f32>(&ClassSpec::bec(50).unwrap(), 50, 1e-5, 200).unwrap();
        let t64 = tune::<f64>(&ClassSpec::bec(50).unwrap(), 50, 1e-12, 200).unwrap();
        assert!((t.lambda as f64 - t64.lambda).abs() < 1e-5);
    }
}
