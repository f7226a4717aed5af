//! Generating-function evaluation for truncated weighted-partition classes.
//!
//! For a class truncated at `n`, the inner (summand) OGF is
//! `A(z) = sum_{k=1}^n b_k z^k` and the Boltzmann size `U_n` is a weighted sum
//! of independent geometrics, which gives closed sums for its mean and
//! variance. Evaluation is explicit and O(n) per argument.
//!
//! Arguments are accepted either as `lambda` or as `delta = -ln(lambda)`;
//! the latter keeps `1 - lambda^k = -expm1(-k delta)` accurate near 1.

use std::collections::HashMap;
use std::sync::RwLock;

use num_traits::ToPrimitive;

use crate::class::ClassSpec;
use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

/// Weights `b_1..b_n` of a class in scalar form, plus a memo of `A(z)`.
#[derive(Debug)]
pub struct OgfTable<F: Real> {
    spec: ClassSpec,
    weights: Vec<F>,
    inner_cache: RwLock<HashMap<u64, F>>,
}

impl<F: Real> Clone for OgfTable<F> {
    fn clone(&self) -> Self {
        Self {
            spec: self.spec.clone(),
            weights: self.weights.clone(),
            inner_cache: RwLock::new(HashMap::new()),
        }
    }
}

fn check_lambda<F: Real>(lambda: F) -> Result<()> {
    if !(lambda > F::zero() && lambda < F::one()) {
        return Err(Error::OutOfRange(format!("argument {lambda} outside (0, 1)")));
    }
    Ok(())
}

fn check_delta<F: Real>(delta: F) -> Result<()> {
    if !(delta > F::zero() && delta.is_finite()) {
        return Err(Error::OutOfRange(format!("log-parameter {delta} must be positive")));
    }
    Ok(())
}

impl<F: Real> OgfTable<F> {
    pub fn new(spec: &ClassSpec) -> Self {
        let weights = spec
            .weight_counts()
            .iter()
            .map(|b| F::lit(b.to_f64().unwrap_or(f64::INFINITY)))
            .collect();
        Self {
            spec: spec.clone(),
            weights,
            inner_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn spec(&self) -> &ClassSpec {
        &self.spec
    }

    pub fn truncation(&self) -> usize {
        self.weights.len()
    }

    /// `b_k` for `k` in `1..=n`.
    pub fn weight(&self, k: usize) -> F {
        self.weights[k - 1]
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    /// `A(z) = sum_{k=1}^n b_k z^k` by Horner's rule, memoized on `z`.
    pub fn inner_ogf(&self, z: F) -> Result<F> {
        check_lambda(z)?;
        let key = z.as_f64().to_bits();
        if let Some(&v) = self.inner_cache.read().expect("cache lock").get(&key) {
            return Ok(v);
        }
        let v = self.inner_ogf_uncached(z);
        self.inner_cache.write().expect("cache lock").insert(key, v);
        Ok(v)
    }

    /// Horner evaluation without touching the memo; accepts `z` in `[0, 1)`.
    pub fn inner_ogf_uncached(&self, z: F) -> F {
        self.weights.iter().rev().fold(F::zero(), |acc, &b| (acc + b) * z)
    }

    /// `E[U_n] = sum_k k b_k lambda^k / (1 - lambda^k)`.
    pub fn expected_size(&self, lambda: F) -> Result<F> {
        check_lambda(lambda)?;
        Ok(self.expected_size_log(-lambda.ln()))
    }

    /// `E[U_n]` at `lambda = exp(-delta)`.
    pub fn expected_size_at(&self, delta: F) -> Result<F> {
        check_delta(delta)?;
        Ok(self.expected_size_log(delta))
    }

    pub(crate) fn expected_size_log(&self, delta: F) -> F {
        let mut acc = CompensatedSum::new();
        for (i, &b) in self.weights.iter().enumerate() {
            let kd = F::from_usize_lossy(i + 1) * delta;
            let pow = (-kd).exp();
            if pow == F::zero() {
                break;
            }
            acc.add(F::from_usize_lossy(i + 1) * b * pow / -(-kd).exp_m1());
        }
        acc.value()
    }

    /// `Var(U_n) = sum_k k^2 b_k lambda^k / (1 - lambda^k)^2`.
    pub fn variance_size(&self, lambda: F) -> Result<F> {
        check_lambda(lambda)?;
        Ok(self.variance_size_log(-lambda.ln()))
    }

    /// `Var(U_n)` at `lambda = exp(-delta)`.
    pub fn variance_size_at(&self, delta: F) -> Result<F> {
        check_delta(delta)?;
        Ok(self.variance_size_log(delta))
    }

    pub(crate) fn variance_size_log(&self, delta: F) -> F {
        let mut acc = CompensatedSum::new();
        for (i, &b) in self.weights.iter().enumerate() {
            let k = F::from_usize_lossy(i + 1);
            let kd = k * delta;
            let pow = (-kd).exp();
            if pow == F::zero() {
                break;
            }
            let denom = (-kd).exp_m1();
            acc.add(k * k * b * pow / (denom * denom));
        }
        acc.value()
    }

    /// `ln C_n(lambda) = -sum_k b_k ln(1 - lambda^k)` from the product form.
    pub fn log_partition_function(&self, lambda: F) -> Result<F> {
        check_lambda(lambda)?;
        let delta = -lambda.ln();
        Ok(self
            .weights
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let kd = F::from_usize_lossy(i + 1) * delta;
                -b * (-(-kd).exp()).ln_1p()
            })
            .collect::<CompensatedSum<F>>()
            .value())
    }
}
