use std::ops::AddAssign;
use std::time::Duration;

/// Counters accumulated across sampler calls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SamplerStats {
    /// Full Boltzmann draws started by a rejection loop.
    pub attempts: u64,
    /// Draws that landed exactly on the target size.
    pub acceptances: u64,
    /// Draws abandoned early because the partial size reached the space cap.
    pub space_cap_rejections: u64,
    /// Candidate summand sizes drawn by inner samplers, including rejected ones.
    pub inner_draws: u64,
    /// Inner candidates rejected for exceeding the truncation.
    pub inner_retries: u64,
    pub elapsed: Duration,
}

impl SamplerStats {
    /// `acceptances / attempts`, or `None` before the first attempt.
    pub fn acceptance_rate(&self) -> Option<f64> {
        (self.attempts > 0).then(|| self.acceptances as f64 / self.attempts as f64)
    }

    /// Fraction of inner candidates that passed the size test.
    pub fn inner_acceptance_rate(&self) -> Option<f64> {
        (self.inner_draws > 0)
            .then(|| (self.inner_draws - self.inner_retries) as f64 / self.inner_draws as f64)
    }

    pub fn attempts_per_acceptance(&self) -> Option<f64> {
        (self.acceptances > 0).then(|| self.attempts as f64 / self.acceptances as f64)
    }
}

impl AddAssign for SamplerStats {
    fn add_assign(&mut self, rhs: Self) {
        self.attempts += rhs.attempts;
        self.acceptances += rhs.acceptances;
        self.space_cap_rejections += rhs.space_cap_rejections;
        self.inner_draws += rhs.inner_draws;
        self.inner_retries += rhs.inner_retries;
        self.elapsed += rhs.elapsed;
    }
}
