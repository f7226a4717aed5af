//! Analytic facts behind the rejection-rate guarantees, in executable form.
//!
//! For weights `b_k = p(k)` with `p(x) = a_0 + ... + a_r x^r`, the Dirichlet
//! series `D(s) = sum_k b_k k^{-s}` equals `sum_j a_j zeta(s - j)`. Its poles
//! sit at `j + 1` with residues `a_j`, and the rightmost one fixes the local
//! limit behaviour of the Boltzmann size, hence the acceptance rate of
//! rejection sampling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::class::{eval_rational, ClassSpec};
use crate::error::{Error, Result};
use crate::scalar::{CompensatedSum, Real};

/// `B_{2j} / (2j)!` for `j = 1..=12`.
const EM_COEFFS: [f64; 12] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
    43_867.0 / 798.0 / 6_402_373_705_728_000.0,
    -174_611.0 / 330.0 / 2_432_902_008_176_640_000.0,
    854_513.0 / 138.0 / 1.124_000_727_777_607_7e21,
    -236_364_091.0 / 2730.0 / 6.204_484_017_332_394e23,
];

/// Terms summed directly before the Euler-Maclaurin tail.
const EM_CUTOFF: usize = 16;

/// Riemann zeta on the real axis for `s > 1`, by Euler-Maclaurin summation.
pub fn zeta_real<F: Real>(s: F) -> Result<F> {
    if !(s > F::one() + F::lit(1e-9)) || !s.is_finite() {
        return Err(Error::OutOfRange(format!("zeta evaluated at s = {s} <= 1")));
    }
    let n = F::from_usize_lossy(EM_CUTOFF);
    let mut acc = CompensatedSum::new();
    // Smallest terms first.
    for k in (1..EM_CUTOFF).rev() {
        acc.add(F::from_usize_lossy(k).powf(-s));
    }
    let n_pow = n.powf(-s);
    acc.add(n * n_pow / (s - F::one()));
    acc.add(n_pow / F::lit(2.0));
    // sum_j B_2j/(2j)! * s (s+1) ... (s+2j-2) * N^{-s-2j+1}
    let mut rising = s;
    let mut power = n_pow / n;
    let n2 = n * n;
    for (j, &c) in EM_COEFFS.iter().enumerate() {
        if j > 0 {
            let m = F::from_usize_lossy(2 * j);
            rising = rising * (s + m - F::one()) * (s + m);
            power = power / n2;
        }
        acc.add(F::lit(c) * rising * power);
    }
    Ok(acc.value())
}

/// Coefficients of `p` in the binomial basis: `p(x) = sum_j D_j C(x, j)`
/// with `D_j = Delta^j p(0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonCoefficients {
    deltas: Vec<BigInt>,
}

impl NewtonCoefficients {
    pub fn deltas(&self) -> &[BigInt] {
        &self.deltas
    }

    /// `sum_j D_j C(x, j)` at a nonnegative integer.
    pub fn eval(&self, x: u64) -> BigInt {
        let mut binom = BigInt::one();
        let mut acc = BigInt::zero();
        for (j, d) in self.deltas.iter().enumerate() {
            if j > 0 {
                // C(x, j) = C(x, j-1) (x - j + 1) / j
                binom = binom * (BigInt::from(x) - BigInt::from(j - 1)) / BigInt::from(j);
            }
            acc += d * &binom;
        }
        acc
    }
}

/// Forward-difference table of `p` at 0, in exact arithmetic.
///
/// Fails when a difference is not an integer, i.e. `p` does not map the
/// integers to the integers.
pub fn forward_differences(coeffs: &[BigRational]) -> Result<NewtonCoefficients> {
    let r = coeffs.len().saturating_sub(1);
    let mut row: Vec<BigRational> = (0..=r)
        .map(|x| eval_rational(coeffs, &BigRational::from_integer(BigInt::from(x))))
        .collect();
    let mut deltas = Vec::with_capacity(r + 1);
    for j in 0..=r {
        let d = &row[0];
        if !d.is_integer() {
            return Err(Error::InvalidSpec(format!(
                "Delta^{j} p(0) = {d} is not an integer"
            )));
        }
        deltas.push(d.to_integer());
        row = row.windows(2).map(|w| &w[1] - &w[0]).collect();
    }
    let newton = NewtonCoefficients { deltas };
    for x in 0..=(r as u64 + 2) {
        let direct = eval_rational(coeffs, &BigRational::from_integer(BigInt::from(x)));
        if BigRational::from_integer(newton.eval(x)) != direct {
            return Err(Error::InvalidSpec(format!(
                "Newton form disagrees with p at x = {x}"
            )));
        }
    }
    Ok(newton)
}

/// A simple pole of `D(s)` at `position` with the given residue.
#[derive(Clone, Debug, PartialEq)]
pub struct Pole<F: Real> {
    pub position: u32,
    pub residue: BigRational,
    pub residue_value: F,
}

/// Singularity data of the Dirichlet series of a class.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletProfile<F: Real> {
    pub degree: usize,
    pub coefficients: Vec<BigRational>,
    /// Ascending by position.
    pub poles: Vec<Pole<F>>,
    pub newton: NewtonCoefficients,
    /// `K_2 = A_r Gamma(rho_r + 2) zeta(rho_r + 1) = a_r (r + 2)! zeta(r + 2)`.
    pub k2: F,
}

impl<F: Real> DirichletProfile<F> {
    /// `rho_r = r + 1`.
    pub fn rightmost_pole(&self) -> u32 {
        self.degree as u32 + 1
    }

    pub fn leading_residue(&self) -> &BigRational {
        &self.coefficients[self.degree]
    }

    /// `D(s) = sum_j a_j zeta(s - j)`, defined for `s > r + 1`.
    pub fn dirichlet_series(&self, s: F) -> Result<F> {
        let mut acc = CompensatedSum::new();
        for (j, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            acc.add(F::lit(a.to_f64().unwrap_or(f64::NAN)) * zeta_real(s - F::from_usize_lossy(j))?);
        }
        Ok(acc.value())
    }

    /// Lower bound on `P(U_n = n)` at the tuned parameter (large `n`).
    pub fn acceptance_lower_bound(&self, n: u64) -> F {
        acceptance_lower_bound(self.degree, n)
    }

    /// Leading asymptotic of `P(U_n = n)`:
    /// `(2 pi K2)^{-1/2} (K2 / (rho + 1))^{e} n^{-e}`, `e = (2 + rho) / (2 (rho + 1))`.
    pub fn local_limit_asymptotic(&self, n: u64) -> F {
        let rho = F::from_usize_lossy(self.degree + 1);
        let two = F::lit(2.0);
        let e = (two + rho) / (two * (rho + F::one()));
        let lead = (two * F::PI() * self.k2).sqrt().recip();
        lead * (self.k2 / ((rho + F::one()) * F::lit(n as f64))).powf(e)
    }
}

/// Poles, residues and `K_2` for the weight polynomial of `spec`.
pub fn dirichlet_profile<F: Real>(spec: &ClassSpec) -> Result<DirichletProfile<F>> {
    let coefficients = spec.polynomial_coefficients();
    let degree = coefficients.len() - 1;
    let leading = &coefficients[degree];
    if leading.is_zero() {
        return Err(Error::InvalidSpec("zero leading coefficient".into()));
    }
    let newton = forward_differences(&coefficients)?;

    let r_factorial: BigInt = (1..=degree).map(BigInt::from).product();
    if leading * BigRational::from_integer(r_factorial) < BigRational::one() {
        return Err(Error::InvalidSpec(format!(
            "leading coefficient {leading} is below 1/{degree}!"
        )));
    }

    let poles = coefficients
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .map(|(j, a)| Pole {
            position: j as u32 + 1,
            residue: a.clone(),
            residue_value: F::lit(a.to_f64().unwrap_or(f64::NAN)),
        })
        .collect();

    let r2_factorial: f64 = (1..=degree + 2).map(|i| i as f64).product();
    let k2 = F::lit(leading.to_f64().unwrap_or(f64::NAN) * r2_factorial)
        * zeta_real(F::from_usize_lossy(degree + 2))?;
    if !(k2 >= F::one()) {
        return Err(Error::InvalidSpec(format!("K2 = {k2} is below 1")));
    }
    if leading.is_negative() {
        return Err(Error::InvalidSpec("negative leading coefficient".into()));
    }

    Ok(DirichletProfile {
        degree,
        coefficients,
        poles,
        newton,
        k2,
    })
}

/// `(2 sqrt(2 pi))^{-1} ((r + 2) n)^{-(r + 3) / (2 (r + 2))}`.
pub fn acceptance_lower_bound<F: Real>(degree: usize, n: u64) -> F {
    let r = F::from_usize_lossy(degree);
    let two = F::lit(2.0);
    let expo = -(r + F::lit(3.0)) / (two * (r + two));
    ((r + two) * F::lit(n as f64)).powf(expo) / (two * (two * F::PI()).sqrt())
}

/// Gaussian local-limit estimate `1 / sqrt(2 pi Var(U_n))`.
pub fn local_limit_probability<F: Real>(variance: F) -> F {
    (F::lit(2.0) * F::PI() * variance).sqrt().recip()
}

/// One grid point of the condition-(III) harness.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionIiiPoint<F: Real> {
    pub delta: F,
    pub alpha: F,
    /// `2 sum_k b_k e^{-k delta} sin^2(pi k alpha)`, truncated where `e^{-k delta} < 1e-16`.
    pub lhs: F,
    /// `M (1 + rho_r / 2 + 1) |ln delta|` with `M = 4 / ln 5`.
    pub rhs: F,
}

impl<F: Real> ConditionIiiPoint<F> {
    pub fn margin(&self) -> F {
        self.lhs - self.rhs
    }

    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }
}

/// Evaluates both sides of condition (III) on a `delta x alpha` grid.
///
/// Advisory only; it inspects numbers, it certifies nothing.
pub fn condition_iii_witness<F: Real>(
    spec: &ClassSpec,
    deltas: &[F],
    alphas: &[F],
) -> Result<Vec<ConditionIiiPoint<F>>> {
    let rho = F::from_usize_lossy(spec.degree() + 1);
    let m_const = F::lit(4.0) / F::lit(5.0).ln();
    let two = F::lit(2.0);
    let cutoff = F::lit(1e-16).ln();
    let mut out = Vec::with_capacity(deltas.len() * alphas.len());
    for &delta in deltas {
        if !(delta > F::zero() && delta <= F::lit(0.1)) {
            return Err(Error::OutOfRange(format!("delta {delta} outside (0, 0.1]")));
        }
        let terms = (-cutoff / delta).ceil().to_usize().unwrap_or(usize::MAX);
        for &alpha in alphas {
            if !(alpha.abs() >= delta.sqrt() && alpha.abs() <= F::lit(0.5)) {
                return Err(Error::OutOfRange(format!(
                    "alpha {alpha} outside sqrt(delta) <= |alpha| <= 1/2"
                )));
            }
            let mut acc = CompensatedSum::new();
            for k in 1..=terms {
                let kf = F::from_usize_lossy(k);
                let s = (F::PI() * kf * alpha).sin();
                acc.add(F::lit(spec.weight_f64(k as u64)) * (-kf * delta).exp() * s * s);
            }
            out.push(ConditionIiiPoint {
                delta,
                alpha,
                lhs: two * acc.value(),
                rhs: m_const * (F::one() + rho / two + F::one()) * delta.ln().abs(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn zeta_closed_forms() {
        assert!((zeta_real(2.0f64).unwrap() - PI * PI / 6.0).abs() < 1e-12);
        assert!((zeta_real(4.0f64).unwrap() - PI.powi(4) / 90.0).abs() < 1e-12);
        assert!((zeta_real(6.0f64).unwrap() - PI.powi(6) / 945.0).abs() < 1e-12);
        let z20 = zeta_real(20.0f64).unwrap();
        assert!(z20 > 1.0 && z20 < 1.0 + 2f64.powi(-19));
    }

    #[test]
    fn zeta_rejects_pole_side() {
        assert!(zeta_real(1.0f64).is_err());
        assert!(zeta_real(0.5f64).is_err());
        assert!(zeta_real(f64::NAN).is_err());
    }

    #[test]
    fn zeta_near_pole_matches_laurent_expansion() {
        // zeta(s) = 1/(s-1) + gamma_E + O(s-1)
        let eps = 1e-4;
        let euler_gamma = 0.577_215_664_901_532_9;
        let got = zeta_real(1.0 + eps).unwrap();
        assert!((got - (1.0 / eps + euler_gamma)).abs() < 1e-3);
    }

    #[test]
    fn zeta_decreasing_above_one() {
        let mut prev = f64::INFINITY;
        let mut s = 1.001;
        while s <= 30.0 {
            let z = zeta_real(s).unwrap();
            assert!(z > 1.0 && z < prev, "s={s}");
            prev = z;
            s += 0.05;
        }
    }

    #[test]
    fn zeta_in_single_precision() {
        assert!((zeta_real(2.0f32).unwrap() - (PI * PI / 6.0) as f32).abs() < 1e-6);
    }

    #[test]
    fn newton_coefficients_examples() {
        let bec = ClassSpec::bec(5).unwrap().polynomial_coefficients();
        let n = forward_differences(&bec).unwrap();
        assert_eq!(n.deltas(), &[BigInt::from(1), BigInt::from(2), BigInt::from(1)]);
        let n = forward_differences(&[rat(1, 1)]).unwrap();
        assert_eq!(n.deltas(), &[BigInt::from(1)]);
        let n = forward_differences(&[rat(0, 1), rat(1, 1)]).unwrap();
        assert_eq!(n.deltas(), &[BigInt::from(0), BigInt::from(1)]);
    }

    #[test]
    fn newton_rejects_non_integer_valued() {
        assert!(forward_differences(&[rat(0, 1), rat(1, 2)]).is_err());
    }

    #[test]
    fn newton_reconstruction_is_exact() {
        let polys = vec![
            ClassSpec::colored(5, 10).unwrap().polynomial_coefficients(),
            vec![rat(1, 1), rat(-1, 1), rat(1, 1)],
            vec![rat(0, 1), rat(1, 6), rat(1, 2), rat(1, 3)],
        ];
        for p in polys {
            let newton = forward_differences(&p).unwrap();
            for x in 0..=(p.len() as u64 + 5) {
                let direct = eval_rational(&p, &BigRational::from_integer(BigInt::from(x)));
                assert_eq!(BigRational::from_integer(newton.eval(x)), direct);
            }
        }
    }

    #[test]
    fn integer_partition_profile() {
        let p = dirichlet_profile::<f64>(&ClassSpec::integer_partitions(10).unwrap()).unwrap();
        assert_eq!(p.poles.len(), 1);
        assert_eq!(p.poles[0].position, 1);
        assert_eq!(p.poles[0].residue, rat(1, 1));
        assert!((p.k2 - PI * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn bec_profile() {
        let p = dirichlet_profile::<f64>(&ClassSpec::bec(10).unwrap()).unwrap();
        let positions: Vec<u32> = p.poles.iter().map(|q| q.position).collect();
        let residues: Vec<BigRational> = p.poles.iter().map(|q| q.residue.clone()).collect();
        assert_eq!(positions, vec![1, 2, 3]);
        assert_eq!(residues, vec![rat(1, 1), rat(3, 2), rat(1, 2)]);
        assert_eq!(p.rightmost_pole(), 3);
        // K2 = (1/2) 4! zeta(4)
        assert!((p.k2 - 12.0 * PI.powi(4) / 90.0).abs() < 1e-10);
    }

    #[test]
    fn colored_and_expanded_profiles_agree() {
        for d in 1..=5u32 {
            let colored = ClassSpec::colored(d, 12).unwrap();
            let poly = ClassSpec::polynomial(colored.polynomial_coefficients(), 12).unwrap();
            assert_eq!(
                dirichlet_profile::<f64>(&colored).unwrap(),
                dirichlet_profile::<f64>(&poly).unwrap()
            );
        }
    }

    #[test]
    fn leading_coefficient_at_least_inverse_factorial() {
        for spec in [
            ClassSpec::colored(4, 10).unwrap(),
            ClassSpec::polynomial_int(&[1, -1, 1], 10).unwrap(),
            ClassSpec::polynomial_int(&[0, 1], 10).unwrap(),
        ] {
            let p = dirichlet_profile::<f64>(&spec).unwrap();
            let r_fact: i64 = (1..=p.degree as i64).product();
            assert!(p.leading_residue() >= &rat(1, r_fact));
            assert!(p.k2 >= 1.0);
        }
    }

    #[test]
    fn dirichlet_series_matches_partial_sums() {
        let spec = ClassSpec::bec(10).unwrap();
        let profile = dirichlet_profile::<f64>(&spec).unwrap();
        let s: f64 = 5.0;
        let big_k = 200_000u64;
        let partial: f64 = (1..=big_k)
            .rev()
            .map(|k| spec.weight_f64(k) * (k as f64).powf(-s))
            .sum();
        // Tail sum_{k>K} (k+1)(k+2)/2 k^{-5} <= (K^{-2})/4 (1 + 3/K)^2 + ...
        let tail = 0.26 / (big_k as f64).powi(2) + 1.6 / (big_k as f64).powi(3);
        let closed = profile.dirichlet_series(s).unwrap();
        assert!(closed >= partial);
        assert!(closed - partial <= tail + 1e-12, "{} vs {}", closed - partial, tail);
    }

    #[test]
    fn acceptance_bound_shapes() {
        let n = 1000;
        let b0 = acceptance_lower_bound::<f64>(0, n);
        let expected = (2.0 * n as f64).powf(-0.75) / (2.0 * (2.0 * PI).sqrt());
        assert_relative_eq!(b0, expected, max_relative = 1e-14);
        let b2 = acceptance_lower_bound::<f64>(2, n);
        let expected = (4.0 * n as f64).powf(-0.625) / (2.0 * (2.0 * PI).sqrt());
        assert_relative_eq!(b2, expected, max_relative = 1e-14);
        for r in 0..5 {
            for n in 3..200u64 {
                assert!(acceptance_lower_bound::<f64>(r, n + 1) < acceptance_lower_bound::<f64>(r, n));
            }
        }
    }

    #[test]
    fn acceptance_bound_in_degree() {
        // Decreasing in r only for small n; the exponent's approach to -1/2
        // eventually outweighs the growing base.
        for n in 3..=12u64 {
            for r in 0..5 {
                assert!(acceptance_lower_bound::<f64>(r + 1, n) < acceptance_lower_bound::<f64>(r, n));
            }
        }
        assert!(acceptance_lower_bound::<f64>(1, 13) > acceptance_lower_bound::<f64>(0, 13));
        assert!(acceptance_lower_bound::<f64>(3, 1000) > acceptance_lower_bound::<f64>(2, 1000));
    }

    #[test]
    fn condition_iii_examples() {
        let pts = condition_iii_witness(&ClassSpec::integer_partitions(5).unwrap(), &[0.01f64], &[0.5])
            .unwrap();
        assert!(pts[0].holds());
        let pts = condition_iii_witness(&ClassSpec::bec(5).unwrap(), &[0.001f64], &[0.1]).unwrap();
        assert!(pts[0].margin() > 0.0);
    }

    #[test]
    fn condition_iii_domain_checks() {
        let spec = ClassSpec::integer_partitions(5).unwrap();
        assert!(condition_iii_witness(&spec, &[0.01f64], &[1.0]).is_err());
        assert!(condition_iii_witness(&spec, &[0.01f64], &[0.05]).is_err());
        assert!(condition_iii_witness(&spec, &[0.2f64], &[0.5]).is_err());
        assert!(condition_iii_witness(&spec, &[0.0f64], &[0.5]).is_err());
    }
}
