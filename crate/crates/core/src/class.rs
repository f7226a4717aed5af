//! Weighted-partition class descriptions.
//!
//! A class is a multiset construction over summands where size `k` offers
//! `b_k` distinguishable types. Two families are supported: `b_k = p(k)` for
//! an integer-valued polynomial `p`, and colored multisets where
//! `b_k = C(k + d - 1, d - 1)` (the Bose-Einstein condensate family for d = 3).

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which weight sequence a class uses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassKind {
    /// `b_k = a_0 + a_1 k + ... + a_r k^r`, coefficients lowest degree first.
    Polynomial { coeffs: Vec<BigRational> },
    /// `b_k = C(k + d - 1, d - 1)`: nonempty multisets over `d` colors.
    Colored { colors: u32 },
}

/// A weighted-partition class truncated to summand sizes `1..=truncation`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct ClassSpec {
    kind: ClassKind,
    truncation: usize,
}

impl ClassSpec {
    /// Polynomial weights. Trailing zero coefficients are dropped; `p(k)` must
    /// be a positive integer for every `k` in `1..=truncation`.
    pub fn polynomial(mut coeffs: Vec<BigRational>, truncation: usize) -> Result<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidSpec("polynomial is identically zero".into()));
        }
        check_truncation(truncation)?;
        for k in 1..=truncation {
            let value = eval_rational(&coeffs, &BigRational::from_integer(BigInt::from(k)));
            if !value.is_integer() || !value.is_positive() {
                return Err(Error::InvalidSpec(format!(
                    "p({k}) = {value} is not a positive integer"
                )));
            }
        }
        Ok(Self {
            kind: ClassKind::Polynomial { coeffs },
            truncation,
        })
    }

    /// Polynomial weights from integer coefficients.
    pub fn polynomial_int(coeffs: &[i64], truncation: usize) -> Result<Self> {
        Self::polynomial(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
            truncation,
        )
    }

    /// Colored multisets over `colors` colors; `colors = 3` gives BECs.
    pub fn colored(colors: u32, truncation: usize) -> Result<Self> {
        if colors == 0 {
            return Err(Error::InvalidSpec("color count must be at least 1".into()));
        }
        check_truncation(truncation)?;
        Ok(Self {
            kind: ClassKind::Colored { colors },
            truncation,
        })
    }

    /// Bose-Einstein condensates in a three-dimensional trap.
    pub fn bec(truncation: usize) -> Result<Self> {
        Self::colored(3, truncation)
    }

    /// Integer partitions (`p(x) = 1`).
    pub fn integer_partitions(truncation: usize) -> Result<Self> {
        Self::polynomial_int(&[1], truncation)
    }

    pub fn kind(&self) -> &ClassKind {
        &self.kind
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Same weights, different truncation. Re-validates positivity.
    pub fn with_truncation(&self, truncation: usize) -> Result<Self> {
        match &self.kind {
            ClassKind::Polynomial { coeffs } => Self::polynomial(coeffs.clone(), truncation),
            ClassKind::Colored { colors } => Self::colored(*colors, truncation),
        }
    }

    /// Degree `r` of the weight polynomial.
    pub fn degree(&self) -> usize {
        match &self.kind {
            ClassKind::Polynomial { coeffs } => coeffs.len() - 1,
            ClassKind::Colored { colors } => *colors as usize - 1,
        }
    }

    /// Coefficients `a_0..a_r` of the weight polynomial. Colored classes are
    /// expanded from `prod_{i=1}^{d-1} (x + i) / i`.
    pub fn polynomial_coefficients(&self) -> Vec<BigRational> {
        match &self.kind {
            ClassKind::Polynomial { coeffs } => coeffs.clone(),
            ClassKind::Colored { colors } => {
                let mut poly = vec![BigRational::one()];
                for i in 1..*colors {
                    let inv = BigRational::new(BigInt::one(), BigInt::from(i));
                    let shift = BigRational::from_integer(BigInt::from(i));
                    let mut next = vec![BigRational::zero(); poly.len() + 1];
                    for (j, c) in poly.iter().enumerate() {
                        next[j] += c * &shift * &inv;
                        next[j + 1] += c * &inv;
                    }
                    poly = next;
                }
                poly
            }
        }
    }

    /// Number of summand types of size `k` (`b_k`), for `1 <= k <= truncation`.
    pub fn weight_count(&self, k: usize) -> Result<BigUint> {
        if k == 0 || k > self.truncation {
            return Err(Error::OutOfRange(format!(
                "summand size {k} outside 1..={}",
                self.truncation
            )));
        }
        Ok(self.weight_unchecked(k as u64))
    }

    /// `b_k` for every `k` in `1..=truncation`; index 0 holds `b_1`.
    pub fn weight_counts(&self) -> Vec<BigUint> {
        (1..=self.truncation as u64)
            .map(|k| self.weight_unchecked(k))
            .collect()
    }

    /// `b_k` for any `k >= 1`, ignoring truncation. Polynomial values beyond
    /// the validated range are clamped at zero.
    pub(crate) fn weight_unchecked(&self, k: u64) -> BigUint {
        match &self.kind {
            ClassKind::Polynomial { coeffs } => {
                let v = eval_rational(coeffs, &BigRational::from_integer(BigInt::from(k)));
                v.to_integer().to_biguint().unwrap_or_default()
            }
            ClassKind::Colored { colors } => multichoose(k, *colors as u64),
        }
    }

    /// `b_k` as a float for arbitrary `k >= 1` (no truncation check).
    pub fn weight_f64(&self, k: u64) -> f64 {
        match &self.kind {
            ClassKind::Polynomial { coeffs } => {
                let x = k as f64;
                coeffs
                    .iter()
                    .rev()
                    .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
            }
            ClassKind::Colored { colors } => {
                // C(k + d - 1, d - 1) as a running product.
                (1..*colors as u64).fold(1.0, |acc, i| acc * (k + i) as f64 / i as f64)
            }
        }
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ClassKind::Colored { colors } => write!(f, "colored(d={colors}, n={})", self.truncation),
            ClassKind::Polynomial { coeffs } => {
                let cs: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "poly([{}], n={})", cs.join(", "), self.truncation)
            }
        }
    }
}

/// `C(m + d - 1, d - 1)`: multisets of size `m` over `d` kinds.
pub fn multichoose(m: u64, d: u64) -> BigUint {
    if d == 0 {
        return if m == 0 { BigUint::one() } else { BigUint::zero() };
    }
    let mut acc = BigUint::one();
    for i in 1..d {
        acc = acc * BigUint::from(m + i) / BigUint::from(i);
    }
    acc
}

pub(crate) fn eval_rational(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn check_truncation(truncation: usize) -> Result<()> {
    if truncation == 0 {
        return Err(Error::InvalidSpec("truncation n must be positive".into()));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum SpecRepr {
    #[serde(rename = "colored")]
    Colored { d: u32, n: usize },
    #[serde(rename = "poly")]
    Poly { coeffs: Vec<String>, n: usize },
}

impl TryFrom<SpecRepr> for ClassSpec {
    type Error = Error;

    fn try_from(repr: SpecRepr) -> Result<Self> {
        match repr {
            SpecRepr::Colored { d, n } => ClassSpec::colored(d, n),
            SpecRepr::Poly { coeffs, n } => {
                let parsed = coeffs
                    .iter()
                    .map(|s| {
                        BigRational::from_str(s.trim()).map_err(|_| {
                            Error::InvalidSpec(format!("coefficient {s:?} is not a rational"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                ClassSpec::polynomial(parsed, n)
            }
        }
    }
}

impl From<ClassSpec> for SpecRepr {
    fn from(spec: ClassSpec) -> Self {
        match spec.kind {
            ClassKind::Colored { colors } => SpecRepr::Colored {
                d: colors,
                n: spec.truncation,
            },
            ClassKind::Polynomial { coeffs } => SpecRepr::Poly {
                coeffs: coeffs.iter().map(|c| c.to_string()).collect(),
                n: spec.truncation,
            },
        }
    }
}
