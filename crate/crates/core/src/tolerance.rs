//! Tolerance vectors and the standard families built from them.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ToleranceError {
    #[error("a tolerance vector needs at least two entries, got {0}")]
    EmptyOrShort(usize),
    #[error("the first tolerance entry must be exactly 1, got {0}")]
    NotNormalized(String),
    #[error("tolerance entries must be non-increasing (entry {index} exceeds its predecessor)")]
    NotMonotone { index: usize },
    #[error("the last tolerance entry must be below 1, otherwise every agent tolerates everyone")]
    Trivial,
    #[error("tolerance entries must be non-negative")]
    Negative,
    #[error("alpha must satisfy 1 <= alpha <= lambda (alpha = {alpha}, lambda = {lambda})")]
    AlphaOutOfRange { alpha: usize, lambda: usize },
    #[error("alpha = lambda gives the all-ones vector, which describes a trivial game")]
    AlphaBinaryTrivial,
    #[error("a tolerance family needs lambda >= 2, got {0}")]
    LambdaTooSmall(usize),
    #[error("alpha is required for alpha-binary vectors and meaningless otherwise")]
    AlphaMismatch,
}

/// Weights `[t_0, ..., t_{λ-1}]` with `1 = t_0 ≥ t_1 ≥ ... ≥ t_{λ-1} ≥ 0` and
/// `t_{λ-1} < 1`. Entry `d` is the tolerance between types `d` apart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ToleranceVector {
    values: Vec<Rational>,
}

impl ToleranceVector {
    pub fn new(values: Vec<Rational>) -> Result<Self, ToleranceError> {
        if values.len() < 2 {
            return Err(ToleranceError::EmptyOrShort(values.len()));
        }
        if !values[0].is_one() {
            return Err(ToleranceError::NotNormalized(format_rational(&values[0])));
        }
        if let Some(index) = (1..values.len()).find(|&i| values[i] > values[i - 1]) {
            return Err(ToleranceError::NotMonotone { index });
        }
        let last = values[values.len() - 1];
        if last.is_one() {
            return Err(ToleranceError::Trivial);
        }
        if last < Rational::zero() {
            return Err(ToleranceError::Negative);
        }
        Ok(Self { values })
    }

    /// Number of types `λ`.
    pub fn lambda(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Tolerance between types at ordering distance `distance`.
    pub fn at(&self, distance: usize) -> Rational {
        self.values[distance]
    }

    /// Tolerance between 1-based types `a` and `b`.
    pub fn between(&self, a: u8, b: u8) -> Rational {
        self.values[(a as usize).abs_diff(b as usize)]
    }

    /// True when every entry is 0 except `t_0`.
    pub fn is_zero_tolerance(&self) -> bool {
        self.values[1..].iter().all(Zero::is_zero)
    }

    /// Length of the leading run of ones, i.e. the largest `α` such that this
    /// vector is lexicographically at least the `α`-binary vector.
    pub fn leading_ones(&self) -> usize {
        self.values.iter().take_while(|t| t.is_one()).count()
    }

    /// True when this is exactly the `alpha`-binary vector.
    pub fn is_alpha_binary(&self, alpha: usize) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(d, t)| if d < alpha { t.is_one() } else { t.is_zero() })
    }

    /// Integer weights `w_d` and a common scale `s` with `t_d = w_d / s`.
    pub fn scaled_weights(&self) -> (Vec<i64>, i64) {
        let scale = self
            .values
            .iter()
            .fold(1i128, |acc, t| acc.lcm(t.denom()));
        let scale = i64::try_from(scale).expect("tolerance denominators too large");
        let weights = self
            .values
            .iter()
            .map(|t| i64::try_from(t.numer() * (scale as i128) / t.denom()).expect("tolerance weight overflow"))
            .collect();
        (weights, scale)
    }
}

impl fmt::Display for ToleranceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, t) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", format_rational(t))?;
        }
        write!(f, "]")
    }
}

/// Named tolerance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ToleranceKind {
    /// `[1, 0, ..., 0]`.
    Zero,
    /// `t_d = 1` for `d < α`, else 0.
    AlphaBinary,
    /// `t_d = 1 - d/(λ-1)`.
    Proportional,
    /// `t_d = 1/(d+1)`.
    InverseProportional,
}

pub fn standard_tolerance(
    kind: ToleranceKind,
    lambda: usize,
    alpha: Option<usize>,
) -> Result<ToleranceVector, ToleranceError> {
    if lambda < 2 {
        return Err(ToleranceError::LambdaTooSmall(lambda));
    }
    if alpha.is_some() != (kind == ToleranceKind::AlphaBinary) {
        return Err(ToleranceError::AlphaMismatch);
    }
    let values = match kind {
        ToleranceKind::Zero => (0..lambda)
            .map(|d| if d == 0 { Rational::one() } else { Rational::zero() })
            .collect(),
        ToleranceKind::AlphaBinary => {
            let alpha = alpha.unwrap_or_default();
            if alpha < 1 || alpha > lambda {
                return Err(ToleranceError::AlphaOutOfRange { alpha, lambda });
            }
            if alpha == lambda {
                return Err(ToleranceError::AlphaBinaryTrivial);
            }
            (0..lambda)
                .map(|d| if d < alpha { Rational::one() } else { Rational::zero() })
                .collect()
        }
        ToleranceKind::Proportional => (0..lambda)
            .map(|d| Rational::one() - Rational::new(d as i128, (lambda - 1) as i128))
            .collect(),
        ToleranceKind::InverseProportional => {
            (0..lambda).map(|d| Rational::new(1, d as i128 + 1)).collect()
        }
    };
    ToleranceVector::new(values)
}

/// Total tolerance `τ = Σ_d t_d` and the per-type totals
/// `τ_ℓ = Σ_k t_{|ℓ-k|}` for `ℓ = 1..λ` (index 0 holds type 1).
pub fn tolerance_sums(tv: &ToleranceVector) -> (Rational, Vec<Rational>) {
    let lambda = tv.lambda();
    let tau = tv.values().iter().copied().sum();
    let per_type = (0..lambda)
        .map(|l| (0..lambda).map(|k| tv.at(l.abs_diff(k))).sum())
        .collect();
    (tau, per_type)
}
