//! Parameters on the extended positive half-line.
//!
//! Maximum likelihood estimates of the degree models do not exist on the
//! boundary of the degree-sequence polytopes; the supremum is then approached
//! with some coordinates running off to `0` or `+inf`. Those limits are kept
//! as explicit variants instead of very large or very small floats so that
//! the probabilities they imply are exactly `0` or `1`.

use serde::{Deserialize, Serialize};

/// Order in which a coordinate was forced to its limit while peeling a
/// degree sequence; a smaller rank diverges faster. Only ranks from the same
/// fit are comparable.
pub type Rank = u32;

/// Rank of a limit whose speed is unknown (read from a file, or a coordinate
/// that left the divergence bounds while iterating).
pub const UNRANKED: Rank = Rank::MAX;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Affinity {
    /// A strictly positive, finite odds factor `b = exp(beta)`.
    Finite(f64),
    /// Diverged towards 0 (`beta = -inf`).
    Zero(Rank),
    /// Diverged towards `+inf` (`beta = +inf`).
    Infinite(Rank),
    /// No free pairs to estimate from, e.g. the within-cluster entry of a
    /// singleton cluster.
    Undefined,
}

impl Affinity {
    pub fn from_value(b: f64) -> Self {
        if b.is_nan() {
            Affinity::Undefined
        } else if b <= 0.0 {
            Affinity::Zero(UNRANKED)
        } else if b.is_infinite() {
            Affinity::Infinite(UNRANKED)
        } else {
            Affinity::Finite(b)
        }
    }

    pub fn from_log(beta: f64) -> Self {
        if beta.is_nan() {
            Affinity::Undefined
        } else if beta == f64::NEG_INFINITY {
            Affinity::Zero(UNRANKED)
        } else if beta == f64::INFINITY {
            Affinity::Infinite(UNRANKED)
        } else {
            Affinity::Finite(beta.exp())
        }
    }

    /// The odds factor `b`, with `0`, `inf` and `NaN` for the flagged states.
    pub fn value(self) -> f64 {
        match self {
            Affinity::Finite(b) => b,
            Affinity::Zero(_) => 0.0,
            Affinity::Infinite(_) => f64::INFINITY,
            Affinity::Undefined => f64::NAN,
        }
    }

    /// `beta = ln b`, with `-inf`, `inf` and `NaN` for the flagged states.
    pub fn log(self) -> f64 {
        match self {
            Affinity::Finite(b) => b.ln(),
            Affinity::Zero(_) => f64::NEG_INFINITY,
            Affinity::Infinite(_) => f64::INFINITY,
            Affinity::Undefined => f64::NAN,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Affinity::Finite(_))
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Affinity::Zero(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Affinity::Infinite(_))
    }

    pub fn limit(self) -> Option<Limit> {
        match self {
            Affinity::Zero(_) => Some(Limit::Zero),
            Affinity::Infinite(_) => Some(Limit::Infinity),
            _ => None,
        }
    }

    /// `beta` with the diverged states replaced by `-cap` / `+cap`.
    /// Undefined entries carry no information and map to `0`.
    pub fn capped_log(self, cap: f64) -> f64 {
        match self {
            Affinity::Finite(b) => b.ln(),
            Affinity::Zero(_) => -cap,
            Affinity::Infinite(_) => cap,
            Affinity::Undefined => 0.0,
        }
    }
}

/// Direction in which a coordinate diverged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Limit {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "inf")]
    Infinity,
}

impl Limit {
    pub fn affinity(self, rank: Rank) -> Affinity {
        match self {
            Limit::Zero => Affinity::Zero(rank),
            Limit::Infinity => Affinity::Infinite(rank),
        }
    }
}

/// Probability of a tie whose odds are the product of two affinities.
///
/// A diverged factor forces the outcome: `+inf` gives 1 and `0` gives 0.
/// For `0 * inf` the factor with the smaller rank wins; equal ranks are
/// indeterminate and resolve to 1/2 (log-odds 0). Any undefined factor gives
/// `NaN`.
pub fn pair_probability(a: Affinity, b: Affinity) -> f64 {
    use Affinity::*;
    match (a, b) {
        (Undefined, _) | (_, Undefined) => f64::NAN,
        (Infinite(ri), Zero(rz)) | (Zero(rz), Infinite(ri)) => match ri.cmp(&rz) {
            std::cmp::Ordering::Less => 1.0,
            std::cmp::Ordering::Greater => 0.0,
            std::cmp::Ordering::Equal => 0.5,
        },
        (Infinite(_), _) | (_, Infinite(_)) => 1.0,
        (Zero(_), _) | (_, Zero(_)) => 0.0,
        (Finite(x), Finite(y)) => odds_to_probability(x * y),
    }
}

/// `x / (1 + x)`, exact at the ends of the extended half-line.
#[inline]
pub fn odds_to_probability(x: f64) -> f64 {
    if x.is_infinite() {
        1.0
    } else {
        x / (1.0 + x)
    }
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln p(a)` for a Bernoulli outcome `a` at log-odds `eta`.
#[inline]
pub fn bernoulli_log_mass(a: bool, eta: f64) -> f64 {
    if a {
        -softplus(-eta)
    } else {
        -softplus(eta)
    }
}

/// `ln p(a)` for a Bernoulli outcome at probability `p`, with `0 ln 0 = 0`.
#[inline]
pub fn bernoulli_log_mass_p(a: bool, p: f64) -> f64 {
    let q = if a { p } else { 1.0 - p };
    if q == 1.0 {
        0.0
    } else {
        q.ln()
    }
}
