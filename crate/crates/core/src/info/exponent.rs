use std::fmt;

use serde::{Serialize, Serializer};

use super::{epsilon_n, in_decodable_set, max_conditional_entropy, type_divergence, SourceSpec};
use crate::types::JointType;

/// A nonnegative exponent in bits, with `+∞` kept as its own variant (the
/// minimum over an empty set of types).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn from_f64(v: f64) -> Self {
        if v.is_infinite() {
            Exponent::Infinite
        } else {
            Exponent::Finite(v)
        }
    }

    /// The value as a float, `f64::INFINITY` for [`Exponent::Infinite`].
    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(v) => v,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// `2^{-n·self}`, zero for an infinite exponent.
    pub fn decay(self, n: usize) -> f64 {
        match self {
            Exponent::Finite(v) => (-(n as f64) * v).exp2(),
            Exponent::Infinite => 0.0,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(v) => write!(f, "{v}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(v) => s.serialize_f64(*v),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentReport {
    pub rate: f64,
    pub n: usize,
    pub value: Exponent,
    /// First minimizing joint type in enumeration order, `None` when the
    /// minimization ran over an empty set.
    pub argmin: Option<JointType>,
}

/// How a vanishing slack sequence is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Slack {
    /// `ε_n = (|X×Y| log2(n+1) + 1)/n`.
    EpsilonN,
    Fixed(f64),
}

impl Slack {
    pub fn eval(self, n: usize, p: &SourceSpec) -> f64 {
        match self {
            Slack::EpsilonN => epsilon_n(n, p.ax(), p.ay()),
            Slack::Fixed(v) => v,
        }
    }
}

/// Readings for quantities the correct-decoding and underflow bounds use
/// without defining.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Assumptions {
    /// The set of correctly decoded types is read as the decodable set at
    /// `rate + correct_set_shift`.
    pub correct_set_shift: f64,
    /// Slack added to the rate inside the clipped rate gap of the
    /// correct-decoding converse.
    pub converse_slack: Slack,
    /// Slack subtracted outside the minimum in the underflow converse.
    pub underflow_converse_slack: Slack,
    /// Slack subtracted from the rate in the underflow direct bound.
    pub underflow_direct_slack: Slack,
}

/// Correctly decoded set = decodable set, every slack = `ε_n`.
pub const DEFAULT_ASSUMPTIONS: Assumptions = Assumptions {
    correct_set_shift: 0.0,
    converse_slack: Slack::EpsilonN,
    underflow_converse_slack: Slack::EpsilonN,
    underflow_direct_slack: Slack::EpsilonN,
};

impl Default for Assumptions {
    fn default() -> Self {
        DEFAULT_ASSUMPTIONS
    }
}

/// Minimum of `objective` over all joint types of length `n` accepted by
/// `keep`. Ties resolve to the earliest type in enumeration order.
pub fn min_divergence<K, O>(n: usize, p: &SourceSpec, keep: K, objective: O) -> (Exponent, Option<JointType>)
where
    K: Fn(&JointType) -> bool,
    O: Fn(&JointType) -> f64,
{
    let mut best: Option<(f64, JointType)> = None;
    for jt in JointType::enumerate(n, p.ax(), p.ay()) {
        if !keep(&jt) {
            continue;
        }
        let v = objective(&jt);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, jt));
        }
    }
    match best {
        Some((v, jt)) if v.is_finite() => (Exponent::Finite(v), Some(jt)),
        Some((_, jt)) => (Exponent::Infinite, Some(jt)),
        None => (Exponent::Infinite, None),
    }
}

/// `min D(Q‖P)` over joint types outside the decodable set at `rate`.
pub fn error_exponent_outside(rate: f64, p: &SourceSpec, n: usize) -> ExponentReport {
    let (value, argmin) = min_divergence(
        n,
        p,
        |jt| !in_decodable_set(jt, rate),
        |jt| type_divergence(jt, p),
    );
    ExponentReport {
        rate,
        n,
        value,
        argmin,
    }
}

/// `min D(Q‖P)` over the correctly decoded types at `rate`.
pub fn correct_exponent_inside(
    rate: f64,
    p: &SourceSpec,
    n: usize,
    assumptions: &Assumptions,
) -> ExponentReport {
    let shifted = rate + assumptions.correct_set_shift;
    let (value, argmin) = min_divergence(
        n,
        p,
        |jt| in_decodable_set(jt, shifted),
        |jt| type_divergence(jt, p),
    );
    ExponentReport {
        rate,
        n,
        value,
        argmin,
    }
}

/// `min over all types of |max(H(V|Q_X), H(W|Q_Y)) − (rate + slack)|⁺ + D(Q‖P)`.
pub fn converse_correct_exponent(rate: f64, p: &SourceSpec, n: usize, slack: f64) -> ExponentReport {
    let target = rate + slack;
    let (value, argmin) = min_divergence(
        n,
        p,
        |_| true,
        |jt| (max_conditional_entropy(jt) - target).max(0.0) + type_divergence(jt, p),
    );
    ExponentReport {
        rate,
        n,
        value,
        argmin,
    }
}
