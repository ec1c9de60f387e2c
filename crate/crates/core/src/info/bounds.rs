//! Finite-n bounds on error, correct-decoding, overflow and underflow
//! probabilities, all evaluated by exhaustive scans over joint types.

use serde::Serialize;

use super::exponent::{
    converse_correct_exponent, correct_exponent_inside, error_exponent_outside, Assumptions,
    Exponent,
};
use super::{epsilon_n, SourceSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bounds {
    pub n: usize,
    pub rate: f64,
    pub epsilon: f64,
    /// min D over types outside the decodable set at `rate`.
    pub min_div_outside: Exponent,
    /// min D over types outside the decodable set at `rate + ε_n`.
    pub min_div_outside_slack: Exponent,
    /// min D over the correctly decoded types at `rate`.
    pub min_div_inside: Exponent,
    /// min of clipped rate gap plus D over all types.
    pub converse_objective: Exponent,
    /// Upper bound on `e_x + e_y` of the universal fixed-length code.
    pub error_upper: f64,
    /// Lower bound on `e_x + e_y` of any fixed-length code at this rate.
    pub error_lower: f64,
    /// Lower bound on the correct-decoding probability.
    pub correct_lower: f64,
    /// Upper bound on the correct-decoding probability of any code.
    pub correct_upper: f64,
    /// Upper bound on `Pr{l > n(R+ε_n)}` for the variable-length code.
    pub overflow_upper: f64,
    /// Lower bound on `Pr{l > n(R+ε_n)}` for any variable-length code.
    pub overflow_lower: f64,
    /// Upper bound on `Pr{l < nR}` for the variable-length code.
    pub underflow_upper: f64,
    /// Converse-side underflow expression, kept in its upper-bound (`≤`) form.
    /// Reported only; no ordering against the exact value is asserted.
    pub underflow_converse: f64,
}

impl Bounds {
    pub fn compute(n: usize, rate: f64, p: &SourceSpec, assumptions: &Assumptions) -> Bounds {
        let eps = epsilon_n(n, p.ax(), p.ay());
        let nf = n as f64;
        let k = (p.ax().size() * p.ay().size()) as f64;
        let poly = k * (nf + 1.0).log2();

        let min_div_outside = error_exponent_outside(rate, p, n).value;
        let min_div_outside_slack = error_exponent_outside(rate + eps, p, n).value;
        let min_div_inside = correct_exponent_inside(rate, p, n, assumptions).value;
        let gamma = assumptions.converse_slack.eval(n, p);
        let converse_objective = converse_correct_exponent(rate, p, n, gamma).value;

        let scaled = |log2_prefactor: f64, e: Exponent| match e {
            Exponent::Finite(v) => (log2_prefactor - nf * v).exp2(),
            Exponent::Infinite => 0.0,
        };

        let eps2 = assumptions.underflow_direct_slack.eval(n, p);
        let under_inside = correct_exponent_inside(rate - eps2, p, n, assumptions).value;
        let eps1 = assumptions.underflow_converse_slack.eval(n, p);
        let under_objective = converse_correct_exponent(rate, p, n, eps).value;

        Bounds {
            n,
            rate,
            epsilon: eps,
            min_div_outside,
            min_div_outside_slack,
            min_div_inside,
            converse_objective,
            error_upper: scaled(1.0 + poly, min_div_outside),
            error_lower: scaled(-1.0 - poly, min_div_outside_slack),
            correct_lower: scaled(-nf * eps, min_div_inside),
            correct_upper: scaled(nf * eps, converse_objective),
            overflow_upper: scaled(poly, min_div_outside),
            overflow_lower: scaled(-poly, min_div_outside_slack),
            underflow_upper: scaled(-nf * eps, under_inside),
            underflow_converse: scaled(nf * eps1, under_objective),
        }
    }
}
