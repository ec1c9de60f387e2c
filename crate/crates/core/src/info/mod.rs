//! Entropies, divergences, exponent scans and the finite-n coding bounds.
//! All logarithms are base 2.

mod bounds;
mod exponent;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{multinomial, Alphabet, JointType};

pub use bounds::Bounds;
pub use exponent::{
    converse_correct_exponent, correct_exponent_inside, error_exponent_outside, min_divergence,
    Assumptions, Exponent, ExponentReport, Slack, DEFAULT_ASSUMPTIONS,
};

/// Tolerance for comparing conditional entropies against a rate. Ties
/// count as inside the decodable set.
pub const RATE_TOLERANCE: f64 = 1e-12;

/// Tolerance on the total mass of a source distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Which sequence is being predicted from which.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// `H(X|Y)`, i.e. `H(W|Q_Y)`.
    XGivenY,
    /// `H(Y|X)`, i.e. `H(V|Q_X)`.
    YGivenX,
}

/// Anything that can be viewed as a joint distribution over `X × Y`,
/// flattened row-major.
pub trait JointDistribution {
    fn alphabets(&self) -> (Alphabet, Alphabet);
    fn joint_probabilities(&self) -> Vec<f64>;
}

impl JointDistribution for JointType {
    fn alphabets(&self) -> (Alphabet, Alphabet) {
        (self.ax(), self.ay())
    }
    fn joint_probabilities(&self) -> Vec<f64> {
        self.probabilities()
    }
}

/// Generic distribution `P_XY` of a discrete memoryless pair source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SourceSpecRepr", into = "SourceSpecRepr")]
pub struct SourceSpec {
    p_xy: Vec<f64>,
    ax: Alphabet,
    ay: Alphabet,
}

#[derive(Serialize, Deserialize)]
struct SourceSpecRepr {
    p_xy: Vec<Vec<f64>>,
}

impl TryFrom<SourceSpecRepr> for SourceSpec {
    type Error = Error;
    fn try_from(r: SourceSpecRepr) -> Result<Self> {
        SourceSpec::from_rows(&r.p_xy)
    }
}

impl From<SourceSpec> for SourceSpecRepr {
    fn from(s: SourceSpec) -> Self {
        SourceSpecRepr {
            p_xy: (0..s.ax.size()).map(|a| s.row(a).to_vec()).collect(),
        }
    }
}

impl SourceSpec {
    pub fn new(p_xy: Vec<f64>, ax: Alphabet, ay: Alphabet) -> Result<Self> {
        if p_xy.len() != ax.size() * ay.size() {
            return Err(Error::InvalidSource(format!(
                "expected {} cells, got {}",
                ax.size() * ay.size(),
                p_xy.len()
            )));
        }
        if let Some(bad) = p_xy.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidSource(format!("invalid probability {bad}")));
        }
        let total: f64 = p_xy.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidSource(format!("probabilities sum to {total}")));
        }
        Ok(SourceSpec { p_xy, ax, ay })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let ax = Alphabet::new(rows.len())
            .map_err(|_| Error::InvalidSource("bad number of rows".into()))?;
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let ay = Alphabet::new(width)
            .map_err(|_| Error::InvalidSource("bad number of columns".into()))?;
        let mut p = Vec::with_capacity(ax.size() * ay.size());
        for r in rows {
            if r.as_ref().len() != width {
                return Err(Error::InvalidSource("ragged matrix".into()));
            }
            p.extend_from_slice(r.as_ref());
        }
        SourceSpec::new(p, ax, ay)
    }

    /// Doubly symmetric binary source: uniform X, Y = X flipped with
    /// probability `crossover`.
    pub fn dsbs(crossover: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&crossover) {
            return Err(Error::InvalidSource(format!("crossover {crossover}")));
        }
        let (same, flip) = ((1.0 - crossover) / 2.0, crossover / 2.0);
        SourceSpec::new(vec![same, flip, flip, same], Alphabet::BINARY, Alphabet::BINARY)
    }

    /// Independent uniform X and Y.
    pub fn uniform(ax: Alphabet, ay: Alphabet) -> Self {
        let k = ax.size() * ay.size();
        SourceSpec {
            p_xy: vec![1.0 / k as f64; k],
            ax,
            ay,
        }
    }

    #[inline]
    pub fn ax(&self) -> Alphabet {
        self.ax
    }

    #[inline]
    pub fn ay(&self) -> Alphabet {
        self.ay
    }

    #[inline]
    pub fn p(&self, a: usize, b: usize) -> f64 {
        self.p_xy[a * self.ay.size() + b]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.p_xy
    }

    pub fn row(&self, a: usize) -> &[f64] {
        let w = self.ay.size();
        &self.p_xy[a * w..(a + 1) * w]
    }

    pub fn x_marginal(&self) -> Vec<f64> {
        (0..self.ax.size()).map(|a| self.row(a).iter().sum()).collect()
    }

    pub fn y_marginal(&self) -> Vec<f64> {
        (0..self.ay.size())
            .map(|b| (0..self.ax.size()).map(|a| self.p(a, b)).sum())
            .collect()
    }
}

impl JointDistribution for SourceSpec {
    fn alphabets(&self) -> (Alphabet, Alphabet) {
        (self.ax, self.ay)
    }
    fn joint_probabilities(&self) -> Vec<f64> {
        self.p_xy.clone()
    }
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(q: &[f64]) -> f64 {
    let h: f64 = q.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum();
    h.max(0.0)
}

/// `H(X|Y)` or `H(Y|X)` of a joint distribution.
pub fn conditional_entropy<D: JointDistribution + ?Sized>(d: &D, direction: Direction) -> f64 {
    let (ax, ay) = d.alphabets();
    let p = d.joint_probabilities();
    let (outer, inner) = match direction {
        Direction::YGivenX => (ax.size(), ay.size()),
        Direction::XGivenY => (ay.size(), ax.size()),
    };
    let cell = |o: usize, i: usize| match direction {
        Direction::YGivenX => p[o * ay.size() + i],
        Direction::XGivenY => p[i * ay.size() + o],
    };
    let mut h = 0.0;
    for o in 0..outer {
        let marginal: f64 = (0..inner).map(|i| cell(o, i)).sum();
        if marginal <= 0.0 {
            continue;
        }
        for i in 0..inner {
            let c = cell(o, i);
            if c > 0.0 {
                h += c * (marginal / c).log2();
            }
        }
    }
    h.max(0.0)
}

/// `max{H(X|Y), H(Y|X)}`.
pub fn max_conditional_entropy<D: JointDistribution + ?Sized>(d: &D) -> f64 {
    conditional_entropy(d, Direction::XGivenY).max(conditional_entropy(d, Direction::YGivenX))
}

/// `D(q‖p)` in bits; `+∞` when `q` puts mass where `p` has none.
pub fn kl_divergence(q: &[f64], p: &[f64]) -> f64 {
    assert_eq!(q.len(), p.len(), "distributions over different supports");
    let mut d = 0.0;
    for (&qi, &pi) in q.iter().zip(p) {
        if qi <= 0.0 {
            continue;
        }
        if pi <= 0.0 {
            return f64::INFINITY;
        }
        d += qi * (qi / pi).log2();
    }
    d.max(0.0)
}

/// `D(Q_XY‖P_XY)` for a joint type.
pub fn type_divergence(jt: &JointType, p: &SourceSpec) -> f64 {
    kl_divergence(&jt.probabilities(), p.probabilities())
}

/// Minimum achievable rate, fixed- or variable-length:
/// `max{H(X|Y), H(Y|X)}` of the source.
pub fn achievable_rate(p: &SourceSpec) -> f64 {
    max_conditional_entropy(p)
}

/// Membership in the set of joint types whose two conditional entropies
/// are both at most `rate` (ties inside).
pub fn in_decodable_set(jt: &JointType, rate: f64) -> bool {
    max_conditional_entropy(jt) <= rate + RATE_TOLERANCE
}

/// `(|X×Y| log2(n+1) + 1) / n`.
pub fn epsilon_n(n: usize, ax: Alphabet, ay: Alphabet) -> f64 {
    let k = (ax.size() * ay.size()) as f64;
    (k * ((n + 1) as f64).log2() + 1.0) / n as f64
}

fn log2_factorial(m: u32) -> f64 {
    (2..=m).map(|k| (k as f64).log2()).sum()
}

/// `log2 |T_Q|` for a joint type class.
pub fn log2_type_class_size(jt: &JointType) -> f64 {
    let n = jt.n() as u32;
    if n <= 170 {
        // exact up to f64 rounding of the final conversion
        use num_traits::ToPrimitive;
        if let Some(v) = multinomial(jt.counts()).to_f64() {
            return v.log2();
        }
    }
    log2_factorial(n) - jt.counts().iter().map(|&c| log2_factorial(c)).sum::<f64>()
}

/// `log2 P_XY(T_Q)`, via the point probability
/// `2^{-n(D(Q‖P)+H(Q))}` of each member times the class size.
/// `-∞` when the class has probability zero.
pub fn log2_type_probability(jt: &JointType, p: &SourceSpec) -> f64 {
    let d = type_divergence(jt, p);
    if d.is_infinite() {
        return f64::NEG_INFINITY;
    }
    let h = entropy(&jt.probabilities());
    log2_type_class_size(jt) - jt.n() as f64 * (d + h)
}

pub fn type_probability(jt: &JointType, p: &SourceSpec) -> f64 {
    log2_type_probability(jt, p).exp2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::v_shell_size;
    use crate::types::w_shell_size;
    use num_traits::ToPrimitive;

    const B: Alphabet = Alphabet::BINARY;

    /// h(p) written out independently of `entropy`.
    fn h2(p: f64) -> f64 {
        -(p * p.ln() + (1.0 - p) * (1.0 - p).ln()) / std::f64::consts::LN_2
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
        assert_eq!(entropy(&[0.5, 0.5]), 1.0);
        assert!((entropy(&[0.25, 0.75]) - 0.811_278_124_459_132_8).abs() < 1e-15);
    }

    #[test]
    fn conditional_entropy_examples() {
        let u = SourceSpec::uniform(B, B);
        assert!((conditional_entropy(&u, Direction::XGivenY) - 1.0).abs() < 1e-15);
        assert!((conditional_entropy(&u, Direction::YGivenX) - 1.0).abs() < 1e-15);

        let jt = JointType::from_rows(&[[2, 0], [0, 2]]).unwrap();
        assert_eq!(conditional_entropy(&jt, Direction::XGivenY), 0.0);
        assert_eq!(conditional_entropy(&jt, Direction::YGivenX), 0.0);

        let s = SourceSpec::dsbs(0.11).unwrap();
        let want = h2(0.11);
        assert!((want - 0.499_915_958).abs() < 1e-9);
        assert!((conditional_entropy(&s, Direction::XGivenY) - want).abs() < 1e-12);
        assert!((conditional_entropy(&s, Direction::YGivenX) - want).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_is_asymmetric_in_general() {
        // X uniform on {0,1,2}, Y = [X == 2]
        let p = SourceSpec::from_rows(&[[1.0 / 3.0, 0.0], [1.0 / 3.0, 0.0], [0.0, 1.0 / 3.0]])
            .unwrap();
        assert!(conditional_entropy(&p, Direction::YGivenX).abs() < 1e-15);
        assert!((conditional_entropy(&p, Direction::XGivenY) - 2.0 / 3.0).abs() < 1e-12);
        assert!((achievable_rate(&p) - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn kl_examples() {
        let p = [0.2, 0.3, 0.5];
        assert_eq!(kl_divergence(&p, &p), 0.0);
        assert!((kl_divergence(&[1.0, 0.0], &[0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert_eq!(kl_divergence(&[0.5, 0.5], &[1.0, 0.0]), f64::INFINITY);
    }

    #[test]
    fn achievable_rate_examples() {
        assert!((achievable_rate(&SourceSpec::uniform(B, B)) - 1.0).abs() < 1e-15);
        let identity = SourceSpec::from_rows(&[[0.5, 0.0], [0.0, 0.5]]).unwrap();
        assert_eq!(achievable_rate(&identity), 0.0);
        let dsbs = SourceSpec::dsbs(0.11).unwrap();
        assert!((achievable_rate(&dsbs) - h2(0.11)).abs() < 1e-12);
    }

    #[test]
    fn decodable_set_examples() {
        for n in 1..=6 {
            for jt in JointType::enumerate(n, B, B) {
                assert!(in_decodable_set(&jt, 1.0));
                if jt.is_deterministic() {
                    assert!(in_decodable_set(&jt, 0.0));
                }
            }
        }
        let jt = JointType::from_rows(&[[1, 1], [1, 1]]).unwrap();
        assert!(!in_decodable_set(&jt, 0.9));
        assert!(in_decodable_set(&jt, 1.0));
    }

    #[test]
    fn decodable_set_is_monotone_in_rate() {
        let rates = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0];
        for jt in JointType::enumerate(6, B, B) {
            for w in rates.windows(2) {
                assert!(!in_decodable_set(&jt, w[0]) || in_decodable_set(&jt, w[1]));
            }
        }
    }

    #[test]
    fn epsilon_n_examples() {
        assert!((epsilon_n(1, B, B) - 5.0).abs() < 1e-15);
        assert!((epsilon_n(3, B, B) - 3.0).abs() < 1e-15);
        let eps: Vec<f64> = (1..200).map(|n| epsilon_n(n, B, B)).collect();
        assert!(eps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn entropy_ranges() {
        for n in 1..=6 {
            for jt in JointType::enumerate(n, B, B) {
                for dir in [Direction::XGivenY, Direction::YGivenX] {
                    let h = conditional_entropy(&jt, dir);
                    assert!((0.0..=1.0 + 1e-12).contains(&h));
                }
                let h = entropy(&jt.probabilities());
                assert!((0.0..=2.0 + 1e-12).contains(&h));
            }
        }
    }

    #[test]
    fn divergence_zero_iff_equal() {
        for n in 1..=6 {
            for q in JointType::enumerate(n, B, B) {
                let as_source = SourceSpec::new(q.probabilities(), B, B).unwrap();
                for r in JointType::enumerate(n, B, B) {
                    let d = type_divergence(&r, &as_source);
                    assert!(d >= 0.0);
                    assert_eq!(d.abs() < 1e-12, r == q, "{r} vs {q}");
                }
            }
        }
    }

    #[test]
    fn shell_sizes_obey_two_sided_bound() {
        for n in 1..=10 {
            let slack = ((n + 1) as f64).powi(4);
            for jt in JointType::enumerate(n, B, B) {
                for (size, dir) in [
                    (v_shell_size(&jt), Direction::YGivenX),
                    (w_shell_size(&jt), Direction::XGivenY),
                ] {
                    let size = size.to_f64().unwrap();
                    let top = (n as f64 * conditional_entropy(&jt, dir)).exp2();
                    assert!(size <= top * (1.0 + 1e-12), "{jt}: {size} > {top}");
                    assert!(size >= top / slack, "{jt}: {size} < {top}/{slack}");
                }
            }
        }
    }

    #[test]
    fn type_probability_matches_direct_product() {
        let p = SourceSpec::from_rows(&[[0.4, 0.1], [0.2, 0.3]]).unwrap();
        for n in 1..=8 {
            let mut total = 0.0;
            for jt in JointType::enumerate(n, B, B) {
                let size = multinomial(jt.counts()).to_f64().unwrap();
                let direct: f64 = size
                    * jt.counts()
                        .iter()
                        .zip(p.probabilities())
                        .map(|(&c, &pi)| pi.powi(c as i32))
                        .product::<f64>();
                let via = type_probability(&jt, &p);
                assert!((via - direct).abs() <= 1e-12 * direct.max(1e-300), "{jt}");
                total += via;
            }
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn type_probability_zero_off_support() {
        let p = SourceSpec::from_rows(&[[0.5, 0.0], [0.0, 0.5]]).unwrap();
        let jt = JointType::from_rows(&[[1, 1], [0, 0]]).unwrap();
        assert_eq!(type_probability(&jt, &p), 0.0);
    }

    #[test]
    fn source_validation() {
        assert!(SourceSpec::from_rows(&[[0.5, 0.5], [0.5, 0.5]]).is_err());
        assert!(SourceSpec::from_rows(&[[-0.5, 0.5], [0.5, 0.5]]).is_err());
        assert!(SourceSpec::dsbs(1.5).is_err());
        let s = SourceSpec::dsbs(0.2).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"p_xy":[[0.4,0.1],[0.1,0.4]]}"#);
        let back: SourceSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
    }
}
