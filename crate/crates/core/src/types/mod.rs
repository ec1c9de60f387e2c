//! Alphabets, sequences and their (joint) types.
//!
//! Letters are dense integers `0..size`. A joint type stores its count
//! matrix flattened row-major, rows indexed by the x-letter and columns by
//! the y-letter. Everything downstream (type indices in codewords, coding
//! table layout) depends on the enumeration order fixed here: lexicographic
//! on the flattened count matrix.

mod rank;

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use rank::{
    multinomial, rank_in_type_class, rank_in_v_shell, rank_in_w_shell, type_class_size,
    unrank_in_type_class, unrank_in_v_shell, unrank_in_w_shell, v_shell_size, w_shell_size,
};
pub(crate) use rank::{rank_small, unrank_small};

/// Exact unbounded count, used for class sizes and ranks.
pub type BigCount = BigUint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct Alphabet(u16);

impl Alphabet {
    pub const BINARY: Alphabet = Alphabet(2);
    pub const MAX_SIZE: usize = 256;

    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > Self::MAX_SIZE {
            return Err(Error::InvalidAlphabet(size));
        }
        Ok(Alphabet(size as u16))
    }

    #[inline]
    pub fn size(self) -> usize {
        self.0 as usize
    }

    /// Bits needed to store one letter verbatim.
    pub fn letter_bits(self) -> u32 {
        ceil_log2(self.size() as u64)
    }

    pub fn contains(self, letter: u8) -> bool {
        (letter as usize) < self.size()
    }
}

impl TryFrom<usize> for Alphabet {
    type Error = Error;
    fn try_from(size: usize) -> Result<Self> {
        Alphabet::new(size)
    }
}

impl From<Alphabet> for usize {
    fn from(a: Alphabet) -> usize {
        a.size()
    }
}

/// `⌈log2 m⌉`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(m: u64) -> u32 {
    if m <= 1 {
        0
    } else {
        64 - (m - 1).leading_zeros()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence {
    letters: Vec<u8>,
    alphabet: Alphabet,
}

impl Sequence {
    pub fn new(letters: Vec<u8>, alphabet: Alphabet) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptySequence);
        }
        if let Some((position, &letter)) =
            letters.iter().enumerate().find(|(_, &l)| !alphabet.contains(l))
        {
            return Err(Error::LetterOutOfRange {
                letter,
                position,
                size: alphabet.size(),
            });
        }
        Ok(Sequence { letters, alphabet })
    }

    /// Parses a string of decimal digits, one letter per character
    /// (`"0110"`). Only usable for alphabets of size ≤ 10.
    pub fn from_digits(s: &str, alphabet: Alphabet) -> Result<Self> {
        let letters = s
            .bytes()
            .map(|b| {
                b.checked_sub(b'0')
                    .filter(|d| *d < 10)
                    .ok_or_else(|| Error::InvalidConfig(format!("not a digit string: {s:?}")))
            })
            .collect::<Result<Vec<u8>>>()?;
        Sequence::new(letters, alphabet)
    }

    pub(crate) fn from_trusted(letters: Vec<u8>, alphabet: Alphabet) -> Self {
        debug_assert!(!letters.is_empty() && letters.iter().all(|&l| alphabet.contains(l)));
        Sequence { letters, alphabet }
    }

    /// The all-zero sequence of length `n`.
    pub fn zeros(n: usize, alphabet: Alphabet) -> Result<Self> {
        Sequence::new(vec![0; n], alphabet)
    }

    #[inline]
    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    #[inline]
    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn type_vector(&self) -> TypeVector {
        let mut counts = vec![0u32; self.alphabet.size()];
        for &l in &self.letters {
            counts[l as usize] += 1;
        }
        TypeVector {
            counts,
            n: self.len(),
        }
    }

    pub fn into_letters(self) -> Vec<u8> {
        self.letters
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.alphabet.size() > 10 { "," } else { "" };
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(sep)?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Type (empirical distribution) of a single sequence, kept as counts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeVector {
    counts: Vec<u32>,
    n: usize,
}

impl TypeVector {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        let n: usize = counts.iter().map(|&c| c as usize).sum();
        if n == 0 || counts.len() > Alphabet::MAX_SIZE {
            return Err(Error::InvalidType { counts, n });
        }
        Ok(TypeVector { counts, n })
    }

    #[inline]
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet(self.counts.len() as u16)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }
}

/// Joint type of a sequence pair: counts indexed by (x-letter, y-letter).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct JointType {
    counts: Vec<u32>,
    ax: Alphabet,
    ay: Alphabet,
    n: usize,
}

impl JointType {
    /// Builds a joint type from a row-major flattened count matrix.
    pub fn new(counts: Vec<u32>, ax: Alphabet, ay: Alphabet) -> Result<Self> {
        let n: usize = counts.iter().map(|&c| c as usize).sum();
        if counts.len() != ax.size() * ay.size() || n == 0 {
            return Err(Error::InvalidType { counts, n });
        }
        Ok(JointType { counts, ax, ay, n })
    }

    pub fn from_rows<R: AsRef<[u32]>>(rows: &[R]) -> Result<Self> {
        let ax = Alphabet::new(rows.len())?;
        let width = rows.first().map_or(0, |r| r.as_ref().len());
        let ay = Alphabet::new(width)?;
        let mut counts = Vec::with_capacity(ax.size() * ay.size());
        for r in rows {
            let r = r.as_ref();
            if r.len() != width {
                return Err(Error::InvalidConfig("ragged joint type matrix".into()));
            }
            counts.extend_from_slice(r);
        }
        JointType::new(counts, ax, ay)
    }

    /// Joint type of a sequence pair.
    pub fn of(x: &Sequence, y: &Sequence) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                actual: y.len(),
            });
        }
        let (ax, ay) = (x.alphabet(), y.alphabet());
        let mut counts = vec![0u32; ax.size() * ay.size()];
        for (&a, &b) in x.letters().iter().zip(y.letters()) {
            counts[a as usize * ay.size() + b as usize] += 1;
        }
        Ok(JointType {
            counts,
            ax,
            ay,
            n: x.len(),
        })
    }

    /// All joint types of length-`n` pairs, in lexicographic order of the
    /// flattened count matrix.
    pub fn enumerate(n: usize, ax: Alphabet, ay: Alphabet) -> Vec<JointType> {
        compositions(n as u32, ax.size() * ay.size())
            .into_iter()
            .map(|counts| JointType { counts, ax, ay, n })
            .collect()
    }

    /// `C(n + k - 1, k - 1)` for `k = |X||Y|` cells.
    pub fn count_for(n: usize, ax: Alphabet, ay: Alphabet) -> BigCount {
        let k = ax.size() * ay.size();
        let mut c = BigUint::from(1u32);
        for i in 1..k {
            c = c * BigUint::from(n + i) / BigUint::from(i);
        }
        c
    }

    #[inline]
    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
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
    pub fn count(&self, a: usize, b: usize) -> u32 {
        self.counts[a * self.ay.size() + b]
    }

    /// Row `a`: how the positions where x = a split across y-letters.
    pub fn row(&self, a: usize) -> &[u32] {
        let w = self.ay.size();
        &self.counts[a * w..(a + 1) * w]
    }

    /// Column `b`: how the positions where y = b split across x-letters.
    pub fn column(&self, b: usize) -> Vec<u32> {
        (0..self.ax.size()).map(|a| self.count(a, b)).collect()
    }

    pub fn x_marginal(&self) -> TypeVector {
        let counts = (0..self.ax.size())
            .map(|a| self.row(a).iter().sum())
            .collect();
        TypeVector { counts, n: self.n }
    }

    pub fn y_marginal(&self) -> TypeVector {
        let counts = (0..self.ay.size())
            .map(|b| self.column(b).iter().sum())
            .collect();
        TypeVector { counts, n: self.n }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// True when every row and every column has a single non-zero cell,
    /// i.e. each sequence determines the other.
    pub fn is_deterministic(&self) -> bool {
        let rows_ok = (0..self.ax.size()).all(|a| self.row(a).iter().filter(|&&c| c > 0).count() <= 1);
        let cols_ok =
            (0..self.ay.size()).all(|b| self.column(b).iter().filter(|&&c| c > 0).count() <= 1);
        rows_ok && cols_ok
    }
}

impl fmt::Display for JointType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for a in 0..self.ax.size() {
            if a > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (j, c) in self.row(a).iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// All vectors of `parts` nonnegative integers summing to `total`, in
/// lexicographic order.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; parts];
    fn rec(idx: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if idx + 1 == cur.len() {
            cur[idx] = left;
            out.push(cur.clone());
            return;
        }
        for v in 0..=left {
            cur[idx] = v;
            rec(idx + 1, left - v, cur, out);
        }
    }
    if parts > 0 {
        rec(0, total, &mut cur, &mut out);
    }
    out
}
