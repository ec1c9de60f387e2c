//! Exact class sizes and lexicographic ranking within type classes and
//! V-shells.
//!
//! Ranking walks the sequence once, keeping the multinomial of the
//! remaining letter counts: choosing letter `b` at a position with `m`
//! letters left leaves `M * c_b / m` completions, which is always an exact
//! integer. The same routine runs on `u128` when it fits and falls back to
//! big integers otherwise.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use super::{Alphabet, BigCount, JointType, Sequence, TypeVector};
use crate::error::{Error, Result};

pub(crate) trait RankArith: Sized + Clone + PartialOrd {
    fn from_u32(v: u32) -> Self;
    /// `self * m / d`, exact by construction at every call site.
    fn mul_div(&self, m: u32, d: u32) -> Option<Self>;
    fn checked_add(&self, other: &Self) -> Option<Self>;
    fn sub(&self, other: &Self) -> Self;
}

impl RankArith for u128 {
    fn from_u32(v: u32) -> Self {
        v as u128
    }
    #[inline]
    fn mul_div(&self, m: u32, d: u32) -> Option<Self> {
        self.checked_mul(m as u128).map(|v| v / d as u128)
    }
    #[inline]
    fn checked_add(&self, other: &Self) -> Option<Self> {
        u128::checked_add(*self, *other)
    }
    #[inline]
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl RankArith for BigUint {
    fn from_u32(v: u32) -> Self {
        BigUint::from(v)
    }
    fn mul_div(&self, m: u32, d: u32) -> Option<Self> {
        Some(self * m / d)
    }
    fn checked_add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

fn multinomial_generic<T: RankArith>(counts: &[u32]) -> Option<T> {
    let mut acc = T::from_u32(1);
    let mut m = 0u32;
    for &c in counts {
        for k in 1..=c {
            m += 1;
            acc = acc.mul_div(m, k)?;
        }
    }
    Some(acc)
}

fn rank_generic<T: RankArith>(letters: &[u8], counts: &[u32]) -> Option<T> {
    let mut remaining = counts.to_vec();
    let mut left = letters.len() as u32;
    let mut completions: T = multinomial_generic(&remaining)?;
    let mut rank = T::from_u32(0);
    for &l in letters {
        let l = l as usize;
        for &c in remaining.iter().take(l) {
            if c > 0 {
                rank = rank.checked_add(&completions.mul_div(c, left)?)?;
            }
        }
        completions = completions.mul_div(remaining[l], left)?;
        remaining[l] -= 1;
        left -= 1;
    }
    Some(rank)
}

/// Caller guarantees `rank < multinomial(counts)`.
fn unrank_generic<T: RankArith>(counts: &[u32], mut rank: T) -> Option<Vec<u8>> {
    let mut remaining = counts.to_vec();
    let mut left: u32 = counts.iter().sum();
    let mut completions: T = multinomial_generic(&remaining)?;
    let mut out = Vec::with_capacity(left as usize);
    while left > 0 {
        let mut chosen = None;
        for (b, &c) in remaining.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let block = completions.mul_div(c, left)?;
            if rank < block {
                completions = block;
                chosen = Some(b);
                break;
            }
            rank = rank.sub(&block);
        }
        let b = chosen?;
        remaining[b] -= 1;
        left -= 1;
        out.push(b as u8);
    }
    Some(out)
}

/// Fast rank within the type class given by `counts`, `None` when the
/// class is too large for `u128` arithmetic.
pub(crate) fn rank_small(letters: &[u8], counts: &[u32]) -> Option<u128> {
    rank_generic::<u128>(letters, counts)
}

pub(crate) fn unrank_small(counts: &[u32], rank: u128) -> Option<Vec<u8>> {
    unrank_generic::<u128>(counts, rank)
}

/// `(Σc)! / Π c!`.
pub fn multinomial(counts: &[u32]) -> BigCount {
    multinomial_generic::<BigUint>(counts).expect("big arithmetic cannot overflow")
}

/// `|T_Q|`, the number of sequences of type `q`.
pub fn type_class_size(q: &TypeVector) -> BigCount {
    multinomial(q.counts())
}

/// `|T_V(x)|` for any `x` of the row-marginal type: product of the
/// per-row multinomials.
pub fn v_shell_size(jt: &JointType) -> BigCount {
    (0..jt.ax().size()).map(|a| multinomial(jt.row(a))).product()
}

/// `|T_W(y)|` for any `y` of the column-marginal type.
pub fn w_shell_size(jt: &JointType) -> BigCount {
    (0..jt.ay().size())
        .map(|b| multinomial(&jt.column(b)))
        .product()
}

/// Lexicographic rank of `x` among all sequences of its type.
pub fn rank_in_type_class(x: &Sequence) -> BigCount {
    let q = x.type_vector();
    match rank_small(x.letters(), q.counts()) {
        Some(r) => BigUint::from(r),
        None => rank_generic::<BigUint>(x.letters(), q.counts()).expect("big arithmetic"),
    }
}

pub fn unrank_in_type_class(q: &TypeVector, rank: &BigCount) -> Result<Sequence> {
    let size = type_class_size(q);
    if *rank >= size {
        return Err(Error::RankOutOfRange {
            rank: rank.to_string(),
            size: size.to_string(),
        });
    }
    let letters = match rank.to_u128().and_then(|r| unrank_small(q.counts(), r)) {
        Some(l) => l,
        None => unrank_generic::<BigUint>(q.counts(), rank.clone()).expect("big arithmetic"),
    };
    Ok(Sequence::from_trusted(letters, q.alphabet()))
}

fn check_pair(x: &Sequence, y: &Sequence) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    Ok(())
}

/// Splits `target` by the letter `guide` takes at each position.
fn split_by(guide: &[u8], target: &[u8], groups: usize) -> Vec<Vec<u8>> {
    let mut parts = vec![Vec::new(); groups];
    for (&g, &t) in guide.iter().zip(target) {
        parts[g as usize].push(t);
    }
    parts
}

fn mixed_radix_rank(parts: &[Vec<u8>], class_counts: impl Fn(usize) -> Vec<u32>) -> BigCount {
    let mut rank = BigUint::zero();
    for (a, part) in parts.iter().enumerate() {
        let counts = class_counts(a);
        let size = multinomial(&counts);
        let sub = if part.is_empty() {
            BigUint::zero()
        } else {
            rank_generic::<BigUint>(part, &counts).expect("big arithmetic")
        };
        rank = rank * size + sub;
    }
    rank
}

fn mixed_radix_unrank(
    guide: &[u8],
    groups: usize,
    class_counts: impl Fn(usize) -> Vec<u32>,
    mut rank: BigCount,
    shell_size: BigCount,
    out_alphabet: Alphabet,
) -> Result<Sequence> {
    if rank >= shell_size {
        return Err(Error::RankOutOfRange {
            rank: rank.to_string(),
            size: shell_size.to_string(),
        });
    }
    let mut subranks = vec![BigUint::zero(); groups];
    for a in (0..groups).rev() {
        let size = multinomial(&class_counts(a));
        subranks[a] = &rank % &size;
        rank /= size;
    }
    let mut parts: Vec<std::vec::IntoIter<u8>> = Vec::with_capacity(groups);
    for (a, sub) in subranks.into_iter().enumerate() {
        let part = unrank_generic::<BigUint>(&class_counts(a), sub).expect("in range");
        parts.push(part.into_iter());
    }
    let letters = guide
        .iter()
        .map(|&g| parts[g as usize].next().expect("part sized by counts"))
        .collect();
    Ok(Sequence::from_trusted(letters, out_alphabet))
}

/// Rank of `y` within the V-shell `T_V(x)` determined by the joint type of
/// `(x, y)`. Mixed radix over x-letters, letter 0 most significant; each
/// digit is the lexicographic rank of `y` restricted to the positions where
/// `x` takes that letter.
pub fn rank_in_v_shell(y: &Sequence, x: &Sequence) -> Result<BigCount> {
    check_pair(x, y)?;
    let jt = JointType::of(x, y)?;
    let parts = split_by(x.letters(), y.letters(), jt.ax().size());
    Ok(mixed_radix_rank(&parts, |a| jt.row(a).to_vec()))
}

pub fn unrank_in_v_shell(x: &Sequence, jt: &JointType, rank: &BigCount) -> Result<Sequence> {
    if x.alphabet() != jt.ax() || x.len() != jt.n() || x.type_vector() != jt.x_marginal() {
        return Err(Error::WrongMarginalType(jt.clone()));
    }
    mixed_radix_unrank(
        x.letters(),
        jt.ax().size(),
        |a| jt.row(a).to_vec(),
        rank.clone(),
        v_shell_size(jt),
        jt.ay(),
    )
}

/// Rank of `x` within the W-shell `T_W(y)`; mirror image of
/// [`rank_in_v_shell`] with the roles of the sequences swapped.
pub fn rank_in_w_shell(x: &Sequence, y: &Sequence) -> Result<BigCount> {
    check_pair(x, y)?;
    let jt = JointType::of(x, y)?;
    let parts = split_by(y.letters(), x.letters(), jt.ay().size());
    Ok(mixed_radix_rank(&parts, |b| jt.column(b)))
}

pub fn unrank_in_w_shell(y: &Sequence, jt: &JointType, rank: &BigCount) -> Result<Sequence> {
    if y.alphabet() != jt.ay() || y.len() != jt.n() || y.type_vector() != jt.y_marginal() {
        return Err(Error::WrongMarginalType(jt.clone()));
    }
    mixed_radix_unrank(
        y.letters(),
        jt.ay().size(),
        |b| jt.column(b),
        rank.clone(),
        w_shell_size(jt),
        jt.ax(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: Alphabet = Alphabet::BINARY;

    fn seq(s: &str) -> Sequence {
        Sequence::from_digits(s, B).unwrap()
    }

    fn tv(c: &[u32]) -> TypeVector {
        TypeVector::new(c.to_vec()).unwrap()
    }

    fn all_sequences(n: usize, alphabet: Alphabet) -> Vec<Sequence> {
        let k = alphabet.size();
        (0..k.pow(n as u32))
            .map(|mut idx| {
                let mut letters = vec![0u8; n];
                for slot in letters.iter_mut().rev() {
                    *slot = (idx % k) as u8;
                    idx /= k;
                }
                Sequence::new(letters, alphabet).unwrap()
            })
            .collect()
    }

    #[test]
    fn type_class_sizes() {
        assert_eq!(type_class_size(&tv(&[2, 0])), BigUint::from(1u32));
        assert_eq!(type_class_size(&tv(&[1, 1])), BigUint::from(2u32));
        assert_eq!(type_class_size(&tv(&[2, 2])), BigUint::from(6u32));
        assert_eq!(multinomial(&[3, 2, 1]), BigUint::from(60u32));
    }

    #[test]
    fn partition_property() {
        for n in 1..=8 {
            let total: BigUint = (0..=n as u32)
                .map(|k| type_class_size(&tv(&[k, n as u32 - k])))
                .sum();
            assert_eq!(total, BigUint::from(1u64 << n));
        }
        let ternary: BigUint = (0..=5u32)
            .flat_map(|a| (0..=5 - a).map(move |b| [a, b, 5 - a - b]))
            .map(|c| type_class_size(&tv(&c)))
            .sum();
        assert_eq!(ternary, BigUint::from(243u32));
    }

    #[test]
    fn v_shell_examples() {
        let jt = JointType::from_rows(&[[2, 0], [0, 2]]).unwrap();
        assert_eq!(v_shell_size(&jt), BigUint::from(1u32));
        let jt = JointType::from_rows(&[[1, 1], [2, 0]]).unwrap();
        assert_eq!(v_shell_size(&jt), BigUint::from(2u32));
        assert_eq!(w_shell_size(&jt), BigUint::from(3u32));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_in_type_class(&seq("01")), BigUint::from(0u32));
        assert_eq!(rank_in_type_class(&seq("10")), BigUint::from(1u32));
        let s = unrank_in_type_class(&tv(&[2, 1]), &BigUint::from(2u32)).unwrap();
        assert_eq!(s, seq("100"));
        assert!(matches!(
            unrank_in_type_class(&tv(&[2, 1]), &BigUint::from(3u32)),
            Err(Error::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn rank_is_lexicographic_bijection() {
        for n in 1..=8 {
            let seqs = all_sequences(n, B);
            for k in 0..=n as u32 {
                let q = tv(&[n as u32 - k, k]);
                let mut class: Vec<&Sequence> =
                    seqs.iter().filter(|s| s.type_vector() == q).collect();
                class.sort();
                for (i, s) in class.iter().enumerate() {
                    assert_eq!(rank_in_type_class(s), BigUint::from(i));
                    assert_eq!(&unrank_in_type_class(&q, &BigUint::from(i)).unwrap(), *s);
                }
            }
        }
    }

    #[test]
    fn big_fallback_agrees_with_small() {
        let letters: Vec<u8> = (0..200).map(|i| ((i * 7 + i / 3) % 4) as u8).collect();
        let x = Sequence::new(letters, Alphabet::new(4).unwrap()).unwrap();
        let q = x.type_vector();
        assert!(rank_small(x.letters(), q.counts()).is_none());
        let r = rank_in_type_class(&x);
        assert!(r < type_class_size(&q));
        assert_eq!(unrank_in_type_class(&q, &r).unwrap(), x);
    }

    #[test]
    fn v_shell_singleton_and_pair() {
        let x = seq("0011");
        let jt = JointType::from_rows(&[[2, 0], [0, 2]]).unwrap();
        assert_eq!(rank_in_v_shell(&seq("0011"), &x).unwrap(), BigUint::zero());
        assert_eq!(unrank_in_v_shell(&x, &jt, &BigUint::zero()).unwrap(), seq("0011"));

        let jt = JointType::from_rows(&[[1, 1], [2, 0]]).unwrap();
        assert_eq!(rank_in_v_shell(&seq("0100"), &x).unwrap(), BigUint::from(0u32));
        assert_eq!(rank_in_v_shell(&seq("1000"), &x).unwrap(), BigUint::from(1u32));
        assert_eq!(unrank_in_v_shell(&x, &jt, &BigUint::from(1u32)).unwrap(), seq("1000"));
        assert!(unrank_in_v_shell(&x, &jt, &BigUint::from(2u32)).is_err());
        assert!(matches!(
            unrank_in_v_shell(&seq("0111"), &jt, &BigUint::zero()),
            Err(Error::WrongMarginalType(_))
        ));
    }

    #[test]
    fn shell_round_trips_exhaustive() {
        for n in 1..=6 {
            let seqs = all_sequences(n, B);
            for x in &seqs {
                for y in &seqs {
                    let jt = JointType::of(x, y).unwrap();
                    let rv = rank_in_v_shell(y, x).unwrap();
                    assert!(rv < v_shell_size(&jt));
                    assert_eq!(&unrank_in_v_shell(x, &jt, &rv).unwrap(), y);
                    let rw = rank_in_w_shell(x, y).unwrap();
                    assert!(rw < w_shell_size(&jt));
                    assert_eq!(&unrank_in_w_shell(y, &jt, &rw).unwrap(), x);
                }
            }
        }
    }

    #[test]
    fn shell_ranks_are_dense() {
        // Every rank below the shell size is hit exactly once.
        let b = B;
        for n in 2..=6 {
            let seqs = all_sequences(n, b);
            for jt in JointType::enumerate(n, b, b) {
                let x = unrank_in_type_class(&jt.x_marginal(), &BigUint::zero()).unwrap();
                let mut ranks: Vec<BigUint> = seqs
                    .iter()
                    .filter(|y| JointType::of(&x, y).unwrap() == jt)
                    .map(|y| rank_in_v_shell(y, &x).unwrap())
                    .collect();
                ranks.sort();
                let expected: Vec<BigUint> =
                    (0..ranks.len()).map(BigUint::from).collect();
                assert_eq!(ranks, expected);
                assert_eq!(BigUint::from(ranks.len()), v_shell_size(&jt));
            }
        }
    }
}
