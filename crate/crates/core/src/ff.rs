//! Fixed-length universal code.
//!
//! The encoder sends the index of the pair's joint type within the
//! decodable set `S_n(R)` followed by the symbol in that type's coding
//! table. Pairs of any other type are an encoding error and get the flagged
//! all-zero codeword.
//!
//! Codeword layout, most significant bit first:
//! `[flag: 1][type index: type_width][symbol: symbol_width]`.

use std::collections::HashMap;
use std::sync::Arc;

use bitstream_io::{BitRead, BitWrite};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{in_decodable_set, log2_type_probability, SourceSpec};
use crate::table::TableCache;
use crate::types::{ceil_log2, v_shell_size, w_shell_size, Alphabet, JointType, Sequence};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FfConfig {
    pub n: usize,
    pub rate: f64,
    pub ax: Alphabet,
    pub ay: Alphabet,
}

impl FfConfig {
    pub fn new(n: usize, rate: f64, ax: Alphabet, ay: Alphabet) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("block length must be at least 1".into()));
        }
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidConfig(format!("rate must be positive, got {rate}")));
        }
        Ok(FfConfig { n, rate, ax, ay })
    }

    pub fn binary(n: usize, rate: f64) -> Result<Self> {
        Self::new(n, rate, Alphabet::BINARY, Alphabet::BINARY)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FfCodeword {
    pub type_index: u64,
    pub symbol: u64,
    pub error_flag: bool,
}

impl FfCodeword {
    pub const FLAGGED: FfCodeword = FfCodeword {
        type_index: 0,
        symbol: 0,
        error_flag: true,
    };
}

/// `e_x`, `e_y` and their sum; `correct` is summed separately over the
/// decodable types rather than taken as `1 - e_sum`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorProbability {
    pub e_x: f64,
    pub e_y: f64,
    pub e_sum: f64,
    pub correct: f64,
}

pub(crate) fn write_field<W: BitWrite + ?Sized>(w: &mut W, width: u32, value: u64) -> Result<()> {
    if width > 0 {
        w.write_unsigned_var(width, value)?;
    }
    Ok(())
}

pub(crate) fn read_field<R: BitRead + ?Sized>(r: &mut R, width: u32) -> Result<u64> {
    if width == 0 {
        return Ok(0);
    }
    r.read_unsigned_var(width).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Truncated,
        _ => Error::Io(e),
    })
}

/// `⌈log2 m⌉` for an exact count.
pub(crate) fn ceil_log2_big(m: &BigUint) -> u32 {
    if *m <= BigUint::from(1u32) {
        0
    } else {
        (m - 1u32).bits() as u32
    }
}

/// Symbols a type's table needs: `max(|T_V|, |T_W|)`.
pub fn symbols_needed(jt: &JointType) -> BigUint {
    v_shell_size(jt).max(w_shell_size(jt))
}

pub struct FfCode {
    cfg: FfConfig,
    types: Vec<JointType>,
    index: HashMap<JointType, u64>,
    type_width: u32,
    symbol_width: u32,
    tables: Arc<TableCache>,
}

impl FfCode {
    pub fn new(cfg: FfConfig) -> Result<Self> {
        Self::with_cache(cfg, Arc::new(TableCache::default()))
    }

    /// Shares `tables` with other codes; tables do not depend on the rate.
    pub fn with_cache(cfg: FfConfig, tables: Arc<TableCache>) -> Result<Self> {
        let cfg = FfConfig::new(cfg.n, cfg.rate, cfg.ax, cfg.ay)?;
        let types: Vec<JointType> = JointType::enumerate(cfg.n, cfg.ax, cfg.ay)
            .into_iter()
            .filter(|jt| in_decodable_set(jt, cfg.rate))
            .collect();
        let index = types
            .iter()
            .enumerate()
            .map(|(i, jt)| (jt.clone(), i as u64))
            .collect();
        let max_symbols = types.iter().map(symbols_needed).max().unwrap_or_default();
        let symbol_width = ceil_log2_big(&max_symbols);
        if symbol_width > 64 {
            return Err(Error::InvalidConfig(format!(
                "symbol field of {symbol_width} bits exceeds 64"
            )));
        }
        Ok(FfCode {
            type_width: ceil_log2(types.len() as u64),
            symbol_width,
            cfg,
            types,
            index,
            tables,
        })
    }

    pub fn config(&self) -> &FfConfig {
        &self.cfg
    }

    /// `S_n(R)` in enumeration order; position = type index.
    pub fn decodable_types(&self) -> &[JointType] {
        &self.types
    }

    pub fn type_width(&self) -> u32 {
        self.type_width
    }

    pub fn symbol_width(&self) -> u32 {
        self.symbol_width
    }

    /// Total codeword length in bits, including the flag.
    pub fn codeword_bits(&self) -> u32 {
        1 + self.type_width + self.symbol_width
    }

    pub fn tables(&self) -> &Arc<TableCache> {
        &self.tables
    }

    fn check_pair(&self, x: &Sequence, y: &Sequence) -> Result<()> {
        for s in [x, y] {
            if s.len() != self.cfg.n {
                return Err(Error::LengthMismatch {
                    expected: self.cfg.n,
                    actual: s.len(),
                });
            }
        }
        check_alphabet(self.cfg.ax, x.alphabet())?;
        check_alphabet(self.cfg.ay, y.alphabet())
    }

    pub fn encode(&self, x: &Sequence, y: &Sequence) -> Result<FfCodeword> {
        self.check_pair(x, y)?;
        let jt = JointType::of(x, y)?;
        let Some(&type_index) = self.index.get(&jt) else {
            return Ok(FfCodeword::FLAGGED);
        };
        let symbol = self.tables.get(&jt)?.lookup_symbol(x, y)?;
        Ok(FfCodeword {
            type_index,
            symbol: symbol as u64,
            error_flag: false,
        })
    }

    fn table_for(&self, cw: &FfCodeword) -> Result<Arc<crate::table::CodingTable>> {
        let jt = self
            .types
            .get(cw.type_index as usize)
            .ok_or(Error::TypeIndexOutOfRange {
                index: cw.type_index,
                count: self.types.len(),
            })?;
        self.tables.get(jt)
    }

    fn symbol(cw: &FfCodeword, jt: &JointType) -> Result<u32> {
        u32::try_from(cw.symbol).map_err(|_| Error::SymbolNotFound {
            jt: jt.clone(),
            side: "table",
            index: 0,
            symbol: cw.symbol,
        })
    }

    /// Reproduces x from the codeword and y. A flagged codeword decodes to
    /// the all-zero sequence.
    pub fn decode_x(&self, cw: &FfCodeword, y: &Sequence) -> Result<Sequence> {
        check_side(self.cfg.n, self.cfg.ay, y)?;
        if cw.error_flag {
            return Sequence::zeros(self.cfg.n, self.cfg.ax);
        }
        let t = self.table_for(cw)?;
        t.decode_x(y, Self::symbol(cw, t.joint_type())?)
    }

    /// Reproduces y from the codeword and x.
    pub fn decode_y(&self, cw: &FfCodeword, x: &Sequence) -> Result<Sequence> {
        check_side(self.cfg.n, self.cfg.ax, x)?;
        if cw.error_flag {
            return Sequence::zeros(self.cfg.n, self.cfg.ay);
        }
        let t = self.table_for(cw)?;
        t.decode_y(x, Self::symbol(cw, t.joint_type())?)
    }

    pub fn write_codeword<W: BitWrite + ?Sized>(&self, w: &mut W, cw: &FfCodeword) -> Result<()> {
        if cw.error_flag && (cw.type_index != 0 || cw.symbol != 0) {
            return Err(Error::MalformedCodeword("flagged codeword with non-zero fields".into()));
        }
        w.write_bit(cw.error_flag)?;
        write_field(w, self.type_width, cw.type_index)
            .map_err(|_| Error::TypeIndexOutOfRange {
                index: cw.type_index,
                count: self.types.len(),
            })?;
        write_field(w, self.symbol_width, cw.symbol)
            .map_err(|_| Error::MalformedCodeword(format!("symbol {} too wide", cw.symbol)))
    }

    pub fn read_codeword<R: BitRead + ?Sized>(&self, r: &mut R) -> Result<FfCodeword> {
        let error_flag = r.read_bit().map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => Error::Truncated,
            _ => Error::Io(e),
        })?;
        let type_index = read_field(r, self.type_width)?;
        let symbol = read_field(r, self.symbol_width)?;
        if error_flag && (type_index != 0 || symbol != 0) {
            return Err(Error::MalformedCodeword("flagged codeword with non-zero fields".into()));
        }
        if !error_flag && type_index as usize >= self.types.len() {
            return Err(Error::TypeIndexOutOfRange {
                index: type_index,
                count: self.types.len(),
            });
        }
        Ok(FfCodeword {
            type_index,
            symbol,
            error_flag,
        })
    }

    /// `M_n`: the symbols used by every table of `S_n(R)`, counted from the
    /// built tables, plus one error codeword.
    pub fn codebook_size(&self) -> Result<BigUint> {
        let mut m = BigUint::from(1u32);
        for jt in &self.types {
            m += self.tables.get(jt)?.num_symbols();
        }
        Ok(m)
    }

    /// `(1/n) log2 M_n ≤ R + (|X×Y|/n) log2(n+1)`.
    pub fn rate_bound_check(&self) -> Result<bool> {
        let m = self.codebook_size()?;
        Ok(log2_big(&m) <= self.rate_bound_limit() * self.cfg.n as f64 + 1e-9)
    }

    /// Right-hand side of [`Self::rate_bound_check`], per symbol.
    pub fn rate_bound_limit(&self) -> f64 {
        let n = self.cfg.n as f64;
        let k = (self.cfg.ax.size() * self.cfg.ay.size()) as f64;
        self.cfg.rate + k / n * (n + 1.0).log2()
    }

    /// Exact `e_x = e_y = P(joint type ∉ S_n(R))`.
    pub fn exact_error_probability(&self, p: &SourceSpec) -> Result<ErrorProbability> {
        check_alphabet(self.cfg.ax, p.ax())?;
        check_alphabet(self.cfg.ay, p.ay())?;
        let (mut outside, mut inside) = (0.0, 0.0);
        for jt in JointType::enumerate(self.cfg.n, self.cfg.ax, self.cfg.ay) {
            let pr = log2_type_probability(&jt, p).exp2();
            if self.index.contains_key(&jt) {
                inside += pr;
            } else {
                outside += pr;
            }
        }
        Ok(ErrorProbability {
            e_x: outside,
            e_y: outside,
            e_sum: 2.0 * outside,
            correct: inside,
        })
    }
}

pub(crate) fn check_alphabet(expected: Alphabet, actual: Alphabet) -> Result<()> {
    if expected != actual {
        return Err(Error::AlphabetMismatch {
            expected: expected.size(),
            actual: actual.size(),
        });
    }
    Ok(())
}

pub(crate) fn check_side(n: usize, a: Alphabet, s: &Sequence) -> Result<()> {
    if s.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: s.len(),
        });
    }
    check_alphabet(a, s.alphabet())
}

/// `log2 m` for a possibly huge count.
pub fn log2_big(m: &BigUint) -> f64 {
    let bits = m.bits();
    if bits <= 1000 {
        m.to_f64().expect("finite below 2^1000").log2()
    } else {
        let shift = bits - 64;
        (m >> shift).to_f64().expect("64-bit").log2() + shift as f64
    }
}
