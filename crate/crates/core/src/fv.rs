//! Variable-length universal code and the fixed-length wrapping
//! construction.
//!
//! Every joint type has a table. A codeword is the type index over all of
//! `P_n`, `⌈log2 |P_n|⌉` bits, followed by the table symbol in
//! `⌈log2 max(|T_V|, |T_W|)⌉` bits. The header width is fixed and the
//! symbol width is a function of the type, so codewords parse uniquely in a
//! stream.
//!
//! The wrapped code sends `[0][ff type index][ff symbol]` for pairs the
//! fixed-length code handles and `[1][x verbatim][y verbatim]` otherwise.

use std::collections::HashMap;
use std::sync::Arc;

use bitstream_io::{BigEndian, BitRead, BitReader, BitWrite, BitWriter};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::{
    ceil_log2_big, check_alphabet, check_side, read_field, symbols_needed, write_field, FfCode,
    FfCodeword, FfConfig,
};
use crate::info::{epsilon_n, log2_type_probability, SourceSpec};
use crate::table::TableCache;
use crate::types::{ceil_log2, Alphabet, JointType, Sequence};

/// A codeword as a bit string, most significant bit first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FvCodeword {
    bytes: Vec<u8>,
    len: usize,
}

impl FvCodeword {
    fn from_writer(f: impl FnOnce(&mut BitWriter<Vec<u8>, BigEndian>) -> Result<()>, len: usize) -> Result<Self> {
        let mut w = BitWriter::endian(Vec::new(), BigEndian);
        f(&mut w)?;
        w.byte_align()?;
        Ok(FvCodeword {
            bytes: w.into_writer(),
            len,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.bytes[i / 8] >> (7 - i % 8) & 1 == 1
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.bit(i))
    }

    /// Packed bits, zero-padded to a whole byte.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn is_prefix_of(&self, other: &FvCodeword) -> bool {
        self.len <= other.len && (0..self.len).all(|i| self.bit(i) == other.bit(i))
    }

    pub fn write_to<W: BitWrite + ?Sized>(&self, w: &mut W) -> Result<()> {
        for b in self.bits() {
            w.write_bit(b)?;
        }
        Ok(())
    }

    fn reader(&self) -> BitReader<&[u8], BigEndian> {
        BitReader::endian(&self.bytes[..], BigEndian)
    }
}

impl std::fmt::Display for FvCodeword {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Exact length statistics of the variable-length code.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LengthStats {
    pub n: usize,
    pub rate: f64,
    /// Expected codeword length in bits.
    pub expected_length: f64,
    pub overflow_threshold: f64,
    pub underflow_threshold: f64,
    /// `P(l > overflow_threshold)`.
    pub overflow: f64,
    /// `P(l < underflow_threshold)`.
    pub underflow: f64,
}

pub struct FvCode {
    n: usize,
    ax: Alphabet,
    ay: Alphabet,
    types: Vec<JointType>,
    index: HashMap<JointType, u64>,
    symbol_widths: Vec<u32>,
    type_width: u32,
    tables: Arc<TableCache>,
}

impl FvCode {
    pub fn new(n: usize, ax: Alphabet, ay: Alphabet) -> Result<Self> {
        Self::with_cache(n, ax, ay, Arc::new(TableCache::default()))
    }

    pub fn with_cache(n: usize, ax: Alphabet, ay: Alphabet, tables: Arc<TableCache>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("block length must be at least 1".into()));
        }
        let types = JointType::enumerate(n, ax, ay);
        let index = types
            .iter()
            .enumerate()
            .map(|(i, jt)| (jt.clone(), i as u64))
            .collect();
        let symbol_widths: Vec<u32> = types.iter().map(|jt| ceil_log2_big(&symbols_needed(jt))).collect();
        if symbol_widths.iter().any(|&w| w > 64) {
            return Err(Error::InvalidConfig("symbol field exceeds 64 bits".into()));
        }
        Ok(FvCode {
            n,
            ax,
            ay,
            type_width: ceil_log2(types.len() as u64),
            types,
            index,
            symbol_widths,
            tables,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabets(&self) -> (Alphabet, Alphabet) {
        (self.ax, self.ay)
    }

    pub fn types(&self) -> &[JointType] {
        &self.types
    }

    pub fn type_width(&self) -> u32 {
        self.type_width
    }

    pub fn symbol_width(&self, jt: &JointType) -> Option<u32> {
        self.index.get(jt).map(|&i| self.symbol_widths[i as usize])
    }

    /// Codeword length of every pair of type `jt`.
    pub fn length_of(&self, jt: &JointType) -> Option<u32> {
        self.symbol_width(jt).map(|w| self.type_width + w)
    }

    pub fn tables(&self) -> &Arc<TableCache> {
        &self.tables
    }

    pub fn encode(&self, x: &Sequence, y: &Sequence) -> Result<FvCodeword> {
        check_side(self.n, self.ax, x)?;
        check_side(self.n, self.ay, y)?;
        let jt = JointType::of(x, y)?;
        let ti = self.index[&jt];
        let sw = self.symbol_widths[ti as usize];
        let symbol = self.tables.get(&jt)?.lookup_symbol(x, y)? as u64;
        let tw = self.type_width;
        FvCodeword::from_writer(
            |w| {
                write_field(w, tw, ti)?;
                write_field(w, sw, symbol)
            },
            (tw + sw) as usize,
        )
    }

    /// Parses one codeword from a stream: (type, symbol).
    pub fn read_parts<R: BitRead + ?Sized>(&self, r: &mut R) -> Result<(&JointType, u64)> {
        let ti = read_field(r, self.type_width)?;
        let jt = self.types.get(ti as usize).ok_or(Error::TypeIndexOutOfRange {
            index: ti,
            count: self.types.len(),
        })?;
        let symbol = read_field(r, self.symbol_widths[ti as usize])?;
        Ok((jt, symbol))
    }

    fn parse(&self, cw: &FvCodeword) -> Result<(&JointType, u32)> {
        let mut r = cw.reader();
        let (jt, symbol) = self.read_parts(&mut r)?;
        if self.length_of(jt) != Some(cw.len as u32) {
            return Err(Error::MalformedCodeword(format!(
                "{} bits for a type whose codewords have {}",
                cw.len,
                self.length_of(jt).unwrap_or(0)
            )));
        }
        let symbol = u32::try_from(symbol).map_err(|_| Error::MalformedCodeword("symbol too wide".into()))?;
        Ok((jt, symbol))
    }

    pub fn decode_x(&self, cw: &FvCodeword, y: &Sequence) -> Result<Sequence> {
        check_side(self.n, self.ay, y)?;
        let (jt, s) = self.parse(cw)?;
        self.tables.get(jt)?.decode_x(y, s)
    }

    pub fn decode_y(&self, cw: &FvCodeword, x: &Sequence) -> Result<Sequence> {
        check_side(self.n, self.ax, x)?;
        let (jt, s) = self.parse(cw)?;
        self.tables.get(jt)?.decode_y(x, s)
    }

    /// Reads one codeword from a stream and reproduces x.
    pub fn decode_x_from<R: BitRead + ?Sized>(&self, r: &mut R, y: &Sequence) -> Result<Sequence> {
        check_side(self.n, self.ay, y)?;
        let (jt, s) = self.read_parts(r)?;
        let s = u32::try_from(s).map_err(|_| Error::MalformedCodeword("symbol too wide".into()))?;
        self.tables.get(jt)?.decode_x(y, s)
    }

    pub fn decode_y_from<R: BitRead + ?Sized>(&self, r: &mut R, x: &Sequence) -> Result<Sequence> {
        check_side(self.n, self.ax, x)?;
        let (jt, s) = self.read_parts(r)?;
        let s = u32::try_from(s).map_err(|_| Error::MalformedCodeword("symbol too wide".into()))?;
        self.tables.get(jt)?.decode_y(x, s)
    }

    /// Exact `E[l]` in bits.
    pub fn expected_length(&self, p: &SourceSpec) -> Result<f64> {
        self.check_source(p)?;
        Ok(self
            .types
            .iter()
            .zip(&self.symbol_widths)
            .map(|(jt, &sw)| log2_type_probability(jt, p).exp2() * (self.type_width + sw) as f64)
            .sum())
    }

    /// Overflow past `n(R + ε_n)` and underflow below `nR`.
    pub fn length_stats(&self, rate: f64, p: &SourceSpec) -> Result<LengthStats> {
        let nf = self.n as f64;
        let over = nf * (rate + epsilon_n(self.n, self.ax, self.ay));
        self.length_stats_with(rate, over, nf * rate, p)
    }

    /// As [`Self::length_stats`] with explicit thresholds in bits.
    pub fn length_stats_with(
        &self,
        rate: f64,
        overflow_threshold: f64,
        underflow_threshold: f64,
        p: &SourceSpec,
    ) -> Result<LengthStats> {
        self.check_source(p)?;
        let (mut expected, mut overflow, mut underflow) = (0.0, 0.0, 0.0);
        for (jt, &sw) in self.types.iter().zip(&self.symbol_widths) {
            let pr = log2_type_probability(jt, p).exp2();
            let l = (self.type_width + sw) as f64;
            expected += pr * l;
            if l > overflow_threshold {
                overflow += pr;
            }
            if l < underflow_threshold {
                underflow += pr;
            }
        }
        Ok(LengthStats {
            n: self.n,
            rate,
            expected_length: expected,
            overflow_threshold,
            underflow_threshold,
            overflow,
            underflow,
        })
    }

    pub fn overflow_probability(&self, rate: f64, p: &SourceSpec) -> Result<f64> {
        self.length_stats(rate, p).map(|s| s.overflow)
    }

    pub fn underflow_probability(&self, rate: f64, p: &SourceSpec) -> Result<f64> {
        self.length_stats(rate, p).map(|s| s.underflow)
    }

    fn check_source(&self, p: &SourceSpec) -> Result<()> {
        check_alphabet(self.ax, p.ax())?;
        check_alphabet(self.ay, p.ay())
    }
}

/// The fixed-length code made lossless by sending undecodable pairs
/// verbatim behind a flag bit.
pub struct WrappedFf {
    ff: FfCode,
}

impl WrappedFf {
    pub fn new(cfg: FfConfig) -> Result<Self> {
        Ok(WrappedFf { ff: FfCode::new(cfg)? })
    }

    pub fn with_cache(cfg: FfConfig, tables: Arc<TableCache>) -> Result<Self> {
        Ok(WrappedFf {
            ff: FfCode::with_cache(cfg, tables)?,
        })
    }

    pub fn inner(&self) -> &FfCode {
        &self.ff
    }

    /// `1 + type index + symbol` bits.
    pub fn inside_length(&self) -> u32 {
        1 + self.ff.type_width() + self.ff.symbol_width()
    }

    /// `1 + n (⌈log2|X|⌉ + ⌈log2|Y|⌉)` bits.
    pub fn outside_length(&self) -> u32 {
        1 + self.raw_width()
    }

    fn raw_width(&self) -> u32 {
        let c = self.ff.config();
        c.n as u32 * (c.ax.letter_bits() + c.ay.letter_bits())
    }

    pub fn encode(&self, x: &Sequence, y: &Sequence) -> Result<FvCodeword> {
        let cw = self.ff.encode(x, y)?;
        let (tw, sw) = (self.ff.type_width(), self.ff.symbol_width());
        if !cw.error_flag {
            return FvCodeword::from_writer(
                |w| {
                    w.write_bit(false)?;
                    write_field(w, tw, cw.type_index)?;
                    write_field(w, sw, cw.symbol)
                },
                self.inside_length() as usize,
            );
        }
        let c = *self.ff.config();
        FvCodeword::from_writer(
            |w| {
                w.write_bit(true)?;
                for &l in x.letters() {
                    write_field(w, c.ax.letter_bits(), l as u64)?;
                }
                for &l in y.letters() {
                    write_field(w, c.ay.letter_bits(), l as u64)?;
                }
                Ok(())
            },
            self.outside_length() as usize,
        )
    }

    fn read_raw<R: BitRead + ?Sized>(&self, r: &mut R, a: Alphabet) -> Result<Sequence> {
        let n = self.ff.config().n;
        let letters = (0..n)
            .map(|_| read_field(r, a.letter_bits()).map(|v| v as u8))
            .collect::<Result<Vec<u8>>>()?;
        Sequence::new(letters, a).map_err(|e| Error::MalformedCodeword(e.to_string()))
    }

    fn decode<R: BitRead + ?Sized>(&self, r: &mut R, side: &Sequence, want_x: bool) -> Result<Sequence> {
        let c = *self.ff.config();
        let flag = r.read_bit().map_err(|_| Error::Truncated)?;
        if flag {
            let x = self.read_raw(r, c.ax)?;
            let y = self.read_raw(r, c.ay)?;
            return Ok(if want_x { x } else { y });
        }
        let type_index = read_field(r, self.ff.type_width())?;
        let symbol = read_field(r, self.ff.symbol_width())?;
        let cw = FfCodeword {
            type_index,
            symbol,
            error_flag: false,
        };
        if want_x {
            self.ff.decode_x(&cw, side)
        } else {
            self.ff.decode_y(&cw, side)
        }
    }

    pub fn decode_x(&self, cw: &FvCodeword, y: &Sequence) -> Result<Sequence> {
        self.decode(&mut cw.reader(), y, true)
    }

    pub fn decode_y(&self, cw: &FvCodeword, x: &Sequence) -> Result<Sequence> {
        self.decode(&mut cw.reader(), x, false)
    }

    pub fn decode_x_from<R: BitRead + ?Sized>(&self, r: &mut R, y: &Sequence) -> Result<Sequence> {
        self.decode(r, y, true)
    }

    pub fn decode_y_from<R: BitRead + ?Sized>(&self, r: &mut R, x: &Sequence) -> Result<Sequence> {
        self.decode(r, x, false)
    }

    /// Exact `(1/n) E[l]`.
    pub fn expected_rate(&self, p: &SourceSpec) -> Result<f64> {
        let e = self.ff.exact_error_probability(p)?;
        let n = self.ff.config().n as f64;
        Ok((e.correct * self.inside_length() as f64 + e.e_x * self.outside_length() as f64) / n)
    }
}
