//! Container for codeword streams.
//!
//! Header (big-endian, 40 bytes):
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 4    | magic `CDC\x01`                          |
//! | 4      | 1    | format version (1)                      |
//! | 5      | 1    | mode: 0 fixed, 1 variable, 2 wrapped    |
//! | 6      | 2    | `\|X\|`                                   |
//! | 8      | 2    | `\|Y\|`                                   |
//! | 10     | 4    | block length `n`                        |
//! | 14     | 8    | rate as IEEE-754 bits (0 for variable)  |
//! | 22     | 1    | type index width                        |
//! | 23     | 1    | symbol width (fixed mode, else 0)       |
//! | 24     | 8    | original sequence length                |
//! | 32     | 8    | block count                             |
//!
//! The codewords follow back to back, most significant bit first, and the
//! stream is zero-padded to a byte boundary. A final short block is padded
//! with letter 0.

use std::io::{Read, Write};

use bitstream_io::{BigEndian, BitReader, BitWrite, BitWriter};

use crate::error::{Error, Result};
use crate::ff::{FfCode, FfConfig};
use crate::fv::{FvCode, WrappedFf};
use crate::types::{Alphabet, Sequence};

pub const MAGIC: [u8; 4] = *b"CDC\x01";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Fixed,
    Variable,
    Wrapped,
}

impl Mode {
    fn code(self) -> u8 {
        match self {
            Mode::Fixed => 0,
            Mode::Variable => 1,
            Mode::Wrapped => 2,
        }
    }

    fn from_code(c: u8) -> Result<Self> {
        match c {
            0 => Ok(Mode::Fixed),
            1 => Ok(Mode::Variable),
            2 => Ok(Mode::Wrapped),
            _ => Err(Error::MalformedCodeword(format!("unknown mode {c}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Header {
    pub mode: Mode,
    pub ax: Alphabet,
    pub ay: Alphabet,
    pub n: usize,
    pub rate: f64,
    pub type_width: u8,
    pub symbol_width: u8,
    pub original_len: u64,
    pub blocks: u64,
}

impl Header {
    pub fn write<W: Write>(&self, w: &mut W) -> Result<()> {
        let mut buf = Vec::with_capacity(HEADER_LEN);
        buf.extend_from_slice(&MAGIC);
        buf.push(VERSION);
        buf.push(self.mode.code());
        buf.extend_from_slice(&(self.ax.size() as u16).to_be_bytes());
        buf.extend_from_slice(&(self.ay.size() as u16).to_be_bytes());
        buf.extend_from_slice(&(self.n as u32).to_be_bytes());
        buf.extend_from_slice(&self.rate.to_bits().to_be_bytes());
        buf.push(self.type_width);
        buf.push(self.symbol_width);
        buf.extend_from_slice(&self.original_len.to_be_bytes());
        buf.extend_from_slice(&self.blocks.to_be_bytes());
        debug_assert_eq!(buf.len(), HEADER_LEN);
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn parse(bytes: &[u8]) -> Result<Header> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated);
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::MalformedCodeword("bad magic".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::MalformedCodeword(format!("unsupported version {}", bytes[4])));
        }
        let u16_at = |i: usize| u16::from_be_bytes([bytes[i], bytes[i + 1]]);
        let u32_at = |i: usize| u32::from_be_bytes(bytes[i..i + 4].try_into().unwrap());
        let u64_at = |i: usize| u64::from_be_bytes(bytes[i..i + 8].try_into().unwrap());
        let bad = |e: Error| Error::MalformedCodeword(e.to_string());
        let h = Header {
            mode: Mode::from_code(bytes[5])?,
            ax: Alphabet::new(u16_at(6) as usize).map_err(bad)?,
            ay: Alphabet::new(u16_at(8) as usize).map_err(bad)?,
            n: u32_at(10) as usize,
            rate: f64::from_bits(u64_at(14)),
            type_width: bytes[22],
            symbol_width: bytes[23],
            original_len: u64_at(24),
            blocks: u64_at(32),
        };
        if h.n == 0 {
            return Err(Error::MalformedCodeword("block length 0".into()));
        }
        if h.blocks != h.original_len.div_ceil(h.n as u64) {
            return Err(Error::MalformedCodeword("block count does not match length".into()));
        }
        Ok(h)
    }
}

/// A code ready for one container.
pub enum Codec {
    Fixed(FfCode),
    Variable(FvCode),
    Wrapped(WrappedFf),
}

impl Codec {
    pub fn new(mode: Mode, n: usize, rate: Option<f64>, ax: Alphabet, ay: Alphabet) -> Result<Self> {
        let need_rate = || rate.ok_or_else(|| Error::InvalidConfig("this mode requires a rate".into()));
        Ok(match mode {
            Mode::Fixed => Codec::Fixed(FfCode::new(FfConfig::new(n, need_rate()?, ax, ay)?)?),
            Mode::Wrapped => Codec::Wrapped(WrappedFf::new(FfConfig::new(n, need_rate()?, ax, ay)?)?),
            Mode::Variable => Codec::Variable(FvCode::new(n, ax, ay)?),
        })
    }

    fn header(&self, original_len: u64) -> Header {
        let (mode, n, rate, ax, ay, tw, sw) = match self {
            Codec::Fixed(c) => {
                let k = c.config();
                (Mode::Fixed, k.n, k.rate, k.ax, k.ay, c.type_width(), c.symbol_width())
            }
            Codec::Wrapped(w) => {
                let c = w.inner();
                let k = c.config();
                (Mode::Wrapped, k.n, k.rate, k.ax, k.ay, c.type_width(), c.symbol_width())
            }
            Codec::Variable(c) => {
                let (ax, ay) = c.alphabets();
                (Mode::Variable, c.n(), 0.0, ax, ay, c.type_width(), 0)
            }
        };
        Header {
            mode,
            ax,
            ay,
            n,
            rate,
            type_width: tw as u8,
            symbol_width: sw as u8,
            original_len,
            blocks: original_len.div_ceil(n as u64),
        }
    }

    fn from_header(h: &Header) -> Result<Self> {
        let rate = (h.mode != Mode::Variable).then_some(h.rate);
        let codec = Codec::new(h.mode, h.n, rate, h.ax, h.ay).map_err(|e| match e {
            Error::InvalidConfig(m) => Error::MalformedCodeword(m),
            e => e,
        })?;
        let expect = codec.header(h.original_len);
        if (expect.type_width, expect.symbol_width) != (h.type_width, h.symbol_width) {
            return Err(Error::MalformedCodeword("field widths do not match the code".into()));
        }
        Ok(codec)
    }
}

/// Result of encoding a file pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EncodeSummary {
    pub blocks: u64,
    /// Blocks whose pair was outside the decodable set (fixed mode).
    pub flagged: u64,
    pub payload_bits: u64,
}

/// Result of decoding one side.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeSummary {
    pub header: Header,
    pub flagged: u64,
    pub output: Vec<u8>,
}

fn blocks(data: &[u8], n: usize, a: Alphabet) -> Result<Vec<Sequence>> {
    if let Some(position) = data.iter().position(|&l| !a.contains(l)) {
        return Err(Error::LetterOutOfRange {
            letter: data[position],
            position,
            size: a.size(),
        });
    }
    Ok(data
        .chunks(n)
        .map(|c| {
            let mut v = c.to_vec();
            v.resize(n, 0);
            Sequence::from_trusted(v, a)
        })
        .collect())
}

pub fn encode<W: Write>(codec: &Codec, x: &[u8], y: &[u8], out: &mut W) -> Result<EncodeSummary> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptySequence);
    }
    let header = codec.header(x.len() as u64);
    let xs = blocks(x, header.n, header.ax)?;
    let ys = blocks(y, header.n, header.ay)?;
    header.write(out)?;
    let mut w = BitWriter::endian(Vec::new(), BigEndian);
    let mut summary = EncodeSummary {
        blocks: header.blocks,
        ..Default::default()
    };
    for (bx, by) in xs.iter().zip(&ys) {
        match codec {
            Codec::Fixed(c) => {
                let cw = c.encode(bx, by)?;
                summary.flagged += cw.error_flag as u64;
                summary.payload_bits += c.codeword_bits() as u64;
                c.write_codeword(&mut w, &cw)?;
            }
            Codec::Variable(c) => {
                let cw = c.encode(bx, by)?;
                summary.payload_bits += cw.len() as u64;
                cw.write_to(&mut w)?;
            }
            Codec::Wrapped(c) => {
                let cw = c.encode(bx, by)?;
                summary.payload_bits += cw.len() as u64;
                cw.write_to(&mut w)?;
            }
        }
    }
    w.byte_align()?;
    out.write_all(&w.into_writer())?;
    Ok(summary)
}

/// Which sequence a decoder reconstructs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Reconstruct x from y.
    X,
    /// Reconstruct y from x.
    Y,
}

pub fn decode<R: Read>(mut input: R, side_info: &[u8], side: Side) -> Result<DecodeSummary> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let header = Header::parse(&bytes)?;
    let codec = Codec::from_header(&header)?;
    if side_info.len() as u64 != header.original_len {
        return Err(Error::LengthMismatch {
            expected: header.original_len as usize,
            actual: side_info.len(),
        });
    }
    let side_alphabet = match side {
        Side::X => header.ay,
        Side::Y => header.ax,
    };
    let sides = blocks(side_info, header.n, side_alphabet)?;
    let mut r = BitReader::endian(&bytes[HEADER_LEN..], BigEndian);
    let mut flagged = 0;
    let mut output = Vec::with_capacity(header.blocks as usize * header.n);
    for s in &sides {
        let out = match (&codec, side) {
            (Codec::Fixed(c), _) => {
                let cw = c.read_codeword(&mut r)?;
                flagged += cw.error_flag as u64;
                match side {
                    Side::X => c.decode_x(&cw, s)?,
                    Side::Y => c.decode_y(&cw, s)?,
                }
            }
            (Codec::Variable(c), Side::X) => c.decode_x_from(&mut r, s)?,
            (Codec::Variable(c), Side::Y) => c.decode_y_from(&mut r, s)?,
            (Codec::Wrapped(c), Side::X) => c.decode_x_from(&mut r, s)?,
            (Codec::Wrapped(c), Side::Y) => c.decode_y_from(&mut r, s)?,
        };
        output.extend_from_slice(out.letters());
    }
    output.truncate(header.original_len as usize);
    Ok(DecodeSummary {
        header,
        flagged,
        output,
    })
}
