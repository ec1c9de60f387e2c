//! C ABI over the `cdcode` fixed-length and variable-length codecs.
//!
//! Sequences cross the boundary as one letter per byte. Codewords are packed
//! most-significant bit first and zero-padded to a whole byte; every encode
//! reports the exact bit length. Codec handles are opaque, immutable after
//! construction and safe to share between threads.
//!
//! Every fallible function returns a [`CdcStatus`]. On failure a message is
//! kept per thread and can be read with [`cdc_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use bitstream_io::{BigEndian, BitReader, BitWrite, BitWriter};
use cdcode::ff::{FfCode, FfCodeword, FfConfig};
use cdcode::fv::{FvCode, FvCodeword};
use cdcode::info::{
    achievable_rate, correct_exponent_inside, error_exponent_outside, SourceSpec, DEFAULT_ASSUMPTIONS,
};
use cdcode::types::{Alphabet, JointType, Sequence};
use cdcode::Error;

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CdcStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A block length, rate, alphabet or source is invalid.
    InvalidArgument = 2,
    /// A letter is outside its alphabet or a length does not match the code.
    InvalidInput = 3,
    /// The codeword does not parse or disagrees with the side information.
    Malformed = 4,
    /// The codeword has fewer bits than it needs.
    Truncated = 5,
    /// The block was outside the decodable set; the decoder output is all zeros.
    Flagged = 6,
    /// Building a coding table would exceed the memory budget.
    ResourceLimit = 7,
    /// The output buffer is too small; the required size is reported.
    BufferTooSmall = 8,
    /// An internal invariant failed.
    Internal = 9,
}

/// Fixed-length code handle.
pub struct CdcFfCode(FfCode);

/// Variable-length code handle.
pub struct CdcFvCode {
    code: FvCode,
    max_bits: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(e: &Error) -> CdcStatus {
    match e {
        Error::InvalidAlphabet(_) | Error::InvalidSource(_) | Error::InvalidConfig(_) | Error::InvalidType { .. } => {
            CdcStatus::InvalidArgument
        }
        Error::LetterOutOfRange { .. }
        | Error::EmptySequence
        | Error::LengthMismatch { .. }
        | Error::AlphabetMismatch { .. } => CdcStatus::InvalidInput,
        Error::MalformedCodeword(_)
        | Error::TypeIndexOutOfRange { .. }
        | Error::SymbolNotFound { .. }
        | Error::WrongMarginalType(_)
        | Error::PairNotInTable(_)
        | Error::RankOutOfRange { .. } => CdcStatus::Malformed,
        Error::Truncated => CdcStatus::Truncated,
        Error::ResourceLimit { .. } => CdcStatus::ResourceLimit,
        Error::Io(_) => CdcStatus::Internal,
    }
}

struct Fail(CdcStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail(CdcStatus::Internal, e.to_string())
    }
}

type FfiResult = Result<CdcStatus, Fail>;

fn guard(f: impl FnOnce() -> FfiResult) -> CdcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            set_error("");
            s
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            CdcStatus::Internal
        }
    }
}

fn null() -> Fail {
    Fail(CdcStatus::NullPointer, "null pointer argument".into())
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

unsafe fn bytes<'a>(p: *const u8, len: usize) -> Result<&'a [u8], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn bytes_mut<'a>(p: *mut u8, len: usize) -> Result<&'a mut [u8], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null());
    }
    Ok(slice::from_raw_parts_mut(p, len))
}

unsafe fn sequence(p: *const u8, n: usize, alphabet: Alphabet) -> Result<Sequence, Fail> {
    Ok(Sequence::new(bytes(p, n)?.to_vec(), alphabet)?)
}

fn alphabet(size: u32) -> Result<Alphabet, Fail> {
    Ok(Alphabet::new(size as usize)?)
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

fn check_len(expected: usize, actual: usize) -> Result<(), Fail> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual }.into());
    }
    Ok(())
}

/// Copies `packed` into the caller buffer, reporting `bits` through `out_bits`.
unsafe fn emit(packed: &[u8], bits: usize, out: *mut u8, out_cap: usize, out_bits: *mut usize) -> Result<(), Fail> {
    write_out(out_bits, bits)?;
    if out_cap < packed.len() {
        return Err(Fail(
            CdcStatus::BufferTooSmall,
            format!("codeword needs {} bytes, buffer holds {out_cap}", packed.len()),
        ));
    }
    bytes_mut(out, packed.len())?.copy_from_slice(packed);
    Ok(())
}

unsafe fn source(p: *const f64, ax: u32, ay: u32) -> Result<SourceSpec, Fail> {
    let (ax, ay) = (alphabet(ax)?, alphabet(ay)?);
    let len = ax.size() * ay.size();
    if p.is_null() {
        return Err(null());
    }
    Ok(SourceSpec::new(slice::from_raw_parts(p, len).to_vec(), ax, ay)?)
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn cdc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cdc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates the universal fixed-length code of block length `n` and rate
/// `rate` bits per letter over alphabets of sizes `ax` and `ay`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cdc_ff_new(n: usize, rate: f64, ax: u32, ay: u32, out: *mut *mut CdcFfCode) -> CdcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let code = FfCode::new(FfConfig::new(n, rate, alphabet(ax)?, alphabet(ay)?)?)?;
        out.write(Box::into_raw(Box::new(CdcFfCode(code))));
        Ok(CdcStatus::Ok)
    })
}

/// Releases a handle from [`cdc_ff_new`]. Null is ignored.
///
/// # Safety
/// `code` must come from [`cdc_ff_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cdc_ff_free(code: *mut CdcFfCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Bits in every codeword of this code, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cdc_ff_codeword_bits(code: *const CdcFfCode) -> u32 {
    code.as_ref().map_or(0, |c| c.0.codeword_bits())
}

/// Encodes the pair `(x, y)` of length `n`. Writes `ceil(bits / 8)` bytes
/// to `out` and the bit length to `out_bits`. A pair outside the decodable
/// set still yields a valid codeword and returns `Flagged`.
///
/// # Safety
/// `x` and `y` must point to `n` bytes, `out` to `out_cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cdc_ff_encode(
    code: *const CdcFfCode,
    x: *const u8,
    y: *const u8,
    n: usize,
    out: *mut u8,
    out_cap: usize,
    out_bits: *mut usize,
) -> CdcStatus {
    guard(|| {
        let c = &handle(code)?.0;
        let cfg = c.config();
        check_len(cfg.n, n)?;
        let (x, y) = (sequence(x, n, cfg.ax)?, sequence(y, n, cfg.ay)?);
        let cw = c.encode(&x, &y)?;
        let mut w = BitWriter::endian(Vec::new(), BigEndian);
        c.write_codeword(&mut w, &cw)?;
        w.byte_align()?;
        emit(&w.into_writer(), c.codeword_bits() as usize, out, out_cap, out_bits)?;
        Ok(if cw.error_flag { CdcStatus::Flagged } else { CdcStatus::Ok })
    })
}

unsafe fn ff_decode(
    code: *const CdcFfCode,
    cw: *const u8,
    cw_bits: usize,
    side: *const u8,
    n: usize,
    out: *mut u8,
    want_x: bool,
) -> CdcStatus {
    guard(|| {
        let c = &handle(code)?.0;
        let cfg = c.config();
        check_len(cfg.n, n)?;
        let need = c.codeword_bits() as usize;
        if cw_bits < need {
            return Err(Error::Truncated.into());
        }
        let packed = bytes(cw, need.div_ceil(8))?;
        let word: FfCodeword = c.read_codeword(&mut BitReader::endian(packed, BigEndian))?;
        let decoded = if want_x {
            c.decode_x(&word, &sequence(side, n, cfg.ay)?)?
        } else {
            c.decode_y(&word, &sequence(side, n, cfg.ax)?)?
        };
        bytes_mut(out, n)?.copy_from_slice(decoded.letters());
        Ok(if word.error_flag { CdcStatus::Flagged } else { CdcStatus::Ok })
    })
}

/// Recovers `x` from a codeword and the side information `y`.
///
/// # Safety
/// `cw` must point to `ceil(cw_bits / 8)` bytes, `y` to `n` bytes and
/// `out_x` to `n` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cdc_ff_decode_x(
    code: *const CdcFfCode,
    cw: *const u8,
    cw_bits: usize,
    y: *const u8,
    n: usize,
    out_x: *mut u8,
) -> CdcStatus {
    ff_decode(code, cw, cw_bits, y, n, out_x, true)
}

/// Recovers `y` from a codeword and the side information `x`.
///
/// # Safety
/// As for [`cdc_ff_decode_x`].
#[no_mangle]
pub unsafe extern "C" fn cdc_ff_decode_y(
    code: *const CdcFfCode,
    cw: *const u8,
    cw_bits: usize,
    x: *const u8,
    n: usize,
    out_y: *mut u8,
) -> CdcStatus {
    ff_decode(code, cw, cw_bits, x, n, out_y, false)
}

/// Creates the universal variable-length code of block length `n`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn cdc_fv_new(n: usize, ax: u32, ay: u32, out: *mut *mut CdcFvCode) -> CdcStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let code = FvCode::new(n, alphabet(ax)?, alphabet(ay)?)?;
        let max_bits = code.types().iter().filter_map(|jt| code.length_of(jt)).max().unwrap_or(0);
        out.write(Box::into_raw(Box::new(CdcFvCode { code, max_bits })));
        Ok(CdcStatus::Ok)
    })
}

/// Releases a handle from [`cdc_fv_new`]. Null is ignored.
///
/// # Safety
/// `code` must come from [`cdc_fv_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cdc_fv_free(code: *mut CdcFvCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Longest codeword of this code in bits, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cdc_fv_max_codeword_bits(code: *const CdcFvCode) -> u32 {
    code.as_ref().map_or(0, |c| c.max_bits)
}

/// Encodes the pair `(x, y)` of length `n`; see [`cdc_ff_encode`] for the
/// output convention.
///
/// # Safety
/// `x` and `y` must point to `n` bytes, `out` to `out_cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cdc_fv_encode(
    code: *const CdcFvCode,
    x: *const u8,
    y: *const u8,
    n: usize,
    out: *mut u8,
    out_cap: usize,
    out_bits: *mut usize,
) -> CdcStatus {
    guard(|| {
        let c = &handle(code)?.code;
        let (ax, ay) = c.alphabets();
        check_len(c.n(), n)?;
        let cw: FvCodeword = c.encode(&sequence(x, n, ax)?, &sequence(y, n, ay)?)?;
        emit(cw.as_bytes(), cw.len(), out, out_cap, out_bits)?;
        Ok(CdcStatus::Ok)
    })
}

unsafe fn fv_decode(
    code: *const CdcFvCode,
    cw: *const u8,
    cw_bits: usize,
    side: *const u8,
    n: usize,
    out: *mut u8,
    want_x: bool,
) -> CdcStatus {
    guard(|| {
        let c = &handle(code)?.code;
        let (ax, ay) = c.alphabets();
        check_len(c.n(), n)?;
        let packed = bytes(cw, cw_bits.div_ceil(8))?;
        let mut r = BitReader::endian(packed, BigEndian);
        let (x, y) = if want_x {
            let y = sequence(side, n, ay)?;
            (c.decode_x_from(&mut r, &y)?, y)
        } else {
            let x = sequence(side, n, ax)?;
            let y = c.decode_y_from(&mut r, &x)?;
            (x, y)
        };
        let used = c.length_of(&JointType::of(&x, &y)?).unwrap_or(u32::MAX) as usize;
        if used > cw_bits {
            return Err(Error::Truncated.into());
        }
        let decoded = if want_x { x } else { y };
        bytes_mut(out, n)?.copy_from_slice(decoded.letters());
        Ok(CdcStatus::Ok)
    })
}

/// Recovers `x` from a variable-length codeword and the side information `y`.
///
/// # Safety
/// `cw` must point to `ceil(cw_bits / 8)` bytes, `y` to `n` bytes and
/// `out_x` to `n` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn cdc_fv_decode_x(
    code: *const CdcFvCode,
    cw: *const u8,
    cw_bits: usize,
    y: *const u8,
    n: usize,
    out_x: *mut u8,
) -> CdcStatus {
    fv_decode(code, cw, cw_bits, y, n, out_x, true)
}

/// Recovers `y` from a variable-length codeword and the side information `x`.
///
/// # Safety
/// As for [`cdc_fv_decode_x`].
#[no_mangle]
pub unsafe extern "C" fn cdc_fv_decode_y(
    code: *const CdcFvCode,
    cw: *const u8,
    cw_bits: usize,
    x: *const u8,
    n: usize,
    out_y: *mut u8,
) -> CdcStatus {
    fv_decode(code, cw, cw_bits, x, n, out_y, false)
}

/// Minimum achievable rate `max{H(X|Y), H(Y|X)}` of the source whose
/// row-major `ax * ay` probabilities are at `p`.
///
/// # Safety
/// `p` must point to `ax * ay` doubles and `out_rate` to one writable double.
#[no_mangle]
pub unsafe extern "C" fn cdc_achievable_rate(p: *const f64, ax: u32, ay: u32, out_rate: *mut f64) -> CdcStatus {
    guard(|| {
        write_out(out_rate, achievable_rate(&source(p, ax, ay)?))?;
        Ok(CdcStatus::Ok)
    })
}

/// Error exponent of the fixed-length code at block length `n`: the minimum
/// divergence over joint types outside the decodable set. Infinite when no
/// type lies outside.
///
/// # Safety
/// As for [`cdc_achievable_rate`].
#[no_mangle]
pub unsafe extern "C" fn cdc_error_exponent(
    p: *const f64,
    ax: u32,
    ay: u32,
    n: usize,
    rate: f64,
    out_exponent: *mut f64,
) -> CdcStatus {
    guard(|| {
        let p = source(p, ax, ay)?;
        valid_point(n, rate)?;
        write_out(out_exponent, error_exponent_outside(rate, &p, n).value.value())?;
        Ok(CdcStatus::Ok)
    })
}

/// Correct-decoding exponent at block length `n`: the minimum divergence
/// over correctly decoded joint types.
///
/// # Safety
/// As for [`cdc_achievable_rate`].
#[no_mangle]
pub unsafe extern "C" fn cdc_correct_exponent(
    p: *const f64,
    ax: u32,
    ay: u32,
    n: usize,
    rate: f64,
    out_exponent: *mut f64,
) -> CdcStatus {
    guard(|| {
        let p = source(p, ax, ay)?;
        valid_point(n, rate)?;
        let report = correct_exponent_inside(rate, &p, n, &DEFAULT_ASSUMPTIONS);
        write_out(out_exponent, report.value.value())?;
        Ok(CdcStatus::Ok)
    })
}

fn valid_point(n: usize, rate: f64) -> Result<(), Fail> {
    if n == 0 || !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidConfig(format!("need n >= 1 and a positive rate, got n={n}, rate={rate}")).into());
    }
    Ok(())
}

// Handles are shared across threads by C callers.
const _: fn() = || {
    fn sync<T: Send + Sync>() {}
    sync::<CdcFfCode>();
    sync::<CdcFvCode>();
};
