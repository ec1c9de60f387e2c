use std::ffi::CStr;
use std::ptr;

use cdcode_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cdc_last_error_message()) }.to_string_lossy().into_owned()
}

struct Ff(*mut CdcFfCode);

impl Ff {
    fn new(n: usize, rate: f64) -> Self {
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { cdc_ff_new(n, rate, 2, 2, &mut h) }, CdcStatus::Ok);
        Ff(h)
    }
}

impl Drop for Ff {
    fn drop(&mut self) {
        unsafe { cdc_ff_free(self.0) }
    }
}

struct Fv(*mut CdcFvCode);

impl Fv {
    fn new(n: usize, ax: u32, ay: u32) -> Self {
        let mut h = ptr::null_mut();
        assert_eq!(unsafe { cdc_fv_new(n, ax, ay, &mut h) }, CdcStatus::Ok);
        Fv(h)
    }
}

impl Drop for Fv {
    fn drop(&mut self) {
        unsafe { cdc_fv_free(self.0) }
    }
}

fn all_sequences(n: usize, a: u8) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|s| (0..a).map(move |l| [s.clone(), vec![l]].concat())).collect();
    }
    out
}

#[test]
fn fixed_length_round_trip_over_all_pairs() {
    let n = 4;
    let code = Ff::new(n, 0.8);
    let bits = unsafe { cdc_ff_codeword_bits(code.0) } as usize;
    assert!(bits > 0);
    let seqs = all_sequences(n, 2);
    let (mut ok, mut flagged) = (0, 0);
    for x in &seqs {
        for y in &seqs {
            let mut cw = [0u8; 8];
            let mut used = 0;
            let s = unsafe { cdc_ff_encode(code.0, x.as_ptr(), y.as_ptr(), n, cw.as_mut_ptr(), cw.len(), &mut used) };
            assert_eq!(used, bits);
            let mut xh = vec![9u8; n];
            let mut yh = vec![9u8; n];
            let dx = unsafe { cdc_ff_decode_x(code.0, cw.as_ptr(), used, y.as_ptr(), n, xh.as_mut_ptr()) };
            let dy = unsafe { cdc_ff_decode_y(code.0, cw.as_ptr(), used, x.as_ptr(), n, yh.as_mut_ptr()) };
            match s {
                CdcStatus::Ok => {
                    ok += 1;
                    assert_eq!((dx, dy), (CdcStatus::Ok, CdcStatus::Ok));
                    assert_eq!((&xh, &yh), (x, y));
                }
                CdcStatus::Flagged => {
                    flagged += 1;
                    assert_eq!((dx, dy), (CdcStatus::Flagged, CdcStatus::Flagged));
                    assert_eq!((xh, yh), (vec![0; n], vec![0; n]));
                }
                other => panic!("unexpected status {other:?}"),
            }
        }
    }
    assert!(ok > 0 && flagged > 0);
    assert_eq!(ok + flagged, 256);
}

#[test]
fn variable_length_round_trip_over_all_pairs() {
    let n = 3;
    let code = Fv::new(n, 3, 2);
    let max = unsafe { cdc_fv_max_codeword_bits(code.0) } as usize;
    for x in &all_sequences(n, 3) {
        for y in &all_sequences(n, 2) {
            let mut cw = vec![0u8; max.div_ceil(8)];
            let mut used = 0;
            let s = unsafe { cdc_fv_encode(code.0, x.as_ptr(), y.as_ptr(), n, cw.as_mut_ptr(), cw.len(), &mut used) };
            assert_eq!(s, CdcStatus::Ok);
            assert!(used <= max);
            let mut xh = vec![0u8; n];
            let mut yh = vec![0u8; n];
            assert_eq!(unsafe { cdc_fv_decode_x(code.0, cw.as_ptr(), used, y.as_ptr(), n, xh.as_mut_ptr()) }, CdcStatus::Ok);
            assert_eq!(unsafe { cdc_fv_decode_y(code.0, cw.as_ptr(), used, x.as_ptr(), n, yh.as_mut_ptr()) }, CdcStatus::Ok);
            assert_eq!((&xh, &yh), (x, y));
            if used > 0 {
                let s = unsafe { cdc_fv_decode_x(code.0, cw.as_ptr(), used - 1, y.as_ptr(), n, xh.as_mut_ptr()) };
                assert_ne!(s, CdcStatus::Ok);
            }
        }
    }
}

#[test]
fn errors_are_reported() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { cdc_ff_new(0, 0.5, 2, 2, &mut h) }, CdcStatus::InvalidArgument);
    assert!(h.is_null());
    assert!(!last_error().is_empty());
    let mut v = ptr::null_mut();
    assert_eq!(unsafe { cdc_fv_new(4, 0, 2, &mut v) }, CdcStatus::InvalidArgument);
    assert_eq!(unsafe { cdc_ff_new(4, 0.5, 2, 2, ptr::null_mut()) }, CdcStatus::NullPointer);

    let code = Ff::new(4, 1.0);
    let (x, y) = ([0u8, 1, 2, 0], [0u8, 1, 1, 0]);
    let mut cw = [0u8; 8];
    let mut used = 0;
    let s = unsafe { cdc_ff_encode(code.0, x.as_ptr(), y.as_ptr(), 4, cw.as_mut_ptr(), 8, &mut used) };
    assert_eq!(s, CdcStatus::InvalidInput);
    assert!(last_error().contains("outside an alphabet"));
    let s = unsafe { cdc_ff_encode(code.0, y.as_ptr(), y.as_ptr(), 3, cw.as_mut_ptr(), 8, &mut used) };
    assert_eq!(s, CdcStatus::InvalidInput);
    let s = unsafe { cdc_ff_encode(code.0, y.as_ptr(), y.as_ptr(), 4, cw.as_mut_ptr(), 0, &mut used) };
    assert_eq!(s, CdcStatus::BufferTooSmall);
    assert!(used > 0);
    let s = unsafe { cdc_ff_encode(code.0, y.as_ptr(), y.as_ptr(), 4, cw.as_mut_ptr(), 8, &mut used) };
    assert_eq!(s, CdcStatus::Ok);
    assert!(last_error().is_empty());
    let mut out = [0u8; 4];
    let s = unsafe { cdc_ff_decode_x(code.0, cw.as_ptr(), used - 1, y.as_ptr(), 4, out.as_mut_ptr()) };
    assert_eq!(s, CdcStatus::Truncated);
    let s = unsafe { cdc_ff_decode_x(ptr::null(), cw.as_ptr(), used, y.as_ptr(), 4, out.as_mut_ptr()) };
    assert_eq!(s, CdcStatus::NullPointer);
    assert_eq!(unsafe { cdc_ff_codeword_bits(ptr::null()) }, 0);
    unsafe { cdc_ff_free(ptr::null_mut()) };
}

#[test]
fn rate_and_exponents() {
    let p = [0.45, 0.05, 0.05, 0.45];
    let mut r = 0.0;
    assert_eq!(unsafe { cdc_achievable_rate(p.as_ptr(), 2, 2, &mut r) }, CdcStatus::Ok);
    let h = -(0.1f64 * 0.1f64.log2() + 0.9 * 0.9f64.log2());
    assert!((r - h).abs() < 1e-12);

    let bad = [0.5, 0.5, 0.5, 0.5];
    assert_eq!(unsafe { cdc_achievable_rate(bad.as_ptr(), 2, 2, &mut r) }, CdcStatus::InvalidArgument);

    // n = 1: every type is deterministic, so no type lies outside any rate.
    let mut e = 0.0;
    assert_eq!(unsafe { cdc_error_exponent(p.as_ptr(), 2, 2, 1, 0.5, &mut e) }, CdcStatus::Ok);
    assert!(e.is_infinite());

    // n = 2 at rate 0.5: the outside types have a mixed row or column; the
    // closest to P is [[1,1],[0,0]].
    assert_eq!(unsafe { cdc_error_exponent(p.as_ptr(), 2, 2, 2, 0.5, &mut e) }, CdcStatus::Ok);
    let d: f64 = 0.5 * (0.5f64 / 0.45).log2() + 0.5 * (0.5f64 / 0.05).log2();
    assert!((e - d).abs() < 1e-12, "{e} vs {d}");

    let mut c = 0.0;
    assert_eq!(unsafe { cdc_correct_exponent(p.as_ptr(), 2, 2, 8, 0.9, &mut c) }, CdcStatus::Ok);
    assert!(c.is_finite() && c >= 0.0);
    assert_eq!(unsafe { cdc_correct_exponent(p.as_ptr(), 2, 2, 0, 0.9, &mut c) }, CdcStatus::InvalidArgument);
}

#[test]
fn header_declares_every_export_and_parses_as_c() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = std::fs::read_to_string(format!("{dir}/include/cdcode.h")).unwrap();
    let src = std::fs::read_to_string(format!("{dir}/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for f in exports {
        assert!(header.contains(&format!(" {f}(")) || header.contains(&format!("*{f}(")), "{f} missing from header");
    }
    let status = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-x", "c"])
        .arg(format!("{dir}/include/cdcode.h"))
        .status()
        .expect("run C compiler");
    assert!(status.success());
}
