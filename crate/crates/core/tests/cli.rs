use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cdcode::cli::exit;

fn cdcode(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdcode")).args(args).output().expect("spawn cdcode")
}

fn code(o: &Output) -> u8 {
    o.status.code().expect("exit code") as u8
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Correlated binary letters from a fixed linear congruential stream.
fn correlated(len: usize, flip_every: usize) -> (Vec<u8>, Vec<u8>) {
    let mut s: u32 = 12345;
    let x: Vec<u8> = (0..len)
        .map(|_| {
            s = s.wrapping_mul(1_103_515_245).wrapping_add(12345);
            ((s >> 16) & 1) as u8
        })
        .collect();
    let y = x.iter().enumerate().map(|(i, &b)| if i % flip_every == 3 { b ^ 1 } else { b }).collect();
    (x, y)
}

fn round_trip(mode: &[&str], n: &str) {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = correlated(203, 7);
    let (xp, yp, cp) = (dir.path().join("x"), dir.path().join("y"), dir.path().join("c"));
    fs::write(&xp, &x).unwrap();
    fs::write(&yp, &y).unwrap();
    let mut args = vec!["encode", "--n", n, "-x", p(&xp), "-y", p(&yp), "-o", p(&cp)];
    args.extend_from_slice(mode);
    let o = cdcode(&args);
    assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stderr));

    let out = dir.path().join("out");
    let o = cdcode(&["decode", "-i", p(&cp), "--side", "x", "--side-info", p(&yp), "-o", p(&out)]);
    assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&out).unwrap(), x);
    let o = cdcode(&["decode", "-i", p(&cp), "--side", "y", "--side-info", p(&xp), "-o", p(&out)]);
    assert_eq!(code(&o), exit::OK, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(&out).unwrap(), y);
}

#[test]
fn variable_length_round_trip() {
    round_trip(&["--mode", "fv"], "8");
}

#[test]
fn wrapped_round_trip_at_low_rate() {
    round_trip(&["--mode", "wrap", "--rate", "0.3"], "6");
}

#[test]
fn fixed_length_round_trip_at_full_rate() {
    round_trip(&["--mode", "ff", "--rate", "1.0"], "5");
}

#[test]
fn flagged_blocks_give_a_distinct_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let (xp, yp, cp, out) =
        (dir.path().join("x"), dir.path().join("y"), dir.path().join("c"), dir.path().join("o"));
    // Both blocks have joint type [[1,1],[1,1]], conditional entropy 1 > 0.1.
    fs::write(&xp, [0, 0, 1, 1, 1, 1, 0, 0]).unwrap();
    fs::write(&yp, [0, 1, 0, 1, 1, 0, 1, 0]).unwrap();
    let o = cdcode(&["encode", "--mode", "ff", "--n", "4", "--rate", "0.1", "-x", p(&xp), "-y", p(&yp), "-o", p(&cp)]);
    assert_eq!(code(&o), exit::OK);
    assert!(String::from_utf8_lossy(&o.stderr).contains("flagged"));
    let o = cdcode(&["decode", "-i", p(&cp), "--side", "x", "--side-info", p(&yp), "-o", p(&out)]);
    assert_eq!(code(&o), exit::FLAGGED);
    assert_eq!(fs::read(&out).unwrap(), vec![0; 8]);
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (xp, yp, cp, out) =
        (dir.path().join("x"), dir.path().join("y"), dir.path().join("c"), dir.path().join("o"));
    fs::write(&xp, [0, 2, 1]).unwrap();
    fs::write(&yp, [0, 1, 1]).unwrap();
    let o = cdcode(&["encode", "--mode", "fv", "--n", "3", "-x", p(&xp), "-y", p(&yp), "-o", p(&cp)]);
    assert_eq!(code(&o), exit::BAD_INPUT);

    fs::write(&xp, [0, 0, 1]).unwrap();
    let o = cdcode(&["encode", "--mode", "fv", "--n", "3", "-x", p(&xp), "-y", p(&yp), "-o", p(&cp)]);
    assert_eq!(code(&o), exit::OK);
    let full = fs::read(&cp).unwrap();
    fs::write(&cp, &full[..full.len() - 1]).unwrap();
    let o = cdcode(&["decode", "-i", p(&cp), "--side", "x", "--side-info", p(&yp), "-o", p(&out)]);
    assert_eq!(code(&o), exit::TRUNCATED);

    fs::write(&cp, b"not a codeword stream at all, definitely not").unwrap();
    let o = cdcode(&["decode", "-i", p(&cp), "--side", "x", "--side-info", p(&yp), "-o", p(&out)]);
    assert_eq!(code(&o), exit::MALFORMED);

    let o = cdcode(&["decode", "-i", p(&dir.path().join("missing")), "--side", "x", "--side-info", p(&yp), "-o", p(&out)]);
    assert_eq!(code(&o), exit::IO);

    assert_eq!(code(&cdcode(&["encode", "--mode", "ff"])), exit::USAGE);
    assert_eq!(code(&cdcode(&["rate", "--source", "dsbs:1.5"])), exit::USAGE);
}

#[test]
fn rate_of_symmetric_source() {
    let o = cdcode(&["rate", "--source", "dsbs:0.11", "--out", "json"]);
    assert_eq!(code(&o), exit::OK);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let h = -(0.11f64 * 0.11f64.log2() + 0.89 * 0.89f64.log2());
    assert!((v[0]["rate"].as_f64().unwrap() - h).abs() < 1e-12);
    assert_eq!(v[0]["h_x_given_y"], v[0]["h_y_given_x"]);
}

#[test]
fn dump_table_grids() {
    let o = cdcode(&["dump-table", "--circulant", "5,3"]);
    assert_eq!(code(&o), exit::OK);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').skip(1).filter(|c| !c.is_empty()).collect();
        assert_eq!(cells.len(), 3);
        let mut sorted = cells.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 3, "row {row} repeats a symbol");
    }

    let o = cdcode(&["dump-table", "--joint", "1,1;1,1"]);
    assert_eq!(code(&o), exit::OK);
    let text = String::from_utf8(o.stdout).unwrap();
    // 6 sequences on each side, each with 4 neighbours and 4 symbols.
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    for row in &lines[1..] {
        assert_eq!(row.split(',').skip(1).filter(|c| !c.is_empty()).count(), 4);
    }
}

#[test]
fn types_and_exponent_tables() {
    let o = cdcode(&["types", "--n", "3", "--rate", "0.5", "--out", "json"]);
    assert_eq!(code(&o), exit::OK);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // C(3+3, 3) joint types of length 3 over 2x2.
    assert_eq!(v.as_array().unwrap().len(), 20);

    let o = cdcode(&["exponent", "--n", "4,6", "--rate", "0.5,0.9", "--source", "0.4,0.1;0.1,0.4"]);
    assert_eq!(code(&o), exit::OK);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("n,rate,epsilon,min_d_outside"));
}

#[test]
fn sweep_from_config_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("plan.json");
    fs::write(
        &cfg,
        r#"{"p": {"p_xy": [[0.45, 0.05], [0.05, 0.45]]}, "n_grid": [4, 6], "rates": [0.7], "trials": 2000, "master_seed": 9}"#,
    )
    .unwrap();
    let a = cdcode(&["sweep", "--config", p(&cfg)]);
    assert_eq!(code(&a), exit::OK, "{}", String::from_utf8_lossy(&a.stderr));
    let b = cdcode(&["sweep", "--source", "dsbs:0.1", "--n", "4,6", "--rate", "0.7", "--trials", "2000", "--seed", "9"]);
    assert_eq!(code(&b), exit::OK);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 3);
}
