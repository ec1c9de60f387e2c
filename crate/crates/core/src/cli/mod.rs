//! The `cdcode` command-line front end.

pub mod container;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{
    achievable_rate, conditional_entropy, converse_correct_exponent, correct_exponent_inside,
    error_exponent_outside, in_decodable_set, type_divergence, type_probability, Bounds,
    Direction, Exponent, SourceSpec, DEFAULT_ASSUMPTIONS,
};
use crate::sim::{run_plan, TrialPlan};
use crate::table::{edge_color, BipartiteGraph, CodingTable};
use crate::types::{v_shell_size, w_shell_size, Alphabet, JointType};
use container::{Codec, Mode, Side};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    /// Input letters, lengths or alphabets are invalid.
    pub const BAD_INPUT: u8 = 3;
    /// The codeword stream is malformed or disagrees with the side information.
    pub const MALFORMED: u8 = 4;
    pub const TRUNCATED: u8 = 5;
    /// Decoding finished but some blocks carried the encoding-error flag.
    pub const FLAGGED: u8 = 6;
    pub const RESOURCE: u8 = 7;
    pub const IO: u8 = 8;
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidAlphabet(_) | Error::InvalidSource(_) | Error::InvalidConfig(_) | Error::InvalidType { .. } => {
            exit::USAGE
        }
        Error::LetterOutOfRange { .. }
        | Error::EmptySequence
        | Error::LengthMismatch { .. }
        | Error::AlphabetMismatch { .. } => exit::BAD_INPUT,
        Error::MalformedCodeword(_)
        | Error::TypeIndexOutOfRange { .. }
        | Error::SymbolNotFound { .. }
        | Error::WrongMarginalType(_)
        | Error::PairNotInTable(_)
        | Error::RankOutOfRange { .. } => exit::MALFORMED,
        Error::Truncated => exit::TRUNCATED,
        Error::ResourceLimit { .. } => exit::RESOURCE,
        Error::Io(_) => exit::IO,
    }
}

#[derive(Parser, Debug)]
#[command(name = "cdcode", version, about = "Universal complementary-delivery codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Fixed-length code; blocks outside the decodable set are flagged.
    Ff,
    /// Variable-length code; always lossless.
    Fv,
    /// Fixed-length code with verbatim fallback; always lossless.
    Wrap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    /// Reconstruct x using y as side information.
    X,
    /// Reconstruct y using x as side information.
    Y,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Encode a pair of letter files (one letter per byte) into a codeword stream.
    Encode {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Rate in bits per letter; required for ff and wrap.
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long, default_value_t = 2)]
        ax: usize,
        #[arg(long, default_value_t = 2)]
        ay: usize,
        #[arg(short = 'x', long)]
        x: PathBuf,
        #[arg(short = 'y', long)]
        y: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Decode one side of a codeword stream with the other side as side information.
    Decode {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        side: SideArg,
        /// File holding the other sequence.
        #[arg(long)]
        side_info: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// List the joint types of length n.
    Types {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        ax: usize,
        #[arg(long, default_value_t = 2)]
        ay: usize,
        /// Mark membership in the decodable set at this rate.
        #[arg(long)]
        rate: Option<f64>,
        /// Add divergence and probability columns for this source.
        #[arg(long)]
        source: Option<String>,
        #[arg(long, value_enum, default_value_t)]
        out: Format,
    },
    /// Write a coding table as CSV.
    DumpTable {
        /// Joint type count matrix, rows separated by ';' (e.g. "1,1;1,1").
        #[arg(long, conflicts_with = "circulant", required_unless_present = "circulant")]
        joint: Option<String>,
        /// Circulant bipartite graph "m,d": node i joined to i..i+d-1 mod m.
        #[arg(long)]
        circulant: Option<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exponents and finite-n bounds on an (n, rate) grid.
    Exponent {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        rate: Vec<f64>,
        #[arg(long)]
        source: String,
        #[arg(long, value_enum, default_value_t)]
        out: Format,
    },
    /// Exact and Monte-Carlo sweep; takes a JSON plan or flags.
    Sweep {
        /// JSON file with fields p, n_grid, rates, trials, master_seed.
        #[arg(long, conflicts_with_all = ["source", "n", "rate"])]
        config: Option<PathBuf>,
        #[arg(long, required_unless_present = "config")]
        source: Option<String>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        rate: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        out: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Minimum achievable rate max{H(X|Y), H(Y|X)} of a source.
    Rate {
        #[arg(long)]
        source: String,
        #[arg(long, value_enum)]
        out: Option<Format>,
    },
}

/// Parses a source: `dsbs:<p>`, `uniform:<|X|>x<|Y|>`, a JSON file
/// `{"p_xy": [[..], ..]}`, or inline rows `"0.45,0.05;0.05,0.45"`.
pub fn parse_source(s: &str) -> Result<SourceSpec> {
    if let Some(p) = s.strip_prefix("dsbs:") {
        let p: f64 = p.trim().parse().map_err(|_| Error::InvalidSource(format!("bad crossover {p:?}")))?;
        return SourceSpec::dsbs(p);
    }
    if let Some(dims) = s.strip_prefix("uniform:") {
        let (a, b) = dims
            .split_once('x')
            .ok_or_else(|| Error::InvalidSource(format!("expected uniform:AxB, got {s:?}")))?;
        let size = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidSource(format!("bad size {t:?}")))
                .and_then(Alphabet::new)
        };
        return Ok(SourceSpec::uniform(size(a)?, size(b)?));
    }
    if Path::new(s).is_file() {
        let text = fs::read_to_string(s)?;
        return serde_json::from_str(&text).map_err(|e| Error::InvalidSource(e.to_string()));
    }
    let rows = parse_matrix::<f64>(s).map_err(Error::InvalidSource)?;
    SourceSpec::from_rows(&rows)
}

fn parse_matrix<T: std::str::FromStr>(s: &str) -> std::result::Result<Vec<Vec<T>>, String> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<T>().map_err(|_| format!("bad entry {v:?} in {s:?}")))
                .collect()
        })
        .collect()
}

fn emit<T: Serialize, W: Write + ?Sized>(rows: &[T], fmt: Format, out: &mut W) -> Result<()> {
    match fmt {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(io::Error::from)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows).map_err(io::Error::from)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn output_sink<'a>(path: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    match path {
        Some(p) => Ok(Box::new(io::BufWriter::new(fs::File::create(p)?))),
        None => Ok(Box::new(stdout)),
    }
}

#[derive(Serialize)]
struct TypeRow {
    index: usize,
    counts: String,
    h_y_given_x: f64,
    h_x_given_y: f64,
    v_shell: String,
    w_shell: String,
    in_decodable_set: Option<bool>,
    divergence: Option<f64>,
    probability: Option<f64>,
}

#[derive(Serialize)]
struct ExponentRow {
    n: usize,
    rate: f64,
    epsilon: f64,
    min_d_outside: Exponent,
    argmin_outside: Option<String>,
    min_d_inside: Exponent,
    argmin_inside: Option<String>,
    converse_objective: Exponent,
    error_upper: f64,
    error_lower: f64,
    correct_lower: f64,
    correct_upper: f64,
}

#[derive(Serialize)]
struct RateReport {
    h_x_given_y: f64,
    h_y_given_x: f64,
    rate: f64,
}

/// Runs one parsed command. Returns the exit code for non-error outcomes.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Encode { n, mode, rate, ax, ay, x, y, output } => {
            let mode = match mode {
                ModeArg::Ff => Mode::Fixed,
                ModeArg::Fv => Mode::Variable,
                ModeArg::Wrap => Mode::Wrapped,
            };
            let rate = if mode == Mode::Variable { None } else { rate };
            if mode != Mode::Variable && rate.is_none() {
                return Err(Error::InvalidConfig("--rate is required for ff and wrap".into()));
            }
            let codec = Codec::new(mode, n, rate, Alphabet::new(ax)?, Alphabet::new(ay)?)?;
            let (xb, yb) = (fs::read(&x)?, fs::read(&y)?);
            let mut buf = Vec::new();
            let s = container::encode(&codec, &xb, &yb, &mut buf)?;
            fs::write(&output, &buf)?;
            writeln!(
                stderr,
                "encoded {} blocks, {} payload bits ({:.4} bits/letter)",
                s.blocks,
                s.payload_bits,
                s.payload_bits as f64 / xb.len() as f64
            )?;
            if s.flagged > 0 {
                writeln!(stderr, "{} of {} blocks flagged as encoding errors", s.flagged, s.blocks)?;
            }
            Ok(exit::OK)
        }
        Command::Decode { input, side, side_info, output } => {
            let side = match side {
                SideArg::X => Side::X,
                SideArg::Y => Side::Y,
            };
            let info = fs::read(&side_info)?;
            let d = container::decode(fs::File::open(&input)?, &info, side)?;
            fs::write(&output, &d.output)?;
            if d.flagged > 0 {
                writeln!(
                    stderr,
                    "{} of {} blocks were flagged encoding errors and decoded to letter 0",
                    d.flagged, d.header.blocks
                )?;
                return Ok(exit::FLAGGED);
            }
            Ok(exit::OK)
        }
        Command::Types { n, ax, ay, rate, source, out } => {
            let (ax, ay) = (Alphabet::new(ax)?, Alphabet::new(ay)?);
            if n == 0 {
                return Err(Error::InvalidConfig("block length must be at least 1".into()));
            }
            let p = source.as_deref().map(parse_source).transpose()?;
            if let Some(p) = &p {
                if (p.ax(), p.ay()) != (ax, ay) {
                    return Err(Error::InvalidConfig("source alphabets differ from --ax/--ay".into()));
                }
            }
            let rows: Vec<TypeRow> = JointType::enumerate(n, ax, ay)
                .iter()
                .enumerate()
                .map(|(index, jt)| TypeRow {
                    index,
                    counts: jt.to_string(),
                    h_y_given_x: conditional_entropy(jt, Direction::YGivenX),
                    h_x_given_y: conditional_entropy(jt, Direction::XGivenY),
                    v_shell: v_shell_size(jt).to_string(),
                    w_shell: w_shell_size(jt).to_string(),
                    in_decodable_set: rate.map(|r| in_decodable_set(jt, r)),
                    divergence: p.as_ref().map(|p| type_divergence(jt, p)),
                    probability: p.as_ref().map(|p| type_probability(jt, p)),
                })
                .collect();
            emit(&rows, out, stdout)?;
            Ok(exit::OK)
        }
        Command::DumpTable { joint, circulant, output } => {
            let mut sink = output_sink(&output, stdout)?;
            if let Some(spec) = joint {
                let rows = parse_matrix::<u32>(&spec).map_err(Error::InvalidConfig)?;
                let jt = JointType::from_rows(&rows)?;
                let table = CodingTable::build(&jt)?;
                table.write_csv(&mut sink).map_err(io::Error::from)?;
                writeln!(
                    stderr,
                    "joint type {jt}: {} x {} table, {} symbols",
                    table.left_size(),
                    table.right_size(),
                    table.num_symbols()
                )?;
            } else if let Some(spec) = circulant {
                let parts = parse_matrix::<usize>(&spec).map_err(Error::InvalidConfig)?;
                let [m, d] = parts.first().map(Vec::as_slice).unwrap_or(&[]) else {
                    return Err(Error::InvalidConfig("--circulant expects \"m,d\"".into()));
                };
                if *m == 0 || d > m {
                    return Err(Error::InvalidConfig("--circulant needs 0 < d <= m".into()));
                }
                let g = BipartiteGraph::circulant(*m, *d);
                let c = edge_color(&g);
                c.write_grid(&g, &mut sink).map_err(io::Error::from)?;
                writeln!(stderr, "circulant {m}x{m} degree {d}: {} symbols", c.num_colors())?;
            }
            sink.flush()?;
            Ok(exit::OK)
        }
        Command::Exponent { n, rate, source, out } => {
            let p = parse_source(&source)?;
            let mut rows = Vec::new();
            for &n in &n {
                if n == 0 {
                    return Err(Error::InvalidConfig("block length must be at least 1".into()));
                }
                for &r in &rate {
                    if !(r.is_finite() && r > 0.0) {
                        return Err(Error::InvalidConfig(format!("rate must be positive, got {r}")));
                    }
                    let outside = error_exponent_outside(r, &p, n);
                    let inside = correct_exponent_inside(r, &p, n, &DEFAULT_ASSUMPTIONS);
                    let b = Bounds::compute(n, r, &p, &DEFAULT_ASSUMPTIONS);
                    let converse = converse_correct_exponent(r, &p, n, b.epsilon);
                    rows.push(ExponentRow {
                        n,
                        rate: r,
                        epsilon: b.epsilon,
                        min_d_outside: outside.value,
                        argmin_outside: outside.argmin.map(|j| j.to_string()),
                        min_d_inside: inside.value,
                        argmin_inside: inside.argmin.map(|j| j.to_string()),
                        converse_objective: converse.value,
                        error_upper: b.error_upper,
                        error_lower: b.error_lower,
                        correct_lower: b.correct_lower,
                        correct_upper: b.correct_upper,
                    });
                }
            }
            emit(&rows, out, stdout)?;
            Ok(exit::OK)
        }
        Command::Sweep { config, source, n, rate, trials, seed, out, output } => {
            let plan = match config {
                Some(path) => {
                    let text = fs::read_to_string(path)?;
                    serde_json::from_str::<TrialPlan>(&text).map_err(|e| Error::InvalidConfig(e.to_string()))?
                }
                None => TrialPlan {
                    p: parse_source(source.as_deref().unwrap_or_default())?,
                    n_grid: n,
                    rates: rate,
                    trials,
                    master_seed: seed,
                },
            };
            let report = run_plan(&plan)?;
            let mut sink = output_sink(&output, stdout)?;
            match out {
                Format::Csv => report.write_csv(&mut sink)?,
                Format::Json => report.write_json(&mut sink)?,
            }
            sink.flush()?;
            Ok(exit::OK)
        }
        Command::Rate { source, out } => {
            let p = parse_source(&source)?;
            let report = RateReport {
                h_x_given_y: conditional_entropy(&p, Direction::XGivenY),
                h_y_given_x: conditional_entropy(&p, Direction::YGivenX),
                rate: achievable_rate(&p),
            };
            match out {
                None => {
                    writeln!(stdout, "H(X|Y) = {:.6}", report.h_x_given_y)?;
                    writeln!(stdout, "H(Y|X) = {:.6}", report.h_y_given_x)?;
                    writeln!(stdout, "R_f = R_v = {:.6}", report.rate)?;
                }
                Some(fmt) => emit(&[report], fmt, stdout)?,
            }
            Ok(exit::OK)
        }
    }
}

/// Parses arguments, runs, and reports errors on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (mut out, mut err) = (io::stdout().lock(), io::stderr());
    match run(cli, &mut out, &mut err) {
        Ok(code) => {
            let _ = out.flush();
            ExitCode::from(code)
        }
        Err(e) => {
            let _ = out.flush();
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
