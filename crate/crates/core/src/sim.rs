//! Seeded Monte-Carlo runs next to the exact values.
//!
//! PRNG contract: trial `t` of grid row `r` draws from
//! `ChaCha8Rng::seed_from_u64(trial_seed(master, r, t))`, where
//! `trial_seed` chains three SplitMix64 finalizer steps over `master`,
//! `r` and `t`. Each letter pair takes one `next_u64`; its top 53 bits give
//! `u ∈ [0, 1)` and the pair is the first cell, in row-major order, whose
//! cumulative probability exceeds `u`. Results do not depend on the number
//! of worker threads.

use std::io::Write;
use std::sync::Arc;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{FfCode, FfConfig};
use crate::fv::{FvCode, WrappedFf};
use crate::info::{Bounds, Exponent, SourceSpec, DEFAULT_ASSUMPTIONS};
use crate::table::TableCache;
use crate::types::Sequence;

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `trial` on grid row `row`.
pub fn trial_seed(master: u64, row: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ row) ^ trial)
}

/// Inverse-CDF sampler over the cells of a source.
#[derive(Clone, Debug)]
pub struct PairSampler {
    cdf: Vec<f64>,
    last_positive: usize,
    ay: usize,
    src: SourceSpec,
}

impl PairSampler {
    pub fn new(p: &SourceSpec) -> Self {
        let mut acc = 0.0;
        let cdf = p
            .probabilities()
            .iter()
            .map(|&q| {
                acc += q;
                acc
            })
            .collect();
        let last_positive = p
            .probabilities()
            .iter()
            .rposition(|&q| q > 0.0)
            .expect("a source has positive mass");
        PairSampler {
            cdf,
            last_positive,
            ay: p.ay().size(),
            src: p.clone(),
        }
    }

    #[inline]
    fn cell(&self, u: f64) -> usize {
        // first cell with cdf > u; zero-mass cells can never be chosen
        let i = self.cdf.partition_point(|&c| c <= u);
        i.min(self.last_positive)
    }

    pub fn sample_into(&self, rng: &mut impl RngCore, x: &mut [u8], y: &mut [u8]) {
        for (a, b) in x.iter_mut().zip(y.iter_mut()) {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            let c = self.cell(u);
            *a = (c / self.ay) as u8;
            *b = (c % self.ay) as u8;
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> (Sequence, Sequence) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut x, mut y) = (vec![0u8; n], vec![0u8; n]);
        self.sample_into(&mut rng, &mut x, &mut y);
        (
            Sequence::from_trusted(x, self.src.ax()),
            Sequence::from_trusted(y, self.src.ay()),
        )
    }
}

/// `n` i.i.d. letter pairs from `p`, reproducible from `seed`.
pub fn sample_pair(p: &SourceSpec, n: usize, seed: u64) -> Result<(Sequence, Sequence)> {
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    Ok(PairSampler::new(p).sample(n, seed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialPlan {
    pub p: SourceSpec,
    pub n_grid: Vec<usize>,
    pub rates: Vec<f64>,
    pub trials: u64,
    pub master_seed: u64,
}

impl TrialPlan {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.rates.is_empty() {
            return Err(Error::InvalidConfig("grid must be non-empty".into()));
        }
        if self.n_grid.contains(&0) {
            return Err(Error::InvalidConfig("block lengths must be at least 1".into()));
        }
        if let Some(r) = self.rates.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::InvalidConfig(format!("rate must be positive, got {r}")));
        }
        Ok(())
    }

    /// Grid points sorted by `(n, rate)`, duplicates removed.
    pub fn grid(&self) -> Vec<(usize, f64)> {
        let mut g: Vec<(usize, f64)> = self
            .n_grid
            .iter()
            .flat_map(|&n| self.rates.iter().map(move |&r| (n, r)))
            .collect();
        g.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        g.dedup();
        g
    }
}

/// One grid point. Probabilities are exact unless prefixed `mc_`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub n: usize,
    pub rate: f64,
    pub epsilon: f64,
    pub trials: u64,
    pub exact_e_x: f64,
    pub exact_e_sum: f64,
    pub exact_correct: f64,
    pub mc_e_x: f64,
    pub mc_e_y: f64,
    pub mc_e_sum: f64,
    /// Sample standard error of `mc_e_sum`.
    pub mc_stderr: f64,
    /// Standard error of `mc_e_sum` under the exact model.
    pub model_stderr: f64,
    /// Unflagged blocks that failed to reproduce; always 0 for a sound code.
    pub mc_decode_failures: u64,
    pub min_d_outside: Exponent,
    pub min_d_outside_slack: Exponent,
    pub min_d_inside: Exponent,
    pub converse_objective: Exponent,
    pub bound_upper: f64,
    pub bound_lower: f64,
    pub correct_lower: f64,
    pub correct_upper: f64,
    pub overflow_exact: f64,
    pub overflow_mc: f64,
    pub overflow_upper: f64,
    pub overflow_lower: f64,
    pub underflow_exact: f64,
    pub underflow_upper: f64,
    pub underflow_converse: f64,
    pub fv_expected_rate: f64,
    pub fv_decode_failures: u64,
    pub wrapped_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub p: SourceSpec,
    pub trials: u64,
    pub master_seed: u64,
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

#[derive(Clone, Copy, Default)]
struct Counts {
    err_x: u64,
    err_y: u64,
    sum_sq: u64,
    ff_failures: u64,
    overflow: u64,
    fv_failures: u64,
}

impl Counts {
    fn merge(self, o: Counts) -> Counts {
        Counts {
            err_x: self.err_x + o.err_x,
            err_y: self.err_y + o.err_y,
            sum_sq: self.sum_sq + o.sum_sq,
            ff_failures: self.ff_failures + o.ff_failures,
            overflow: self.overflow + o.overflow,
            fv_failures: self.fv_failures + o.fv_failures,
        }
    }
}

fn run_trial(
    ff: &FfCode,
    fv: &FvCode,
    sampler: &PairSampler,
    n: usize,
    seed: u64,
    overflow_threshold: f64,
) -> Result<Counts> {
    let (x, y) = sampler.sample(n, seed);
    let mut c = Counts::default();
    let cw = ff.encode(&x, &y)?;
    if cw.error_flag {
        // an encoding error is charged to both decoders
        c.err_x = 1;
        c.err_y = 1;
    } else {
        let ex = ff.decode_x(&cw, &y).map(|s| s != x).unwrap_or(true);
        let ey = ff.decode_y(&cw, &x).map(|s| s != y).unwrap_or(true);
        c.err_x = ex as u64;
        c.err_y = ey as u64;
        c.ff_failures = (ex || ey) as u64;
    }
    let z = c.err_x + c.err_y;
    c.sum_sq = z * z;
    let vw = fv.encode(&x, &y)?;
    c.overflow = (vw.len() as f64 > overflow_threshold) as u64;
    let fx = fv.decode_x(&vw, &y).map(|s| s != x).unwrap_or(true);
    let fy = fv.decode_y(&vw, &x).map(|s| s != y).unwrap_or(true);
    c.fv_failures = (fx || fy) as u64;
    Ok(c)
}

/// Exact columns of one grid point, without Monte-Carlo.
pub fn exact_row(n: usize, rate: f64, p: &SourceSpec, tables: Arc<TableCache>) -> Result<ReportRow> {
    let ff = FfCode::with_cache(FfConfig::new(n, rate, p.ax(), p.ay())?, Arc::clone(&tables))?;
    let fv = FvCode::with_cache(n, p.ax(), p.ay(), Arc::clone(&tables))?;
    let wrapped = WrappedFf::with_cache(*ff.config(), tables)?;
    let e = ff.exact_error_probability(p)?;
    let b = Bounds::compute(n, rate, p, &DEFAULT_ASSUMPTIONS);
    let len = fv.length_stats(rate, p)?;
    Ok(ReportRow {
        n,
        rate,
        epsilon: b.epsilon,
        trials: 0,
        exact_e_x: e.e_x,
        exact_e_sum: e.e_sum,
        exact_correct: e.correct,
        mc_e_x: f64::NAN,
        mc_e_y: f64::NAN,
        mc_e_sum: f64::NAN,
        mc_stderr: f64::NAN,
        model_stderr: f64::NAN,
        mc_decode_failures: 0,
        min_d_outside: b.min_div_outside,
        min_d_outside_slack: b.min_div_outside_slack,
        min_d_inside: b.min_div_inside,
        converse_objective: b.converse_objective,
        bound_upper: b.error_upper,
        bound_lower: b.error_lower,
        correct_lower: b.correct_lower,
        correct_upper: b.correct_upper,
        overflow_exact: len.overflow,
        overflow_mc: f64::NAN,
        overflow_upper: b.overflow_upper,
        overflow_lower: b.overflow_lower,
        underflow_exact: len.underflow,
        underflow_upper: b.underflow_upper,
        underflow_converse: b.underflow_converse,
        fv_expected_rate: len.expected_length / n as f64,
        fv_decode_failures: 0,
        wrapped_rate: wrapped.expected_rate(p)?,
    })
}

/// Exact values plus Monte-Carlo estimates for every grid point.
pub fn run_plan(plan: &TrialPlan) -> Result<ExperimentReport> {
    plan.validate()?;
    let p = &plan.p;
    let sampler = PairSampler::new(p);
    let mut rows = Vec::new();
    let mut caches: Vec<(usize, Arc<TableCache>)> = Vec::new();
    for (row_idx, (n, rate)) in plan.grid().into_iter().enumerate() {
        let tables = match caches.iter().find(|(m, _)| *m == n) {
            Some((_, t)) => Arc::clone(t),
            None => {
                let t = Arc::new(TableCache::default());
                caches.push((n, Arc::clone(&t)));
                t
            }
        };
        let mut row = exact_row(n, rate, p, Arc::clone(&tables))?;
        let ff = FfCode::with_cache(FfConfig::new(n, rate, p.ax(), p.ay())?, Arc::clone(&tables))?;
        let fv = FvCode::with_cache(n, p.ax(), p.ay(), tables)?;
        // warm the tables serially so parallel trials only read
        for jt in fv.types() {
            fv.tables().get(jt)?;
        }
        let threshold = n as f64 * (rate + row.epsilon);
        let counts = (0..plan.trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(plan.master_seed, row_idx as u64, t);
                run_trial(&ff, &fv, &sampler, n, seed, threshold)
            })
            .try_reduce(Counts::default, |a, b| Ok(a.merge(b)))?;
        let tf = plan.trials as f64;
        let mean = (counts.err_x + counts.err_y) as f64 / tf;
        let var = (counts.sum_sq as f64 / tf - mean * mean).max(0.0);
        let q = row.exact_e_x;
        row.trials = plan.trials;
        row.mc_e_x = counts.err_x as f64 / tf;
        row.mc_e_y = counts.err_y as f64 / tf;
        row.mc_e_sum = mean;
        row.mc_stderr = (var / tf).sqrt();
        row.model_stderr = 2.0 * (q * (1.0 - q) / tf).sqrt();
        row.mc_decode_failures = counts.ff_failures;
        row.overflow_mc = counts.overflow as f64 / tf;
        row.fv_decode_failures = counts.fv_failures;
        rows.push(row);
    }
    Ok(ExperimentReport {
        p: plan.p.clone(),
        trials: plan.trials,
        master_seed: plan.master_seed,
        rows,
    })
}
