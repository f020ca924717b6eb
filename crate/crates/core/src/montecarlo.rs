//! Seeded fixed-weight error sampling and parallel trial execution.
//!
//! Every trial draws from its own ChaCha8 stream selected by
//! `(master seed, stream id)`, so results do not depend on thread count or
//! scheduling.

use std::fmt::Write as _;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{ConcatenatedCode, PriorVector};
use crate::error::{Error, Result};
use crate::stabilizer::{five_qubit_code, steane_code, LocatedSet, Pauli, StabilizerCode};

/// Floor on the decoder's unlocated rate, keeping priors strictly positive.
pub const P_DEC_FLOOR: f64 = 1e-12;

/// Levels above this need [`TrialConfig::large_scale`].
pub const DESK_SCALE_MAX_LEVELS: u32 = 6;

pub const MAX_LEVELS: u32 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseCode {
    Five,
    Steane,
}

impl BaseCode {
    pub fn code(self) -> StabilizerCode {
        match self {
            BaseCode::Five => five_qubit_code(),
            BaseCode::Steane => steane_code(),
        }
    }
}

impl std::str::FromStr for BaseCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "five" => Ok(BaseCode::Five),
            "steane" => Ok(BaseCode::Steane),
            other => Err(Error::InvalidArgument(format!("unknown code {other:?}"))),
        }
    }
}

/// How each trial picks its `(t_u, t_l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum SamplingMode {
    Fixed { t_u: usize, t_l: usize },
    /// `t_l` uniform on the integers of `[q_min n, q_max n]`, then `t_u`
    /// uniform on the integers of `[p_min (n - t_l), p_max (n - t_l)]`.
    RateRectangle { p_min: f64, p_max: f64, q_min: f64, q_max: f64 },
}

impl SamplingMode {
    pub const DEFAULT_RECTANGLE: SamplingMode =
        SamplingMode::RateRectangle { p_min: 0.0, p_max: 0.4, q_min: 0.0, q_max: 0.7 };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub code: BaseCode,
    pub levels: u32,
    pub mode: SamplingMode,
    pub trials: u64,
    pub seed: u64,
    /// Decoder unlocated rate; `None` uses the realized `t_u / (n - t_l)`.
    pub p_dec: Option<f64>,
    /// Permits more than [`DESK_SCALE_MAX_LEVELS`] levels.
    #[serde(default)]
    pub large_scale: bool,
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 || self.levels > MAX_LEVELS {
            return Err(Error::InvalidArgument(format!("levels must be in 1..={MAX_LEVELS}")));
        }
        if self.levels > DESK_SCALE_MAX_LEVELS && !self.large_scale {
            return Err(Error::InvalidArgument(format!(
                "more than {DESK_SCALE_MAX_LEVELS} levels requires large-scale mode"
            )));
        }
        let n = self.code.code().n().pow(self.levels);
        match self.mode {
            SamplingMode::Fixed { t_u, t_l } => {
                if t_u + t_l > n {
                    return Err(Error::InvalidWeights { n, t_u, t_l });
                }
            }
            SamplingMode::RateRectangle { p_min, p_max, q_min, q_max } => {
                for (name, v) in [("p_min", p_min), ("p_max", p_max), ("q_min", q_min), ("q_max", q_max)] {
                    if !(0.0..=1.0).contains(&v) {
                        return Err(Error::RateOutOfRange { name, value: v });
                    }
                }
                if p_min > p_max || q_min > q_max {
                    return Err(Error::InvalidArgument("empty rate rectangle".into()));
                }
                let (lo, hi) = integer_range(q_min, q_max, n);
                if lo > hi {
                    return Err(Error::InvalidArgument("rate rectangle contains no integer t_l".into()));
                }
            }
        }
        if let Some(p) = self.p_dec {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::RateOutOfRange { name: "p_dec", value: p });
            }
        }
        Ok(())
    }
}

/// Integers in `[lo * size, hi * size]`, tolerant of rounding in the product.
fn integer_range(lo: f64, hi: f64, size: usize) -> (usize, usize) {
    let a = (lo * size as f64 - 1e-9).ceil().max(0.0) as usize;
    let b = ((hi * size as f64 + 1e-9).floor() as usize).min(size);
    (a, b)
}

/// A concrete error: flagged qubits plus the Pauli on every qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErrorPattern {
    pub located: LocatedSet,
    pub assignment: Vec<Pauli>,
}

impl ErrorPattern {
    /// Non-identity Paulis outside the located set.
    pub fn unlocated_weight(&self) -> usize {
        self.assignment
            .iter()
            .enumerate()
            .filter(|&(i, p)| !p.is_identity() && !self.located.contains(i))
            .count()
    }
}

/// Located qubits carry a uniformly random Pauli (identity included); exactly
/// `t_u` other qubits carry a uniformly random non-identity Pauli.
pub fn sample_error<R: Rng + ?Sized>(n: usize, t_u: usize, t_l: usize, rng: &mut R) -> Result<ErrorPattern> {
    if t_u + t_l > n {
        return Err(Error::InvalidWeights { n, t_u, t_l });
    }
    let mut assignment = vec![Pauli::I; n];
    let mut is_located = vec![false; n];
    let located: Vec<usize> = index::sample(rng, n, t_l).into_vec();
    for &q in &located {
        is_located[q] = true;
        assignment[q] = Pauli::from_index(rng.random_range(0..4));
    }
    let free: Vec<usize> = (0..n).filter(|&q| !is_located[q]).collect();
    for j in index::sample(rng, free.len(), t_u) {
        assignment[free[j]] = Pauli::NON_IDENTITY[rng.random_range(0..3)];
    }
    Ok(ErrorPattern { located: LocatedSet::new(located, n)?, assignment })
}

/// Uniform priors on located qubits, `[1-p, p/3, p/3, p/3]` elsewhere, with
/// `p` floored at [`P_DEC_FLOOR`].
pub fn build_priors(pattern: &ErrorPattern, p_dec: f64) -> Vec<PriorVector> {
    let unlocated = PriorVector::depolarizing(p_dec.max(P_DEC_FLOOR));
    let mut priors = vec![unlocated; pattern.assignment.len()];
    for &q in pattern.located.indices() {
        priors[q] = PriorVector::UNIFORM;
    }
    priors
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub t_u: usize,
    pub t_l: usize,
    pub success: bool,
    /// ChaCha stream the trial drew from, under the master seed.
    pub stream: u64,
}

/// A configured code plus the sampling rules; runs individual trials.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: TrialConfig,
    code: ConcatenatedCode,
}

impl Experiment {
    pub fn new(config: TrialConfig) -> Result<Self> {
        config.validate()?;
        let code = ConcatenatedCode::new(&config.code.code(), config.levels)?;
        Ok(Self { config, code })
    }

    pub fn config(&self) -> &TrialConfig {
        &self.config
    }

    pub fn code(&self) -> &ConcatenatedCode {
        &self.code
    }

    pub fn n(&self) -> usize {
        self.code.n()
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(stream);
        rng
    }

    fn draw_weights(&self, rng: &mut ChaCha8Rng) -> (usize, usize) {
        let n = self.n();
        match self.config.mode {
            SamplingMode::Fixed { t_u, t_l } => (t_u, t_l),
            SamplingMode::RateRectangle { p_min, p_max, q_min, q_max } => {
                let (lo, hi) = integer_range(q_min, q_max, n);
                let t_l = rng.random_range(lo..=hi);
                let (lo, hi) = integer_range(p_min, p_max, n - t_l);
                let t_u = if lo > hi { lo.min(n - t_l) } else { rng.random_range(lo..=hi) };
                (t_u, t_l)
            }
        }
    }

    /// One trial at explicit weights on an explicit stream.
    pub fn run_weights(&self, t_u: usize, t_l: usize, stream: u64) -> Result<bool> {
        let mut rng = self.rng(stream);
        self.run_with_rng(t_u, t_l, &mut rng)
    }

    fn run_with_rng(&self, t_u: usize, t_l: usize, rng: &mut ChaCha8Rng) -> Result<bool> {
        let n = self.n();
        let pattern = sample_error(n, t_u, t_l, rng)?;
        let p_dec = self.config.p_dec.unwrap_or_else(|| {
            let rest = n - t_l;
            if rest == 0 {
                0.0
            } else {
                t_u as f64 / rest as f64
            }
        });
        let priors = build_priors(&pattern, p_dec);
        Ok(self.code.decode_serial(&priors, &pattern.assignment)?.success)
    }

    pub fn run_trial(&self, trial: u64) -> Result<TrialRecord> {
        let mut rng = self.rng(trial);
        let (t_u, t_l) = self.draw_weights(&mut rng);
        let success = self.run_with_rng(t_u, t_l, &mut rng)?;
        Ok(TrialRecord { trial, t_u, t_l, success, stream: trial })
    }

    /// All configured trials in index order, executed on the current rayon
    /// pool.
    pub fn scatter(&self) -> Result<Vec<TrialRecord>> {
        (0..self.config.trials).into_par_iter().map(|i| self.run_trial(i)).collect()
    }

    pub fn scatter_serial(&self) -> Result<Vec<TrialRecord>> {
        (0..self.config.trials).map(|i| self.run_trial(i)).collect()
    }
}

pub fn scatter_experiment(config: &TrialConfig) -> Result<Vec<TrialRecord>> {
    Experiment::new(config.clone())?.scatter()
}

pub fn trials_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("trial,t_u,t_l,success\n");
    for r in records {
        let _ = writeln!(out, "{},{},{},{}", r.trial, r.t_u, r.t_l, r.success as u8);
    }
    out
}

/// Failed trials only, with rate coordinates alongside the weights.
pub fn failures_csv(records: &[TrialRecord], n: usize) -> String {
    let mut out = String::from("trial,t_u,t_l,p,q\n");
    for r in records.iter().filter(|r| !r.success) {
        let (p, q) = crate::bounds::ErrorWeights::new(r.t_u, r.t_l).to_rates(n);
        let _ = writeln!(out, "{},{},{},{p:.6},{q:.6}", r.trial, r.t_u, r.t_l);
    }
    out
}

pub fn trials_jsonl(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t_u: usize,
    pub t_l: usize,
    pub failures: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

/// Independent failure-rate estimates at each `(t_u, t_l)`. Trial `i` of
/// point `j` draws from stream `(j << 32) | i`.
pub fn failure_rate_sweep(
    code: BaseCode,
    levels: u32,
    points: &[(usize, usize)],
    trials_per_point: u64,
    seed: u64,
    p_dec: Option<f64>,
    large_scale: bool,
) -> Result<Vec<SweepRow>> {
    if trials_per_point >= 1 << 32 || points.len() >= 1 << 31 {
        return Err(Error::InvalidArgument("sweep too large for stream numbering".into()));
    }
    let mut rows = Vec::with_capacity(points.len());
    for (j, &(t_u, t_l)) in points.iter().enumerate() {
        let config = TrialConfig {
            code,
            levels,
            mode: SamplingMode::Fixed { t_u, t_l },
            trials: trials_per_point,
            seed,
            p_dec,
            large_scale,
        };
        let exp = Experiment::new(config)?;
        let failures = (0..trials_per_point)
            .into_par_iter()
            .map(|i| exp.run_weights(t_u, t_l, ((j as u64) << 32) | i).map(|ok| (!ok) as u64))
            .collect::<Result<Vec<u64>>>()?
            .into_iter()
            .sum();
        let (ci_lo, ci_hi) = wilson_interval(failures, trials_per_point);
        let rate = if trials_per_point == 0 { 0.0 } else { failures as f64 / trials_per_point as f64 };
        rows.push(SweepRow { t_u, t_l, failures, trials: trials_per_point, rate, ci_lo, ci_hi });
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("t_u,t_l,failures,trials,rate,ci_lo,ci_hi\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6},{:.6},{:.6}",
            r.t_u, r.t_l, r.failures, r.trials, r.rate, r.ci_lo, r.ci_hi
        );
    }
    out
}
