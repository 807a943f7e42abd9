//! Monte Carlo experiments: count unit eigenvalues of random palindromic
//! pencils over many trials.
//!
//! Trial `i` draws its matrix from stream `i` of the master seed, so results
//! are identical for any thread count and trials can be reproduced in
//! isolation. Trials whose matrix is refused (near singular) or whose
//! eigensolve fails are recorded as skipped rather than resampled, keeping
//! the trial-to-stream correspondence exact.

use crate::error::{Error, Result};
use crate::matrix::StarKind;
use crate::rng::{random_shifted_integer, random_uniform_complex, RngStream};
use crate::spectrum::{pencil_eigenvalues, UnitRule};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

/// Which random matrix family a trial draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// Entries `re + i·im`, both uniform on [0, 1).
    Uniform,
    /// Integer entries on `{1..m}` plus the trial-dependent diagonal shift
    /// `i·ln(i)/5`; `m` is the trial count.
    ShiftedInteger,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n: usize,
    pub trials: u64,
    pub star: StarKind,
    pub generator: Generator,
    /// Tolerance of the unit-modulus rule (scaled by ‖A‖_F by default).
    pub unit_tol: f64,
    /// Use `||λ|-1| ≤ unit_tol` instead of dividing by ‖A‖_F.
    pub scale_free: bool,
    pub master_seed: u64,
    /// Worker threads; 1 runs serially.
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn new(n: usize, trials: u64, star: StarKind, generator: Generator) -> Self {
        ExperimentConfig {
            n,
            trials,
            star,
            generator,
            unit_tol: crate::spectrum::DEFAULT_UNIT_TOL,
            scale_free: false,
            master_seed: 0,
            threads: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("matrix size must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("need at least one trial".into()));
        }
        if !(self.unit_tol > 0.0) {
            return Err(Error::InvalidParameter("unit tolerance must be positive".into()));
        }
        if self.threads == 0 {
            return Err(Error::InvalidParameter("thread count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialStatus {
    Ok,
    Skipped,
}

/// Outcome of a single trial.
#[derive(Debug, Clone, Copy)]
pub struct TrialRecord {
    pub trial_index: u64,
    pub unit_count: usize,
    pub status: TrialStatus,
}

/// Histogram of unit-eigenvalue counts over the completed trials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    pub bins: BTreeMap<usize, u64>,
    pub total: u64,
    pub skipped: u64,
}

impl FrequencyTable {
    pub fn counted(&self) -> u64 {
        self.bins.values().sum()
    }

    /// Bins whose unit count does not share the parity of `n`. Non-empty
    /// output from a `*` experiment indicates tolerance misclassification.
    pub fn parity_violations(&self, n: usize) -> Vec<(usize, u64)> {
        self.bins
            .iter()
            .filter(|(&count, _)| count % 2 != n % 2)
            .map(|(&count, &freq)| (count, freq))
            .collect()
    }
}

fn run_trial(cfg: &ExperimentConfig, trial: u64) -> TrialRecord {
    let mut rng = RngStream::new(cfg.master_seed, trial);
    let a = match cfg.generator {
        Generator::Uniform => random_uniform_complex(cfg.n, &mut rng),
        Generator::ShiftedInteger => {
            random_shifted_integer(cfg.n, trial, cfg.trials, &mut rng)
        }
    };
    match pencil_eigenvalues(&a, cfg.star) {
        Ok(mut spectrum) => {
            let rule = if cfg.scale_free {
                UnitRule::Absolute { tol: cfg.unit_tol }
            } else {
                UnitRule::ScaledByNorm { tol: cfg.unit_tol }
            };
            let unit_count = spectrum.count_unit_with(rule);
            TrialRecord {
                trial_index: trial,
                unit_count,
                status: TrialStatus::Ok,
            }
        }
        Err(_) => TrialRecord {
            trial_index: trial,
            unit_count: 0,
            status: TrialStatus::Skipped,
        },
    }
}

/// Run all trials and aggregate. The result is a pure function of the
/// configuration; thread count only affects wall time.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(FrequencyTable, Vec<TrialRecord>)> {
    cfg.validate()?;
    let trials: Vec<u64> = (1..=cfg.trials).collect();
    let records: Vec<TrialRecord> = if cfg.threads == 1 {
        trials.iter().map(|&i| run_trial(cfg, i)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| trials.par_iter().map(|&i| run_trial(cfg, i)).collect())
    };

    let mut bins = BTreeMap::new();
    let mut skipped = 0;
    for r in &records {
        match r.status {
            TrialStatus::Ok => *bins.entry(r.unit_count).or_insert(0) += 1,
            TrialStatus::Skipped => skipped += 1,
        }
    }
    Ok((
        FrequencyTable {
            bins,
            total: cfg.trials,
            skipped,
        },
        records,
    ))
}

/// Frequency CSV: header `unit_count,frequency`, rows ascending, LF endings.
pub fn frequency_csv(t: &FrequencyTable) -> String {
    let mut out = String::from("unit_count,frequency\n");
    for (count, freq) in &t.bins {
        let _ = writeln!(out, "{count},{freq}");
    }
    out
}

/// Scatter CSV: header `trial,unit_count,status`, rows ascending by trial.
pub fn scatter_csv(records: &[TrialRecord]) -> String {
    let mut rows: Vec<&TrialRecord> = records.iter().collect();
    rows.sort_by_key(|r| r.trial_index);
    let mut out = String::from("trial,unit_count,status\n");
    for r in rows {
        let status = match r.status {
            TrialStatus::Ok => "OK",
            TrialStatus::Skipped => "Skipped",
        };
        let _ = writeln!(out, "{},{},{}", r.trial_index, r.unit_count, status);
    }
    out
}

pub fn emit_frequency_csv(t: &FrequencyTable, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, frequency_csv(t))?;
    Ok(())
}

pub fn emit_scatter_csv(records: &[TrialRecord], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, scatter_csv(records))?;
    Ok(())
}

/// Parse the output of [`frequency_csv`] back into a table (totals are
/// reconstructed from the bins; skips are not serialized).
pub fn parse_frequency_csv(text: &str) -> Result<FrequencyTable> {
    let mut lines = text.lines();
    match lines.next() {
        Some("unit_count,frequency") => {}
        other => {
            return Err(Error::MatrixFormat(format!(
                "bad frequency CSV header: {other:?}"
            )))
        }
    }
    let mut bins = BTreeMap::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let (a, b) = line
            .split_once(',')
            .ok_or_else(|| Error::MatrixFormat(format!("bad CSV row {line:?}")))?;
        let count: usize = a
            .parse()
            .map_err(|_| Error::MatrixFormat(format!("bad unit count {a:?}")))?;
        let freq: u64 = b
            .parse()
            .map_err(|_| Error::MatrixFormat(format!("bad frequency {b:?}")))?;
        bins.insert(count, freq);
    }
    let total = bins.values().sum();
    Ok(FrequencyTable {
        bins,
        total,
        skipped: 0,
    })
}
