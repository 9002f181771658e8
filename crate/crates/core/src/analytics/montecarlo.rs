//! Seeded Monte Carlo (or exhaustive) estimation of the mean number of
//! inversions.
//!
//! Trial `i` sorts the permutation drawn from stream `i` of the run seed.
//! Trials run on the rayon pool and are reduced in trial-index order with
//! exact integer sums, so a record does not depend on the schedule.

use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ak_stats, lower_bound, PassDiagnostics};
use crate::increments::{generate, Family, IncrementSequence, SequenceError};
use crate::perm::{
    enumerate_permutations, trial_permutation, Permutation, Seed, MAX_ENUMERATION_N,
};
use crate::sorter::{pass_totals, shellsort_with_snapshots, PassTotals, SortTrace};

/// Largest `n` for exhaustive mode.
pub const MAX_EXHAUSTIVE_N: usize = MAX_ENUMERATION_N;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McError {
    #[error("at least one trial is required")]
    ZeroTrials,
    #[error("exhaustive mode is limited to n <= {MAX_EXHAUSTIVE_N}, got {0}")]
    ExhaustiveTooLarge(usize),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McMode {
    Sampled,
    /// Every permutation of `n` exactly once.
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: Seed,
    pub mode: McMode,
    /// Check every pass against the chain-inversion oracle.
    pub check_passes: bool,
    /// Keep the full trace of the first input in the record.
    pub retain_trace: bool,
}

impl McConfig {
    pub fn sampled(trials: u64, seed: u64) -> Self {
        McConfig {
            trials,
            seed: Seed(seed),
            mode: McMode::Sampled,
            check_passes: false,
            retain_trace: false,
        }
    }

    pub fn exhaustive() -> Self {
        McConfig {
            trials: 0,
            seed: Seed(0),
            mode: McMode::Exhaustive,
            check_passes: false,
            retain_trace: false,
        }
    }

    pub fn checked(mut self) -> Self {
        self.check_passes = true;
        self
    }

    pub fn retaining_trace(mut self) -> Self {
        self.retain_trace = true;
        self
    }
}

/// Full trace of one input, with per-pass diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub input: Permutation,
    pub trace: SortTrace,
    pub diagnostics: Vec<PassDiagnostics>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub passes_checked: u64,
    pub pass_sum_mismatches: u64,
    pub unsorted_runs: u64,
}

/// One measurement: mean and variance of the total inversions over
/// `trials` inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub family: Family,
    pub n: usize,
    pub increments: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    pub mode: McMode,
    pub mean_t: f64,
    pub var_t: f64,
    pub per_pass_means: Vec<f64>,
    pub lb_value: f64,
    /// `mean_t / lb_value`
    pub lb_ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<TraceSample>,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

/// Generates the family's sequence for `n` and runs [`mc_run`].
pub fn mc_estimate(
    family: Family,
    n: usize,
    config: &McConfig,
) -> Result<ExperimentRecord, McError> {
    let seq = generate(family, n)?;
    mc_run(family, &seq, config)
}

pub fn mc_run(
    family: Family,
    seq: &IncrementSequence,
    config: &McConfig,
) -> Result<ExperimentRecord, McError> {
    let n = seq.n();
    let check = config.check_passes;
    let outcomes: Vec<PassTotals> = match config.mode {
        McMode::Sampled => {
            if config.trials == 0 {
                return Err(McError::ZeroTrials);
            }
            (0..config.trials)
                .into_par_iter()
                .map(|i| {
                    let p = trial_permutation(n, config.seed, i).expect("n >= 1");
                    pass_totals(&p, seq, check)
                })
                .collect()
        }
        McMode::Exhaustive => {
            if n > MAX_EXHAUSTIVE_N {
                return Err(McError::ExhaustiveTooLarge(n));
            }
            let all: Vec<Permutation> = enumerate_permutations(n).expect("n checked").collect();
            all.par_iter().map(|p| pass_totals(p, seq, check)).collect()
        }
    };

    let trials = outcomes.len() as u64;
    let mut sum = 0u128;
    let mut sum_sq = 0u128;
    let mut pass_sums = vec![0u128; seq.passes()];
    let mut oracle = OracleSummary::default();
    for o in &outcomes {
        let t = u128::from(o.total());
        sum += t;
        sum_sq += t * t;
        for (acc, &v) in pass_sums.iter_mut().zip(&o.per_pass) {
            *acc += u128::from(v);
        }
        if check {
            oracle.passes_checked += o.per_pass.len() as u64;
            oracle.pass_sum_mismatches += o.oracle_mismatches() as u64;
            oracle.unsorted_runs += u64::from(!o.sorted);
        }
    }
    let count = trials as f64;
    let mean_t = sum as f64 / count;
    let var_t = if trials > 1 {
        let numerator = u128::from(trials) * sum_sq - sum * sum;
        numerator as f64 / (count * (count - 1.0))
    } else {
        0.0
    };
    let lb_value = lower_bound(seq);
    let sample = config.retain_trace.then(|| {
        let input = match config.mode {
            McMode::Sampled => trial_permutation(n, config.seed, 0).expect("n >= 1"),
            McMode::Exhaustive => Permutation::identity(n),
        };
        let trace = shellsort_with_snapshots(&input, seq);
        let diagnostics = ak_stats(&trace.moves, seq);
        TraceSample {
            input,
            trace,
            diagnostics,
        }
    });

    Ok(ExperimentRecord {
        family,
        n,
        increments: seq.increments().to_vec(),
        trials,
        seed: config.seed.0,
        mode: config.mode,
        mean_t,
        var_t,
        per_pass_means: pass_sums.iter().map(|&s| s as f64 / count).collect(),
        lb_value,
        lb_ratio: mean_t / lb_value,
        oracle: check.then_some(oracle),
        notes: family.note().map(str::to_owned).into_iter().collect(),
        sample,
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::increments::validate;
    use crate::perm::inversion_count;
    use crate::sorter::shellsort;

    fn strip(mut r: ExperimentRecord) -> ExperimentRecord {
        r.timestamp = 0;
        r
    }

    #[test]
    fn exhaustive_single_pass_mean() {
        let seq = validate(&[1], 3).unwrap();
        let r = mc_run(Family::Custom, &seq, &McConfig::exhaustive()).unwrap();
        assert_eq!(r.trials, 6);
        assert_eq!(r.mean_t, 1.5);
        for n in 4..=7 {
            let seq = validate(&[1], n).unwrap();
            let r = mc_run(Family::Custom, &seq, &McConfig::exhaustive()).unwrap();
            assert_eq!(r.mean_t, (n * (n - 1)) as f64 / 4.0);
        }
    }

    #[test]
    fn exhaustive_mean_matches_direct_enumeration() {
        for (h, n) in [(vec![2, 1], 5), (vec![4, 2, 1], 7), (vec![3, 1], 6)] {
            let seq = validate(&h, n).unwrap();
            let all: Vec<_> = enumerate_permutations(n).unwrap().collect();
            let totals: Vec<f64> = all
                .iter()
                .map(|p| shellsort(p, &seq).total() as f64)
                .collect();
            let mean = totals.iter().sum::<f64>() / totals.len() as f64;
            let var =
                totals.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (totals.len() - 1) as f64;
            let r = mc_run(Family::Custom, &seq, &McConfig::exhaustive().checked()).unwrap();
            assert!((r.mean_t - mean).abs() < 1e-12);
            assert!((r.var_t - var).abs() < 1e-9 * var.max(1.0));
            assert_eq!(r.oracle.unwrap().pass_sum_mismatches, 0);
        }
    }

    #[test]
    fn sampled_runs_are_reproducible() {
        let config = McConfig::sampled(1, 42);
        let a = strip(mc_estimate(Family::Hibbard, 300, &config).unwrap());
        let b = strip(mc_estimate(Family::Hibbard, 300, &config).unwrap());
        assert_eq!(a, b);

        let config = McConfig::sampled(40, 9).checked();
        let a = strip(mc_estimate(Family::Knuth2, 2000, &config).unwrap());
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = strip(
            pool.install(|| mc_estimate(Family::Knuth2, 2000, &config))
                .unwrap(),
        );
        assert_eq!(a, b);
        let oracle = a.oracle.unwrap();
        assert_eq!(oracle.passes_checked, 80);
        assert_eq!((oracle.pass_sum_mismatches, oracle.unsorted_runs), (0, 0));
    }

    #[test]
    fn record_invariants() {
        let r = mc_estimate(Family::Pratt2i3j, 512, &McConfig::sampled(12, 3)).unwrap();
        let pass_sum: f64 = r.per_pass_means.iter().sum();
        assert!((pass_sum - r.mean_t).abs() <= 1e-6 * r.mean_t);
        assert_eq!(
            r.lb_value,
            lower_bound(&generate(Family::Pratt2i3j, 512).unwrap())
        );
        assert!(r.mean_t >= 0.0 && r.var_t >= 0.0);
        assert!(r.notes.is_empty());
    }

    #[test]
    fn single_pass_sample_equals_inversion_mean() {
        let seq = validate(&[1], 64).unwrap();
        let r = mc_run(Family::Custom, &seq, &McConfig::sampled(10, 5)).unwrap();
        let direct: u64 = (0..10)
            .map(|i| inversion_count(&trial_permutation(64, Seed(5), i).unwrap()))
            .sum();
        assert_eq!(r.mean_t, direct as f64 / 10.0);
    }

    #[test]
    fn retained_trace_is_trial_zero() {
        let config = McConfig::sampled(3, 11).retaining_trace();
        let r = mc_estimate(Family::Shell, 50, &config).unwrap();
        let sample = r.sample.unwrap();
        assert_eq!(sample.input, trial_permutation(50, Seed(11), 0).unwrap());
        assert_eq!(
            sample.trace.snapshots.as_ref().unwrap().len(),
            r.increments.len() + 1
        );
        assert_eq!(sample.diagnostics.len(), r.increments.len());
        assert!(mc_estimate(Family::Shell, 50, &McConfig::sampled(3, 11))
            .unwrap()
            .sample
            .is_none());
    }

    #[test]
    fn errors() {
        assert_eq!(
            mc_estimate(Family::Shell, 100, &McConfig::sampled(0, 1)),
            Err(McError::ZeroTrials)
        );
        assert_eq!(
            mc_estimate(Family::Shell, 11, &McConfig::exhaustive()),
            Err(McError::ExhaustiveTooLarge(11))
        );
        assert!(matches!(
            mc_estimate(Family::Knuth2, 5, &McConfig::sampled(1, 1)),
            Err(McError::Sequence(_))
        ));
    }

    #[test]
    fn papernov_records_carry_a_note() {
        let r = mc_estimate(Family::PapernovStasevich, 64, &McConfig::sampled(2, 1)).unwrap();
        assert_eq!(r.notes.len(), 1);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"family\":\"papernov_stasevich\""));
        let back: ExperimentRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
