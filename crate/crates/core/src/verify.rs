//! Exhaustive property suites over small `n`.
//!
//! Each suite walks every permutation (or every radix value) for a set of
//! increment sequences, tallies per-case statistics and keeps the first
//! counterexample in enumeration order.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{decode_trace, encode_trace};
use crate::increments::{generate, validate, Family, IncrementSequence};
use crate::perm::{chain_inversions, enumerate_permutations, log2_factorial, Permutation};
use crate::simple::{
    below_bound, minor_candidate, minor_oracle, mixed_radix_decode, mixed_radix_encode,
    representation_counts, simple_apply, MinorSchedule,
};
use crate::sorter::{run_pass, shellsort};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Sorter,
    Claims,
    Codec,
    Radix,
    All,
}

impl Suite {
    pub const EACH: [Suite; 4] = [Suite::Sorter, Suite::Claims, Suite::Codec, Suite::Radix];

    /// Largest accepted `--max-n`.
    pub fn limit(self) -> usize {
        match self {
            Suite::Sorter | Suite::Codec => 8,
            Suite::Claims | Suite::All => 6,
            Suite::Radix => 10_000,
        }
    }

    pub fn default_max_n(self) -> usize {
        match self {
            Suite::Sorter | Suite::Codec => 7,
            Suite::Claims | Suite::All => 6,
            Suite::Radix => 1000,
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Suite::Sorter => "sorter",
            Suite::Claims => "claims",
            Suite::Codec => "codec",
            Suite::Radix => "radix",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Suite::Sorter,
            Suite::Claims,
            Suite::Codec,
            Suite::Radix,
            Suite::All,
        ]
        .into_iter()
        .find(|suite| suite.tag() == s)
        .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("suite {suite} accepts --max-n up to {limit}, got {max_n}")]
    Guard {
        suite: Suite,
        max_n: usize,
        limit: usize,
    },
}

/// The first failing input of a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub n: usize,
    pub increments: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Permutation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<u64>,
    pub property: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SorterCase {
    pub n: usize,
    pub increments: Vec<usize>,
    pub permutations: u64,
    pub passes_checked: u64,
    pub pass_sum_mismatches: u64,
    pub unsorted: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClaimsCase {
    pub n: usize,
    pub increments: Vec<usize>,
    pub permutations: u64,
    /// Oracle total above the Shellsort total.
    pub dominance_violations: u64,
    /// Oracle total strictly below the Shellsort total.
    pub strict_improvements: u64,
    /// Schedules with a digit not below its bound.
    pub bound_violations: u64,
    /// Oracle schedules that do not sort when replayed.
    pub replay_failures: u64,
    pub candidate_agreements: u64,
    pub candidate_agreement_rate: f64,
    pub max_bound_ratio: f64,
    pub oracle_total: u64,
    pub shellsort_total: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CodecCase {
    pub n: usize,
    pub increments: Vec<usize>,
    pub permutations: u64,
    pub round_trip_failures: u64,
    pub collisions: u64,
    pub mean_bits: f64,
    pub log2_factorial: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RadixCase {
    pub family: String,
    pub sequences: u64,
    pub values_checked: u64,
    pub round_trip_failures: u64,
    pub bound_violations: u64,
    /// Values with more than one in-bound digit vector, counted for
    /// `n <= 512`.
    pub non_unique_values: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SuiteCases {
    Sorter(Vec<SorterCase>),
    Claims(Vec<ClaimsCase>),
    Codec(Vec<CodecCase>),
    Radix(Vec<RadixCase>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub max_n: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    pub cases: SuiteCases,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

pub fn verify(suite: Suite, max_n: usize) -> Result<VerifyReport, VerifyError> {
    if max_n > suite.limit() {
        return Err(VerifyError::Guard {
            suite,
            max_n,
            limit: suite.limit(),
        });
    }
    let suites = match suite {
        Suite::All => Suite::EACH.iter().map(|&s| run_suite(s, max_n)).collect(),
        single => vec![run_suite(single, max_n)],
    };
    Ok(VerifyReport {
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

fn run_suite(suite: Suite, max_n: usize) -> SuiteReport {
    let (cases, counterexample) = match suite {
        Suite::Sorter => {
            let (c, x) = sorter_suite(max_n);
            (SuiteCases::Sorter(c), x)
        }
        Suite::Claims => {
            let (c, x) = claims_suite(max_n);
            (SuiteCases::Claims(c), x)
        }
        Suite::Codec => {
            let (c, x) = codec_suite(max_n);
            (SuiteCases::Codec(c), x)
        }
        Suite::Radix => {
            let (c, x) = radix_suite(max_n);
            (SuiteCases::Radix(c), x)
        }
        Suite::All => unreachable!("expanded by verify"),
    };
    SuiteReport {
        suite,
        max_n,
        passed: counterexample.is_none(),
        counterexample,
        cases,
    }
}

/// Fixed small sequences used across suites.
pub const CLAIM_SEQUENCES: [&[usize]; 3] = [&[2, 1], &[3, 1], &[4, 2, 1]];

/// `(1)`, the fixed sequences and every family that generates at `n`,
/// without duplicates.
pub fn small_sequences(n: usize) -> Vec<IncrementSequence> {
    let mut seen = HashSet::new();
    let fixed = std::iter::once(&[1][..])
        .chain(CLAIM_SEQUENCES)
        .filter_map(|h| validate(h, n).ok());
    let families = Family::GENERATED
        .into_iter()
        .filter_map(|f| generate(f, n).ok());
    fixed
        .chain(families)
        .filter(|s| seen.insert(s.increments().to_vec()))
        .collect()
}

fn counterexample(
    p: &Permutation,
    seq: &IncrementSequence,
    property: &str,
    detail: String,
) -> Counterexample {
    Counterexample {
        n: seq.n(),
        increments: seq.increments().to_vec(),
        permutation: Some(p.clone()),
        value: None,
        property: property.to_owned(),
        detail,
    }
}

fn all_permutations(n: usize) -> Vec<Permutation> {
    enumerate_permutations(n).expect("guarded n").collect()
}

fn sorter_suite(max_n: usize) -> (Vec<SorterCase>, Option<Counterexample>) {
    let mut cases = Vec::new();
    let mut first = None;
    for n in 1..=max_n {
        let perms = all_permutations(n);
        for seq in small_sequences(n) {
            let results: Vec<(u64, u64, Option<String>)> = perms
                .par_iter()
                .map(|p| {
                    let mut current = p.clone();
                    let (mut mismatches, mut problem) = (0, None);
                    for (k, &h) in seq.increments().iter().enumerate() {
                        let expected = chain_inversions(&current, h);
                        let outcome = run_pass(&current, h);
                        let got: u64 = outcome.moves.iter().map(|&m| u64::from(m)).sum();
                        if got != expected {
                            mismatches += 1;
                            problem.get_or_insert(format!(
                                "pass {}: moved {got}, chain inversions {expected}",
                                k + 1
                            ));
                        }
                        current = outcome.output;
                    }
                    let unsorted = u64::from(!current.is_identity());
                    if unsorted == 1 {
                        problem.get_or_insert(format!("output {current} is not sorted"));
                    }
                    (mismatches, unsorted, problem)
                })
                .collect();
            let mut case = SorterCase {
                n,
                increments: seq.increments().to_vec(),
                permutations: perms.len() as u64,
                passes_checked: (perms.len() * seq.passes()) as u64,
                ..SorterCase::default()
            };
            for (p, (mismatches, unsorted, problem)) in perms.iter().zip(results) {
                case.pass_sum_mismatches += mismatches;
                case.unsorted += unsorted;
                if let (None, Some(detail)) = (&first, problem) {
                    first = Some(counterexample(
                        p,
                        &seq,
                        "pass sum equals chain inversions",
                        detail,
                    ));
                }
            }
            cases.push(case);
        }
    }
    (cases, first)
}

struct ClaimCheck {
    oracle: MinorSchedule,
    shellsort_total: u64,
    replay_ok: bool,
    candidate_agrees: bool,
}

fn claims_suite(max_n: usize) -> (Vec<ClaimsCase>, Option<Counterexample>) {
    let mut cases = Vec::new();
    let mut first = None;
    for n in 3..=max_n {
        let perms = all_permutations(n);
        for seq in CLAIM_SEQUENCES.iter().filter_map(|h| validate(h, n).ok()) {
            let checks: Vec<ClaimCheck> = perms
                .par_iter()
                .map(|p| {
                    let oracle = minor_oracle(p, &seq).expect("within oracle limits");
                    let replay_ok = simple_apply(p, &seq, &oracle).is_ok_and(|q| q.is_identity());
                    ClaimCheck {
                        shellsort_total: shellsort(p, &seq).total(),
                        replay_ok,
                        candidate_agrees: minor_candidate(p, &seq).digits == oracle.digits,
                        oracle,
                    }
                })
                .collect();
            let mut case = ClaimsCase {
                n,
                increments: seq.increments().to_vec(),
                permutations: perms.len() as u64,
                ..ClaimsCase::default()
            };
            for (p, c) in perms.iter().zip(&checks) {
                let t_minor = c.oracle.total();
                case.oracle_total += t_minor;
                case.shellsort_total += c.shellsort_total;
                case.strict_improvements += u64::from(t_minor < c.shellsort_total);
                case.candidate_agreements += u64::from(c.candidate_agrees);
                case.max_bound_ratio = case.max_bound_ratio.max(c.oracle.max_bound_ratio());
                let mut problem = None;
                if t_minor > c.shellsort_total {
                    case.dominance_violations += 1;
                    problem = Some((
                        "minor total at most Shellsort total",
                        format!(
                            "minor total {t_minor} > Shellsort total {}",
                            c.shellsort_total
                        ),
                    ));
                }
                if !c.replay_ok {
                    case.replay_failures += 1;
                    problem.get_or_insert((
                        "minor schedule sorts",
                        "replaying the schedule does not sort".to_owned(),
                    ));
                }
                if let Some((key, pass, digit)) = c.oracle.first_bound_violation() {
                    case.bound_violations += 1;
                    problem.get_or_insert((
                        "minor digits below h_(k-1)/h_k",
                        format!(
                            "key {key} moves {digit} in pass {pass}, bound {}/{}; rows by key {:?}",
                            seq.increment(pass - 1),
                            seq.increment(pass),
                            (1..=n as u32)
                                .map(|i| c.oracle.digits.row(i))
                                .collect::<Vec<_>>()
                        ),
                    ));
                }
                if let (None, Some((property, detail))) = (&first, problem) {
                    first = Some(counterexample(p, &seq, property, detail));
                }
            }
            case.candidate_agreement_rate = case.candidate_agreements as f64 / perms.len() as f64;
            cases.push(case);
        }
    }
    (cases, first)
}

fn codec_suite(max_n: usize) -> (Vec<CodecCase>, Option<Counterexample>) {
    let mut cases = Vec::new();
    let mut first = None;
    for n in 1..=max_n {
        let perms = all_permutations(n);
        for seq in small_sequences(n) {
            let coded: Vec<_> = perms
                .par_iter()
                .map(|p| {
                    let d = encode_trace(&shellsort(p, &seq));
                    let back = decode_trace(&d);
                    (d.bits, back)
                })
                .collect();
            let mut case = CodecCase {
                n,
                increments: seq.increments().to_vec(),
                permutations: perms.len() as u64,
                log2_factorial: log2_factorial(n),
                ..CodecCase::default()
            };
            let mut seen = HashSet::with_capacity(perms.len());
            let mut total_bits = 0u64;
            for (p, (bits, back)) in perms.iter().zip(coded) {
                total_bits += bits.len() as u64;
                let mut problem = None;
                match back {
                    Ok(q) if q == *p => {}
                    Ok(q) => {
                        case.round_trip_failures += 1;
                        problem = Some(format!("decoded to {q}"));
                    }
                    Err(e) => {
                        case.round_trip_failures += 1;
                        problem = Some(format!("decode failed: {e}"));
                    }
                }
                if !seen.insert(bits) {
                    case.collisions += 1;
                    problem.get_or_insert("descriptor shared with an earlier permutation".into());
                }
                if let (None, Some(detail)) = (&first, problem) {
                    first = Some(counterexample(p, &seq, "codec round trip", detail));
                }
            }
            case.mean_bits = total_bits as f64 / perms.len() as f64;
            if first.is_none() && case.mean_bits + 1e-9 < case.log2_factorial {
                first = Some(Counterexample {
                    n,
                    increments: seq.increments().to_vec(),
                    permutation: None,
                    value: None,
                    property: "mean descriptor length at least log2 n!".into(),
                    detail: format!("mean {} < {}", case.mean_bits, case.log2_factorial),
                });
            }
            cases.push(case);
        }
    }
    (cases, first)
}

/// Sizes up to which the suite also counts values with several in-bound
/// representations.
const NON_UNIQUE_SCAN_N: usize = 512;

/// Round trip and digit bounds of `mixed_radix_encode` on `0..n`. An exact
/// round trip makes the encoding injective. Returns the first failing value.
fn radix_check(seq: &IncrementSequence, case: &mut RadixCase) -> Option<(u64, String)> {
    let n = seq.n() as u64;
    let mut first = None;
    for d in 0..n {
        case.values_checked += 1;
        let digits = match mixed_radix_encode(d, seq) {
            Ok(r) => r,
            Err(e) => {
                case.round_trip_failures += 1;
                first.get_or_insert((d, format!("encode failed: {e}")));
                continue;
            }
        };
        if mixed_radix_decode(&digits) != Ok(d) {
            case.round_trip_failures += 1;
            first.get_or_insert((
                d,
                format!("digits {:?} do not decode to {d}", digits.digits),
            ));
        }
        let in_bounds = digits
            .digits
            .iter()
            .enumerate()
            .all(|(k, &x)| below_bound(x, digits.radices[k], digits.radices[k + 1]));
        if !in_bounds {
            case.bound_violations += 1;
            first.get_or_insert((d, format!("digits {:?} exceed their bounds", digits.digits)));
        }
    }
    if seq.n() <= NON_UNIQUE_SCAN_N {
        case.non_unique_values += representation_counts(seq)
            .iter()
            .filter(|&&c| c > 1)
            .count() as u64;
    }
    first
}

fn radix_suite(max_n: usize) -> (Vec<RadixCase>, Option<Counterexample>) {
    let mut labels: Vec<(String, Option<Family>)> = Family::GENERATED
        .iter()
        .map(|&f| (f.tag().to_owned(), Some(f)))
        .collect();
    labels.push(("custom".to_owned(), None));
    let results: Vec<(RadixCase, Option<Counterexample>)> = labels
        .into_par_iter()
        .map(|(label, family)| {
            let mut case = RadixCase {
                family: label,
                ..RadixCase::default()
            };
            let mut first = None;
            for n in 2..=max_n {
                let seqs: Vec<IncrementSequence> = match family {
                    Some(f) => generate(f, n).ok().into_iter().collect(),
                    None => CLAIM_SEQUENCES
                        .iter()
                        .filter_map(|h| validate(h, n).ok())
                        .collect(),
                };
                for seq in seqs {
                    case.sequences += 1;
                    if let Some((d, detail)) = radix_check(&seq, &mut case) {
                        first.get_or_insert(Counterexample {
                            n,
                            increments: seq.increments().to_vec(),
                            permutation: None,
                            value: Some(d),
                            property: "mixed radix round trip".into(),
                            detail,
                        });
                    }
                }
            }
            (case, first)
        })
        .collect();
    let first = results.iter().find_map(|(_, x)| x.clone());
    (results.into_iter().map(|(c, _)| c).collect(), first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guards() {
        assert_eq!(
            verify(Suite::Claims, 11),
            Err(VerifyError::Guard {
                suite: Suite::Claims,
                max_n: 11,
                limit: 6
            })
        );
        assert!(verify(Suite::Codec, 9).is_err());
        assert!(verify(Suite::All, 7).is_err());
        assert_eq!("codec".parse::<Suite>(), Ok(Suite::Codec));
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn sorter_codec_and_radix_pass() {
        for suite in [Suite::Sorter, Suite::Codec, Suite::Radix] {
            let report = verify(suite, 6).unwrap();
            assert!(report.passed, "{}", serde_json::to_string(&report).unwrap());
        }
    }

    #[test]
    fn codec_cases_meet_the_entropy_floor() {
        let report = verify(Suite::Codec, 5).unwrap();
        let SuiteCases::Codec(cases) = &report.suites[0].cases else {
            panic!()
        };
        assert!(cases.iter().all(|c| c.mean_bits >= c.log2_factorial));
        let five = cases
            .iter()
            .find(|c| c.n == 5 && c.increments == [2, 1])
            .unwrap();
        assert_eq!(five.permutations, 120);
        assert_eq!(five.collisions, 0);
    }

    #[test]
    fn claims_report_the_first_digit_bound_failure() {
        let report = verify(Suite::Claims, 4).unwrap();
        let suite = &report.suites[0];
        let SuiteCases::Claims(cases) = &suite.cases else {
            panic!()
        };
        assert_eq!(cases.len(), 3);
        assert!(cases
            .iter()
            .all(|c| c.dominance_violations == 0 && c.replay_failures == 0));
        // [2,3,1] under (2,1): moving key 1 once per pass and twice in the
        // last pass tie at total 2, and the tie-break picks the latter
        let x = suite.counterexample.as_ref().unwrap();
        assert_eq!(x.permutation.as_ref().unwrap().keys(), [2, 3, 1]);
        assert_eq!(x.increments, [2, 1]);
        assert!(!report.passed);
    }

    #[test]
    fn small_sequences_are_distinct_and_valid() {
        let seqs = small_sequences(8);
        let set: HashSet<_> = seqs.iter().map(|s| s.increments().to_vec()).collect();
        assert_eq!(set.len(), seqs.len());
        assert!(set.contains(&vec![1]) && set.contains(&vec![4, 2, 1]));
        assert_eq!(small_sequences(2).len(), 1);
    }
}
