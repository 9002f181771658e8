//! Increment-sequence families and validation.

use std::fmt;
use std::str::FromStr;

use num::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest list size any named family is generated for.
pub const MIN_FAMILY_N: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("increment sequence is empty")]
    Empty,
    #[error("increment at index {index} is zero")]
    Zero { index: usize },
    #[error("increments are not strictly decreasing at index {index} ({prev} then {next})")]
    NotDecreasing {
        index: usize,
        prev: usize,
        next: usize,
    },
    #[error("last increment is {last}, must be 1")]
    LastNotOne { last: usize },
    #[error("first increment {first} must be below n = {n}")]
    FirstNotBelowN { first: usize, n: usize },
    #[error("n = {n} is below the minimum {min} for generated families")]
    TooSmall { n: usize, min: usize },
    #[error("family {family} is infeasible at n = {n}: {reason}")]
    Infeasible {
        family: Family,
        n: usize,
        reason: String,
    },
    #[error("the custom family needs explicit increments")]
    CustomNeedsIncrements,
    #[error("unknown sequence family `{0}`")]
    UnknownFamily(String),
}

/// A named rule producing an increment sequence from `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `floor(n/2), floor(n/4), ..., 1`
    Shell,
    /// `floor(n/2^k) + 1` for `k = 1..=floor(log2 n)`, then a closing 1.
    PapernovStasevich,
    /// `2^k - 1` below `n`.
    Hibbard,
    /// `(3^k - 1)/2` below `n`.
    PrattLog3,
    /// Every `2^i 3^j` below `floor(n/2)`.
    #[serde(rename = "pratt_2i3j")]
    Pratt2i3j,
    /// Two passes, `h_1 ~ n^(1/3)`.
    Knuth2,
    /// Three passes, `h_1 ~ n^(7/15)`, `h_2 ~ n^(1/5)`, `gcd(h_1, h_2) = 1`.
    Jk3,
    /// Three passes, `h_1 ~ n^(1/2)`, `h_2 ~ n^(1/4)`.
    Jk3Conjecture,
    Custom,
}

impl Family {
    /// Every family with a generation rule, i.e. all but `Custom`.
    pub const GENERATED: [Family; 8] = [
        Family::Shell,
        Family::PapernovStasevich,
        Family::Hibbard,
        Family::PrattLog3,
        Family::Pratt2i3j,
        Family::Knuth2,
        Family::Jk3,
        Family::Jk3Conjecture,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Family::Shell => "shell",
            Family::PapernovStasevich => "papernov_stasevich",
            Family::Hibbard => "hibbard",
            Family::PrattLog3 => "pratt_log3",
            Family::Pratt2i3j => "pratt_2i3j",
            Family::Knuth2 => "knuth2",
            Family::Jk3 => "jk3",
            Family::Jk3Conjecture => "jk3_conjecture",
            Family::Custom => "custom",
        }
    }

    /// Caveat attached to reports for families whose generation rule needed
    /// an adjustment.
    pub fn note(self) -> Option<&'static str> {
        match self {
            Family::PapernovStasevich => {
                Some("papernov_stasevich: closing term is 2, a final 1-pass was appended")
            }
            _ => None,
        }
    }

    /// Target exponents of the real-exponent families, `(h_1, h_2, ...)`
    /// excluding the final 1.
    pub fn increment_exponents(self) -> Option<&'static [f64]> {
        match self {
            Family::Knuth2 => Some(&[1.0 / 3.0]),
            Family::Jk3 => Some(&[7.0 / 15.0, 1.0 / 5.0]),
            Family::Jk3Conjecture => Some(&[1.0 / 2.0, 1.0 / 4.0]),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Family {
    type Err = SequenceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::GENERATED
            .iter()
            .chain(std::iter::once(&Family::Custom))
            .copied()
            .find(|f| f.tag() == s)
            .ok_or_else(|| SequenceError::UnknownFamily(s.to_owned()))
    }
}

/// Strictly decreasing increments `h_1 > ... > h_p = 1` for a list of `n`
/// keys, with `h_1 < n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSequence", into = "RawSequence")]
pub struct IncrementSequence {
    n: usize,
    h: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    n: usize,
    h: Vec<usize>,
}

impl TryFrom<RawSequence> for IncrementSequence {
    type Error = SequenceError;

    fn try_from(raw: RawSequence) -> Result<Self, Self::Error> {
        validate(&raw.h, raw.n)
    }
}

impl From<IncrementSequence> for RawSequence {
    fn from(s: IncrementSequence) -> Self {
        RawSequence { n: s.n, h: s.h }
    }
}

impl IncrementSequence {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn increments(&self) -> &[usize] {
        &self.h
    }

    /// Number of passes `p`.
    pub fn passes(&self) -> usize {
        self.h.len()
    }

    /// Increment of 1-indexed pass `k`; `increment(0)` is `n`.
    pub fn increment(&self, k: usize) -> usize {
        if k == 0 {
            self.n
        } else {
            self.h[k - 1]
        }
    }
}

impl fmt::Display for IncrementSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, h) in self.h.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        f.write_str(")")
    }
}

pub fn validate(h: &[usize], n: usize) -> Result<IncrementSequence, SequenceError> {
    if h.is_empty() {
        return Err(SequenceError::Empty);
    }
    if let Some(index) = h.iter().position(|&x| x == 0) {
        return Err(SequenceError::Zero { index });
    }
    if let Some(i) = h.windows(2).position(|w| w[0] <= w[1]) {
        return Err(SequenceError::NotDecreasing {
            index: i + 1,
            prev: h[i],
            next: h[i + 1],
        });
    }
    let last = *h.last().unwrap();
    if last != 1 {
        return Err(SequenceError::LastNotOne { last });
    }
    if h[0] >= n {
        return Err(SequenceError::FirstNotBelowN { first: h[0], n });
    }
    Ok(IncrementSequence { n, h: h.to_vec() })
}

/// Parse comma-separated increments such as `"4,2,1"`.
pub fn parse_increments(s: &str) -> Result<Vec<usize>, std::num::ParseIntError> {
    s.split(',').map(|part| part.trim().parse()).collect()
}

pub fn generate(family: Family, n: usize) -> Result<IncrementSequence, SequenceError> {
    if family == Family::Custom {
        return Err(SequenceError::CustomNeedsIncrements);
    }
    if n < MIN_FAMILY_N {
        return Err(SequenceError::TooSmall {
            n,
            min: MIN_FAMILY_N,
        });
    }
    let h = match family {
        Family::Shell => shell(n),
        Family::PapernovStasevich => papernov_stasevich(n),
        Family::Hibbard => hibbard(n),
        Family::PrattLog3 => pratt_log3(n),
        Family::Pratt2i3j => pratt_2i3j(n),
        Family::Knuth2 => knuth2(n)?,
        Family::Jk3 => jk3(n)?,
        Family::Jk3Conjecture => jk3_conjecture(n)?,
        Family::Custom => unreachable!(),
    };
    validate(&h, n)
}

fn shell(n: usize) -> Vec<usize> {
    let mut h = Vec::new();
    let mut gap = n / 2;
    while gap >= 1 {
        h.push(gap);
        gap /= 2;
    }
    h
}

fn papernov_stasevich(n: usize) -> Vec<usize> {
    let passes = n.ilog2();
    let mut h: Vec<usize> = (1..=passes).map(|k| (n >> k) + 1).collect();
    if h.last().is_some_and(|&last| last > 1) {
        h.push(1);
    }
    h
}

fn hibbard(n: usize) -> Vec<usize> {
    let mut h: Vec<usize> = (1..usize::BITS)
        .map(|k| (1usize << k) - 1)
        .take_while(|&x| x < n)
        .collect();
    h.reverse();
    h
}

fn pratt_log3(n: usize) -> Vec<usize> {
    let mut h = Vec::new();
    let mut power = 3usize;
    loop {
        let x = (power - 1) / 2;
        if x >= n {
            break;
        }
        h.push(x);
        power *= 3;
    }
    h.reverse();
    h
}

fn pratt_2i3j(n: usize) -> Vec<usize> {
    let limit = n / 2;
    let mut h = Vec::new();
    let mut two = 1usize;
    while two < limit {
        let mut x = two;
        while x < limit {
            h.push(x);
            x *= 3;
        }
        two *= 2;
    }
    h.sort_unstable_by(|a, b| b.cmp(a));
    h
}

fn rounded_power(n: usize, exponent: f64) -> usize {
    ((n as f64).powf(exponent).round() as usize).max(2)
}

fn knuth2(n: usize) -> Result<Vec<usize>, SequenceError> {
    let root = (n as f64).cbrt();
    if root.floor() < 2.0 {
        return Err(SequenceError::Infeasible {
            family: Family::Knuth2,
            n,
            reason: "floor(n^(1/3)) < 2".into(),
        });
    }
    Ok(vec![(root.round() as usize).max(2), 1])
}

fn three_pass(family: Family, n: usize, e1: f64, e2: f64) -> Result<(usize, usize), SequenceError> {
    let h1 = rounded_power(n, e1);
    let h2 = rounded_power(n, e2);
    if h1 <= h2 {
        return Err(SequenceError::Infeasible {
            family,
            n,
            reason: format!("rounded increments h1 = {h1}, h2 = {h2} do not decrease"),
        });
    }
    Ok((h1, h2))
}

fn jk3(n: usize) -> Result<Vec<usize>, SequenceError> {
    let (mut h1, h2) = three_pass(Family::Jk3, n, 7.0 / 15.0, 1.0 / 5.0)?;
    // h2 + 1 is always coprime to h2, so this terminates above h2.
    while h1.gcd(&h2) > 1 {
        h1 -= 1;
    }
    Ok(vec![h1, h2, 1])
}

fn jk3_conjecture(n: usize) -> Result<Vec<usize>, SequenceError> {
    let (h1, h2) = three_pass(Family::Jk3Conjecture, n, 0.5, 0.25)?;
    Ok(vec![h1, h2, 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(family: Family, n: usize) -> Vec<usize> {
        generate(family, n).unwrap().increments().to_vec()
    }

    #[test]
    fn family_examples() {
        assert_eq!(gen(Family::Shell, 16), [8, 4, 2, 1]);
        assert_eq!(gen(Family::Hibbard, 100), [63, 31, 15, 7, 3, 1]);
        assert_eq!(gen(Family::PrattLog3, 30), [13, 4, 1]);
        assert_eq!(gen(Family::Pratt2i3j, 20), [9, 8, 6, 4, 3, 2, 1]);
        assert_eq!(gen(Family::Knuth2, 1000), [10, 1]);
    }

    #[test]
    fn papernov_stasevich_gets_a_closing_pass() {
        assert_eq!(gen(Family::PapernovStasevich, 16), [9, 5, 3, 2, 1]);
        assert_eq!(
            gen(Family::PapernovStasevich, 100),
            [51, 26, 13, 7, 4, 2, 1]
        );
        assert_eq!(gen(Family::PapernovStasevich, 4), [3, 2, 1]);
    }

    #[test]
    fn boundaries_are_strict() {
        // 2^7 - 1 = 127 = n - 1 is included, 2^7 - 1 = n is not.
        assert_eq!(gen(Family::Hibbard, 128)[0], 127);
        assert_eq!(gen(Family::Hibbard, 127)[0], 63);
        assert_eq!(gen(Family::PrattLog3, 13), [4, 1]);
        assert_eq!(gen(Family::PrattLog3, 14), [13, 4, 1]);
        assert_eq!(gen(Family::Pratt2i3j, 4), [1]);
        assert_eq!(gen(Family::Shell, 5), [2, 1]);
    }

    #[test]
    fn jk3_increments_are_coprime() {
        for n in [100, 1000, 4321, 10_000, 100_000, 1_000_000] {
            let h = gen(Family::Jk3, n);
            assert_eq!(h[0].gcd(&h[1]), 1, "n = {n}: {h:?}");
            assert!(h[0] > h[1] && h[1] >= 2);
        }
        // 10^6: round(10^(6*7/15)) = 631, round(10^(6/5)) = 16, already coprime.
        assert_eq!(gen(Family::Jk3, 1_000_000), [631, 16, 1]);
        // 10^4: round(10^(28/15)) = 74, round(10^(4/5)) = 6; 74 -> 73.
        assert_eq!(gen(Family::Jk3, 10_000), [73, 6, 1]);
    }

    #[test]
    fn infeasible_small_sizes() {
        assert!(matches!(
            generate(Family::Knuth2, 7),
            Err(SequenceError::Infeasible {
                family: Family::Knuth2,
                ..
            })
        ));
        assert_eq!(gen(Family::Knuth2, 8), [2, 1]);
        assert!(matches!(
            generate(Family::Jk3Conjecture, 4),
            Err(SequenceError::Infeasible { .. })
        ));
        assert_eq!(
            generate(Family::Shell, 3),
            Err(SequenceError::TooSmall { n: 3, min: 4 })
        );
        assert_eq!(
            generate(Family::Custom, 10),
            Err(SequenceError::CustomNeedsIncrements)
        );
    }

    #[test]
    fn validate_examples() {
        assert_eq!(validate(&[4, 2, 1], 8).unwrap().increments(), [4, 2, 1]);
        assert_eq!(
            validate(&[4, 4, 1], 8),
            Err(SequenceError::NotDecreasing {
                index: 1,
                prev: 4,
                next: 4
            })
        );
        assert_eq!(
            validate(&[4, 2], 8),
            Err(SequenceError::LastNotOne { last: 2 })
        );
        assert_eq!(
            validate(&[8, 1], 8),
            Err(SequenceError::FirstNotBelowN { first: 8, n: 8 })
        );
        assert_eq!(validate(&[], 8), Err(SequenceError::Empty));
        assert_eq!(validate(&[2, 0], 8), Err(SequenceError::Zero { index: 1 }));
    }

    #[test]
    fn every_family_validates_across_a_grid() {
        let mut grid: Vec<usize> = (4..=200).collect();
        grid.extend([
            255, 256, 257, 1000, 1024, 4095, 10_000, 65_536, 100_000, 1_000_000,
        ]);
        for family in Family::GENERATED {
            for &n in &grid {
                match generate(family, n) {
                    Ok(seq) => {
                        assert_eq!(validate(seq.increments(), n).as_ref(), Ok(&seq));
                    }
                    Err(SequenceError::Infeasible { .. }) => assert!(n < 16, "{family} at {n}"),
                    Err(e) => panic!("{family} at {n}: {e}"),
                }
            }
        }
    }

    #[test]
    fn pratt_2i3j_matches_sieve() {
        for n in [4, 5, 20, 97, 1000, 4096, 50_000] {
            let limit = n / 2;
            let sieve: Vec<usize> = (1..limit)
                .rev()
                .filter(|&x| {
                    let mut y = x;
                    while y % 2 == 0 {
                        y /= 2;
                    }
                    while y % 3 == 0 {
                        y /= 3;
                    }
                    y == 1
                })
                .collect();
            assert_eq!(gen(Family::Pratt2i3j, n), sieve, "n = {n}");
        }
    }

    #[test]
    fn real_exponent_families_track_their_targets() {
        for family in [Family::Knuth2, Family::Jk3, Family::Jk3Conjecture] {
            let exps = family.increment_exponents().unwrap();
            for n in [1_000usize, 10_000, 100_000, 1_000_000] {
                let h = gen(family, n);
                for (k, &e) in exps.iter().enumerate() {
                    let ratio = h[k] as f64 / (n as f64).powf(e);
                    assert!((0.5..=2.0).contains(&ratio), "{family} n={n} h={h:?}");
                }
            }
        }
    }

    #[test]
    fn family_tags_round_trip() {
        for family in Family::GENERATED.into_iter().chain([Family::Custom]) {
            assert_eq!(family.tag().parse::<Family>().unwrap(), family);
            let json = serde_json::to_string(&family).unwrap();
            assert_eq!(json, format!("\"{}\"", family.tag()));
        }
        assert!("fibonacci".parse::<Family>().is_err());
    }

    #[test]
    fn sequence_json_is_validated() {
        let seq = generate(Family::Shell, 16).unwrap();
        let json = serde_json::to_string(&seq).unwrap();
        assert_eq!(json, r#"{"n":16,"h":[8,4,2,1]}"#);
        assert!(serde_json::from_str::<IncrementSequence>(r#"{"n":4,"h":[4,1]}"#).is_err());
    }

    #[test]
    fn parse_increment_lists() {
        assert_eq!(parse_increments("4,2,1").unwrap(), [4, 2, 1]);
        assert_eq!(parse_increments(" 7, 3 ,1").unwrap(), [7, 3, 1]);
        assert!(parse_increments("4,,1").is_err());
    }
}
