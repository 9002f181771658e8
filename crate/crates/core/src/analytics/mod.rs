//! Average-case lower-bound formula, Monte Carlo estimation, scaling fits
//! and per-pass diagnostics.

mod ak;
mod fit;
mod montecarlo;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::ToPrimitive;
use serde::{Deserialize, Serialize};

pub use self::ak::{ak_stats, PassDiagnostics};
pub use self::fit::{fit_exponent, FitError, FitResult, MIN_FIT_POINTS, MIN_FIT_SPAN};
pub use self::montecarlo::{
    mc_estimate, mc_run, ExperimentRecord, McConfig, McError, McMode, OracleSummary, TraceSample,
    MAX_EXHAUSTIVE_N,
};

use crate::increments::{Family, IncrementSequence};

/// `n * sum_k h_{k-1} / h_k` with `h_0 = n`, exactly.
pub fn lower_bound_exact(seq: &IncrementSequence) -> BigRational {
    let n = BigInt::from(seq.n());
    let sum = (1..=seq.passes())
        .map(|k| {
            BigRational::new(
                BigInt::from(seq.increment(k - 1)),
                BigInt::from(seq.increment(k)),
            )
        })
        .fold(BigRational::from_integer(0.into()), |acc, r| acc + r);
    sum * BigRational::from_integer(n)
}

pub fn lower_bound(seq: &IncrementSequence) -> f64 {
    lower_bound_exact(seq).to_f64().expect("finite lower bound")
}

/// Growth law predicted for a family's average number of inversions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum TheoryTarget {
    /// `n^(num/den)`
    Power { num: u32, den: u32 },
    /// `n (log n)^power`
    NLog { power: u32 },
}

impl TheoryTarget {
    pub fn for_family(family: Family) -> Option<TheoryTarget> {
        Some(match family {
            Family::Knuth2 => TheoryTarget::Power { num: 5, den: 3 },
            Family::Jk3 => TheoryTarget::Power { num: 23, den: 15 },
            Family::Jk3Conjecture => TheoryTarget::Power { num: 3, den: 2 },
            Family::Shell | Family::PapernovStasevich | Family::Hibbard | Family::PrattLog3 => {
                TheoryTarget::NLog { power: 1 }
            }
            Family::Pratt2i3j => TheoryTarget::NLog { power: 2 },
            Family::Custom => return None,
        })
    }

    /// Exponent of `n` for power laws.
    pub fn exponent(self) -> Option<f64> {
        match self {
            TheoryTarget::Power { num, den } => Some(f64::from(num) / f64::from(den)),
            TheoryTarget::NLog { .. } => None,
        }
    }

    /// The target's scale at `n`, `log2` for polylog forms.
    pub fn scale(self, n: f64) -> f64 {
        match self {
            TheoryTarget::Power { num, den } => n.powf(f64::from(num) / f64::from(den)),
            TheoryTarget::NLog { power } => n * n.log2().powi(power as i32),
        }
    }

    pub fn label(self) -> String {
        match self {
            TheoryTarget::Power { num, den } => format!("n^{num}/{den}"),
            TheoryTarget::NLog { power: 1 } => "n log n".to_owned(),
            TheoryTarget::NLog { power } => format!("n log^{power} n"),
        }
    }
}
