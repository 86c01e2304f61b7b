//! Eigenvalue candidates and the continuous and measurable eigenvalue tests.
//!
//! Every test returns a [`Verdict`] holding the per-level series it looked at.
//! A pass is only claimed up to the audited depth, with a tail bound when the
//! diagram family has one registered.

mod candidates;
mod continuous;
mod geometric;
mod measurable;
mod rho;

use std::fmt::Write as _;

use serde::Serialize;

use crate::arith::{decimal_down, decimal_up, rat, ser_rat, Rat, RealEnclosure};
use crate::diagram::ProperReport;

pub use candidates::{enumerate_candidates, identify_affine, Candidate, CandidateOptions};
pub use continuous::{
    continuous_terms, rational_shortcut, sturmian_tail_bound, test_continuous,
};
pub use geometric::{geometric_cluster, ClusterResult};
pub use measurable::{delta_grid, test_measurable, DeltaEntry, Grid, MeasurableReport};
pub use rho::{estimate_rho, test_exact_rank_series, LambdaEntry, Residual, RhoEstimate};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Outcome {
    PassUpToDepth {
        depth: usize,
        /// Certified bound on the remaining series, when one is registered.
        tail_bound: Option<String>,
    },
    FailAtDepth {
        level: usize,
        witness: RealEnclosure,
    },
    Inconclusive {
        depth: usize,
        note: String,
    },
}

impl Outcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, Outcome::PassUpToDepth { .. })
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Outcome::FailAtDepth { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Outcome::PassUpToDepth { .. } => "PassUpToDepth",
            Outcome::FailAtDepth { .. } => "FailAtDepth",
            Outcome::Inconclusive { .. } => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub level: usize,
    pub value: RealEnclosure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Thresholds {
    /// A term counts as divergence evidence when its lower bound reaches this.
    #[serde(serialize_with = "ser_rat")]
    pub theta_div: Rat,
    /// Number of such terms needed for a failure.
    pub witnesses: usize,
    /// Terms below this level are ignored by the failure rule.
    pub burn_in: usize,
    /// Pass tolerance for row statistics (measurable test).
    #[serde(serialize_with = "ser_rat")]
    pub tolerance: Rat,
}

impl Thresholds {
    /// `theta_div = 0.1`, `K = 3`, burn-in 1.
    pub fn continuous() -> Self {
        Thresholds {
            theta_div: rat(1, 10),
            witnesses: 3,
            burn_in: 1,
            tolerance: rat(1, 20),
        }
    }

    /// Terms are squared distances, so the threshold is `0.1^2`.
    pub fn exact_rank() -> Self {
        Thresholds {
            theta_div: rat(1, 100),
            ..Self::continuous()
        }
    }

    /// Rows failing at `0.2`, passing below `0.05`.
    pub fn measurable() -> Self {
        Thresholds {
            theta_div: rat(1, 5),
            witnesses: 1,
            burn_in: 1,
            tolerance: rat(1, 20),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub test: String,
    pub alpha: String,
    pub depth: usize,
    pub outcome: Outcome,
    pub series: Vec<Term>,
    pub thresholds: Thresholds,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub properness: Option<ProperReport>,
}

impl Verdict {
    /// `n, term_lo, term_hi` rows with 20-digit outward decimals.
    pub fn series_csv(&self) -> String {
        let mut out = String::from("n,term_lo,term_hi\n");
        for t in &self.series {
            let _ = writeln!(
                out,
                "{},{},{}",
                t.level,
                decimal_down(t.value.lo(), 20),
                decimal_up(t.value.hi(), 20)
            );
        }
        out
    }

    pub fn term(&self, level: usize) -> Option<&RealEnclosure> {
        self.series.iter().find(|t| t.level == level).map(|t| &t.value)
    }
}

/// Levels at or beyond the burn-in whose term is certainly at least `theta`.
pub(crate) fn divergence_witnesses<'a>(series: &'a [Term], th: &Thresholds) -> Vec<&'a Term> {
    series
        .iter()
        .filter(|t| t.level >= th.burn_in && t.value.lo() >= &th.theta_div)
        .collect()
}

/// Failure outcome when at least `K` witnesses exist.
pub(crate) fn failure(series: &[Term], th: &Thresholds) -> Option<Outcome> {
    let w = divergence_witnesses(series, th);
    if w.len() >= th.witnesses && th.witnesses > 0 {
        let t = w[th.witnesses - 1];
        Some(Outcome::FailAtDepth {
            level: t.level,
            witness: t.value.clone(),
        })
    } else {
        None
    }
}
