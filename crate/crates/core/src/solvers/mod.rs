//! 2-OPT, exact optima, and approximation ratios.

mod held_karp;
mod oracle;
mod two_opt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::TspInstance;
use crate::rng::RandomSource;

pub use held_karp::{exact_optimum, DEFAULT_MAX_EXACT};
pub use oracle::{OptOracle, ORACLE_ENV, PATH_PLACEHOLDER};
pub use two_opt::{two_opt, two_opt_mean_quality, SolveReport, IMPROVEMENT_EPS};

/// 2-OPT restarts averaged into `A(I)`.
pub const DEFAULT_RESTARTS: usize = 5;

/// Relative tolerance for comparing `A(I)` against `OPT(I)`.
pub const RATIO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    pub alpha: f64,
    pub optimum: f64,
    pub heuristic: SolveReport,
}

/// `A(I) / OPT(I)` with `A(I)` the mean of `restarts` 2-OPT runs.
///
/// A ratio within [`RATIO_TOLERANCE`] of 1 is reported as exactly 1, so easy
/// thresholds of 1 are not defeated by summation order.
pub fn evaluate_ratio(
    inst: &TspInstance,
    oracle: &OptOracle,
    restarts: usize,
    rng: &mut RandomSource,
) -> Result<Approximation> {
    let optimum = oracle.opt(inst)?;
    let heuristic = two_opt_mean_quality(inst, restarts, rng);
    let raw = heuristic.mean_length / optimum;
    if raw < 1.0 - RATIO_TOLERANCE {
        return Err(Error::OracleInconsistency {
            heuristic: heuristic.mean_length,
            optimum,
        });
    }
    let alpha = if (raw - 1.0).abs() <= RATIO_TOLERANCE {
        1.0
    } else {
        raw
    };
    Ok(Approximation {
        alpha,
        optimum,
        heuristic,
    })
}

pub fn approximation_ratio(
    inst: &TspInstance,
    oracle: &OptOracle,
    rng: &mut RandomSource,
) -> Result<f64> {
    evaluate_ratio(inst, oracle, DEFAULT_RESTARTS, rng).map(|a| a.alpha)
}
