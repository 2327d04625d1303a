//! Core zero-sum game representation and payoff algebra.
//!
//! Payoffs are attacker utilities in percent accuracy degradation on the
//! 0-100 scale, exactly as the ingested tables print them. The defender's
//! utility is the 100-complement and is never stored. The attacker is the
//! row player, the defender the column player.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance for tie detection among payoffs. Input data carries two
/// decimals, so anything below data resolution works; 1e-9 keeps float
/// noise out without ever merging distinct table entries.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Tolerance on probability normalization of a mixed strategy.
pub const STRATEGY_SUM_TOLERANCE: f64 = 1e-9;

// ---------------------------------------------------------------------------
// ZeroSumGame
// ---------------------------------------------------------------------------

/// A labeled attacker-payoff matrix. Rows are attacker actions, columns are
/// defender actions; entry `(i, j)` is the attacker's payoff in percent
/// degradation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroSumGame {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    payoff: Vec<Vec<f64>>,
}

impl ZeroSumGame {
    /// Build a game, validating shape, finiteness, and label uniqueness.
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        payoff: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let m = row_labels.len();
        let n = col_labels.len();
        if m == 0 || n == 0 {
            return Err(Error::InvalidGame(
                "a game needs at least one row and one column".into(),
            ));
        }
        if payoff.len() != m {
            return Err(Error::InvalidGame(format!(
                "payoff has {} rows but there are {m} row labels",
                payoff.len()
            )));
        }
        for (i, row) in payoff.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGame(format!(
                    "payoff row {i} has {} entries but there are {n} column labels",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidGame(format!(
                        "payoff[{i}][{j}] is not finite"
                    )));
                }
            }
        }
        for (axis, labels) in [("row", &row_labels), ("column", &col_labels)] {
            let unique: BTreeSet<&String> = labels.iter().collect();
            if unique.len() != labels.len() {
                return Err(Error::InvalidGame(format!("duplicate {axis} label")));
            }
        }
        Ok(Self {
            row_labels,
            col_labels,
            payoff,
        })
    }

    /// Build a game with generated labels `r0..` / `c0..`.
    pub fn from_matrix(payoff: Vec<Vec<f64>>) -> Result<Self> {
        let m = payoff.len();
        let n = payoff.first().map_or(0, Vec::len);
        Self::new(
            (0..m).map(|i| format!("r{i}")).collect(),
            (0..n).map(|j| format!("c{j}")).collect(),
            payoff,
        )
    }

    pub fn rows(&self) -> usize {
        self.payoff.len()
    }

    pub fn cols(&self) -> usize {
        self.payoff[0].len()
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.payoff[row][col]
    }

    pub fn payoff(&self) -> &[Vec<f64>] {
        &self.payoff
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    fn check_rows(&self, x: &MixedStrategy) -> Result<()> {
        if x.len() != self.rows() {
            return Err(Error::DimensionMismatch {
                context: "row strategy",
                expected: self.rows(),
                actual: x.len(),
            });
        }
        Ok(())
    }

    fn check_cols(&self, y: &MixedStrategy) -> Result<()> {
        if y.len() != self.cols() {
            return Err(Error::DimensionMismatch {
                context: "column strategy",
                expected: self.cols(),
                actual: y.len(),
            });
        }
        Ok(())
    }

    /// Expected attacker payoff of the strategy pair: `sum_ij x_i A_ij y_j`.
    pub fn expected_payoff(&self, x: &MixedStrategy, y: &MixedStrategy) -> Result<f64> {
        self.check_rows(x)?;
        self.check_cols(y)?;
        let mut total = 0.0;
        for (xi, row) in x.probs().iter().zip(&self.payoff) {
            if *xi == 0.0 {
                continue;
            }
            let row_value: f64 = row.iter().zip(y.probs()).map(|(a, yj)| a * yj).sum();
            total += xi * row_value;
        }
        Ok(total)
    }

    /// Attacker payoff of each pure row against the mixture `y`.
    pub fn row_payoffs(&self, y: &MixedStrategy) -> Result<Vec<f64>> {
        self.check_cols(y)?;
        Ok(self
            .payoff
            .iter()
            .map(|row| row.iter().zip(y.probs()).map(|(a, yj)| a * yj).sum())
            .collect())
    }

    /// Attacker payoff of each pure column against the mixture `x`.
    pub fn col_payoffs(&self, x: &MixedStrategy) -> Result<Vec<f64>> {
        self.check_rows(x)?;
        let mut out = vec![0.0; self.cols()];
        for (xi, row) in x.probs().iter().zip(&self.payoff) {
            if *xi == 0.0 {
                continue;
            }
            for (acc, a) in out.iter_mut().zip(row) {
                *acc += xi * a;
            }
        }
        Ok(out)
    }

    /// All rows maximizing the attacker's payoff against `y`, ties resolved
    /// within [`TIE_TOLERANCE`]. Never empty.
    pub fn best_response_rows(&self, y: &MixedStrategy) -> Result<BTreeSet<usize>> {
        let payoffs = self.row_payoffs(y)?;
        Ok(argbest(&payoffs, true))
    }

    /// All columns minimizing the attacker's payoff against `x` (the
    /// defender's best responses), ties resolved within [`TIE_TOLERANCE`].
    pub fn best_response_cols(&self, x: &MixedStrategy) -> Result<BTreeSet<usize>> {
        let payoffs = self.col_payoffs(x)?;
        Ok(argbest(&payoffs, false))
    }

    /// Remove rows strictly dominated by some surviving row (entry-wise in
    /// every column). Returns the reduced game and the removed original row
    /// indices. The minimax value is unchanged.
    pub fn prune_strictly_dominated_rows(&self) -> (ZeroSumGame, Vec<usize>) {
        let m = self.rows();
        let dominates = |s: usize, r: usize| {
            self.payoff[s]
                .iter()
                .zip(&self.payoff[r])
                .all(|(a, b)| *a > *b + TIE_TOLERANCE)
        };
        // Strict dominance is acyclic, so every dominated row has an
        // undominated (surviving) dominator by transitivity; one pass is
        // enough.
        let removed: Vec<usize> = (0..m)
            .filter(|&r| (0..m).any(|s| s != r && dominates(s, r)))
            .collect();
        if removed.is_empty() {
            return (self.clone(), removed);
        }
        let keep: Vec<usize> = (0..m).filter(|i| !removed.contains(i)).collect();
        let reduced = ZeroSumGame {
            row_labels: keep.iter().map(|&i| self.row_labels[i].clone()).collect(),
            col_labels: self.col_labels.clone(),
            payoff: keep.iter().map(|&i| self.payoff[i].clone()).collect(),
        };
        (reduced, removed)
    }

    pub fn min_entry(&self) -> f64 {
        self.payoff
            .iter()
            .flatten()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.payoff
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn argbest(values: &[f64], maximize: bool) -> BTreeSet<usize> {
    let best = values.iter().copied().fold(
        if maximize {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        },
        |a, b| {
            if maximize {
                a.max(b)
            } else {
                a.min(b)
            }
        },
    );
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| (v - best).abs() <= TIE_TOLERANCE)
        .map(|(i, _)| i)
        .collect()
}

// ---------------------------------------------------------------------------
// MixedStrategy
// ---------------------------------------------------------------------------

/// A probability distribution over one player's actions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    /// Validate non-negativity and normalization within
    /// [`STRATEGY_SUM_TOLERANCE`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidStrategy("empty probability vector".into()));
        }
        for (i, p) in probs.iter().enumerate() {
            if !p.is_finite() || *p < 0.0 {
                return Err(Error::InvalidStrategy(format!(
                    "probability {i} is {p}, must be finite and >= 0"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > STRATEGY_SUM_TOLERANCE {
            return Err(Error::InvalidStrategy(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    /// All mass on one action.
    pub fn pure(index: usize, len: usize) -> Self {
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Self { probs }
    }

    pub fn uniform(len: usize) -> Self {
        Self {
            probs: vec![1.0 / len as f64; len],
        }
    }

    /// Normalize raw non-negative weights. Used by solvers to absorb float
    /// residue; weights must not all be zero.
    pub(crate) fn from_weights(weights: &[f64]) -> Self {
        let sum: f64 = weights.iter().sum();
        debug_assert!(sum > 0.0, "weights must have positive mass");
        Self {
            probs: weights.iter().map(|w| (w / sum).max(0.0)).collect(),
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// True when a single action carries all mass (within tolerance).
    pub fn is_pure(&self) -> bool {
        self.probs
            .iter()
            .any(|p| (p - 1.0).abs() <= STRATEGY_SUM_TOLERANCE)
    }

    /// Indices with probability above [`TIE_TOLERANCE`].
    pub fn support(&self) -> BTreeSet<usize> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > TIE_TOLERANCE)
            .map(|(i, _)| i)
            .collect()
    }
}

// ---------------------------------------------------------------------------
// EquilibriumSolution
// ---------------------------------------------------------------------------

/// Whether an equilibrium is pure or mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolutionKind {
    Pure,
    Mixed,
}

impl std::fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Pure => f.write_str("pure"),
            Self::Mixed => f.write_str("mixed"),
        }
    }
}

/// Which solver produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    SimplexLp,
    ClosedForm2x2,
    SupportEnumeration,
}

impl std::fmt::Display for SolverMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::SimplexLp => f.write_str("simplex-lp"),
            Self::ClosedForm2x2 => f.write_str("closed-form-2x2"),
            Self::SupportEnumeration => f.write_str("support-enumeration"),
        }
    }
}

/// Mixed strategies for both players plus the game value and provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumSolution {
    pub attacker: MixedStrategy,
    pub defender: MixedStrategy,
    /// Expected attacker payoff (percent degradation).
    pub value: f64,
    pub kind: SolutionKind,
    pub method: SolverMethod,
}

impl EquilibriumSolution {
    /// Package a strategy pair, computing `value` and `kind` from it so the
    /// type's invariants hold by construction.
    pub fn from_strategies(
        game: &ZeroSumGame,
        attacker: MixedStrategy,
        defender: MixedStrategy,
        method: SolverMethod,
    ) -> Result<Self> {
        let value = game.expected_payoff(&attacker, &defender)?;
        let kind = if attacker.is_pure() && defender.is_pure() {
            SolutionKind::Pure
        } else {
            SolutionKind::Mixed
        };
        Ok(Self {
            attacker,
            defender,
            value,
            kind,
            method,
        })
    }
}
