//! Dense minimax solver for zero-sum games.
//!
//! `solve_minimax` runs primal simplex on the standard game LP: payoffs are
//! shifted by a constant so every entry is strictly positive, the defender's
//! normalized program `maximize sum(w) s.t. A w <= 1, w >= 0` is solved, and
//! the attacker's strategy is read off the dual values. The shift is removed
//! from the reported value. Bland's rule keeps pivoting deterministic and
//! cycle-free, so identical inputs give identical outputs.
//!
//! `solve_2x2_closed_form` is the independent algebraic route for the 2x2
//! case used throughout the bundled analyses.

use crate::error::{Error, Result};
use crate::game::{MixedStrategy, ZeroSumGame, TIE_TOLERANCE};

/// Pivot feasibility tolerance, percent scale.
pub const FEASIBILITY_TOLERANCE: f64 = 1e-9;

/// Slack allowed on the reported value invariants, percent scale.
pub const VALUE_TOLERANCE: f64 = 1e-7;

/// Pivot cap; orders of magnitude above what dense games up to 20x20 need.
pub const MAX_PIVOTS: usize = 10_000;

/// Solver outcome. `NumericallyDegenerate` means the pivot cap was hit and
/// `value` is only the midpoint of the best-known duality bracket.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    NumericallyDegenerate,
}

/// One optimal strategy pair and the game value.
#[derive(Debug, Clone)]
pub struct MinimaxResult {
    /// Game value in percent degradation.
    pub value: f64,
    pub row_strategy: MixedStrategy,
    pub col_strategy: MixedStrategy,
    /// Simplex pivots performed (0 for the closed form).
    pub iterations: usize,
    pub status: SolveStatus,
}

/// Solve an arbitrary zero-sum game by primal simplex.
pub fn solve_minimax(game: &ZeroSumGame) -> MinimaxResult {
    solve_minimax_with_cap(game, MAX_PIVOTS)
}

pub(crate) fn solve_minimax_with_cap(game: &ZeroSumGame, cap: usize) -> MinimaxResult {
    let m = game.rows();
    let n = game.cols();

    // Shift so every entry is strictly positive; the value shifts with it,
    // strategies do not.
    let min_entry = game.min_entry();
    let shift = if min_entry < 1.0 {
        1.0 - min_entry
    } else {
        0.0
    };

    // Tableau rows: A'w + s = 1. Columns: n game vars, m slacks, rhs.
    let width = n + m + 1;
    let mut tableau: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = vec![0.0; width];
            for (cell, j) in row.iter_mut().zip(0..n) {
                *cell = game.entry(i, j) + shift;
            }
            row[n + i] = 1.0;
            row[width - 1] = 1.0;
            row
        })
        .collect();
    // Reduced-cost row for `maximize sum(w)`, with the objective value last.
    let mut costs = vec![0.0; width];
    for c in costs.iter_mut().take(n) {
        *c = 1.0;
    }
    let mut basis: Vec<usize> = (0..m).map(|i| n + i).collect();

    let mut pivots = 0;
    let capped = loop {
        // Bland: entering variable is the lowest index with positive
        // reduced cost.
        let Some(entering) = (0..n + m).find(|&j| costs[j] > FEASIBILITY_TOLERANCE) else {
            break false;
        };
        if pivots >= cap {
            break true;
        }
        // Ratio test; ties leave the row whose basic variable has the
        // lowest index (Bland again).
        let mut leaving: Option<(usize, f64)> = None;
        for (i, row) in tableau.iter().enumerate() {
            if row[entering] > FEASIBILITY_TOLERANCE {
                let ratio = row[width - 1] / row[entering];
                let better = match leaving {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - FEASIBILITY_TOLERANCE
                            || (ratio < lr + FEASIBILITY_TOLERANCE && basis[i] < basis[li])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        // A' > 0 makes the program bounded, so a pivot row always exists.
        let Some((pivot_row, _)) = leaving else {
            break true;
        };

        let pivot = tableau[pivot_row][entering];
        for v in tableau[pivot_row].iter_mut() {
            *v /= pivot;
        }
        let pivot_values = tableau[pivot_row].clone();
        for (i, row) in tableau.iter_mut().enumerate() {
            if i == pivot_row {
                continue;
            }
            let factor = row[entering];
            if factor != 0.0 {
                for (cell, p) in row.iter_mut().zip(&pivot_values) {
                    *cell -= factor * p;
                }
            }
        }
        let factor = costs[entering];
        if factor != 0.0 {
            for (cell, p) in costs.iter_mut().zip(&pivot_values) {
                *cell -= factor * p;
            }
        }
        basis[pivot_row] = entering;
        pivots += 1;
    };

    // Defender weights from the basis, attacker weights from the duals
    // (negated slack reduced costs).
    let mut w = vec![0.0; n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            w[b] = tableau[i][width - 1].max(0.0);
        }
    }
    let u: Vec<f64> = (0..m).map(|i| (-costs[n + i]).max(0.0)).collect();
    let w_sum: f64 = w.iter().sum();
    let u_sum: f64 = u.iter().sum();

    let col_strategy = if w_sum > 0.0 {
        MixedStrategy::from_weights(&w)
    } else {
        MixedStrategy::uniform(n)
    };
    let row_strategy = if u_sum > 0.0 {
        MixedStrategy::from_weights(&u)
    } else {
        MixedStrategy::uniform(m)
    };

    if capped || w_sum <= 0.0 {
        // Best-known bracket from whatever strategies we have.
        let floor = game
            .col_payoffs(&row_strategy)
            .expect("strategy sized to game")
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let ceiling = game
            .row_payoffs(&col_strategy)
            .expect("strategy sized to game")
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        return MinimaxResult {
            value: 0.5 * (floor + ceiling),
            row_strategy,
            col_strategy,
            iterations: pivots,
            status: SolveStatus::NumericallyDegenerate,
        };
    }

    MinimaxResult {
        value: 1.0 / w_sum - shift,
        row_strategy,
        col_strategy,
        iterations: pivots,
        status: SolveStatus::Optimal,
    }
}

/// Closed-form solution of a 2x2 game: the pure saddle point when one
/// exists, otherwise the interior equalizing mix. Errors on non-2x2 input.
pub fn solve_2x2_closed_form(game: &ZeroSumGame) -> Result<MinimaxResult> {
    if game.rows() != 2 || game.cols() != 2 {
        return Err(Error::DimensionMismatch {
            context: "2x2 closed form",
            expected: 2,
            actual: game.rows().max(game.cols()),
        });
    }
    let a11 = game.entry(0, 0);
    let a12 = game.entry(0, 1);
    let a21 = game.entry(1, 0);
    let a22 = game.entry(1, 1);

    // Fully degenerate constant matrix: every pair is optimal; report the
    // uniform one.
    let constant = [a12, a21, a22]
        .iter()
        .all(|v| (v - a11).abs() <= TIE_TOLERANCE);
    if constant {
        return Ok(MinimaxResult {
            value: a11,
            row_strategy: MixedStrategy::uniform(2),
            col_strategy: MixedStrategy::uniform(2),
            iterations: 0,
            status: SolveStatus::Optimal,
        });
    }

    // Pure saddle point: maximin equals minimax over pure actions.
    let row_mins = [a11.min(a12), a21.min(a22)];
    let col_maxes = [a11.max(a21), a12.max(a22)];
    let maximin = row_mins[0].max(row_mins[1]);
    let minimax = col_maxes[0].min(col_maxes[1]);
    if (maximin - minimax).abs() <= TIE_TOLERANCE {
        let i = usize::from((row_mins[0] - maximin).abs() > TIE_TOLERANCE);
        let j = usize::from((col_maxes[0] - minimax).abs() > TIE_TOLERANCE);
        return Ok(MinimaxResult {
            value: game.entry(i, j),
            row_strategy: MixedStrategy::pure(i, 2),
            col_strategy: MixedStrategy::pure(j, 2),
            iterations: 0,
            status: SolveStatus::Optimal,
        });
    }

    // No saddle: the interior mix equalizes both opponents' actions.
    let d = a11 + a22 - a12 - a21;
    let x1 = ((a22 - a21) / d).clamp(0.0, 1.0);
    let y1 = ((a22 - a12) / d).clamp(0.0, 1.0);
    Ok(MinimaxResult {
        value: (a11 * a22 - a12 * a21) / d,
        row_strategy: MixedStrategy::new(vec![x1, 1.0 - x1])?,
        col_strategy: MixedStrategy::new(vec![y1, 1.0 - y1])?,
        iterations: 0,
        status: SolveStatus::Optimal,
    })
}
