//! Equilibrium enumeration, pure-commitment Stackelberg solving, and
//! fictitious-play dynamics.
//!
//! Enumeration walks candidate supports and solves the indifference system
//! on each; Stackelberg models the transparent defender who must commit to
//! one column before the attacker moves. Fictitious play is kept as an
//! independent convergence oracle for the LP value.

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{EquilibriumSolution, MixedStrategy, SolverMethod, ZeroSumGame, TIE_TOLERANCE};
use crate::simplex::{solve_minimax, VALUE_TOLERANCE};

/// Hard cap on either axis for support enumeration.
pub const MAX_ENUMERATION_DIM: usize = 20;

// ---------------------------------------------------------------------------
// Stackelberg with pure leader commitments
// ---------------------------------------------------------------------------

/// Outcome of the game where the defender (leader) commits to one column
/// and the attacker best-responds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StackelbergSolution {
    /// The column the leader commits to (lowest index among ties).
    pub committed_col: usize,
    /// Attacker best responses to the commitment.
    pub follower_rows: BTreeSet<usize>,
    /// Attacker payoff under the commitment: the committed column's maximum.
    pub value: f64,
    /// Every column achieving the leader-optimal value.
    pub leader_ties: BTreeSet<usize>,
}

/// Commit the defender to the column minimizing the attacker's best
/// response: `argmin_j max_i payoff[i][j]`, ties broken by lowest index.
pub fn solve_stackelberg_pure(game: &ZeroSumGame) -> StackelbergSolution {
    let col_maxes: Vec<f64> = (0..game.cols())
        .map(|j| {
            (0..game.rows())
                .map(|i| game.entry(i, j))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let value = col_maxes.iter().copied().fold(f64::INFINITY, f64::min);
    let leader_ties: BTreeSet<usize> = col_maxes
        .iter()
        .enumerate()
        .filter(|(_, &v)| (v - value).abs() <= TIE_TOLERANCE)
        .map(|(j, _)| j)
        .collect();
    let committed_col = *leader_ties.first().expect("at least one column");
    let follower_rows = game
        .best_response_rows(&MixedStrategy::pure(committed_col, game.cols()))
        .expect("pure strategy sized to game");
    StackelbergSolution {
        committed_col,
        follower_rows,
        value: col_maxes[committed_col],
        leader_ties,
    }
}

/// Attacker-payoff increase caused by the defender revealing its choice:
/// Stackelberg value minus Nash value. Never below `-`[`VALUE_TOLERANCE`];
/// reports clamp it to zero.
pub fn transparency_cost(game: &ZeroSumGame) -> f64 {
    solve_stackelberg_pure(game).value - solve_minimax(game).value
}

// ---------------------------------------------------------------------------
// Support enumeration
// ---------------------------------------------------------------------------

/// Enumerate extreme Nash equilibria by support enumeration.
///
/// For each support pair the indifference-plus-normalization system is
/// solved; rank-deficient or inconsistent systems are skipped (degenerate
/// supports contribute no isolated solution), and every candidate must pass
/// the no-profitable-deviation check before it is returned. Unequal support
/// sizes always leave one side's system underdetermined, so only equal
/// sizes can produce solutions and only those are solved.
pub fn enumerate_equilibria(game: &ZeroSumGame) -> Result<Vec<EquilibriumSolution>> {
    let m = game.rows();
    let n = game.cols();
    if m > MAX_ENUMERATION_DIM || n > MAX_ENUMERATION_DIM {
        return Err(Error::GameTooLarge {
            rows: m,
            cols: n,
            max: MAX_ENUMERATION_DIM,
        });
    }
    let scale = 1.0 + game.max_entry().abs().max(game.min_entry().abs());
    let mut found: Vec<EquilibriumSolution> = Vec::new();

    for size in 1..=m.min(n) {
        for row_support in (0..m).combinations(size) {
            for col_support in (0..n).combinations(size) {
                let Some((x, v_row)) =
                    indifference_solution(game, &row_support, &col_support, scale, false)
                else {
                    continue;
                };
                let Some((y, v_col)) =
                    indifference_solution(game, &row_support, &col_support, scale, true)
                else {
                    continue;
                };
                if (v_row - v_col).abs() > VALUE_TOLERANCE {
                    continue;
                }
                let (Ok(attacker), Ok(defender)) = (MixedStrategy::new(x), MixedStrategy::new(y))
                else {
                    continue;
                };
                if !is_equilibrium(game, &attacker, &defender, v_row) {
                    continue;
                }
                let duplicate = found.iter().any(|s| {
                    strategies_close(&s.attacker, &attacker)
                        && strategies_close(&s.defender, &defender)
                });
                if !duplicate {
                    found.push(EquilibriumSolution::from_strategies(
                        game,
                        attacker,
                        defender,
                        SolverMethod::SupportEnumeration,
                    )?);
                }
            }
        }
    }
    Ok(found)
}

/// Solve the indifference system for one side of a candidate support pair.
///
/// `for_cols = false` solves for the row mixture x: every column in the
/// column support earns the same value v against x, and x sums to one over
/// the row support. `for_cols = true` is the transpose. Returns the full
/// padded probability vector and v, or `None` when the system is singular,
/// inconsistent, or leaves the support (negative mass).
fn indifference_solution(
    game: &ZeroSumGame,
    row_support: &[usize],
    col_support: &[usize],
    scale: f64,
    for_cols: bool,
) -> Option<(Vec<f64>, f64)> {
    let (own, other, full_len) = if for_cols {
        (col_support, row_support, game.cols())
    } else {
        (row_support, col_support, game.rows())
    };
    let k = own.len();
    // Unknowns: k support probabilities then v.
    let mut matrix = Vec::with_capacity(other.len() + 1);
    let mut rhs = Vec::with_capacity(other.len() + 1);
    for &o in other {
        let mut row = vec![0.0; k + 1];
        for (c, &s) in own.iter().enumerate() {
            row[c] = if for_cols {
                game.entry(o, s)
            } else {
                game.entry(s, o)
            };
        }
        row[k] = -1.0;
        matrix.push(row);
        rhs.push(0.0);
    }
    let mut norm = vec![1.0; k];
    norm.push(0.0);
    matrix.push(norm);
    rhs.push(1.0);

    let solution = solve_linear_unique(matrix, rhs, scale)?;
    let mut probs = vec![0.0; full_len];
    for (c, &s) in own.iter().enumerate() {
        let p = solution[c];
        if p < -TIE_TOLERANCE {
            return None;
        }
        probs[s] = p.max(0.0);
    }
    // Absorb clamping residue so the vector is a distribution again.
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return None;
    }
    for p in probs.iter_mut() {
        *p /= total;
    }
    Some((probs, solution[k]))
}

/// Gaussian elimination with partial pivoting on a possibly non-square
/// system. Returns the unique solution or `None` when the system is
/// rank-deficient or inconsistent.
fn solve_linear_unique(a: Vec<Vec<f64>>, b: Vec<f64>, scale: f64) -> Option<Vec<f64>> {
    let rows = a.len();
    let cols = a[0].len();
    if rows < cols {
        return None;
    }
    let pivot_tol = 1e-9 * scale;
    let mut work = a.clone();
    let mut rhs = b.clone();
    for col in 0..cols {
        let pivot_row = (col..rows).max_by(|&r1, &r2| {
            work[r1][col]
                .abs()
                .partial_cmp(&work[r2][col].abs())
                .unwrap()
        })?;
        if work[pivot_row][col].abs() <= pivot_tol {
            // No pivot available: the unknown is free, no isolated solution.
            return None;
        }
        work.swap(col, pivot_row);
        rhs.swap(col, pivot_row);
        let pivot = work[col][col];
        let pivot_rhs = rhs[col];
        let (upper, lower) = work.split_at_mut(col + 1);
        let pivot_values = &upper[col];
        for (row, target) in lower.iter_mut().zip(rhs[col + 1..].iter_mut()) {
            let factor = row[col] / pivot;
            if factor != 0.0 {
                for (cell, p) in row.iter_mut().zip(pivot_values).skip(col) {
                    *cell -= factor * p;
                }
                *target -= factor * pivot_rhs;
            }
        }
    }
    let mut x = vec![0.0; cols];
    for idx in (0..cols).rev() {
        let mut value = rhs[idx];
        for c in idx + 1..cols {
            value -= work[idx][c] * x[c];
        }
        x[idx] = value / work[idx][idx];
    }
    // Consistency of every original equation, including redundant rows.
    for (row, &target) in a.iter().zip(&b) {
        let lhs: f64 = row.iter().zip(&x).map(|(c, v)| c * v).sum();
        if (lhs - target).abs() > 1e-7 * scale {
            return None;
        }
    }
    Some(x)
}

/// No profitable pure deviation for either player, within
/// [`VALUE_TOLERANCE`].
fn is_equilibrium(game: &ZeroSumGame, x: &MixedStrategy, y: &MixedStrategy, value: f64) -> bool {
    let row_best = game
        .row_payoffs(y)
        .expect("sized")
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    let col_best = game
        .col_payoffs(x)
        .expect("sized")
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    row_best <= value + VALUE_TOLERANCE && col_best >= value - VALUE_TOLERANCE
}

fn strategies_close(a: &MixedStrategy, b: &MixedStrategy) -> bool {
    a.probs()
        .iter()
        .zip(b.probs())
        .all(|(p, q)| (p - q).abs() <= VALUE_TOLERANCE)
}

// ---------------------------------------------------------------------------
// Fictitious play
// ---------------------------------------------------------------------------

/// Empirical record of a fictitious-play run.
#[derive(Debug, Clone, Serialize)]
pub struct FictitiousPlayTrace {
    pub iterations: u64,
    /// Normalized historical action counts.
    pub empirical_attacker: MixedStrategy,
    pub empirical_defender: MixedStrategy,
    /// Expected payoff of the empirical mixtures.
    pub empirical_value: f64,
    /// Running empirical values sampled along the run, `(iteration, value)`.
    pub value_history: Vec<(u64, f64)>,
}

/// Number of evenly spaced samples kept in `value_history`.
const HISTORY_SAMPLES: u64 = 32;

/// Run fictitious play: both players simultaneously best-respond to the
/// opponent's empirical mixture each round, starting from row 0 / column 0.
/// Best-response ties are broken uniformly at random under `seed`, so the
/// trace is deterministic given `(game, iterations, seed)`.
///
/// # Panics
/// Panics if `iterations` is zero.
pub fn fictitious_play(game: &ZeroSumGame, iterations: u64, seed: u64) -> FictitiousPlayTrace {
    assert!(
        iterations >= 1,
        "fictitious play needs at least one iteration"
    );
    let m = game.rows();
    let n = game.cols();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut row_counts = vec![0u64; m];
    let mut col_counts = vec![0u64; n];
    // Cumulative payoff of each action against the opponent's history.
    let mut row_scores = vec![0.0; m];
    let mut col_scores = vec![0.0; n];

    let sample_every = (iterations / HISTORY_SAMPLES).max(1);
    let mut history = Vec::new();

    let mut row_action = 0usize;
    let mut col_action = 0usize;
    for t in 1..=iterations {
        row_counts[row_action] += 1;
        col_counts[col_action] += 1;
        for (score, row) in row_scores.iter_mut().zip(game.payoff()) {
            *score += row[col_action];
        }
        for (score, a) in col_scores.iter_mut().zip(&game.payoff()[row_action]) {
            *score += a;
        }
        if t % sample_every == 0 || t == iterations {
            history.push((t, empirical_value(game, &row_counts, &col_counts, t)));
        }
        if t == iterations {
            break;
        }
        row_action = pick(&row_scores, true, &mut rng);
        col_action = pick(&col_scores, false, &mut rng);
    }

    let empirical_attacker = MixedStrategy::new(
        row_counts
            .iter()
            .map(|&c| c as f64 / iterations as f64)
            .collect(),
    )
    .expect("counts normalize");
    let empirical_defender = MixedStrategy::new(
        col_counts
            .iter()
            .map(|&c| c as f64 / iterations as f64)
            .collect(),
    )
    .expect("counts normalize");
    let empirical_value = game
        .expected_payoff(&empirical_attacker, &empirical_defender)
        .expect("sized");

    FictitiousPlayTrace {
        iterations,
        empirical_attacker,
        empirical_defender,
        empirical_value,
        value_history: history,
    }
}

fn empirical_value(game: &ZeroSumGame, row_counts: &[u64], col_counts: &[u64], t: u64) -> f64 {
    let x = MixedStrategy::new(row_counts.iter().map(|&c| c as f64 / t as f64).collect())
        .expect("counts normalize");
    let y = MixedStrategy::new(col_counts.iter().map(|&c| c as f64 / t as f64).collect())
        .expect("counts normalize");
    game.expected_payoff(&x, &y).expect("sized")
}

/// Best index by cumulative score, ties within a relative tolerance broken
/// uniformly at random.
fn pick(scores: &[f64], maximize: bool, rng: &mut ChaCha8Rng) -> usize {
    let best = scores.iter().copied().fold(
        if maximize {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        },
        |a, b| if maximize { a.max(b) } else { a.min(b) },
    );
    let tol = 1e-9 * best.abs().max(1.0);
    let ties: Vec<usize> = scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| (s - best).abs() <= tol)
        .map(|(i, _)| i)
        .collect();
    if ties.len() == 1 {
        ties[0]
    } else {
        ties[rng.random_range(0..ties.len())]
    }
}
