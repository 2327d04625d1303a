//! Batch analyses over a scenario table: per-attack transparency costs,
//! mixed-equilibrium probabilities, the attack-only underestimation
//! comparison, and full per-game summaries.
//!
//! All numbers are kept unrounded internally; display rounding is half-up
//! to two decimals and only applied when counting "worse off" entries and
//! when formatting.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::equilibria::{fictitious_play, solve_stackelberg_pure, StackelbergSolution};
use crate::error::{Error, Result};
use crate::game::{EquilibriumSolution, SolutionKind, SolverMethod, ZeroSumGame};
use crate::scenario::{DefendedSurrogate, ScenarioTable, TargetClass};
use crate::simplex::solve_minimax;

/// Half-up rounding to two decimals (away from zero for negatives), the
/// display convention for every report.
pub fn round2(x: f64) -> f64 {
    if x < 0.0 {
        -round2(-x)
    } else {
        (x * 100.0 + 0.5).floor() / 100.0
    }
}

/// Which game family to build and solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameKind {
    Surrogate,
    AttackSurrogate,
    Attack,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Surrogate => f.write_str("surrogate"),
            Self::AttackSurrogate => f.write_str("attack-surrogate"),
            Self::Attack => f.write_str("attack"),
        }
    }
}

impl FromStr for GameKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "surrogate" => Ok(Self::Surrogate),
            "attack-surrogate" => Ok(Self::AttackSurrogate),
            "attack" => Ok(Self::Attack),
            other => Err(format!(
                "unknown game kind '{other}' (expected surrogate, attack-surrogate, or attack)"
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// Transparency report (Stackelberg minus Nash per attack)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct TransparencyEntry {
    pub attack: String,
    pub nash_value: f64,
    pub stackelberg_value: f64,
    /// Stackelberg minus Nash, clamped at zero.
    pub cost: f64,
}

/// Per-attack cost of revealing the defense decision, over the Surrogate
/// games of one dataset.
#[derive(Debug, Clone, Serialize)]
pub struct TransparencyReport {
    pub dataset: String,
    pub defended_surrogate: DefendedSurrogate,
    pub entries: Vec<TransparencyEntry>,
    /// Entries whose displayed (2-decimal) cost is above zero.
    pub worse_off_count: usize,
    pub attack_count: usize,
    /// Mean unrounded cost over exactly the worse-off entries; 0 when none.
    pub mean_nonzero_cost: f64,
    pub formula: String,
}

pub fn transparency_report(
    table: &ScenarioTable,
    dataset: &str,
    defended: DefendedSurrogate,
) -> Result<TransparencyReport> {
    let attacks = table.attacks(dataset)?;
    let mut entries = Vec::with_capacity(attacks.len());
    for attack in &attacks {
        let game = table.build_surrogate_game(dataset, attack, defended)?;
        let nash = solve_minimax(&game);
        let stackelberg = solve_stackelberg_pure(&game);
        entries.push(TransparencyEntry {
            attack: attack.clone(),
            nash_value: nash.value,
            stackelberg_value: stackelberg.value,
            cost: (stackelberg.value - nash.value).max(0.0),
        });
    }
    let worse_off: Vec<&TransparencyEntry> =
        entries.iter().filter(|e| round2(e.cost) > 0.0).collect();
    let mean_nonzero_cost = if worse_off.is_empty() {
        0.0
    } else {
        worse_off.iter().map(|e| e.cost).sum::<f64>() / worse_off.len() as f64
    };
    Ok(TransparencyReport {
        dataset: dataset.to_string(),
        defended_surrogate: defended,
        worse_off_count: worse_off.len(),
        attack_count: entries.len(),
        mean_nonzero_cost,
        entries,
        formula: "cost = stackelberg_value - nash_value, clamped at 0".to_string(),
    })
}

// ---------------------------------------------------------------------------
// Mixing report (probability of playing undefended)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct MixingEntry {
    pub attack: String,
    /// Equilibrium probability (in %) that the attacker uses an undefended
    /// surrogate.
    pub attacker_p_undefended: f64,
    /// Equilibrium probability (in %) that the defender uses an undefended
    /// target.
    pub defender_p_undefended: f64,
    pub kind: SolutionKind,
}

/// Which attacks a mixing report includes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub enum MixingFilter {
    /// Attacks whose Surrogate game is mixed on at least one dataset in the
    /// table (the published row set).
    #[default]
    MixedOnAnyDataset,
    /// Every attack of the requested dataset.
    All,
    /// An explicit attack list.
    Attacks(BTreeSet<String>),
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingReport {
    pub dataset: String,
    pub defended_surrogate: DefendedSurrogate,
    pub entries: Vec<MixingEntry>,
    pub formula: String,
}

pub fn mixing_report(
    table: &ScenarioTable,
    dataset: &str,
    defended: DefendedSurrogate,
    filter: &MixingFilter,
) -> Result<MixingReport> {
    let attacks = table.attacks(dataset)?;
    let mut entries = Vec::new();
    for attack in &attacks {
        let include = match filter {
            MixingFilter::All => true,
            MixingFilter::Attacks(set) => set.contains(attack),
            MixingFilter::MixedOnAnyDataset => {
                let mut mixed_somewhere = false;
                for ds in table.datasets() {
                    if !table.attacks(&ds)?.iter().any(|a| a == attack) {
                        continue;
                    }
                    let game = table.build_surrogate_game(&ds, attack, defended)?;
                    let r = solve_minimax(&game);
                    if !(r.row_strategy.is_pure() && r.col_strategy.is_pure()) {
                        mixed_somewhere = true;
                        break;
                    }
                }
                mixed_somewhere
            }
        };
        if !include {
            continue;
        }
        let game = table.build_surrogate_game(dataset, attack, defended)?;
        let r = solve_minimax(&game);
        let kind = if r.row_strategy.is_pure() && r.col_strategy.is_pure() {
            SolutionKind::Pure
        } else {
            SolutionKind::Mixed
        };
        entries.push(MixingEntry {
            attack: attack.clone(),
            attacker_p_undefended: 100.0 * r.row_strategy.probs()[0],
            defender_p_undefended: 100.0 * r.col_strategy.probs()[0],
            kind,
        });
    }
    Ok(MixingReport {
        dataset: dataset.to_string(),
        defended_surrogate: defended,
        entries,
        formula: "probabilities are equilibrium weights (%) on the undefended action".to_string(),
    })
}

// ---------------------------------------------------------------------------
// Underestimation report (A&S game vs Attack game)
// ---------------------------------------------------------------------------

/// How much attack-only benchmarking understates the attacker's value.
#[derive(Debug, Clone, Serialize)]
pub struct UnderestimationReport {
    pub dataset: String,
    pub defended_surrogate: DefendedSurrogate,
    /// Value of the game where the attacker picks attack and surrogate.
    pub v_attack_surrogate: f64,
    /// Value when the attacker is pinned to an undefended surrogate.
    pub v_attack_only: f64,
    pub difference: f64,
    /// Ratio of baseline-adjusted values.
    pub factor: f64,
    pub baseline_defended: f64,
    pub formula: String,
}

pub fn underestimation_report(
    table: &ScenarioTable,
    dataset: &str,
    defended: DefendedSurrogate,
) -> Result<UnderestimationReport> {
    let v_as = solve_minimax(&table.build_attack_surrogate_game(dataset, defended)?).value;
    let v_a = solve_minimax(&table.build_attack_game(dataset)?).value;
    let baseline = table.baseline_degradation(dataset, TargetClass::Defended)?;
    let factor = if (v_a - baseline).abs() < 1e-12 {
        // Degenerate: no attack beats the baseline; equal numerator means
        // no underestimation at all.
        if (v_as - baseline).abs() < 1e-12 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        (v_as - baseline) / (v_a - baseline)
    };
    Ok(UnderestimationReport {
        dataset: dataset.to_string(),
        defended_surrogate: defended,
        v_attack_surrogate: v_as,
        v_attack_only: v_a,
        difference: v_as - v_a,
        factor,
        baseline_defended: baseline,
        formula:
            "factor = (v_attack_surrogate - baseline_defended) / (v_attack_only - baseline_defended)"
                .to_string(),
    })
}

// ---------------------------------------------------------------------------
// Per-game summary (normal form, Nash, Stackelberg, transparency cost)
// ---------------------------------------------------------------------------

/// One solved game with its commitment analysis; what `solve` prints.
#[derive(Debug, Clone, Serialize)]
pub struct GameSummary {
    pub dataset: String,
    pub game_kind: GameKind,
    pub attack: Option<String>,
    pub defended_surrogate: DefendedSurrogate,
    pub game: ZeroSumGame,
    pub nash: EquilibriumSolution,
    pub stackelberg: StackelbergSolution,
    /// Stackelberg minus Nash, clamped at zero.
    pub transparency_cost: f64,
}

/// Build and solve one game of the requested family. `attack` is required
/// for the Surrogate family and ignored otherwise.
pub fn solve_game_summary(
    table: &ScenarioTable,
    dataset: &str,
    kind: GameKind,
    attack: Option<&str>,
    defended: DefendedSurrogate,
) -> Result<GameSummary> {
    let game = build_game(table, dataset, kind, attack, defended)?;
    let minimax = solve_minimax(&game);
    let nash = EquilibriumSolution::from_strategies(
        &game,
        minimax.row_strategy,
        minimax.col_strategy,
        SolverMethod::SimplexLp,
    )?;
    let stackelberg = solve_stackelberg_pure(&game);
    let transparency_cost = (stackelberg.value - nash.value).max(0.0);
    Ok(GameSummary {
        dataset: dataset.to_string(),
        game_kind: kind,
        attack: attack.map(String::from),
        defended_surrogate: defended,
        game,
        nash,
        stackelberg,
        transparency_cost,
    })
}

/// Equilibrium and commitment description of the Attack-and-Surrogate game.
pub fn as_game_summary(
    table: &ScenarioTable,
    dataset: &str,
    defended: DefendedSurrogate,
) -> Result<GameSummary> {
    solve_game_summary(table, dataset, GameKind::AttackSurrogate, None, defended)
}

pub fn build_game(
    table: &ScenarioTable,
    dataset: &str,
    kind: GameKind,
    attack: Option<&str>,
    defended: DefendedSurrogate,
) -> Result<ZeroSumGame> {
    match kind {
        GameKind::Surrogate => {
            let attack = attack.ok_or_else(|| {
                Error::InvalidGame("the surrogate game needs an attack name".into())
            })?;
            table.build_surrogate_game(dataset, attack, defended)
        }
        GameKind::AttackSurrogate => table.build_attack_surrogate_game(dataset, defended),
        GameKind::Attack => table.build_attack_game(dataset),
    }
}

// ---------------------------------------------------------------------------
// Simulation report (fictitious play vs the LP value)
// ---------------------------------------------------------------------------

/// Fictitious-play run next to the LP value it should converge to.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub dataset: String,
    pub game_kind: GameKind,
    pub attack: Option<String>,
    pub defended_surrogate: DefendedSurrogate,
    pub seed: u64,
    pub lp_value: f64,
    pub empirical_value: f64,
    pub gap: f64,
    pub trace: crate::equilibria::FictitiousPlayTrace,
}

pub fn simulate_game(
    table: &ScenarioTable,
    dataset: &str,
    kind: GameKind,
    attack: Option<&str>,
    defended: DefendedSurrogate,
    iterations: u64,
    seed: u64,
) -> Result<SimulationReport> {
    let game = build_game(table, dataset, kind, attack, defended)?;
    let lp_value = solve_minimax(&game).value;
    let trace = fictitious_play(&game, iterations, seed);
    Ok(SimulationReport {
        dataset: dataset.to_string(),
        game_kind: kind,
        attack: attack.map(String::from),
        defended_surrogate: defended,
        seed,
        lp_value,
        empirical_value: trace.empirical_value,
        gap: (trace.empirical_value - lp_value).abs(),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{PayoffRecord, SurrogateClass, NO_ATTACK};
    use crate::simplex::solve_2x2_closed_form;

    fn bundled() -> ScenarioTable {
        ScenarioTable::bundled()
    }

    #[test]
    fn round2_is_half_up() {
        assert_eq!(round2(0.455), 0.46);
        assert_eq!(round2(0.454), 0.45);
        assert_eq!(round2(0.0), 0.0);
        assert_eq!(round2(-0.455), -0.46);
        assert_eq!(round2(2.4471), 2.45);
    }

    #[test]
    fn transparency_report_reproduces_cifar10_column() {
        let report =
            transparency_report(&bundled(), "cifar10", DefendedSurrogate::MedianDef).unwrap();
        let expected = [
            ("admix", 0.28),
            ("autoattack", 1.04),
            ("bia", 0.0),
            ("cdtp", 0.05),
            ("lgv", 0.0),
            ("ops", 0.49),
            ("pgn", 0.42),
            ("ssah", 0.0),
            ("vni-fgsm", 0.0),
        ];
        assert_eq!(report.entries.len(), 9);
        for (entry, (attack, cost)) in report.entries.iter().zip(expected) {
            assert_eq!(entry.attack, attack);
            assert!(
                (entry.cost - cost).abs() <= 0.02,
                "{attack}: {} vs {cost}",
                entry.cost
            );
        }
        assert_eq!(report.worse_off_count, 5);
        assert_eq!(report.attack_count, 9);
        assert!((report.mean_nonzero_cost - 0.46).abs() <= 0.02);
    }

    #[test]
    fn transparency_report_reproduces_imagenet_summary() {
        let report =
            transparency_report(&bundled(), "imagenet", DefendedSurrogate::MedianDef).unwrap();
        assert_eq!(report.worse_off_count, 6);
        assert!((report.mean_nonzero_cost - 0.33).abs() <= 0.02);
    }

    #[test]
    fn transparency_costs_match_the_standalone_operation() {
        let table = bundled();
        let report = transparency_report(&table, "imagenet", DefendedSurrogate::MedianDef).unwrap();
        for entry in &report.entries {
            let game = table
                .build_surrogate_game("imagenet", &entry.attack, DefendedSurrogate::MedianDef)
                .unwrap();
            let direct = crate::equilibria::transparency_cost(&game).max(0.0);
            assert!((entry.cost - direct).abs() <= 1e-9);
        }
    }

    #[test]
    fn mixing_report_default_filter_matches_published_rows() {
        let report = mixing_report(
            &bundled(),
            "cifar10",
            DefendedSurrogate::MedianDef,
            &MixingFilter::default(),
        )
        .unwrap();
        let attacks: Vec<&str> = report.entries.iter().map(|e| e.attack.as_str()).collect();
        assert_eq!(
            attacks,
            vec!["admix", "autoattack", "cdtp", "ops", "pgn", "vni-fgsm"]
        );
        // VNI-FGSM is pure on CIFAR10 but stays in the row set because its
        // ImageNet game is mixed.
        let vni = report.entries.last().unwrap();
        assert_eq!(vni.kind, SolutionKind::Pure);
        assert_eq!(vni.attacker_p_undefended, 0.0);
        assert_eq!(vni.defender_p_undefended, 0.0);
    }

    #[test]
    fn mixing_probabilities_match_closed_form() {
        let table = bundled();
        for dataset in ["cifar10", "imagenet"] {
            let report = mixing_report(
                &table,
                dataset,
                DefendedSurrogate::MedianDef,
                &MixingFilter::All,
            )
            .unwrap();
            assert_eq!(report.entries.len(), 9);
            for entry in &report.entries {
                let game = table
                    .build_surrogate_game(dataset, &entry.attack, DefendedSurrogate::MedianDef)
                    .unwrap();
                let cf = solve_2x2_closed_form(&game).unwrap();
                assert!(
                    (entry.attacker_p_undefended - 100.0 * cf.row_strategy.probs()[0]).abs()
                        <= 1e-6
                );
                assert!(
                    (entry.defender_p_undefended - 100.0 * cf.col_strategy.probs()[0]).abs()
                        <= 1e-6
                );
            }
        }
    }

    #[test]
    fn mixing_filter_accepts_explicit_attacks() {
        let filter = MixingFilter::Attacks(BTreeSet::from(["lgv".to_string()]));
        let report =
            mixing_report(&bundled(), "cifar10", DefendedSurrogate::MedianDef, &filter).unwrap();
        assert_eq!(report.entries.len(), 1);
        assert_eq!(report.entries[0].attack, "lgv");
        assert_eq!(report.entries[0].kind, SolutionKind::Pure);
    }

    #[test]
    fn underestimation_matches_published_figures() {
        let table = bundled();
        let r = underestimation_report(&table, "cifar10", DefendedSurrogate::MedianDef).unwrap();
        assert!(
            (r.difference - 12.58).abs() <= 0.05,
            "diff {}",
            r.difference
        );
        assert!((r.factor - 3.73).abs() <= 0.02, "factor {}", r.factor);
        assert_eq!(r.baseline_defended, 12.28);

        let r = underestimation_report(&table, "imagenet", DefendedSurrogate::MedianDef).unwrap();
        assert!((r.difference - 4.22).abs() <= 0.05, "diff {}", r.difference);
        assert!((r.factor - 2.15).abs() <= 0.02, "factor {}", r.factor);
    }

    #[test]
    fn underestimation_degenerates_to_factor_one() {
        // Defended and undefended surrogate rows identical: the surrogate
        // choice is irrelevant, so the games coincide.
        let mut records = vec![
            PayoffRecord {
                dataset: "toy".into(),
                attack: NO_ATTACK.into(),
                surrogate: SurrogateClass::None,
                target: TargetClass::Undefended,
                degradation: 5.0,
            },
            PayoffRecord {
                dataset: "toy".into(),
                attack: NO_ATTACK.into(),
                surrogate: SurrogateClass::None,
                target: TargetClass::Defended,
                degradation: 10.0,
            },
        ];
        for s in [
            SurrogateClass::Undefended,
            SurrogateClass::WorstDef,
            SurrogateClass::MedianDef,
            SurrogateClass::BestDef,
        ] {
            records.push(PayoffRecord {
                dataset: "toy".into(),
                attack: "fgsm".into(),
                surrogate: s,
                target: TargetClass::Undefended,
                degradation: 40.0,
            });
            records.push(PayoffRecord {
                dataset: "toy".into(),
                attack: "fgsm".into(),
                surrogate: s,
                target: TargetClass::Defended,
                degradation: 20.0,
            });
        }
        let table = ScenarioTable::from_records(records).unwrap();
        let r = underestimation_report(&table, "toy", DefendedSurrogate::MedianDef).unwrap();
        assert!(r.difference.abs() <= 1e-9);
        assert!((r.factor - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn as_summary_imagenet_matches_published_equilibrium() {
        let summary =
            as_game_summary(&bundled(), "imagenet", DefendedSurrogate::MedianDef).unwrap();
        let labels = summary.game.row_labels();
        let support = summary.nash.attacker.support();
        let names: Vec<&str> = support.iter().map(|&i| labels[i].as_str()).collect();
        assert_eq!(names, vec!["ops/undefended", "vni-fgsm/defended"]);
        let probs = summary.nash.attacker.probs();
        let ops = labels.iter().position(|l| l == "ops/undefended").unwrap();
        let vni = labels
            .iter()
            .position(|l| l == "vni-fgsm/defended")
            .unwrap();
        assert!((100.0 * probs[ops] - 4.18).abs() <= 0.1);
        assert!((100.0 * probs[vni] - 95.82).abs() <= 0.1);
        assert!((100.0 * summary.nash.defender.probs()[0] - 11.73).abs() <= 0.1);
        assert!((summary.transparency_cost - 0.18).abs() <= 0.02);
    }

    #[test]
    fn as_summary_cifar10_is_pure_with_zero_cost() {
        let summary = as_game_summary(&bundled(), "cifar10", DefendedSurrogate::MedianDef).unwrap();
        assert_eq!(summary.nash.kind, SolutionKind::Pure);
        let labels = summary.game.row_labels();
        let support = summary.nash.attacker.support();
        assert_eq!(support.len(), 1);
        assert_eq!(labels[*support.first().unwrap()], "vni-fgsm/defended");
        assert!(summary.nash.defender.is_pure());
        assert!((summary.nash.defender.probs()[1] - 1.0).abs() <= 1e-9);
        assert!(summary.transparency_cost <= 1e-9);
    }

    #[test]
    fn cifar10_attack_game_is_pure_at_ops_defended() {
        let table = bundled();
        let game = table.build_attack_game("cifar10").unwrap();
        let r = solve_minimax(&game);
        assert!((r.value - 16.89).abs() <= 0.02, "value {}", r.value);
        let ops = game.row_labels().iter().position(|l| l == "ops").unwrap();
        assert!((r.row_strategy.probs()[ops] - 1.0).abs() <= 1e-9);
        assert!((r.col_strategy.probs()[1] - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn value_ordering_across_game_families() {
        let table = bundled();
        for dataset in ["cifar10", "imagenet"] {
            let v_attack = solve_minimax(&table.build_attack_game(dataset).unwrap()).value;
            let as_game = table
                .build_attack_surrogate_game(dataset, DefendedSurrogate::MedianDef)
                .unwrap();
            let v_as = solve_minimax(&as_game).value;
            let v_stack = solve_stackelberg_pure(&as_game).value;
            assert!(v_attack <= v_as + 1e-9, "{dataset}");
            assert!(v_as <= v_stack + 1e-9, "{dataset}");
        }
    }

    #[test]
    fn solve_summary_requires_attack_for_surrogate_games() {
        let err = solve_game_summary(
            &bundled(),
            "cifar10",
            GameKind::Surrogate,
            None,
            DefendedSurrogate::MedianDef,
        )
        .unwrap_err();
        assert!(err.to_string().contains("needs an attack name"));
    }

    #[test]
    fn simulation_report_tracks_the_lp_value() {
        let r = simulate_game(
            &bundled(),
            "imagenet",
            GameKind::Surrogate,
            Some("vni-fgsm"),
            DefendedSurrogate::MedianDef,
            100_000,
            7,
        )
        .unwrap();
        assert!(r.gap <= 0.1, "gap {}", r.gap);
        assert_eq!(r.trace.iterations, 100_000);
    }
}
