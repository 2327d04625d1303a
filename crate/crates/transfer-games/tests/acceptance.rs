//! Acceptance suite: every reproduction target and solver guarantee this
//! toolkit ships with, each as one criterion with a printed pass/fail line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines
//! for passing criteria too.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use transfer_games::{
    analysis, enumerate_equilibria, fictitious_play, solve_2x2_closed_form, solve_minimax,
    solve_stackelberg_pure, DefendedSurrogate, MixingFilter, ScenarioTable, SolutionKind,
    SolveStatus, ZeroSumGame,
};

/// Collects failures for one criterion and prints a single verdict line.
struct Criterion {
    name: &'static str,
    failures: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(detail());
        }
    }

    fn finish(self) {
        if self.failures.is_empty() {
            println!("[PASS] {}", self.name);
        } else {
            println!("[FAIL] {}", self.name);
            for f in &self.failures {
                println!("       - {f}");
            }
            panic!("{} failed {} check(s)", self.name, self.failures.len());
        }
    }
}

fn bundled() -> ScenarioTable {
    ScenarioTable::bundled()
}

/// Every game the bundled data defines: 18 surrogate, 2 A&S, 2 attack.
fn bundled_games() -> Vec<(String, ZeroSumGame)> {
    let table = bundled();
    let mut games = Vec::new();
    for dataset in table.datasets() {
        for attack in table.attacks(&dataset).unwrap() {
            games.push((
                format!("{dataset}/{attack} surrogate"),
                table
                    .build_surrogate_game(&dataset, &attack, DefendedSurrogate::MedianDef)
                    .unwrap(),
            ));
        }
        games.push((
            format!("{dataset} attack-surrogate"),
            table
                .build_attack_surrogate_game(&dataset, DefendedSurrogate::MedianDef)
                .unwrap(),
        ));
        games.push((
            format!("{dataset} attack"),
            table.build_attack_game(&dataset).unwrap(),
        ));
    }
    games
}

fn random_game(rng: &mut ChaCha8Rng, max_dim: usize, low: f64, high: f64) -> ZeroSumGame {
    let m = rng.random_range(1..=max_dim);
    let n = rng.random_range(1..=max_dim);
    let payoff: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(low..high)).collect())
        .collect();
    ZeroSumGame::from_matrix(payoff).unwrap()
}

#[test]
fn criterion_1_surrogate_game_reproduction() {
    let mut c = Criterion::new("criterion 1: VNI-FGSM surrogate-game reproduction");
    let table = bundled();

    let game = table
        .build_surrogate_game("cifar10", "vni-fgsm", DefendedSurrogate::MedianDef)
        .unwrap();
    c.check(
        game.payoff() == [vec![85.55, 15.68], vec![29.82, 29.47]],
        || format!("cifar10 normal form {:?}", game.payoff()),
    );
    let r = solve_minimax(&game);
    c.check((r.value - 29.47).abs() <= 1e-9, || {
        format!("cifar10 nash value {}", r.value)
    });
    c.check(
        r.row_strategy.support() == BTreeSet::from([1])
            && r.col_strategy.support() == BTreeSet::from([1]),
        || "cifar10 equilibrium not pure at defended/defended".to_string(),
    );

    let game = table
        .build_surrogate_game("imagenet", "vni-fgsm", DefendedSurrogate::MedianDef)
        .unwrap();
    c.check(
        game.payoff() == [vec![58.16, 30.01], vec![34.84, 36.41]],
        || format!("imagenet normal form {:?}", game.payoff()),
    );
    let r = solve_minimax(&game);
    c.check((r.value - 36.07).abs() <= 0.02, || {
        format!("imagenet nash value {}", r.value)
    });
    for (got, want) in r.row_strategy.probs().iter().zip([0.0528, 0.9472]) {
        c.check((got - want).abs() <= 1e-3, || {
            format!("imagenet attacker prob {got} vs {want}")
        });
    }
    for (got, want) in r.col_strategy.probs().iter().zip([0.2153, 0.7847]) {
        c.check((got - want).abs() <= 1e-3, || {
            format!("imagenet defender prob {got} vs {want}")
        });
    }
    c.finish();
}

#[test]
fn criterion_2_transparency_table_reproduction() {
    let mut c = Criterion::new("criterion 2: Stackelberg-minus-Nash table reproduction");
    let expected_cifar10 = [
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
    let expected_imagenet = [
        ("admix", 0.32),
        ("autoattack", 0.64),
        ("bia", 0.0),
        ("cdtp", 0.02),
        ("lgv", 0.0),
        ("ops", 0.29),
        ("pgn", 0.35),
        ("ssah", 0.0),
        ("vni-fgsm", 0.34),
    ];
    let table = bundled();
    for (dataset, expected, worse_off, mean) in [
        ("cifar10", &expected_cifar10, 5usize, 0.46),
        ("imagenet", &expected_imagenet, 6usize, 0.33),
    ] {
        let report =
            analysis::transparency_report(&table, dataset, DefendedSurrogate::MedianDef).unwrap();
        c.check(report.entries.len() == 9, || {
            format!("{dataset}: {} entries", report.entries.len())
        });
        for (entry, (attack, cost)) in report.entries.iter().zip(expected.iter()) {
            c.check(entry.attack == *attack, || {
                format!("{dataset}: row order {} vs {attack}", entry.attack)
            });
            c.check((entry.cost - cost).abs() <= 0.02, || {
                format!("{dataset}/{attack}: cost {} vs {cost}", entry.cost)
            });
        }
        c.check(report.worse_off_count == worse_off, || {
            format!(
                "{dataset}: worse off {}/9 vs {worse_off}/9",
                report.worse_off_count
            )
        });
        c.check((report.mean_nonzero_cost - mean).abs() <= 0.02, || {
            format!(
                "{dataset}: mean nonzero {} vs {mean}",
                report.mean_nonzero_cost
            )
        });
    }
    c.finish();
}

#[test]
fn criterion_3_mixing_table_reproduction() {
    let mut c = Criterion::new("criterion 3: undefended-probability table reproduction");
    // (attack, cifar10 surrogate/target, imagenet surrogate/target), in %.
    let expected = [
        ("admix", (2.45, 13.84), (5.87, 12.66)),
        ("autoattack", (9.32, 12.26), (16.72, 14.52)),
        ("cdtp", (8.49, 0.83), (9.60, 0.56)),
        ("ops", (8.86, 7.10), (9.22, 7.83)),
        ("pgn", (3.41, 14.94), (5.99, 15.33)),
        ("vni-fgsm", (0.00, 0.00), (5.28, 21.53)),
    ];
    let table = bundled();
    for (dataset, pick) in [("cifar10", 0usize), ("imagenet", 1usize)] {
        let report = analysis::mixing_report(
            &table,
            dataset,
            DefendedSurrogate::MedianDef,
            &MixingFilter::default(),
        )
        .unwrap();
        c.check(report.entries.len() == expected.len(), || {
            format!(
                "{dataset}: {} rows vs {}",
                report.entries.len(),
                expected.len()
            )
        });
        for (entry, (attack, cifar, imagenet)) in report.entries.iter().zip(expected.iter()) {
            let (surrogate, target) = if pick == 0 { *cifar } else { *imagenet };
            c.check(entry.attack == *attack, || {
                format!("{dataset}: row {} vs {attack}", entry.attack)
            });
            c.check(
                (entry.attacker_p_undefended - surrogate).abs() <= 0.05,
                || {
                    format!(
                        "{dataset}/{attack}: surrogate {} vs {surrogate}",
                        entry.attacker_p_undefended
                    )
                },
            );
            c.check((entry.defender_p_undefended - target).abs() <= 0.05, || {
                format!(
                    "{dataset}/{attack}: target {} vs {target}",
                    entry.defender_p_undefended
                )
            });
        }
    }
    c.finish();
}

#[test]
fn criterion_4_attack_surrogate_game() {
    let mut c = Criterion::new("criterion 4: attack-and-surrogate game equilibria");
    let table = bundled();

    let summary =
        analysis::as_game_summary(&table, "imagenet", DefendedSurrogate::MedianDef).unwrap();
    c.check((summary.transparency_cost - 0.18).abs() <= 0.02, || {
        format!(
            "imagenet stackelberg-minus-nash {}",
            summary.transparency_cost
        )
    });
    let labels = summary.game.row_labels();
    let support: Vec<&str> = summary
        .nash
        .attacker
        .support()
        .into_iter()
        .map(|i| labels[i].as_str())
        .collect();
    c.check(support == ["ops/undefended", "vni-fgsm/defended"], || {
        format!("imagenet attacker support {support:?}")
    });
    let p = summary.nash.attacker.probs();
    let ops = labels.iter().position(|l| l == "ops/undefended").unwrap();
    let vni = labels
        .iter()
        .position(|l| l == "vni-fgsm/defended")
        .unwrap();
    c.check((100.0 * p[ops] - 4.18).abs() <= 0.1, || {
        format!("ops/undefended weight {}", 100.0 * p[ops])
    });
    c.check((100.0 * p[vni] - 95.82).abs() <= 0.1, || {
        format!("vni-fgsm/defended weight {}", 100.0 * p[vni])
    });
    c.check(
        (100.0 * summary.nash.defender.probs()[0] - 11.73).abs() <= 0.1,
        || {
            format!(
                "defender P(undefended) {}",
                100.0 * summary.nash.defender.probs()[0]
            )
        },
    );

    let summary =
        analysis::as_game_summary(&table, "cifar10", DefendedSurrogate::MedianDef).unwrap();
    c.check(summary.nash.kind == SolutionKind::Pure, || {
        format!("cifar10 equilibrium kind {:?}", summary.nash.kind)
    });
    let labels = summary.game.row_labels();
    let support: Vec<&str> = summary
        .nash
        .attacker
        .support()
        .into_iter()
        .map(|i| labels[i].as_str())
        .collect();
    c.check(support == ["vni-fgsm/defended"], || {
        format!("cifar10 attacker support {support:?}")
    });
    c.check(
        summary.nash.defender.support() == BTreeSet::from([1]),
        || "cifar10 defender not pure defended".to_string(),
    );
    c.check(summary.transparency_cost <= 1e-9, || {
        format!("cifar10 cost {}", summary.transparency_cost)
    });
    c.finish();
}

#[test]
fn criterion_5_underestimation_reproduction() {
    let mut c = Criterion::new("criterion 5: attack-only underestimation reproduction");
    let table = bundled();
    for (dataset, difference, factor) in [("cifar10", 12.58, 3.73), ("imagenet", 4.22, 2.15)] {
        let report =
            analysis::underestimation_report(&table, dataset, DefendedSurrogate::MedianDef)
                .unwrap();
        c.check((report.difference - difference).abs() <= 0.05, || {
            format!(
                "{dataset}: difference {} vs {difference}",
                report.difference
            )
        });
        c.check((report.factor - factor).abs() <= 0.02, || {
            format!("{dataset}: factor {} vs {factor}", report.factor)
        });
    }
    c.finish();
}

#[test]
fn criterion_6_solver_property_suite() {
    let mut c = Criterion::new("criterion 6: solver property suite");
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_809);

    // Strong duality on 1,000 random games up to 20x20, shift path included.
    for i in 0..1_000 {
        let game = random_game(&mut rng, 20, -25.0, 125.0);
        let r = solve_minimax(&game);
        if r.status != SolveStatus::Optimal {
            c.check(false, || format!("game {i}: status {:?}", r.status));
            continue;
        }
        let floor = game
            .col_payoffs(&r.row_strategy)
            .unwrap()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        let ceiling = game
            .row_payoffs(&r.col_strategy)
            .unwrap()
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        c.check(
            floor >= r.value - 1e-7 && ceiling <= r.value + 1e-7 && ceiling - floor >= -1e-7,
            || {
                format!(
                    "game {i}: duality gap [{floor}, {ceiling}] around {}",
                    r.value
                )
            },
        );
    }

    // Closed form vs LP on 10,000 random 2x2 games.
    for i in 0..10_000 {
        let payoff: Vec<Vec<f64>> = (0..2)
            .map(|_| (0..2).map(|_| rng.random_range(0.0..100.0)).collect())
            .collect();
        let game = ZeroSumGame::from_matrix(payoff).unwrap();
        let lp = solve_minimax(&game);
        let cf = solve_2x2_closed_form(&game).unwrap();
        c.check((lp.value - cf.value).abs() <= 1e-7, || {
            format!("2x2 game {i}: lp {} vs closed form {}", lp.value, cf.value)
        });
        // Strategy comparison only where the equilibrium is provably
        // unique (no near-ties anywhere in the matrix).
        let a = game.payoff();
        let gaps = [
            (a[0][0] - a[1][0]).abs(),
            (a[0][1] - a[1][1]).abs(),
            (a[0][0] - a[0][1]).abs(),
            (a[1][0] - a[1][1]).abs(),
        ];
        if gaps.iter().all(|g| *g > 1e-6) {
            for (p, q) in lp
                .row_strategy
                .probs()
                .iter()
                .zip(cf.row_strategy.probs())
                .chain(lp.col_strategy.probs().iter().zip(cf.col_strategy.probs()))
            {
                c.check((p - q).abs() <= 1e-6, || {
                    format!("2x2 game {i}: strategy {p} vs {q}")
                });
            }
        }
    }

    // Enumerated equilibria share one value and admit no profitable
    // deviation; Stackelberg dominates Nash. Random plus bundled games.
    let mut suite: Vec<(String, ZeroSumGame)> = (0..1_000)
        .map(|i| (format!("random {i}"), random_game(&mut rng, 6, 0.0, 100.0)))
        .collect();
    suite.extend(bundled_games());
    for (name, game) in &suite {
        let lp = solve_minimax(game);
        let equilibria = enumerate_equilibria(game).unwrap();
        c.check(!equilibria.is_empty(), || {
            format!("{name}: no equilibria found")
        });
        for eq in &equilibria {
            c.check((eq.value - lp.value).abs() <= 1e-7, || {
                format!("{name}: equilibrium value {} vs lp {}", eq.value, lp.value)
            });
            let best_row = game
                .row_payoffs(&eq.defender)
                .unwrap()
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            let best_col = game
                .col_payoffs(&eq.attacker)
                .unwrap()
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            c.check(best_row <= eq.value + 1e-7, || {
                format!("{name}: profitable row deviation to {best_row}")
            });
            c.check(best_col >= eq.value - 1e-7, || {
                format!("{name}: profitable column deviation to {best_col}")
            });
        }
        let stackelberg = solve_stackelberg_pure(game);
        c.check(stackelberg.value >= lp.value - 1e-7, || {
            format!(
                "{name}: stackelberg {} below nash {}",
                stackelberg.value, lp.value
            )
        });
    }

    // Affine equivariance, exact to 1e-9 for the payoff algebra and within
    // solver tolerance for the LP.
    for i in 0..200 {
        let game = random_game(&mut rng, 8, 0.0, 100.0);
        let a = rng.random_range(0.5..2.0);
        let b = rng.random_range(-25.0..25.0);
        let mapped = ZeroSumGame::from_matrix(
            game.payoff()
                .iter()
                .map(|row| row.iter().map(|v| a * v + b).collect())
                .collect(),
        )
        .unwrap();
        let x = transfer_games::MixedStrategy::uniform(game.rows());
        let y = transfer_games::MixedStrategy::uniform(game.cols());
        let direct = mapped.expected_payoff(&x, &y).unwrap();
        let scaled = a * game.expected_payoff(&x, &y).unwrap() + b;
        c.check((direct - scaled).abs() <= 1e-9, || {
            format!("affine {i}: payoff {direct} vs {scaled}")
        });
        c.check(
            game.best_response_rows(&y).unwrap() == mapped.best_response_rows(&y).unwrap(),
            || format!("affine {i}: best responses moved"),
        );
        let base = solve_minimax(&game);
        let image = solve_minimax(&mapped);
        c.check((image.value - (a * base.value + b)).abs() <= 1e-7, || {
            format!(
                "affine {i}: lp value {} vs {}",
                image.value,
                a * base.value + b
            )
        });
        c.check(
            base.row_strategy.support() == image.row_strategy.support()
                && base.col_strategy.support() == image.col_strategy.support(),
            || format!("affine {i}: supports moved"),
        );
    }
    c.finish();
}

#[test]
fn criterion_7_fictitious_play_oracle() {
    let mut c = Criterion::new("criterion 7: fictitious-play oracle");
    for (name, game) in bundled_games() {
        let lp = solve_minimax(&game).value;
        let trace = fictitious_play(&game, 100_000, 7);
        c.check((trace.empirical_value - lp).abs() <= 0.1, || {
            format!("{name}: empirical {} vs lp {lp}", trace.empirical_value)
        });
        // Deterministic under a fixed seed.
        let again = fictitious_play(&game, 100_000, 7);
        c.check(
            trace.empirical_attacker == again.empirical_attacker
                && trace.empirical_defender == again.empirical_defender
                && trace.value_history == again.value_history,
            || format!("{name}: trace not reproducible under fixed seed"),
        );
    }
    c.finish();
}

#[test]
fn criterion_8_data_integrity() {
    let mut c = Criterion::new("criterion 8: bundled-data integrity");

    // Both bundled files validate, alone and merged.
    for (name, source) in [
        ("cifar10", transfer_games::scenario::BUNDLED_CIFAR10),
        ("imagenet", transfer_games::scenario::BUNDLED_IMAGENET),
    ] {
        match ScenarioTable::parse(source.as_bytes()) {
            Ok(table) => {
                c.check(table.records().len() == 74, || {
                    format!("{name}: {} records", table.records().len())
                });
            }
            Err(e) => c.check(false, || format!("{name}: {e}")),
        }
    }
    let table = bundled();
    c.check(table.records().len() == 148, || {
        format!("merged: {} records", table.records().len())
    });

    // Round trip is the identity in both serialization formats.
    c.check(
        ScenarioTable::parse(table.to_csv_string().as_bytes()).unwrap() == table,
        || "csv round trip changed the table".to_string(),
    );
    c.check(
        ScenarioTable::parse(table.to_json_string().as_bytes()).unwrap() == table,
        || "json round trip changed the table".to_string(),
    );

    // Invariants are enforced with exhaustive diagnostics: strip one cell,
    // duplicate another, push one out of range; every problem must be
    // named in a single error.
    let mut csv = String::from("dataset,attack,surrogate,target,degradation\n");
    for r in table.records().iter().filter(|r| r.dataset == "cifar10") {
        if r.attack == "admix"
            && r.surrogate == transfer_games::SurrogateClass::Undefended
            && r.target == transfer_games::TargetClass::Defended
        {
            continue; // dropped cell
        }
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.dataset, r.attack, r.surrogate, r.target, r.degradation
        ));
    }
    csv.push_str("cifar10,lgv,undefended,undefended,98.43\n"); // duplicate
    csv.push_str("cifar10,zzz,undefended,undefended,150.0\n"); // out of range
    match ScenarioTable::parse(csv.as_bytes()) {
        Ok(_) => c.check(false, || "corrupted table validated".to_string()),
        Err(e) => {
            let text = e.to_string();
            for needle in [
                "missing cell (cifar10, admix, undefended, defended)",
                "duplicate key (cifar10, lgv, undefended, undefended)",
                "out of range",
                // the zzz attack also lacks its other 7 cells
                "missing cell (cifar10, zzz, undefended, defended)",
            ] {
                c.check(text.contains(needle), || {
                    format!("diagnostics missing '{needle}' in: {text}")
                });
            }
        }
    }

    // The solve path rejects what the validator rejects: games can only be
    // built from validated tables, so a failed parse is a hard stop.
    c.check(ScenarioTable::parse(&b""[..]).is_err(), || {
        "empty input accepted".to_string()
    });
    c.finish();
}
