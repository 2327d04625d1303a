//! Report rendering: aligned plain text, delimiter-separated values, and
//! JSON. The same fields appear in all three; text and CSV use the half-up
//! two-decimal display convention, JSON carries the unrounded numbers.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::analysis::{
    round2, GameSummary, MixingReport, SimulationReport, TransparencyReport, UnderestimationReport,
};
use crate::game::TIE_TOLERANCE;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Text => f.write_str("text"),
            Self::Csv => f.write_str("csv"),
            Self::Json => f.write_str("json"),
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Self::Text),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!(
                "unknown format '{other}' (expected text, csv, or json)"
            )),
        }
    }
}

/// Two decimals, half-up.
fn fmt2(x: f64) -> String {
    format!("{:.2}", round2(x))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("reports serialize");
    out.push('\n');
    out
}

/// Left-pad every cell so columns line up; first column left-aligned.
fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(String::len)
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        for (c, cell) in row.iter().enumerate() {
            if c == 0 {
                out.push_str(&format!("{cell:<width$}", width = widths[0]));
            } else {
                out.push_str(&format!("  {cell:>width$}", width = widths[c]));
            }
        }
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
    }
    out
}

pub fn render_transparency(report: &TransparencyReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(report),
        OutputFormat::Csv => {
            let mut out = String::from("attack,nash_value,stackelberg_value,cost\n");
            for e in &report.entries {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    e.attack,
                    fmt2(e.nash_value),
                    fmt2(e.stackelberg_value),
                    fmt2(e.cost)
                ));
            }
            out.push_str(&format!(
                "# worse_off,{}/{}\n# mean_nonzero_cost,{}\n# {}\n",
                report.worse_off_count,
                report.attack_count,
                fmt2(report.mean_nonzero_cost),
                report.formula
            ));
            out
        }
        OutputFormat::Text => {
            let mut out = format!(
                "transparency report: {} (defended surrogate: {})\n",
                report.dataset, report.defended_surrogate
            );
            let mut rows = vec![vec![
                "attack".to_string(),
                "nash".to_string(),
                "stackelberg".to_string(),
                "cost".to_string(),
            ]];
            for e in &report.entries {
                rows.push(vec![
                    e.attack.clone(),
                    fmt2(e.nash_value),
                    fmt2(e.stackelberg_value),
                    fmt2(e.cost),
                ]);
            }
            out.push_str(&align(&rows));
            out.push_str(&format!(
                "worse off: {}/{}\nmean nonzero cost: {}\n",
                report.worse_off_count,
                report.attack_count,
                fmt2(report.mean_nonzero_cost)
            ));
            out
        }
    }
}

pub fn render_mixing(report: &MixingReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(report),
        OutputFormat::Csv => {
            let mut out = String::from("attack,attacker_p_undefended,defender_p_undefended,kind\n");
            for e in &report.entries {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    e.attack,
                    fmt2(e.attacker_p_undefended),
                    fmt2(e.defender_p_undefended),
                    e.kind
                ));
            }
            out.push_str(&format!("# {}\n", report.formula));
            out
        }
        OutputFormat::Text => {
            let mut out = format!(
                "mixing report: {} (defended surrogate: {})\n",
                report.dataset, report.defended_surrogate
            );
            let mut rows = vec![vec![
                "attack".to_string(),
                "p(und. surrogate)".to_string(),
                "p(und. target)".to_string(),
                "kind".to_string(),
            ]];
            for e in &report.entries {
                rows.push(vec![
                    e.attack.clone(),
                    fmt2(e.attacker_p_undefended),
                    fmt2(e.defender_p_undefended),
                    e.kind.to_string(),
                ]);
            }
            out.push_str(&align(&rows));
            out
        }
    }
}

pub fn render_underestimation(report: &UnderestimationReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(report),
        OutputFormat::Csv => {
            let mut out = String::from("field,value\n");
            out.push_str(&format!(
                "v_attack_surrogate,{}\nv_attack_only,{}\ndifference,{}\nfactor,{}\nbaseline_defended,{}\n",
                fmt2(report.v_attack_surrogate),
                fmt2(report.v_attack_only),
                fmt2(report.difference),
                fmt2(report.factor),
                fmt2(report.baseline_defended)
            ));
            out.push_str(&format!("# {}\n", report.formula));
            out
        }
        OutputFormat::Text => {
            format!(
                "underestimation report: {} (defended surrogate: {})\n\
                 attack-and-surrogate value: {}\n\
                 attack-only value:          {}\n\
                 difference:                 {}\n\
                 baseline (defended):        {}\n\
                 underestimation factor:     {}x\n\
                 formula: {}\n",
                report.dataset,
                report.defended_surrogate,
                fmt2(report.v_attack_surrogate),
                fmt2(report.v_attack_only),
                fmt2(report.difference),
                fmt2(report.baseline_defended),
                fmt2(report.factor),
                report.formula
            )
        }
    }
}

pub fn render_game_summary(summary: &GameSummary, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(summary),
        OutputFormat::Csv => {
            let mut out = String::from("field,value\n");
            out.push_str(&format!("dataset,{}\n", summary.dataset));
            out.push_str(&format!("game,{}\n", summary.game_kind));
            if let Some(attack) = &summary.attack {
                out.push_str(&format!("attack,{attack}\n"));
            }
            out.push_str(&format!(
                "defended_surrogate,{}\n",
                summary.defended_surrogate
            ));
            out.push_str(&format!("nash_value,{}\n", fmt2(summary.nash.value)));
            out.push_str(&format!("nash_kind,{}\n", summary.nash.kind));
            out.push_str(&format!(
                "stackelberg_value,{}\n",
                fmt2(summary.stackelberg.value)
            ));
            out.push_str(&format!(
                "stackelberg_commit,{}\n",
                summary.game.col_labels()[summary.stackelberg.committed_col]
            ));
            out.push_str(&format!(
                "transparency_cost,{}\n",
                fmt2(summary.transparency_cost)
            ));
            for (label, p) in summary
                .game
                .row_labels()
                .iter()
                .zip(summary.nash.attacker.probs())
            {
                out.push_str(&format!("attacker:{label},{}\n", fmt2(100.0 * p)));
            }
            for (label, p) in summary
                .game
                .col_labels()
                .iter()
                .zip(summary.nash.defender.probs())
            {
                out.push_str(&format!("defender:{label},{}\n", fmt2(100.0 * p)));
            }
            out
        }
        OutputFormat::Text => {
            let mut out = String::new();
            let game_desc = match &summary.attack {
                Some(attack) => format!("{} ({attack})", summary.game_kind),
                None => summary.game_kind.to_string(),
            };
            out.push_str(&format!(
                "dataset: {}\ngame: {game_desc}\ndefended surrogate: {}\n\n",
                summary.dataset, summary.defended_surrogate
            ));

            out.push_str("payoff (attacker % degradation)\n");
            let mut rows = vec![{
                let mut header = vec![String::new()];
                header.extend(summary.game.col_labels().iter().cloned());
                header
            }];
            for (label, payoff_row) in summary.game.row_labels().iter().zip(summary.game.payoff()) {
                let mut row = vec![label.clone()];
                row.extend(payoff_row.iter().map(|v| fmt2(*v)));
                rows.push(row);
            }
            out.push_str(&align(&rows));

            out.push_str(&format!(
                "\nnash equilibrium ({}, {})\nvalue: {}\n",
                summary.nash.method,
                summary.nash.kind,
                fmt2(summary.nash.value)
            ));
            out.push_str(&format!(
                "attacker: {}\n",
                strategy_line(summary.game.row_labels(), summary.nash.attacker.probs())
            ));
            out.push_str(&format!(
                "defender: {}\n",
                strategy_line(summary.game.col_labels(), summary.nash.defender.probs())
            ));

            let commit = &summary.game.col_labels()[summary.stackelberg.committed_col];
            out.push_str(&format!(
                "\nstackelberg (pure commitment)\ncommit: {commit}\nvalue: {}\n",
                fmt2(summary.stackelberg.value)
            ));
            let followers: Vec<&str> = summary
                .stackelberg
                .follower_rows
                .iter()
                .map(|&i| summary.game.row_labels()[i].as_str())
                .collect();
            out.push_str(&format!(
                "follower best responses: {}\n",
                followers.join(", ")
            ));

            out.push_str(&format!(
                "\ntransparency cost: {}\n",
                fmt2(summary.transparency_cost)
            ));
            out
        }
    }
}

/// Support entries as `label p%`, skipping zero-probability actions.
fn strategy_line(labels: &[String], probs: &[f64]) -> String {
    let parts: Vec<String> = labels
        .iter()
        .zip(probs)
        .filter(|(_, &p)| p > TIE_TOLERANCE)
        .map(|(l, &p)| format!("{l} {}%", fmt2(100.0 * p)))
        .collect();
    parts.join(", ")
}

pub fn render_simulation(report: &SimulationReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => json(report),
        OutputFormat::Csv => {
            let mut out = String::from("iteration,empirical_value\n");
            for (t, v) in &report.trace.value_history {
                out.push_str(&format!("{t},{v:.4}\n"));
            }
            out.push_str(&format!(
                "# lp_value,{:.4}\n# empirical_value,{:.4}\n# gap,{:.4}\n# seed,{}\n",
                report.lp_value, report.empirical_value, report.gap, report.seed
            ));
            out
        }
        OutputFormat::Text => {
            let game_desc = match &report.attack {
                Some(attack) => format!("{} ({attack})", report.game_kind),
                None => report.game_kind.to_string(),
            };
            let mut out = format!(
                "simulation: {game_desc} on {}\niterations: {}  seed: {}\n\
                 lp value:        {:.4}\nempirical value: {:.4}\ngap:             {:.4}\n",
                report.dataset,
                report.trace.iterations,
                report.seed,
                report.lp_value,
                report.empirical_value,
                report.gap
            );
            out.push_str("history (iteration, empirical value):\n");
            for (t, v) in &report.trace.value_history {
                out.push_str(&format!("  {t} {v:.4}\n"));
            }
            out
        }
    }
}
