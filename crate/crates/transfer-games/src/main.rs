//! Command-line front end: validate scenario files, solve games, emit the
//! batch reports, and run fictitious-play simulations.
//!
//! Exit codes are a stable scripting contract: 0 success, 1 usage error,
//! 2 data or domain error, 3 i/o error.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use transfer_games::{
    analysis, render, DefendedSurrogate, Error, GameKind, MixingFilter, OutputFormat,
    ScenarioTable, Violation,
};

/// Directory override for the bundled datasets.
const DATA_DIR_ENV: &str = "TRANSFER_GAMES_DATA";

#[derive(Parser)]
#[command(
    name = "transfer-games",
    version,
    about = "Solve and analyze the attacker/defender games defined by transferable-attack degradation tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file against every table invariant.
    Validate {
        /// Scenario file (defaults to the bundled datasets).
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Solve one game: normal form, Nash equilibrium, Stackelberg
    /// commitment, and transparency cost.
    Solve {
        #[arg(long)]
        dataset: String,
        /// Game family to build.
        #[arg(long, value_enum)]
        game: GameKindArg,
        /// Attack name; required for (and only for) the surrogate game.
        #[arg(long)]
        attack: Option<String>,
        #[arg(long, value_enum, default_value_t = SurrogateArg::MedianDef)]
        defended_surrogate: SurrogateArg,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Emit a transparency, mixing, or underestimation report.
    Report {
        #[arg(value_enum)]
        kind: ReportKindArg,
        #[arg(long)]
        dataset: Option<String>,
        /// Report every dataset in the table, in sorted order.
        #[arg(long)]
        all_datasets: bool,
        #[arg(long, value_enum, default_value_t = SurrogateArg::MedianDef)]
        defended_surrogate: SurrogateArg,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
    /// Run fictitious play on one game and compare against the LP value.
    Simulate {
        #[arg(long)]
        dataset: String,
        #[arg(long, value_enum)]
        game: GameKindArg,
        #[arg(long)]
        attack: Option<String>,
        #[arg(long, value_enum, default_value_t = SurrogateArg::MedianDef)]
        defended_surrogate: SurrogateArg,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        iterations: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GameKindArg {
    Surrogate,
    AttackSurrogate,
    Attack,
}

impl From<GameKindArg> for GameKind {
    fn from(arg: GameKindArg) -> Self {
        match arg {
            GameKindArg::Surrogate => GameKind::Surrogate,
            GameKindArg::AttackSurrogate => GameKind::AttackSurrogate,
            GameKindArg::Attack => GameKind::Attack,
        }
    }
}

#[allow(clippy::enum_variant_names)]
#[derive(Debug, Clone, Copy, ValueEnum)]
enum SurrogateArg {
    WorstDef,
    MedianDef,
    BestDef,
}

impl From<SurrogateArg> for DefendedSurrogate {
    fn from(arg: SurrogateArg) -> Self {
        match arg {
            SurrogateArg::WorstDef => DefendedSurrogate::WorstDef,
            SurrogateArg::MedianDef => DefendedSurrogate::MedianDef,
            SurrogateArg::BestDef => DefendedSurrogate::BestDef,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(arg: FormatArg) -> Self {
        match arg {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportKindArg {
    Transparency,
    Mixing,
    Underestimation,
}

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_DOMAIN: i32 = 2;
const EXIT_IO: i32 = 3;

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let informational = matches!(
                err.kind(),
                ErrorKind::DisplayHelp
                    | ErrorKind::DisplayVersion
                    | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            );
            let _ = err.print();
            return if informational { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match dispatch(cli) {
        Ok(output) => {
            print!("{output}");
            EXIT_OK
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Domain(err)) => {
            eprintln!("error: {err}");
            match err {
                Error::Io(_) => EXIT_IO,
                _ => EXIT_DOMAIN,
            }
        }
    }
}

enum Failure {
    Usage(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::Domain(err)
    }
}

fn dispatch(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Validate { data } => {
            let table = load_table(data.as_deref())?;
            Ok(format!(
                "ok: {} records, datasets: {}\n",
                table.records().len(),
                table.datasets().join(", ")
            ))
        }
        Command::Solve {
            dataset,
            game,
            attack,
            defended_surrogate,
            data,
            format,
        } => {
            let kind = GameKind::from(game);
            check_attack_flag(kind, attack.as_deref())?;
            let table = load_table(data.as_deref())?;
            let summary = analysis::solve_game_summary(
                &table,
                &dataset,
                kind,
                attack.as_deref(),
                defended_surrogate.into(),
            )?;
            Ok(render::render_game_summary(&summary, format.into()))
        }
        Command::Report {
            kind,
            dataset,
            all_datasets,
            defended_surrogate,
            data,
            format,
        } => {
            let table = load_table(data.as_deref())?;
            let datasets = match (dataset, all_datasets) {
                (Some(_), true) => {
                    return Err(Failure::Usage(
                        "--dataset and --all-datasets are mutually exclusive".into(),
                    ))
                }
                (Some(one), false) => vec![one],
                (None, true) => table.datasets(),
                (None, false) => {
                    return Err(Failure::Usage(
                        "pass --dataset <name> or --all-datasets".into(),
                    ))
                }
            };
            let defended = DefendedSurrogate::from(defended_surrogate);
            let mut out = String::new();
            for (i, ds) in datasets.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&render_report(&table, ds, kind, defended, format.into())?);
            }
            Ok(out)
        }
        Command::Simulate {
            dataset,
            game,
            attack,
            defended_surrogate,
            iterations,
            seed,
            data,
            format,
        } => {
            let kind = GameKind::from(game);
            check_attack_flag(kind, attack.as_deref())?;
            let table = load_table(data.as_deref())?;
            let report = analysis::simulate_game(
                &table,
                &dataset,
                kind,
                attack.as_deref(),
                defended_surrogate.into(),
                iterations,
                seed,
            )?;
            Ok(render::render_simulation(&report, format.into()))
        }
    }
}

fn check_attack_flag(kind: GameKind, attack: Option<&str>) -> Result<(), Failure> {
    match (kind, attack) {
        (GameKind::Surrogate, None) => Err(Failure::Usage(
            "--attack is required when --game surrogate".into(),
        )),
        (GameKind::AttackSurrogate | GameKind::Attack, Some(_)) => Err(Failure::Usage(format!(
            "--attack does not apply to --game {kind}"
        ))),
        _ => Ok(()),
    }
}

fn render_report(
    table: &ScenarioTable,
    dataset: &str,
    kind: ReportKindArg,
    defended: DefendedSurrogate,
    format: OutputFormat,
) -> Result<String, Failure> {
    Ok(match kind {
        ReportKindArg::Transparency => {
            let report = analysis::transparency_report(table, dataset, defended)?;
            render::render_transparency(&report, format)
        }
        ReportKindArg::Mixing => {
            let report =
                analysis::mixing_report(table, dataset, defended, &MixingFilter::default())?;
            render::render_mixing(&report, format)
        }
        ReportKindArg::Underestimation => {
            let report = analysis::underestimation_report(table, dataset, defended)?;
            render::render_underestimation(&report, format)
        }
    })
}

/// Resolution order: explicit `--data` file, then the `TRANSFER_GAMES_DATA`
/// directory, then the datasets compiled into the binary.
fn load_table(data: Option<&Path>) -> Result<ScenarioTable, Error> {
    if let Some(path) = data {
        let file = File::open(path)?;
        return ScenarioTable::parse(BufReader::new(file));
    }
    if let Ok(dir) = std::env::var(DATA_DIR_ENV) {
        return load_data_dir(Path::new(&dir));
    }
    Ok(ScenarioTable::bundled())
}

/// Merge every `*.csv` / `*.json` scenario file in a directory, each of
/// which must validate on its own.
fn load_data_dir(dir: &Path) -> Result<ScenarioTable, Error> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| {
            matches!(
                p.extension().and_then(|e| e.to_str()),
                Some("csv") | Some("json")
            )
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Validation(vec![Violation::global(format!(
            "no scenario files (*.csv, *.json) in {}",
            dir.display()
        ))]));
    }
    let mut records = Vec::new();
    for path in paths {
        let file = File::open(&path)?;
        let table = ScenarioTable::parse(BufReader::new(file))?;
        records.extend(table.records().iter().cloned());
    }
    ScenarioTable::from_records(records)
}
