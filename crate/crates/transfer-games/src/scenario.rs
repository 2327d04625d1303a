//! Scenario-table ingestion, validation, and game construction.
//!
//! A scenario table holds measured accuracy-degradation records keyed by
//! (dataset, attack, surrogate class, target class), plus `no-attack`
//! baseline rows per dataset. The documented input is delimiter-separated
//! text with one header line; a structurally identical JSON variant is
//! accepted for machine producers. All invariant failures are reported
//! together, with input locations.
//!
//! The three game families are built from a validated table:
//! - Surrogate game: fixed attack, attacker picks the surrogate class.
//! - Attack-and-surrogate (A&S) game: attacker picks both.
//! - Attack game: attacker picks the attack, surrogate fixed undefended.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::game::ZeroSumGame;

pub const CSV_HEADER: &str = "dataset,attack,surrogate,target,degradation";

/// Reserved attack name for the clean-input baseline rows.
pub const NO_ATTACK: &str = "no-attack";

/// Bundled degradation tables shipped with the repository.
pub const BUNDLED_CIFAR10: &str = include_str!("../../../data/cifar10.csv");
pub const BUNDLED_IMAGENET: &str = include_str!("../../../data/imagenet.csv");

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

/// Which model the attacker crafts perturbations against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurrogateClass {
    Undefended,
    WorstDef,
    MedianDef,
    BestDef,
    /// Baseline rows only: no attack, hence no surrogate.
    None,
}

impl SurrogateClass {
    pub fn token(self) -> &'static str {
        match self {
            Self::Undefended => "undefended",
            Self::WorstDef => "worst-def",
            Self::MedianDef => "median-def",
            Self::BestDef => "best-def",
            Self::None => "none",
        }
    }
}

impl fmt::Display for SurrogateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SurrogateClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "undefended" => Ok(Self::Undefended),
            "worst-def" => Ok(Self::WorstDef),
            "median-def" => Ok(Self::MedianDef),
            "best-def" => Ok(Self::BestDef),
            "none" => Ok(Self::None),
            other => Err(format!(
                "unknown surrogate '{other}' (expected undefended, worst-def, median-def, best-def, or none)"
            )),
        }
    }
}

/// Which model class the attack is delivered against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetClass {
    Undefended,
    Defended,
}

impl TargetClass {
    pub fn token(self) -> &'static str {
        match self {
            Self::Undefended => "undefended",
            Self::Defended => "defended",
        }
    }
}

impl fmt::Display for TargetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for TargetClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "undefended" => Ok(Self::Undefended),
            "defended" => Ok(Self::Defended),
            other => Err(format!(
                "unknown target '{other}' (expected undefended or defended)"
            )),
        }
    }
}

/// Which defended surrogate row the built games use. The robustness of the
/// defended surrogate barely moves transferability, so this is a parameter
/// with the median as the default rather than a constant.
#[allow(clippy::enum_variant_names)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefendedSurrogate {
    WorstDef,
    #[default]
    MedianDef,
    BestDef,
}

impl DefendedSurrogate {
    pub fn class(self) -> SurrogateClass {
        match self {
            Self::WorstDef => SurrogateClass::WorstDef,
            Self::MedianDef => SurrogateClass::MedianDef,
            Self::BestDef => SurrogateClass::BestDef,
        }
    }
}

impl fmt::Display for DefendedSurrogate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.class().token())
    }
}

impl FromStr for DefendedSurrogate {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "worst-def" => Ok(Self::WorstDef),
            "median-def" => Ok(Self::MedianDef),
            "best-def" => Ok(Self::BestDef),
            other => Err(format!(
                "unknown defended surrogate '{other}' (expected worst-def, median-def, or best-def)"
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------

/// One measured accuracy-degradation entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffRecord {
    pub dataset: String,
    pub attack: String,
    pub surrogate: SurrogateClass,
    pub target: TargetClass,
    /// Percent degradation in [0, 100].
    pub degradation: f64,
}

type RecordKey = (String, String, SurrogateClass, TargetClass);

impl PayoffRecord {
    fn key(&self) -> RecordKey {
        (
            self.dataset.clone(),
            self.attack.clone(),
            self.surrogate,
            self.target,
        )
    }

    fn key_display(&self) -> String {
        format!(
            "({}, {}, {}, {})",
            self.dataset, self.attack, self.surrogate, self.target
        )
    }
}

/// JSON document shape: `{"records": [...]}`. A bare top-level array of
/// records is also accepted.
#[derive(Debug, Serialize, Deserialize)]
struct RecordsDoc {
    records: Vec<PayoffRecord>,
}

// ---------------------------------------------------------------------------
// ScenarioTable
// ---------------------------------------------------------------------------

/// A validated, canonically ordered collection of payoff records.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTable {
    records: Vec<PayoffRecord>,
    index: BTreeMap<RecordKey, f64>,
}

impl ScenarioTable {
    /// Parse a byte stream in either the delimiter-separated or the JSON
    /// record format, then validate every table invariant. All problems are
    /// reported together, with line numbers where the input has lines.
    pub fn parse<R: Read>(mut source: R) -> Result<Self> {
        let mut buf = Vec::new();
        source.read_to_end(&mut buf)?;
        match buf.iter().find(|b| !b.is_ascii_whitespace()) {
            Some(b'{') | Some(b'[') => Self::parse_json(&buf),
            _ => Self::parse_csv(&buf),
        }
    }

    /// Validate records produced in memory. Diagnostics cite record indices
    /// instead of line numbers.
    pub fn from_records(records: Vec<PayoffRecord>) -> Result<Self> {
        let located = records
            .into_iter()
            .enumerate()
            .map(|(i, r)| (r, Some(format!("record {i}"))))
            .collect();
        Self::validate(located)
    }

    fn parse_csv(buf: &[u8]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(buf);

        let mut problems: Vec<Violation> = Vec::new();
        let mut located: Vec<(PayoffRecord, Option<String>)> = Vec::new();
        let mut saw_any = false;
        for row in reader.records() {
            let row = match row {
                Ok(r) => r,
                Err(e) => {
                    problems.push(Violation::global(format!("unreadable row: {e}")));
                    continue;
                }
            };
            let line = row.position().map_or(0, |p| p.line());
            if !saw_any {
                saw_any = true;
                let header: Vec<&str> = CSV_HEADER.split(',').collect();
                if row.iter().collect::<Vec<_>>() != header {
                    problems.push(Violation::at_line(
                        line,
                        format!("expected header '{CSV_HEADER}'"),
                    ));
                }
                continue;
            }
            if row.len() != 5 {
                problems.push(Violation::at_line(
                    line,
                    format!("expected 5 fields, got {}", row.len()),
                ));
                continue;
            }
            let mut ok = true;
            let surrogate = SurrogateClass::from_str(&row[2]).unwrap_or_else(|e| {
                problems.push(Violation::at_line(line, e));
                ok = false;
                SurrogateClass::None
            });
            let target = TargetClass::from_str(&row[3]).unwrap_or_else(|e| {
                problems.push(Violation::at_line(line, e));
                ok = false;
                TargetClass::Undefended
            });
            let degradation = parse_degradation(&row[4]).unwrap_or_else(|e| {
                problems.push(Violation::at_line(line, e));
                ok = false;
                0.0
            });
            if ok {
                located.push((
                    PayoffRecord {
                        dataset: row[0].to_string(),
                        attack: row[1].to_string(),
                        surrogate,
                        target,
                        degradation,
                    },
                    Some(format!("line {line}")),
                ));
            }
        }
        if !problems.is_empty() {
            return Err(Error::Parse(problems));
        }
        Self::validate(located)
    }

    fn parse_json(buf: &[u8]) -> Result<Self> {
        let first = buf.iter().find(|b| !b.is_ascii_whitespace());
        let records: Vec<PayoffRecord> = if first == Some(&b'[') {
            serde_json::from_slice(buf).map_err(json_parse_error)?
        } else {
            serde_json::from_slice::<RecordsDoc>(buf)
                .map_err(json_parse_error)?
                .records
        };
        Self::from_records(records)
    }

    fn validate(located: Vec<(PayoffRecord, Option<String>)>) -> Result<Self> {
        let mut problems: Vec<Violation> = Vec::new();
        if located.is_empty() {
            return Err(Error::Validation(vec![Violation::global("no datasets")]));
        }

        // Record-level checks.
        for (record, loc) in &located {
            let mut push = |msg: String| problems.push(Violation::new(loc.clone(), msg));
            for (field, value) in [("dataset", &record.dataset), ("attack", &record.attack)] {
                if !valid_token(value) {
                    push(format!(
                        "{field} '{value}' is not a lowercase token ([a-z0-9._-], starting alphanumeric)"
                    ));
                }
            }
            if !record.degradation.is_finite() || !(0.0..=100.0).contains(&record.degradation) {
                push(format!(
                    "degradation {} out of range [0, 100]",
                    record.degradation
                ));
            }
            let is_baseline = record.attack == NO_ATTACK;
            let has_none = record.surrogate == SurrogateClass::None;
            if is_baseline && !has_none {
                push(format!(
                    "attack '{NO_ATTACK}' requires surrogate 'none', got '{}'",
                    record.surrogate
                ));
            }
            if !is_baseline && has_none {
                push(format!(
                    "surrogate 'none' is reserved for attack '{NO_ATTACK}'"
                ));
            }
        }

        // Duplicate keys.
        let mut first_seen: BTreeMap<RecordKey, &Option<String>> = BTreeMap::new();
        for (record, loc) in &located {
            match first_seen.get(&record.key()) {
                Some(prev) => {
                    let earlier = prev.as_deref().unwrap_or("earlier");
                    problems.push(Violation::new(
                        loc.clone(),
                        format!(
                            "duplicate key {} (first at {earlier})",
                            record.key_display()
                        ),
                    ));
                }
                None => {
                    first_seen.insert(record.key(), loc);
                }
            }
        }

        // Completeness per dataset: both baselines, and all 8 surrogate x
        // target cells per attack.
        let keys: BTreeSet<RecordKey> = located.iter().map(|(r, _)| r.key()).collect();
        let mut datasets: BTreeSet<&str> = BTreeSet::new();
        let mut attacks: BTreeSet<(&str, &str)> = BTreeSet::new();
        for (record, _) in &located {
            datasets.insert(&record.dataset);
            if record.attack != NO_ATTACK {
                attacks.insert((&record.dataset, &record.attack));
            }
        }
        for dataset in &datasets {
            for target in [TargetClass::Undefended, TargetClass::Defended] {
                let key = (
                    dataset.to_string(),
                    NO_ATTACK.to_string(),
                    SurrogateClass::None,
                    target,
                );
                if !keys.contains(&key) {
                    problems.push(Violation::global(format!(
                        "dataset '{dataset}' is missing the {NO_ATTACK} baseline for target '{target}'"
                    )));
                }
            }
        }
        for (dataset, attack) in &attacks {
            for surrogate in [
                SurrogateClass::Undefended,
                SurrogateClass::WorstDef,
                SurrogateClass::MedianDef,
                SurrogateClass::BestDef,
            ] {
                for target in [TargetClass::Undefended, TargetClass::Defended] {
                    let key = (dataset.to_string(), attack.to_string(), surrogate, target);
                    if !keys.contains(&key) {
                        problems.push(Violation::global(format!(
                            "missing cell ({dataset}, {attack}, {surrogate}, {target})"
                        )));
                    }
                }
            }
        }

        if !problems.is_empty() {
            return Err(Error::Validation(problems));
        }

        let mut records: Vec<PayoffRecord> = located.into_iter().map(|(r, _)| r).collect();
        records.sort_by_key(PayoffRecord::key);
        let index = records.iter().map(|r| (r.key(), r.degradation)).collect();
        Ok(Self { records, index })
    }

    /// Both bundled datasets merged into one table.
    pub fn bundled() -> Self {
        let mut records = Vec::new();
        for source in [BUNDLED_CIFAR10, BUNDLED_IMAGENET] {
            let table = Self::parse(source.as_bytes()).expect("bundled data must validate");
            records.extend(table.records);
        }
        Self::from_records(records).expect("bundled datasets must merge cleanly")
    }

    pub fn records(&self) -> &[PayoffRecord] {
        &self.records
    }

    /// Canonical serialization of the documented text format. Parsing it
    /// back yields an identical table.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.dataset,
                r.attack,
                r.surrogate,
                r.target,
                format_degradation(r.degradation)
            ));
        }
        out
    }

    /// Canonical serialization of the JSON record format.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&RecordsDoc {
            records: self.records.clone(),
        })
        .expect("records serialize")
    }

    pub fn datasets(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.records.iter().map(|r| r.dataset.as_str()).collect();
        set.into_iter().map(String::from).collect()
    }

    /// Attack names for a dataset, sorted, excluding the baseline rows.
    pub fn attacks(&self, dataset: &str) -> Result<Vec<String>> {
        let available = self.datasets();
        if !available.iter().any(|d| d == dataset) {
            return Err(Error::UnknownDataset {
                name: dataset.to_string(),
                available,
            });
        }
        let set: BTreeSet<&str> = self
            .records
            .iter()
            .filter(|r| r.dataset == dataset && r.attack != NO_ATTACK)
            .map(|r| r.attack.as_str())
            .collect();
        Ok(set.into_iter().map(String::from).collect())
    }

    /// Stored degradation for one cell.
    pub fn degradation(
        &self,
        dataset: &str,
        attack: &str,
        surrogate: SurrogateClass,
        target: TargetClass,
    ) -> Result<f64> {
        let key = (dataset.to_string(), attack.to_string(), surrogate, target);
        self.index
            .get(&key)
            .copied()
            .ok_or_else(|| Error::MissingEntry {
                key: format!("({dataset}, {attack}, {surrogate}, {target})"),
            })
    }

    /// The no-attack degradation for a target class (100 minus benign
    /// accuracy, stored directly in the table).
    pub fn baseline_degradation(&self, dataset: &str, target: TargetClass) -> Result<f64> {
        self.degradation(dataset, NO_ATTACK, SurrogateClass::None, target)
    }

    /// 2x2 Surrogate game for one attack: the attacker picks the surrogate
    /// class (row 0 undefended, row 1 the chosen defended class), the
    /// defender picks the target class.
    pub fn build_surrogate_game(
        &self,
        dataset: &str,
        attack: &str,
        defended: DefendedSurrogate,
    ) -> Result<ZeroSumGame> {
        let attacks = self.attacks(dataset)?;
        if !attacks.iter().any(|a| a == attack) {
            return Err(Error::UnknownAttack {
                dataset: dataset.to_string(),
                name: attack.to_string(),
                available: attacks,
            });
        }
        let payoff = vec![
            self.surrogate_row(dataset, attack, SurrogateClass::Undefended)?,
            self.surrogate_row(dataset, attack, defended.class())?,
        ];
        ZeroSumGame::new(
            vec![format!("{attack}/undefended"), format!("{attack}/defended")],
            target_labels(),
            payoff,
        )
    }

    /// 2Kx2 Attack-and-Surrogate game: the attacker picks an attack and a
    /// surrogate class together.
    pub fn build_attack_surrogate_game(
        &self,
        dataset: &str,
        defended: DefendedSurrogate,
    ) -> Result<ZeroSumGame> {
        let attacks = self.attacks(dataset)?;
        if attacks.is_empty() {
            return Err(Error::NoAttacks {
                dataset: dataset.to_string(),
            });
        }
        let mut labels = Vec::with_capacity(attacks.len() * 2);
        let mut payoff = Vec::with_capacity(attacks.len() * 2);
        for attack in &attacks {
            labels.push(format!("{attack}/undefended"));
            payoff.push(self.surrogate_row(dataset, attack, SurrogateClass::Undefended)?);
            labels.push(format!("{attack}/defended"));
            payoff.push(self.surrogate_row(dataset, attack, defended.class())?);
        }
        ZeroSumGame::new(labels, target_labels(), payoff)
    }

    /// Kx2 Attack game: the attacker picks the attack but is pinned to an
    /// undefended surrogate.
    pub fn build_attack_game(&self, dataset: &str) -> Result<ZeroSumGame> {
        let attacks = self.attacks(dataset)?;
        if attacks.is_empty() {
            return Err(Error::NoAttacks {
                dataset: dataset.to_string(),
            });
        }
        let mut payoff = Vec::with_capacity(attacks.len());
        for attack in &attacks {
            payoff.push(self.surrogate_row(dataset, attack, SurrogateClass::Undefended)?);
        }
        ZeroSumGame::new(attacks, target_labels(), payoff)
    }

    fn surrogate_row(
        &self,
        dataset: &str,
        attack: &str,
        surrogate: SurrogateClass,
    ) -> Result<Vec<f64>> {
        Ok(vec![
            self.degradation(dataset, attack, surrogate, TargetClass::Undefended)?,
            self.degradation(dataset, attack, surrogate, TargetClass::Defended)?,
        ])
    }
}

fn target_labels() -> Vec<String> {
    vec!["undefended".into(), "defended".into()]
}

fn json_parse_error(e: serde_json::Error) -> Error {
    Error::Parse(vec![Violation::new(
        Some(format!("line {} column {}", e.line(), e.column())),
        e.to_string(),
    )])
}

fn valid_token(s: &str) -> bool {
    let mut chars = s.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    (first.is_ascii_lowercase() || first.is_ascii_digit())
        && s.chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || matches!(c, '-' | '_' | '.'))
}

/// Decimal with up to 4 fraction digits; no sign, exponent, or stray text.
fn parse_degradation(s: &str) -> std::result::Result<f64, String> {
    let bad = || format!("degradation '{s}' is not a decimal with up to 4 fraction digits");
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if let Some(frac) = frac_part {
        if frac.is_empty() || frac.len() > 4 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
    }
    s.parse::<f64>().map_err(|_| bad())
}

/// Shortest representation when it fits the documented format, otherwise
/// fixed 4 fraction digits with trailing zeros trimmed.
fn format_degradation(v: f64) -> String {
    let shortest = format!("{v}");
    if parse_degradation(&shortest).is_ok() {
        return shortest;
    }
    let mut fixed = format!("{v:.4}");
    while fixed.ends_with('0') {
        fixed.pop();
    }
    if fixed.ends_with('.') {
        fixed.pop();
    }
    fixed
}
