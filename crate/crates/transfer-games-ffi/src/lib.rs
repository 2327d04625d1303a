//! C ABI over the transfer-games library so other languages can bind the
//! solvers and reports.
//!
//! Conventions:
//! - Tables and games are opaque handles created and freed by this API.
//! - Every fallible call returns a [`TgStatus`]; out-parameters are only
//!   written on `TG_STATUS_OK`.
//! - On failure, [`tg_last_error_message`] returns a human-readable
//!   description, valid on the calling thread until its next failing call.
//! - Strings returned through `char**` out-parameters are owned by the
//!   caller and must be released with [`tg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;
use std::str::FromStr;

use transfer_games::{
    analysis, render, DefendedSurrogate, Error, GameKind, MixingFilter, OutputFormat,
    ScenarioTable, ZeroSumGame,
};

/// Opaque handle to a validated scenario table.
pub struct TgTable {
    inner: ScenarioTable,
}

/// Opaque handle to a built zero-sum game.
pub struct TgGame {
    inner: ZeroSumGame,
}

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TgStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The input bytes are not rows of the documented format.
    ParseError = 3,
    /// The rows parsed but the table invariants do not hold.
    ValidationError = 4,
    /// Unknown dataset or attack, or a missing table entry.
    NotFound = 5,
    /// An argument was structurally invalid (bad index, bad token, bad
    /// game shape).
    InvalidArgument = 6,
    IoError = 7,
}

/// Which report `tg_report_json` emits.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TgReportKind {
    Transparency = 0,
    Mixing = 1,
    Underestimation = 2,
    /// Full equilibrium/commitment summary of the attack-and-surrogate
    /// game.
    AttackSurrogateSummary = 3,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: TgStatus, message: impl AsRef<str>) -> TgStatus {
    let sanitized = message.as_ref().replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
    status
}

fn fail_with(err: &Error) -> TgStatus {
    let status = match err {
        Error::Parse(_) => TgStatus::ParseError,
        Error::Validation(_) => TgStatus::ValidationError,
        Error::UnknownDataset { .. }
        | Error::UnknownAttack { .. }
        | Error::MissingEntry { .. }
        | Error::NoAttacks { .. } => TgStatus::NotFound,
        Error::Io(_) => TgStatus::IoError,
        _ => TgStatus::InvalidArgument,
    };
    fail(status, err.to_string())
}

/// Message for the most recent failure on this thread. Empty until a call
/// fails; the pointer stays valid until the next failing call.
#[no_mangle]
pub extern "C" fn tg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn tg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

unsafe fn required_str<'a>(ptr: *const c_char) -> Result<&'a str, TgStatus> {
    if ptr.is_null() {
        return Err(fail(TgStatus::NullArgument, "null string argument"));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(TgStatus::InvalidUtf8, "string argument is not UTF-8"))
}

/// Null means the default (median-def).
unsafe fn surrogate_arg(ptr: *const c_char) -> Result<DefendedSurrogate, TgStatus> {
    if ptr.is_null() {
        return Ok(DefendedSurrogate::default());
    }
    let token = required_str(ptr)?;
    DefendedSurrogate::from_str(token).map_err(|e| fail(TgStatus::InvalidArgument, e))
}

fn string_out(out: *mut *mut c_char, value: String) -> TgStatus {
    let Ok(cstring) = CString::new(value.replace('\0', " ")) else {
        return fail(TgStatus::InvalidArgument, "output contained a NUL byte");
    };
    unsafe { *out = cstring.into_raw() };
    TgStatus::Ok
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

/// Parse and validate a scenario table from a byte buffer (CSV or JSON).
///
/// # Safety
/// `data` must point to `len` readable bytes; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tg_table_parse(
    data: *const u8,
    len: usize,
    out: *mut *mut TgTable,
) -> TgStatus {
    if out.is_null() || (data.is_null() && len > 0) {
        return fail(TgStatus::NullArgument, "null table-parse argument");
    }
    let bytes = if len == 0 {
        &[][..]
    } else {
        std::slice::from_raw_parts(data, len)
    };
    match ScenarioTable::parse(bytes) {
        Ok(table) => {
            *out = Box::into_raw(Box::new(TgTable { inner: table }));
            TgStatus::Ok
        }
        Err(e) => fail_with(&e),
    }
}

/// The two datasets compiled into the library, merged.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tg_table_bundled(out: *mut *mut TgTable) -> TgStatus {
    if out.is_null() {
        return fail(TgStatus::NullArgument, "null out pointer");
    }
    *out = Box::into_raw(Box::new(TgTable {
        inner: ScenarioTable::bundled(),
    }));
    TgStatus::Ok
}

/// # Safety
/// `table` must be a handle from this API (or null, which is a no-op).
#[no_mangle]
pub unsafe extern "C" fn tg_table_free(table: *mut TgTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of records in the table; 0 for null.
///
/// # Safety
/// `table` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tg_table_record_count(table: *const TgTable) -> usize {
    table.as_ref().map_or(0, |t| t.inner.records().len())
}

/// Canonical CSV serialization of the table.
///
/// # Safety
/// `table` must be a live handle; `out` a valid pointer. Free the result
/// with `tg_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tg_table_to_csv(table: *const TgTable, out: *mut *mut c_char) -> TgStatus {
    let (Some(table), false) = (table.as_ref(), out.is_null()) else {
        return fail(TgStatus::NullArgument, "null table or out pointer");
    };
    string_out(out, table.inner.to_csv_string())
}

/// # Safety
/// `s` must come from this API (or be null, which is a no-op).
#[no_mangle]
pub unsafe extern "C" fn tg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// Games
// ---------------------------------------------------------------------------

unsafe fn game_out(out: *mut *mut TgGame, game: ZeroSumGame) -> TgStatus {
    *out = Box::into_raw(Box::new(TgGame { inner: game }));
    TgStatus::Ok
}

/// Build the 2x2 Surrogate game for one attack. `defended_surrogate` is a
/// token (`worst-def`, `median-def`, `best-def`) or null for the default.
///
/// # Safety
/// Pointer arguments must be valid as documented on each parameter.
#[no_mangle]
pub unsafe extern "C" fn tg_game_surrogate(
    table: *const TgTable,
    dataset: *const c_char,
    attack: *const c_char,
    defended_surrogate: *const c_char,
    out: *mut *mut TgGame,
) -> TgStatus {
    let (Some(table), false) = (table.as_ref(), out.is_null()) else {
        return fail(TgStatus::NullArgument, "null table or out pointer");
    };
    let dataset = match required_str(dataset) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let attack = match required_str(attack) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let defended = match surrogate_arg(defended_surrogate) {
        Ok(d) => d,
        Err(status) => return status,
    };
    match table.inner.build_surrogate_game(dataset, attack, defended) {
        Ok(game) => game_out(out, game),
        Err(e) => fail_with(&e),
    }
}

/// Build the 2Kx2 Attack-and-Surrogate game for a dataset.
///
/// # Safety
/// As for `tg_game_surrogate`.
#[no_mangle]
pub unsafe extern "C" fn tg_game_attack_surrogate(
    table: *const TgTable,
    dataset: *const c_char,
    defended_surrogate: *const c_char,
    out: *mut *mut TgGame,
) -> TgStatus {
    let (Some(table), false) = (table.as_ref(), out.is_null()) else {
        return fail(TgStatus::NullArgument, "null table or out pointer");
    };
    let dataset = match required_str(dataset) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let defended = match surrogate_arg(defended_surrogate) {
        Ok(d) => d,
        Err(status) => return status,
    };
    match table.inner.build_attack_surrogate_game(dataset, defended) {
        Ok(game) => game_out(out, game),
        Err(e) => fail_with(&e),
    }
}

/// Build the Kx2 Attack game (undefended surrogate only).
///
/// # Safety
/// As for `tg_game_surrogate`.
#[no_mangle]
pub unsafe extern "C" fn tg_game_attack(
    table: *const TgTable,
    dataset: *const c_char,
    out: *mut *mut TgGame,
) -> TgStatus {
    let (Some(table), false) = (table.as_ref(), out.is_null()) else {
        return fail(TgStatus::NullArgument, "null table or out pointer");
    };
    let dataset = match required_str(dataset) {
        Ok(s) => s,
        Err(status) => return status,
    };
    match table.inner.build_attack_game(dataset) {
        Ok(game) => game_out(out, game),
        Err(e) => fail_with(&e),
    }
}

/// # Safety
/// `game` must be a handle from this API (or null, which is a no-op).
#[no_mangle]
pub unsafe extern "C" fn tg_game_free(game: *mut TgGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// # Safety
/// `game` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tg_game_rows(game: *const TgGame) -> usize {
    game.as_ref().map_or(0, |g| g.inner.rows())
}

/// # Safety
/// `game` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tg_game_cols(game: *const TgGame) -> usize {
    game.as_ref().map_or(0, |g| g.inner.cols())
}

/// Attacker payoff of one cell, in percent degradation.
///
/// # Safety
/// `game` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tg_game_payoff(
    game: *const TgGame,
    row: usize,
    col: usize,
    out: *mut f64,
) -> TgStatus {
    let (Some(game), false) = (game.as_ref(), out.is_null()) else {
        return fail(TgStatus::NullArgument, "null game or out pointer");
    };
    if row >= game.inner.rows() || col >= game.inner.cols() {
        return fail(
            TgStatus::InvalidArgument,
            format!(
                "cell ({row}, {col}) outside a {}x{} game",
                game.inner.rows(),
                game.inner.cols()
            ),
        );
    }
    *out = game.inner.entry(row, col);
    TgStatus::Ok
}

unsafe fn label_out(
    labels: &[String],
    index: usize,
    axis: &str,
    out: *mut *mut c_char,
) -> TgStatus {
    if index >= labels.len() {
        return fail(
            TgStatus::InvalidArgument,
            format!("{axis} index {index} outside 0..{}", labels.len()),
        );
    }
    string_out(out, labels[index].clone())
}

/// Attacker action label. Free the result with `tg_string_free`.
///
/// # Safety
/// `game` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tg_game_row_label(
    game: *const TgGame,
    index: usize,
    out: *mut *mut c_char,
) -> TgStatus {
    let (Some(game), false) = (game.as_ref(), out.is_null()) else {
        return fail(TgStatus::NullArgument, "null game or out pointer");
    };
    label_out(game.inner.row_labels(), index, "row", out)
}

/// Defender action label. Free the result with `tg_string_free`.
///
/// # Safety
/// `game` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tg_game_col_label(
    game: *const TgGame,
    index: usize,
    out: *mut *mut c_char,
) -> TgStatus {
    let (Some(game), false) = (game.as_ref(), out.is_null()) else {
        return fail(TgStatus::NullArgument, "null game or out pointer");
    };
    label_out(game.inner.col_labels(), index, "column", out)
}

// ---------------------------------------------------------------------------
// Solving
// ---------------------------------------------------------------------------

/// Solve the game. `out_value` receives the game value (percent
/// degradation). `row_probs` / `col_probs` may each be null, or must point
/// to `tg_game_rows` / `tg_game_cols` doubles to receive one optimal
/// mixed-strategy pair.
///
/// # Safety
/// Pointer arguments must be valid as documented.
#[no_mangle]
pub unsafe extern "C" fn tg_game_solve_minimax(
    game: *const TgGame,
    out_value: *mut f64,
    row_probs: *mut f64,
    col_probs: *mut f64,
) -> TgStatus {
    let Some(game) = game.as_ref() else {
        return fail(TgStatus::NullArgument, "null game");
    };
    let result = transfer_games::solve_minimax(&game.inner);
    if !out_value.is_null() {
        *out_value = result.value;
    }
    if !row_probs.is_null() {
        let probs = result.row_strategy.probs();
        ptr::copy_nonoverlapping(probs.as_ptr(), row_probs, probs.len());
    }
    if !col_probs.is_null() {
        let probs = result.col_strategy.probs();
        ptr::copy_nonoverlapping(probs.as_ptr(), col_probs, probs.len());
    }
    TgStatus::Ok
}

/// Defender's best pure commitment: the committed column index and the
/// attacker payoff it concedes.
///
/// # Safety
/// `game` must be a live handle; out-parameters may be null to skip.
#[no_mangle]
pub unsafe extern "C" fn tg_game_solve_stackelberg(
    game: *const TgGame,
    out_col: *mut usize,
    out_value: *mut f64,
) -> TgStatus {
    let Some(game) = game.as_ref() else {
        return fail(TgStatus::NullArgument, "null game");
    };
    let solution = transfer_games::solve_stackelberg_pure(&game.inner);
    if !out_col.is_null() {
        *out_col = solution.committed_col;
    }
    if !out_value.is_null() {
        *out_value = solution.value;
    }
    TgStatus::Ok
}

/// Stackelberg value minus Nash value, clamped at zero.
///
/// # Safety
/// `game` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tg_game_transparency_cost(game: *const TgGame, out: *mut f64) -> TgStatus {
    let (Some(game), false) = (game.as_ref(), out.is_null()) else {
        return fail(TgStatus::NullArgument, "null game or out pointer");
    };
    *out = transfer_games::transparency_cost(&game.inner).max(0.0);
    TgStatus::Ok
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Emit one analysis report as a JSON string. Free the result with
/// `tg_string_free`.
///
/// # Safety
/// `table` must be a live handle; `dataset` a valid C string;
/// `defended_surrogate` a token or null; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tg_report_json(
    table: *const TgTable,
    dataset: *const c_char,
    kind: TgReportKind,
    defended_surrogate: *const c_char,
    out: *mut *mut c_char,
) -> TgStatus {
    let (Some(table), false) = (table.as_ref(), out.is_null()) else {
        return fail(TgStatus::NullArgument, "null table or out pointer");
    };
    let dataset = match required_str(dataset) {
        Ok(s) => s,
        Err(status) => return status,
    };
    let defended = match surrogate_arg(defended_surrogate) {
        Ok(d) => d,
        Err(status) => return status,
    };
    let rendered = match kind {
        TgReportKind::Transparency => {
            analysis::transparency_report(&table.inner, dataset, defended)
                .map(|r| render::render_transparency(&r, OutputFormat::Json))
        }
        TgReportKind::Mixing => {
            analysis::mixing_report(&table.inner, dataset, defended, &MixingFilter::default())
                .map(|r| render::render_mixing(&r, OutputFormat::Json))
        }
        TgReportKind::Underestimation => {
            analysis::underestimation_report(&table.inner, dataset, defended)
                .map(|r| render::render_underestimation(&r, OutputFormat::Json))
        }
        TgReportKind::AttackSurrogateSummary => analysis::solve_game_summary(
            &table.inner,
            dataset,
            GameKind::AttackSurrogate,
            None,
            defended,
        )
        .map(|s| render::render_game_summary(&s, OutputFormat::Json)),
    };
    match rendered {
        Ok(text) => string_out(out, text),
        Err(e) => fail_with(&e),
    }
}
