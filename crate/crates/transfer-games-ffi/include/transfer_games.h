#ifndef TRANSFER_GAMES_H
#define TRANSFER_GAMES_H

/* Generated by cbindgen from transfer-games-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum {
  TG_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  TG_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  TG_STATUS_INVALID_UTF8 = 2,
  /**
   * The input bytes are not rows of the documented format.
   */
  TG_STATUS_PARSE_ERROR = 3,
  /**
   * The rows parsed but the table invariants do not hold.
   */
  TG_STATUS_VALIDATION_ERROR = 4,
  /**
   * Unknown dataset or attack, or a missing table entry.
   */
  TG_STATUS_NOT_FOUND = 5,
  /**
   * An argument was structurally invalid (bad index, bad token, bad
   * game shape).
   */
  TG_STATUS_INVALID_ARGUMENT = 6,
  TG_STATUS_IO_ERROR = 7,
} TgStatus;

/**
 * Which report `tg_report_json` emits.
 */
typedef enum {
  TG_REPORT_KIND_TRANSPARENCY = 0,
  TG_REPORT_KIND_MIXING = 1,
  TG_REPORT_KIND_UNDERESTIMATION = 2,
  /**
   * Full equilibrium/commitment summary of the attack-and-surrogate
   * game.
   */
  TG_REPORT_KIND_ATTACK_SURROGATE_SUMMARY = 3,
} TgReportKind;

/**
 * Opaque handle to a built zero-sum game.
 */
typedef struct TgGame TgGame;

/**
 * Opaque handle to a validated scenario table.
 */
typedef struct TgTable TgTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. Empty until a call
 * fails; the pointer stays valid until the next failing call.
 */
const char *tg_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *tg_version(void);

/**
 * Parse and validate a scenario table from a byte buffer (CSV or JSON).
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be a valid pointer.
 */
TgStatus tg_table_parse(const uint8_t *data, size_t len, TgTable **out);

/**
 * The two datasets compiled into the library, merged.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
TgStatus tg_table_bundled(TgTable **out);

/**
 * # Safety
 * `table` must be a handle from this API (or null, which is a no-op).
 */
void tg_table_free(TgTable *table);

/**
 * Number of records in the table; 0 for null.
 *
 * # Safety
 * `table` must be a live handle or null.
 */
size_t tg_table_record_count(const TgTable *table);

/**
 * Canonical CSV serialization of the table.
 *
 * # Safety
 * `table` must be a live handle; `out` a valid pointer. Free the result
 * with `tg_string_free`.
 */
TgStatus tg_table_to_csv(const TgTable *table, char **out);

/**
 * # Safety
 * `s` must come from this API (or be null, which is a no-op).
 */
void tg_string_free(char *s);

/**
 * Build the 2x2 Surrogate game for one attack. `defended_surrogate` is a
 * token (`worst-def`, `median-def`, `best-def`) or null for the default.
 *
 * # Safety
 * Pointer arguments must be valid as documented on each parameter.
 */
TgStatus tg_game_surrogate(const TgTable *table,
                           const char *dataset,
                           const char *attack,
                           const char *defended_surrogate,
                           TgGame **out);

/**
 * Build the 2Kx2 Attack-and-Surrogate game for a dataset.
 *
 * # Safety
 * As for `tg_game_surrogate`.
 */
TgStatus tg_game_attack_surrogate(const TgTable *table,
                                  const char *dataset,
                                  const char *defended_surrogate,
                                  TgGame **out);

/**
 * Build the Kx2 Attack game (undefended surrogate only).
 *
 * # Safety
 * As for `tg_game_surrogate`.
 */
TgStatus tg_game_attack(const TgTable *table, const char *dataset, TgGame **out);

/**
 * # Safety
 * `game` must be a handle from this API (or null, which is a no-op).
 */
void tg_game_free(TgGame *game);

/**
 * # Safety
 * `game` must be a live handle or null.
 */
size_t tg_game_rows(const TgGame *game);

/**
 * # Safety
 * `game` must be a live handle or null.
 */
size_t tg_game_cols(const TgGame *game);

/**
 * Attacker payoff of one cell, in percent degradation.
 *
 * # Safety
 * `game` must be a live handle; `out` a valid pointer.
 */
TgStatus tg_game_payoff(const TgGame *game, size_t row, size_t col, double *out);

/**
 * Attacker action label. Free the result with `tg_string_free`.
 *
 * # Safety
 * `game` must be a live handle; `out` a valid pointer.
 */
TgStatus tg_game_row_label(const TgGame *game, size_t index, char **out);

/**
 * Defender action label. Free the result with `tg_string_free`.
 *
 * # Safety
 * `game` must be a live handle; `out` a valid pointer.
 */
TgStatus tg_game_col_label(const TgGame *game, size_t index, char **out);

/**
 * Solve the game. `out_value` receives the game value (percent
 * degradation). `row_probs` / `col_probs` may each be null, or must point
 * to `tg_game_rows` / `tg_game_cols` doubles to receive one optimal
 * mixed-strategy pair.
 *
 * # Safety
 * Pointer arguments must be valid as documented.
 */
TgStatus tg_game_solve_minimax(const TgGame *game,
                               double *out_value,
                               double *row_probs,
                               double *col_probs);

/**
 * Defender's best pure commitment: the committed column index and the
 * attacker payoff it concedes.
 *
 * # Safety
 * `game` must be a live handle; out-parameters may be null to skip.
 */
TgStatus tg_game_solve_stackelberg(const TgGame *game, size_t *out_col, double *out_value);

/**
 * Stackelberg value minus Nash value, clamped at zero.
 *
 * # Safety
 * `game` must be a live handle; `out` a valid pointer.
 */
TgStatus tg_game_transparency_cost(const TgGame *game, double *out);

/**
 * Emit one analysis report as a JSON string. Free the result with
 * `tg_string_free`.
 *
 * # Safety
 * `table` must be a live handle; `dataset` a valid C string;
 * `defended_surrogate` a token or null; `out` a valid pointer.
 */
TgStatus tg_report_json(const TgTable *table,
                        const char *dataset,
                        TgReportKind kind,
                        const char *defended_surrogate,
                        char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRANSFER_GAMES_H */
