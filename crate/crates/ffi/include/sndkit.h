#ifndef SNDKIT_H
#define SNDKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SndStatus {
  SND_STATUS_OK = 0,
  SND_STATUS_NULL_POINTER = 1,
  SND_STATUS_INVALID_UTF8 = 2,
  // Input is not well-formed.
  SND_STATUS_PARSE = 3,
  // Input is well-formed but semantically invalid.
  SND_STATUS_VALIDATION = 4,
  // No attack exists for the scenario; a summary is still produced.
  SND_STATUS_NO_ATTACK = 5,
  // Witness distance outside (0, R].
  SND_STATUS_OUT_OF_RANGE = 6,
  SND_STATUS_INTERNAL = 7,
} SndStatus;

// Outcome of [`snd_check`], numbered like the command-line exit codes.
typedef enum SndCheckResult {
  SND_CHECK_RESULT_FEASIBLE = 0,
  SND_CHECK_RESULT_INFEASIBLE = 2,
  SND_CHECK_RESULT_ATTACK = 3,
} SndCheckResult;

// Opaque parsed scenario.
typedef struct SndScenario SndScenario;

// Opaque event trace.
typedef struct SndTrace SndTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Parse a TOML scenario.
//
// # Safety
// `toml` must be a NUL-terminated string and `out` a valid pointer.
enum SndStatus snd_scenario_parse(const char *toml, struct SndScenario **out);

// Render a scenario back to TOML.
//
// # Safety
// `scenario` must come from [`snd_scenario_parse`]; `out` must be valid.
enum SndStatus snd_scenario_to_toml(const struct SndScenario *scenario, char **out);

// # Safety
// `scenario` must come from [`snd_scenario_parse`] and not be used again.
void snd_scenario_free(struct SndScenario *scenario);

// Parse a trace in line-delimited JSON.
//
// # Safety
// `jsonl` must be a NUL-terminated string and `out` a valid pointer.
enum SndStatus snd_trace_parse(const char *jsonl, struct SndTrace **out);

// Render a trace as line-delimited JSON in canonical order.
//
// # Safety
// `trace` must be a live trace handle; `out` must be valid.
enum SndStatus snd_trace_to_string(const struct SndTrace *trace, char **out);

// Number of events, or 0 for a null handle.
//
// # Safety
// `trace` must be null or a live trace handle.
uintptr_t snd_trace_len(const struct SndTrace *trace);

// # Safety
// `trace` must be a handle returned by this library and not be used again.
void snd_trace_free(struct SndTrace *trace);

// Run every feasibility checker and ND1 detection. `report_json` may be
// null.
//
// # Safety
// Handles must be live; `result` must be valid.
enum SndStatus snd_check(const struct SndScenario *scenario,
                         const struct SndTrace *trace,
                         enum SndCheckResult *result,
                         char **report_json);

// Synthesize a relay attack. `variant` is "single-relay", "wormhole" or
// null for the scenario's default. On success `relay_trace` receives the
// attack trace; `NoAttack` still fills `summary_json`. Output pointers
// other than `relay_trace` may be null.
//
// # Safety
// `scenario` must be live; string arguments NUL-terminated or null.
enum SndStatus snd_attack(const struct SndScenario *scenario,
                          const char *variant,
                          struct SndTrace **relay_trace,
                          char **attack_scenario_toml,
                          char **summary_json);

// Generate a run in which A discovers B at `distance` (a rational such
// as "50" or "100/3"). `witness_scenario_toml` may be null.
//
// # Safety
// `scenario` must be live; `distance` NUL-terminated; `trace` valid.
enum SndStatus snd_witness(const struct SndScenario *scenario,
                           const char *distance,
                           struct SndTrace **trace,
                           char **witness_scenario_toml);

// Closed-form security boundaries for the scenario's parameters, as JSON.
//
// # Safety
// `scenario` must be live; `out` must be valid.
enum SndStatus snd_compute_boundaries(const struct SndScenario *scenario, char **out);

// Copy of the message for the last failure on this thread, or null.
// Release with [`snd_string_free`].
char *snd_last_error_message(void);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void snd_string_free(char *s);

// Library version, statically allocated.
const char *snd_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SNDKIT_H */
