#ifndef ACLAB_H
#define ACLAB_H

/* C interface to the front-dynamics laboratory.
 *
 * Every entry point returns an exit code:
 *   0  success, all gates passed
 *   2  run completed but a statistical/accuracy gate failed (data written)
 *   3  invalid input (config, parameters, missing files)
 *   4  numerical failure (non-convergence, overflow, sup-bound violation)
 *
 * Strings returned through out-parameters are heap-allocated; release them
 * with aclab_string_free.  The library keeps a thread-local message for the
 * most recent failure, readable via aclab_last_error.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define ACLAB_OK 0
#define ACLAB_GATE_FAILURE 2
#define ACLAB_VALIDATION_ERROR 3
#define ACLAB_NUMERIC_ERROR 4

/* Runs one experiment verb (profile, spectrum, coeffs, dzeta, kernel, flow,
 * simulate, compare, verify-identities, closeness-scan) with the given
 * sectioned key-value config text.  Artifacts, record.json and report.md are
 * written into out_dir.  threads <= 0 selects the hardware default.  When
 * result_json is non-NULL it receives the run record serialized as JSON
 * (also on gate failure). */
int aclab_run(const char* verb, const char* config_text, const char* out_dir, uint64_t seed,
              int threads, char** result_json);

/* Recomputes the output-file hashes recorded in out_dir/record.json.  Returns
 * 0 when everything matches, 2 when files are missing or altered (the list is
 * placed in *problems_json as a JSON array when non-NULL), 3 when the record
 * itself cannot be read. */
int aclab_verify(const char* out_dir, char** problems_json);

/* Message describing the most recent failure on this thread ("" if none).
 * The pointer stays valid until the next aclab_* call on the same thread. */
const char* aclab_last_error(void);

/* Library version string, e.g. "aclab 0.1.0" (static storage, do not free). */
const char* aclab_version(void);

void aclab_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* ACLAB_H */
