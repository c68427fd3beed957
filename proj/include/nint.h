/* C API for the nint toolkit. All functions return a status code; details
 * for the most recent failure on the calling thread are available through
 * nint_last_error() / nint_last_error_code(). */
#ifndef NINT_H
#define NINT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

enum nint_status {
    NINT_OK = 0,
    NINT_ERR_INVALID_ARG = 1, /* null pointer, bad enum, malformed input */
    NINT_ERR_CONFIG = 2,      /* config parse / unknown key / bad value */
    NINT_ERR_IO = 3,          /* file missing or unreadable */
    NINT_ERR_RUNTIME = 4      /* anything else the toolkit reports */
};

const char* nint_version(void);

/* Human-readable message and stable short code ("ConfigError", "ParseError",
 * ...) of the last error on this thread. Valid until the next failing call. */
const char* nint_last_error(void);
const char* nint_last_error_code(void);

/* Runs one subcommand. `config_json` is the run-config document (NULL or ""
 * means all defaults); overrides are parallel key/value arrays applied after
 * parsing (keys: output, seed, method, endpoint, variant). */
int nint_run(const char* subcommand, const char* config_json, const char* const* override_keys,
             const char* const* override_values, size_t n_overrides);

/* NULL-terminated array of subcommand names; static storage. */
const char* const* nint_subcommands(void);

/* ---- corpus handle ---- */

typedef struct nint_corpus nint_corpus;

/* Loads a JSONL corpus with the default vocabularies. On success stores a
 * handle that must be released with nint_corpus_free. */
int nint_corpus_open(const char* path, nint_corpus** out);
int nint_corpus_size(const nint_corpus* corpus, size_t* out);
/* Copies the id of article `index` into buf (truncated if needed, always
 * NUL-terminated). */
int nint_corpus_article_id(const nint_corpus* corpus, size_t index, char* buf, size_t buf_len);
void nint_corpus_free(nint_corpus* corpus);

/* ---- agreement ---- */

/* Fleiss' kappa over an items x categories count table (row-major). Sets
 * *degenerate to 1 when chance agreement is exactly 1 (kappa fixed to 1). */
int nint_fleiss_kappa(const long* counts, size_t items, size_t categories, double* out_kappa,
                      int* out_degenerate);

#ifdef __cplusplus
}
#endif

#endif /* NINT_H */
