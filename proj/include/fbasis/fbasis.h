/* fbasis: factorized F-matrices, twisted monodromy operators and domain wall
 * partition functions for U(1)^(N-1) vertex models with arbitrary weights.
 *
 * C interface of the shared library. All structured data crosses the
 * boundary as JSON documents; handles are opaque and must be released with
 * the matching free function. Functions return FB_OK on success, an
 * fb_status code otherwise; *errmsg (when non-NULL on entry) receives a
 * malloc'd description to be released with fb_string_free.
 */

#ifndef FBASIS_H
#define FBASIS_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fb_status {
    FB_OK = 0,
    FB_CHECKS_FAILED = 1,
    FB_ERR_CONFIG = 2,
    FB_ERR_SINGULAR_PARAMETER = 3,
    FB_ERR_RANK_MISMATCH = 4,
    FB_ERR_UNKNOWN_PAIR = 5,
    FB_ERR_UNKNOWN_KIND = 6,
    FB_ERR_MISSING_ENTRY = 7,
    FB_ERR_MALFORMED_DOCUMENT = 8,
    FB_ERR_DIVISION_NEAR_ZERO = 9,
    FB_ERR_BRANCH_CUT = 10,
    FB_ERR_SINGULAR_DIAGONAL = 11,
    FB_ERR_DIMENSION_MISMATCH = 12,
    FB_ERR_NOT_A_BIJECTION = 13,
    FB_ERR_INDEX_OUT_OF_RANGE = 14,
    FB_ERR_INSUFFICIENT_RAPIDITIES = 15,
    FB_ERR_INTERNAL = 16
} fb_status;

const char* fb_version(void);

/* Opaque Boltzmann weight table. */
typedef struct fb_table fb_table;

/* Build a table from a generator spec:
 *   {"model": "del_pezzo"|"perk_schultz"|"six_vertex", "seed": 42,
 *    "inhomogeneities": 4, "auxiliaries": 2}
 * Generated labels are xi1..xiK and au1..auJ. */
fb_status fb_table_generate(const char* spec_json, fb_table** out, char** errmsg);

/* Import a weight-table document (rank / rapidities / entries). */
fb_status fb_table_import(const char* doc_json, fb_table** out, char** errmsg);

/* Export the table document; *out is malloc'd, release with fb_string_free. */
fb_status fb_table_export(const fb_table* table, char** out, char** errmsg);

/* Single weight lookup; kind strings are "a1".."aN", "bIJ", "cIJ".
 * out[0] = Re, out[1] = Im. */
fb_status fb_table_weight(const fb_table* table, const char* x, const char* y, const char* kind,
                          double out[2], char** errmsg);

int fb_table_rank(const fb_table* table);

void fb_table_free(fb_table* table);

/* Run a verification suite from a config document:
 *   {"suite": "all", "model": "del_pezzo", "seed": 7, "lmax": 4,
 *    "tol": 0, "instances": 100, "dwpf_seeds": 10, "format": "json",
 *    "custom_table": {...}}
 * *report_out receives the report in the requested format. Returns FB_OK when
 * every check passes, FB_CHECKS_FAILED when residuals exceed tolerance, and a
 * config/runtime error code otherwise. */
fb_status fb_run_suite(const char* config_json, char** report_out, char** errmsg);

/* Evaluate a DWPF instance document:
 *   {"kind": "C2", "L": 3, "M": 0, "q": [], "seed": 7, "model": "del_pezzo"}
 * *result_out receives the result document with per-route values. */
fb_status fb_compute_dwpf(const char* instance_json, char** result_out, char** errmsg);

void fb_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* FBASIS_H */
