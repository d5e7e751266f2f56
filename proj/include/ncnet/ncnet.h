#ifndef NCNET_NCNET_H
#define NCNET_NCNET_H

/* C interface to the ncnet library. Objects are opaque handles released
 * with the matching *_free call; strings returned through char** belong to
 * the caller and are released with ncnet_string_free. Every call returns a
 * status; on failure ncnet_last_error() describes it (per thread). */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define NCNET_API __declspec(dllexport)
#else
#define NCNET_API __attribute__((visibility("default")))
#endif

typedef enum ncnet_status {
  NCNET_OK = 0,
  NCNET_E_INVALID = 1,      /* bad argument or malformed network */
  NCNET_E_PRECONDITION = 2, /* construction precondition does not hold */
  NCNET_E_PARSE = 3,
  NCNET_E_CAP = 4,          /* work bound exceeded */
  NCNET_E_IO = 5,
  NCNET_E_INTERNAL = 6
} ncnet_status;

typedef enum ncnet_outcome {
  NCNET_SOLUTION = 0,
  NCNET_COUNTEREXAMPLE = 1,
  NCNET_INCONCLUSIVE = 2
} ncnet_outcome;

typedef enum ncnet_search_status {
  NCNET_FOUND = 0,
  NCNET_EXHAUSTED = 1,
  NCNET_CAPPED = 2
} ncnet_search_status;

typedef struct ncnet_network ncnet_network;
typedef struct ncnet_code ncnet_code;

NCNET_API const char* ncnet_last_error(void);
NCNET_API void ncnet_string_free(char* s);
NCNET_API const char* ncnet_version(void);
/* Default work bound: NCNET_CAP from the environment if set, else 2^26. */
NCNET_API uint64_t ncnet_default_cap(void);

/* Networks. family is "n0".."n4" (case-insensitive); params as in
 * N0(m), N1(m), N2(m, w), N3(m1, m2), N4(m). */
NCNET_API ncnet_status ncnet_network_build(const char* family, const int64_t* params, size_t count,
                                           ncnet_network** out);
NCNET_API ncnet_status ncnet_network_from_json(const char* json, ncnet_network** out);
NCNET_API ncnet_status ncnet_network_to_json(const ncnet_network* net, char** out);
NCNET_API ncnet_status ncnet_network_to_dot(const ncnet_network* net, char** out);
NCNET_API size_t ncnet_network_node_count(const ncnet_network* net);
NCNET_API void ncnet_network_free(ncnet_network* net);
/* JSON with the closed-form node count and, for n4, per-component counts. */
NCNET_API ncnet_status ncnet_nodes_report(const char* family, const int64_t* params, size_t count, char** out);

/* Named constructions: n0-linear, n1-linear, n1-fractional, n2-linear,
 * n2-nonlinear, n3-linear, n3-nonlinear, n3-fractional, n4. Unused fields
 * are ignored. */
typedef struct ncnet_code_request {
  const char* name;
  int64_t m, w, m1, m2, p, ring;
} ncnet_code_request;

/* net_out and natural_mode may be NULL. */
NCNET_API ncnet_status ncnet_code_build(const ncnet_code_request* req, ncnet_network** net_out,
                                        ncnet_code** code_out, char** natural_mode);
NCNET_API ncnet_status ncnet_code_from_json(const char* json, ncnet_code** out);
NCNET_API ncnet_status ncnet_code_to_json(const ncnet_code* code, char** out);
/* alphabet_name may be NULL. */
NCNET_API ncnet_status ncnet_code_params(const ncnet_code* code, int* k, int* n, int64_t* alphabet_size,
                                         char** alphabet_name);
NCNET_API int ncnet_code_is_linear(const ncnet_code* code);
NCNET_API void ncnet_code_free(ncnet_code* code);
/* CSV of a permutation family: kind "n2" takes (m, w), kind "n3" takes (m, alpha, s). */
NCNET_API ncnet_status ncnet_permutation_table(const char* kind, int64_t a, int64_t b, int64_t c, char** csv);

/* Verification. mode is "exhaustive", "basis", "random" or NULL for the
 * natural mode (exhaustive when it fits the cap, else basis for linear
 * codes, else random). */
typedef struct ncnet_verify_options {
  const char* mode;
  uint64_t samples; /* random mode; 0 means 1000000 */
  uint64_t seed;
  uint64_t cap;     /* 0 means ncnet_default_cap() */
  unsigned workers; /* 0 means 1 */
} ncnet_verify_options;

NCNET_API ncnet_status ncnet_verify(const ncnet_network* net, const ncnet_code* code,
                                    const ncnet_verify_options* options, ncnet_outcome* outcome, char** report_json);

/* Searches. kind "linear" reads `value` as the ring modulus; "p-structured"
 * and "all-codes" read it as the alphabet size. solution_out (may be NULL)
 * receives the first solution when one is found. For "all-codes" a cap
 * overrun yields NCNET_OK with status NCNET_CAPPED. */
NCNET_API ncnet_status ncnet_search(const char* kind, const ncnet_network* net, int64_t value, uint64_t cap,
                                    unsigned workers, ncnet_search_status* status, ncnet_code** solution_out,
                                    char** report_json);

/* Items: example-4.2, example-5.2, example-6.2, example-6.6, grid-n1,
 * grid-n2, grid-n3. match is 1 on exact agreement with the embedded data. */
NCNET_API ncnet_status ncnet_reproduce(const char* item, uint64_t cap, unsigned workers, int* match,
                                       char** report_json);

#ifdef __cplusplus
}
#endif

#endif
