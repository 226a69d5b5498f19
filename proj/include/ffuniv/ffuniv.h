/*
   Copyright 2026 The ffuniv Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef FFUNIV_H
#define FFUNIV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FFU_API __declspec(dllexport)
#elif defined(__GNUC__)
#define FFU_API __attribute__((visibility("default")))
#else
#define FFU_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ffu_status {
    FFU_OK = 0,
    FFU_E_ARGUMENT = 1,     /* null pointer or bad enum */
    FFU_E_PRECONDITION = 2,
    FFU_E_DOMAIN = 3,
    FFU_E_CAPACITY = 4,
    FFU_E_NUMERIC = 5,
    FFU_E_UNSUPPORTED = 6,
    FFU_E_PARSE = 7,
    FFU_E_CONSTRUCTION = 8,
    FFU_E_BUFFER = 9,       /* output buffer too small; the needed size is reported */
    FFU_E_INTERNAL = 10
} ffu_status;

typedef struct ffu_group ffu_group;
typedef struct ffu_config ffu_config;

FFU_API const char* ffu_version(void);
FFU_API const char* ffu_status_name(ffu_status s);
/* Message of the last failing call on this thread ("" if none). */
FFU_API const char* ffu_last_error(void);

/* ---- groups (Z/QZ)^* over F_q[x], q = p^k ----
   Q is given by its coefficients, lowest degree first, separated by spaces
   ("0 0 1" is x^2). For k > 1 a coefficient is k digits over F_p, lowest first. */
FFU_API ffu_status ffu_group_create(uint32_t p, uint32_t k, const char* Q, ffu_group** out);
FFU_API void ffu_group_free(ffu_group* g);
FFU_API ffu_status ffu_group_phi(const ffu_group* g, uint64_t* phi);
FFU_API ffu_status ffu_group_degree(const ffu_group* g, int* degQ);
/* Invariant factor orders. *n receives the rank; FFU_E_BUFFER if cap < rank. */
FFU_API ffu_status ffu_group_orders(const ffu_group* g, uint32_t* orders, size_t cap, size_t* n);

/* Coefficients c_0..c_{deg Q - 1} of L(u, chi) for the character with the
   given flat index (0 is principal), interleaved re, im. cap counts doubles. */
FFU_API ffu_status ffu_lpoly(const ffu_group* g, uint64_t index, double* coeffs, size_t cap, size_t* n);
FFU_API ffu_status ffu_character_is_even(const ffu_group* g, uint64_t index, int* even);

typedef struct ffu_search_result {
    uint64_t phi;
    uint64_t best_index;
    double best_distance;
    uint64_t within;
    double proportion;
    double mean_distance;
} ffu_search_result;

/* Exhaustive search on the default u-plane grid. target uses the config
   syntax, e.g. "const 1" or "poly 1 0.2+0.1j". */
FFU_API ffu_status ffu_search(const ffu_group* g, const char* target, double epsilon, unsigned workers,
                              ffu_search_result* out);

/* ---- experiment configs and commands ---- */
FFU_API ffu_status ffu_config_load(const char* path, int strict, ffu_config** out);
FFU_API ffu_status ffu_config_parse(const char* text, int strict, ffu_config** out);
FFU_API void ffu_config_free(ffu_config* c);
/* key is "section.key" */
FFU_API ffu_status ffu_config_set(ffu_config* c, const char* key, const char* value);
/* Copies a NUL-terminated string; *needed includes the terminator. */
FFU_API ffu_status ffu_config_get(const ffu_config* c, const char* key, char* buf, size_t cap, size_t* needed);
FFU_API ffu_status ffu_config_serialize(const ffu_config* c, char* buf, size_t cap, size_t* needed);

/* i-th command name, NULL past the end. */
FFU_API const char* ffu_command_name(size_t i);
/* One-line description of the i-th command, NULL past the end. */
FFU_API const char* ffu_command_summary(size_t i);
/* Runs a command. FFU_OK means it ran to completion and *exit_code holds
   0 (ok), 1 (violation) or 2 (usage); the one-line summary or diagnostic is
   then available from ffu_last_message(). */
FFU_API ffu_status ffu_run(const ffu_config* c, const char* command, const char* out_dir, int* exit_code);
FFU_API const char* ffu_last_message(void);

#ifdef __cplusplus
}
#endif

#endif /* FFUNIV_H */
