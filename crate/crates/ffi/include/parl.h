#ifndef PARL_H
#define PARL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ParlStatus {
  PARL_STATUS_OK = 0,
  PARL_STATUS_NULL_POINTER = 1,
  PARL_STATUS_INVALID_UTF8 = 2,
  PARL_STATUS_INVALID_CONFIG = 3,
  PARL_STATUS_DIMENSION_MISMATCH = 4,
  PARL_STATUS_SOLVER_FAILURE = 5,
  PARL_STATUS_INVALID_ARGUMENT = 6,
  PARL_STATUS_BUFFER_TOO_SMALL = 7,
  PARL_STATUS_PANIC = 8,
} ParlStatus;

// A value network with its input scaling.
typedef struct ParlCritic ParlCritic;

// A simulator with its own random stream.
typedef struct ParlEnv ParlEnv;

// A validated network.
typedef struct ParlNetwork ParlNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL
// terminated, truncated to `len`). Returns the full message length.
//
// # Safety
// `buf` must be null or point to `len` writable bytes.
uintptr_t parl_last_error(char *buf, uintptr_t len);

// Parses a network configuration document.
//
// # Safety
// `doc` must be a NUL-terminated string; `out` must be writable.
enum ParlStatus parl_network_from_config(const char *doc, struct ParlNetwork **out);

// Builds a named benchmark network at `desk` or `paper` scale.
//
// # Safety
// `name` and `scale` must be NUL-terminated strings; `out` must be writable.
enum ParlStatus parl_network_from_preset(const char *name,
                                         const char *scale,
                                         struct ParlNetwork **out);

// # Safety
// `net` must come from this library and not be used afterwards.
void parl_network_free(struct ParlNetwork *net);

// # Safety
// `net` must be a live handle.
uintptr_t parl_network_num_links(const struct ParlNetwork *net);

// # Safety
// `net` must be a live handle.
uintptr_t parl_network_state_dim(const struct ParlNetwork *net);

// Creates a simulator over a copy of `net`, reset from `seed`.
//
// # Safety
// `net` must be a live handle; `out` must be writable.
enum ParlStatus parl_env_new(const struct ParlNetwork *net, uint64_t seed, struct ParlEnv **out);

// # Safety
// `env` must come from this library and not be used afterwards.
void parl_env_free(struct ParlEnv *env);

// # Safety
// `env` must be a live handle.
enum ParlStatus parl_env_reset(struct ParlEnv *env);

// Writes the state vector into `buf`. `written` receives the dimension
// even when the buffer is too small.
//
// # Safety
// `env` must be a live handle, `buf` must hold `len` doubles, `written`
// must be writable.
enum ParlStatus parl_env_state(const struct ParlEnv *env,
                               double *buf,
                               uintptr_t len,
                               uintptr_t *written);

// Requests `action` (one order per link), draws demand and advances one
// period. The per-period reward goes to `reward`.
//
// # Safety
// `env` must be a live handle, `action` must hold `n` values, `reward`
// must be writable.
enum ParlStatus parl_env_step(struct ParlEnv *env,
                              const int64_t *action,
                              uintptr_t n,
                              double *reward);

// Loads a critic from its text format.
//
// # Safety
// `doc` must be a NUL-terminated string; `out` must be writable.
enum ParlStatus parl_critic_from_text(const char *doc, struct ParlCritic **out);

// # Safety
// `critic` must come from this library and not be used afterwards.
void parl_critic_free(struct ParlCritic *critic);

// Value of a raw (unscaled) state vector.
//
// # Safety
// `critic` must be a live handle, `state` must hold `n` doubles, `value`
// must be writable.
enum ParlStatus parl_critic_value(const struct ParlCritic *critic,
                                  const double *state,
                                  uintptr_t n,
                                  double *value);

// Greedy action in the simulator's current state: `eta` quantile
// samples, discount `gamma`, branch and bound. Writes one order per link.
//
// # Safety
// `env` and `critic` must be live handles, `action` must hold `n` values.
enum ParlStatus parl_greedy_action(const struct ParlEnv *env,
                                   const struct ParlCritic *critic,
                                   double gamma,
                                   uintptr_t eta,
                                   int64_t *action,
                                   uintptr_t n);

// Order-up-to level for per-period `N(mu, sigma)` demand, lead time
// `lead`, shortage cost `b` and holding cost `h`.
//
// # Safety
// `out` must be writable.
enum ParlStatus parl_order_up_to(double mu,
                                 double sigma,
                                 uintptr_t lead,
                                 double b,
                                 double h,
                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PARL_H */
