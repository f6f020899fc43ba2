/* C API for the phaselimit phase-space speed-limit toolkit.
 *
 * Conventions:
 *  - grids, fields, and trajectories are opaque handles owned by the
 *    library; release them with the matching psl_*_free,
 *  - fallible calls return PslStatus and write results through out
 *    pointers only on PSL_STATUS_OK,
 *  - psl_last_error_message retrieves the calling thread's most recent
 *    error text.
 *
 * Kept in sync with the Rust exports by a test in the phaselimit-ffi
 * crate.
 */

#ifndef PHASELIMIT_H
#define PHASELIMIT_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum PslStatus {
  PSL_STATUS_OK = 0,
  PSL_STATUS_NULL_POINTER = 1,
  PSL_STATUS_INVALID_ARGUMENT = 2,
  PSL_STATUS_GRID_MISMATCH = 3,
  PSL_STATUS_NUMERIC_ERROR = 4,
  PSL_STATUS_IO_ERROR = 5,
  PSL_STATUS_UTF8_ERROR = 6,
} PslStatus;

typedef enum PslMoyalOrder {
  PSL_MOYAL_ORDER_POISSON = 0,
  PSL_MOYAL_ORDER_HBAR_SQUARED = 1,
} PslMoyalOrder;

/* Physical constants of a scenario (hbar, mass, reference trap frequency). */
typedef struct PslUnits {
  double hbar;
  double mass;
  double omega0;
} PslUnits;

/* Opaque handles. */
typedef struct PslGrid PslGrid;
typedef struct PslField PslField;
typedef struct PslTrajectory PslTrajectory;

/* Frequency callback for time-dependent trap modulation. */
typedef double (*PslOmegaFn)(double t, void *ctx);

/* --- errors ---------------------------------------------------------- */

size_t psl_last_error_message(char *buf, size_t cap);

/* --- grid and fields -------------------------------------------------- */

PslStatus psl_grid_new(double q_min, double q_max, double p_min, double p_max,
                       size_t nq, size_t np, double hbar, double mass,
                       PslGrid **out);
void psl_grid_free(PslGrid *grid);
PslStatus psl_grid_shape(const PslGrid *grid, size_t *nq, size_t *np);

void psl_field_free(PslField *field);
PslStatus psl_field_shape(const PslField *field, size_t *nq, size_t *np);
/* Row-major copy, q outer / p inner; len must equal nq * np. */
PslStatus psl_field_copy_values(const PslField *field, double *buf, size_t len);
PslStatus psl_field_integrate(const PslField *field, double *out);
PslStatus psl_field_boundary_ratio(const PslField *field, double *out);

/* --- states ----------------------------------------------------------- */

PslStatus psl_ho_wigner(uint32_t n, PslUnits units, const PslGrid *grid,
                        PslField **out);
PslStatus psl_gaussian_wigner(double center_q, double center_p, double sigma_q,
                              double sigma_p, const PslGrid *grid,
                              PslField **out);
PslStatus psl_classical_gaussian(double center_q, double center_p,
                                 double sigma_q, double sigma_p,
                                 const PslGrid *grid, PslField **out);
PslStatus psl_classical_from_wigner(const PslField *w, PslUnits units,
                                    bool require_nonnegative, PslField **out);
PslStatus psl_quadratic_hamiltonian(PslUnits units, double omega,
                                    const PslGrid *grid, PslField **out);
PslStatus psl_purity(const PslField *w, PslUnits units, double *out);

/* --- dynamics ---------------------------------------------------------- */

PslStatus psl_solve_ermakov(PslOmegaFn omega, void *ctx, double omega0,
                            double t_max, size_t steps, PslTrajectory **out);
/* Constant post-quench frequency; omega_post = 0 is the sudden release. */
PslStatus psl_solve_ermakov_const(double omega_post, double omega0,
                                  double t_max, size_t steps,
                                  PslTrajectory **out);
void psl_trajectory_free(PslTrajectory *traj);
PslStatus psl_trajectory_len(const PslTrajectory *traj, size_t *out);
PslStatus psl_trajectory_sample(const PslTrajectory *traj, size_t index,
                                double *t, double *b, double *bdot);
PslStatus psl_trajectory_bddot0(const PslTrajectory *traj, double *out);
PslStatus psl_evolve_quench(const PslField *state0, const PslTrajectory *traj,
                            size_t index, PslField **out);

/* --- metrics ----------------------------------------------------------- */

PslStatus psl_fidelity(const PslField *w0, const PslField *wt, PslUnits units,
                       double *out);
PslStatus psl_bhattacharyya(const PslField *rho0, const PslField *rhot,
                            double *out);
PslStatus psl_hellinger(const PslField *rho0, const PslField *rhot,
                        double *out);
PslStatus psl_bures_angle(double overlap, double *out);
/* Printed closed-form fidelity F_n, n = 0..3. */
PslStatus psl_closed_form_fidelity(uint32_t n, double b, double bdot,
                                   double omega0, double *out);

/* --- speed limits ------------------------------------------------------ */

PslStatus psl_v_qsl(const PslField *h, const PslField *w0, PslMoyalOrder order,
                    PslUnits units, double *out);
PslStatus psl_v_ssl(const PslField *h, const PslField *w0, PslUnits units,
                    double *out);
PslStatus psl_v_csl(const PslField *h, const PslField *rho0, double *out);
PslStatus psl_tau_bound(double overlap, double v, double *out);

/* --- grid-free oracles -------------------------------------------------- */

PslStatus psl_gaussian_energy_variance(PslUnits units, double post_quench_omega,
                                       double *out);
PslStatus psl_quench_bhattacharyya(double b, double bdot, PslUnits units,
                                   double sigma_q, double sigma_p, double *out);
PslStatus psl_quench_vcsl(PslUnits units, double sigma_q, double sigma_p,
                          double bddot0, double *out);

/* --- scenario runner ----------------------------------------------------- */

/* Executes a config file end to end and writes series.csv / summary.txt
 * into out_dir. Returns PSL_STATUS_NUMERIC_ERROR when a dominance check
 * fails. */
PslStatus psl_run_scenario(const char *config_path, const char *out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PHASELIMIT_H */
