#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oscibench/systems.hpp"

namespace oscibench {

enum class RunStatus { ok, diverged, domain_error };
const char* to_string(RunStatus s);
std::optional<RunStatus> run_status_from_string(const std::string& s);

/// One grid point of a resonance or convergence sweep.
struct SweepRow {
  std::string method;
  double h = 0.0;
  double omega = 0.0;
  double h_omega_over_pi = 0.0;
  double value = 0.0;  // finite iff status == ok
  RunStatus status = RunStatus::ok;
};

/// One sample of a slow-exchange time series (ell = 3 benchmark).
struct SeriesRow {
  double t = 0.0;
  double I1 = 0.0, I2 = 0.0, I3 = 0.0, I = 0.0;
  double H = 0.0;
};

struct GlobalErrorRow {
  std::string method;
  double h = 0.0;
  double err_x0 = 0.0, err_y0 = 0.0;  // finite iff status == ok
  RunStatus status = RunStatus::ok;
};

enum class SweepQuantity { omega_I, total_H };

/// n uniform points in (lo, hi]: lo + k (hi-lo)/n, k = 1..n.
std::vector<double> uniform_grid(double lo, double hi, int n);

/// Name used to request the validated Stoermer/Verlet reference in sweeps
/// and exchange series.
inline constexpr const char* kReferenceName = "REFERENCE";

struct ReferenceOptions {
  double h_omega_max = 0.05;    // starting resolution h*omega
  double richardson_tol = 1e-7; // relative slow-component agreement under halving
  double max_steps = 4.0e8;     // per-run budget; beyond it, refuse
  double energy_tol = 0.05;     // stiff-energy-curve agreement (exchange refs)
  double deviation_tol = 0.25;  // relative max-deviation agreement (sweep refs)
};

/// Stoermer/Verlet reference states at t = k T/n_samples, k = 0..n_samples,
/// step-halved until the sampled slow components agree to richardson_tol.
/// Throws ReferenceNotConverged with a cost estimate when the budget is hit.
/// Pointwise validation is only attainable inside the benchmark's chaotic
/// horizon (T of order 10^2 at omega = 50); longer requests refuse.
std::vector<State> reference_solution(const OscillatorySystem& sys, const State& s0,
                                      double T, int n_samples,
                                      const ReferenceOptions& opts = {});

/// Like reference_solution, but validated on the sampled stiff-energy curves
/// I_j(t) (tolerance energy_tol relative to the initial stiff energy) instead
/// of pointwise slow components. The exchange observables converge under step
/// halving long after pointwise trajectories decorrelate.
std::vector<State> reference_exchange_states(const OscillatorySystem& sys,
                                             const State& s0, double T,
                                             int n_samples,
                                             const ReferenceOptions& opts = {});

/// Max deviation of omega*I (or of H) along the reference run, sampled every
/// step. Accepts when either the pointwise check or the deviation functional
/// itself converges under halving (tolerance deviation_tol, relative).
double reference_max_deviation(const OscillatorySystem& sys, const State& s0,
                               double T, SweepQuantity quantity,
                               const ReferenceOptions& opts = {});

/// Max deviation of omega*I (or H) of `method` on the FPU benchmark at one
/// grid point hw/pi = x, sampled every step over [0, T].
SweepRow sweep_point(const std::string& method, double h, double x, double T,
                     SweepQuantity quantity, const ReferenceOptions& ref_opts = {});

/// Figure-1/2 style sweep: grid of hw/pi values, FPU standard initial state,
/// max deviation of omega*I or H per point. Embarrassingly parallel;
/// rows sorted by (method, h_omega_over_pi) regardless of worker count.
std::vector<SweepRow> resonance_sweep(const std::vector<std::string>& methods,
                                      double h, const std::vector<double>& grid,
                                      double T, SweepQuantity quantity,
                                      int workers = 0);

/// Figure-3 style study: value = log2(dev(h_coarse)/dev(h_fine)) of the
/// total-energy deviation, equal h*omega across the pair (omega halved for
/// the doubled step). Row h/omega columns record the fine run.
std::vector<SweepRow> convergence_ratio(const std::vector<std::string>& methods,
                                        std::pair<double, double> h_pair,
                                        const std::vector<double>& grid, double T,
                                        int workers = 0);

/// Figures 4-6: sampled I_j(t), I(t), H(t) from the FPU standard initial
/// state. Truncates on blow-up (partial series returned).
std::vector<SeriesRow> exchange_series(const std::string& method, double omega,
                                       double h, double T, long stride,
                                       const ReferenceOptions& ref_opts = {});

/// First time with I2 > I1 (linear interpolation between samples).
std::optional<double> first_exchange_crossing(const std::vector<SeriesRow>& rows);

/// Figures 7-8: Euclidean error of the slow position/momentum blocks against
/// a validated reference, taken at the first step with t >= T.
std::vector<GlobalErrorRow> global_error_study(const std::vector<std::string>& methods,
                                               double omega,
                                               const std::vector<double>& h_grid,
                                               double T = 1.0, int workers = 0,
                                               const ReferenceOptions& ref_opts = {});

}  // namespace oscibench
