#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "oscibench/filters.hpp"
#include "oscibench/systems.hpp"

namespace oscibench {

/// Energies of one state: total H, per-oscillator stiff energies I_j,
/// total stiff energy I, modified oscillatory energy J = I - q1.g1(q), and
/// the counterparts evaluated with omega_tilde and p_tilde = (w~/w) p1.
struct EnergyReport {
  double H = 0.0;
  std::vector<double> I_j;
  double I = 0.0;
  double J = 0.0;
  double coupling = 0.0;  // q1^T g1(q)
  double Htilde = 0.0, Itilde = 0.0, Jtilde = 0.0;
  bool modified = false;  // frequency map is not the identity
};

EnergyReport energies(const OscillatorySystem& sys, const MethodSpec& spec,
                      double h, const State& s);

/// Report with the identity frequency map (reference trajectories).
EnergyReport energies(const OscillatorySystem& sys, const State& s);

/// Consistency constants of the principal modulated Fourier expansion,
/// evaluated at the method's own modified frequency:
///   alpha = w psi phi / (w~ sinc(xi)),  beta = phi^2,
///   gamma = w^2 psi phi / (w~^2 sinc^2(xi/2)),   xi = h w~.
struct MFEConstants {
  double alpha = 1.0, beta = 1.0, gamma = 1.0;
  double rho = 0.0;        // psi(xi)/sinc^2(xi/2) - 1
  double rho_tilde = 0.0;  // (w~/w)^2 - 1
  double gamma_over_phi = 1.0;
  bool resonant = false;   // |sinc(xi)| < 1e-12: alpha reported as +-inf
};

MFEConstants mfe_constants(const MethodSpec& spec, double h, double omega);

/// Absolute defects of the exact algebraic identities
///   H = [H~ - rho~ q1.g1] - rho~ J   and   J = (w/w~)^2 [J~ - rho~ q1.g1];
/// pure floating-point noise for any state.
std::pair<double, double> energy_identities_check(const OscillatorySystem& sys,
                                                  const MethodSpec& spec,
                                                  double h, const State& s);

/// Principal-term averaged state: slow position/velocity and the complex
/// amplitude z1 of the stiff block.
struct AveragedState {
  std::vector<double> y0, y0dot;
  std::vector<std::complex<double>> z1;
  double t = 0.0;
};

struct AveragedOptions {
  double dt = 0.05;        // RK4 step
  long sample_stride = 1;  // keep every k-th step
  double fd_eps = 1e-5;    // finite-difference step for g derivatives
};

/// Integrates the averaged system
///   y0'' = g0(y0, w^-2 g1(y0,0)) + d2g0/dx1^2 (y0,0)(z1, conj z1),
///   2 i w z1' = dg1/dx1(y0,0) z1,
/// with z1(0) = (q1(0) - i p1(0)/w)/2, by classical RK4.
std::vector<AveragedState> averaged_system_solve(const OscillatorySystem& sys,
                                                 const State& s0, double T,
                                                 const AveragedOptions& opts = {});

/// Predicted stiff energy I_j(t) = 2 w^2 |z1_j(t)|^2.
double averaged_stiff_energy(const AveragedState& a, double omega, int j);

/// Predicted deviation envelope of the oscillatory energy along a slow path:
/// max_t sqrt(I0/2) w^-1 ||dg1/dx1(y0(t), 0)|| * (gamma/phi).
double deviation_scale(const OscillatorySystem& sys, const MethodSpec& spec,
                       double h, const std::vector<std::vector<double>>& y0_path,
                       double I0);

/// max_k |series_k - series_0|; throws std::invalid_argument on empty input.
double max_deviation(const std::vector<double>& series);

}  // namespace oscibench
