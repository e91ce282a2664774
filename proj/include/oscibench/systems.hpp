#pragma once

#include <functional>
#include <vector>

namespace oscibench {

/// Phase-space point. q and p have length d_slow + d_fast; slow components
/// come first, the stiff block occupies the last d_fast entries.
struct State {
  std::vector<double> q;
  std::vector<double> p;
  double t = 0.0;
};

/// The highly oscillatory system q'' + Omega^2 q = g(q) with
/// Omega = diag(0, omega I) acting on the trailing d_fast components,
/// g = -grad U.
struct OscillatorySystem {
  int d_slow = 0;
  int d_fast = 0;
  double omega = 0.0;
  /// Writes g(q) into the second argument (resized by the callee).
  std::function<void(const std::vector<double>&, std::vector<double>&)> force;
  std::function<double(const std::vector<double>&)> potential;

  int dim() const { return d_slow + d_fast; }
};

/// Total energy H(q, p) = |p|^2/2 + |Omega q|^2/2 + U(q).
double hamiltonian(const OscillatorySystem& sys, const State& s);

/// System with g == 0 (pure harmonic fast block, free slow block).
OscillatorySystem free_system(int d_slow, int d_fast, double omega);

/// Fermi-Pasta-Ulam chain: ell stiff springs, fast frequency omega.
struct FPUParams {
  int ell = 3;
  double omega = 50.0;
};

/// FPU benchmark in transformed coordinates: d_slow = d_fast = ell,
/// q = (x0_1..x0_ell, x1_1..x1_ell), quartic soft potential, closed-form
/// hand-differentiated force.
OscillatorySystem fpu_system(const FPUParams& params);

/// x0_1 = 1, y0_1 = 1, x1_1 = 1/omega, y1_1 = 1, everything else 0, t = 0.
State fpu_initial_state(const FPUParams& params);

/// Point-mass coordinates (length 2*ell) -> transformed (x, y); x carries
/// x0 first then x1, matching the State layout.
void fpu_transform(const std::vector<double>& q_masses,
                   const std::vector<double>& p_masses,
                   std::vector<double>& x, std::vector<double>& y);

/// Exact inverse of fpu_transform.
void fpu_untransform(const std::vector<double>& x, const std::vector<double>& y,
                     std::vector<double>& q_masses, std::vector<double>& p_masses);

}  // namespace oscibench
