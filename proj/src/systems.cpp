#include "oscibench/systems.hpp"

#include <cmath>
#include <stdexcept>

namespace oscibench {

double hamiltonian(const OscillatorySystem& sys, const State& s) {
  double kin = 0.0;
  for (double v : s.p) kin += v * v;
  double stiff = 0.0;
  for (int i = sys.d_slow; i < sys.dim(); ++i) stiff += s.q[i] * s.q[i];
  return 0.5 * kin + 0.5 * sys.omega * sys.omega * stiff + sys.potential(s.q);
}

OscillatorySystem free_system(int d_slow, int d_fast, double omega) {
  OscillatorySystem sys;
  sys.d_slow = d_slow;
  sys.d_fast = d_fast;
  sys.omega = omega;
  sys.force = [](const std::vector<double>& q, std::vector<double>& g) {
    g.assign(q.size(), 0.0);
  };
  sys.potential = [](const std::vector<double>&) { return 0.0; };
  return sys;
}

OscillatorySystem fpu_system(const FPUParams& params) {
  if (params.ell < 1 || params.omega <= 0.0)
    throw std::invalid_argument("fpu_system: need ell >= 1 and omega > 0");
  const int l = params.ell;

  OscillatorySystem sys;
  sys.d_slow = l;
  sys.d_fast = l;
  sys.omega = params.omega;

  // q = (x0_1..x0_l, x1_1..x1_l); chain endpoints fixed at zero.
  sys.potential = [l](const std::vector<double>& q) {
    const double* x0 = q.data();
    const double* x1 = q.data() + l;
    auto quart = [](double v) { const double v2 = v * v; return v2 * v2; };
    double u = quart(x0[0] - x1[0]);
    for (int k = 0; k + 1 < l; ++k)
      u += quart(x0[k + 1] - x1[k + 1] - x0[k] - x1[k]);
    u += quart(x0[l - 1] + x1[l - 1]);
    return 0.25 * u;
  };

  sys.force = [l](const std::vector<double>& q, std::vector<double>& g) {
    g.assign(q.size(), 0.0);
    const double* x0 = q.data();
    const double* x1 = q.data() + l;
    double* g0 = g.data();
    double* g1 = g.data() + l;
    // g = -dU with dU accumulated from the three quartic groups
    const double a = x0[0] - x1[0];
    const double a3 = a * a * a;
    g0[0] -= a3;
    g1[0] += a3;
    for (int k = 0; k + 1 < l; ++k) {
      const double b = x0[k + 1] - x1[k + 1] - x0[k] - x1[k];
      const double b3 = b * b * b;
      g0[k + 1] -= b3;
      g1[k + 1] += b3;
      g0[k] += b3;
      g1[k] += b3;
    }
    const double c = x0[l - 1] + x1[l - 1];
    const double c3 = c * c * c;
    g0[l - 1] -= c3;
    g1[l - 1] -= c3;
  };
  return sys;
}

State fpu_initial_state(const FPUParams& params) {
  if (params.ell < 1) throw std::invalid_argument("fpu_initial_state: ell >= 1");
  const int l = params.ell;
  State s;
  s.q.assign(2 * l, 0.0);
  s.p.assign(2 * l, 0.0);
  s.q[0] = 1.0;                  // x0_1
  s.p[0] = 1.0;                  // y0_1
  s.q[l] = 1.0 / params.omega;   // x1_1
  s.p[l] = 1.0;                  // y1_1
  s.t = 0.0;
  return s;
}

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
}

void fpu_transform(const std::vector<double>& q_masses,
                   const std::vector<double>& p_masses,
                   std::vector<double>& x, std::vector<double>& y) {
  if (q_masses.size() != p_masses.size() || q_masses.size() % 2 != 0)
    throw std::invalid_argument("fpu_transform: need equal even-length vectors");
  const int l = static_cast<int>(q_masses.size()) / 2;
  x.assign(2 * l, 0.0);
  y.assign(2 * l, 0.0);
  for (int i = 0; i < l; ++i) {
    x[i] = (q_masses[2 * i + 1] + q_masses[2 * i]) * kInvSqrt2;
    x[l + i] = (q_masses[2 * i + 1] - q_masses[2 * i]) * kInvSqrt2;
    y[i] = (p_masses[2 * i + 1] + p_masses[2 * i]) * kInvSqrt2;
    y[l + i] = (p_masses[2 * i + 1] - p_masses[2 * i]) * kInvSqrt2;
  }
}

void fpu_untransform(const std::vector<double>& x, const std::vector<double>& y,
                     std::vector<double>& q_masses, std::vector<double>& p_masses) {
  if (x.size() != y.size() || x.size() % 2 != 0)
    throw std::invalid_argument("fpu_untransform: need equal even-length vectors");
  const int l = static_cast<int>(x.size()) / 2;
  q_masses.assign(2 * l, 0.0);
  p_masses.assign(2 * l, 0.0);
  for (int i = 0; i < l; ++i) {
    q_masses[2 * i] = (x[i] - x[l + i]) * kInvSqrt2;
    q_masses[2 * i + 1] = (x[i] + x[l + i]) * kInvSqrt2;
    p_masses[2 * i] = (y[i] - y[l + i]) * kInvSqrt2;
    p_masses[2 * i + 1] = (y[i] + y[l + i]) * kInvSqrt2;
  }
}

}  // namespace oscibench
