#include "oscibench/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "oscibench/errors.hpp"

namespace oscibench {

namespace {

EnergyReport energies_impl(const OscillatorySystem& sys, const State& s,
                           double omega_tilde, bool modified) {
  const int ds = sys.d_slow;
  const int df = sys.d_fast;
  const double w = sys.omega;
  const double wt = omega_tilde;

  EnergyReport r;
  r.modified = modified;
  r.I_j.resize(df);

  double kin_slow = 0.0;
  for (int i = 0; i < ds; ++i) kin_slow += s.p[i] * s.p[i];
  kin_slow *= 0.5;

  double I = 0.0, It = 0.0;
  const double rt = (w == 0.0) ? 1.0 : wt / w;
  for (int j = 0; j < df; ++j) {
    const double qj = s.q[ds + j];
    const double pj = s.p[ds + j];
    r.I_j[j] = 0.5 * pj * pj + 0.5 * w * w * qj * qj;
    I += r.I_j[j];
    const double ptj = rt * pj;
    It += 0.5 * ptj * ptj + 0.5 * wt * wt * qj * qj;
  }
  r.I = I;
  r.Itilde = It;

  std::vector<double> g;
  sys.force(s.q, g);
  double coupling = 0.0;
  for (int j = 0; j < df; ++j) coupling += s.q[ds + j] * g[ds + j];
  r.coupling = coupling;

  const double U = sys.potential(s.q);
  r.H = kin_slow + I + U;
  r.Htilde = kin_slow + It + U;
  r.J = I - coupling;
  r.Jtilde = It - coupling;
  return r;
}

}  // namespace

EnergyReport energies(const OscillatorySystem& sys, const MethodSpec& spec,
                      double h, const State& s) {
  const double wt = spec.freq.map(h, sys.omega);
  return energies_impl(sys, s, wt, !spec.freq.identity);
}

EnergyReport energies(const OscillatorySystem& sys, const State& s) {
  return energies_impl(sys, s, sys.omega, false);
}

MFEConstants mfe_constants(const MethodSpec& spec, double h, double omega) {
  MFEConstants c;
  if (omega == 0.0) return c;  // classical limit, all constants 1

  const double wt = spec.freq.map(h, omega);
  const double ratio = wt / omega;
  const double xi = h * wt;
  const double psi = spec.psi(xi);
  const double phi = spec.phi(xi);
  const double s = sinc(xi);
  const double sh = sinc(0.5 * xi);

  c.resonant = std::abs(s) < 1e-12;
  if (s == 0.0) {
    c.alpha = std::copysign(std::numeric_limits<double>::infinity(),
                            psi * phi / ratio);
  } else {
    c.alpha = psi * phi / (ratio * s);
  }
  c.beta = phi * phi;
  c.gamma = psi * phi / (ratio * ratio * sh * sh);
  c.rho = psi / (sh * sh) - 1.0;
  c.rho_tilde = ratio * ratio - 1.0;
  c.gamma_over_phi = c.gamma / phi;
  return c;
}

std::pair<double, double> energy_identities_check(const OscillatorySystem& sys,
                                                  const MethodSpec& spec,
                                                  double h, const State& s) {
  const EnergyReport r = energies(sys, spec, h, s);
  const double w = sys.omega;
  const double wt = spec.freq.map(h, w);
  const double rho_t = (wt * wt) / (w * w) - 1.0;
  const double dH = r.H - ((r.Htilde - rho_t * r.coupling) - rho_t * r.J);
  const double dJ = r.J - (w * w) / (wt * wt) * (r.Jtilde - rho_t * r.coupling);
  return {std::abs(dH), std::abs(dJ)};
}

namespace {

// Packed averaged state: [y0, y0dot, Re z1, Im z1].
struct AvgRhs {
  const OscillatorySystem* sys;
  double eps;
  int ds, df;
  mutable std::vector<double> x, g0c, gp, gm, g2;

  void operator()(const std::vector<double>& y, std::vector<double>& dy) const {
    const double w = sys->omega;
    const int d = ds + df;
    dy.assign(2 * ds + 2 * df, 0.0);

    x.assign(d, 0.0);
    for (int i = 0; i < ds; ++i) x[i] = y[i];
    sys->force(x, g0c);  // g at (y0, 0)

    // y0'' = g0(y0, w^-2 g1(y0,0)) + d2g0/dx1^2 (y0,0)(z1, conj z1)
    std::vector<double>& x2 = gp;
    x2 = x;
    for (int j = 0; j < df; ++j) x2[ds + j] = g0c[ds + j] / (w * w);
    sys->force(x2, g2);
    for (int i = 0; i < ds; ++i) dy[i] = y[ds + i];  // y0' = y0dot
    for (int i = 0; i < ds; ++i) dy[ds + i] = g2[i];

    // bilinear term: T(z, conj z) = T(a, a) + T(b, b) for z = a + ib
    for (int part = 0; part < 2; ++part) {
      const double* v = y.data() + 2 * ds + part * df;
      double vn = 0.0;
      for (int j = 0; j < df; ++j) vn = std::max(vn, std::abs(v[j]));
      if (vn == 0.0) continue;
      x2 = x;
      for (int j = 0; j < df; ++j) x2[ds + j] = eps * v[j];
      sys->force(x2, g2);
      for (int j = 0; j < df; ++j) x2[ds + j] = -eps * v[j];
      sys->force(x2, gm);
      for (int i = 0; i < ds; ++i)
        dy[ds + i] += (g2[i] - 2.0 * g0c[i] + gm[i]) / (eps * eps);
    }

    // 2 i w z1' = A z1 with A = dg1/dx1(y0, 0):  z1' = -i (A z1)/(2w)
    const double* zr = y.data() + 2 * ds;
    const double* zi = y.data() + 2 * ds + df;
    double* dzr = dy.data() + 2 * ds;
    double* dzi = dy.data() + 2 * ds + df;
    for (int j = 0; j < df; ++j) {
      x2 = x;
      x2[ds + j] = eps;
      sys->force(x2, g2);
      x2[ds + j] = -eps;
      sys->force(x2, gm);
      for (int i = 0; i < df; ++i) {
        const double aij = (g2[ds + i] - gm[ds + i]) / (2.0 * eps);  // A(i,j)
        dzr[i] += aij * zi[j] / (2.0 * w);
        dzi[i] -= aij * zr[j] / (2.0 * w);
      }
    }
  }
};

}  // namespace

std::vector<AveragedState> averaged_system_solve(const OscillatorySystem& sys,
                                                 const State& s0, double T,
                                                 const AveragedOptions& opts) {
  if (opts.dt <= 0.0 || opts.dt > T)
    throw std::invalid_argument("averaged_system_solve: need 0 < dt <= T");
  const int ds = sys.d_slow;
  const int df = sys.d_fast;
  const double w = sys.omega;

  const int n = 2 * ds + 2 * df;
  std::vector<double> y(n);
  for (int i = 0; i < ds; ++i) y[i] = s0.q[i];
  for (int i = 0; i < ds; ++i) y[ds + i] = s0.p[i];
  // z1(0) = (q1 - i p1/w)/2, the leading-order principal-term relation
  for (int j = 0; j < df; ++j) y[2 * ds + j] = 0.5 * s0.q[ds + j];
  for (int j = 0; j < df; ++j) y[2 * ds + df + j] = -0.5 * s0.p[ds + j] / w;

  AvgRhs rhs{&sys, opts.fd_eps, ds, df, {}, {}, {}, {}, {}};

  const long nsteps = std::max<long>(1, std::llround(T / opts.dt));
  const double dt = T / static_cast<double>(nsteps);

  auto pack = [&](double t) {
    AveragedState a;
    a.t = t;
    a.y0.assign(y.begin(), y.begin() + ds);
    a.y0dot.assign(y.begin() + ds, y.begin() + 2 * ds);
    a.z1.resize(df);
    for (int j = 0; j < df; ++j)
      a.z1[j] = {y[2 * ds + j], y[2 * ds + df + j]};
    for (double v : y)
      if (!std::isfinite(v))
        throw NonFiniteState("averaged_system_solve: non-finite averaged state");
    return a;
  };

  std::vector<AveragedState> out;
  out.reserve(static_cast<size_t>(nsteps / opts.sample_stride) + 2);
  out.push_back(pack(0.0));

  std::vector<double> k1, k2, k3, k4, tmp(n);
  for (long k = 0; k < nsteps; ++k) {
    rhs(y, k1);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    rhs(tmp, k2);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    rhs(tmp, k3);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    rhs(tmp, k4);
    for (int i = 0; i < n; ++i)
      y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if ((k + 1) % opts.sample_stride == 0 || k + 1 == nsteps)
      out.push_back(pack(static_cast<double>(k + 1) * dt));
  }
  return out;
}

double averaged_stiff_energy(const AveragedState& a, double omega, int j) {
  return 2.0 * omega * omega * std::norm(a.z1[static_cast<size_t>(j)]);
}

namespace {

// Spectral norm via power iteration on A^T A; A is small and the caller only
// needs order-of-magnitude accuracy.
double spectral_norm(const std::vector<double>& a, int n) {
  if (n == 0) return 0.0;
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n))), av(n), atav(n);
  double lam = 0.0;
  for (int it = 0; it < 60; ++it) {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += a[i * n + j] * v[j];
      av[i] = s;
    }
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += a[i * n + j] * av[i];
      atav[j] = s;
    }
    double nrm = 0.0;
    for (double x : atav) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) return 0.0;
    lam = nrm;
    for (int j = 0; j < n; ++j) v[j] = atav[j] / nrm;
  }
  return std::sqrt(lam);
}

}  // namespace

double deviation_scale(const OscillatorySystem& sys, const MethodSpec& spec,
                       double h, const std::vector<std::vector<double>>& y0_path,
                       double I0) {
  if (y0_path.empty())
    throw std::invalid_argument("deviation_scale: empty slow path");
  const int ds = sys.d_slow;
  const int df = sys.d_fast;
  const double eps = 1e-5;

  double max_norm = 0.0;
  std::vector<double> x(sys.dim(), 0.0), gp, gm, a(df * df);
  for (const std::vector<double>& y0 : y0_path) {
    for (int i = 0; i < ds; ++i) x[i] = y0[i];
    for (int j = 0; j < df; ++j) x[ds + j] = 0.0;
    for (int j = 0; j < df; ++j) {
      x[ds + j] = eps;
      sys.force(x, gp);
      x[ds + j] = -eps;
      sys.force(x, gm);
      x[ds + j] = 0.0;
      for (int i = 0; i < df; ++i)
        a[i * df + j] = (gp[ds + i] - gm[ds + i]) / (2.0 * eps);
    }
    max_norm = std::max(max_norm, spectral_norm(a, df));
  }

  const MFEConstants c = mfe_constants(spec, h, sys.omega);
  return std::sqrt(0.5 * I0) / sys.omega * max_norm * c.gamma_over_phi;
}

double max_deviation(const std::vector<double>& series) {
  if (series.empty())
    throw std::invalid_argument("max_deviation: empty series");
  const double base = series.front();
  double dev = 0.0;
  for (double v : series) dev = std::max(dev, std::abs(v - base));
  return dev;
}

}  // namespace oscibench
