#include "oscibench/integrator.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "oscibench/errors.hpp"

namespace oscibench {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

void check_finite(const std::vector<double>& q, const std::vector<double>& p,
                  const char* where) {
  if (!all_finite(q) || !all_finite(p))
    throw NonFiniteState(std::string(where) + ": non-finite state entry");
}

// Dense LU solve with partial pivoting; d <= 10 here, no library needed.
void solve_dense(std::vector<double>& a, std::vector<double>& b, int n) {
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    const double d = a[k * n + k];
    if (d == 0.0) throw NoConvergence("singular Newton matrix", 0);
    for (int i = k + 1; i < n; ++i) {
      const double m = a[i * n + k] / d;
      if (m == 0.0) continue;
      for (int j = k; j < n; ++j) a[i * n + j] -= m * a[k * n + j];
      b[i] -= m * b[k];
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    double s = b[k];
    for (int j = k + 1; j < n; ++j) s -= a[k * n + j] * b[j];
    b[k] = s / a[k * n + k];
  }
}

}  // namespace

StepperContext make_context(const MethodSpec& spec, const OscillatorySystem& system,
                            double h) {
  if (h == 0.0 || !std::isfinite(h))
    throw DomainError("make_context: h must be nonzero and finite");
  StepperContext ctx;
  ctx.spec = spec;
  ctx.system = system;
  ctx.h = h;
  ctx.slow = BlockScalars::make(spec, h, 0.0);
  ctx.fast = BlockScalars::make(spec, h, system.omega);
  const BlockScalars& f = ctx.fast;
  for (double v : {f.omega_tilde, f.ratio, f.cos_xi, f.sin_xi, f.sinc_xi, f.psi,
                   f.phi, f.psi1, f.drift, f.kick})
    if (!std::isfinite(v))
      throw NonFiniteState("make_context: non-finite stepper scalar for method " + spec.name);
  return ctx;
}

namespace {

// p+ = p + (h/2) Psi1 g(Phi q); rotate; p = p- + (h/2) Psi1 g(Phi q');
// gbuf holds g(Phi q) on entry when cached, g(Phi q_next) on exit.
void trig_step(const StepperContext& ctx, State& s, std::vector<double>& gbuf,
               std::vector<double>& fbuf, std::vector<double>& qnew,
               std::vector<double>& pnew, bool have_g) {
  const int d = ctx.system.dim();
  const int ds = ctx.system.d_slow;
  const double h = ctx.h;
  const BlockScalars& sl = ctx.slow;
  const BlockScalars& fa = ctx.fast;

  if (!have_g) {
    fbuf.resize(d);
    for (int i = 0; i < d; ++i) fbuf[i] = s.q[i] * (i < ds ? sl.phi : fa.phi);
    ctx.system.force(fbuf, gbuf);
  }

  qnew.resize(d);
  pnew.resize(d);
  for (int i = 0; i < d; ++i) {
    const BlockScalars& b = (i < ds) ? sl : fa;
    const double pk = s.p[i] + 0.5 * h * b.psi1 * gbuf[i];
    qnew[i] = b.cos_xi * s.q[i] + b.drift * pk;
    pnew[i] = -b.kick * s.q[i] + b.cos_xi * pk;
  }

  fbuf.resize(d);
  for (int i = 0; i < d; ++i) fbuf[i] = qnew[i] * (i < ds ? sl.phi : fa.phi);
  ctx.system.force(fbuf, gbuf);
  for (int i = 0; i < d; ++i)
    pnew[i] += 0.5 * h * ((i < ds) ? sl.psi1 : fa.psi1) * gbuf[i];

  check_finite(qnew, pnew, "step_one");
  s.q.swap(qnew);
  s.p.swap(pnew);
  s.t += h;
}

}  // namespace

State step_one(const StepperContext& ctx, const State& s) {
  if (!ctx.spec.trigonometric)
    return implicit_midpoint_step(ctx.system, ctx.h, s);
  State out = s;
  std::vector<double> gbuf, fbuf, qnew, pnew;
  trig_step(ctx, out, gbuf, fbuf, qnew, pnew, false);
  return out;
}

OneStepper::OneStepper(const StepperContext& ctx, bool use_fsal)
    : ctx_(&ctx), use_fsal_(use_fsal) {}

void OneStepper::reset() { have_cache_ = false; }

void OneStepper::step(State& s) {
  if (!ctx_->spec.trigonometric) {
    s = implicit_midpoint_step(ctx_->system, ctx_->h, s);
    return;
  }
  bool have_g = use_fsal_ && have_cache_ && cached_q_ == s.q;
  if (have_g) gbuf_ = cached_g_;
  trig_step(*ctx_, s, gbuf_, fbuf_, qnew_, pnew_, have_g);
  if (use_fsal_) {
    cached_g_ = gbuf_;
    cached_q_ = s.q;
    have_cache_ = true;
  }
}

std::vector<double> step_two_term(const StepperContext& ctx,
                                  const std::vector<double>& q_prev,
                                  const std::vector<double>& q_curr) {
  const int d = ctx.system.dim();
  const int ds = ctx.system.d_slow;
  std::vector<double> fq(d), g, out(d);
  for (int i = 0; i < d; ++i)
    fq[i] = q_curr[i] * (i < ds ? ctx.slow.phi : ctx.fast.phi);
  ctx.system.force(fq, g);
  const double h2 = ctx.h * ctx.h;
  for (int i = 0; i < d; ++i) {
    const BlockScalars& b = (i < ds) ? ctx.slow : ctx.fast;
    out[i] = 2.0 * b.cos_xi * q_curr[i] - q_prev[i] + h2 * b.psi * g[i];
  }
  if (!all_finite(out)) throw NonFiniteState("step_two_term: non-finite position");
  return out;
}

std::vector<double> recover_momentum(const StepperContext& ctx,
                                     const std::vector<double>& q_prev,
                                     const std::vector<double>& q_next) {
  if (ctx.system.d_fast > 0 && std::abs(ctx.fast.sinc_xi) <= 1e-8)
    throw NearResonance("recover_momentum: |sinc(h*omega~)| <= 1e-8");
  const int d = ctx.system.dim();
  const int ds = ctx.system.d_slow;
  std::vector<double> p(d);
  for (int i = 0; i < d; ++i) {
    const BlockScalars& b = (i < ds) ? ctx.slow : ctx.fast;
    p[i] = (q_next[i] - q_prev[i]) / (2.0 * b.drift);
  }
  return p;
}

std::vector<double> imex_direct_step(const OscillatorySystem& sys, double h,
                                     const std::vector<double>& q_prev,
                                     const std::vector<double>& q_curr) {
  const int d = sys.dim();
  std::vector<double> g, out(d);
  sys.force(q_curr, g);
  const double h2 = h * h;
  const double hw2 = 0.5 * h * sys.omega;
  const double a = hw2 * hw2;  // (h omega / 2)^2
  for (int i = 0; i < d; ++i) {
    if (i < sys.d_slow) {
      out[i] = 2.0 * q_curr[i] - q_prev[i] + h2 * g[i];
    } else {
      out[i] = (2.0 * q_curr[i] - q_prev[i] + h2 * g[i] -
                a * (2.0 * q_curr[i] + q_prev[i])) / (1.0 + a);
    }
  }
  if (!all_finite(out)) throw NonFiniteState("imex_direct_step: non-finite position");
  return out;
}

State stormer_verlet_step(const OscillatorySystem& sys, double h, const State& s) {
  const int d = sys.dim();
  const double w2 = sys.omega * sys.omega;
  State out = s;
  std::vector<double> g;
  sys.force(out.q, g);
  for (int i = 0; i < d; ++i) {
    const double f = (i < sys.d_slow ? 0.0 : -w2 * out.q[i]) + g[i];
    out.p[i] += 0.5 * h * f;
    out.q[i] += h * out.p[i];
  }
  sys.force(out.q, g);
  for (int i = 0; i < d; ++i) {
    const double f = (i < sys.d_slow ? 0.0 : -w2 * out.q[i]) + g[i];
    out.p[i] += 0.5 * h * f;
  }
  out.t += h;
  check_finite(out.q, out.p, "stormer_verlet_step");
  return out;
}

State implicit_midpoint_step(const OscillatorySystem& sys, double h, const State& s,
                             double tol, int max_iter, int* iters_out) {
  if (tol <= 0.0) throw std::invalid_argument("implicit_midpoint_step: tol > 0");
  const int d = sys.dim();
  const double w2 = sys.omega * sys.omega;
  auto stiff = [&](int i) { return i < sys.d_slow ? 0.0 : w2; };

  // F(m) = m - q - (h/2) p + (h^2/4)(W^2 m - g(m)) = 0, then
  // q' = 2m - q, p' = p + h (g(m) - W^2 m).
  std::vector<double> m(d), g, F(d), Fnew(d), jac(d * d), delta, gp, gm, mt(d);
  for (int i = 0; i < d; ++i) m[i] = s.q[i] + 0.5 * h * s.p[i];

  auto residual = [&](const std::vector<double>& mm, std::vector<double>& out,
                      std::vector<double>& gbuf) {
    sys.force(mm, gbuf);
    for (int i = 0; i < d; ++i)
      out[i] = mm[i] - s.q[i] - 0.5 * h * s.p[i] +
               0.25 * h * h * (stiff(i) * mm[i] - gbuf[i]);
  };

  auto norm_inf = [&](const std::vector<double>& v) {
    double n = 0.0;
    for (double x : v) n = std::max(n, std::abs(x));
    return n;
  };

  residual(m, F, g);
  double fnorm = norm_inf(F);
  const double fd = 1e-6;
  int it = 0;
  for (; it < max_iter && fnorm > tol; ++it) {
    if (!std::isfinite(fnorm))
      throw NoConvergence("implicit_midpoint_step: residual blew up", it);
    // J = I + (h^2/4) W^2 - (h^2/4) dg/dq, dg/dq by central differences
    for (int j = 0; j < d; ++j) {
      mt = m;
      mt[j] += fd;
      sys.force(mt, gp);
      mt[j] -= 2.0 * fd;
      sys.force(mt, gm);
      for (int i = 0; i < d; ++i)
        jac[i * d + j] = -(0.25 * h * h) * (gp[i] - gm[i]) / (2.0 * fd);
    }
    for (int i = 0; i < d; ++i) jac[i * d + i] += 1.0 + 0.25 * h * h * stiff(i);

    delta = F;
    solve_dense(jac, delta, d);

    // backtracking on ||F||
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 12; ++bt, lambda *= 0.5) {
      for (int i = 0; i < d; ++i) mt[i] = m[i] - lambda * delta[i];
      residual(mt, Fnew, g);
      const double fn = norm_inf(Fnew);
      if (std::isfinite(fn) && (fn < fnorm || fn <= tol)) {
        m = mt;
        F = Fnew;
        fnorm = fn;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw NoConvergence("implicit_midpoint_step: line search stalled", it + 1);
  }
  if (iters_out) *iters_out = it;
  if (fnorm > tol)
    throw NoConvergence("implicit_midpoint_step: no convergence in " +
                            std::to_string(max_iter) + " iterations",
                        max_iter);

  State out = s;
  sys.force(m, g);
  for (int i = 0; i < d; ++i) {
    out.q[i] = 2.0 * m[i] - s.q[i];
    out.p[i] = s.p[i] + h * (g[i] - stiff(i) * m[i]);
  }
  out.t += h;
  check_finite(out.q, out.p, "implicit_midpoint_step");
  return out;
}

double symplecticity_defect(const StepperContext& ctx, const State& s, double fd_eps) {
  if (fd_eps <= 0.0) throw std::invalid_argument("symplecticity_defect: fd_eps > 0");
  const int d = ctx.system.dim();
  const int n = 2 * d;
  std::vector<double> M(n * n);

  auto phase = [&](const State& st, int k) {
    return k < d ? st.q[k] : st.p[k - d];
  };
  for (int j = 0; j < n; ++j) {
    State sp = s, sm = s;
    if (j < d) {
      sp.q[j] += fd_eps;
      sm.q[j] -= fd_eps;
    } else {
      sp.p[j - d] += fd_eps;
      sm.p[j - d] -= fd_eps;
    }
    const State rp = step_one(ctx, sp);
    const State rm = step_one(ctx, sm);
    for (int i = 0; i < n; ++i)
      M[i * n + j] = (phase(rp, i) - phase(rm, i)) / (2.0 * fd_eps);
  }

  // S M: top half <- lower rows of M, bottom half <- -upper rows
  std::vector<double> SM(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) {
      SM[i * n + j] = M[(i + d) * n + j];
      SM[(i + d) * n + j] = -M[i * n + j];
    }

  double defect = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double mts = 0.0;
      for (int k = 0; k < n; ++k) mts += M[k * n + i] * SM[k * n + j];
      const double sigma = (j == i + d) ? 1.0 : (i == j + d) ? -1.0 : 0.0;
      defect = std::max(defect, std::abs(mts - sigma));
    }
  return defect;
}

namespace {

void run_steps(const StepperContext& ctx, State& s, long n_steps, long stride,
               const StepObserver& observer, bool use_fsal, Trajectory* traj) {
  const double t0 = s.t;
  OneStepper stepper(ctx, use_fsal);
  for (long k = 0;; ++k) {
    if (stride > 0 && k % stride == 0) {
      if (observer) observer(k, s);
      if (traj) traj->samples.push_back(s);
    }
    if (k == n_steps) break;
    try {
      stepper.step(s);
    } catch (const NonFiniteState& e) {
      throw NonFiniteState(std::string(e.what()) + " at step " + std::to_string(k + 1),
                           k + 1);
    }
    s.t = t0 + static_cast<double>(k + 1) * ctx.h;  // no accumulated rounding
  }
}

}  // namespace

Trajectory integrate(const StepperContext& ctx, const State& s0, long n_steps,
                     long stride, const StepObserver& observer, bool use_fsal) {
  if (n_steps < 0 || stride < 1)
    throw std::invalid_argument("integrate: n_steps >= 0 and stride >= 1");
  Trajectory traj;
  State s = s0;
  run_steps(ctx, s, n_steps, stride, observer, use_fsal, &traj);
  return traj;
}

void integrate_observe(const StepperContext& ctx, State s, long n_steps, long stride,
                       const StepObserver& observer, bool use_fsal) {
  if (n_steps < 0 || stride < 1)
    throw std::invalid_argument("integrate_observe: n_steps >= 0 and stride >= 1");
  run_steps(ctx, s, n_steps, stride, observer, use_fsal, nullptr);
}

}  // namespace oscibench
