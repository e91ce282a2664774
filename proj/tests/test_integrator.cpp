#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "oscibench/diagnostics.hpp"
#include "oscibench/errors.hpp"
#include "oscibench/integrator.hpp"

using namespace oscibench;

namespace {

constexpr double kPi = std::numbers::pi;

double atan_series(double x) {
  if (std::abs(x) > 1.0) return (x > 0 ? kPi / 2 : -kPi / 2) - atan_series(1.0 / x);
  double term = x, sum = x;
  const double x2 = x * x;
  for (int k = 1; k < 200; ++k) {
    term *= -x2;
    sum += term / (2 * k + 1);
  }
  return sum;
}

// random FPU-like state with fast positions at the physical 1/omega scale
State random_state(std::mt19937& rng, int ell, double omega, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  State s;
  s.q.resize(2 * ell);
  s.p.resize(2 * ell);
  for (int i = 0; i < ell; ++i) {
    s.q[i] = u(rng);
    s.q[ell + i] = u(rng) / omega;
    s.p[i] = u(rng);
    s.p[ell + i] = u(rng);
  }
  return s;
}

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double scale = 1e-300, diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(b[i]));
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  return diff / std::max(scale, 1.0);
}

// Hamiltonian-splitting oracle for method B: exact fast flow + slow kick,
// written directly from the splitting, independent of the stepper kernels.
State splitting_step_b(const OscillatorySystem& sys, double h, const State& s) {
  const int d = sys.dim();
  State out = s;
  std::vector<double> g;
  sys.force(out.q, g);
  for (int i = 0; i < d; ++i) out.p[i] += 0.5 * h * g[i];
  for (int i = 0; i < d; ++i) {
    if (i < sys.d_slow) {
      out.q[i] += h * out.p[i];
    } else {
      const double c = std::cos(h * sys.omega), sn = std::sin(h * sys.omega);
      const double q = out.q[i], p = out.p[i];
      out.q[i] = c * q + sn / sys.omega * p;
      out.p[i] = -sys.omega * sn * q + c * p;
    }
  }
  sys.force(out.q, g);
  for (int i = 0; i < d; ++i) out.p[i] += 0.5 * h * g[i];
  out.t += h;
  return out;
}

}  // namespace

TEST_CASE("make_context: scalars, modified frequency, domain") {
  const OscillatorySystem sys = fpu_system({3, 50.0});
  const StepperContext imex = make_context(method_or_throw("IMEX"), sys, 0.1);
  CHECK(imex.fast.xi == doctest::Approx(2.0 * atan_series(2.5)).epsilon(1e-13));
  CHECK(imex.fast.xi == doctest::Approx(2.3805).epsilon(5e-4));
  CHECK(imex.fast.xi < kPi);

  const StepperContext b = make_context(method_or_throw("B"), sys, 0.1);
  CHECK(b.fast.omega_tilde == 50.0);

  CHECK_THROWS_AS(make_context(method_or_throw("SV"), fpu_system({3, 200.0}), 0.02),
                  DomainError);
  CHECK_THROWS_AS(make_context(method_or_throw("B"), sys, 0.0), DomainError);

  CHECK(imex.slow.cos_xi == 1.0);
  CHECK(imex.slow.drift == 0.1);
  CHECK(imex.slow.psi1 == 1.0);
  CHECK(imex.slow.phi == 1.0);
  CHECK(imex.slow.kick == 0.0);
}

TEST_CASE("step_one: exact harmonic rotation and free drift for g == 0") {
  const double omega = 13.0, h = 0.05;
  const OscillatorySystem sys = free_system(1, 1, omega);
  const StepperContext ctx = make_context(method_or_throw("B"), sys, h);

  State s;
  s.q = {0.7, 1.0};
  s.p = {0.3, 0.0};
  const State r = step_one(ctx, s);
  CHECK(r.q[1] == doctest::Approx(std::cos(h * omega)).epsilon(1e-14));
  CHECK(r.p[1] == doctest::Approx(-omega * std::sin(h * omega)).epsilon(1e-14));
  CHECK(r.q[0] == doctest::Approx(0.7 + h * 0.3).epsilon(1e-15));
  CHECK(r.p[0] == 0.3);
  CHECK(r.t == doctest::Approx(h));
}

TEST_CASE("g == 0: all identity-frequency methods reduce to the exact rotation") {
  const double omega = 40.0, h = 0.03;
  const OscillatorySystem sys = free_system(1, 1, omega);
  for (const char* name : {"A", "B", "C", "D", "E", "G"}) {
    const StepperContext ctx = make_context(method_or_throw(name), sys, h);
    State s;
    s.q = {0.2, 1.0};
    s.p = {-0.4, 0.3};
    for (int n = 1; n <= 1000; ++n) {
      s = step_one(ctx, s);
      if (n % 250) continue;
      const double t = n * h;
      CHECK(std::abs(s.q[1] - (std::cos(omega * t) + 0.3 / omega * std::sin(omega * t))) <=
            1e-12);
      CHECK(std::abs(s.p[1] - (-omega * std::sin(omega * t) + 0.3 * std::cos(omega * t))) <=
            1e-12 * omega);
    }
  }
}

TEST_CASE("short IMEX run keeps the Hamiltonian near-constant") {
  const OscillatorySystem sys = fpu_system({3, 50.0});
  const State s0 = fpu_initial_state({3, 50.0});
  const StepperContext ctx = make_context(method_or_throw("IMEX"), sys, 0.1);
  const double h0 = hamiltonian(sys, s0);
  State s = s0;
  for (int n = 0; n < 10; ++n) s = step_one(ctx, s);
  CHECK(std::abs(hamiltonian(sys, s) - h0) <= 5e-3);
}

TEST_CASE("one-step positions satisfy the two-term recurrence") {
  const double h = 0.02, omega = 50.0;  // h*omega = 1
  const OscillatorySystem sys = fpu_system({3, omega});
  const StepperContext ctx = make_context(method_or_throw("C"), sys, h);
  State s = fpu_initial_state({3, omega});
  std::vector<std::vector<double>> qs{s.q};
  OneStepper stepper(ctx);
  for (int n = 0; n < 1000; ++n) {
    stepper.step(s);
    qs.push_back(s.q);
  }
  for (std::size_t n = 1; n + 1 < qs.size(); n += 37) {
    const std::vector<double> pred = step_two_term(ctx, qs[n - 1], qs[n]);
    CHECK(rel_diff(pred, qs[n + 1]) <= 1e-11);
  }
}

TEST_CASE("two-term free particle on the slow block") {
  const OscillatorySystem sys = free_system(2, 0, 0.0);
  const StepperContext ctx = make_context(method_or_throw("B"), sys, 0.1);
  const std::vector<double> qp{0.0, 1.0}, qc{0.5, 1.5};
  const std::vector<double> qn = step_two_term(ctx, qp, qc);
  CHECK(qn[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(qn[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("method B equals the Hamiltonian-splitting composition") {
  const double h = 0.02, omega = 50.0;
  const OscillatorySystem sys = fpu_system({3, omega});
  const StepperContext ctx = make_context(method_or_throw("B"), sys, h);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const State s = random_state(rng, 3, omega);
    const State a = step_one(ctx, s);
    const State b = splitting_step_b(sys, h, s);
    CHECK(rel_diff(a.q, b.q) <= 1e-12);
    CHECK(rel_diff(a.p, b.p) <= 1e-12);
  }
}

TEST_CASE("recover_momentum: harmonic oracle, SV relation, resonance guard") {
  const double omega = 20.0, h = 0.04;
  const OscillatorySystem sys = free_system(0, 1, omega);
  const StepperContext b = make_context(method_or_throw("B"), sys, h);

  // q(t) = cos(w t) solves the two-term recurrence for B exactly
  for (double t : {0.3, 1.0, 2.2}) {
    const std::vector<double> qm{std::cos(omega * (t - h))};
    const std::vector<double> qp{std::cos(omega * (t + h))};
    const std::vector<double> p = recover_momentum(b, qm, qp);
    CHECK(std::abs(p[0] - (-omega * std::sin(omega * t))) <= 1e-10 * omega);
  }

  // SV: cos(h w~/2) p_n = central difference, and the central difference is
  // the velocity Verlet momentum
  {
    const double hsv = 0.02, wsv = 50.0;
    const OscillatorySystem fpu = fpu_system({3, wsv});
    const StepperContext sv = make_context(method_or_throw("SV"), fpu, hsv);
    State s = fpu_initial_state({3, wsv});
    State prev = s;
    for (int n = 0; n < 10; ++n) {
      prev = s;
      s = stormer_verlet_step(fpu, hsv, s);
    }
    const State next = stormer_verlet_step(fpu, hsv, s);
    const std::vector<double> rec = recover_momentum(sv, prev.q, next.q);
    const double chalf = std::cos(0.5 * hsv * sv.fast.omega_tilde);
    for (int i = 0; i < 6; ++i) {
      const double central = (next.q[i] - prev.q[i]) / (2 * hsv);
      CHECK(std::abs(central - s.p[i]) <= 1e-12 * std::max(1.0, std::abs(s.p[i])));
      const double factor = i < 3 ? 1.0 : chalf;
      CHECK(std::abs(factor * rec[i] - central) <=
            1e-12 * std::max(1.0, std::abs(central)));
    }
  }

  // h * omega~ = pi: sinc vanishes, recovery is ill-conditioned
  const OscillatorySystem res = free_system(0, 1, kPi / 0.04);
  const StepperContext bres = make_context(method_or_throw("B"), res, 0.04);
  CHECK_THROWS_AS(recover_momentum(bres, {1.0}, {1.0}), NearResonance);
}

TEST_CASE("IMEX direct form coincides with the modified-trigonometric form") {
  // the two routes are one algebraic identity: compare them step by step
  // along the trajectory (free-running floating-point noise would random-walk)
  const double h = 0.1, omega = 50.0;
  const OscillatorySystem sys = fpu_system({3, omega});
  const StepperContext ctx = make_context(method_or_throw("IMEX"), sys, h);

  State s = fpu_initial_state({3, omega});
  std::vector<double> q_prev = s.q;
  s = step_one(ctx, s);
  double worst = 0.0;
  for (int n = 0; n < 2000; ++n) {
    const std::vector<double> na = step_two_term(ctx, q_prev, s.q);
    const std::vector<double> nb = imex_direct_step(sys, h, q_prev, s.q);
    worst = std::max(worst, rel_diff(na, nb));
    q_prev = s.q;
    s = step_one(ctx, s);
    // the one-step positions satisfy the same recurrence (looser: rounding)
    CHECK(rel_diff(na, s.q) <= 1e-11);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("IMEX direct form: omega = 0 reduces to Stoermer/Verlet") {
  OscillatorySystem sys = fpu_system({2, 50.0});
  sys.omega = 0.0;  // soft chain only
  const std::vector<double> qp{0.1, -0.2, 0.05, 0.3}, qc{0.2, -0.1, 0.0, 0.25};
  std::vector<double> g;
  sys.force(qc, g);
  const std::vector<double> qn = imex_direct_step(sys, 0.1, qp, qc);
  for (int i = 0; i < 4; ++i)
    CHECK(qn[i] == doctest::Approx(2 * qc[i] - qp[i] + 0.01 * g[i]).epsilon(1e-15));
}

TEST_CASE("IMEX amplification stays on the unit circle for every h*omega") {
  // q_{n+1} = b q_n - q_{n-1} with b = 2(1-a)/(1+a), a = (h w/2)^2; the
  // companion matrix has det 1, so |b| <= 2 puts both eigenvalues on the
  // unit circle.
  for (double homega = 0.1; homega < 60.0; homega += 0.37) {
    const double a = 0.25 * homega * homega;
    const double b = 2.0 * (1.0 - a) / (1.0 + a);
    CHECK(std::abs(b) <= 2.0);
    const double disc = b * b - 4.0;
    CHECK(disc <= 0.0);
    const double mod = std::sqrt(b * b / 4 + (-disc) / 4);
    CHECK(mod == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Stoermer/Verlet baseline: exactness, marginal stability, blow-up") {
  // free particle: exact
  const OscillatorySystem fp = free_system(1, 0, 0.0);
  State s;
  s.q = {1.0};
  s.p = {0.5};
  const State r = stormer_verlet_step(fp, 0.25, s);
  CHECK(r.q[0] == doctest::Approx(1.125).epsilon(1e-15));
  CHECK(r.p[0] == 0.5);

  // h*omega = 2: marginally stable (bounded linear growth, no blow-up)
  {
    const OscillatorySystem sys = free_system(0, 1, 2.0 / 0.1);
    State m;
    m.q = {1.0};
    m.p = {0.0};
    double maxq = 0.0;
    for (int n = 0; n < 10000; ++n) {
      m = stormer_verlet_step(sys, 0.1, m);
      maxq = std::max(maxq, std::abs(m.q[0]));
    }
    CHECK(std::isfinite(maxq));
    CHECK(maxq <= 2.0);
  }

  // h*omega = 2.001 on FPU: the quartic force turns the linear instability
  // into a genuine blow-up well within 10^4 steps
  {
    const double omega = 50.0, h = 2.001 / omega;
    const OscillatorySystem sys = fpu_system({3, omega});
    State m = fpu_initial_state({3, omega});
    bool blew_up = false;
    try {
      for (int n = 0; n < 10000; ++n) m = stormer_verlet_step(sys, h, m);
    } catch (const NonFiniteState&) {
      blew_up = true;
    }
    CHECK(blew_up);
  }
}

TEST_CASE("SV method positions equal velocity Verlet positions for h*omega < 2") {
  const double h = 0.02, omega = 50.0;  // h*omega = 1
  const OscillatorySystem sys = fpu_system({3, omega});
  const StepperContext sv = make_context(method_or_throw("SV"), sys, h);

  State vv = fpu_initial_state({3, omega});
  std::vector<double> q_prev = vv.q;
  vv = stormer_verlet_step(sys, h, vv);
  std::vector<double> q_curr = vv.q;

  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const std::vector<double> q_next = step_two_term(sv, q_prev, q_curr);
    vv = stormer_verlet_step(sys, h, vv);
    worst = std::max(worst, rel_diff(q_next, vv.q));
    q_prev.swap(q_curr);
    q_curr = q_next;
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("implicit midpoint: linear one-shot, energy conservation, convergence") {
  // linear problem: Newton converges in one iteration and H is machine-exact
  {
    const double omega = 2.0, h = 0.1;
    const OscillatorySystem sys = free_system(1, 1, omega);
    State s;
    s.q = {0.3, 1.0};
    s.p = {0.1, 0.0};
    const double h0 = hamiltonian(sys, s);
    int iters = 0;
    for (int n = 0; n < 10000; ++n) {
      s = implicit_midpoint_step(sys, h, s, 1e-12, 25, &iters);
      CHECK(iters <= 1);
    }
    CHECK(std::abs(hamiltonian(sys, s) - h0) <= 1e-12 * std::abs(h0));
  }

  // FPU omega = 50, h = 0.01: converges within 5 iterations at tol 1e-12
  {
    const OscillatorySystem sys = fpu_system({3, 50.0});
    State s = fpu_initial_state({3, 50.0});
    int iters = 0, worst = 0;
    for (int n = 0; n < 50; ++n) {
      s = implicit_midpoint_step(sys, 0.01, s, 1e-12, 25, &iters);
      worst = std::max(worst, iters);
    }
    CHECK(worst <= 5);
  }

  // pathological step: refuse rather than return a wrong state
  {
    const OscillatorySystem sys = fpu_system({3, 50.0});
    const State s = fpu_initial_state({3, 50.0});
    CHECK_THROWS_AS(implicit_midpoint_step(sys, 1e6, s), NoConvergence);
  }
}

TEST_CASE("symplecticity defect: small for B, C, IMEX, SV; large for A, E, G") {
  std::mt19937 rng(5);
  const double omega = 50.0;
  const OscillatorySystem sys = fpu_system({3, omega});

  for (const char* name : {"B", "C", "IMEX", "SV"}) {
    const StepperContext ctx = make_context(method_or_throw(name), sys, 0.02);
    for (int trial = 0; trial < 5; ++trial) {
      const State s = random_state(rng, 3, omega);
      CHECK(symplecticity_defect(ctx, s) <= 1e-6);
    }
  }
  for (const char* name : {"A", "E", "G"}) {
    const StepperContext ctx = make_context(method_or_throw(name), sys, 0.03);  // h*omega = 1.5
    const State s = random_state(rng, 3, omega);
    CHECK(symplecticity_defect(ctx, s) >= 1e-3);
  }
  // filters act only on g: with g == 0 every method is a per-block rotation
  const OscillatorySystem lin = free_system(1, 1, 30.0);
  for (const MethodSpec& m : builtin_methods()) {
    if (!m.trigonometric || !m.freq.in_domain(0.03, 30.0)) continue;
    const StepperContext ctx = make_context(m, lin, 0.03);
    State s;
    s.q = {0.4, 0.02};
    s.p = {-0.3, 0.6};
    CHECK(symplecticity_defect(ctx, s) <= 1e-9);
  }
}

TEST_CASE("time symmetry: a backward step undoes a forward step") {
  std::mt19937 rng(17);
  const double omega = 50.0;
  const OscillatorySystem sys = fpu_system({3, omega});
  for (const MethodSpec& m : builtin_methods()) {
    if (!m.trigonometric) continue;
    const double h = m.name == "SV" ? 0.02 : 0.05;
    const StepperContext fwd = make_context(m, sys, h);
    const StepperContext bwd = make_context(m, sys, -h);
    for (int trial = 0; trial < 10; ++trial) {
      const State s = random_state(rng, 3, omega);
      const State back = step_one(bwd, step_one(fwd, s));
      CHECK(rel_diff(back.q, s.q) <= 1e-10);
      CHECK(rel_diff(back.p, s.p) <= 1e-10);
    }
  }
}

TEST_CASE("integrate: zero steps, sample times, step index on blow-up") {
  const OscillatorySystem sys = fpu_system({3, 50.0});
  const State s0 = fpu_initial_state({3, 50.0});
  const StepperContext ctx = make_context(method_or_throw("IMEX"), sys, 0.1);

  const Trajectory t0 = integrate(ctx, s0, 0);
  REQUIRE(t0.samples.size() == 1);
  CHECK(t0.samples[0].q == s0.q);

  const Trajectory tr = integrate(ctx, s0, 100, 10);
  REQUIRE(tr.samples.size() == 11);
  for (int k = 0; k <= 10; ++k)
    CHECK(tr.samples[k].t == 10.0 * k * 0.1);  // t by multiplication, exact

  // B at h*omega = pi on FPU: resonance; blow-up or a deviation far above
  // the non-resonant level
  const double h = 0.02, omega = kPi / h;
  const OscillatorySystem res = fpu_system({3, omega});
  const StepperContext bres = make_context(method_or_throw("B"), res, h);
  auto omega_i_dev = [](const OscillatorySystem& sys, const StepperContext& ctx,
                        long n, bool* diverged) {
    const int ds = sys.d_slow;
    double base = 0.0, dev = 0.0;
    try {
      integrate_observe(ctx, fpu_initial_state({3, sys.omega}), n, 1,
                        [&](long k, const State& s) {
                          double I = 0.0;
                          for (int j = ds; j < sys.dim(); ++j)
                            I += 0.5 * s.p[j] * s.p[j] +
                                 0.5 * sys.omega * sys.omega * s.q[j] * s.q[j];
                          const double v = sys.omega * I;
                          if (k == 0) base = v;
                          dev = std::max(dev, std::abs(v - base));
                        });
    } catch (const NonFiniteState& e) {
      CHECK(e.step > 0);
      *diverged = true;
    }
    return dev;
  };
  bool div_res = false, div_off = false;
  const double dev_res = omega_i_dev(res, bres, 10000, &div_res);
  const OscillatorySystem off = fpu_system({3, 0.8 * kPi / h});
  const StepperContext boff = make_context(method_or_throw("B"), off, h);
  const double dev_off = omega_i_dev(off, boff, 10000, &div_off);
  CHECK(!div_off);
  CHECK((div_res || dev_res >= 10.0 * dev_off));
}

TEST_CASE("FSAL caching changes nothing, bit for bit") {
  const OscillatorySystem sys = fpu_system({3, 50.0});
  const State s0 = fpu_initial_state({3, 50.0});
  for (const char* name : {"B", "D", "IMEX", "SV"}) {
    const StepperContext ctx = make_context(method_or_throw(name), sys, 0.02);
    const Trajectory cached = integrate(ctx, s0, 500, 1, {}, true);
    const Trajectory plain = integrate(ctx, s0, 500, 1, {}, false);
    REQUIRE(cached.samples.size() == plain.samples.size());
    for (std::size_t k = 0; k < cached.samples.size(); ++k) {
      CHECK(cached.samples[k].q == plain.samples[k].q);
      CHECK(cached.samples[k].p == plain.samples[k].p);
    }
  }
}

TEST_CASE("FSAL caching makes one force evaluation per step") {
  OscillatorySystem sys = fpu_system({3, 50.0});
  auto inner = sys.force;
  long evals = 0;
  sys.force = [inner, &evals](const std::vector<double>& q, std::vector<double>& g) {
    ++evals;
    inner(q, g);
  };
  const StepperContext ctx = make_context(method_or_throw("B"), sys, 0.02);
  State s = fpu_initial_state({3, 50.0});
  OneStepper stepper(ctx);
  stepper.step(s);
  const long after_first = evals;  // no cache yet: opening + closing kick
  for (int n = 0; n < 100; ++n) stepper.step(s);
  CHECK(after_first == 2);
  CHECK(evals == after_first + 100);
}

TEST_CASE("MIDPOINT marker dispatches to the implicit midpoint baseline") {
  const OscillatorySystem sys = fpu_system({3, 50.0});
  const State s0 = fpu_initial_state({3, 50.0});
  const StepperContext ctx = make_context(method_or_throw("MIDPOINT"), sys, 0.01);
  const State a = step_one(ctx, s0);
  const State b = implicit_midpoint_step(sys, 0.01, s0);
  CHECK(a.q == b.q);
  CHECK(a.p == b.p);
}
