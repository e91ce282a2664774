#pragma once

#include <functional>
#include <vector>

#include "oscibench/filters.hpp"
#include "oscibench/systems.hpp"

namespace oscibench {

/// Everything one step needs, precomputed once per (method, system, h).
/// Immutable after construction; safe to share across threads.
struct StepperContext {
  MethodSpec spec;
  OscillatorySystem system;
  double h = 0.0;
  BlockScalars slow, fast;
};

/// Precomputes the per-block scalars. Throws DomainError when (h, omega) is
/// outside the frequency map's domain, NonFiniteState if any scalar is
/// NaN/inf. h may be negative (reverse stepping); h = 0 is rejected.
StepperContext make_context(const MethodSpec& spec, const OscillatorySystem& system, double h);

/// One step of the symmetric one-step scheme: half-kick with Psi1, rotation
/// by [cos(h W~), h W^-1 W~ sinc(h W~); -W sin(h W~), cos(h W~)], half-kick.
/// MIDPOINT contexts dispatch to implicit_midpoint_step. Two force
/// evaluations; use OneStepper for FSAL-cached loops.
State step_one(const StepperContext& ctx, const State& s);

/// Stateful stepping kernel with workspace reuse and FSAL caching of the
/// trailing force evaluation. The cached trajectory is bit-identical to the
/// uncached one.
class OneStepper {
 public:
  explicit OneStepper(const StepperContext& ctx, bool use_fsal = true);
  void step(State& s);
  void reset();  // drop the cached force (state changed externally)

 private:
  const StepperContext* ctx_;
  bool use_fsal_;
  bool have_cache_ = false;
  std::vector<double> cached_g_, cached_q_;
  std::vector<double> gbuf_, fbuf_, qnew_, pnew_;
};

/// Two-term form q_next = 2 cos(h W~) q_curr - q_prev + h^2 Psi g(Phi q_curr)
/// with Psi = psi(h W~) evaluated blockwise. For SV this is plain
/// Stoermer/Verlet; the one-step scheme carries its momenta differently.
std::vector<double> step_two_term(const StepperContext& ctx,
                                  const std::vector<double>& q_prev,
                                  const std::vector<double>& q_curr);

/// Momentum from the position recurrence: blockwise division of the central
/// difference (q_next - q_prev)/(2h) by the drift factor / h. Throws
/// NearResonance when |sinc(h omega~)| <= 1e-8.
std::vector<double> recover_momentum(const StepperContext& ctx,
                                     const std::vector<double>& q_prev,
                                     const std::vector<double>& q_next);

/// IMEX in its native linearly implicit form:
/// (q+ - 2q + q-) + (h W/2)^2 (q+ + 2q + q-) = h^2 g(q); the diagonal system
/// is solved exactly per component, no iteration.
std::vector<double> imex_direct_step(const OscillatorySystem& sys, double h,
                                     const std::vector<double>& q_prev,
                                     const std::vector<double>& q_curr);

/// Velocity Verlet (kick-drift-kick with the full force -W^2 q + g(q)).
State stormer_verlet_step(const OscillatorySystem& sys, double h, const State& s);

/// Implicit midpoint via damped Newton on the midpoint variable; Jacobian of
/// g assembled by central finite differences. Throws NoConvergence.
State implicit_midpoint_step(const OscillatorySystem& sys, double h, const State& s,
                             double tol = 1e-12, int max_iter = 25,
                             int* iters_out = nullptr);

/// ||M^T S M - S||_inf for the finite-difference Jacobian M of one step,
/// with S the canonical symplectic matrix.
double symplecticity_defect(const StepperContext& ctx, const State& s,
                            double fd_eps = 1e-6);

/// Sampled trajectory; t_k strictly increasing, spacing stride * h.
struct Trajectory {
  std::vector<State> samples;
};

using StepObserver = std::function<void(long step, const State&)>;

/// Iterates step_one n_steps times. The observer fires at every step index
/// divisible by stride (including 0). Sample times use t0 + k*h computed by
/// multiplication. Throws NonFiniteState with the failing step index.
Trajectory integrate(const StepperContext& ctx, const State& s0, long n_steps,
                     long stride = 1, const StepObserver& observer = {},
                     bool use_fsal = true);

/// Same stepping loop without storing samples; for long runs where only the
/// observer matters.
void integrate_observe(const StepperContext& ctx, State s, long n_steps,
                       long stride, const StepObserver& observer,
                       bool use_fsal = true);

}  // namespace oscibench
