#pragma once

#include <stdexcept>
#include <string>

namespace oscibench {

/// (h, omega) outside a frequency map's domain, e.g. SV with h*omega > 2.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// NaN or infinity appeared in a state update. Signals blow-up (resonance,
/// linear instability), not a programming error.
struct NonFiniteState : std::runtime_error {
  long step = -1;
  explicit NonFiniteState(const std::string& what, long step_index = -1)
      : std::runtime_error(what), step(step_index) {}
};

/// Momentum recovery attempted where |sinc(h*omega_tilde)| is too small.
struct NearResonance : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Newton iteration failed to reach tolerance within the iteration cap.
struct NoConvergence : std::runtime_error {
  int iterations = 0;
  NoConvergence(const std::string& what, int iters)
      : std::runtime_error(what), iterations(iters) {}
};

/// Reference integration could not be validated within the step budget.
struct ReferenceNotConverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace oscibench
