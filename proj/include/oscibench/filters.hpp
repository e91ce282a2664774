#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace oscibench {

/// Numerically stable sin(x)/x: Taylor polynomial 1 - x^2/6 + x^4/120 for
/// |x| < 1e-4 (absolute error below 1e-16), sin(x)/x otherwise.
double sinc(double x);

/// An even, real-valued scalar filter with f(0) = 1. `formula` records the
/// closed form the evaluator implements.
struct FilterFunction {
  double (*eval)(double) = nullptr;
  const char* formula = "";
  double operator()(double xi) const { return eval(xi); }
};

/// Map (h, omega) -> omega_tilde with an explicit domain predicate.
/// omega = 0 always maps to 0 (the slow block is never frequency-shifted).
struct FrequencyMap {
  double (*map)(double h, double omega) = nullptr;  // throws DomainError
  bool (*in_domain)(double h, double omega) = nullptr;
  bool identity = true;
  const char* formula = "";
};

/// A named integrator: filters psi, phi, psi1 (psi1 stored in closed form,
/// never computed as psi/sinc) plus the modified-frequency map.
struct MethodSpec {
  std::string name;
  FilterFunction psi, phi, psi1;
  FrequencyMap freq;
  bool symplectic = false;
  /// false only for the MIDPOINT marker, which dispatches to the nonlinear
  /// implicit-midpoint baseline instead of the trigonometric kernels.
  bool trigonometric = true;
};

/// The built-in registry: A, B, C, D, E, G, SV, IMEX, MIDPOINT (in order).
const std::vector<MethodSpec>& builtin_methods();

/// Case-insensitive lookup; nullptr when the name is unknown.
const MethodSpec* find_method(std::string_view name);

/// Case-insensitive lookup; throws DomainError when the name is unknown.
const MethodSpec& method_or_throw(std::string_view name);

/// omega_tilde for (spec, h, omega). Throws DomainError outside the map's
/// domain (e.g. SV with |h|*omega > 2).
double modified_frequency(const MethodSpec& spec, double h, double omega);

/// Scalars of one diagonal block of the one-step scheme, evaluated once.
/// The omega -> 0 limits (slow block) are encoded here: ratio = 1, all
/// filters = 1, drift = h, kick = 0.
struct BlockScalars {
  double omega = 0.0;
  double omega_tilde = 0.0;
  double ratio = 1.0;   // omega_tilde/omega, -> 1 as omega -> 0
  double xi = 0.0;      // h * omega_tilde
  double cos_xi = 1.0;
  double sin_xi = 0.0;
  double sinc_xi = 1.0;
  double psi = 1.0, phi = 1.0, psi1 = 1.0;
  double drift = 0.0;   // h * ratio * sinc_xi; slow-block value is h
  double kick = 0.0;    // omega * sin_xi; slow-block value is 0

  static BlockScalars make(const MethodSpec& spec, double h, double omega);
};

}  // namespace oscibench
