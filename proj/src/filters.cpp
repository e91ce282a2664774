#include "oscibench/filters.hpp"

#include <cctype>
#include <cmath>

#include "oscibench/errors.hpp"

namespace oscibench {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

namespace {

double one(double) { return 1.0; }
double f_sinc(double xi) { return sinc(xi); }
double f_sinc2(double xi) { const double s = sinc(xi); return s * s; }
double f_sinc3(double xi) { const double s = sinc(xi); return s * s * s; }
double f_sinc2_half(double xi) { const double s = sinc(0.5 * xi); return s * s; }
double f_cos2_half(double xi) { const double c = std::cos(0.5 * xi); return c * c; }

// tan(x)/x, stable at 0; the pole at xi = pi is genuine (resonance) and
// surfaces as a large value rather than NaN.
double f_tanc_half(double xi) {
  const double x = 0.5 * xi;
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 + x2 / 3.0 + 2.0 * x2 * x2 / 15.0;
  }
  return std::tan(x) / x;
}

double f_phi_d(double xi) {
  const double s = std::sin(0.5 * xi);
  return sinc(xi) * (1.0 + s * s / 3.0);
}

double map_identity(double, double omega) { return omega; }
bool dom_identity(double, double) { return true; }

double map_sv(double h, double omega) {
  if (omega == 0.0) return 0.0;
  const double x = 0.5 * h * omega;
  if (std::abs(x) > 1.0)
    throw DomainError("SV frequency map: sin(h*omega~/2) = h*omega/2 has no solution for h*omega > 2");
  return 2.0 / h * std::asin(x);
}
bool dom_sv(double h, double omega) { return std::abs(0.5 * h * omega) <= 1.0; }

double map_imex(double h, double omega) {
  if (omega == 0.0) return 0.0;
  return 2.0 / h * std::atan(0.5 * h * omega);
}

MethodSpec make_spec(std::string name, FilterFunction psi, FilterFunction phi,
                     FilterFunction psi1, FrequencyMap freq, bool symplectic,
                     bool trigonometric = true) {
  MethodSpec m;
  m.name = std::move(name);
  m.psi = psi;
  m.phi = phi;
  m.psi1 = psi1;
  m.freq = freq;
  m.symplectic = symplectic;
  m.trigonometric = trigonometric;
  return m;
}

std::vector<MethodSpec> build_registry() {
  const FilterFunction ones{one, "1"};
  const FilterFunction fsinc{f_sinc, "sinc(x)"};
  const FilterFunction fsinc2{f_sinc2, "sinc(x)^2"};
  const FilterFunction fsinc3{f_sinc3, "sinc(x)^3"};
  const FilterFunction fsinc2h{f_sinc2_half, "sinc(x/2)^2"};
  const FilterFunction fcos2h{f_cos2_half, "cos(x/2)^2"};
  const FilterFunction ftanch{f_tanc_half, "tan(x/2)/(x/2)"};
  const FilterFunction fphid{f_phi_d, "sinc(x)(1 + sin(x/2)^2/3)"};

  const FrequencyMap ident{map_identity, dom_identity, true, "omega~ = omega"};
  const FrequencyMap svmap{map_sv, dom_sv, false, "sin(h*omega~/2) = h*omega/2"};
  const FrequencyMap imexmap{map_imex, dom_identity, false, "tan(h*omega~/2) = h*omega/2"};

  std::vector<MethodSpec> r;
  r.push_back(make_spec("A", fsinc2h, ones, ftanch, ident, false));
  r.push_back(make_spec("B", fsinc, ones, ones, ident, true));
  r.push_back(make_spec("C", fsinc2, fsinc, fsinc, ident, true));
  r.push_back(make_spec("D", fsinc2h, fphid, ftanch, ident, false));
  r.push_back(make_spec("E", fsinc2, ones, fsinc, ident, false));
  r.push_back(make_spec("G", fsinc3, fsinc, fsinc2, ident, false));
  r.push_back(make_spec("SV", ones, ones, ones, svmap, true));
  r.push_back(make_spec("IMEX", fcos2h, ones, ones, imexmap, true));
  r.push_back(make_spec("MIDPOINT", ones, ones, ones, ident, false, false));
  return r;
}

std::string upper(std::string_view s) {
  std::string u(s);
  for (char& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return u;
}

}  // namespace

const std::vector<MethodSpec>& builtin_methods() {
  static const std::vector<MethodSpec> registry = build_registry();
  return registry;
}

const MethodSpec* find_method(std::string_view name) {
  const std::string key = upper(name);
  for (const MethodSpec& m : builtin_methods())
    if (m.name == key) return &m;
  return nullptr;
}

const MethodSpec& method_or_throw(std::string_view name) {
  const MethodSpec* m = find_method(name);
  if (!m) throw DomainError("unknown method: " + std::string(name));
  return *m;
}

double modified_frequency(const MethodSpec& spec, double h, double omega) {
  return spec.freq.map(h, omega);
}

BlockScalars BlockScalars::make(const MethodSpec& spec, double h, double omega) {
  BlockScalars b;
  b.omega = omega;
  if (omega == 0.0) {
    b.drift = h;
    return b;
  }
  b.omega_tilde = spec.freq.map(h, omega);
  b.ratio = b.omega_tilde / omega;
  b.xi = h * b.omega_tilde;
  b.cos_xi = std::cos(b.xi);
  b.sin_xi = std::sin(b.xi);
  b.sinc_xi = sinc(b.xi);
  b.psi = spec.psi(b.xi);
  b.phi = spec.phi(b.xi);
  b.psi1 = spec.psi1(b.xi);
  b.drift = h * b.ratio * b.sinc_xi;
  b.kick = omega * b.sin_xi;
  return b;
}

}  // namespace oscibench
