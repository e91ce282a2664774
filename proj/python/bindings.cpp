#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "oscibench/diagnostics.hpp"
#include "oscibench/errors.hpp"
#include "oscibench/experiments.hpp"
#include "oscibench/filters.hpp"
#include "oscibench/integrator.hpp"
#include "oscibench/systems.hpp"

namespace py = pybind11;
using namespace oscibench;

namespace {

py::dict constants_dict(const MFEConstants& c) {
  py::dict d;
  d["alpha"] = c.alpha;
  d["beta"] = c.beta;
  d["gamma"] = c.gamma;
  d["rho"] = c.rho;
  d["rho_tilde"] = c.rho_tilde;
  d["gamma_over_phi"] = c.gamma_over_phi;
  d["resonant"] = c.resonant;
  return d;
}

py::dict report_dict(const EnergyReport& r) {
  py::dict d;
  d["H"] = r.H;
  d["I_j"] = r.I_j;
  d["I"] = r.I;
  d["J"] = r.J;
  d["coupling"] = r.coupling;
  d["Htilde"] = r.Htilde;
  d["Itilde"] = r.Itilde;
  d["Jtilde"] = r.Jtilde;
  d["modified"] = r.modified;
  return d;
}

}  // namespace

PYBIND11_MODULE(_oscibench, m) {
  m.doc() = "Trigonometric/IMEX integrators for highly oscillatory Hamiltonian "
            "systems with the FPU benchmark.";

  py::register_exception<DomainError>(m, "DomainError");
  py::register_exception<NonFiniteState>(m, "NonFiniteStateError");
  py::register_exception<NearResonance>(m, "NearResonanceError");
  py::register_exception<NoConvergence>(m, "NoConvergenceError");
  py::register_exception<ReferenceNotConverged>(m, "ReferenceNotConvergedError");

  m.def("sinc", &sinc, py::arg("x"), "Numerically stable sin(x)/x.");

  m.def("method_names", [] {
    std::vector<std::string> names;
    for (const MethodSpec& s : builtin_methods()) names.push_back(s.name);
    return names;
  });

  m.def(
      "modified_frequency",
      [](const std::string& method, double h, double omega) {
        return modified_frequency(method_or_throw(method), h, omega);
      },
      py::arg("method"), py::arg("h"), py::arg("omega"));

  m.def(
      "mfe_constants",
      [](const std::string& method, double h, double omega) {
        return constants_dict(mfe_constants(method_or_throw(method), h, omega));
      },
      py::arg("method"), py::arg("h"), py::arg("omega"),
      "Consistency constants alpha, beta, gamma plus rho, rho~, gamma/phi.");

  m.def(
      "fpu_initial_state",
      [](int ell, double omega) {
        const State s = fpu_initial_state({ell, omega});
        return py::make_tuple(s.q, s.p);
      },
      py::arg("ell") = 3, py::arg("omega") = 50.0);

  m.def(
      "fpu_transform",
      [](const std::vector<double>& q, const std::vector<double>& p) {
        std::vector<double> x, y;
        fpu_transform(q, p, x, y);
        return py::make_tuple(x, y);
      },
      py::arg("q_masses"), py::arg("p_masses"));

  m.def(
      "fpu_untransform",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        std::vector<double> q, p;
        fpu_untransform(x, y, q, p);
        return py::make_tuple(q, p);
      },
      py::arg("x"), py::arg("y"));

  m.def(
      "fpu_potential",
      [](int ell, double omega, const std::vector<double>& q) {
        return fpu_system({ell, omega}).potential(q);
      },
      py::arg("ell"), py::arg("omega"), py::arg("q"));

  m.def(
      "fpu_hamiltonian",
      [](int ell, double omega, const std::vector<double>& q,
         const std::vector<double>& p) {
        State s;
        s.q = q;
        s.p = p;
        return hamiltonian(fpu_system({ell, omega}), s);
      },
      py::arg("ell"), py::arg("omega"), py::arg("q"), py::arg("p"));

  m.def(
      "energies",
      [](const std::string& method, int ell, double omega, double h,
         const std::vector<double>& q, const std::vector<double>& p) {
        State s;
        s.q = q;
        s.p = p;
        return report_dict(energies(fpu_system({ell, omega}), method_or_throw(method), h, s));
      },
      py::arg("method"), py::arg("ell"), py::arg("omega"), py::arg("h"), py::arg("q"),
      py::arg("p"));

  m.def(
      "integrate_fpu",
      [](const std::string& method, int ell, double omega, double h, long n_steps,
         long stride) {
        const OscillatorySystem sys = fpu_system({ell, omega});
        const StepperContext ctx = make_context(method_or_throw(method), sys, h);
        const Trajectory traj = integrate(ctx, fpu_initial_state({ell, omega}), n_steps, stride);
        std::vector<py::tuple> out;
        out.reserve(traj.samples.size());
        for (const State& s : traj.samples)
          out.push_back(py::make_tuple(s.t, s.q, s.p));
        return out;
      },
      py::arg("method"), py::arg("ell"), py::arg("omega"), py::arg("h"),
      py::arg("n_steps"), py::arg("stride") = 1,
      "Sampled (t, q, p) of the one-step scheme from the standard FPU state.");

  m.def(
      "exchange_series",
      [](const std::string& method, double omega, double h, double T, long stride) {
        std::vector<py::tuple> out;
        for (const SeriesRow& r : exchange_series(method, omega, h, T, stride))
          out.push_back(py::make_tuple(r.t, r.I1, r.I2, r.I3, r.I, r.H));
        return out;
      },
      py::arg("method"), py::arg("omega"), py::arg("h"), py::arg("T"),
      py::arg("stride") = 1, "Rows (t, I1, I2, I3, I, H).");

  m.def(
      "sweep_point",
      [](const std::string& method, double h, double h_omega_over_pi, double T,
         const std::string& quantity) {
        const SweepQuantity q =
            quantity == "total_H" ? SweepQuantity::total_H : SweepQuantity::omega_I;
        const SweepRow r = sweep_point(method, h, h_omega_over_pi, T, q);
        py::dict d;
        d["method"] = r.method;
        d["h"] = r.h;
        d["omega"] = r.omega;
        d["h_omega_over_pi"] = r.h_omega_over_pi;
        d["value"] = r.value;
        d["status"] = to_string(r.status);
        return d;
      },
      py::arg("method"), py::arg("h"), py::arg("h_omega_over_pi"), py::arg("T"),
      py::arg("quantity") = "omega_I");

  m.def("max_deviation", &max_deviation, py::arg("series"));
}
