#include "oscibench/cli.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "json.hpp"

#include "oscibench/csv.hpp"
#include "oscibench/diagnostics.hpp"
#include "oscibench/errors.hpp"
#include "oscibench/experiments.hpp"
#include "oscibench/integrator.hpp"
#include "oscibench/svg.hpp"

namespace oscibench {

namespace {

using nlohmann::json;

std::vector<std::string> split_methods(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t pos = s.find(',', start);
    if (pos == std::string::npos) pos = s.size();
    if (pos > start) out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

struct GridSpec {
  double lo = 0.0, hi = 0.0;
  int n = 0;
};

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  const auto a = s.find(':');
  const auto b = s.rfind(':');
  if (a == std::string::npos || b == a)
    throw CLI::ValidationError("--grid", "expected lo:hi:n, got '" + s + "'");
  try {
    g.lo = std::stod(s.substr(0, a));
    g.hi = std::stod(s.substr(a + 1, b - a - 1));
    g.n = std::stoi(s.substr(b + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--grid", "expected lo:hi:n, got '" + s + "'");
  }
  if (!(g.hi > g.lo) || g.n < 1)
    throw CLI::ValidationError("--grid", "need hi > lo and n >= 1");
  return g;
}

std::filesystem::path out_dir(const RunConfig& cfg) {
  std::filesystem::path dir = cfg.out.empty() ? "." : cfg.out;
  std::filesystem::create_directories(dir);
  return dir;
}

int exit_code_for(std::size_t ok_rows, std::size_t total_rows) {
  return (total_rows > 0 && ok_rows == 0) ? 1 : 0;
}

json base_manifest(const RunConfig& cfg) {
  json j;
  j["experiment"] = cfg.experiment;
  j["methods"] = cfg.methods;
  j["h"] = cfg.h;
  j["omega"] = cfg.omega;
  j["T"] = cfg.T;
  j["grid"] = cfg.grid;
  j["quantity"] = cfg.quantity;
  j["stride"] = cfg.stride;
  j["workers"] = cfg.workers;
  j["full_scale"] = cfg.full_scale;
  return j;
}

void write_manifest(const RunConfig& cfg, json j,
                    std::chrono::steady_clock::time_point t0) {
  const auto wall =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
  j["wall_ms"] = wall.count();
  j["created_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::system_clock::now().time_since_epoch())
          .count();
  const auto path = out_dir(cfg) / (cfg.experiment + "_manifest.json");
  write_text_file(path.string(), j.dump(2) + "\n");
}

json status_counts_of(const std::vector<SweepRow>& rows) {
  json c = {{"ok", 0}, {"diverged", 0}, {"domain_error", 0}};
  for (const SweepRow& r : rows) c[to_string(r.status)] = c[to_string(r.status)].get<int>() + 1;
  return c;
}

SweepQuantity parse_quantity(const std::string& q) {
  std::string s = q;
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "omega_i") return SweepQuantity::omega_I;
  if (s == "total_h") return SweepQuantity::total_H;
  throw CLI::ValidationError("--quantity", "expected omega_I, total_H or ratio_H");
}

std::vector<std::string> default_methods() {
  return {"A", "B", "C", "D", "E", "G", "SV", "IMEX"};
}

// unknown method names are usage errors, not per-row statuses
void validate_methods(const std::vector<std::string>& methods) {
  for (const std::string& m : methods)
    if (m != kReferenceName && !find_method(m))
      throw CLI::ValidationError("--method", "unknown method '" + m + "'");
}

void validate_numerics(const RunConfig& cfg) {
  if (!(cfg.h > 0.0)) throw CLI::ValidationError("--h", "must be positive");
  if (!(cfg.omega > 0.0)) throw CLI::ValidationError("--omega", "must be positive");
  if (!(cfg.T > 0.0)) throw CLI::ValidationError("--T", "must be positive");
  if (cfg.stride < 1) throw CLI::ValidationError("--stride", "must be >= 1");
  if (cfg.workers < 0) throw CLI::ValidationError("--workers", "must be >= 0");
}

}  // namespace

int cmd_sweep(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_numerics(cfg);
  const GridSpec gs = parse_grid(cfg.grid);
  const std::vector<double> grid = uniform_grid(gs.lo, gs.hi, gs.n);
  const std::vector<std::string> methods =
      cfg.methods.empty() ? default_methods() : cfg.methods;
  validate_methods(methods);

  std::string slo = cfg.quantity;
  for (char& c : slo) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::vector<SweepRow> rows;
  if (slo == "ratio_h") {
    rows = convergence_ratio(methods, {cfg.h, 2.0 * cfg.h}, grid, cfg.T, cfg.workers);
  } else {
    rows = resonance_sweep(methods, cfg.h, grid, cfg.T, parse_quantity(cfg.quantity),
                           cfg.workers);
  }

  const auto dir = out_dir(cfg);
  write_text_file((dir / "sweep.csv").string(), sweep_to_csv(rows));

  if (cfg.plot) {
    std::vector<PlotSeries> series;
    for (const std::string& m : methods) {
      PlotSeries s{m, {}};
      for (const SweepRow& r : rows)
        if (r.method == m && r.status == RunStatus::ok)
          s.points.emplace_back(r.h_omega_over_pi, r.value);
      series.push_back(std::move(s));
    }
    PlotSpec ps;
    ps.title = "sweep (" + cfg.quantity + ", h = " + format_double(cfg.h) + ")";
    ps.xlabel = "h*omega/pi";
    ps.ylabel = cfg.quantity;
    ps.logy = (slo != "ratio_h");
    write_text_file((dir / "sweep.svg").string(), render_svg(series, ps));
  }

  json j = base_manifest(cfg);
  j["rows"] = rows.size();
  j["status_counts"] = status_counts_of(rows);
  write_manifest(cfg, j, t0);

  std::size_t ok = 0;
  for (const SweepRow& r : rows) ok += r.status == RunStatus::ok;
  return exit_code_for(ok, rows.size());
}

int cmd_exchange(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_numerics(cfg);
  if (cfg.methods.size() != 1)
    throw CLI::ValidationError("--method", "exchange needs exactly one method");
  const std::string& method = cfg.methods.front();
  validate_methods({method});

  const std::vector<SeriesRow> rows =
      exchange_series(method, cfg.omega, cfg.h, cfg.T, cfg.stride);
  const long expected = std::llround(cfg.T / (cfg.h * static_cast<double>(cfg.stride)));
  const bool truncated =
      rows.empty() || rows.back().t < cfg.T - 1.5 * cfg.h * static_cast<double>(cfg.stride);

  const auto dir = out_dir(cfg);
  write_text_file((dir / "exchange.csv").string(), series_to_csv(rows));

  if (cfg.plot) {
    std::vector<PlotSeries> series(4);
    const char* labels[4] = {"I1", "I2", "I3", "I"};
    for (int i = 0; i < 4; ++i) series[i].label = labels[i];
    for (const SeriesRow& r : rows) {
      series[0].points.emplace_back(r.t, r.I1);
      series[1].points.emplace_back(r.t, r.I2);
      series[2].points.emplace_back(r.t, r.I3);
      series[3].points.emplace_back(r.t, r.I);
    }
    PlotSpec ps;
    ps.title = "slow exchange (" + method + ", omega = " + format_double(cfg.omega) +
               ", h = " + format_double(cfg.h) + ")";
    ps.xlabel = "t";
    ps.ylabel = "stiff energies";
    write_text_file((dir / "exchange.svg").string(), render_svg(series, ps));
  }

  json j = base_manifest(cfg);
  j["rows"] = rows.size();
  j["expected_rows"] = expected + 1;
  j["truncated"] = truncated;
  write_manifest(cfg, j, t0);
  return truncated ? 1 : 0;
}

int cmd_global_error(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_numerics(cfg);
  const GridSpec gs = parse_grid(cfg.grid);
  if (!(gs.lo > 0.0))
    throw CLI::ValidationError("--grid", "global-error needs lo > 0 (log-spaced h)");
  std::vector<double> h_grid(gs.n);
  for (int i = 0; i < gs.n; ++i) {
    const double f = gs.n == 1 ? 0.0 : static_cast<double>(i) / (gs.n - 1);
    h_grid[i] = std::pow(10.0, std::log10(gs.hi) + f * (std::log10(gs.lo) - std::log10(gs.hi)));
  }
  const std::vector<std::string> methods =
      cfg.methods.empty() ? default_methods() : cfg.methods;
  validate_methods(methods);

  const std::vector<GlobalErrorRow> rows =
      global_error_study(methods, cfg.omega, h_grid, cfg.T, cfg.workers);

  const auto dir = out_dir(cfg);
  write_text_file((dir / "global_error.csv").string(), global_error_to_csv(rows));

  if (cfg.plot) {
    std::vector<PlotSeries> series;
    for (const std::string& m : methods) {
      PlotSeries s{m, {}};
      for (const GlobalErrorRow& r : rows)
        if (r.method == m && r.status == RunStatus::ok)
          s.points.emplace_back(r.h, r.err_x0);
      series.push_back(std::move(s));
    }
    PlotSpec ps;
    ps.title = "global error in x0 (omega = " + format_double(cfg.omega) + ")";
    ps.xlabel = "h";
    ps.ylabel = "error";
    ps.logx = true;
    ps.logy = true;
    write_text_file((dir / "global_error.svg").string(), render_svg(series, ps));
  }

  json counts = {{"ok", 0}, {"diverged", 0}, {"domain_error", 0}};
  std::size_t ok = 0;
  for (const GlobalErrorRow& r : rows) {
    counts[to_string(r.status)] = counts[to_string(r.status)].get<int>() + 1;
    ok += r.status == RunStatus::ok;
  }
  json j = base_manifest(cfg);
  j["rows"] = rows.size();
  j["status_counts"] = counts;
  write_manifest(cfg, j, t0);
  return exit_code_for(ok, rows.size());
}

int cmd_constants(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_numerics(cfg);
  std::vector<std::string> methods = cfg.methods;
  if (methods.empty())
    for (const MethodSpec& m : builtin_methods()) methods.push_back(m.name);

  std::vector<std::vector<std::string>> out_rows;
  std::size_t ok = 0;
  for (const std::string& name : methods) {
    const MethodSpec& spec = method_or_throw(name);
    try {
      const MFEConstants c = mfe_constants(spec, cfg.h, cfg.omega);
      std::cout << spec.name << ": alpha=" << format_double(c.alpha)
                << " beta=" << format_double(c.beta)
                << " gamma=" << format_double(c.gamma)
                << " rho=" << format_double(c.rho)
                << " rho_tilde=" << format_double(c.rho_tilde)
                << " gamma/phi=" << format_double(c.gamma_over_phi)
                << (c.resonant ? " [resonant]" : "") << "\n";
      out_rows.push_back({spec.name, format_double(cfg.h), format_double(cfg.omega),
                          format_double(c.alpha), format_double(c.beta),
                          format_double(c.gamma), format_double(c.rho),
                          format_double(c.rho_tilde), format_double(c.gamma_over_phi),
                          c.resonant ? "resonant" : "ok"});
      ++ok;
    } catch (const DomainError& e) {
      std::cout << spec.name << ": domain_error (" << e.what() << ")\n";
      out_rows.push_back({spec.name, format_double(cfg.h), format_double(cfg.omega),
                          "", "", "", "", "", "", "domain_error"});
    }
  }

  const auto dir = out_dir(cfg);
  write_text_file((dir / "constants.csv").string(),
                  to_csv({"method", "h", "omega", "alpha", "beta", "gamma", "rho",
                          "rho_tilde", "gamma_over_phi", "status"},
                         out_rows));
  json j = base_manifest(cfg);
  j["rows"] = out_rows.size();
  write_manifest(cfg, j, t0);
  return exit_code_for(ok, out_rows.size());
}

int cmd_step(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_numerics(cfg);
  if (cfg.methods.size() != 1)
    throw CLI::ValidationError("--method", "step needs exactly one method");
  const std::string& method = cfg.methods.front();
  validate_methods({method});

  const OscillatorySystem sys = fpu_system({3, cfg.omega});
  const State s0 = fpu_initial_state({3, cfg.omega});
  const long n = std::llround(cfg.T / cfg.h);

  std::vector<std::vector<std::string>> out_rows;
  auto push_row = [&](double t, double H, double I, const char* status) {
    out_rows.push_back({method, format_double(cfg.h), format_double(cfg.omega),
                        std::isfinite(t) ? format_double(t) : "",
                        std::isfinite(H) ? format_double(H) : "",
                        std::isfinite(I) ? format_double(I) : "", status});
  };

  std::size_t ok = 0;
  try {
    const StepperContext ctx = make_context(method_or_throw(method), sys, cfg.h);
    integrate_observe(ctx, s0, n, cfg.stride, [&](long, const State& s) {
      const EnergyReport r = energies(sys, s);
      push_row(s.t, r.H, r.I, "ok");
      ++ok;
    });
  } catch (const DomainError&) {
    push_row(std::nan(""), std::nan(""), std::nan(""), "domain_error");
  } catch (const NonFiniteState&) {
    push_row(std::nan(""), std::nan(""), std::nan(""), "diverged");
  } catch (const NoConvergence&) {
    push_row(std::nan(""), std::nan(""), std::nan(""), "diverged");
  }

  const auto dir = out_dir(cfg);
  write_text_file((dir / "step.csv").string(),
                  to_csv({"method", "h", "omega", "t", "H", "I", "status"}, out_rows));
  json j = base_manifest(cfg);
  j["rows"] = out_rows.size();
  write_manifest(cfg, j, t0);
  return exit_code_for(ok, out_rows.size());
}

namespace {

// JSON config keys mirror the flags; flags given on the command line win.
void load_config(const std::string& path, RunConfig& cfg, bool& t_set) {
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("--config", "cannot open " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw CLI::ValidationError("--config", std::string("bad JSON: ") + e.what());
  }
  if (j.contains("methods")) {
    if (j["methods"].is_string())
      cfg.methods = split_methods(j["methods"].get<std::string>());
    else
      cfg.methods = j["methods"].get<std::vector<std::string>>();
  }
  if (j.contains("method")) cfg.methods = {j["method"].get<std::string>()};
  if (j.contains("h")) cfg.h = j["h"].get<double>();
  if (j.contains("omega")) cfg.omega = j["omega"].get<double>();
  if (j.contains("T")) { cfg.T = j["T"].get<double>(); t_set = true; }
  if (j.contains("grid")) cfg.grid = j["grid"].get<std::string>();
  if (j.contains("quantity")) cfg.quantity = j["quantity"].get<std::string>();
  if (j.contains("stride")) cfg.stride = j["stride"].get<long>();
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  if (j.contains("plot")) cfg.plot = j["plot"].get<bool>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (j.contains("full_scale")) cfg.full_scale = j["full_scale"].get<bool>();
}

}  // namespace

int run_cli(int argc, const char* const* argv) try {
  RunConfig cfg;
  if (const char* env = std::getenv("OSCIBENCH_OUT")) cfg.out = env;
  bool t_set = false;

  // config first, flags override
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    try {
      if (a == "--config" && i + 1 < argc) {
        load_config(argv[i + 1], cfg, t_set);
      } else if (a.rfind("--config=", 0) == 0) {
        load_config(a.substr(9), cfg, t_set);
      }
    } catch (const CLI::Error& e) {
      std::cerr << "oscibench: " << e.what() << "\n";
      return 2;
    }
  }

  CLI::App app{"trigonometric and IMEX integrators on the FPU benchmark"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // frees -h/--h for the step size

  std::string methods_csv, method_single, config_path;
  auto add_common = [&](CLI::App* sub, bool multi_methods) {
    sub->set_help_flag("--help", "print help");
    if (multi_methods)
      sub->add_option("--methods", methods_csv, "comma-separated method names");
    sub->add_option("--method", method_single, "single method name");
    sub->add_option("--h", cfg.h, "time step");
    sub->add_option("--omega", cfg.omega, "fast frequency");
    auto* t = sub->add_option("--T", cfg.T, "time interval length");
    t->each([&](const std::string&) { t_set = true; });
    sub->add_option("--grid", cfg.grid, "grid lo:hi:n");
    sub->add_option("--quantity", cfg.quantity, "omega_I | total_H | ratio_H");
    sub->add_option("--stride", cfg.stride, "sampling stride in steps");
    sub->add_option("--out", cfg.out, "output directory (default $OSCIBENCH_OUT or .)");
    sub->add_flag("--plot", cfg.plot, "also render an SVG plot");
    sub->add_option("--workers", cfg.workers, "worker threads (0 = hardware)");
    sub->add_flag("--full-scale", cfg.full_scale, "paper-scale settings (T = 1000 sweeps)");
    sub->add_option("--config", config_path, "JSON config file (keys mirror flags)");
  };

  CLI::App* sweep = app.add_subcommand("sweep", "resonance / energy-deviation sweep");
  add_common(sweep, true);
  CLI::App* exchange = app.add_subcommand("exchange", "slow energy-exchange series");
  add_common(exchange, false);
  CLI::App* gerr = app.add_subcommand("global-error", "slow-component global error study");
  add_common(gerr, true);
  CLI::App* consts = app.add_subcommand("constants", "modulated-Fourier consistency constants");
  add_common(consts, true);
  CLI::App* step = app.add_subcommand("step", "single-method integration with energy log");
  add_common(step, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // --help is success; any parse failure is usage error
  }

  if (!methods_csv.empty()) cfg.methods = split_methods(methods_csv);
  if (!method_single.empty()) cfg.methods = {method_single};

  try {
    if (sweep->parsed()) {
      cfg.experiment = "sweep";
      if (cfg.full_scale && !t_set) cfg.T = 1000.0;
      return cmd_sweep(cfg);
    }
    if (exchange->parsed()) {
      cfg.experiment = "exchange";
      return cmd_exchange(cfg);
    }
    if (gerr->parsed()) {
      cfg.experiment = "global_error";
      if (!t_set) cfg.T = 1.0;
      return cmd_global_error(cfg);
    }
    if (consts->parsed()) {
      cfg.experiment = "constants";
      return cmd_constants(cfg);
    }
    if (step->parsed()) {
      cfg.experiment = "step";
      return cmd_step(cfg);
    }
  } catch (const CLI::Error& e) {
    std::cerr << "oscibench: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "oscibench: " << e.what() << "\n";
    return 2;
  }
  return 2;
} catch (const std::exception& e) {
  std::cerr << "oscibench: " << e.what() << "\n";
  return 2;
}

}  // namespace oscibench
