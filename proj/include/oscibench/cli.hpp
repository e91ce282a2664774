#pragma once

#include <string>
#include <vector>

namespace oscibench {

/// Parsed run parameters; JSON config keys mirror the CLI flags 1:1 and
/// flags override the file.
struct RunConfig {
  std::string experiment;
  std::vector<std::string> methods;
  double h = 0.02;
  double omega = 50.0;
  double T = 200.0;
  std::string grid = "0:4.5:900";  // lo:hi:n, n points in (lo, hi]
  std::string quantity = "omega_I";
  long stride = 1;
  std::string out;  // default: $OSCIBENCH_OUT or "."
  bool plot = false;
  int workers = 0;
  bool full_scale = false;
};

/// Exit codes: 0 success, 1 result set with no ok rows, 2 usage error.
int cmd_sweep(const RunConfig& cfg);
int cmd_exchange(const RunConfig& cfg);
int cmd_global_error(const RunConfig& cfg);
int cmd_constants(const RunConfig& cfg);
int cmd_step(const RunConfig& cfg);

/// Full argv dispatch (subcommand + flags + optional --config file).
int run_cli(int argc, const char* const* argv);

}  // namespace oscibench
