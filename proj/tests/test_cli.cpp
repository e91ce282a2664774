#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oscibench/cli.hpp"
#include "oscibench/csv.hpp"
#include "oscibench/svg.hpp"

using namespace oscibench;
namespace fs = std::filesystem;

namespace {

int run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"oscibench"};
  argv.insert(argv.end(), args.begin(), args.end());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("oscibench_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
  std::string str() const { return path.string(); }
};

bool rows_equal(const SweepRow& a, const SweepRow& b) {
  const bool values_match =
      (std::isnan(a.value) && std::isnan(b.value)) || a.value == b.value;
  return a.method == b.method && a.h == b.h && a.omega == b.omega &&
         a.h_omega_over_pi == b.h_omega_over_pi && a.status == b.status &&
         values_match;
}

}  // namespace

TEST_CASE("float formatting: shortest round-trip decimals") {
  for (double v : {1.0 / 3.0, 0.1, 4.5, 1e-308, 2.00120008, -0.0, 123456789.123,
                   5e-324, 1e22}) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(4.5) == "4.5");
  CHECK(format_double(0.1) == "0.1");
  CHECK_THROWS(parse_double("12x"));
  CHECK_THROWS(parse_double(""));
}

TEST_CASE("CSV round-trip: random sweep rows survive write/parse") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::uniform_int_distribution<int> expo(-30, 30);
  std::uniform_int_distribution<int> st(0, 2);
  std::vector<SweepRow> rows;
  const char* names[] = {"B", "IMEX", "G", "REFERENCE"};
  for (int i = 0; i < 200; ++i) {
    SweepRow r;
    r.method = names[i % 4];
    r.h = u(rng) * std::pow(10.0, expo(rng));
    r.omega = u(rng);
    r.h_omega_over_pi = u(rng);
    r.status = static_cast<RunStatus>(st(rng));
    r.value = r.status == RunStatus::ok ? u(rng) * std::pow(10.0, expo(rng))
                                        : std::nan("");
    rows.push_back(r);
  }
  const std::vector<SweepRow> back = sweep_from_csv(sweep_to_csv(rows));
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows_equal(rows[i], back[i]));
}

TEST_CASE("CSV: empty row list gives a header-only file, LF endings") {
  const std::string csv = sweep_to_csv({});
  CHECK(csv == "method,h,omega,h_omega_over_pi,value,status\n");
  CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("series and global-error CSV round-trips") {
  std::vector<SeriesRow> s{{0.0, 1.0, 0.0, 0.0, 1.0, 2.00120008},
                           {0.5, 0.9, 0.1, 0.0, 1.0, 2.0012001}};
  const auto sback = series_from_csv(series_to_csv(s));
  REQUIRE(sback.size() == 2);
  CHECK(sback[1].I2 == 0.1);

  std::vector<GlobalErrorRow> g{{"IMEX", 0.01, 1e-5, 2e-5, RunStatus::ok},
                                {"SV", 0.01, std::nan(""), std::nan(""), RunStatus::diverged}};
  const auto gback = global_error_from_csv(global_error_to_csv(g));
  REQUIRE(gback.size() == 2);
  CHECK(gback[0].err_x0 == 1e-5);
  CHECK(gback[1].status == RunStatus::diverged);
  CHECK(std::isnan(gback[1].err_x0));
}

TEST_CASE("SVG renderer emits self-contained polyline plots") {
  PlotSeries s1{"B", {{0.1, 1.0}, {0.2, 2.0}, {0.3, 1.5}}};
  PlotSeries s2{"IMEX", {{0.1, 0.5}, {0.2, 0.4}, {0.3, 0.6}}};
  PlotSpec spec;
  spec.title = "sweep";
  spec.xlabel = "h*omega/pi";
  spec.ylabel = "deviation";
  spec.logy = true;
  const std::string svg = render_svg({s1, s2}, spec);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("IMEX") != std::string::npos);
  CHECK(svg.find("href") == std::string::npos);  // no external assets
}

TEST_CASE("cmd_constants prints the IMEX identity constants") {
  TempDir dir;
  CHECK(run({"constants", "--method", "IMEX", "--h", "0.1", "--omega", "50",
             "--out", dir.str().c_str()}) == 0);
  const CsvTable t = parse_csv(slurp(dir.path / "constants.csv"));
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0][0] == "IMEX");
  CHECK(std::abs(parse_double(t.rows[0][3]) - 1.0) <= 1e-12);  // alpha
  CHECK(std::abs(parse_double(t.rows[0][4]) - 1.0) <= 1e-12);  // beta
  CHECK(std::abs(parse_double(t.rows[0][5]) - 1.0) <= 1e-12);  // gamma
  CHECK(fs::exists(dir.path / "constants_manifest.json"));
}

TEST_CASE("cmd_sweep: deterministic CSV regardless of workers; example row count") {
  TempDir d1, d2;
  CHECK(run({"sweep", "--quantity", "omega_I", "--h", "0.02", "--grid", "0.2:1:4",
             "--T", "5", "--methods", "B,IMEX", "--workers", "1", "--out",
             d1.str().c_str()}) == 0);
  CHECK(run({"sweep", "--quantity", "omega_I", "--h", "0.02", "--grid", "0.2:1:4",
             "--T", "5", "--methods", "B,IMEX", "--workers", "4", "--out",
             d2.str().c_str()}) == 0);
  const std::string a = slurp(d1.path / "sweep.csv");
  CHECK(a == slurp(d2.path / "sweep.csv"));
  CHECK(sweep_from_csv(a).size() == 8);  // 2 methods x 4 grid points
}

TEST_CASE("cmd_step: SV outside its domain yields a domain_error row and exit 1") {
  TempDir dir;
  CHECK(run({"step", "--method", "SV", "--h", "0.02", "--omega", "200", "--T", "1",
             "--out", dir.str().c_str()}) == 1);
  const std::string csv = slurp(dir.path / "step.csv");
  CHECK(csv.find("domain_error") != std::string::npos);
}

TEST_CASE("cmd_step: normal run logs energies") {
  TempDir dir;
  CHECK(run({"step", "--method", "IMEX", "--h", "0.1", "--omega", "50", "--T", "5",
             "--stride", "10", "--out", dir.str().c_str()}) == 0);
  const std::string csv = slurp(dir.path / "step.csv");
  CHECK(csv.find("method,h,omega,t,H,I,status") == 0);
  CHECK(csv.find(",ok") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({"sweep", "--no-such-flag"}) == 2);
  CHECK(run({"bogus-subcommand"}) == 2);
  CHECK(run({"exchange", "--h", "0.1"}) == 2);       // missing --method
  CHECK(run({"sweep", "--grid", "nonsense"}) == 2);  // malformed grid
  TempDir dir;
  CHECK(run({"step", "--method", "NOPE", "--h", "0.1", "--omega", "50", "--T", "1",
             "--out", dir.str().c_str()}) == 2);  // unknown method
}

TEST_CASE("config file supplies defaults; flags override") {
  TempDir dir;
  const fs::path cfg = dir.path / "cfg.json";
  {
    std::ofstream f(cfg);
    f << R"({"methods": "B", "h": 0.04, "T": 5, "grid": "0.2:0.6:2",)"
      << R"( "out": ")" << dir.str() << R"("})";
  }
  CHECK(run({"sweep", "--config", cfg.string().c_str()}) == 0);
  auto rows = sweep_from_csv(slurp(dir.path / "sweep.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].h == 0.04);

  CHECK(run({"sweep", "--config", cfg.string().c_str(), "--h", "0.02"}) == 0);
  rows = sweep_from_csv(slurp(dir.path / "sweep.csv"));
  CHECK(rows[0].h == 0.02);  // flag wins

  CHECK(run({"sweep", "--config", (dir.str() + "/missing.json").c_str()}) == 2);
}

TEST_CASE("OSCIBENCH_OUT supplies the default output directory") {
  TempDir dir;
  setenv("OSCIBENCH_OUT", dir.str().c_str(), 1);
  CHECK(run({"constants", "--method", "B", "--h", "0.02", "--omega", "50"}) == 0);
  unsetenv("OSCIBENCH_OUT");
  CHECK(fs::exists(dir.path / "constants.csv"));
}

TEST_CASE("exchange command writes the series and an SVG when asked") {
  TempDir dir;
  CHECK(run({"exchange", "--method", "IMEX", "--omega", "50", "--h", "0.1", "--T",
             "10", "--stride", "10", "--plot", "--out", dir.str().c_str()}) == 0);
  const auto rows = series_from_csv(slurp(dir.path / "exchange.csv"));
  REQUIRE(rows.size() == 11);
  CHECK(fs::exists(dir.path / "exchange.svg"));
  const std::string svg = slurp(dir.path / "exchange.svg");
  CHECK(svg.find("polyline") != std::string::npos);
}
