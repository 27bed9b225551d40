#include "bep/checkpoint.hpp"
#include "bep/experiment.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bep;
namespace fs = std::filesystem;

namespace {

const fs::path kGolden = GOLDEN_DIR;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bep_golden_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  return dir;
}

std::vector<std::vector<std::string>> rows(const std::string& tsv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(tsv);
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream cs(line);
    for (std::string cell; std::getline(cs, cell, '\t');) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

}  // namespace

TEST_CASE("golden config echoes are fixed points") {
  for (const char* run : {"linear", "nonlinear", "norm_suite"}) {
    const std::string echo = slurp(kGolden / run / "config.ini");
    CHECK(parse_config(echo).echo == echo);
  }
}

TEST_CASE("linear-decay run reproduces the golden files byte for byte") {
  ExperimentConfig c = load_config((kGolden / "linear.ini").string());
  const fs::path out = scratch("linear");
  c.output = out.string();
  CHECK(run_experiment(c).exit_code == kExitPass);
  for (const char* file : {"series.tsv", "report.tsv", "status.txt"}) {
    INFO(file);
    CHECK(slurp(out / file) == slurp(kGolden / "linear" / file));
  }
}

TEST_CASE("nonlinear run matches the golden series") {
  ExperimentConfig c = load_config((kGolden / "nonlinear.ini").string());
  const fs::path out = scratch("nonlinear");
  c.output = out.string();
  CHECK(run_experiment(c).exit_code == kExitPass);
  // Transform rounding may differ across FFT builds, so compare numerically.
  for (const char* file : {"series.tsv", "diagnostics.tsv"}) {
    INFO(file);
    const auto want = rows(slurp(kGolden / "nonlinear" / file));
    const auto got = rows(slurp(out / file));
    REQUIRE(got.size() == want.size());
    CHECK(got[0] == want[0]);
    for (std::size_t r = 1; r < want.size(); ++r) {
      REQUIRE(got[r].size() == want[r].size());
      for (std::size_t k = 0; k < want[r].size(); ++k) {
        const double a = std::stod(got[r][k]), b = std::stod(want[r][k]);
        CHECK(std::abs(a - b) <= 1e-12 * std::abs(b) + 1e-18);
      }
    }
  }
  CHECK(slurp(out / "report.tsv") == slurp(kGolden / "nonlinear" / "report.tsv"));
}

TEST_CASE("golden checkpoint decodes, re-encodes and feeds the norm table") {
  const std::string bytes = slurp(kGolden / "nonlinear" / "final.ckpt");
  const Checkpoint c = decode_checkpoint(bytes);
  CHECK(encode_checkpoint(c) == bytes);
  CHECK(c.time == 1.0);
  CHECK(c.labels == state_labels());
  CHECK(c.config_echo == slurp(kGolden / "nonlinear" / "config.ini"));
  CHECK(c.field.grid() == Grid(8, 40.0));

  const auto table = rows(slurp(kGolden / "norm_suite" / "norms.tsv"));
  REQUIRE(table.size() == 4);
  CHECK(table[0] == std::vector<std::string>{"key", "spec", "value"});
  for (std::size_t r = 1; r < table.size(); ++r) {
    const double v = norm_table(c, {parse_norm_spec(table[r][1])})[0];
    CHECK(v == doctest::Approx(std::stod(table[r][2])).epsilon(1e-14));
  }

  const auto cli = rows(slurp(kGolden / "norms_cli.tsv"));
  REQUIRE(cli.size() == 3);
  for (std::size_t r = 1; r < cli.size(); ++r) {
    CHECK(norm_table(c, {parse_norm_spec(cli[r][0])})[0] == doctest::Approx(std::stod(cli[r][1])).epsilon(1e-14));
  }
}

TEST_CASE("golden report summary") {
  const ReportSummary s = summarize_reports(kGolden.string());
  CHECK(s.passed == 5);
  CHECK(s.failed == 0);
  CHECK(s.exit_code() == kExitPass);
  std::string text;
  for (const auto& line : s.lines) text += line + "\n";
  text += "passed 5, failed 0, runtime failures 0\n";
  CHECK(text == slurp(kGolden / "report_cli.txt"));
}
