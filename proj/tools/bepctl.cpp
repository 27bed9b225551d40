// bepctl: run experiment configs, tabulate norms of checkpoints, summarize reports.

#include "bep/errors.hpp"
#include "bep/experiment.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <thread>

#ifdef __GLIBC__
#include <malloc.h>
#endif

namespace {

int classify(const std::exception_ptr& error, std::string& message) {
  try {
    std::rethrow_exception(error);
  } catch (const bep::RuntimeFailure& e) {
    message = e.what();
    return bep::kExitRuntimeError;
  } catch (const bep::Error& e) {
    message = e.what();
    return bep::kExitConfigError;
  } catch (const std::exception& e) {
    message = e.what();
    return bep::kExitRuntimeError;
  }
}

int run_one(const std::string& path, const std::string& output_override, std::mutex& log) {
  int code = bep::kExitPass;
  std::string message;
  try {
    bep::ExperimentConfig config = bep::load_config(path);
    if (!output_override.empty()) config.output = output_override;
    const bep::ExperimentResult result = bep::run_experiment(config);
    code = result.exit_code;
    const auto passed = std::count_if(result.verdicts.begin(), result.verdicts.end(),
                                      [](const bep::Verdict& v) { return v.pass; });
    message = std::to_string(passed) + "/" + std::to_string(result.verdicts.size()) + " verdicts pass, " +
              result.status;
  } catch (...) {
    code = classify(std::current_exception(), message);
  }
  const std::lock_guard lock(log);
  std::cerr << path << ": exit " << code << ": " << message << "\n";
  return code;
}

int command_run(const std::vector<std::string>& configs, int jobs, const std::string& output) {
  if (!output.empty() && configs.size() != 1) {
    std::cerr << "run: --output needs exactly one config\n";
    return bep::kExitConfigError;
  }
  std::vector<int> codes(configs.size(), 0);
  std::atomic<std::size_t> next{0};
  std::mutex log;
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) codes[i] = run_one(configs[i], output, log);
  };
  const int threads = std::clamp<int>(jobs, 1, static_cast<int>(configs.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return *std::max_element(codes.begin(), codes.end());
}

int command_norms(const std::string& checkpoint, const std::vector<std::string>& specs) {
  try {
    std::vector<bep::NormSpec> parsed;
    for (const auto& s : specs) parsed.push_back(bep::parse_norm_spec(s));
    const bep::Checkpoint c = bep::read_checkpoint(checkpoint);
    const auto values = bep::norm_table(c, parsed);
    std::printf("spec\tvalue\n");
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      std::printf("%s\t%.17g\n", bep::format_norm_spec(parsed[i]).c_str(), values[i]);
    }
    return bep::kExitPass;
  } catch (...) {
    std::string message;
    const int code = classify(std::current_exception(), message);
    std::cerr << "norms: " << message << "\n";
    return code;
  }
}

int command_report(const std::string& dir) {
  try {
    const bep::ReportSummary summary = bep::summarize_reports(dir);
    for (const auto& line : summary.lines) std::printf("%s\n", line.c_str());
    std::printf("passed %d, failed %d, runtime failures %d\n", summary.passed, summary.failed,
                summary.runtime_failures);
    return summary.exit_code();
  } catch (...) {
    std::string message;
    const int code = classify(std::current_exception(), message);
    std::cerr << "report: " << message << "\n";
    return code;
  }
}

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
  // Field buffers are tens of MB; keep them on the heap instead of a fresh
  // mmap per temporary.
  mallopt(M_MMAP_THRESHOLD, 256 << 20);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  CLI::App app{"Bipolar Euler-Poisson decay laboratory. Set BEP_NUM_THREADS for threaded transforms."};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  int jobs = 1;
  std::string output;
  auto* run = app.add_subcommand("run", "Run experiment configs");
  run->add_option("configs", configs, "INI config files")->required()->check(CLI::ExistingFile);
  run->add_option("-j,--jobs", jobs, "Configs run in parallel")->check(CLI::PositiveNumber);
  run->add_option("-o,--output", output, "Override the output directory (single config)");

  std::string checkpoint;
  std::vector<std::string> specs;
  auto* norms = app.add_subcommand("norms", "Norm table of a checkpoint");
  norms->add_option("checkpoint", checkpoint, "Checkpoint file")->required();
  norms->add_option("-s,--spec", specs, "Norm spec, e.g. hdot:-0.5,field=n1")->required();

  std::string dir;
  auto* report = app.add_subcommand("report", "Summarize report.tsv files below a directory");
  report->add_option("dir", dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : bep::kExitConfigError;
  }
  if (*run) return command_run(configs, jobs, output);
  if (*norms) return command_norms(checkpoint, specs);
  return command_report(dir);
}
