// Scenario runner: `nfg run <file|dir>... [--set key=value]... [--jobs N] [--out DIR]`.
#include "nfg/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <thread>

namespace fs = std::filesystem;
namespace sc = nfg::scenario;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_assertion = 1;
constexpr int exit_invalid = 2;

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& entry : fs::directory_iterator(p))
        if (entry.is_regular_file() && entry.path().extension() == ".json") found.push_back(entry.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

struct Job {
  fs::path file;
  sc::Scenario scenario;
  sc::RunOutcome outcome;
  std::string error;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Network formation game scenario runner"};
  app.require_subcommand(1);
  auto* run_cmd = app.add_subcommand("run", "Run scenario files or directories of *.json scenarios");
  std::vector<std::string> inputs;
  std::vector<std::string> overrides;
  unsigned jobs = 1;
  const char* env_out = std::getenv("NFG_OUT_DIR");
  std::string out_root = env_out && *env_out ? env_out : "nfg_out";
  run_cmd->add_option("inputs", inputs, "Scenario files or directories")->required();
  run_cmd->add_option("--set", overrides, "Override a scenario value, key=value with a dotted key");
  run_cmd->add_option("--jobs", jobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", out_root, "Output root (default $NFG_OUT_DIR or ./nfg_out)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  }

  const auto files = expand_inputs(inputs);
  if (files.empty()) {
    std::cerr << "no scenario files found\n";
    return exit_invalid;
  }

  // Every scenario must parse before anything runs.
  std::vector<Job> work(files.size());
  bool invalid = false;
  std::set<std::string> names;
  for (std::size_t i = 0; i < files.size(); ++i) {
    work[i].file = files[i];
    try {
      work[i].scenario = sc::load_scenario(files[i], overrides);
      if (!names.insert(work[i].scenario.name).second)
        throw sc::ScenarioError(files[i].string() + ": scenario name '" + work[i].scenario.name + "' is used twice");
    } catch (const sc::ScenarioError& e) {
      std::cerr << "INVALID " << e.what() << '\n';
      invalid = true;
    }
  }
  if (invalid) return exit_invalid;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      try {
        work[i].outcome = sc::run(work[i].scenario);
      } catch (const std::exception& e) {
        work[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned threads = std::min<unsigned>(jobs, static_cast<unsigned>(work.size()));
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int status = exit_ok;
  for (auto& job : work) {
    const auto& name = job.scenario.name;
    if (!job.error.empty()) {
      std::cerr << "INVALID " << name << ": " << job.error << '\n';
      status = exit_invalid;
      continue;
    }
    try {
      sc::write_artifacts(job.outcome, fs::path(out_root) / name);
    } catch (const std::exception& e) {
      std::cerr << "ERROR " << name << ": " << e.what() << '\n';
      status = exit_invalid;
      continue;
    }
    const bool ok = job.outcome.passed();
    std::cout << (ok ? "PASS " : "FAIL ") << name << " (" << job.outcome.assertions.size() << " assertions)\n";
    for (const auto& a : job.outcome.assertions)
      if (!a.passed) std::cout << "  failed: " << a.text << " [actual " << a.actual << "]\n";
    if (!ok && status == exit_ok) status = exit_assertion;
  }
  return status;
}
