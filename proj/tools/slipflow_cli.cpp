#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "slipflow/slipflow.h"

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2, kNonconvergence = 3, kDiagnostic = 4 };

int exit_code(sf_status s) {
  switch (s) {
    case SF_OK: return kOk;
    case SF_ERR_CONFIG:
    case SF_ERR_INVALID_ARGUMENT:
    case SF_ERR_MESH:
    case SF_ERR_CONSTRUCTION:
    case SF_ERR_CONTRACT: return kConfig;
    case SF_ERR_NONCONVERGENCE:
    case SF_ERR_SOLVER: return kNonconvergence;
    case SF_ERR_DIAGNOSTIC: return kDiagnostic;
    default: return kFailure;
  }
}

bool blank_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) return false;
  std::string line;
  while (std::getline(f, line)) {
    const auto p = line.find_first_not_of(" \t\r");
    if (p != std::string::npos && line[p] != '#') return false;
  }
  return true;
}

struct Job {
  std::string config;
  std::string out;
  int code = kOk;
  std::string log;
};

void run_job(const std::string& subcommand, std::uint64_t seed, bool print_report, Job& job) {
  std::ostringstream log;
  sf_config* cfg = nullptr;
  sf_status s = sf_config_load(job.config.c_str(), &cfg);
  if (s != SF_OK) {
    log << "error: " << sf_last_error();
    if (*sf_last_error_field()) log << " [field " << sf_last_error_field() << "]";
    log << '\n';
    job.code = exit_code(s);
    job.log = log.str();
    return;
  }
  sf_result* result = nullptr;
  s = sf_run(subcommand.c_str(), cfg, job.out.c_str(), seed, &result);
  if (result) {
    if (print_report && subcommand == "verify") {
      std::ifstream txt(fs::path(job.out) / "report.txt");
      log << txt.rdbuf();
    }
    log << job.config << ": " << subcommand << " " << sf_status_name(s) << ", config " << sf_config_hash(cfg) << ", wrote";
    for (size_t i = 0; i < sf_result_artifact_count(result); ++i) log << ' ' << (fs::path(job.out) / sf_result_artifact(result, i)).string();
    log << '\n';
    if (s == SF_ERR_NONCONVERGENCE) log << "error: " << sf_last_error() << " (residual history in the JSON output)\n";
  } else {
    log << "error: " << sf_last_error();
    if (*sf_last_error_field()) log << " [field " << sf_last_error_field() << "]";
    log << '\n';
  }
  job.code = exit_code(s);
  job.log = log.str();
  sf_result_free(result);
  sf_config_free(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady Navier-Stokes flow with Navier-slip walls in pipe-like domains", "slipflow"};
  app.require_subcommand(1);
  std::vector<std::string> configs;
  std::string out = "slipflow-out";
  std::uint64_t seed = 7;
  unsigned jobs = 1;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"poiseuille", "cross-sectional Poiseuille profile and closed-form comparison"},
      {"solve", "Navier-Stokes solve with flux continuation; VTK fields and solver JSON"},
      {"decay-study", "tail-energy decay fit at truncations zeta and 2 zeta"},
      {"verify", "full diagnostics report"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", configs, "config file; repeat to run several scenarios")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "seed for randomized starts")->capture_default_str();
    sub->add_option("--jobs", jobs, "scenarios run in parallel")->capture_default_str()->check(CLI::PositiveNumber);
    subs.push_back(sub);
  }
  app.add_subcommand("template", "print a documented config with default values")->callback([] {
    std::cout << sf_config_template();
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  if (app.got_subcommand("template")) return kOk;

  CLI::App* sub = nullptr;
  for (CLI::App* s : subs)
    if (s->parsed()) sub = s;
  if (configs.empty() || std::all_of(configs.begin(), configs.end(), blank_file)) {
    std::cerr << (configs.empty() ? "error: no --config given\n" : "error: config is empty\n") << sub->help();
    return kConfig;
  }

  std::vector<Job> work;
  for (const std::string& c : configs) {
    Job j;
    j.config = c;
    j.out = configs.size() == 1 ? out : (fs::path(out) / fs::path(c).stem()).string();
    work.push_back(j);
  }
  std::atomic<std::size_t> next{0};
  std::mutex print;
  auto worker = [&] {
    for (std::size_t k = next++; k < work.size(); k = next++) {
      run_job(sub->get_name(), seed, true, work[k]);
      std::lock_guard<std::mutex> lock(print);
      (work[k].code == kOk ? std::cout : std::cerr) << work[k].log << std::flush;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(jobs, work.size()); ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  int code = kOk;
  for (const Job& j : work) code = std::max(code, j.code);
  return code;
}
