#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string output;  // stdout and stderr
};

Run run(const std::string& args) {
  const std::string cmd = std::string(SLIPFLOW_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) r.output += buf;
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const std::string& name) { return (fs::path(SLIPFLOW_CONFIGS) / name).string(); }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("slipflow_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("no config prints usage") {
  const Run r = run("solve");
  CHECK(r.code == 2);
  CHECK(r.output.find("--config") != std::string::npos);
}

TEST_CASE("empty config prints usage") {
  const fs::path dir = scratch("empty");
  std::ofstream(dir / "empty.cfg") << "# nothing here\n\n";
  const Run r = run("poiseuille --config " + (dir / "empty.cfg").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("config is empty") != std::string::npos);
  CHECK(r.output.find("--out") != std::string::npos);
}

TEST_CASE("malformed config names the line and field") {
  const fs::path dir = scratch("malformed");
  std::ofstream(dir / "bad.cfg") << "schema_version = 1\nstrip.zeta = long\n";
  const Run r = run("solve --config " + (dir / "bad.cfg").string() + " --out " + (dir / "out").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("bad.cfg:2") != std::string::npos);
  CHECK(r.output.find("[field strip.zeta]") != std::string::npos);
}

TEST_CASE("unknown subcommand and options") {
  CHECK(run("frobnicate").code == 2);
  CHECK(run("solve --config " + config("straight.cfg") + " --jobs 0").code == 2);
  CHECK(run("--help").code == 0);
}

TEST_CASE("template round trips") {
  const fs::path dir = scratch("template");
  const Run t = run("template");
  REQUIRE(t.code == 0);
  std::ofstream(dir / "t.cfg") << t.output;
  CHECK(run("poiseuille --config " + (dir / "t.cfg").string() + " --out " + (dir / "out").string()).code == 0);
}

TEST_CASE("poiseuille on the disk") {
  const fs::path dir = scratch("disk");
  const Run r = run("poiseuille --config " + config("disk.cfg") + " --out " + dir.string());
  REQUIRE(r.code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "poiseuille.json"));
  CHECK(j["section"] == "disk");
  for (const auto& run : j["runs"]) CHECK(run["closed_form"]["relative_l2_error"].get<double>() < 1e-4);
  CHECK(fs::exists(dir / "profile.csv"));
}

TEST_CASE("solve on the straight strip is deterministic") {
  const fs::path dir = scratch("straight");
  const Run a = run("solve --config " + config("straight.cfg") + " --out " + (dir / "a").string());
  const Run b = run("solve --config " + config("straight.cfg") + " --out " + (dir / "b").string());
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  for (const char* name : {"solve.json", "solution.vtk"}) {
    const std::string x = slurp(dir / "a" / name);
    CHECK(!x.empty());
    CHECK(x == slurp(dir / "b" / name));
  }
  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "a" / "solve.json"));
  CHECK(j["converged"] == true);
  CHECK(j["solutions"].back()["deficit_h1"].get<double>() < 1e-10);
}

TEST_CASE("several configs run as a sweep") {
  const fs::path dir = scratch("sweep");
  const Run r = run("poiseuille --jobs 2 --config " + config("interval.cfg") + " --config " + config("disk.cfg") +
                    " --out " + dir.string());
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "interval" / "poiseuille.json"));
  CHECK(fs::exists(dir / "disk" / "poiseuille.json"));
}

TEST_CASE("decay study on the straight strip declares a void fit") {
  const fs::path dir = scratch("decay");
  REQUIRE(run("decay-study --config " + config("straight.cfg") + " --out " + dir.string()).code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "decay.json"));
  CHECK(j["void_fit"] == true);
  CHECK(j["sigma"].is_null());
}

TEST_CASE("verify fails on an injected normal velocity") {
  const fs::path dir = scratch("broken");
  const Run r = run("verify --config " + config("broken-normal.cfg") + " --out " + dir.string());
  CHECK(r.code == 4);
  const nlohmann::json j = nlohmann::json::parse(slurp(dir / "report.json"));
  bool found = false;
  for (const auto& c : j["checks"])
    if (c["name"] == "6.wall_normal_velocity") {
      found = true;
      CHECK(c["passed"] == false);
      CHECK(c["value"].get<double>() == doctest::Approx(1e-3).epsilon(1e-6));
    }
  CHECK(found);
  CHECK(r.output.find("6.wall_normal_velocity") != std::string::npos);
}
