#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kOut = fs::temp_directory_path() / "arrayqc_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(ARRAYQC_CLI) + " " + args + " > " + (kOut / "stdout.txt").string() +
                          " 2> " + (kOut / "stderr.txt").string();
  fs::create_directories(kOut);
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string cfg(const std::string& name) { return std::string(ARRAYQC_CONFIGS) + "/" + name; }

}  // namespace

TEST_CASE("model subcommand writes deterministic artifacts") {
  const std::string args = "-o " + kOut.string() + " --set model.search_points=50 --set output.wall_time=false model";
  REQUIRE(run(args) == 0);
  const std::string first = slurp(kOut / "model.json");
  REQUIRE(run(args) == 0);
  CHECK(slurp(kOut / "model.json") == first);
  const auto j = nlohmann::json::parse(first);
  CHECK(j["kind"] == "model");
  CHECK(fs::exists(kOut / "model_sweep.csv"));
}

TEST_CASE("circuit subcommand from a config file") {
  REQUIRE(run("-c " + cfg("bell.ini") + " -o " + kOut.string() + " --set model.tier=reduced circuit") == 0);
  const auto j = nlohmann::json::parse(slurp(kOut / "circuit.json"));
  CHECK(j["result"]["fidelity"].get<double>() > 0.99);
  CHECK(fs::exists(kOut / "schedule.json"));
  CHECK(fs::exists(kOut / "trajectory.csv"));
}

TEST_CASE("bad input exits with code 1") {
  CHECK(run("--set geometry.rowz=3 model") == 1);
  CHECK(slurp(kOut / "stderr.txt").find("geometry.rowz") != std::string::npos);
  CHECK(run("--set geometry.rows=zero model") == 1);
  CHECK(run("-c /nonexistent.ini model") == 1);
  CHECK(run("no-such-command") == 1);
}

TEST_CASE("failed validation exits with code 3") {
  const std::string o = " -o " + kOut.string() + " ";
  CHECK(run(o + "--set model.rtol=1e-2 --set model.atol=1e-4 "
                "--set experiment.full_double=false validate") == 3);
  const auto j = nlohmann::json::parse(slurp(kOut / "validate.json"));
  CHECK(j["result"]["pass"] == false);
}
