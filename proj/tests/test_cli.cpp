#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qlab/report.hpp"

using namespace qlab;

namespace {
const std::string kOut = "cli_test_out";

int run(const std::string& args) {
  std::string cmd = std::string(QLAB_CLI) + " " + args + " > /dev/null 2> " + kOut + "/stderr.txt";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("command line exit codes and outputs") {
  std::filesystem::remove_all(kOut);
  std::filesystem::create_directories(kOut);

  CHECK(run("tune --a 5 --M 2,5,11 --depth 1 --out-dir " + kOut) == 2);
  auto err = nlohmann::json::parse(slurp(kOut + "/stderr.txt"));
  CHECK(err["error"] == "Precondition");
  CHECK(run("") == 2);
  CHECK(run("spectrum --max-period 3 --out-dir " + kOut) == 2);  // no tau

  REQUIRE(run("tune --a 20 --M 2,5,11,23 --depth 2 --out-dir " + kOut) == 0);
  std::string first = slurp(kOut + "/witness.txt");
  REQUIRE(run("tune --a 20 --M 2,5,11,23 --depth 2 --out-dir " + kOut) == 0);
  CHECK(slurp(kOut + "/witness.txt") == first);
  CHECK(run("check --witness " + kOut + "/witness.txt --out-dir " + kOut) == 0);

  REQUIRE(run("spectrum --a 20 --tau 1 --max-period 3 --out-dir " + kOut) == 0);
  std::istringstream csv(slurp(kOut + "/spectrum.csv"));
  std::string line;
  int fixed = 0;
  bool header = false;
  while (std::getline(csv, line)) {
    if (line == "period,itinerary,point_lo,point_hi,log_multiplier,repelling") header = true;
    if (line.rfind("1,", 0) == 0) fixed++;
  }
  CHECK(header);
  CHECK(fixed == 4);

  CHECK(run("verify --suite macro --a 20 --tau 1 --eta 1.5 --out-dir " + kOut) <= 1);
  auto rep = nlohmann::json::parse(slurp(kOut + "/verify.json"));
  CHECK(rep["checks"].size() >= 5);
  CHECK(rep.contains("config_hash"));
  // the echoed config reparses to the same settings
  RunConfig back = config_from_report(rep);
  CHECK(back.a == "20");
  CHECK(back.suite == "macro");
  CHECK(hex64(config_hash(back)) == rep["config_hash"].get<std::string>());

  CHECK(run("gap --witness " + kOut + "/witness.txt --N0 auto --out-dir " + kOut) == 1);
  auto gap = nlohmann::json::parse(slurp(kOut + "/gap.json"));
  CHECK(gap["gap"].contains("verdict"));
  CHECK(gap["gap"]["gate"] == false);

  CHECK(run("verify --suite nonsense --a 20 --tau 1 --out-dir " + kOut) == 2);
  CHECK(run("tune --a 20 --M 2,5,11,23,47 --depth 3 --out-dir " + kOut) == 2);  // needs --long-run
}
