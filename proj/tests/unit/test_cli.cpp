#include <sys/wait.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("quadue_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& out_name = "stdout.txt") {
  const std::string cmd = std::string(QUADUE_CLI_PATH) + " " + args + " > " + (scratch() / out_name).string() +
                          " 2> " + (scratch() / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("construct converges and prints json") {
  REQUIRE(run("construct --fn zy2 --x0 5.24 --method S") == 0);
  const auto j = nlohmann::json::parse(slurp(scratch() / "stdout.txt"));
  CHECK(j["outcome"] == "converged");
  CHECK(j["underestimator"]["method"] == "S");
  CHECK(j["metric"].get<double>() > 0.0);
}

TEST_CASE("exit codes") {
  CHECK(run("construct --fn ex4_1_6 --x0 -0.125 --method S") == 3);
  CHECK(run("construct --fn ex4_1_6 --x0 -0.125 --method UDS") == 0);
  CHECK(run("construct --fn zy2 --x0 1 --method S") == 2);
  CHECK(run("construct --fn zy2") == 1);
  CHECK(run("construct --fn zy2 --x0 1,2") == 1);
  CHECK(run("construct --fn nothing --x0 1") == 1);
  CHECK(run("construct --fn zy2 --x0 5 --method Q") == 1);
  CHECK(run("construct --fn zy2 --x0 50") == 1);
  CHECK(run("--epsilon -1 construct --fn zy2 --x0 5") == 1);
  CHECK(run("no-such-command") == 1);
}

TEST_CASE("construct from a file with surface and LP dump") {
  const fs::path fn = scratch() / "f.txt";
  std::ofstream(fn) << "name: mine\nn: 2\nbox: [-1, 1] [-1, 1]\nh: x1^4 + x2^4 + x1^2 + x2^2\ng: 0.8*(x1 + x2)^2\n";
  const std::string args = "construct --file " + fn.string() + " --scale --x0 0.9,0.9 --method DS --surface " +
                           (scratch() / "surf.csv").string() + " --surface-points 11 --dump-lp " +
                           (scratch() / "lp.txt").string();
  REQUIRE(run(args) == 0);
  const std::string surf = slurp(scratch() / "surf.csv");
  CHECK(surf.rfind("x1,x2,f,l,q\n", 0) == 0);
  CHECK(std::count(surf.begin(), surf.end(), '\n') == 122);
  CHECK(fs::exists(scratch() / "lp.txt"));
}

TEST_CASE("hierarchy study writes its tables") {
  const fs::path dir = scratch() / "h";
  REQUIRE(run("--seed 3 --out " + dir.string() + " hierarchy-study --functions zy2,conform1 --points 3 --metric-points 64") == 0);
  for (const char* f : {"group1.csv", "group2.csv", "summary.csv", "timing.csv"}) CHECK(fs::exists(dir / f));
  const std::string first = slurp(dir / "summary.csv");
  REQUIRE(run("--seed 3 --jobs 2 --out " + dir.string() + " hierarchy-study --functions zy2,conform1 --points 3 --metric-points 64") == 0);
  CHECK(slurp(dir / "summary.csv") == first);
}

TEST_CASE("gen-problems and bound-study") {
  const fs::path dir = scratch() / "gen";
  REQUIRE(run("--seed 4 --out " + dir.string() + " gen-problems --n 1 --count 2") == 0);
  CHECK(fs::exists(dir / "gen1_001.txt"));
  CHECK(fs::exists(dir / "gen1_002.txt"));
  const fs::path out = scratch() / "b";
  REQUIRE(run("--out " + out.string() + " bound-study --problems " + dir.string() + " --per-dim 2") == 0);
  const std::string table = slurp(out / "bounds.csv");
  CHECK(table.find("gen1_001") != std::string::npos);
}

TEST_CASE("dump") {
  REQUIRE(run("dump functions") == 0);
  CHECK(slurp(scratch() / "stdout.txt").find("name: sisser") != std::string::npos);
  REQUIRE(run("dump problems") == 0);
  CHECK(slurp(scratch() / "stdout.txt").find("name: p24") != std::string::npos);
  CHECK(run("dump nonsense") == 1);
}
