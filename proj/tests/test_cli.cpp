// Exit-code and output contract of the command-line tool; runs the built
// binary through the shell.
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace {

const std::string kCli = MNW_CLI_PATH;

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("mnw_cli_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int exit_code(const std::string& args) {
  int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("unknown flags and subcommands exit with code 2") {
  CHECK(exit_code("definitely-not-a-subcommand") == 2);
  CHECK(exit_code("generate --no-such-flag 3") == 2);
  CHECK(exit_code("") == 2);  // a subcommand is required
}

TEST_CASE("parameter validation failures exit with code 2") {
  TempDir tmp;
  // alpha >= beta
  CHECK(exit_code("generate --d 1 --n 100 --alpha 0.4 --beta 0.1 --sigma 1 --zeta 0 --seed 1 "
                  "--out " + tmp.file("x.mnw")) == 2);
  // p_n > 1
  CHECK(exit_code("generate --d 1 --n 10 --alpha 0.1 --beta 0.4 --sigma 40 --zeta 0 --seed 1 "
                  "--out " + tmp.file("x.mnw")) == 2);
}

TEST_CASE("a successful pipeline exits cleanly at every stage") {
  TempDir tmp;
  auto graph = tmp.file("g.mnw");
  CHECK(exit_code("generate --d 1 --n 64 --alpha 0.1 --beta 0.4 --sigma 1 --zeta 1 --seed 3 "
                  "--out " + graph) == 0);
  CHECK(slurp(graph).rfind("mnw v1 1 64 0.1 0.4 1 1 3", 0) == 0);
  CHECK(exit_code("diameter " + graph + " --mode exact") == 0);
  CHECK(exit_code("diameter " + graph + " --mode sampled --samples 4 --seed 1") == 0);
  CHECK(exit_code("mix " + graph + " --starts all --out " + tmp.file("m.json")) == 0);
  CHECK(exit_code("spectral " + graph) == 0);
  CHECK(exit_code("boxes " + graph + " --r 0.5 --out " + tmp.file("b.json")) == 0);
  CHECK(!slurp(tmp.file("m.json")).empty());
}

TEST_CASE("strict scans exit with code 3 when a cell hits a resource cap") {
  TempDir tmp;
  std::ofstream cfg(tmp.file("cfg.json"));
  cfg << R"({"n": [64], "sigma": [1.0], "zeta": [1.0], "replicates": 1,
             "measurements": ["gap"], "caps": {"gap_max": 16}})";
  cfg.close();
  CHECK(exit_code("scan --params " + tmp.file("cfg.json") + " --out " + tmp.file("s.csv") +
                  " --strict") == 3);
  // lenient mode records the skip and succeeds
  std::filesystem::remove(tmp.file("s.csv"));
  CHECK(exit_code("scan --params " + tmp.file("cfg.json") + " --out " + tmp.file("s.csv")) == 0);
  CHECK(slurp(tmp.file("s.csv")).find("gap-cap") != std::string::npos);
}

TEST_CASE("help is available for every subcommand") {
  CHECK(exit_code("--help") == 0);
  for (const char* sub : {"generate", "diameter", "mix", "spectral", "bounds", "boxes",
                          "ldcheck", "scan", "fit"})
    CHECK(exit_code(std::string(sub) + " --help") == 0);
}
