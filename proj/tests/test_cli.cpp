// End-to-end tests of the command-line binary: subcommands, file outputs,
// and the exit-code contract (0 ok, 2 usage, 3 solver failure, 4 limit hit
// with the incumbent written).

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "stochkep/io.hpp"

using namespace stochkep;

namespace {

// The binary under test: ctest passes it via the environment; direct runs
// fall back to the sibling binary in the same build directory.
std::string cli_path() {
  if (const char* env = std::getenv("STOCHKEP_CLI_BIN")) return env;
  std::array<char, 4096> buf{};
  const ssize_t n = readlink("/proc/self/exe", buf.data(), buf.size() - 1);
  std::string self(buf.data(), n > 0 ? static_cast<std::size_t>(n) : 0);
  const std::size_t slash = self.rfind('/');
  return self.substr(0, slash + 1) + "stochkep";
}

struct RunResult {
  int exit_code = -1;
  std::string out;
};

// Run the CLI with stderr folded into stdout and the exit code captured.
RunResult run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    r.out.append(buf.data(), got);
  }
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct TempPath {
  std::string path;
  explicit TempPath(const std::string& name)
      : path("/tmp/stochkep_cli_" + name) {}
  ~TempPath() { std::remove(path.c_str()); }
};

std::string grab_line(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key, 0) == 0) return line.substr(key.size());
  }
  return "";
}

}  // namespace

TEST_CASE("generate writes a loadable instance and reports its hash") {
  TempPath inst("gen.json");
  const RunResult r = run_cli(
      "generate --pairs 12 --ndds 2 --density 0.3 --seed 7 --out " + inst.path);
  INFO(r.out);
  REQUIRE(r.exit_code == 0);

  const ExchangeGraph g = load_instance(inst.path);
  CHECK(g.num_vertices() == 14);
  CHECK(grab_line(r.out, "vertices: ") == "14");
  CHECK(grab_line(r.out, "hash: ") == instance_hash(g));

  // Same seed, same pool.
  TempPath inst2("gen2.json");
  const RunResult r2 = run_cli(
      "generate --pairs 12 --ndds 2 --density 0.3 --seed 7 --out " + inst2.path);
  REQUIRE(r2.exit_code == 0);
  CHECK(grab_line(r2.out, "hash: ") == grab_line(r.out, "hash: "));
}

TEST_CASE("generate accepts the standard sized splits") {
  TempPath inst("gen64.json");
  const RunResult r =
      run_cli("generate --size 64 --density 0.2 --seed 3 --out " + inst.path);
  INFO(r.out);
  REQUIRE(r.exit_code == 0);
  CHECK(grab_line(r.out, "vertices: ") == "64");
}

TEST_CASE("solve clears an instance and writes a verifiable matching file") {
  TempPath inst("solve_in.json");
  REQUIRE(run_cli("generate --pairs 12 --ndds 2 --density 0.3 --seed 7 --out " +
                  inst.path)
              .exit_code == 0);

  TempPath match("solve_out.json");
  const RunResult r = run_cli("solve --instance " + inst.path +
                              " --method kep-np --out " + match.path);
  INFO(r.out);
  REQUIRE(r.exit_code == 0);
  CHECK(grab_line(r.out, "status: ") == "optimal");

  const ExchangeGraph g = load_instance(inst.path);
  const MatchingFile mf = load_matching(match.path);
  CHECK(mf.method == "kep-np");
  CHECK_NOTHROW(check_matching_against(g, mf));
  // The reported objective is the expected matched weight of the structures.
  const double printed = std::stod(grab_line(r.out, "objective: "));
  CHECK(printed == mf.objective_value);
}

TEST_CASE("every method token solves the same small instance") {
  TempPath inst("methods_in.json");
  REQUIRE(run_cli("generate --pairs 10 --ndds 1 --density 0.35 --seed 2 --out " +
                  inst.path)
              .exit_code == 0);
  for (const std::string method :
       {"kep", "kep-ip", "kep-np", "bnp", "cvar:5:0.5:5"}) {
    DYNAMIC_SECTION("method " << method) {
      const RunResult r = run_cli("solve --instance " + inst.path +
                                  " --chain-cap 2 --method " + method);
      INFO(r.out);
      CHECK(r.exit_code == 0);
      CHECK(grab_line(r.out, "status: ") == "optimal");
    }
  }
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run_cli("solve --no-such-flag").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("solve --instance /tmp/stochkep_cli_missing.json").exit_code == 2);
  CHECK(run_cli("generate --pairs 5 --density 3.0 --out /tmp/stochkep_cli_x.json")
            .exit_code == 2);

  TempPath inst("badmethod_in.json");
  REQUIRE(run_cli("generate --pairs 5 --ndds 0 --density 0.4 --seed 1 --out " +
                  inst.path)
              .exit_code == 0);
  const RunResult r =
      run_cli("solve --instance " + inst.path + " --method nonsense");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("unknown method") != std::string::npos);
}

TEST_CASE("help exits cleanly and documents the thread override") {
  const RunResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("STOCHKEP_THREADS") != std::string::npos);
  CHECK(r.out.find("generate") != std::string::npos);
  CHECK(r.out.find("solve") != std::string::npos);
  CHECK(r.out.find("bench") != std::string::npos);
}

TEST_CASE("hitting a limit still writes the incumbent and exits 4") {
  TempPath inst("limit_in.json");
  REQUIRE(run_cli("generate --pairs 12 --ndds 2 --density 0.3 --seed 7 --out " +
                  inst.path)
              .exit_code == 0);
  TempPath match("limit_out.json");
  const RunResult r = run_cli("solve --instance " + inst.path +
                              " --method bnp --time-limit 0 --out " + match.path);
  INFO(r.out);
  REQUIRE(r.exit_code == 4);
  CHECK(grab_line(r.out, "status: ") == "limit");
  const MatchingFile mf = load_matching(match.path);
  const ExchangeGraph g = load_instance(inst.path);
  CHECK_NOTHROW(check_matching_against(g, mf));
}

TEST_CASE("bench compares methods and writes the requested artifacts") {
  TempPath cells("bench_cells.csv");
  TempPath summary("bench_summary.csv");
  TempPath box("bench_box.json");
  const RunResult r = run_cli(
      "bench --graphs 2 --size 10 --realizations 5 --methods kep,kep-np "
      "--density 0.3 --chain-cap 2 --seed 1 --quiet --cells-out " +
      cells.path + " --summary-out " + summary.path + " --boxplot-out " +
      box.path);
  INFO(r.out);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("med_pct_opt") != std::string::npos);
  CHECK(r.out.find("kep-np") != std::string::npos);

  std::ifstream cf(cells.path);
  REQUIRE(cf.good());
  std::string header;
  std::getline(cf, header);
  CHECK(header ==
        "graph,method,realization,realized_weight,omniscient_weight,pct_opt");
  int rows = 0;
  for (std::string line; std::getline(cf, line);) ++rows;
  CHECK(rows == 2 * 2 * 5);

  std::ifstream sf(summary.path);
  REQUIRE(sf.good());
  std::getline(sf, header);
  CHECK(header == "graph,method,ok,objective,solve_seconds,tail_mean,error");

  std::ifstream bf(box.path);
  REQUIRE(bf.good());
  nlohmann::json j;
  bf >> j;
  REQUIRE(j.contains("metrics"));
  CHECK(j["metrics"].contains("pct_opt"));
  CHECK(j["metrics"]["pct_opt"].contains("kep"));
  CHECK(j["metrics"]["pct_opt"].contains("kep-np"));
}

TEST_CASE("bench rejects an empty or unknown method list") {
  CHECK(run_cli("bench --graphs 1 --size 10 --realizations 2 --methods zzz")
            .exit_code == 2);
}
