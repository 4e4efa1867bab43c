#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "hybridfft/io.hpp"

namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_code;
  std::string stdout_text;
};

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("hfft_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CommandResult run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const std::string cmd = std::string(HFFT_CLI) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run writes a report with the expected iteration count") {
  const fs::path report = work_dir() / "r.json";
  const CommandResult r = run_cli("run --n 4096 --mode memory --parallelism 4 --random --seed 7 --report " +
                                  report.string());
  CHECK(r.exit_code == 0);
  const nlohmann::json j = nlohmann::json::parse(slurp(report));
  CHECK(j["iterations"] == 3);
  CHECK(j["n"] == 4096);
  CHECK(j["mode"] == "memory");
  CHECK(j["parallelism"] == 4);
  CHECK(j["radices"] == nlohmann::json({2, 5, 5}));
  CHECK(j["conflicts"] == 0);
  CHECK(j["max_abs_error"].get<double>() < 1e-9);
  CHECK(j["output_permutation"].size() == 12);
  const std::vector<std::string> keys{"n", "k", "mode", "parallelism", "stages", "radices",
                                      "iterations", "cycles_model", "cycles_observed",
                                      "conflicts", "utilization", "max_abs_error",
                                      "output_permutation"};
  for (const std::string& key : keys) CHECK(j.contains(key));
}

TEST_CASE("degenerate two-point run succeeds") {
  CHECK(run_cli("run --n 2 --random --seed 0").exit_code == 0);
}

TEST_CASE("non-power-of-two sizes are a configuration error") {
  CHECK(run_cli("run --n 48 --random --seed 0").exit_code == 2);
}

TEST_CASE("missing input files are an io error") {
  CHECK(run_cli("run --n 64 --input /nonexistent/x.csv").exit_code == 3);
}

TEST_CASE("internal invariant violations exit with code 4") {
  CHECK(run_cli("run --n 64 --random --seed 0 --inject-fault conflict").exit_code == 4);
}

TEST_CASE("verify passes a streaming run and reports the reversal widths") {
  const CommandResult r = run_cli("verify --n 64 --mode pipeline --parallelism 2 --random --seed 3");
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("PASS") != std::string::npos);
}

TEST_CASE("verify reports the in-place reversal widths 9 / 9,4 / 4") {
  const CommandResult r = run_cli("verify --n 4096 --mode memory --parallelism 4 --random --seed 7");
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("9 / 9,4 / 4") != std::string::npos);
}

TEST_CASE("zero tolerance cannot pass on random input") {
  const CommandResult r = run_cli("verify --n 256 --random --seed 3 --tolerance 0");
  CHECK(r.exit_code == 1);
}

TEST_CASE("identical flags and seed give byte-identical artifacts") {
  const fs::path r1 = work_dir() / "d1.json";
  const fs::path r2 = work_dir() / "d2.json";
  const fs::path o1 = work_dir() / "d1.bin";
  const fs::path o2 = work_dir() / "d2.bin";
  CHECK(run_cli("run --n 512 --parallelism 2 --random --seed 42 --report " + r1.string() +
                " --output " + o1.string()).exit_code == 0);
  CHECK(run_cli("run --n 512 --parallelism 2 --random --seed 42 --report " + r2.string() +
                " --output " + o2.string()).exit_code == 0);
  CHECK(slurp(r1) == slurp(r2));
  CHECK(slurp(o1) == slurp(o2));
  CHECK(!slurp(r1).empty());
}

TEST_CASE("sample files round-trip through both formats") {
  const auto samples = hfft::random_samples(64, 9);
  const fs::path csv = work_dir() / "x.csv";
  const fs::path bin = work_dir() / "x.bin";
  hfft::store_samples(csv.string(), samples);
  hfft::store_samples(bin.string(), samples);
  CHECK(hfft::load_samples(bin.string()) == samples);
  const auto reloaded = hfft::load_samples(csv.string());
  REQUIRE(reloaded.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(std::abs(reloaded[i] - samples[i]) == 0.0);  // 17 digits round-trip exactly
  }
  CHECK(run_cli("run --n 64 --input " + csv.string()).exit_code == 0);
}

TEST_CASE("trace dumps are newline-delimited json records") {
  const fs::path trace = work_dir() / "t.ndjson";
  CHECK(run_cli("run --n 64 --random --seed 1 --trace " + trace.string()).exit_code == 0);
  std::ifstream in(trace);
  std::string line;
  REQUIRE(std::getline(in, line));
  const nlohmann::json j = nlohmann::json::parse(line);
  for (const char* key : {"cycle", "op", "bank", "address", "batch"}) CHECK(j.contains(key));
}

TEST_CASE("tables match the first-stage configuration rows") {
  const CommandResult p1 = run_cli("tables --k 5 --parallelism 1 --stage 1");
  CHECK(p1.exit_code == 0);
  CHECK(p1.stdout_text.find("n%5=0: (1,8) (1,1) (1,8) (1,4) (1,2) (1,4)") != std::string::npos);
  CHECK(p1.stdout_text.find("n%5=1: (none)") != std::string::npos);
  CHECK(p1.stdout_text.find("n%5=3: (1,2) (1,1) (1,2)") != std::string::npos);

  const CommandResult p4 = run_cli("tables --k 5 --parallelism 4 --stage 1");
  CHECK(p4.exit_code == 0);
  CHECK(p4.stdout_text.find("n%5=0: (4,4) (2,8) (1,2) (1,1) (1,2)") != std::string::npos);
  CHECK(p4.stdout_text.find("n%5=2: (2,1)") != std::string::npos);
  CHECK(p4.stdout_text.find("n%5=4: (4,2) (2,4)") != std::string::npos);

  CHECK(run_cli("tables --k 5 --parallelism 1 --stage 2").exit_code == 2);
}
