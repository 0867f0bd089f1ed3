#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "music/io.hpp"

namespace fs = std::filesystem;
using namespace music;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with `args` in `dir`, capturing stdout and stderr.
Run cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" MUSIC_CLI_PATH "' " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("music_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("simulate then estimate recovers the ground truth") {
  TempDir d;
  auto r = cli(d.path, "--seed 7 simulate --m 500 --sigma 0.1 --r 0");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(d.path / "samples.csv"));
  CHECK(fs::exists(d.path / "truth.csv"));
  r = cli(d.path, "estimate --input samples.csv --s 3 --truth truth.csv --output result.json");
  REQUIRE(r.code == 0);
  const Json j = read_json_file((d.path / "result.json").string());
  CHECK(j["s_hat"] == 3);
  CHECK(j["frequencies"].size() == 3);
  CHECK(j["frequency_error"].get<double>() < 1e-4);
  CHECK(j["amplitude_error"].get<double>() < 0.05);
  CHECK(j.contains("singular_values"));
  CHECK(j["counters"].contains("grid_evals"));

  // Same seed, same samples.
  fs::rename(d.path / "samples.csv", d.path / "first.csv");
  REQUIRE(cli(d.path, "--seed 7 simulate --m 500 --sigma 0.1 --r 0").code == 0);
  std::ifstream a(d.path / "first.csv"), b(d.path / "samples.csv");
  CHECK(std::string(std::istreambuf_iterator<char>(a), {}) == std::string(std::istreambuf_iterator<char>(b), {}));

  // Detection path and flag overrides of a config file.
  std::ofstream(d.path / "config.json") << R"({"alpha": 0.4, "n": 60})";
  r = cli(d.path, "estimate --input samples.csv --config config.json --n 80");
  REQUIRE(r.code == 0);
  const Json k = Json::parse(r.out);
  CHECK(k["s_hat"] == 3);
  CHECK(k["n_used"] == 80);
}

TEST_CASE("certify-constants exits 0 at the standard settings") {
  TempDir d;
  const auto r = cli(d.path, "certify-constants --m0 100 --beta 4 --theta 0.01 --json cert.json");
  CHECK(r.code == 0);
  CHECK(r.out.find("certification: PASS") != std::string::npos);
  CHECK(fs::exists(d.path / "cert.json"));
  CHECK(cli(d.path, "certify-constants --m0 100 --beta 3.4 --theta 0.01").code == 1);
}

TEST_CASE("bad input exits 2") {
  TempDir d;
  CHECK(cli(d.path, "estimate --bogus").code == 2);
  CHECK(cli(d.path, "no-such-command").code == 2);
  std::ofstream(d.path / "bad.csv") << "k,re,im\n0,1,0\n5,1,0\n";
  auto r = cli(d.path, "estimate --input bad.csv");
  CHECK(r.code == 2);
  CHECK(r.out.find("bad-input") != std::string::npos);
  std::ofstream(d.path / "cfg.json") << R"({"alpah": 0.4})";
  std::ofstream(d.path / "ok.csv") << "k,re,im\n-1,0,0\n0,1,0\n1,0,0\n";
  CHECK(cli(d.path, "estimate --input ok.csv --config cfg.json").code == 2);
  CHECK(cli(d.path, "estimate --input ok.csv --alpha 0.9").code == 2);
  CHECK(cli(d.path, "--help").code == 0);
}

TEST_CASE("estimation failures exit 1") {
  TempDir d;
  std::ofstream(d.path / "zero.csv") << "k,re,im\n-2,0,0\n-1,0,0\n0,0,0\n1,0,0\n2,0,0\n";
  const auto r = cli(d.path, "estimate --input zero.csv");
  CHECK(r.code == 1);
}

TEST_CASE("landscape dump and small benchmarks") {
  TempDir d;
  REQUIRE(cli(d.path, "--seed 3 simulate --m 100 --sigma 0.05").code == 0);
  REQUIRE(cli(d.path, "landscape --input samples.csv --s 3 --points 800 --out land.csv").code == 0);
  std::ifstream f(d.path / "land.csv");
  std::string line;
  int rows = 0;
  std::getline(f, line);
  CHECK(line == "t,q,dq,d2q,accepted");
  while (std::getline(f, line)) ++rows;
  CHECK(rows == 800);

  auto r = cli(d.path, "landscape --sweep --count 3 --m-list 100 --window-points 200");
  CHECK(r.code == 0);

  std::ofstream(d.path / "spec.json") << R"({"sigma": 0.1, "m": [100, 200], "trials": 3})";
  r = cli(d.path, "--threads 1 bench-slopes --spec spec.json --out results.csv");
  CHECK(r.code == 0);
  CHECK(fs::exists(d.path / "results.csv"));
  CHECK(fs::exists(d.path / "summary.csv"));
  CHECK(fs::exists(d.path / "plot_slopes.py"));

  r = cli(d.path, "bench-runtime --m 100 --sigma 0.1 --trials 1 --out runtime.csv");
  CHECK(r.code == 0);
  CHECK(fs::exists(d.path / "runtime.csv"));
  CHECK(fs::exists(d.path / "plot_runtime.py"));
}
