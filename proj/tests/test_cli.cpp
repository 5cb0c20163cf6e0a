// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "abtl/abtl.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("abtl_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Run {
  int status = -1;
  std::string output;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(ABTL_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, got);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

double field(const std::string& text, const std::string& key) {
  const auto at = text.find(key + "=");
  REQUIRE(at != std::string::npos);
  return std::stod(text.substr(at + key.size() + 1));
}

}  // namespace

TEST_CASE("gen-fdm and a single iteration") {
  TempDir dir;
  auto r = cli("gen-fdm --n0 6 --p 2 --seed 3 --out " + (dir / "sys"));
  REQUIRE(r.status == 0);
  for (const char* f : {"A.mtx", "B.mtx", "C.mtx"}) CHECK(fs::exists(dir.path / "sys" / f));

  r = cli("reduce --input " + (dir / "sys") + " --s 2 --m-max 1 --out " + (dir / "m1"));
  INFO(r.output);
  REQUIRE(r.status == 0);
  const auto meta = nlohmann::json::parse(slurp(dir / "m1/model.json"));
  CHECK(meta["iterations"] == 1);
  const std::string a = slurp(dir / "m1/A.mtx");
  CHECK(a.find("\n2 2\n") != std::string::npos);
}

TEST_CASE("reduce on FDM n0=20 writes the full history") {
  TempDir dir;
  REQUIRE(cli("gen-fdm --n0 20 --p 6 --seed 1 --out " + (dir / "sys")).status == 0);
  const auto r = cli("reduce --input " + (dir / "sys") + " --s 3 --m-max 20 --out " + (dir / "m"));
  INFO(r.output);
  REQUIRE(r.status == 0);
  for (const char* f : {"A.mtx", "B.mtx", "C.mtx", "model.json", "history.csv", "timing.json"}) {
    CHECK(fs::exists(dir.path / "m" / f));
  }
  CHECK(count_lines(dir / "m/history.csv") == 21);
  const auto meta = nlohmann::json::parse(slurp(dir / "m/model.json"));
  CHECK(meta["shifts_right"].size() == 20);
  CHECK(meta["config"]["m_max"] == 20);
  CHECK(meta["config"]["s"] == 3);
  CHECK(r.output.find("sigma") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  TempDir dir;
  REQUIRE(cli("gen-fdm --n0 4 --p 1 --out " + (dir / "sys")).status == 0);
  CHECK(cli("reduce --input " + (dir / "sys") + " --second-order --out " + (dir / "m")).status == 2);
  CHECK(cli("reduce --out " + (dir / "m")).status == 2);
  CHECK(cli("reduce --input " + (dir / "missing") + " --out " + (dir / "m")).status == 2);
  CHECK(cli("no-such-command").status == 2);
  CHECK(cli("reduce --input " + (dir / "sys") + " --s 3 --out " + (dir / "m")).status == 2);
}

TEST_CASE("eval summary and parity with the library") {
  TempDir dir;
  REQUIRE(cli("gen-fdm --n0 8 --p 2 --seed 4 --out " + (dir / "sys")).status == 0);
  REQUIRE(cli("reduce --input " + (dir / "sys") + " --s 2 --m-max 4 --out " + (dir / "m")).status == 0);
  const auto r = cli("eval --input " + (dir / "sys") + " --model " + (dir / "m") +
                     " --grid-min 1e-3 --grid-max 1e5 --grid-count 37");
  INFO(r.output);
  REQUIRE(r.status == 0);
  CHECK(field(r.output, "points") == 37);
  CHECK(count_lines(dir / "m/response.csv") == 38);
  const double cli_hinf = field(r.output, "hinf_estimate(sampled)");

  abtl_system* sys = nullptr;
  abtl_model* model = nullptr;
  REQUIRE(abtl_system_load_first_order((dir / "sys/A.mtx").c_str(), (dir / "sys/B.mtx").c_str(),
                                       (dir / "sys/C.mtx").c_str(), 0, 0, &sys) == ABTL_OK);
  REQUIRE(abtl_model_load((dir / "m").c_str(), &model) == ABTL_OK);
  abtl_error_summary sum{};
  REQUIRE(abtl_evaluate(sys, model, 1e-3, 1e5, 37, nullptr, &sum) == ABTL_OK);
  CHECK(cli_hinf == doctest::Approx(sum.hinf_estimate).epsilon(1e-12));
  abtl_model_free(model);
  abtl_system_free(sys);
}

TEST_CASE("a full-order model has zero error") {
  TempDir dir;
  REQUIRE(cli("gen-fdm --n0 2 --p 1 --out " + (dir / "sys")).status == 0);
  REQUIRE(cli("reduce --input " + (dir / "sys") + " --s 1 --m-max 4 --out " + (dir / "m")).status == 0);
  const auto r = cli("eval --input " + (dir / "sys") + " --model " + (dir / "m") + " --grid-count 20");
  REQUIRE(r.status == 0);
  CHECK(field(r.output, "hinf_estimate(sampled)") <= 1e-12);
}

TEST_CASE("compare prints one row per m") {
  TempDir dir;
  REQUIRE(cli("gen-fdm --n0 8 --p 2 --out " + (dir / "sys")).status == 0);
  const auto r = cli("compare --input " + (dir / "sys") + " --s 2 --m-list 3 --grid-count 20 --out " +
                     (dir / "cmp.csv"));
  INFO(r.output);
  REQUIRE(r.status == 0);
  REQUIRE(count_lines(dir / "cmp.csv") == 2);
  std::ifstream in(dir / "cmp.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "m,order,time,hinf_estimate");
  std::stringstream ss(row);
  std::string m, order, time;
  std::getline(ss, m, ',');
  std::getline(ss, order, ',');
  std::getline(ss, time, ',');
  CHECK(m == "3");
  CHECK(order == "6");
  CHECK(std::stod(time) > 0.0);
}

TEST_CASE("second-order reduction from M D K files") {
  TempDir dir;
  fs::create_directories(dir.path / "so");
  const int n = 30;
  std::ofstream m(dir / "so/M.mtx"), d(dir / "so/D.mtx"), k(dir / "so/K.mtx");
  m << "%%MatrixMarket matrix coordinate real general\n" << n << " " << n << " " << n << "\n";
  d << "%%MatrixMarket matrix coordinate real general\n" << n << " " << n << " " << n << "\n";
  k << "%%MatrixMarket matrix coordinate real symmetric\n" << n << " " << n << " " << 2 * n - 1 << "\n";
  for (int i = 1; i <= n; ++i) {
    m << i << " " << i << " 1\n";
    d << i << " " << i << " 0.2\n";
    k << i << " " << i << " 2\n";
    if (i > 1) k << i << " " << i - 1 << " -1\n";
  }
  m.close();
  d.close();
  k.close();
  const auto r = cli("reduce --input " + (dir / "so") + " --p 2 --s 2 --m-max 3 --second-order --out " +
                     (dir / "m"));
  INFO(r.output);
  REQUIRE(r.status == 0);
  CHECK(fs::exists(dir.path / "m/D.mtx"));
  CHECK(fs::exists(dir.path / "m/K.mtx"));
  const auto e = cli("eval --mdk " + (dir / "so/M.mtx") + " " + (dir / "so/D.mtx") + " " + (dir / "so/K.mtx") +
                     " --p 2 --model " + (dir / "m") + " --grid-count 10");
  INFO(e.output);
  CHECK(e.status == 0);
}

TEST_CASE("identical runs give identical artifacts") {
  TempDir dir;
  REQUIRE(cli("gen-fdm --n0 10 --p 3 --seed 2 --out " + (dir / "sys")).status == 0);
  for (const char* out : {"a", "b"}) {
    REQUIRE(cli("reduce --input " + (dir / "sys") + " --s 3 --m-max 5 --out " + (dir / out)).status == 0);
  }
  for (const char* f : {"A.mtx", "B.mtx", "C.mtx", "model.json", "history.csv"}) {
    CHECK(slurp(dir / (std::string("a/") + f)) == slurp(dir / (std::string("b/") + f)));
  }
}
