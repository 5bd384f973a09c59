#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "doctest.h"
#include "driftlab/branch_io.hpp"
#include "driftlab/config.hpp"
#include "driftlab/csv.hpp"
#include "driftlab/errors.hpp"
#include "driftlab/tw.hpp"

using namespace driftlab;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = std::string("/tmp/driftlab_test_") + name;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("csv write/read round-trips doubles bit-exactly") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  csv::Table t;
  t.header = {"a", "b", "c"};
  for (int i = 0; i < 50; ++i) {
    double scale = std::pow(10.0, (i % 41) - 20);
    t.rows.push_back({u(rng) * scale, u(rng), static_cast<double>(i)});
  }
  t.rows.push_back({0.0, -0.0, 1e-300});
  t.rows.push_back({0.1 + 0.2, 1.0 / 3.0, 6.02214076e23});

  TempFile f("roundtrip.csv");
  csv::write(f.path, t);
  auto back = csv::read(f.path);
  REQUIRE(back.header == t.header);
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t j = 0; j < t.rows[i].size(); ++j)
      CHECK(back.rows[i][j] == t.rows[i][j]);
}

TEST_CASE("csv files use LF line endings and a header row") {
  csv::Table t;
  t.header = {"x"};
  t.rows.push_back({1.5});
  TempFile f("lf.csv");
  csv::write(f.path, t);
  std::ifstream in(f.path, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  CHECK(bytes == "x\n1.5\n");
}

TEST_CASE("csv reader reports malformed input with line numbers") {
  TempFile f("bad.csv");
  {
    std::ofstream out(f.path, std::ios::binary);
    out << "a,b\n1,2\n3\n";
  }
  try {
    csv::read(f.path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }
  {
    std::ofstream out(f.path, std::ios::binary);
    out << "a,b\n1,zzz\n";
  }
  try {
    csv::read(f.path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find(":2") != std::string::npos);
    CHECK(msg.find("zzz") != std::string::npos);
  }
}

TEST_CASE("config parsing: sections, comments, whitespace, lookups") {
  auto cfg = config::Config::parse_string(
      "# leading comment\n"
      "[model]\n"
      "  beta = 0.35   ; trailing comment\n"
      "bias = self-incitement\n"
      "\n"
      "[integrate]\n"
      "t_end = 50\n",
      "inline.ini");
  CHECK(cfg.has("model", "beta"));
  CHECK(!cfg.has("model", "gamma"));
  CHECK(cfg.get("model", "bias") == "self-incitement");
  CHECK(cfg.get_double("model", "beta") == doctest::Approx(0.35));
  CHECK(cfg.get_double_or("model", "gamma", 2.5) == 2.5);
  CHECK(cfg.get_int_or("integrate", "t_end", 0) == 50);
  CHECK_THROWS_AS(cfg.get("absent", "key"), ConfigError);
}

TEST_CASE("config parse errors carry origin and line number") {
  try {
    config::Config::parse_string("[model]\nthis line has no equals\n",
                                 "broken.ini");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("broken.ini") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
  }
  CHECK_THROWS_AS(
      config::Config::parse_string("key = before any section\n", "x.ini"),
      ConfigError);
}

TEST_CASE("binary branch file round-trips exactly") {
  // build a small synthetic two-point branch
  tw::Branch branch;
  for (double beta : {1.95, 1.90}) {
    tw::WaveProfile p;
    p.grid = tw::Grid::make(10.0, 5);
    p.q.resize(p.grid.N);
    for (int i = 0; i < p.grid.N; ++i)
      p.q[i] = 0.1 * std::sin(0.07 * i) + 1e-3 * i;
    p.c = 3.9 + beta;
    p.mu = 1e-13;
    p.beta = beta;
    p.m = 1.0;
    p.normalization = tw::Normalization::TotalMass;
    p.M = 12.5;
    branch.points.push_back({beta, p.c, p.m_infinity(), p});
  }
  branch.history.push_back("synthetic");

  TempFile f("branch.bin");
  branch_io::write_branch(f.path, branch);
  auto back = branch_io::read_branch(f.path);
  REQUIRE(back.points.size() == branch.points.size());
  for (std::size_t i = 0; i < branch.points.size(); ++i) {
    const auto& a = branch.points[i];
    const auto& b = back.points[i];
    CHECK(b.beta == a.beta);
    CHECK(b.c == a.c);
    CHECK(b.profile.mu == a.profile.mu);
    CHECK(b.profile.m == a.profile.m);
    CHECK(b.profile.M == a.profile.M);
    CHECK(b.profile.grid.N == a.profile.grid.N);
    CHECK(b.profile.grid.L == a.profile.grid.L);
    CHECK(b.profile.normalization == a.profile.normalization);
    REQUIRE(b.profile.q.size() == a.profile.q.size());
    for (int j = 0; j < a.profile.q.size(); ++j)
      CHECK(b.profile.q[j] == a.profile.q[j]);
  }

  // the CSV alternative carries the same leading columns
  TempFile g("branch.csv");
  branch_io::write_branch_csv(g.path, branch);
  auto t = csv::read(g.path);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.header[0] == "beta");
  CHECK(t.rows[0][0] == 1.95);
  CHECK(t.rows[1][0] == 1.90);
}

TEST_CASE("branch reader rejects foreign files") {
  TempFile f("notabranch.bin");
  {
    std::ofstream out(f.path, std::ios::binary);
    out << "this is not a branch file at all";
  }
  CHECK_THROWS(branch_io::read_branch(f.path));
  CHECK_THROWS(branch_io::read_branch("/tmp/driftlab_does_not_exist.bin"));
}
