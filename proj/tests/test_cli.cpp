#include "cli.hpp"

#include "mcig/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using mcig::Json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "mcig");
  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mcig::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mcig_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    write("two_gaussian.json", R"({"schema": 1, "type": "mixture",
      "components": [{"kind": "gaussian", "location": 0, "scale": 3},
                     {"kind": "gaussian", "location": 2, "scale": 1}],
      "proposal": {"kind": "mixture", "eta": [0.5]}})");
    write("three_kind.json", R"({"schema": 1, "type": "mixture",
      "components": [{"kind": "gaussian", "location": -2, "scale": 1},
                     {"kind": "laplace", "location": 0, "scale": 1},
                     {"kind": "cauchy", "location": 2, "scale": 1}]})");
    write("points.json", R"({"points": [[0.70, 0.10], [0.10, 0.70], [0.65, 0.15], [0.15, 0.62],
      [0.60, 0.12], [0.12, 0.75], [0.72, 0.14], [0.18, 0.68]]})");
    write("gauss.json", R"({"type": "exponential", "sufficient_stat": "polynomial", "powers": [1, 2],
      "proposal": {"kind": "uniform", "lower": -12, "upper": 12}})");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string &name) const { return (dir_ / name).string(); }
  void write(const std::string &name, const std::string &text) const {
    std::ofstream(dir_ / name) << text;
  }

  fs::path dir_;
};

} // namespace

TEST_F(CliTest, SampleIsByteIdentical) {
  const auto a = run({"--seed", "7", "sample", "--family", path("two_gaussian.json"), "--m", "10000",
                      "--out", path("a.json")});
  const auto b = run({"--seed", "7", "sample", "--family", path("two_gaussian.json"), "--m", "10000",
                      "--out", path("b.json")});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_NE(a.out.find("m=10000 seed=7"), std::string::npos) << a.out;
  EXPECT_NE(a.err.find("seed=7 m=10000"), std::string::npos) << a.err;
  EXPECT_NE(a.err.find("family="), std::string::npos);
}

TEST_F(CliTest, SampleErrors) {
  EXPECT_EQ(run({"sample", "--family", path("missing.json"), "--m", "10"}).code, 2);
  const auto zero = run({"sample", "--family", path("two_gaussian.json"), "--m", "0"});
  EXPECT_EQ(zero.code, 2);
  EXPECT_NE(zero.err.find("--m"), std::string::npos);
  EXPECT_EQ(run({"sample", "--family", path("two_gaussian.json"), "--bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST_F(CliTest, CurveTwoGaussian) {
  const auto r = run({"curve", "--family", path("two_gaussian.json"), "--m", "10,100,1000,10000",
                      "--grid-points", "99", "--out", path("curve.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(path("curve.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "eta,G_m10,G_m100,G_m1000,G_m10000");
  int rows = 0;
  std::string first;
  while (std::getline(csv, line)) {
    if (rows == 0)
      first = line;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    ++rows;
  }
  EXPECT_EQ(rows, 99);
  EXPECT_EQ(first.substr(0, first.find(',')), "0.01");
}

TEST_F(CliTest, CurveRealizationsAndOracle) {
  const auto r = run({"curve", "--family", path("two_gaussian.json"), "--m", "10", "--seeds", "1,2,3,4,5",
                      "--grid-points", "5", "--oracle"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(r.out);
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "eta,G_m10_seed1,G_m10_seed2,G_m10_seed3,G_m10_seed4,G_m10_seed5,G_quadrature");
  std::string row;
  std::getline(csv, row);
  std::vector<std::string> cells;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');)
    cells.push_back(c);
  ASSERT_EQ(cells.size(), 7u);
  for (std::size_t i = 1; i < 6; ++i)
    for (std::size_t j = i + 1; j < 6; ++j)
      EXPECT_NE(cells[i], cells[j]);
}

TEST_F(CliTest, CurveErrors) {
  EXPECT_EQ(run({"curve", "--family", path("two_gaussian.json"), "--grid-min", "0", "--grid-max", "0.5"}).code, 2);
  EXPECT_EQ(run({"curve", "--family", path("two_gaussian.json"), "--grid-max", "1.2"}).code, 2);
  EXPECT_EQ(run({"curve", "--family", path("three_kind.json")}).code, 2);
}

TEST_F(CliTest, DivergenceGaussianOracle) {
  const auto r = run({"divergence", "--oracle", "gaussian", "--p=2,-0.5", "--q=0,-0.5",
                      "--measure", "bregman,jeffreys"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(r.out);
  EXPECT_NEAR(doc["bregman"].get<double>(), 2.0, 1e-10);
  EXPECT_NEAR(doc["jeffreys"].get<double>(), 4.0, 1e-10);
  const auto same = run({"divergence", "--oracle", "gaussian", "--p=1,-1", "--q=1,-1"});
  EXPECT_EQ(Json::parse(same.out)["bregman"].get<double>(), 0.0);
}

TEST_F(CliTest, DivergenceErrors) {
  EXPECT_EQ(run({"divergence", "--oracle", "gaussian", "--p=0,1", "--q=0,-1"}).code, 3);
  EXPECT_EQ(run({"divergence", "--oracle", "binomial", "--p=0,1", "--q=0"}).code, 2);
  EXPECT_EQ(run({"divergence", "--oracle", "gaussian", "--p=0,-1", "--q=0,-1", "--measure", "tv"}).code, 2);
  EXPECT_EQ(run({"divergence", "--family", path("two_gaussian.json"), "--p", "1.5", "--q", "0.5"}).code, 3);
  EXPECT_EQ(run({"divergence", "--family", path("two_gaussian.json"), "--m", "0", "--p", "0.5", "--q", "0.4"}).code, 2);
}

TEST_F(CliTest, DivergenceMcMixtureWithKl) {
  const auto r = run({"--seed", "3", "divergence", "--family", path("two_gaussian.json"), "--m", "20000",
                      "--p", "0.2", "--q", "0.8", "--measure", "bregman,kl,ekl", "--kl-m", "20000"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(r.out);
  const double b = doc["bregman"], kl = doc["kl"], ekl = doc["ekl"];
  EXPECT_NEAR(b, kl, 0.1 * b);
  EXPECT_NEAR(b, ekl, 0.1 * b);
}

TEST_F(CliTest, PinnedSampleReproducesGenerator) {
  ASSERT_EQ(run({"--seed", "5", "sample", "--family", path("gauss.json"), "--m", "2000", "--out",
                 path("s.json")})
                .code,
            0);
  const auto pinned = run({"divergence", "--family", path("gauss.json"), "--sample", path("s.json"),
                           "--p=0,-0.5", "--q=1,-1"});
  const auto drawn = run({"--seed", "5", "divergence", "--family", path("gauss.json"), "--m", "2000",
                          "--p=0,-0.5", "--q=1,-1"});
  ASSERT_EQ(pinned.code, 0) << pinned.err;
  EXPECT_EQ(pinned.out, drawn.out);
  // A sample of another family is refused.
  ASSERT_EQ(run({"sample", "--family", path("two_gaussian.json"), "--m", "50", "--out", path("f.json")}).code, 0);
  EXPECT_EQ(run({"divergence", "--family", path("gauss.json"), "--sample", path("f.json"),
                 "--p=0,-0.5", "--q=1,-1"})
                .code,
            2);
}

TEST_F(CliTest, ClusterThreeKind) {
  const std::vector<std::string> args{"--seed", "11", "cluster", "--family", path("three_kind.json"),
                                      "--m", "20000", "--points", path("points.json"), "--k", "2",
                                      "--out", path("r1.json"), "--csv", path("r1.csv")};
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const Json doc = Json::parse(slurp(path("r1.json")));
  const auto labels = doc["assignments"].get<std::vector<int>>();
  ASSERT_EQ(labels.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i)
    EXPECT_EQ(labels[i] == labels[0], i % 2 == 0);
  EXPECT_TRUE(doc["converged"].get<bool>());
  const auto csv = slurp(path("r1.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "index,x0,x1,cluster");

  auto again = args;
  again[again.size() - 3] = path("r2.json");
  again[again.size() - 1] = path("r2.csv");
  again.insert(again.begin(), {"--threads", "4"});
  ASSERT_EQ(run(again).code, 0);
  EXPECT_EQ(slurp(path("r1.json")), slurp(path("r2.json")));
  EXPECT_EQ(slurp(path("r1.csv")), slurp(path("r2.csv")));
}

TEST_F(CliTest, ClusterErrors) {
  EXPECT_EQ(run({"cluster", "--family", path("three_kind.json"), "--m", "500", "--points",
                 path("points.json"), "--k", "9"})
                .code,
            2);
  EXPECT_EQ(run({"cluster", "--family", path("three_kind.json"), "--m", "500", "--points",
                 path("points.json"), "--variant", "median"})
                .code,
            2);
  // One Lloyd step is not enough to converge from the spread-out seeds.
  const auto r = run({"cluster", "--family", path("three_kind.json"), "--m", "500", "--points",
                      path("points.json"), "--k", "3", "--max-iters", "1", "--tolerance", "0"});
  EXPECT_TRUE(r.code == 0 || r.code == 4);
}

TEST_F(CliTest, CheckReportsPass) {
  const auto r = run({"check", "--family", path("three_kind.json"), "--m", "500", "--points", "5"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_TRUE(Json::parse(r.out)["pass"].get<bool>());
  const auto e = run({"check", "--family", path("gauss.json"), "--m", "500", "--points", "5"});
  EXPECT_EQ(e.code, 0) << e.out << e.err;
  EXPECT_EQ(run({"check", "--oracle", "pef", "--powers", "2,4,8", "--points", "3"}).code, 0);
}

TEST_F(CliTest, ConfigFile) {
  write("run.json", R"({"seed": 7, "sample": {"family": ")" + path("two_gaussian.json") +
                        R"(", "m": 100, "out": ")" + path("c.json") + R"("}})");
  ASSERT_EQ(run({"--config", path("run.json"), "sample"}).code, 0);
  ASSERT_EQ(run({"--seed", "7", "sample", "--family", path("two_gaussian.json"), "--m", "100", "--out",
                 path("d.json")})
                .code,
            0);
  EXPECT_EQ(slurp(path("c.json")), slurp(path("d.json")));
  // Flags override the file.
  ASSERT_EQ(run({"--config", path("run.json"), "--seed", "8", "sample"}).code, 0);
  EXPECT_NE(slurp(path("c.json")), slurp(path("d.json")));

  write("bad.json", R"({"sample": {"frobnicate": 1}})");
  EXPECT_EQ(run({"--config", path("bad.json"), "sample"}).code, 2);
  write("broken.json", "{not json");
  EXPECT_EQ(run({"--config", path("broken.json"), "sample"}).code, 2);
}
