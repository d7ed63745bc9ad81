#include "stabkit/error.hpp"
#include "stabkit/grid_config.hpp"
#include "stabkit/simlab.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace {

using namespace stabkit::simlab;
namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(GenDesign, IndependentCovarianceNearIdentity) {
  const auto X = gen_design(10000, 2, {DesignKind::independent, 0.9}, 1);
  const Eigen::MatrixXd centred = X.rowwise() - X.colwise().mean();
  const Eigen::MatrixXd cov = centred.transpose() * centred / (X.rows() - 1.0);
  EXPECT_LT((cov - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.05);
}

TEST(GenDesign, ToeplitzCovariance) {
  const auto sigma = covariance(3, {DesignKind::toeplitz, 0.9});
  EXPECT_DOUBLE_EQ(sigma(0, 0), 1.0);
  EXPECT_NEAR(sigma(0, 1), 0.9, 1e-15);
  EXPECT_NEAR(sigma(0, 2), 0.81, 1e-15);
  EXPECT_NEAR(sigma(2, 0), 0.81, 1e-15);

  const auto X = gen_design(20000, 3, {DesignKind::toeplitz, 0.9}, 2);
  const Eigen::MatrixXd centred = X.rowwise() - X.colwise().mean();
  const Eigen::MatrixXd cov = centred.transpose() * centred / (X.rows() - 1.0);
  EXPECT_LT((cov - sigma).cwiseAbs().maxCoeff(), 0.05);
}

TEST(GenDesign, Deterministic) {
  const Design d{DesignKind::toeplitz, 0.9};
  EXPECT_TRUE(gen_design(30, 5, d, 9) == gen_design(30, 5, d, 9));
  EXPECT_FALSE(gen_design(30, 5, d, 9) == gen_design(30, 5, d, 10));
}

TEST(GenResponse, NullModel) {
  const auto X = gen_design(10000, 3, {}, 4);
  const auto r = gen_response(X, 0, 5);
  EXPECT_TRUE(r.beta.isZero());
  EXPECT_TRUE(r.signal.empty());
  EXPECT_NEAR(r.y.mean(), 0.5, 0.02);
  for (Eigen::Index i = 0; i < r.y.size(); ++i) EXPECT_TRUE(r.y(i) == 0.0 || r.y(i) == 1.0);
}

TEST(GenResponse, InfluentialCoefficients) {
  const auto X = gen_design(50, 20, {}, 6);
  std::set<int> positions;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto r = gen_response(X, 2, seed);
    int nonzero = 0;
    for (Eigen::Index j = 0; j < r.beta.size(); ++j) {
      if (r.beta(j) != 0.0) {
        ++nonzero;
        EXPECT_EQ(std::abs(r.beta(j)), 1.0);
      }
    }
    EXPECT_EQ(nonzero, 2);
    ASSERT_EQ(r.signal.size(), 2u);
    EXPECT_LT(r.signal[0], r.signal[1]);
    for (int j : r.signal) {
      EXPECT_NE(r.beta(j), 0.0);
      positions.insert(j);
    }
  }
  EXPECT_GT(positions.size(), 10u);
}

TEST(Score, Definitions) {
  const std::vector<int> signal{1, 4};
  auto r = score(std::vector<int>{1, 4}, signal);
  EXPECT_DOUBLE_EQ(*r.tpr, 1.0);
  EXPECT_EQ(r.fp, 0);
  r = score(std::vector<int>{}, signal);
  EXPECT_DOUBLE_EQ(*r.tpr, 0.0);
  EXPECT_EQ(r.fp, 0);
  r = score(std::vector<int>{0, 4, 7}, signal);
  EXPECT_DOUBLE_EQ(*r.tpr, 0.5);
  EXPECT_EQ(r.fp, 2);
  EXPECT_EQ(r.n_stable, 3);
  r = score(std::vector<int>{3}, std::vector<int>{});
  EXPECT_FALSE(r.tpr.has_value());
  EXPECT_EQ(r.fp, 1);
}

TEST(SimSetting, Validation) {
  SimSetting s;
  s.p_infl = s.p + 1;
  EXPECT_THROW(s.validate(), stabkit::ParameterError);
  s = SimSetting{};
  s.n = 3;
  EXPECT_THROW(s.validate(), stabkit::ParameterError);
  s = SimSetting{};
  s.replicates = 0;
  EXPECT_THROW(s.validate(), stabkit::ParameterError);
  EXPECT_EQ(default_B(stabkit::bounds::Assumption::none), 100);
  EXPECT_EQ(default_B(stabkit::bounds::Assumption::r_concave), 50);
}

TEST(RunSetting, SmallSettingInvariants) {
  SimSetting s;
  s.n = 40;
  s.p = 20;
  s.p_infl = 2;
  s.pi_thr = 0.75;
  s.pfer_max = 1.0;
  s.B = 20;
  s.replicates = 4;
  s.seed = 3;
  for (auto a : {stabkit::bounds::Assumption::none, stabkit::bounds::Assumption::r_concave}) {
    s.assumption = a;
    const auto r = run_setting(s, 2);
    EXPECT_GE(r.q, 1);
    EXPECT_LE(r.realized_bound, s.pfer_max + 1e-12);
    ASSERT_EQ(r.replicates.size(), 4u);
    double fp = 0.0;
    for (const auto& rec : r.replicates) {
      ASSERT_TRUE(rec.tpr.has_value());
      EXPECT_GE(*rec.tpr, 0.0);
      EXPECT_LE(*rec.tpr, 1.0);
      EXPECT_LE(rec.fp, rec.n_stable);
      EXPECT_LE(rec.n_stable, r.q / r.pi_thr_used + 1e-12);
      fp += rec.fp;
    }
    EXPECT_DOUBLE_EQ(r.mean_fp, fp / 4.0);
    EXPECT_EQ(r.violated, r.mean_fp > s.pfer_max);
  }
}

TEST(RunSetting, NullSignalGivesMissingTpr) {
  SimSetting s;
  s.n = 30;
  s.p = 10;
  s.p_infl = 0;
  s.B = 10;
  s.replicates = 2;
  const auto r = run_setting(s, 1);
  EXPECT_FALSE(r.mean_tpr.has_value());
  for (const auto& rec : r.replicates) EXPECT_FALSE(rec.tpr.has_value());
}

TEST(GridSpec, ParseAndExpand) {
  const auto doc = stabkit::config::parse_toml(R"(
# two by two
[grid]
n = [40, 60]
p = 15
p_infl = [2]
design = ["independent", "toeplitz"]
pi_thr = 0.75
pfer_max = [1.0]
assumption = "unimodal"
replicates = 2
B_pairs = 10
seed = 11
)");
  const auto grid = parse_grid(doc);
  EXPECT_EQ(grid.n, (std::vector<int>{40, 60}));
  EXPECT_EQ(grid.p, (std::vector<int>{15}));
  EXPECT_EQ(*grid.seed, 11u);
  const auto settings = expand(grid, 1);
  ASSERT_EQ(settings.size(), 4u);
  for (const auto& s : settings) {
    EXPECT_EQ(s.B, 10);
    EXPECT_EQ(s.assumption, stabkit::bounds::Assumption::unimodal);
  }
  for (std::size_t i = 1; i < settings.size(); ++i)
    EXPECT_LT(settings[i - 1].key(), settings[i].key());
}

TEST(GridSpec, ErrorsCarryKeyPaths) {
  auto error_of = [](const std::string& text) -> std::string {
    try {
      parse_grid(stabkit::config::parse_toml(text));
    } catch (const stabkit::ConfigError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(error_of("[grid]\npi_thr = [0.6, 1.4]\n").find("grid.pi_thr[1]"), std::string::npos);
  EXPECT_NE(error_of("n = [50, \"x\"]\n").find("n[1]"), std::string::npos);
  EXPECT_NE(error_of("[grid]\ndesign = [\"banded\"]\n").find("grid.design[0]"), std::string::npos);
  EXPECT_NE(error_of("[grid]\nbogus = 1\n").find("grid.bogus"), std::string::npos);
  EXPECT_NE(error_of("[grid]\nn = []\n").find("grid.n"), std::string::npos);
  EXPECT_NE(error_of("replicates = [1, 2]\n").find("replicates"), std::string::npos);
  EXPECT_NE(error_of("n = [2]\n").find("n[0]"), std::string::npos);
}

TEST(GridRun, ReportsAreByteIdenticalAcrossRunsAndThreads) {
  GridSpec grid;
  grid.n = {30, 40};
  grid.p = {12};
  grid.p_infl = {2};
  grid.design = {DesignKind::independent, DesignKind::toeplitz};
  grid.pi_thr = {0.75};
  grid.pfer_max = {1.0};
  grid.assumption = {stabkit::bounds::Assumption::none, stabkit::bounds::Assumption::unimodal};
  grid.replicates = 2;
  grid.B_subsample = 10;
  grid.B_pairs = 5;

  const auto a = fresh_dir("stabkit_grid_a");
  const auto b = fresh_dir("stabkit_grid_b");
  const auto report = run_grid(grid, 99, 1);
  EXPECT_EQ(report.results.size(), 8u);
  write_reports(report, a);
  write_reports(run_grid(grid, 99, 3), b);
  for (const char* name : {"replicates.csv", "settings.csv", "aggregate.csv"}) {
    ASSERT_TRUE(fs::exists(a / name)) << name;
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }

  std::istringstream agg(slurp(a / "aggregate.csv"));
  std::string line;
  std::getline(agg, line);
  EXPECT_EQ(line.rfind("design,pfer_max,assumption", 0), 0u);
  int rows = 0;
  while (std::getline(agg, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 4);  // design x pfer x assumption

  std::istringstream reps(slurp(a / "replicates.csv"));
  rows = -1;
  while (std::getline(reps, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, 16);
  fs::remove_all(a);
  fs::remove_all(b);
}

}  // namespace
