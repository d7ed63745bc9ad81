#pragma once

#include "stabkit/bounds.hpp"
#include "stabkit/grid_config.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stabkit::simlab {

enum class DesignKind { independent, toeplitz };

struct Design {
  DesignKind kind = DesignKind::independent;
  /// Toeplitz correlation: Sigma_kl = rho^|k-l|.
  double rho = 0.9;
};

std::string_view to_string(DesignKind kind);
DesignKind parse_design(std::string_view name);

/// Covariance matrix of the design.
Eigen::MatrixXd covariance(int p, const Design& design);

/// n x p rows drawn from N(0, Sigma) via the Cholesky factor of Sigma.
Eigen::MatrixXd gen_design(int n, int p, const Design& design, std::uint64_t seed);

struct Response {
  Eigen::VectorXd y;
  Eigen::VectorXd beta;
  /// Sorted influential column indices.
  std::vector<int> signal;
};

/// Picks p_infl influential columns uniformly without replacement with
/// coefficients +-1, then y_i ~ Bernoulli(logistic(x_i' beta)).
Response gen_response(const Eigen::MatrixXd& X, int p_infl, std::uint64_t seed);

struct SimSetting {
  int n = 100;
  int p = 100;
  int p_infl = 2;
  Design design;
  double pi_thr = 0.75;
  double pfer_max = 1.0;
  bounds::Assumption assumption = bounds::Assumption::none;
  /// Subsamples (none) or complementary pairs (unimodal, r-concave).
  int B = 100;
  int replicates = 50;
  std::uint64_t seed = 0;
  double nu = 0.1;
  /// Logistic boosting on small correlated subsamples can need far more
  /// iterations than the single-fit default to reach a large q.
  int m_max = 200000;

  void validate() const;
  /// Stable text key used for ordering and seeding.
  std::string key() const;
};

/// Default B for an assumption: 100 subsamples without an assumption,
/// 50 complementary pairs otherwise.
int default_B(bounds::Assumption assumption);

struct ReplicateRecord {
  int replicate = 0;
  /// Missing when p_infl = 0.
  std::optional<double> tpr;
  int fp = 0;
  int n_stable = 0;
};

struct SimResult {
  SimSetting setting;
  /// q derived from (pi_thr, pfer_max, assumption).
  int q = 0;
  /// pi_thr actually used (grid-snapped for unimodal / r-concave).
  double pi_thr_used = 0.0;
  double realized_bound = 0.0;
  std::optional<double> mean_tpr;
  double mean_fp = 0.0;
  /// mean_fp > pfer_max.
  bool violated = false;
  std::vector<ReplicateRecord> replicates;
};

/// tpr = |stable & signal| / |signal| (missing for an empty signal set) and
/// fp = |stable \ signal|.
ReplicateRecord score(std::span<const int> stable_set, std::span<const int> signal);

/// Runs every replicate of one setting; replicate data depend only on the
/// data-generating fields and the replicate number, so settings that differ
/// only in pi_thr / pfer_max / assumption see identical data.
SimResult run_setting(const SimSetting& setting, unsigned threads = 0);

struct GridSpec {
  std::vector<int> n{50, 100, 200};
  std::vector<int> p{100};
  std::vector<int> p_infl{2};
  std::vector<DesignKind> design{DesignKind::independent};
  std::vector<double> pi_thr{0.6, 0.75, 0.9};
  std::vector<double> pfer_max{1.0};
  std::vector<bounds::Assumption> assumption{bounds::Assumption::none};
  double rho = 0.9;
  int replicates = 50;
  int B_subsample = 100;
  int B_pairs = 50;
  double nu = 0.1;
  int m_max = 200000;
  std::optional<std::uint64_t> seed;
};

/// Reads a grid from parsed TOML. Recognised keys live at top level or
/// under [grid]; a scalar is accepted wherever a list is. Throws ConfigError
/// with the key path on unknown keys or invalid entries.
GridSpec parse_grid(const config::Document& doc);
GridSpec parse_grid_file(const std::filesystem::path& path);

/// Cartesian product, sorted by SimSetting::key().
std::vector<SimSetting> expand(const GridSpec& grid, std::uint64_t master_seed);

struct GridReport {
  std::vector<SimResult> results;
};

GridReport run_grid(const GridSpec& grid, std::uint64_t master_seed, unsigned threads = 0);

/// Writes replicates.csv, settings.csv and aggregate.csv into out_dir.
void write_reports(const GridReport& report, const std::filesystem::path& out_dir);

}  // namespace stabkit::simlab
