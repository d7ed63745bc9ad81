#pragma once

#include "stabkit/boosting.hpp"
#include "stabkit/data.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace stabkit::stabsel {

enum class SchemeKind { subsample, complementary_pairs };

std::string_view to_string(SchemeKind kind);
SchemeKind parse_scheme(std::string_view name);

struct SamplingScheme {
  SchemeKind kind = SchemeKind::subsample;
  int B = 100;

  static SamplingScheme subsample(int B) { return {SchemeKind::subsample, B}; }
  static SamplingScheme complementary_pairs(int B) { return {SchemeKind::complementary_pairs, B}; }

  /// B for subsampling, 2B for complementary pairs.
  int n_fits() const { return kind == SchemeKind::complementary_pairs ? 2 * B : B; }
};

struct StabSelConfig {
  int q = 1;
  double pi_thr = 0.75;
  SamplingScheme scheme;
  std::uint64_t seed = 0;
  boosting::BoostConfig boost;
  /// 0 means default_threads().
  unsigned threads = 0;

  void validate(Eigen::Index p) const;
};

/// Outcome of one subsample fit, as needed for aggregation.
struct FitRecord {
  /// Distinct selected indices, in order of first selection.
  std::vector<int> selected;
  /// 1-based iteration of first selection, parallel to `selected`.
  std::vector<int> first_iteration;
  int m_done = 0;
};

struct StabSelResult {
  Eigen::VectorXd pi_hat;
  /// Simultaneous selection frequencies; complementary pairs only.
  std::optional<Eigen::VectorXd> pi_tilde;
  std::vector<int> stable_set;
  std::vector<std::vector<int>> per_run_selected;
  /// p x m_grid cumulative selection frequencies; column m-1 is iteration m.
  Eigen::MatrixXd path;
  int q = 0;
  double pi_thr = 0.0;
  SamplingScheme scheme;
};

/// Index sets of size floor(n/2). Subsampling gives B independent draws
/// without replacement; complementary pairs give 2B sets ordered
/// (S1_1, S2_1, S1_2, S2_2, ...) where S2_b is the complement of S1_b, with
/// one random observation dropped when n is odd. Deterministic in seed.
std::vector<std::vector<int>> draw_subsamples(int n, const SamplingScheme& scheme,
                                              std::uint64_t seed);

/// Combines per-fit records into frequencies, the stable set and the path.
/// `fits` must be ordered as returned by draw_subsamples.
StabSelResult aggregate(Eigen::Index p, const SamplingScheme& scheme, double pi_thr, int q,
                        std::span<const FitRecord> fits);

/// Stability selection with fit_until_q on every subsample. Subsamples are
/// drawn up front from the seed; fits may run concurrently.
StabSelResult run(const Dataset& data, const StabSelConfig& config);

struct PathRow {
  int base_learner;
  int iteration;
  double frequency;
};

/// Long-format path table ordered by base-learner, then iteration.
std::vector<PathRow> stability_paths(const StabSelResult& result);

}  // namespace stabkit::stabsel
