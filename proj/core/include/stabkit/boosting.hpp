#pragma once

#include "stabkit/data.hpp"

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace stabkit::boosting {

struct BoostConfig {
  double nu = 0.1;
  int m_max = 10000;
  std::optional<int> target_q;

  /// Throws ParameterError unless 0 < nu <= 1, m_max >= 1 and target_q in [1, p].
  void validate(Eigen::Index p) const;
};

/// Column-centred copy of a design matrix, computed once per fit.
struct CenteredDesign {
  Eigen::MatrixXd Xc;
  Eigen::VectorXd means;
  Eigen::VectorXd sq_norms;
  /// false for constant columns; those never compete for selection.
  std::vector<bool> fittable;

  explicit CenteredDesign(const Eigen::MatrixXd& X);

  int n_fittable() const;
};

struct BoostModel {
  double offset = 0.0;
  /// Coefficients on the centred covariates.
  Eigen::VectorXd beta;
  std::vector<int> selection_history;
  int m_done = 0;
  BoostConfig config;
  /// Current linear predictor on the training rows.
  Eigen::VectorXd fitted;

  /// Distinct selected indices in order of first selection.
  std::vector<int> selected() const;

  /// Iteration (1-based) at which each covariate was first selected, 0 if never.
  std::vector<int> first_selection(Eigen::Index p) const;

  /// Linear predictor for new rows on the original (uncentred) scale.
  Eigen::VectorXd predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& means) const;
};

/// Loss-minimising constant: mean(y) for gaussian, clamped log-odds for binomial.
double init_offset(const Dataset& data);

/// Model at iteration 0: offset only.
BoostModel start(const Dataset& data, const BoostConfig& config);

/// One component-wise update: fits every fittable centred column to the
/// negative gradient by least squares through the origin and moves the
/// coefficient of the smallest-RSS column by nu times its fit. Ties go to the
/// lowest column index. Throws FitError if no column is fittable.
BoostModel boost_step(BoostModel model, const Dataset& data, const CenteredDesign& design);

/// In-place variant used by the fitting loops.
void boost_step_inplace(BoostModel& model, const Dataset& data, const CenteredDesign& design);

/// Exactly config.m_max iterations.
BoostModel fit(const Dataset& data, const BoostConfig& config);

/// Iterates until config.target_q distinct base-learners have been selected;
/// the iteration that selects the q-th one is the last. Throws FitError if
/// m_max is reached first, ParameterError if q exceeds the fittable columns.
BoostModel fit_until_q(const Dataset& data, const BoostConfig& config);

}  // namespace stabkit::boosting
