#include "stabkit/boosting.hpp"

#include "stabkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace stabkit::boosting {

void BoostConfig::validate(Eigen::Index p) const {
  if (!(nu > 0.0 && nu <= 1.0)) throw ParameterError("step length nu must lie in (0, 1]");
  if (m_max < 1) throw ParameterError("m_max must be at least 1");
  if (target_q && (*target_q < 1 || *target_q > p)) {
    std::ostringstream msg;
    msg << "q = " << *target_q << " must lie in [1, p] with p = " << p;
    throw ParameterError(msg.str());
  }
}

CenteredDesign::CenteredDesign(const Eigen::MatrixXd& X)
    : Xc(X.rows(), X.cols()),
      means(X.cols()),
      sq_norms(X.cols()),
      fittable(static_cast<std::size_t>(X.cols()), false) {
  const Eigen::Index n = X.rows();
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double* col = X.col(j).data();
    double sum = 0.0;
    double lo = col[0];
    double hi = col[0];
    for (Eigen::Index i = 0; i < n; ++i) {
      sum += col[i];
      lo = std::min(lo, col[i]);
      hi = std::max(hi, col[i]);
    }
    const double mean = sum / static_cast<double>(n);
    means[j] = mean;
    double* out = Xc.col(j).data();
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      out[i] = col[i] - mean;
      ss += out[i] * out[i];
    }
    sq_norms[j] = ss;
    fittable[static_cast<std::size_t>(j)] = hi > lo && ss > 0.0;
  }
}

int CenteredDesign::n_fittable() const {
  return static_cast<int>(std::count(fittable.begin(), fittable.end(), true));
}

std::vector<int> BoostModel::selected() const {
  std::vector<int> out;
  std::vector<bool> seen(static_cast<std::size_t>(beta.size()), false);
  for (int j : selection_history) {
    if (!seen[static_cast<std::size_t>(j)]) {
      seen[static_cast<std::size_t>(j)] = true;
      out.push_back(j);
    }
  }
  return out;
}

std::vector<int> BoostModel::first_selection(Eigen::Index p) const {
  std::vector<int> first(static_cast<std::size_t>(p), 0);
  for (std::size_t m = 0; m < selection_history.size(); ++m) {
    auto& f = first[static_cast<std::size_t>(selection_history[m])];
    if (f == 0) f = static_cast<int>(m) + 1;
  }
  return first;
}

Eigen::VectorXd BoostModel::predict(const Eigen::MatrixXd& X, const Eigen::VectorXd& means) const {
  Eigen::VectorXd eta = Eigen::VectorXd::Constant(X.rows(), offset);
  eta += (X.rowwise() - means.transpose()) * beta;
  return eta;
}

double init_offset(const Dataset& data) {
  const double n = static_cast<double>(data.n());
  const double ybar = data.y().mean();
  if (data.family() == Family::gaussian) return ybar;
  const double clamped = std::clamp(ybar, 1.0 / (n + 1.0), n / (n + 1.0));
  return std::log(clamped / (1.0 - clamped));
}

BoostModel start(const Dataset& data, const BoostConfig& config) {
  config.validate(data.p());
  BoostModel model;
  model.offset = init_offset(data);
  model.beta = Eigen::VectorXd::Zero(data.p());
  model.config = config;
  model.fitted = Eigen::VectorXd::Constant(data.n(), model.offset);
  return model;
}

void boost_step_inplace(BoostModel& model, const Dataset& data, const CenteredDesign& design) {
  const Eigen::Index n = data.n();
  const Eigen::VectorXd u = negative_gradient(data.family(), data.y(), model.fitted);

  int best = -1;
  double best_rss = std::numeric_limits<double>::infinity();
  double best_coef = 0.0;
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    if (!design.fittable[static_cast<std::size_t>(j)]) continue;
    const double* x = design.Xc.col(j).data();
    double xu = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) xu += x[i] * u[i];
    const double coef = xu / design.sq_norms[j];
    double rss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = u[i] - coef * x[i];
      rss += r * r;
    }
    // strict < keeps the lowest index on exact ties
    if (rss < best_rss) {
      best_rss = rss;
      best = static_cast<int>(j);
      best_coef = coef;
    }
  }
  if (best < 0) throw FitError("no fittable base-learner: every covariate is constant");

  const double step = model.config.nu * best_coef;
  model.beta[best] += step;
  const double* x = design.Xc.col(best).data();
  for (Eigen::Index i = 0; i < n; ++i) model.fitted[i] += step * x[i];
  model.selection_history.push_back(best);
  ++model.m_done;
}

BoostModel boost_step(BoostModel model, const Dataset& data, const CenteredDesign& design) {
  boost_step_inplace(model, data, design);
  return model;
}

BoostModel fit(const Dataset& data, const BoostConfig& config) {
  BoostConfig cfg = config;
  cfg.target_q.reset();
  const CenteredDesign design(data.X());
  BoostModel model = start(data, cfg);
  model.selection_history.reserve(static_cast<std::size_t>(cfg.m_max));
  for (int m = 0; m < cfg.m_max; ++m) boost_step_inplace(model, data, design);
  return model;
}

BoostModel fit_until_q(const Dataset& data, const BoostConfig& config) {
  if (!config.target_q) throw ParameterError("fit_until_q requires target_q");
  const int q = *config.target_q;
  const CenteredDesign design(data.X());
  BoostModel model = start(data, config);
  if (q > design.n_fittable()) {
    std::ostringstream msg;
    msg << "q = " << q << " exceeds the " << design.n_fittable()
        << " non-constant covariates";
    throw ParameterError(msg.str());
  }

  std::vector<bool> seen(static_cast<std::size_t>(data.p()), false);
  int distinct = 0;
  while (distinct < q) {
    if (model.m_done >= config.m_max) {
      std::ostringstream msg;
      msg << "q = " << q << " not reached within m_max = " << config.m_max
          << " iterations (" << distinct << " selected); q too large or nu too small";
      throw FitError(msg.str());
    }
    boost_step_inplace(model, data, design);
    const auto j = static_cast<std::size_t>(model.selection_history.back());
    if (!seen[j]) {
      seen[j] = true;
      ++distinct;
    }
  }
  return model;
}

}  // namespace stabkit::boosting
