#include "stabkit/stabsel.hpp"

#include "stabkit/error.hpp"
#include "stabkit/parallel.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

namespace stabkit::stabsel {

std::string_view to_string(SchemeKind kind) {
  return kind == SchemeKind::subsample ? "subsample" : "complementary_pairs";
}

SchemeKind parse_scheme(std::string_view name) {
  if (name == "subsample" || name == "SS") return SchemeKind::subsample;
  if (name == "complementary_pairs" || name == "complementary-pairs" || name == "CPSS")
    return SchemeKind::complementary_pairs;
  throw ParameterError("unknown sampling scheme '" + std::string(name) +
                       "' (expected subsample or complementary_pairs)");
}

void StabSelConfig::validate(Eigen::Index p) const {
  if (q < 1 || q > p) {
    std::ostringstream msg;
    msg << "q = " << q << " must lie in [1, p] with p = " << p;
    throw ParameterError(msg.str());
  }
  if (!(pi_thr > 0.5 && pi_thr <= 1.0)) throw ParameterError("cutoff must lie in (0.5, 1]");
  if (scheme.B < 2) throw ParameterError("B must be at least 2");
  boost.validate(p);
}

namespace {

// First k entries of a uniformly shuffled 0..n-1 (partial Fisher-Yates).
std::vector<int> draw_without_replacement(int n, int k, std::mt19937_64& rng) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

}  // namespace

std::vector<std::vector<int>> draw_subsamples(int n, const SamplingScheme& scheme,
                                              std::uint64_t seed) {
  if (n < 4) throw ParameterError("subsampling needs n >= 4 observations");
  if (scheme.B < 2) throw ParameterError("B must be at least 2");
  const int half = n / 2;
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> sets;
  sets.reserve(static_cast<std::size_t>(scheme.n_fits()));

  for (int b = 0; b < scheme.B; ++b) {
    auto first = draw_without_replacement(n, half, rng);
    if (scheme.kind == SchemeKind::subsample) {
      std::sort(first.begin(), first.end());
      sets.push_back(std::move(first));
      continue;
    }
    std::vector<bool> in_first(static_cast<std::size_t>(n), false);
    for (int i : first) in_first[static_cast<std::size_t>(i)] = true;
    std::vector<int> second;
    second.reserve(static_cast<std::size_t>(n - half));
    for (int i = 0; i < n; ++i)
      if (!in_first[static_cast<std::size_t>(i)]) second.push_back(i);
    if (static_cast<int>(second.size()) > half) {
      std::uniform_int_distribution<std::size_t> drop(0, second.size() - 1);
      second.erase(second.begin() + static_cast<std::ptrdiff_t>(drop(rng)));
    }
    std::sort(first.begin(), first.end());
    sets.push_back(std::move(first));
    sets.push_back(std::move(second));
  }
  return sets;
}

StabSelResult aggregate(Eigen::Index p, const SamplingScheme& scheme, double pi_thr, int q,
                        std::span<const FitRecord> fits) {
  if (fits.empty()) throw ParameterError("aggregate: no fits");
  const bool pairs = scheme.kind == SchemeKind::complementary_pairs;
  if (pairs && fits.size() % 2 != 0)
    throw ParameterError("aggregate: complementary pairs need an even number of fits");

  const double n_fits = static_cast<double>(fits.size());
  StabSelResult result;
  result.q = q;
  result.pi_thr = pi_thr;
  result.scheme = scheme;
  result.pi_hat = Eigen::VectorXd::Zero(p);

  int m_grid = 0;
  for (const auto& fit : fits) m_grid = std::max(m_grid, fit.m_done);
  // counts of fits whose first selection of j happened exactly at iteration m
  Eigen::MatrixXd hits = Eigen::MatrixXd::Zero(p, std::max(m_grid, 1));

  for (const auto& fit : fits) {
    for (std::size_t k = 0; k < fit.selected.size(); ++k) {
      const int j = fit.selected[k];
      result.pi_hat[j] += 1.0;
      if (k < fit.first_iteration.size() && fit.first_iteration[k] >= 1)
        hits(j, fit.first_iteration[k] - 1) += 1.0;
    }
    result.per_run_selected.push_back(fit.selected);
  }
  result.pi_hat /= n_fits;

  if (pairs) {
    Eigen::VectorXd both = Eigen::VectorXd::Zero(p);
    std::vector<bool> in_first(static_cast<std::size_t>(p));
    for (std::size_t b = 0; b + 1 < fits.size(); b += 2) {
      std::fill(in_first.begin(), in_first.end(), false);
      for (int j : fits[b].selected) in_first[static_cast<std::size_t>(j)] = true;
      for (int j : fits[b + 1].selected)
        if (in_first[static_cast<std::size_t>(j)]) both[j] += 1.0;
    }
    result.pi_tilde = both / (n_fits / 2.0);
  }

  result.path = Eigen::MatrixXd::Zero(p, m_grid);
  for (Eigen::Index j = 0; j < p; ++j) {
    double cumulative = 0.0;
    for (int m = 0; m < m_grid; ++m) {
      cumulative += hits(j, m);
      result.path(j, m) = cumulative / n_fits;
    }
  }

  for (Eigen::Index j = 0; j < p; ++j)
    if (result.pi_hat[j] >= pi_thr) result.stable_set.push_back(static_cast<int>(j));
  return result;
}

StabSelResult run(const Dataset& data, const StabSelConfig& config) {
  config.validate(data.p());
  const auto subsamples =
      draw_subsamples(static_cast<int>(data.n()), config.scheme, config.seed);

  boosting::BoostConfig boost = config.boost;
  boost.target_q = config.q;

  std::vector<FitRecord> records(subsamples.size());
  const unsigned threads = config.threads ? config.threads : default_threads();
  parallel_for(subsamples.size(), threads, [&](std::size_t b) {
    const Dataset part = data.rows(subsamples[b]);
    boosting::BoostModel model;
    try {
      model = boosting::fit_until_q(part, boost);
    } catch (const FitError& e) {
      throw FitError("subsample " + std::to_string(b + 1) + ": " + e.what());
    } catch (const ParameterError& e) {
      throw ParameterError("subsample " + std::to_string(b + 1) + ": " + e.what());
    }
    FitRecord& rec = records[b];
    rec.selected = model.selected();
    const auto first = model.first_selection(data.p());
    for (int j : rec.selected) rec.first_iteration.push_back(first[static_cast<std::size_t>(j)]);
    rec.m_done = model.m_done;
  });

  return aggregate(data.p(), config.scheme, config.pi_thr, config.q, records);
}

std::vector<PathRow> stability_paths(const StabSelResult& result) {
  std::vector<PathRow> rows;
  rows.reserve(static_cast<std::size_t>(result.path.size()));
  for (Eigen::Index j = 0; j < result.path.rows(); ++j)
    for (Eigen::Index m = 0; m < result.path.cols(); ++m)
      rows.push_back({static_cast<int>(j), static_cast<int>(m) + 1, result.path(j, m)});
  return rows;
}

}  // namespace stabkit::stabsel
