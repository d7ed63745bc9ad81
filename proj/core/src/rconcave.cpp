// Extremal tail probability over r-concave distributions on {0, ..., N}.
//
// A pmf f is r-concave (r < 0) when its support is an integer interval and
// g = f^r is convex there. For P(X >= t) with a mean cap mu < t the maximiser
// puts a decreasing-or-increasing "affine g" profile on {0..k} and one extra
// atom at k+1 that takes whatever mass the mean cap leaves over:
//
//   f(j) = w h(j) / Z, h(j) = (1 + c j)^(-s), s = -1/r, j = 0..k
//   f(k+1) = 1 - w,    w chosen so that E(X) = mu
//
// The atom may not exceed the affine extrapolation of g (convexity at k).
// For each k the remaining free shape parameter c is scanned on a coarse
// grid and refined by golden-section search; the result is the maximum over
// k and over the pure affine profile on the full support.

#include "stabkit/bounds.hpp"
#include "stabkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace stabkit::bounds {

namespace {

constexpr double kShapeLimit = 25.0;
constexpr int kBisectionSteps = 64;
constexpr int kCoarsePoints = 41;
constexpr int kGoldenSteps = 80;

class TailProblem {
 public:
  TailProblem(int N, double mu, int t, double s) : N_(N), mu_(mu), t_(t), s_(s) {
    h_.resize(static_cast<std::size_t>(N) + 1);
  }

  double solve() {
    double best = 0.0;
    for (int k = std::max(t_ - 1, 0); k < N_; ++k) best = std::max(best, best_for_atom_after(k));
    best = std::max(best, best_full_support());
    return std::min(best, 1.0);
  }

 private:
  struct Profile {
    double c;
    double Z;
    double mean;
  };

  // shape u in (-inf, inf) maps to c in (-1/k, inf)
  Profile profile(int k, double u) {
    const double c = k > 0 ? std::expm1(u) / k : 0.0;
    double Z = 0.0;
    double first_moment = 0.0;
    for (int j = 0; j <= k; ++j) {
      const double hj = std::pow(1.0 + c * j, -s_);
      h_[static_cast<std::size_t>(j)] = hj;
      Z += hj;
      first_moment += j * hj;
    }
    return {c, Z, first_moment / Z};
  }

  double upper_sum(int k, double Z) const {
    double tail = 0.0;
    for (int j = t_; j <= k; ++j) tail += h_[static_cast<std::size_t>(j)];
    return tail / Z;
  }

  // Tail probability with atom at k+1, or negative when infeasible.
  double evaluate(int k, double u) {
    const Profile pr = profile(k, u);
    if (pr.mean > mu_) return -1.0;
    const double w = (k + 1 - mu_) / (k + 1 - pr.mean);
    const double atom = 1.0 - w;
    if (k >= 1) {
      const double next = 1.0 + pr.c * (k + 1);
      if (next > 0.0) {
        const double extrapolated = w * std::pow(next, -s_) / pr.Z;
        if (atom > extrapolated * (1.0 + 1e-12)) return -1.0;
      }
    }
    return w * upper_sum(k, pr.Z) + atom;
  }

  bool mean_ok(int k, double u) { return profile(k, u).mean <= mu_; }

  // Smallest shape with mean <= mu (mean is decreasing in u).
  double lowest_feasible_shape(int k) {
    if (mean_ok(k, -kShapeLimit)) return -kShapeLimit;
    double lo = -kShapeLimit;
    double hi = kShapeLimit;
    for (int i = 0; i < kBisectionSteps; ++i) {
      const double mid = 0.5 * (lo + hi);
      (mean_ok(k, mid) ? hi : lo) = mid;
    }
    return hi;
  }

  double best_for_atom_after(int k) {
    if (k == 0) {
      // two-point law on {0, 1}
      return t_ <= 1 && mu_ <= 1.0 ? mu_ : 0.0;
    }
    if (!mean_ok(k, kShapeLimit)) return 0.0;
    const double u_lo = lowest_feasible_shape(k);
    double u_hi = kShapeLimit;
    if (evaluate(k, u_hi) < 0.0) {
      double lo = u_lo;
      double hi = u_hi;
      for (int i = 0; i < kBisectionSteps; ++i) {
        const double mid = 0.5 * (lo + hi);
        (evaluate(k, mid) >= 0.0 ? lo : hi) = mid;
      }
      u_hi = lo;
    }

    std::vector<double> grid(kCoarsePoints);
    std::vector<double> value(kCoarsePoints);
    int arg = 0;
    for (int i = 0; i < kCoarsePoints; ++i) {
      grid[i] = u_lo + (u_hi - u_lo) * i / (kCoarsePoints - 1);
      value[i] = evaluate(k, grid[i]);
      if (value[i] > value[arg]) arg = i;
    }
    double best = std::max(0.0, value[arg]);

    double a = grid[std::max(arg - 1, 0)];
    double b = grid[std::min(arg + 1, kCoarsePoints - 1)];
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - ratio * (b - a);
    double x2 = a + ratio * (b - a);
    double f1 = evaluate(k, x1);
    double f2 = evaluate(k, x2);
    for (int i = 0; i < kGoldenSteps; ++i) {
      if (f1 > f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - ratio * (b - a);
        f1 = evaluate(k, x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + ratio * (b - a);
        f2 = evaluate(k, x2);
      }
    }
    return std::max({best, f1, f2});
  }

  // Affine profile on the whole support, mean cap possibly slack.
  double best_full_support() {
    const int k = N_;
    if (!mean_ok(k, kShapeLimit)) return 0.0;
    const Profile pr = profile(k, lowest_feasible_shape(k));
    return upper_sum(k, pr.Z);
  }

  int N_;
  double mu_;
  int t_;
  double s_;
  std::vector<double> h_;
};

}  // namespace

double min_D(double xi, double theta, int B, double r) {
  if (!(r < 0.0)) throw ParameterError("min_D: r must be negative");
  if (!(theta > 0.0 && theta < 1.0)) throw ParameterError("min_D: theta must lie in (0, 1)");
  if (!(xi > 0.0 && xi <= 1.0 + 1e-12)) throw ParameterError("min_D: xi must lie in (0, 1]");
  if (B < 2) throw ParameterError("min_D: B must be at least 2");

  const double mu = theta * B;
  const int t = static_cast<int>(std::ceil(xi * B - 1e-9));
  // a point mass on a grid value in [xi, theta] is admissible
  if (t <= mu + 1e-12) return 1.0;
  return TailProblem(B, mu, t, -1.0 / r).solve();
}

}  // namespace stabkit::bounds
