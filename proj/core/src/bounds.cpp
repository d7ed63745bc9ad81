#include "stabkit/bounds.hpp"

#include "stabkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace stabkit::bounds {

namespace {

constexpr double kGridTol = 1e-9;
const double kThetaMaxUnimodal = 1.0 / std::sqrt(3.0);

void check_cutoff(double pi_thr) {
  if (!(pi_thr > 0.5 && pi_thr <= 1.0 + kGridTol)) {
    std::ostringstream msg;
    msg << "cutoff " << pi_thr << " must lie in (0.5, 1]";
    throw ParameterError(msg.str());
  }
}

void check_q(int q, int p) {
  if (p < 1) throw ParameterError("p must be at least 1");
  if (q < 1 || q > p) {
    std::ostringstream msg;
    msg << "q = " << q << " must lie in [1, p] with p = " << p;
    throw ParameterError(msg.str());
  }
}

double grid_value(int k, int B) { return static_cast<double>(B + k) / (2.0 * B); }

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

std::string_view to_string(Assumption assumption) {
  switch (assumption) {
    case Assumption::none: return "none";
    case Assumption::unimodal: return "unimodal";
    case Assumption::r_concave: return "r-concave";
  }
  return "none";
}

Assumption parse_assumption(std::string_view name) {
  if (name == "none" || name == "E1") return Assumption::none;
  if (name == "unimodal" || name == "E2") return Assumption::unimodal;
  if (name == "r-concave" || name == "r_concave" || name == "rconcave" || name == "E3")
    return Assumption::r_concave;
  throw ParameterError("unknown assumption '" + std::string(name) +
                       "' (expected none, unimodal or r-concave)");
}

double pfer_bound_mb(int q, int p, double pi_thr) {
  check_q(q, p);
  check_cutoff(pi_thr);
  return static_cast<double>(q) * q / ((2.0 * pi_thr - 1.0) * p);
}

double pfer_bound_e1(int q, double theta, double pi_thr) {
  if (q < 1) throw ParameterError("q must be at least 1");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ParameterError("theta must lie in [0, 1]");
  check_cutoff(pi_thr);
  return theta * q / (2.0 * pi_thr - 1.0);
}

double c_min(double theta, int B) {
  return std::min(0.5 + theta * theta, 0.5 + 1.0 / (2.0 * B) + 0.75 * theta * theta);
}

double c_const(double pi_thr, int B, double theta) {
  if (B < 2) throw ParameterError("B must be at least 2");
  if (theta > kThetaMaxUnimodal + 1e-12) {
    std::ostringstream msg;
    msg << "unimodal bound needs theta = q/p <= 1/sqrt(3); got " << theta;
    throw ParameterError(msg.str());
  }
  check_cutoff(pi_thr);
  const double cmin = c_min(theta, B);
  if (pi_thr <= 0.75 && pi_thr <= cmin) {
    std::ostringstream msg;
    msg << "unimodal bound not applicable at this threshold: cutoff " << pi_thr
        << " <= c_min = " << cmin;
    throw ParameterError(msg.str());
  }
  const double half_inv_B = 1.0 / (2.0 * B);
  if (pi_thr <= 0.75) return 2.0 * (2.0 * pi_thr - 1.0 - half_inv_B);
  return (1.0 + 1.0 / B) / (4.0 * (1.0 - pi_thr + half_inv_B));
}

bool on_grid(double pi_thr, int B) {
  const double k = (pi_thr - 0.5) * 2.0 * B;
  const double nearest = std::round(k);
  return std::abs(k - nearest) <= kGridTol * 2.0 * B && nearest >= 2 && nearest <= B;
}

GridValue validate_grid(double pi_thr, int B) {
  if (B < 2) throw ParameterError("B must be at least 2");
  check_cutoff(pi_thr);
  int k = static_cast<int>(std::ceil((pi_thr - 0.5) * 2.0 * B - kGridTol));
  k = std::clamp(k, 2, B);
  const double value = grid_value(k, B);
  return {value, std::abs(value - pi_thr) > kGridTol};
}

double pfer_bound_e2(int q, double theta, double pi_thr, int B) {
  if (q < 1) throw ParameterError("q must be at least 1");
  if (!on_grid(pi_thr, B)) {
    std::ostringstream msg;
    msg << "cutoff " << pi_thr << " is not on the grid 1/2 + k/(2B) for B = " << B;
    throw ParameterError(msg.str());
  }
  return theta * q / c_const(pi_thr, B, theta);
}

E3Detail pfer_bound_e3_detail(int p, double theta, double pi_thr, int B) {
  if (p < 1) throw ParameterError("p must be at least 1");
  if (!on_grid(pi_thr, B)) {
    std::ostringstream msg;
    msg << "cutoff " << pi_thr << " is not on the grid 1/2 + k/(2B) for B = " << B;
    throw ParameterError(msg.str());
  }
  E3Detail d{};
  d.d_simultaneous = min_D(2.0 * pi_thr - 1.0, theta * theta, B, -0.5);
  d.d_marginal = min_D(pi_thr, theta, 2 * B, -0.25);
  d.per_low_variable = std::min(d.d_simultaneous, d.d_marginal);
  d.bound = d.per_low_variable * p;
  return d;
}

double pfer_bound_e3(int p, double theta, double pi_thr, int B) {
  return pfer_bound_e3_detail(p, theta, pi_thr, B).bound;
}

double pfer_bound(Assumption assumption, int q, int p, double pi_thr, int B) {
  check_q(q, p);
  const double theta = static_cast<double>(q) / p;
  switch (assumption) {
    case Assumption::none: return pfer_bound_e1(q, theta, pi_thr);
    case Assumption::unimodal: return pfer_bound_e2(q, theta, pi_thr, B);
    case Assumption::r_concave: return pfer_bound_e3(p, theta, pi_thr, B);
  }
  throw ParameterError("unknown assumption");
}

double ParamSolution::pcer() const { return p > 0 ? realized_bound / p : 0.0; }

namespace {

// Whether (q, pi) is inside the domain of the bound for this assumption.
bool admissible(Assumption assumption, int q, int p, double pi_thr, int B) {
  if (assumption != Assumption::unimodal) return true;
  const double theta = static_cast<double>(q) / p;
  return theta <= kThetaMaxUnimodal + 1e-12 && (pi_thr > 0.75 || pi_thr > c_min(theta, B));
}

void solve_cutoff(ParamSolution& s) {
  const int q = s.q;
  const int p = s.p;
  const int B = s.B;
  const double target = s.pfer_max;

  if (s.assumption == Assumption::none) {
    const double theta = static_cast<double>(q) / p;
    double pi = 0.5 * (theta * q / target + 1.0);
    if (pi > 1.0) {
      s.pi_thr = 1.0;
      s.attainable = false;
    } else {
      s.pi_thr = pi;
    }
    s.realized_bound = pfer_bound(s.assumption, q, p, s.pi_thr, B);
    return;
  }

  if (s.assumption == Assumption::unimodal) {
    const double theta = static_cast<double>(q) / p;
    if (theta > kThetaMaxUnimodal + 1e-12) {
      std::ostringstream msg;
      msg << "unimodal bound needs q/p <= 1/sqrt(3); q = " << q << ", p = " << p;
      throw ParameterError(msg.str());
    }
    for (int k = 2; k <= B; ++k) {
      const double pi = grid_value(k, B);
      if (!admissible(s.assumption, q, p, pi, B)) continue;
      if (pfer_bound(s.assumption, q, p, pi, B) <= target) {
        s.pi_thr = pi;
        s.realized_bound = pfer_bound(s.assumption, q, p, pi, B);
        return;
      }
    }
    s.pi_thr = 1.0;
    s.attainable = false;
    s.realized_bound = pfer_bound(s.assumption, q, p, 1.0, B);
    return;
  }

  // r-concave: the bound is non-increasing in the cutoff; bisect on k.
  auto bound_at = [&](int k) { return pfer_bound(s.assumption, q, p, grid_value(k, B), B); };
  if (bound_at(B) > target) {
    s.pi_thr = 1.0;
    s.attainable = false;
    s.realized_bound = bound_at(B);
    return;
  }
  int lo = 1;  // bound_at(lo) treated as failing
  int hi = B;  // bound_at(hi) <= target
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    if (mid >= 2 && bound_at(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  s.pi_thr = grid_value(hi, B);
  s.realized_bound = bound_at(hi);
}

void solve_q(ParamSolution& s) {
  const int p = s.p;
  const int B = s.B;
  const double pi = s.pi_thr;
  const double target = s.pfer_max;
  auto ok = [&](int q) {
    return admissible(s.assumption, q, p, pi, B) &&
           pfer_bound(s.assumption, q, p, pi, B) <= target;
  };

  int best = 0;
  if (s.assumption == Assumption::none) {
    const double approx = std::sqrt(target * (2.0 * pi - 1.0) * p);
    int q = static_cast<int>(std::clamp(std::floor(approx), 0.0, static_cast<double>(p)));
    while (q < p && ok(q + 1)) ++q;
    while (q >= 1 && !ok(q)) --q;
    best = q;
  } else if (s.assumption == Assumption::unimodal) {
    for (int q = 1; q <= p && ok(q); ++q) best = q;
  } else {
    // non-decreasing in q: largest q with bound <= target
    if (ok(1)) {
      int lo = 1;
      int hi = p + 1;
      while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (ok(mid) ? lo : hi) = mid;
      }
      best = lo;
    }
  }

  if (best < 1) {
    s.q = 1;
    s.attainable = false;
    if (admissible(s.assumption, 1, p, pi, B)) {
      s.realized_bound = pfer_bound(s.assumption, 1, p, pi, B);
    } else {
      throw ParameterError("no q >= 1 is admissible for the unimodal bound at cutoff " +
                           fmt(pi));
    }
    return;
  }
  s.q = best;
  s.realized_bound = pfer_bound(s.assumption, best, p, pi, B);
}

}  // namespace

ParamSolution solve_params(const ParamRequest& request) {
  const int given = static_cast<int>(request.q.has_value()) +
                    static_cast<int>(request.pi_thr.has_value()) +
                    static_cast<int>(request.pfer_max.has_value());
  if (given != 2)
    throw ParameterError("specify exactly two of q, cutoff and PFER (got " +
                         std::to_string(given) + ")");
  if (request.p < 1) throw ParameterError("p must be at least 1");
  if (request.B < 2) throw ParameterError("B must be at least 2");
  if (request.q) check_q(*request.q, request.p);
  if (request.pi_thr) check_cutoff(*request.pi_thr);
  if (request.pfer_max && !(*request.pfer_max > 0.0))
    throw ParameterError("PFER must be positive");

  ParamSolution s;
  s.p = request.p;
  s.B = request.B;
  s.assumption = request.assumption;

  const bool gridded = request.assumption != Assumption::none;
  if (request.pi_thr) {
    s.pi_thr = *request.pi_thr;
    if (gridded) {
      const auto snapped = validate_grid(s.pi_thr, s.B);
      if (snapped.adjusted) {
        s.warnings.push_back("cutoff " + fmt(s.pi_thr) + " rounded up to grid value " +
                             fmt(snapped.value) + " (B = " + std::to_string(s.B) + ")");
      }
      s.pi_thr = snapped.value;
    }
  }

  if (request.q && request.pfer_max) {
    s.q = *request.q;
    s.pfer_max = *request.pfer_max;
    solve_cutoff(s);
    if (!s.attainable) {
      s.warnings.push_back("bound not attainable; realized PFER bound = " +
                           fmt(s.realized_bound) + " at cutoff 1");
    }
  } else if (request.pi_thr && request.pfer_max) {
    s.pfer_max = *request.pfer_max;
    solve_q(s);
    if (!s.attainable) {
      s.warnings.push_back("bound not attainable; realized PFER bound = " +
                           fmt(s.realized_bound) + " at q = 1");
    }
  } else {
    s.q = *request.q;
    s.realized_bound = pfer_bound(s.assumption, s.q, s.p, s.pi_thr, s.B);
    s.pfer_max = s.realized_bound;
  }
  return s;
}

}  // namespace stabkit::bounds
