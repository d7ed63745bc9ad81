#include "stabkit/bounds.hpp"
#include "stabkit/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace stabkit::bounds;

double grid_point(int k, int B) { return 0.5 + static_cast<double>(k) / (2.0 * B); }

// Domain of the unimodal constant: (c_min, 3/4] for the first piece, (3/4, 1] for the second.
bool in_unimodal_domain(double theta, double pi, int B) {
  return theta <= 1.0 / std::sqrt(3.0) && (pi > 0.75 || pi > c_min(theta, B));
}

TEST(MeinshausenBuhlmann, Examples) {
  EXPECT_DOUBLE_EQ(pfer_bound_mb(10, 100, 0.6), 5.0);
  EXPECT_NEAR(pfer_bound_mb(10, 57, 1.0), 100.0 / 57.0, 1e-15);
  EXPECT_NEAR(pfer_bound_mb(10, 57, 1.0), 1.7544, 1e-4);
  EXPECT_DOUBLE_EQ(pfer_bound_mb(40, 40, 1.0), 40.0);
}

TEST(E1, Examples) {
  EXPECT_DOUBLE_EQ(pfer_bound_e1(10, 0.1, 0.6), 5.0);
  EXPECT_DOUBLE_EQ(pfer_bound_e1(10, 0.1, 0.6), pfer_bound_mb(10, 100, 0.6));
  EXPECT_DOUBLE_EQ(pfer_bound_e1(10, 0.1, 0.75), 2.0);
  EXPECT_LT(pfer_bound_e1(10, 1e-12, 0.75), 1e-10);
}

TEST(CConst, Examples) {
  EXPECT_NEAR(c_const(0.75, 50, 0.1), 0.98, 1e-12);
  EXPECT_NEAR(c_const(0.9, 50, 0.1), 1.02 / (4.0 * 0.11), 1e-12);
  EXPECT_NEAR(c_const(0.9, 50, 0.1), 2.31818, 1e-5);
}

TEST(CConst, JumpAtThreeQuarters) {
  const int B = 50;
  const double left = c_const(0.75, B, 0.1);
  const double right = c_const(std::nextafter(0.75, 1.0), B, 0.1);
  EXPECT_NEAR(left, 2.0 * (0.5 - 1.0 / (2.0 * B)), 1e-12);
  EXPECT_NEAR(right, (1.0 + 1.0 / B) / (4.0 * (0.25 + 1.0 / (2.0 * B))), 1e-12);
  EXPECT_NEAR(left, 0.98, 1e-12);
  EXPECT_NEAR(right, 0.980769230769, 1e-11);
  EXPECT_GT(right, left);
}

TEST(CConst, Preconditions) {
  EXPECT_THROW(c_const(0.9, 50, 0.6), stabkit::ParameterError);
  EXPECT_NEAR(c_min(0.1, 50), 0.51, 1e-12);
  EXPECT_NEAR(c_min(0.5, 50), std::min(0.75, 0.5 + 0.01 + 0.1875), 1e-12);
  EXPECT_THROW(c_const(0.51, 50, 0.1), stabkit::ParameterError);
  EXPECT_NO_THROW(c_const(0.52, 50, 0.1));
  // c_min only bounds the first piece; here c_min ~ 0.7597 > 3/4
  EXPECT_GT(c_min(0.577, 50), 0.75);
  EXPECT_THROW(c_const(0.75, 50, 0.577), stabkit::ParameterError);
  EXPECT_NO_THROW(c_const(0.755, 50, 0.577));
}

TEST(E2, Examples) {
  EXPECT_NEAR(pfer_bound_e2(10, 0.1, 0.75, 50), 1.0 / 0.98, 1e-12);
  EXPECT_NEAR(pfer_bound_e2(10, 0.1, 0.75, 50), 1.02041, 1e-5);
  EXPECT_NEAR(pfer_bound_e2(10, 0.1, 0.9, 50), 0.44 / 1.02, 1e-12);
  EXPECT_NEAR(pfer_bound_e2(10, 0.1, 0.9, 50), 0.43138, 1e-5);
  EXPECT_THROW(pfer_bound_e2(10, 0.1, 0.755, 50), stabkit::ParameterError);
}

TEST(E2, NeverAboveE1OnGrid) {
  const int B = 50;
  for (int q = 1; q <= 30; ++q) {
    const double theta = q / 100.0;
    if (theta > 1.0 / std::sqrt(3.0)) break;
    for (int k = 2; k <= B; ++k) {
      const double pi = grid_point(k, B);
      if (!in_unimodal_domain(theta, pi, B)) continue;
      EXPECT_LE(pfer_bound_e2(q, theta, pi, B), pfer_bound_e1(q, theta, pi) + 1e-12)
          << "q=" << q << " pi=" << pi;
    }
  }
}

TEST(Grid, Snapping) {
  auto g = validate_grid(0.6, 50);
  EXPECT_DOUBLE_EQ(g.value, 0.6);
  EXPECT_FALSE(g.adjusted);
  g = validate_grid(0.601, 50);
  EXPECT_NEAR(g.value, 0.61, 1e-12);
  EXPECT_TRUE(g.adjusted);
  g = validate_grid(0.505, 100);
  EXPECT_NEAR(g.value, 0.51, 1e-12);
  EXPECT_TRUE(g.adjusted);
  EXPECT_TRUE(on_grid(0.87, 50));
  EXPECT_FALSE(on_grid(0.875, 50));
  EXPECT_THROW(validate_grid(1.01, 50), stabkit::ParameterError);
}

TEST(MinD, TrivialRegime) {
  EXPECT_DOUBLE_EQ(min_D(0.2, 0.3, 10, -0.5), 1.0);
  EXPECT_DOUBLE_EQ(min_D(0.5, 0.5, 4, -0.25), 1.0);
}

TEST(MinD, MonotoneSpotCheck) {
  EXPECT_GE(min_D(0.9, 0.1, 50, -0.5), min_D(1.0, 0.1, 50, -0.5));
}

TEST(MinD, RangeAndMonotonicity) {
  for (int B : {5, 20, 50}) {
    for (double r : {-0.5, -0.25}) {
      for (double theta : {0.05, 0.2, 0.4}) {
        double previous = 1.0;
        for (int k = 1; k <= B; ++k) {
          const double xi = static_cast<double>(k) / B;
          const double d = min_D(xi, theta, B, r);
          EXPECT_GE(d, 0.0);
          EXPECT_LE(d, 1.0);
          EXPECT_LE(d, previous + 1e-9) << "B=" << B << " xi=" << xi;
          // Markov's inequality caps every distribution with mean <= theta
          EXPECT_LE(d, std::min(1.0, theta / xi) + 1e-9);
          previous = d;
        }
      }
    }
  }
  for (double theta : {0.05, 0.1, 0.2, 0.3}) {
    EXPECT_LE(min_D(0.8, theta, 20, -0.5), min_D(0.8, theta + 0.05, 20, -0.5) + 1e-9);
  }
}

TEST(MinD, MoreNegativeRIsLessRestrictive) {
  // r-concavity for r1 < r2 < 0 is implied by r2-concavity
  for (double xi : {0.5, 0.7, 0.9}) {
    EXPECT_LE(min_D(xi, 0.1, 20, -0.25), min_D(xi, 0.1, 20, -0.5) + 1e-6);
  }
}

TEST(MinD, Preconditions) {
  EXPECT_THROW(min_D(0.5, 0.1, 10, 0.5), stabkit::ParameterError);
  EXPECT_THROW(min_D(0.5, 1.5, 10, -0.5), stabkit::ParameterError);
  EXPECT_THROW(min_D(0.0, 0.1, 10, -0.5), stabkit::ParameterError);
  EXPECT_THROW(min_D(0.5, 0.1, 1, -0.5), stabkit::ParameterError);
}

TEST(E3, Examples) {
  EXPECT_LE(pfer_bound_e3(57, 10.0 / 57.0, 0.69, 50), 1.0);
  EXPECT_GT(pfer_bound_e3(57, 10.0 / 57.0, 0.68, 50), 1.0);
  // both D arguments below their means
  EXPECT_DOUBLE_EQ(pfer_bound_e3(20, 0.75, 0.52, 50), 20.0);
  const double e1 = pfer_bound_e1(10, 0.1, 0.9);
  const double e2 = pfer_bound_e2(10, 0.1, 0.9, 50);
  const double e3 = pfer_bound_e3(100, 0.1, 0.9, 50);
  EXPECT_LE(e3, e2);
  EXPECT_LE(e2, e1);
}

TEST(E3, DetailConsistent) {
  const auto d = pfer_bound_e3_detail(100, 0.1, 0.8, 50);
  EXPECT_DOUBLE_EQ(d.per_low_variable, std::min(d.d_simultaneous, d.d_marginal));
  EXPECT_DOUBLE_EQ(d.bound, 100.0 * d.per_low_variable);
  EXPECT_NEAR(d.d_simultaneous, min_D(0.6, 0.01, 50, -0.5), 1e-15);
  EXPECT_NEAR(d.d_marginal, min_D(0.8, 0.1, 100, -0.25), 1e-15);
}

TEST(Bounds, OrderingOverRandomAdmissibleTuples) {
  std::mt19937_64 rng(2014);
  std::uniform_int_distribution<int> pd(10, 1000);
  const int Bs[] = {10, 25, 50, 100};
  int checked = 0;
  while (checked < 200) {
    const int p = pd(rng);
    const int B = Bs[rng() % 4];
    const int q = 1 + static_cast<int>(rng() % static_cast<unsigned>(p));
    const double theta = static_cast<double>(q) / p;
    if (theta > 1.0 / std::sqrt(3.0)) continue;
    const int k = 2 + static_cast<int>(rng() % static_cast<unsigned>(B - 1));
    const double pi = grid_point(k, B);
    if (!in_unimodal_domain(theta, pi, B)) continue;
    const double e1 = pfer_bound_e1(q, theta, pi);
    const double mb = pfer_bound_mb(q, p, pi);
    const double e2 = pfer_bound_e2(q, theta, pi, B);
    const double e3 = pfer_bound_e3(p, theta, pi, B);
    EXPECT_NEAR(e1, mb, 1e-12 * mb);
    EXPECT_LE(e2, e1 * (1 + 1e-12)) << "q=" << q << " p=" << p << " pi=" << pi << " B=" << B;
    EXPECT_LE(e3, e2 * (1 + 1e-9)) << "q=" << q << " p=" << p << " pi=" << pi << " B=" << B;
    ++checked;
  }
}

TEST(Bounds, DecreasingInCutoff) {
  const int B = 50;
  for (int q : {2, 5, 10}) {
    const int p = 60;
    const double theta = static_cast<double>(q) / p;
    double e1_prev = INFINITY, e2_prev = INFINITY, e3_prev = INFINITY, mb_prev = INFINITY;
    for (int k = 2; k <= B; ++k) {
      const double pi = grid_point(k, B);
      const double e1 = pfer_bound_e1(q, theta, pi);
      const double mb = pfer_bound_mb(q, p, pi);
      EXPECT_LT(e1, e1_prev);
      EXPECT_LT(mb, mb_prev);
      e1_prev = e1;
      mb_prev = mb;
      if (in_unimodal_domain(theta, pi, B)) {
        const double e2 = pfer_bound_e2(q, theta, pi, B);
        EXPECT_LT(e2, e2_prev) << "pi=" << pi;
        e2_prev = e2;
      }
      // strict once the tail problem is non-trivial; constant p before that
      const double e3 = pfer_bound_e3(p, theta, pi, B);
      EXPECT_LE(e3, e3_prev + 1e-12) << "pi=" << pi;
      if (e3 < p) EXPECT_LT(e3, e3_prev) << "pi=" << pi;
      e3_prev = e3;
    }
  }
}

TEST(Bounds, NonDecreasingInQ) {
  const int B = 50;
  const int p = 100;
  for (double pi : {0.7, 0.8, 0.9}) {
    double e2_prev = 0, e3_prev = 0;
    for (int q = 1; q <= 50; ++q) {
      const double theta = static_cast<double>(q) / p;
      EXPECT_LE(pfer_bound_e1(q, 0.1, pi), pfer_bound_e1(q + 1, 0.1, pi));
      EXPECT_LE(pfer_bound_mb(q, p, pi), pfer_bound_mb(q + 1, p, pi));
      if (in_unimodal_domain(theta, pi, B)) {
        const double e2 = pfer_bound_e2(q, theta, pi, B);
        EXPECT_GE(e2, e2_prev);
        e2_prev = e2;
        EXPECT_LE(pfer_bound_e2(q, 0.1, pi, B), pfer_bound_e2(q + 1, 0.1, pi, B));
      }
      const double e3 = pfer_bound_e3(p, theta, pi, B);
      EXPECT_GE(e3, e3_prev - 1e-12) << "q=" << q << " pi=" << pi;
      e3_prev = e3;
    }
  }
}

TEST(SolveParams, CaseStudy) {
  ParamRequest req;
  req.p = 57;
  req.q = 10;
  req.pfer_max = 1.0;
  req.B = 50;

  req.assumption = Assumption::unimodal;
  auto s = solve_params(req);
  EXPECT_NEAR(s.pi_thr, 0.87, 1e-12);
  EXPECT_TRUE(s.attainable);

  req.assumption = Assumption::r_concave;
  s = solve_params(req);
  EXPECT_NEAR(s.pi_thr, 0.69, 1e-12);
  EXPECT_TRUE(s.attainable);

  req.assumption = Assumption::none;
  s = solve_params(req);
  EXPECT_DOUBLE_EQ(s.pi_thr, 1.0);
  EXPECT_FALSE(s.attainable);
  ASSERT_FALSE(s.warnings.empty());
  EXPECT_NE(s.warnings.front().find("not attainable"), std::string::npos);
  EXPECT_NEAR(s.realized_bound, 100.0 / 57.0, 1e-12);
}

TEST(SolveParams, InputValidation) {
  ParamRequest req;
  req.p = 50;
  req.q = 5;
  EXPECT_THROW(solve_params(req), stabkit::ParameterError);
  req.pi_thr = 0.8;
  req.pfer_max = 1.0;
  EXPECT_THROW(solve_params(req), stabkit::ParameterError);
  req.pfer_max.reset();
  req.p = 0;
  EXPECT_THROW(solve_params(req), stabkit::ParameterError);
}

TEST(SolveParams, SolvesQ) {
  ParamRequest req;
  req.p = 100;
  req.pi_thr = 0.6;
  req.pfer_max = 1.0;
  auto s = solve_params(req);
  // largest q with q^2 / (0.2 * 100) <= 1
  EXPECT_EQ(s.q, 4);
  EXPECT_LE(s.realized_bound, 1.0);
}

TEST(SolveParams, SolvesPfer) {
  ParamRequest req;
  req.p = 100;
  req.q = 10;
  req.pi_thr = 0.9;
  req.assumption = Assumption::unimodal;
  auto s = solve_params(req);
  EXPECT_NEAR(s.pfer_max, pfer_bound_e2(10, 0.1, 0.9, 50), 1e-12);
  EXPECT_LE(s.pcer(), s.realized_bound);
}

TEST(SolveParams, RoundTrip) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> pd(20, 400);
  std::uniform_real_distribution<double> pferd(0.2, 5.0);
  const Assumption all[] = {Assumption::none, Assumption::unimodal, Assumption::r_concave};
  for (int rep = 0; rep < 45; ++rep) {
    ParamRequest req;
    req.p = pd(rng);
    req.B = rep % 3 == 0 ? 100 : 50;
    req.assumption = all[rep % 3];
    const double pfer = pferd(rng);
    if ((rep / 3) % 2 == 0) {
      req.q = 1 + static_cast<int>(rng() % static_cast<unsigned>(std::max(1, req.p / 10)));
      req.pfer_max = pfer;
      const auto s = solve_params(req);
      if (!s.attainable) continue;
      EXPECT_LE(pfer_bound(req.assumption, s.q, req.p, s.pi_thr, req.B), pfer + 1e-12);
      // previous grid point (or any lower cutoff for E1) must fail
      if (req.assumption != Assumption::none) {
        const double lower = s.pi_thr - 1.0 / (2.0 * req.B);
        const double theta = static_cast<double>(*req.q) / req.p;
        const bool lower_ok = lower > 0.5 + 1.0 / (2.0 * req.B) &&
                              (req.assumption != Assumption::unimodal || in_unimodal_domain(theta, lower, req.B));
        if (lower_ok)
          EXPECT_GT(pfer_bound(req.assumption, s.q, req.p, lower, req.B), pfer);
      }
    } else {
      const int k = 10 + static_cast<int>(rng() % static_cast<unsigned>(req.B - 10));
      req.pi_thr = 0.5 + static_cast<double>(k) / (2.0 * req.B);
      req.pfer_max = pfer;
      const auto s = solve_params(req);
      if (!s.attainable) continue;
      EXPECT_LE(pfer_bound(req.assumption, s.q, req.p, s.pi_thr, req.B), pfer + 1e-12);
      if (s.q < req.p) {
        const double theta = static_cast<double>(s.q + 1) / req.p;
        const bool next_ok = req.assumption != Assumption::unimodal ||
                             in_unimodal_domain(theta, s.pi_thr, req.B);
        if (next_ok)
          EXPECT_GT(pfer_bound(req.assumption, s.q + 1, req.p, s.pi_thr, req.B), pfer)
              << "p=" << req.p << " pi=" << s.pi_thr << " q=" << s.q;
      }
    }
  }
}

TEST(SolveParams, StrongerAssumptionsAllowLargerQ) {
  for (int p : {50, 100, 500}) {
    ParamRequest req;
    req.p = p;
    req.pi_thr = 0.75;
    req.pfer_max = 1.0;
    req.assumption = Assumption::none;
    const int q1 = solve_params(req).q;
    req.assumption = Assumption::unimodal;
    const int q2 = solve_params(req).q;
    req.assumption = Assumption::r_concave;
    const int q3 = solve_params(req).q;
    EXPECT_LE(q1, q2);
    EXPECT_LE(q2, q3);
  }
}

TEST(Assumption, Names) {
  EXPECT_EQ(to_string(Assumption::r_concave), "r-concave");
  EXPECT_EQ(parse_assumption("E2"), Assumption::unimodal);
  EXPECT_EQ(parse_assumption("r_concave"), Assumption::r_concave);
  EXPECT_THROW(parse_assumption("bogus"), stabkit::ParameterError);
}

}  // namespace
