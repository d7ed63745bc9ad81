#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stabkit::bounds {

/// Distributional assumption behind the error bound:
/// none (worst case), unimodal or r-concave simultaneous selection frequencies.
enum class Assumption { none, unimodal, r_concave };

std::string_view to_string(Assumption assumption);

/// Accepts none/unimodal/r-concave (also r_concave, rconcave, E1/E2/E3).
Assumption parse_assumption(std::string_view name);

/// q^2 / ((2 pi_thr - 1) p).
double pfer_bound_mb(int q, int p, double pi_thr);

/// theta q / (2 pi_thr - 1). Equals pfer_bound_mb when theta = q/p.
double pfer_bound_e1(int q, double theta, double pi_thr);

/// min(1/2 + theta^2, 1/2 + 1/(2B) + 3 theta^2 / 4).
double c_min(double theta, int B);

/// Piecewise constant of the unimodal bound: first piece on (c_min, 3/4],
/// second on (3/4, 1]. Throws ParameterError when theta > 1/sqrt(3) or
/// pi_thr <= min(c_min(theta, B), 3/4). The pieces do not meet at 3/4.
double c_const(double pi_thr, int B, double theta);

/// theta q / c_const(pi_thr, B, theta). pi_thr must lie on the B-grid.
double pfer_bound_e2(int q, double theta, double pi_thr, int B);

struct GridValue {
  double value;
  bool adjusted;
};

/// Snaps pi_thr up to the grid {1/2 + k/(2B) : k = 2..B}.
GridValue validate_grid(double pi_thr, int B);

/// true when pi_thr is one of the grid values (tolerance 1e-9).
bool on_grid(double pi_thr, int B);

/// Largest P(X >= xi) over r-concave X supported on {0, 1/B, ..., 1} with
/// E(X) <= theta. Requires r < 0, theta in (0,1), xi in (0,1], B >= 2.
double min_D(double xi, double theta, int B, double r);

struct E3Detail {
  /// D(2 pi_thr - 1; theta^2, B, -1/2).
  double d_simultaneous;
  /// D(pi_thr; theta, 2B, -1/4).
  double d_marginal;
  /// min of the two; multiply by |L_theta| for the sharper form.
  double per_low_variable;
  /// per_low_variable * p.
  double bound;
};

E3Detail pfer_bound_e3_detail(int p, double theta, double pi_thr, int B);

/// min{ D(2 pi_thr - 1; theta^2, B, -1/2), D(pi_thr; theta, 2B, -1/4) } * p.
double pfer_bound_e3(int p, double theta, double pi_thr, int B);

/// Bound for the given assumption with theta = q/p.
double pfer_bound(Assumption assumption, int q, int p, double pi_thr, int B);

struct ParamRequest {
  std::optional<int> q;
  std::optional<double> pi_thr;
  std::optional<double> pfer_max;
  int p = 0;
  int B = 50;
  Assumption assumption = Assumption::none;
};

struct ParamSolution {
  int q = 0;
  double pi_thr = 0.0;
  double pfer_max = 0.0;
  double realized_bound = 0.0;
  int p = 0;
  int B = 0;
  Assumption assumption = Assumption::none;
  /// false when the requested PFER_max cannot be met; see warnings.
  bool attainable = true;
  std::vector<std::string> warnings;

  /// Per-comparison error rate implied by the realized bound (bound / p).
  double pcer() const;
};

/// Fills in the missing one of {q, pi_thr, pfer_max}. Exactly two must be
/// given. pi_thr results are rounded up to the B-grid under the unimodal and
/// r-concave assumptions; q results are the largest admissible integer.
/// When no pi_thr <= 1 (or no q >= 1) reaches pfer_max the boundary value is
/// returned with attainable = false.
ParamSolution solve_params(const ParamRequest& request);

}  // namespace stabkit::bounds
