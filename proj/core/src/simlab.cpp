#include "stabkit/simlab.hpp"

#include "stabkit/csv.hpp"
#include "stabkit/data.hpp"
#include "stabkit/error.hpp"
#include "stabkit/parallel.hpp"
#include "stabkit/seeding.hpp"
#include "stabkit/stabsel.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <tuple>

namespace stabkit::simlab {

std::string_view to_string(DesignKind kind) {
  return kind == DesignKind::independent ? "independent" : "toeplitz";
}

DesignKind parse_design(std::string_view name) {
  if (name == "independent") return DesignKind::independent;
  if (name == "toeplitz") return DesignKind::toeplitz;
  throw ParameterError("unknown design '" + std::string(name) +
                       "' (expected independent or toeplitz)");
}

Eigen::MatrixXd covariance(int p, const Design& design) {
  if (design.kind == DesignKind::independent) return Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd sigma(p, p);
  for (int k = 0; k < p; ++k)
    for (int l = 0; l < p; ++l) sigma(k, l) = std::pow(design.rho, std::abs(k - l));
  return sigma;
}

Eigen::MatrixXd gen_design(int n, int p, const Design& design, std::uint64_t seed) {
  if (n < 1 || p < 1) throw ParameterError("gen_design: n and p must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd Z(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) Z(i, j) = normal(rng);
  if (design.kind == DesignKind::independent) return Z;

  Eigen::LLT<Eigen::MatrixXd> llt(covariance(p, design));
  if (llt.info() != Eigen::Success)
    throw Error("gen_design: covariance matrix is not positive definite");
  // rows z' L' have covariance L L' = Sigma
  return Z * llt.matrixL().transpose();
}

Response gen_response(const Eigen::MatrixXd& X, int p_infl, std::uint64_t seed) {
  const int p = static_cast<int>(X.cols());
  if (p_infl < 0 || p_infl > p) throw ParameterError("gen_response: p_infl must lie in [0, p]");
  std::mt19937_64 rng(seed);

  std::vector<int> pool(static_cast<std::size_t>(p));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < p_infl; ++i) {
    std::uniform_int_distribution<int> pick(i, p - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  Response out;
  out.signal.assign(pool.begin(), pool.begin() + p_infl);
  std::sort(out.signal.begin(), out.signal.end());

  out.beta = Eigen::VectorXd::Zero(p);
  std::bernoulli_distribution coin(0.5);
  for (int j : out.signal) out.beta[j] = coin(rng) ? 1.0 : -1.0;

  const Eigen::VectorXd eta = X * out.beta;
  out.y.resize(X.rows());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Eigen::Index i = 0; i < X.rows(); ++i) out.y[i] = unif(rng) < logistic(eta[i]) ? 1.0 : 0.0;
  return out;
}

int default_B(bounds::Assumption assumption) {
  return assumption == bounds::Assumption::none ? 100 : 50;
}

void SimSetting::validate() const {
  if (n < 4) throw ParameterError("simulation needs n >= 4");
  if (p < 1) throw ParameterError("simulation needs p >= 1");
  if (p_infl < 0 || p_infl > p) throw ParameterError("p_infl must lie in [0, p]");
  if (replicates < 1) throw ParameterError("replicates must be at least 1");
  if (B < 2) throw ParameterError("B must be at least 2");
  if (!(pi_thr > 0.5 && pi_thr <= 1.0)) throw ParameterError("pi_thr must lie in (0.5, 1]");
  if (!(pfer_max > 0.0)) throw ParameterError("pfer_max must be positive");
  if (design.kind == DesignKind::toeplitz && !(std::abs(design.rho) < 1.0))
    throw ParameterError("toeplitz rho must lie in (-1, 1)");
}

std::string SimSetting::key() const {
  std::ostringstream out;
  out << "design=" << to_string(design.kind);
  if (design.kind == DesignKind::toeplitz) out << "(" << design.rho << ")";
  out << " n=" << n << " p=" << p << " p_infl=" << p_infl
      << " assumption=" << bounds::to_string(assumption) << " pfer_max=" << pfer_max
      << " pi_thr=" << pi_thr;
  return out.str();
}

ReplicateRecord score(std::span<const int> stable_set, std::span<const int> signal) {
  ReplicateRecord rec;
  rec.n_stable = static_cast<int>(stable_set.size());
  int hits = 0;
  for (int j : stable_set) {
    if (std::find(signal.begin(), signal.end(), j) != signal.end()) {
      ++hits;
    } else {
      ++rec.fp;
    }
  }
  if (!signal.empty()) rec.tpr = static_cast<double>(hits) / static_cast<double>(signal.size());
  return rec;
}

namespace {

std::uint64_t data_seed(const SimSetting& s, int replicate) {
  return derive_seed(s.seed, {0x64617461ULL, static_cast<std::uint64_t>(s.design.kind),
                              std::bit_cast<std::uint64_t>(s.design.rho),
                              static_cast<std::uint64_t>(s.n), static_cast<std::uint64_t>(s.p),
                              static_cast<std::uint64_t>(s.p_infl),
                              static_cast<std::uint64_t>(replicate)});
}

}  // namespace

SimResult run_setting(const SimSetting& setting, unsigned threads) {
  setting.validate();

  bounds::ParamRequest request;
  request.pi_thr = setting.pi_thr;
  request.pfer_max = setting.pfer_max;
  request.p = setting.p;
  request.B = setting.B;
  request.assumption = setting.assumption;
  const auto params = bounds::solve_params(request);

  SimResult result;
  result.setting = setting;
  result.q = params.q;
  result.pi_thr_used = params.pi_thr;
  result.realized_bound = params.realized_bound;
  result.replicates.resize(static_cast<std::size_t>(setting.replicates));

  const auto scheme = setting.assumption == bounds::Assumption::none
                          ? stabsel::SamplingScheme::subsample(setting.B)
                          : stabsel::SamplingScheme::complementary_pairs(setting.B);

  parallel_for(result.replicates.size(), threads ? threads : default_threads(),
               [&](std::size_t r) {
    const int rep = static_cast<int>(r) + 1;
    try {
      const std::uint64_t seed = data_seed(setting, rep);
      Eigen::MatrixXd X = gen_design(setting.n, setting.p, setting.design, derive_seed(seed, {1}));
      Response resp = gen_response(X, setting.p_infl, derive_seed(seed, {2}));
      std::vector<std::string> names(static_cast<std::size_t>(setting.p));
      for (int j = 0; j < setting.p; ++j) names[static_cast<std::size_t>(j)] = "x" + std::to_string(j + 1);
      const Dataset data(std::move(X), std::move(resp.y), std::move(names), Family::binomial);

      stabsel::StabSelConfig cfg;
      cfg.q = params.q;
      cfg.pi_thr = params.pi_thr;
      cfg.scheme = scheme;
      cfg.seed = derive_seed(seed, {3});
      cfg.boost.nu = setting.nu;
      cfg.boost.m_max = setting.m_max;
      cfg.threads = 1;
      const auto sel = stabsel::run(data, cfg);

      ReplicateRecord rec = score(sel.stable_set, resp.signal);
      rec.replicate = rep;
      result.replicates[r] = rec;
    } catch (const Error& e) {
      throw Error(setting.key() + ", replicate " + std::to_string(rep) + ": " + e.what());
    }
  });

  double fp_sum = 0.0;
  double tpr_sum = 0.0;
  int tpr_count = 0;
  for (const auto& rec : result.replicates) {
    fp_sum += rec.fp;
    if (rec.tpr) {
      tpr_sum += *rec.tpr;
      ++tpr_count;
    }
  }
  result.mean_fp = fp_sum / setting.replicates;
  if (tpr_count > 0) result.mean_tpr = tpr_sum / tpr_count;
  result.violated = result.mean_fp > setting.pfer_max;
  return result;
}

namespace {

std::string path_of(const std::string& key, std::size_t index, bool is_list) {
  return is_list ? key + "[" + std::to_string(index) + "]" : key;
}

// Values of one key as a list, with the key path of each element.
std::vector<std::pair<std::string, config::Value>> elements(const std::string& path,
                                                            const config::Value& v) {
  std::vector<std::pair<std::string, config::Value>> out;
  if (const auto* arr = std::get_if<config::Array>(&v.data)) {
    if (arr->empty()) throw ConfigError(path + ": list must not be empty");
    for (std::size_t i = 0; i < arr->size(); ++i) out.emplace_back(path_of(path, i, true), (*arr)[i]);
  } else {
    out.emplace_back(path, v);
  }
  return out;
}

int to_int(const std::string& path, const config::Value& v, int lo, int hi) {
  const auto* i = std::get_if<std::int64_t>(&v.data);
  if (!i) throw ConfigError(path + ": expected an integer");
  if (*i < lo || *i > hi) {
    throw ConfigError(path + ": value " + std::to_string(*i) + " out of range [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(*i);
}

double to_real(const std::string& path, const config::Value& v) {
  if (!v.is_number()) throw ConfigError(path + ": expected a number");
  return v.as_double();
}

std::string to_str(const std::string& path, const config::Value& v) {
  const auto* s = std::get_if<std::string>(&v.data);
  if (!s) throw ConfigError(path + ": expected a string");
  return *s;
}

const config::Value* scalar_only(const std::string& path, const config::Value& v) {
  if (std::holds_alternative<config::Array>(v.data))
    throw ConfigError(path + ": expected a single value, not a list");
  return &v;
}

}  // namespace

GridSpec parse_grid(const config::Document& doc) {
  GridSpec g;
  constexpr int kMaxInt = 1 << 30;
  for (const auto& [full, value] : doc) {
    const std::string key = full.starts_with("grid.") ? full.substr(5) : full;
    if (key == "n" || key == "p" || key == "p_infl") {
      std::vector<int> list;
      for (const auto& [path, v] : elements(full, value))
        list.push_back(to_int(path, v, key == "n" ? 4 : (key == "p" ? 1 : 0), kMaxInt));
      (key == "n" ? g.n : key == "p" ? g.p : g.p_infl) = list;
    } else if (key == "design") {
      g.design.clear();
      for (const auto& [path, v] : elements(full, value)) {
        const auto name = to_str(path, v);
        try {
          g.design.push_back(parse_design(name));
        } catch (const ParameterError&) {
          throw ConfigError(path + ": unknown design '" + name + "'");
        }
      }
    } else if (key == "assumption") {
      g.assumption.clear();
      for (const auto& [path, v] : elements(full, value)) {
        const auto name = to_str(path, v);
        try {
          g.assumption.push_back(bounds::parse_assumption(name));
        } catch (const ParameterError&) {
          throw ConfigError(path + ": unknown assumption '" + name + "'");
        }
      }
    } else if (key == "pi_thr" || key == "cutoff") {
      g.pi_thr.clear();
      for (const auto& [path, v] : elements(full, value)) {
        const double x = to_real(path, v);
        if (!(x > 0.5 && x <= 1.0)) throw ConfigError(path + ": cutoff must lie in (0.5, 1]");
        g.pi_thr.push_back(x);
      }
    } else if (key == "pfer_max" || key == "pfer") {
      g.pfer_max.clear();
      for (const auto& [path, v] : elements(full, value)) {
        const double x = to_real(path, v);
        if (!(x > 0.0)) throw ConfigError(path + ": PFER must be positive");
        g.pfer_max.push_back(x);
      }
    } else if (key == "rho") {
      g.rho = to_real(full, *scalar_only(full, value));
      if (!(std::abs(g.rho) < 1.0)) throw ConfigError(full + ": rho must lie in (-1, 1)");
    } else if (key == "replicates") {
      g.replicates = to_int(full, *scalar_only(full, value), 1, kMaxInt);
    } else if (key == "B_subsample") {
      g.B_subsample = to_int(full, *scalar_only(full, value), 2, kMaxInt);
    } else if (key == "B_pairs") {
      g.B_pairs = to_int(full, *scalar_only(full, value), 2, kMaxInt);
    } else if (key == "nu") {
      g.nu = to_real(full, *scalar_only(full, value));
      if (!(g.nu > 0.0 && g.nu <= 1.0)) throw ConfigError(full + ": nu must lie in (0, 1]");
    } else if (key == "m_max") {
      g.m_max = to_int(full, *scalar_only(full, value), 1, kMaxInt);
    } else if (key == "seed") {
      const auto* i = std::get_if<std::int64_t>(&scalar_only(full, value)->data);
      if (!i || *i < 0) throw ConfigError(full + ": seed must be a non-negative integer");
      g.seed = static_cast<std::uint64_t>(*i);
    } else {
      throw ConfigError(full + ": unknown key");
    }
  }
  return g;
}

GridSpec parse_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataError::Kind::missing_file, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_grid(config::parse_toml(buf.str()));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

namespace {

auto sort_key(const SimSetting& s) {
  return std::make_tuple(static_cast<int>(s.design.kind), s.n, s.p, s.p_infl,
                         static_cast<int>(s.assumption), s.pfer_max, s.pi_thr);
}

}  // namespace

std::vector<SimSetting> expand(const GridSpec& grid, std::uint64_t master_seed) {
  std::vector<SimSetting> out;
  for (auto design : grid.design)
    for (int n : grid.n)
      for (int p : grid.p)
        for (int p_infl : grid.p_infl)
          for (auto assumption : grid.assumption)
            for (double pfer : grid.pfer_max)
              for (double pi : grid.pi_thr) {
                SimSetting s;
                s.design = {design, grid.rho};
                s.n = n;
                s.p = p;
                s.p_infl = p_infl;
                s.assumption = assumption;
                s.pfer_max = pfer;
                s.pi_thr = pi;
                s.B = assumption == bounds::Assumption::none ? grid.B_subsample : grid.B_pairs;
                s.replicates = grid.replicates;
                s.seed = master_seed;
                s.nu = grid.nu;
                s.m_max = grid.m_max;
                if (p_infl > p)
                  throw ConfigError("grid.p_infl: " + std::to_string(p_infl) +
                                    " exceeds p = " + std::to_string(p));
                out.push_back(s);
              }
  std::stable_sort(out.begin(), out.end(),
                   [](const SimSetting& a, const SimSetting& b) { return sort_key(a) < sort_key(b); });
  return out;
}

GridReport run_grid(const GridSpec& grid, std::uint64_t master_seed, unsigned threads) {
  GridReport report;
  for (const auto& setting : expand(grid, master_seed))
    report.results.push_back(run_setting(setting, threads));
  return report;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? csv::format_double(*v) : "NA"; }

}  // namespace

void write_reports(const GridReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto open = [&](const char* name) {
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) throw DataError(DataError::Kind::missing_file, "cannot write '" + (out_dir / name).string() + "'");
    return out;
  };
  using csv::format_double;

  {
    auto out = open("replicates.csv");
    csv::write_row(out, {"design", "n", "p", "p_infl", "assumption", "pi_thr", "pfer_max", "q",
                         "B", "replicate", "tpr", "fp", "n_stable"});
    for (const auto& res : report.results) {
      const auto& s = res.setting;
      for (const auto& rec : res.replicates) {
        csv::write_row(out, {std::string(to_string(s.design.kind)), std::to_string(s.n),
                             std::to_string(s.p), std::to_string(s.p_infl),
                             std::string(bounds::to_string(s.assumption)),
                             format_double(res.pi_thr_used), format_double(s.pfer_max),
                             std::to_string(res.q), std::to_string(s.B),
                             std::to_string(rec.replicate), opt(rec.tpr), std::to_string(rec.fp),
                             std::to_string(rec.n_stable)});
      }
    }
  }
  {
    auto out = open("settings.csv");
    csv::write_row(out, {"design", "rho", "n", "p", "p_infl", "assumption", "pi_thr",
                         "pi_thr_used", "pfer_max", "q", "B", "realized_bound", "replicates",
                         "mean_tpr", "mean_fp", "violated"});
    for (const auto& res : report.results) {
      const auto& s = res.setting;
      csv::write_row(out, {std::string(to_string(s.design.kind)),
                           s.design.kind == DesignKind::toeplitz ? format_double(s.design.rho) : "0",
                           std::to_string(s.n), std::to_string(s.p), std::to_string(s.p_infl),
                           std::string(bounds::to_string(s.assumption)), format_double(s.pi_thr),
                           format_double(res.pi_thr_used), format_double(s.pfer_max),
                           std::to_string(res.q), std::to_string(s.B),
                           format_double(res.realized_bound), std::to_string(s.replicates),
                           opt(res.mean_tpr), format_double(res.mean_fp),
                           res.violated ? "1" : "0"});
    }
  }
  {
    struct Group {
      int settings = 0;
      int violations = 0;
      double fp = 0.0;
      double tpr = 0.0;
      int tpr_count = 0;
    };
    std::map<std::tuple<int, double, int>, Group> groups;
    for (const auto& res : report.results) {
      const auto& s = res.setting;
      auto& g = groups[{static_cast<int>(s.design.kind), s.pfer_max, static_cast<int>(s.assumption)}];
      ++g.settings;
      g.violations += res.violated ? 1 : 0;
      g.fp += res.mean_fp;
      if (res.mean_tpr) {
        g.tpr += *res.mean_tpr;
        ++g.tpr_count;
      }
    }
    auto out = open("aggregate.csv");
    csv::write_row(out, {"design", "pfer_max", "assumption", "settings", "mean_tpr", "mean_fp",
                         "violations", "violation_fraction"});
    for (const auto& [key, g] : groups) {
      const auto& [design, pfer, assumption] = key;
      csv::write_row(out, {std::string(to_string(static_cast<DesignKind>(design))),
                           format_double(pfer),
                           std::string(bounds::to_string(static_cast<bounds::Assumption>(assumption))),
                           std::to_string(g.settings),
                           g.tpr_count ? format_double(g.tpr / g.tpr_count) : "NA",
                           format_double(g.fp / g.settings), std::to_string(g.violations),
                           format_double(static_cast<double>(g.violations) / g.settings)});
    }
  }
}

}  // namespace stabkit::simlab
