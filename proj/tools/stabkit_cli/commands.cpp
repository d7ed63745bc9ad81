#include "stabkit_cli/commands.hpp"

#include "stabkit/csv.hpp"
#include "stabkit/data.hpp"
#include "stabkit/error.hpp"
#include "stabkit/parallel.hpp"
#include "stabkit/simlab.hpp"

#include <CLI11.hpp>

#include <cassert>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>

namespace stabkit::cli {

namespace {

using nlohmann::json;

struct ParamFlags {
  std::optional<int> q;
  std::optional<double> cutoff;
  std::optional<double> pfer;
  std::string assumption = "none";
};

struct RunFlags {
  std::string data;
  std::string response;
  std::string family = "gaussian";
  ParamFlags params;
  std::optional<int> B;
  std::optional<std::string> scheme;
  std::optional<std::uint64_t> seed;
  double nu = 0.1;
  int m_max = 10000;
  unsigned threads = 0;
  std::string out;
  std::string paths;
};

struct SimulateFlags {
  std::string grid;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

void add_param_flags(CLI::App* sub, ParamFlags& f) {
  sub->add_option("--q", f.q, "Distinct base-learners selected per subsample fit");
  sub->add_option("--cutoff", f.cutoff, "Stability threshold pi_thr in (0.5, 1]");
  sub->add_option("--pfer", f.pfer, "Upper bound PFER_max on the per-family error rate");
  sub->add_option("--assumption", f.assumption, "none | unimodal | r-concave")
      ->capture_default_str();
}

void add_run_flags(CLI::App* sub, RunFlags& f) {
  sub->add_option("--data", f.data, "Input CSV with header row")->required();
  sub->add_option("--response", f.response, "Name of the response column")->required();
  sub->add_option("--family", f.family, "gaussian | binomial")->capture_default_str();
  add_param_flags(sub, f.params);
  sub->add_option("--B", f.B, "Subsamples (subsample) or pairs (complementary_pairs)");
  sub->add_option("--scheme", f.scheme, "subsample | complementary_pairs");
  sub->add_option("--seed", f.seed, "Master seed (else STABKIT_SEED, else a fixed default)");
  sub->add_option("--nu", f.nu, "Boosting step length")->capture_default_str();
  sub->add_option("--mstop", f.m_max, "Iteration cap per subsample fit")->capture_default_str();
  sub->add_option("--threads", f.threads, "Worker threads (0: STABKIT_THREADS or all cores)");
  sub->add_option("--out", f.out, "Write the JSON result here instead of stdout");
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag,
                           std::optional<std::uint64_t> fallback = std::nullopt) {
  if (flag) return *flag;
  if (const char* env = std::getenv("STABKIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ParameterError(std::string("STABKIT_SEED is not an unsigned integer: ") + env);
    }
  }
  return fallback.value_or(kDefaultSeed);
}

bounds::ParamRequest make_request(const ParamFlags& f, int p, int B) {
  bounds::ParamRequest req;
  req.q = f.q;
  req.pi_thr = f.cutoff;
  req.pfer_max = f.pfer;
  req.p = p;
  req.B = B;
  req.assumption = bounds::parse_assumption(f.assumption);
  return req;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError(DataError::Kind::missing_file, "cannot write '" + path + "'");
  file << text;
  if (!file) throw DataError(DataError::Kind::missing_file, "failed writing '" + path + "'");
}

int cmd_params(const ParamFlags& f, int p, int B, std::ostream& out) {
  const auto solution = bounds::solve_params(make_request(f, p, B));
  out << params_json(solution).dump(2) << '\n';
  return solution.attainable ? kOk : kNotAttainable;
}

struct RunOutcome {
  json result;
  stabsel::StabSelResult selection;
  std::vector<std::string> names;
};

RunOutcome execute_run(const RunFlags& f, std::ostream& err) {
  const Family family = parse_family(f.family);
  const auto assumption = bounds::parse_assumption(f.params.assumption);
  const auto kind = f.scheme ? stabsel::parse_scheme(*f.scheme)
                             : (assumption == bounds::Assumption::none
                                    ? stabsel::SchemeKind::subsample
                                    : stabsel::SchemeKind::complementary_pairs);
  const int B = f.B.value_or(kind == stabsel::SchemeKind::subsample ? 100 : 50);
  const std::uint64_t seed = resolve_seed(f.seed);
  err << "seed = " << seed << '\n';

  const Dataset data = load_csv(f.data, f.response, family);
  auto solution = bounds::solve_params(make_request(f.params, static_cast<int>(data.p()), B));
  if (assumption != bounds::Assumption::none && kind == stabsel::SchemeKind::subsample)
    solution.warnings.push_back("unimodal and r-concave bounds assume complementary pairs");

  stabsel::StabSelConfig cfg;
  cfg.q = solution.q;
  cfg.pi_thr = solution.pi_thr;
  cfg.scheme = {kind, B};
  cfg.seed = seed;
  cfg.boost.nu = f.nu;
  cfg.boost.m_max = f.m_max;
  cfg.threads = f.threads;
  auto sel = stabsel::run(data, cfg);

  const auto& names = data.col_names();
  json frequencies = json::array();
  for (Eigen::Index j = 0; j < data.p(); ++j) {
    json entry;
    entry["name"] = names[static_cast<std::size_t>(j)];
    entry["pi_hat"] = sel.pi_hat[j];
    entry["pi_tilde"] = sel.pi_tilde ? json((*sel.pi_tilde)[j]) : json(nullptr);
    entry["stable"] = sel.pi_hat[j] >= sel.pi_thr;
    frequencies.push_back(std::move(entry));
  }
  json stable = json::array();
  for (int j : sel.stable_set) stable.push_back(names[static_cast<std::size_t>(j)]);

  json result;
  result["stable_set"] = std::move(stable);
  result["frequencies"] = std::move(frequencies);
  result["realized_bound"] = solution.realized_bound;
  result["warnings"] = solution.warnings;
  result["parameters"] = {
      {"q", solution.q},
      {"pi_thr", solution.pi_thr},
      {"pfer_max", solution.pfer_max},
      {"assumption", std::string(bounds::to_string(assumption))},
      {"B", B},
      {"scheme", std::string(stabsel::to_string(kind))},
      {"n_fits", cfg.scheme.n_fits()},
      {"seed", seed},
      {"nu", f.nu},
      {"m_max", f.m_max},
      {"family", std::string(to_string(family))},
      {"response", f.response},
      {"n", data.n()},
      {"p", data.p()},
  };
  return {std::move(result), std::move(sel), names};
}

void emit_run(const RunFlags& f, const RunOutcome& outcome, std::ostream& out, std::ostream& err) {
  const std::string text = outcome.result.dump(2) + "\n";
  std::ostream& summary = f.out.empty() ? err : out;
  if (f.out.empty()) {
    out << text;
  } else {
    write_text(f.out, text);
  }
  summary << "stable set (" << outcome.selection.stable_set.size() << "):";
  for (int j : outcome.selection.stable_set)
    summary << ' ' << outcome.names[static_cast<std::size_t>(j)];
  summary << '\n';
}

void write_paths(const std::string& path, const RunOutcome& outcome) {
  std::ostringstream buf;
  csv::write_row(buf, {"base_learner", "iteration", "frequency"});
  for (const auto& row : stabsel::stability_paths(outcome.selection)) {
    csv::write_row(buf, {outcome.names[static_cast<std::size_t>(row.base_learner)],
                         std::to_string(row.iteration), csv::format_double(row.frequency)});
  }
  write_text(path, buf.str());
}

int cmd_simulate(const SimulateFlags& f, std::ostream& out, std::ostream& err) {
  const auto grid = simlab::parse_grid_file(f.grid);
  const std::uint64_t seed = resolve_seed(f.seed, grid.seed);
  err << "seed = " << seed << '\n';
  const auto report = simlab::run_grid(grid, seed, f.threads);
  simlab::write_reports(report, f.out);
  int violated = 0;
  for (const auto& r : report.results) violated += r.violated ? 1 : 0;
  out << report.results.size() << " settings, " << violated
      << " with mean FP above PFER_max; reports in " << f.out << '\n';
  return kOk;
}

}  // namespace

json params_json(const bounds::ParamSolution& s) {
  // PCER <= PFER ordering of the reported rates
  assert(s.pcer() <= s.realized_bound);
  return json{
      {"q", s.q},
      {"pi_thr", s.pi_thr},
      {"pfer_max", s.pfer_max},
      {"realized_bound", s.realized_bound},
      {"pcer", s.pcer()},
      {"assumption", std::string(bounds::to_string(s.assumption))},
      {"B", s.B},
      {"p", s.p},
      {"attainable", s.attainable},
      {"warnings", s.warnings},
  };
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Boosting with stability selection and PFER error control", "stabkit"};
  app.require_subcommand(1, 1);

  ParamFlags params;
  int params_p = 0;
  int params_B = 50;
  auto* sub_params = app.add_subcommand("params", "Solve for the missing one of q, cutoff, PFER");
  sub_params->add_option("--p", params_p, "Number of base-learners")->required();
  sub_params->add_option("--B", params_B, "Subsamples or complementary pairs")->capture_default_str();
  add_param_flags(sub_params, params);

  RunFlags run;
  auto* sub_run = app.add_subcommand("run", "Stability selection on a CSV data set");
  add_run_flags(sub_run, run);
  sub_run->add_option("--paths", run.paths, "Also write the stability paths CSV here");

  RunFlags paths;
  auto* sub_paths = app.add_subcommand("paths", "Export stability paths as long-format CSV");
  add_run_flags(sub_paths, paths);
  sub_paths->add_option("--paths", paths.paths, "Output CSV (base_learner,iteration,frequency)")
      ->required();

  SimulateFlags sim;
  auto* sub_sim = app.add_subcommand("simulate", "Run a simulation grid from a TOML file");
  sub_sim->add_option("--grid", sim.grid, "Grid configuration (TOML)")->required();
  sub_sim->add_option("--out", sim.out, "Output directory for the CSV reports")->required();
  sub_sim->add_option("--seed", sim.seed, "Master seed (else STABKIT_SEED, grid seed, default)");
  sub_sim->add_option("--threads", sim.threads, "Worker threads");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kParameterError;
  }

  try {
    if (sub_params->parsed()) return cmd_params(params, params_p, params_B, out);
    if (sub_run->parsed()) {
      const auto outcome = execute_run(run, err);
      emit_run(run, outcome, out, err);
      if (!run.paths.empty()) write_paths(run.paths, outcome);
      return kOk;
    }
    if (sub_paths->parsed()) {
      const auto outcome = execute_run(paths, err);
      write_paths(paths.paths, outcome);
      if (!paths.out.empty()) write_text(paths.out, outcome.result.dump(2) + "\n");
      err << "paths written to " << paths.paths << '\n';
      return kOk;
    }
    if (sub_sim->parsed()) return cmd_simulate(sim, out, err);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return kParameterError;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kParameterError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFitError;
  }
  return kParameterError;
}

}  // namespace stabkit::cli
