// frontier_cli: estimate, select-k, pickands-plot, simulate, gen.
//
// Exit codes: 0 success, 1 input error (unreadable or malformed data),
// 2 inconsistent configuration. Per-x estimator failures are reported in
// the output's status/reason columns and never change the exit code.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "frontier/frontier.hpp"

namespace {

using namespace frontier;

constexpr int kExitInput = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string input;
  std::string scenario = "triangle";
  std::size_t n = 5000;
  std::size_t reps = 100;
  std::string x;
  std::string estimators;
  std::string rho = "pickands";
  std::optional<double> ell;
  std::string k = "auto";
  double level = 0.95;
  std::uint64_t seed = 1;
  std::string out;
  std::string plot_out;
  std::optional<double> pn;
  unsigned threads = 1;
};

Error config_error(const std::string& msg) { return Error(ErrorCode::ConfigError, msg); }

struct RhoPolicy {
  enum class Mode { Known, Pickands, Moment } mode = Mode::Pickands;
  double value = 0.0;
};

RhoPolicy parse_rho_policy(const std::string& s) {
  if (s == "pickands") return {RhoPolicy::Mode::Pickands, 0.0};
  if (s == "moment") return {RhoPolicy::Mode::Moment, 0.0};
  if (s.starts_with("known:")) {
    const double v = detail::parse_double_token(std::string_view(s).substr(6), "--rho");
    if (!(v > 0.0)) throw config_error("--rho known:<value> needs a value > 0");
    return {RhoPolicy::Mode::Known, v};
  }
  throw config_error("--rho must be known:<value>, pickands or moment");
}

/// Expands the short estimator names against --rho/--ell/--pn/--k; full
/// spec syntax (e.g. "knownrho:2@grid1") passes through unchanged.
EstimatorSpec resolve_estimator(std::string token, const RhoPolicy& rho, const Options& opt, KPolicy policy) {
  std::string suffix;
  if (const auto at = token.find('@'); at != std::string::npos) {
    suffix = token.substr(at);
    token = token.substr(0, at);
  }
  const bool known = rho.mode == RhoPolicy::Mode::Known;
  if (token == "knownrho") {
    if (known) {
      token = "knownrho:" + format_number(rho.value, 17);
    } else {
      token = rho.mode == RhoPolicy::Mode::Pickands ? "twostep-pickands" : "twostep-moment";
    }
  } else if (token == "knownell") {
    if (!known || !opt.ell) throw config_error("knownell needs --rho known:<value> and --ell");
    token = "knownell:" + format_number(rho.value, 17) + ":" + format_number(*opt.ell, 17);
  } else if (token == "xquantile" || token == "xq-pickands" || token == "xq-moment") {
    if (!opt.pn) throw config_error(token + " needs --pn");
    if (token == "xquantile") token = rho.mode == RhoPolicy::Mode::Moment ? "xq-moment" : "xq-pickands";
    token += ":" + format_number(*opt.pn, 17);
  } else if (token == "robust" && suffix.empty() && policy.mode == KPolicy::Mode::Auto) {
    suffix = "@k1";
  }
  return parse_estimator_spec(token + suffix, policy);
}

std::vector<EstimatorSpec> resolve_estimators(const std::string& list, const std::string& fallback,
                                              const Options& opt) {
  const auto rho = parse_rho_policy(opt.rho);
  if (opt.ell && rho.mode != RhoPolicy::Mode::Known) throw config_error("--ell requires --rho known:<value>");
  const auto policy = parse_k_policy(opt.k);
  std::vector<EstimatorSpec> out;
  for (auto tok : detail::split(list.empty() ? fallback : list, ',')) {
    if (tok.empty()) throw config_error("empty entry in --estimators");
    out.push_back(resolve_estimator(std::string(tok), rho, opt, policy));
  }
  return out;
}

/// "--x 0.25,0.5,1" for p = 1; "1,2;3,4" for p = 2. Without --x and p = 1, the
/// empirical quantiles of X at levels 0.05, 0.10, ..., 0.95.
std::vector<std::vector<double>> query_grid(const std::string& spec, const Dataset* ds, std::size_t p) {
  std::vector<std::vector<double>> grid;
  if (spec.empty()) {
    if (ds == nullptr || p != 1) throw config_error("--x is required when the input has p > 1");
    for (int i = 1; i <= 19; ++i) grid.push_back({marginal_quantile(*ds, 0.05 * i)});
    return grid;
  }
  const char point_sep = p == 1 ? ',' : ';';
  for (auto point : detail::split(spec, point_sep)) {
    std::vector<double> q;
    for (auto c : detail::split(point, ',')) q.push_back(detail::parse_double_token(c, "--x"));
    if (q.size() != p) {
      throw config_error("--x point '" + std::string(point) + "' has " + std::to_string(q.size()) +
                         " coordinates, input has p = " + std::to_string(p));
    }
    grid.push_back(std::move(q));
  }
  return grid;
}

std::string x_header(std::size_t p) {
  if (p == 1) return "x";
  std::string h;
  for (std::size_t j = 0; j < p; ++j) h += (j ? ",x" : "x") + std::to_string(j + 1);
  return h;
}

std::string x_cells(const std::vector<double>& q) {
  std::string s;
  for (std::size_t j = 0; j < q.size(); ++j) s += (j ? "," : "") + format_number(q[j]);
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
  f << text;
}

Dataset load_input(const Options& opt) {
  if (opt.input.empty()) throw config_error("--input is required");
  return parse_csv(opt.input);
}

int cmd_estimate(const Options& opt) {
  const auto ds = load_input(opt);
  const auto specs = resolve_estimators(opt.estimators, "fdh,robust,knownrho", opt);
  const auto grid = query_grid(opt.x, &ds, ds.input_dim());
  (void)two_sided_z(opt.level);

  std::ostringstream res;
  std::ostringstream plot;
  res << x_header(ds.input_dim()) << ",estimator,k,value,ci_lo,ci_hi,level,status,reason\n";
  plot << x_header(ds.input_dim()) << ",curve_id,y,band_lo,band_hi\n";
  for (const auto& q : grid) {
    const auto ts = transform(ds, q);
    for (const auto& spec : specs) {
      const auto o = evaluate_estimator(spec, ts, opt.level);
      const std::string lo = o.ci ? format_number(o.ci->lo) : "NA";
      const std::string hi = o.ci ? format_number(o.ci->hi) : "NA";
      res << x_cells(q) << ',' << spec.label() << ',' << (o.ok || o.k > 0 ? std::to_string(o.k) : "NA") << ','
          << (o.ok ? format_number(o.value) : "NA") << ',' << lo << ',' << hi << ',' << format_number(opt.level)
          << ',' << (o.ok ? "ok" : "failed") << ',' << csv_field(o.reason) << '\n';
      if (o.ok && !spec.targets_rho()) {
        plot << x_cells(q) << ',' << spec.label() << ',' << format_number(o.value) << ',' << lo << ',' << hi
             << '\n';
      }
    }
  }
  write_output(opt.out, res.str());
  if (!opt.plot_out.empty()) write_output(opt.plot_out, plot.str());
  return 0;
}

/// Stability-rule diagnostics for one estimator at one query point.
KSelection selection_for(const EstimatorSpec& spec, const TransformedSample& ts, double level) {
  using K = EstimatorKind;
  switch (spec.kind) {
    case K::PickandsRho: return select_k_pickands_rho(ts);
    case K::MomentRho: return select_k_moment_rho(ts);
    case K::PickandsStar: return select_k_frontier(ts, [&](std::size_t k) { return pickands_star(ts, k, level); });
    case K::MomentEndpoint:
      return select_k_frontier(ts, [&](std::size_t k) { return moment_endpoint(ts, k, level); });
    case K::KnownRhoStar:
      return select_k_frontier(ts, [&](std::size_t k) { return known_rho_star(ts, k, spec.rho, level); });
    case K::KnownEll:
      return select_k_frontier(ts, [&](std::size_t k) { return known_ell_ci(ts, k, spec.rho, spec.ell, level); });
    default: break;
  }
  throw config_error("select-k supports pickands-rho, moment-rho, pickands, moment, knownrho (known rho), knownell");
}

int cmd_select_k(const Options& opt) {
  const auto ds = load_input(opt);
  auto o = opt;
  o.k = "auto";
  const auto specs = resolve_estimators(opt.estimators, "pickands-rho,moment-rho", o);
  const auto grid = query_grid(opt.x, &ds, ds.input_dim());
  (void)two_sided_z(opt.level);
  for (const auto& spec : specs) {
    if (spec.kind == EstimatorKind::Fdh || spec.kind == EstimatorKind::Robust || spec.targets_high_quantile() ||
        spec.kind == EstimatorKind::TwoStepPickands || spec.kind == EstimatorKind::TwoStepMoment) {
      throw config_error("estimator '" + spec.name() + "' has no threshold grid for select-k");
    }
  }
  std::ostringstream out;
  out << x_header(ds.input_dim()) << ",estimator,grid_index,k,value,ok,rolling_sd,chosen,reason\n";
  for (const auto& q : grid) {
    const auto ts = transform(ds, q);
    for (const auto& spec : specs) {
      const std::string label = spec.name();
      try {
        const auto sel = selection_for(spec, ts, opt.level);
        for (std::size_t i = 0; i < sel.grid.size(); ++i) {
          const auto& e = sel.grid[i];
          const std::string sd = i < sel.rolling_sd.size() ? format_number(sel.rolling_sd[i]) : "NA";
          out << x_cells(q) << ',' << label << ',' << i + 1 << ',' << e.k << ','
              << (e.ok ? format_number(e.value) : "NA") << ',' << (e.ok ? 1 : 0) << ',' << sd << ','
              << (i == sel.chosen_index ? 1 : 0) << ",\n";
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        out << x_cells(q) << ',' << label << ",NA,NA,NA,0,NA,0," << csv_field(e.what()) << '\n';
      }
    }
  }
  write_output(opt.out, out.str());
  return 0;
}

int cmd_pickands_plot(const Options& opt) {
  const auto ds = load_input(opt);
  const auto grid = query_grid(opt.x, &ds, ds.input_dim());
  (void)two_sided_z(opt.level);
  std::ostringstream out;
  out << x_header(ds.input_dim()) << ",k,rho,ci_lo,ci_hi,status\n";
  for (const auto& q : grid) {
    const auto ts = transform(ds, q);
    try {
      for (const auto& e : pickands_plot(ts)) {
        const auto ci = rho_confidence_interval(e, opt.level);
        out << x_cells(q) << ',' << e.k << ',' << format_number(e.rho) << ','
            << (ci ? format_number(ci->lo) : "NA") << ',' << (ci ? format_number(ci->hi) : "NA") << ','
            << to_string(e.status) << '\n';
      }
    } catch (const Error& e) {
      out << x_cells(q) << ",NA,NA,NA,NA," << csv_field(e.what()) << '\n';
    }
  }
  write_output(opt.out.empty() ? opt.plot_out : opt.out, out.str());
  return 0;
}

int cmd_simulate(const Options& opt) {
  ExperimentConfig cfg;
  cfg.scenario = parse_scenario(opt.scenario);
  cfg.replications = opt.reps;
  cfg.sample_size = opt.n;
  for (const auto& q : query_grid(opt.x.empty() ? "0.25,0.5,1" : opt.x, nullptr, 1)) cfg.query_points.push_back(q[0]);
  cfg.estimators = resolve_estimators(opt.estimators, "fdh", opt);
  cfg.ci_level = opt.level;
  cfg.base_seed = opt.seed;
  cfg.threads = opt.threads;
  const auto rep = run_experiment(cfg);
  if (opt.out.empty()) {
    std::cout << emit_report_table(rep, TableFormat::Aligned);
  } else {
    write_output(opt.out, emit_report_table(rep, TableFormat::Csv));
  }
  return 0;
}

int cmd_gen(const Options& opt) {
  if (opt.n < 1) throw config_error("--n must be >= 1");
  write_output(opt.out, dataset_to_csv(generate(Scenario{parse_scenario(opt.scenario), opt.n, opt.seed})));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Extreme-value frontier estimation"};
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", opt.out, "output file (default: stdout)");
    sub->add_option("--level", opt.level, "confidence level");
  };
  auto add_data = [&](CLI::App* sub) {
    sub->add_option("--input", opt.input, "CSV with header x1,...,xp,y");
    sub->add_option("--x", opt.x, "query points: 0.2,0.5 (p = 1) or 1,2;3,4 (p = 2)");
  };
  auto add_estimation = [&](CLI::App* sub) {
    sub->add_option("--estimators", opt.estimators, "comma-separated estimator list");
    sub->add_option("--rho", opt.rho, "known:<value>, pickands or moment");
    sub->add_option("--ell", opt.ell, "known ell_x (requires --rho known:<value>)");
    sub->add_option("--k", opt.k, "auto, <k>, k<k> or grid<j>");
    sub->add_option("--pn", opt.pn, "exceedance probability for the extreme quantile estimators");
  };

  auto* estimate = app.add_subcommand("estimate", "frontier estimates and confidence intervals over an x-grid");
  add_data(estimate);
  add_estimation(estimate);
  add_common(estimate);
  estimate->add_option("--plot-out", opt.plot_out, "plot-data CSV");

  auto* select = app.add_subcommand("select-k", "threshold-selection diagnostics");
  add_data(select);
  add_estimation(select);
  add_common(select);

  auto* plot = app.add_subcommand("pickands-plot", "Pickands tail-index estimate for every admissible k");
  add_data(plot);
  add_common(plot);
  plot->add_option("--plot-out", opt.plot_out, "alias of --out");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo experiment on a synthetic scenario");
  simulate->add_option("--scenario", opt.scenario, "triangle or cobb-douglas");
  simulate->add_option("--n", opt.n, "sample size");
  simulate->add_option("--reps", opt.reps, "replications");
  simulate->add_option("--x", opt.x, "query points (default 0.25,0.5,1)");
  simulate->add_option("--seed", opt.seed, "base seed");
  simulate->add_option("--threads", opt.threads, "worker threads (0 = all cores)");
  add_estimation(simulate);
  add_common(simulate);

  auto* gen = app.add_subcommand("gen", "write a synthetic sample as CSV");
  gen->add_option("--scenario", opt.scenario, "triangle or cobb-douglas");
  gen->add_option("--n", opt.n, "sample size");
  gen->add_option("--seed", opt.seed, "seed");
  gen->add_option("--out", opt.out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*estimate) return cmd_estimate(opt);
    if (*select) return cmd_select_k(opt);
    if (*plot) return cmd_pickands_plot(opt);
    if (*simulate) return cmd_simulate(opt);
    if (*gen) return cmd_gen(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::ConfigError:
      case ErrorCode::InvalidArgument:
      case ErrorCode::DimensionMismatch:
        return kExitConfig;
      default:
        return kExitInput;
    }
  }
  return 0;
}
