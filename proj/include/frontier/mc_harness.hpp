#pragma once

// Monte Carlo engine: replicate a scenario, evaluate estimators at query
// points under a threshold policy, and aggregate bias, MSE, average CI length
// and coverage against the scenario's exact truth.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "frontier/core.hpp"
#include "frontier/error.hpp"
#include "frontier/estimators.hpp"
#include "frontier/format.hpp"
#include "frontier/kn_select.hpp"
#include "frontier/rng.hpp"
#include "frontier/simgen.hpp"
#include "frontier/tail_index.hpp"

namespace frontier {

enum class EstimatorKind {
  Fdh,
  Robust,
  PickandsRho,
  MomentRho,
  PickandsStar,
  KnownRhoStar,
  MomentEndpoint,
  KnownEll,
  TwoStepPickands,
  TwoStepMoment,
  XQuantilePickands,
  XQuantileMoment,
};

/// How the threshold k is chosen in each replication.
struct KPolicy {
  enum class Mode { Fixed, Grid, Auto };
  Mode mode = Mode::Auto;
  std::size_t value = 0;  // k for Fixed, grid index (1-based) for Grid

  static KPolicy fixed(std::size_t k) { return {Mode::Fixed, k}; }
  static KPolicy grid(std::size_t j) { return {Mode::Grid, j}; }
  static KPolicy automatic() { return {Mode::Auto, 0}; }

  std::string label() const {
    switch (mode) {
      case Mode::Fixed: return "k" + std::to_string(value);
      case Mode::Grid: return "grid" + std::to_string(value);
      case Mode::Auto: return "auto";
    }
    return "";
  }
};

struct EstimatorSpec {
  EstimatorKind kind = EstimatorKind::Fdh;
  KPolicy policy;
  double rho = 2.0;   // KnownRhoStar, KnownEll
  double ell = 1.0;   // KnownEll
  double p_n = 0.0;   // extreme quantile kinds

  bool targets_rho() const { return kind == EstimatorKind::PickandsRho || kind == EstimatorKind::MomentRho; }
  bool targets_high_quantile() const {
    return kind == EstimatorKind::XQuantilePickands || kind == EstimatorKind::XQuantileMoment;
  }

  std::string name() const {
    switch (kind) {
      case EstimatorKind::Fdh: return "fdh";
      case EstimatorKind::Robust: return "robust";
      case EstimatorKind::PickandsRho: return "pickands-rho";
      case EstimatorKind::MomentRho: return "moment-rho";
      case EstimatorKind::PickandsStar: return "pickands";
      case EstimatorKind::KnownRhoStar: return "knownrho:" + format_number(rho, 6);
      case EstimatorKind::MomentEndpoint: return "moment";
      case EstimatorKind::KnownEll: return "knownell:" + format_number(rho, 6) + ":" + format_number(ell, 6);
      case EstimatorKind::TwoStepPickands: return "twostep-pickands";
      case EstimatorKind::TwoStepMoment: return "twostep-moment";
      case EstimatorKind::XQuantilePickands: return "xq-pickands:" + format_number(p_n, 6);
      case EstimatorKind::XQuantileMoment: return "xq-moment:" + format_number(p_n, 6);
    }
    return "unknown";
  }

  /// Column label: name plus policy, e.g. "knownrho:2@grid1". FDH and the
  /// extreme-quantile kinds have no policy.
  std::string label() const {
    if (kind == EstimatorKind::Fdh || targets_high_quantile()) return name();
    return name() + "@" + policy.label();
  }
};

namespace detail {

inline double parse_double_token(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::ConfigError, "bad number '" + std::string(s) + "' in " + std::string(what));
  }
  return v;
}

inline std::size_t parse_size_token(std::string_view s, std::string_view what) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::ConfigError, "bad integer '" + std::string(s) + "' in " + std::string(what));
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// "auto", "k<N>" / "<N>", or "grid<j>".
inline KPolicy parse_k_policy(std::string_view s) {
  if (s == "auto") return KPolicy::automatic();
  if (s.starts_with("grid")) return KPolicy::grid(detail::parse_size_token(s.substr(4), "k policy"));
  if (s.starts_with("k")) return KPolicy::fixed(detail::parse_size_token(s.substr(1), "k policy"));
  return KPolicy::fixed(detail::parse_size_token(s, "k policy"));
}

/// Parses "name[:params][@policy]", e.g. "knownrho:2@grid1", "moment@k200",
/// "knownell:2:1", "xq-pickands:0.01". Specs without '@' get `default_policy`.
inline EstimatorSpec parse_estimator_spec(std::string_view text, KPolicy default_policy = KPolicy::automatic()) {
  EstimatorSpec spec;
  spec.policy = default_policy;
  std::string_view body = text;
  if (const auto at = text.find('@'); at != std::string_view::npos) {
    spec.policy = parse_k_policy(text.substr(at + 1));
    body = text.substr(0, at);
  }
  const auto parts = detail::split(body, ':');
  const auto name = parts[0];
  auto need = [&](std::size_t count) {
    if (parts.size() != count) {
      throw Error(ErrorCode::ConfigError, "estimator '" + std::string(text) + "' expects " +
                                              std::to_string(count - 1) + " parameter(s)");
    }
  };
  if (name == "fdh") {
    need(1);
    spec.kind = EstimatorKind::Fdh;
  } else if (name == "robust") {
    need(1);
    spec.kind = EstimatorKind::Robust;
  } else if (name == "pickands-rho") {
    need(1);
    spec.kind = EstimatorKind::PickandsRho;
  } else if (name == "moment-rho") {
    need(1);
    spec.kind = EstimatorKind::MomentRho;
  } else if (name == "pickands") {
    need(1);
    spec.kind = EstimatorKind::PickandsStar;
  } else if (name == "moment") {
    need(1);
    spec.kind = EstimatorKind::MomentEndpoint;
  } else if (name == "knownrho") {
    need(2);
    spec.kind = EstimatorKind::KnownRhoStar;
    spec.rho = detail::parse_double_token(parts[1], text);
  } else if (name == "knownell") {
    need(3);
    spec.kind = EstimatorKind::KnownEll;
    spec.rho = detail::parse_double_token(parts[1], text);
    spec.ell = detail::parse_double_token(parts[2], text);
  } else if (name == "twostep-pickands") {
    need(1);
    spec.kind = EstimatorKind::TwoStepPickands;
  } else if (name == "twostep-moment") {
    need(1);
    spec.kind = EstimatorKind::TwoStepMoment;
  } else if (name == "xq-pickands" || name == "xq-moment") {
    need(2);
    spec.kind = name == "xq-pickands" ? EstimatorKind::XQuantilePickands : EstimatorKind::XQuantileMoment;
    spec.p_n = detail::parse_double_token(parts[1], text);
  } else {
    throw Error(ErrorCode::ConfigError, "unknown estimator '" + std::string(name) + "'");
  }
  if ((spec.kind == EstimatorKind::KnownRhoStar || spec.kind == EstimatorKind::KnownEll) && !(spec.rho > 0.0)) {
    throw Error(ErrorCode::ConfigError, "estimator '" + std::string(text) + "': rho must be > 0");
  }
  if (spec.kind == EstimatorKind::KnownEll && !(spec.ell > 0.0)) {
    throw Error(ErrorCode::ConfigError, "estimator '" + std::string(text) + "': ell must be > 0");
  }
  if (spec.targets_high_quantile() && !(spec.p_n > 0.0 && spec.p_n < 1.0)) {
    throw Error(ErrorCode::ConfigError, "estimator '" + std::string(text) + "': p_n must lie in (0,1)");
  }
  if (spec.kind == EstimatorKind::Robust && spec.policy.mode == KPolicy::Mode::Auto) {
    throw Error(ErrorCode::ConfigError, "robust frontier needs a fixed k (e.g. robust@k1)");
  }
  return spec;
}

/// Result of one estimator at one query point on one sample.
struct EstimateOutcome {
  bool ok = false;
  double value = 0.0;
  std::size_t k = 0;
  std::optional<Interval> ci;
  std::string reason;  // empty when ok
};

namespace detail {

inline std::size_t pickands_grid_k(const TransformedSample& ts, std::size_t j) {
  const std::size_t top = ts.n_x / 4;
  if (j < 1 || j > top) throw Error(ErrorCode::OutOfRange, "grid index outside 1..[N_x/4]");
  return top - j + 1;
}

inline std::size_t moment_grid_k(const TransformedSample& ts, std::size_t j) {
  if (j < 1 || j >= ts.n_x) throw Error(ErrorCode::OutOfRange, "grid index outside 1..N_x-1");
  return ts.n_x - j;
}

inline EstimateOutcome from_tail(const TailIndexEstimate& e, double level) {
  EstimateOutcome out;
  out.k = e.k;
  out.value = e.rho;
  out.ok = e.ok();
  if (!out.ok) {
    out.reason = std::string(to_string(e.status));
    return out;
  }
  out.ci = rho_confidence_interval(e, level);
  return out;
}

inline EstimateOutcome from_frontier(const FrontierEstimate& e) {
  EstimateOutcome out;
  out.k = e.k;
  out.value = e.value;
  out.ok = e.ok();
  if (!out.ok) {
    out.reason = std::string(to_string(e.status));
    return out;
  }
  if (e.ci) out.ci = static_cast<const Interval&>(*e.ci);
  return out;
}

inline std::size_t policy_k(const KPolicy& p, const TransformedSample& ts, bool moment_grid) {
  if (p.mode == KPolicy::Mode::Fixed) return p.value;
  return moment_grid ? moment_grid_k(ts, p.value) : pickands_grid_k(ts, p.value);
}

inline TailIndexEstimate rho_under_policy(const TransformedSample& ts, TailKind kind, const KPolicy& p) {
  const bool moment = kind == TailKind::Moment;
  if (p.mode == KPolicy::Mode::Auto) {
    const auto sel = moment ? select_k_moment_rho(ts) : select_k_pickands_rho(ts);
    return moment ? moment_rho(ts, sel.chosen_k) : pickands_rho(ts, sel.chosen_k);
  }
  const std::size_t k = policy_k(p, ts, moment);
  return moment ? moment_rho(ts, k) : pickands_rho(ts, k);
}

template <class Fn>
EstimateOutcome frontier_under_policy(const TransformedSample& ts, const KPolicy& p, bool moment_grid, Fn&& fn) {
  if (p.mode == KPolicy::Mode::Auto) {
    const auto sel = select_k_frontier(ts, fn);
    return from_frontier(fn(sel.chosen_k));
  }
  return from_frontier(fn(policy_k(p, ts, moment_grid)));
}

}  // namespace detail

/// Evaluates one estimator on one transformed sample. Precondition errors
/// (threshold out of range, empty conditioning set, no stable window) are
/// returned as failed outcomes with the error text as reason.
inline EstimateOutcome evaluate_estimator(const EstimatorSpec& spec, const TransformedSample& ts, double level) {
  using K = EstimatorKind;
  try {
    switch (spec.kind) {
      case K::Fdh: return detail::from_frontier(fdh_estimate(ts));
      case K::Robust: {
        const std::size_t k = spec.policy.mode == KPolicy::Mode::Fixed ? spec.policy.value : spec.policy.value - 1;
        return detail::from_frontier(robust_frontier(ts, k));
      }
      case K::PickandsRho:
        return detail::from_tail(detail::rho_under_policy(ts, TailKind::Pickands, spec.policy), level);
      case K::MomentRho:
        return detail::from_tail(detail::rho_under_policy(ts, TailKind::Moment, spec.policy), level);
      case K::PickandsStar:
        return detail::frontier_under_policy(ts, spec.policy, false,
                                             [&](std::size_t k) { return pickands_star(ts, k, level); });
      case K::KnownRhoStar:
        return detail::frontier_under_policy(ts, spec.policy, false,
                                             [&](std::size_t k) { return known_rho_star(ts, k, spec.rho, level); });
      case K::MomentEndpoint:
        return detail::frontier_under_policy(ts, spec.policy, true,
                                             [&](std::size_t k) { return moment_endpoint(ts, k, level); });
      case K::KnownEll:
        return detail::frontier_under_policy(
            ts, spec.policy, false, [&](std::size_t k) { return known_ell_ci(ts, k, spec.rho, spec.ell, level); });
      case K::TwoStepPickands:
      case K::TwoStepMoment: {
        const TailKind source = spec.kind == K::TwoStepPickands ? TailKind::Pickands : TailKind::Moment;
        const auto rho = detail::rho_under_policy(ts, source, spec.policy);
        if (!rho.ok()) {
          EstimateOutcome out;
          out.k = rho.k;
          out.reason = "rho stage: " + std::string(to_string(rho.status));
          return out;
        }
        return detail::frontier_under_policy(ts, spec.policy, false,
                                             [&](std::size_t k) { return known_rho_star(ts, k, rho.rho, level); });
      }
      case K::XQuantilePickands: return detail::from_frontier(extreme_quantile_ci_pickands(ts, spec.p_n, level));
      case K::XQuantileMoment: return detail::from_frontier(extreme_quantile_ci_moment(ts, spec.p_n, level));
    }
  } catch (const Error& e) {
    EstimateOutcome out;
    out.reason = e.what();
    return out;
  }
  return {};
}

struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::UniformTriangle;
  std::size_t replications = 1;
  std::size_t sample_size = 5000;
  std::vector<double> query_points;
  std::vector<EstimatorSpec> estimators;
  double ci_level = 0.95;
  std::uint64_t base_seed = 0;
  unsigned threads = 1;       // 0 = hardware concurrency
  bool keep_samples = false;  // retain per-replication errors in each cell
};

struct ReportCell {
  double x = 0.0;
  std::string estimator;
  double k_mean = 0.0;
  double bias = 0.0;
  double mse = 0.0;
  std::optional<double> avg_ci_length;  // NA for estimators without a normal CI
  std::optional<double> coverage;
  double failure_rate = 0.0;
  std::size_t successes = 0;
  std::size_t replications = 0;
  double truth = 0.0;
  std::vector<double> errors;  // estimate - truth per successful replication, if kept
};

struct ExperimentReport {
  std::vector<ReportCell> cells;  // ordered by query point, then estimator
};

/// Truth for an estimator target at x.
inline double target_truth(const EstimatorSpec& spec, const GroundTruth& truth, double x) {
  if (spec.targets_rho()) return truth.rho(x);
  if (spec.targets_high_quantile()) return truth.high_quantile(x, spec.p_n);
  return truth.frontier(x);
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.replications < 1) throw Error(ErrorCode::ConfigError, "replications must be >= 1");
  if (cfg.sample_size < 1) throw Error(ErrorCode::ConfigError, "sample size must be >= 1");
  if (cfg.query_points.empty()) throw Error(ErrorCode::ConfigError, "no query points");
  if (cfg.estimators.empty()) throw Error(ErrorCode::ConfigError, "no estimators");
  const auto truth = ground_truth(cfg.scenario);
  for (double x : cfg.query_points) {
    if (!(truth.fx(x) > 0.0)) {
      throw Error(ErrorCode::ConfigError, "query point " + format_number(x) + " has F_X(x) = 0");
    }
  }
  (void)two_sided_z(cfg.ci_level);

  const std::size_t nx = cfg.query_points.size();
  const std::size_t ne = cfg.estimators.size();
  const std::size_t cells = nx * ne;
  std::vector<EstimateOutcome> outcomes(cfg.replications * cells);

  auto run_replication = [&](std::size_t r) {
    const Dataset ds = generate(Scenario{cfg.scenario, cfg.sample_size, derive_seed(cfg.base_seed, r)});
    for (std::size_t i = 0; i < nx; ++i) {
      const double q[1] = {cfg.query_points[i]};
      const auto ts = transform(ds, q);
      for (std::size_t j = 0; j < ne; ++j) {
        outcomes[r * cells + i * ne + j] = evaluate_estimator(cfg.estimators[j], ts, cfg.ci_level);
      }
    }
  };

  unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, cfg.replications));
  if (workers <= 1) {
    for (std::size_t r = 0; r < cfg.replications; ++r) run_replication(r);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < cfg.replications; r += workers) run_replication(r);
      });
    }
    for (auto& t : pool) t.join();
  }

  ExperimentReport rep;
  rep.cells.reserve(cells);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ne; ++j) {
      const auto& spec = cfg.estimators[j];
      ReportCell cell;
      cell.x = cfg.query_points[i];
      cell.estimator = spec.label();
      cell.truth = target_truth(spec, truth, cell.x);
      cell.replications = cfg.replications;
      double sum_k = 0.0, sum_err = 0.0, sum_sq = 0.0, sum_len = 0.0;
      std::size_t with_ci = 0, covered = 0;
      for (std::size_t r = 0; r < cfg.replications; ++r) {
        const auto& o = outcomes[r * cells + i * ne + j];
        if (!o.ok) continue;
        ++cell.successes;
        const double err = o.value - cell.truth;
        sum_k += static_cast<double>(o.k);
        sum_err += err;
        sum_sq += err * err;
        if (cfg.keep_samples) cell.errors.push_back(err);
        if (o.ci) {
          ++with_ci;
          sum_len += o.ci->length();
          covered += o.ci->contains(cell.truth) ? 1 : 0;
        }
      }
      const double s = static_cast<double>(cell.successes);
      cell.failure_rate = 1.0 - s / static_cast<double>(cfg.replications);
      if (cell.successes > 0) {
        cell.k_mean = sum_k / s;
        cell.bias = sum_err / s;
        cell.mse = sum_sq / s;
      } else {
        cell.k_mean = cell.bias = cell.mse = std::numeric_limits<double>::quiet_NaN();
      }
      if (with_ci > 0) {
        cell.avg_ci_length = sum_len / static_cast<double>(with_ci);
        cell.coverage = static_cast<double>(covered) / static_cast<double>(with_ci);
      }
      rep.cells.push_back(std::move(cell));
    }
  }
  return rep;
}

/// Leading term of E{phi(x) - fdh(x)}^k: k rho^{-1} (n ell)^{-k/rho} Gamma(k/rho).
inline double fdh_moment_oracle(int k, std::size_t n, double rho, double ell) {
  if (k < 1 || n < 1 || !(rho > 0.0) || !(ell > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "fdh_moment_oracle: need k >= 1, n >= 1, rho > 0, ell > 0");
  }
  const double a = static_cast<double>(k) / rho;
  return a * std::pow(static_cast<double>(n) * ell, -a) * std::tgamma(a);
}

enum class TableFormat { Aligned, Csv };

inline constexpr std::string_view kReportColumns[] = {"x",   "estimator",     "k_mean",   "bias",
                                                      "mse", "avg_ci_length", "coverage", "failure_rate"};

/// Renders the report; numbers carry 6 significant digits, "NA" marks
/// statistics that do not apply.
inline std::string emit_report_table(const ExperimentReport& rep, TableFormat format) {
  std::vector<std::vector<std::string>> rows;
  rows.emplace_back(std::begin(kReportColumns), std::end(kReportColumns));
  for (const auto& c : rep.cells) {
    rows.push_back({format_number(c.x, 6), c.estimator, format_number(c.k_mean, 6), format_number(c.bias, 6),
                    format_number(c.mse, 6), format_optional(c.avg_ci_length, 6), format_optional(c.coverage, 6),
                    format_number(c.failure_rate, 6)});
  }
  std::ostringstream os;
  if (format == TableFormat::Csv) {
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << '\n';
    }
    return os.str();
  }
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << "  ";
      if (i == 1) {
        os << std::left << std::setw(static_cast<int>(width[i])) << row[i];
      } else {
        os << std::right << std::setw(static_cast<int>(width[i])) << row[i];
      }
    }
    os << '\n';
  }
  return os.str();
}

/// Inverse of the CSV rendering (per-replication errors are not stored).
inline ExperimentReport parse_report_csv(std::string_view text) {
  ExperimentReport rep;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  auto num = [&](std::string_view s) -> double {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Error(ErrorCode::ParseError, "report line " + std::to_string(lineno) + ": bad number '" +
                                             std::string(s) + "'");
    }
    return v;
  };
  auto opt = [&](std::string_view s) -> std::optional<double> {
    if (s == "NA") return std::nullopt;
    return num(s);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (lineno == 1) continue;
    if (line.empty()) continue;
    const auto f = detail::split(line, ',');
    if (f.size() != std::size(kReportColumns)) {
      throw Error(ErrorCode::ParseError, "report line " + std::to_string(lineno) + ": expected 8 fields");
    }
    ReportCell c;
    c.x = num(f[0]);
    c.estimator = std::string(f[1]);
    c.k_mean = num(f[2]);
    c.bias = num(f[3]);
    c.mse = num(f[4]);
    c.avg_ci_length = opt(f[5]);
    c.coverage = opt(f[6]);
    c.failure_rate = num(f[7]);
    rep.cells.push_back(std::move(c));
  }
  return rep;
}

}  // namespace frontier
