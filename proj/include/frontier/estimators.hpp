#pragma once

// Extreme-value frontier estimators built on the transformed sample, with
// their asymptotic normal confidence intervals.
//
// Notation: Q_j = Z^x_(n-j+1) is the j-th largest transformed value, so
// Q_1 is the FDH value. All intervals plug the estimated tail index into the
// variance formula.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frontier/core.hpp"
#include "frontier/error.hpp"
#include "frontier/normal.hpp"
#include "frontier/tail_index.hpp"

namespace frontier {

enum class FrontierKind {
  FDH,
  OrderStat,
  PickandsStar,
  KnownRhoStar,
  MomentEndpoint,
  KnownEll,
  ExtremeQuantile,
};

inline std::string_view to_string(FrontierKind k) {
  switch (k) {
    case FrontierKind::FDH: return "fdh";
    case FrontierKind::OrderStat: return "robust";
    case FrontierKind::PickandsStar: return "pickands";
    case FrontierKind::KnownRhoStar: return "knownrho";
    case FrontierKind::MomentEndpoint: return "moment";
    case FrontierKind::KnownEll: return "knownell";
    case FrontierKind::ExtremeQuantile: return "xquantile";
  }
  return "unknown";
}

struct FrontierInterval : Interval {
  std::string_view variance_formula;  // "V1".."V5" or "unit" for the known-(ell, rho) interval
};

struct FrontierEstimate {
  FrontierKind kind = FrontierKind::FDH;
  std::vector<double> x;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::size_t k = 0;
  std::optional<double> rho_used;
  std::optional<FrontierInterval> ci;
  Status status = Status::Ok;

  bool ok() const noexcept { return status == Status::Ok; }
};

// Asymptotic variances of the normalized frontier statistics.

/// Extreme quantile via Q_k with Pickands spacing normalization.
inline double v1(double rho) {
  const double d = std::exp2(-1.0 / rho) - 1.0;
  return std::exp2(1.0 - 2.0 / rho) / (rho * rho * d * d);
}

/// Endpoint with estimated rho (Pickands).
inline double v2(double rho) {
  const double d = std::exp2(-1.0 / rho) - 1.0;
  return 3.0 * std::exp2(-1.0 - 2.0 / rho) / (rho * rho * std::pow(d, 6));
}

/// Endpoint with known rho.
inline double v3(double rho) {
  const double d = std::exp2(-1.0 / rho) - 1.0;
  return std::exp2(-2.0 / rho) / (rho * rho * std::pow(d, 4));
}

/// Extreme quantile via Z_(n-k) with moment normalization.
inline double v4(double rho) {
  const double t = 1.0 + 1.0 / rho;
  return t * t;
}

/// Moment endpoint.
inline double v5(double rho) {
  const double r = rho;
  const double brace = 4.0 - 8.0 * (2.0 + r) / (3.0 + r) + (11.0 + 5.0 * r) * (2.0 + r) / ((3.0 + r) * (4.0 + r));
  return r * r * (r / (2.0 + r) + r * (2.0 + r) * brace - 4.0 * r / (3.0 + r));
}

namespace detail {

inline FrontierEstimate make_estimate(FrontierKind kind, const TransformedSample& ts, std::size_t k) {
  FrontierEstimate e;
  e.kind = kind;
  e.x = ts.query;
  e.k = k;
  return e;
}

inline void check_rho(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw Error(ErrorCode::InvalidArgument, "rho must be finite and > 0");
  }
}

inline void attach_ci(FrontierEstimate& e, double center, double half, double level, std::string_view formula) {
  FrontierInterval ci;
  ci.lo = center - half;
  ci.hi = center + half;
  ci.level = level;
  ci.variance_formula = formula;
  e.ci = ci;
}

/// floor(n p) with products within 1e-9 of an integer snapped to it, so that
/// p = k/n gives back k.
inline std::size_t floor_count(double p, std::size_t n) {
  if (!(p > 0.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "p_n must be > 0");
  const double t = p * static_cast<double>(n);
  const double r = std::round(t);
  const double f = (std::abs(t - r) <= 1e-9 * std::max(1.0, t)) ? r : std::floor(t);
  return static_cast<std::size_t>(f);
}

/// Shared body of the Pickands-form endpoint: Q_k + (Q_k - Q_2k) / (2^{1/rho} - 1).
inline void spacing_endpoint(FrontierEstimate& e, const TransformedSample& ts, std::size_t k, double rho,
                             double variance, double level, std::string_view formula) {
  const double z = two_sided_z(level);
  const double qk = top_q(ts, k);
  const double spacing = qk - top_q(ts, 2 * k);
  e.rho_used = rho;
  if (!(spacing > 0.0)) {
    e.value = qk;
    e.status = Status::DegenerateSpacings;
    return;
  }
  e.value = qk + spacing / (std::exp2(1.0 / rho) - 1.0);
  const double half = z * std::sqrt(variance) * spacing / std::sqrt(2.0 * static_cast<double>(k));
  attach_ci(e, e.value, half, level, formula);
}

}  // namespace detail

inline FrontierEstimate fdh_estimate(const TransformedSample& ts) {
  auto e = detail::make_estimate(FrontierKind::FDH, ts, 0);
  e.value = order_stat_quantile(ts, 0);
  return e;
}

/// Z_(n-k): the order-statistic frontier that leaves k points above it. No CI.
inline FrontierEstimate robust_frontier(const TransformedSample& ts, std::size_t k) {
  auto e = detail::make_estimate(FrontierKind::OrderStat, ts, k);
  e.value = order_stat_quantile(ts, k);
  return e;
}

/// Endpoint estimate with the tail index estimated by Pickands at the same k.
inline FrontierEstimate pickands_star(const TransformedSample& ts, std::size_t k, double level = 0.95) {
  const auto rho = pickands_rho(ts, k);
  auto e = detail::make_estimate(FrontierKind::PickandsStar, ts, k);
  if (!rho.ok()) {
    e.value = detail::top_q(ts, k);
    e.rho_used = rho.rho;
    e.status = rho.status;
    return e;
  }
  detail::spacing_endpoint(e, ts, k, rho.rho, v2(rho.rho), level, "V2");
  return e;
}

/// Endpoint estimate for a known (or externally supplied) tail index; 1 <= k <= N_x/2.
inline FrontierEstimate known_rho_star(const TransformedSample& ts, std::size_t k, double rho,
                                       double level = 0.95) {
  detail::require_conditioning(ts);
  detail::check_rho(rho);
  if (k < 1 || 2 * k > ts.n_x) {
    throw Error(ErrorCode::OutOfRange, "known_rho_star: k = " + std::to_string(k) +
                                           " needs 1 <= k <= N_x/2 (N_x = " + std::to_string(ts.n_x) + ")");
  }
  auto e = detail::make_estimate(FrontierKind::KnownRhoStar, ts, k);
  detail::spacing_endpoint(e, ts, k, rho, v3(rho), level, "V3");
  return e;
}

/// Z_(n-k) (1 + M1 (1 + rho_tilde)) with rho_tilde the moment estimate at k.
inline FrontierEstimate moment_endpoint(const TransformedSample& ts, std::size_t k, double level = 0.95) {
  const double z = two_sided_z(level);
  const auto sums = moment_sums(ts, k);
  const auto rho = moment_rho_from_sums(sums);
  auto e = detail::make_estimate(FrontierKind::MomentEndpoint, ts, k);
  const double threshold = ts.from_top(k);
  e.rho_used = rho.rho;
  if (!rho.ok()) {
    e.value = threshold;
    e.status = rho.status;
    return e;
  }
  e.value = threshold * (1.0 + sums.m1 * (1.0 + rho.rho));
  const double scale = sums.m1 * (1.0 + 1.0 / rho.rho) * threshold;
  const double half = z * std::sqrt(v5(rho.rho)) * scale / std::sqrt(static_cast<double>(k));
  detail::attach_ci(e, e.value, half, level, "V5");
  return e;
}

/// Bias-corrected Q_k + (k/(n ell))^{1/rho} with its exact-normal interval.
///
/// Note: n is the FULL sample size, not N_x. ell already absorbs F_X(x).
inline FrontierEstimate known_ell_ci(const TransformedSample& ts, std::size_t k, double rho, double ell,
                                     double level = 0.95) {
  detail::require_conditioning(ts);
  detail::check_rho(rho);
  if (!(ell > 0.0) || !std::isfinite(ell)) throw Error(ErrorCode::InvalidArgument, "ell must be finite and > 0");
  if (k < 1 || k > ts.n_x) {
    throw Error(ErrorCode::OutOfRange, "known_ell_ci: k = " + std::to_string(k) +
                                           " needs 1 <= k <= N_x (N_x = " + std::to_string(ts.n_x) + ")");
  }
  const double z = two_sided_z(level);
  auto e = detail::make_estimate(FrontierKind::KnownEll, ts, k);
  const double kk = static_cast<double>(k);
  const double shift = std::pow(kk / (static_cast<double>(ts.n()) * ell), 1.0 / rho);
  e.value = detail::top_q(ts, k) + shift;
  e.rho_used = rho;
  detail::attach_ci(e, e.value, z * shift / (rho * std::sqrt(kk)), level, "unit");
  return e;
}

/// Interval for the high quantile frontier phi_{1 - p_n/F_X(x)}(x), centred at
/// Q_{k_n} with k_n = floor(n p_n), Pickands plug-in rho at k_n.
inline FrontierEstimate extreme_quantile_ci_pickands(const TransformedSample& ts, double p_n,
                                                     double level = 0.95) {
  const double z = two_sided_z(level);
  const std::size_t k = detail::floor_count(p_n, ts.n());
  if (k < 1) throw Error(ErrorCode::OutOfRange, "extreme_quantile_ci_pickands: floor(n p_n) must be >= 1");
  const auto rho = pickands_rho(ts, k);
  auto e = detail::make_estimate(FrontierKind::ExtremeQuantile, ts, k);
  e.value = detail::top_q(ts, k);
  e.rho_used = rho.rho;
  if (!rho.ok()) {
    e.status = rho.status;
    return e;
  }
  const double spacing = e.value - detail::top_q(ts, 2 * k);
  const double half = z * std::sqrt(v1(rho.rho)) * spacing / std::sqrt(2.0 * static_cast<double>(k));
  detail::attach_ci(e, e.value, half, level, "V1");
  return e;
}

/// Same target, centred at Z_(n-k_n) with the moment normalization.
inline FrontierEstimate extreme_quantile_ci_moment(const TransformedSample& ts, double p_n,
                                                   double level = 0.95) {
  const double z = two_sided_z(level);
  const std::size_t k = detail::floor_count(p_n, ts.n());
  if (k < 1) throw Error(ErrorCode::OutOfRange, "extreme_quantile_ci_moment: floor(n p_n) must be >= 1");
  const auto sums = moment_sums(ts, k);
  const auto rho = moment_rho_from_sums(sums);
  auto e = detail::make_estimate(FrontierKind::ExtremeQuantile, ts, k);
  const double threshold = ts.from_top(k);
  e.value = threshold;
  e.rho_used = rho.rho;
  if (!(sums.m1 > 0.0)) {
    e.status = Status::DegenerateSpacings;
    return e;
  }
  if (!rho.ok()) {
    e.status = rho.status;
    return e;
  }
  const double half = z * std::sqrt(v4(rho.rho)) * sums.m1 * threshold / std::sqrt(static_cast<double>(k));
  detail::attach_ci(e, e.value, half, level, "V4");
  return e;
}

/// Estimate rho at k_rho, then evaluate the known-rho endpoint at k_front with it.
inline FrontierEstimate two_step_known_rho(const TransformedSample& ts, std::size_t k_rho, std::size_t k_front,
                                           TailKind rho_source, double level = 0.95) {
  detail::require_conditioning(ts);
  if (k_front < 1 || 2 * k_front > ts.n_x) {
    throw Error(ErrorCode::OutOfRange, "two_step_known_rho: k_front = " + std::to_string(k_front) +
                                           " needs 1 <= k <= N_x/2");
  }
  const auto rho = rho_source == TailKind::Pickands ? pickands_rho(ts, k_rho) : moment_rho(ts, k_rho);
  if (!rho.ok()) {
    auto e = detail::make_estimate(FrontierKind::KnownRhoStar, ts, k_front);
    e.value = detail::top_q(ts, k_front);
    e.rho_used = rho.rho;
    e.status = rho.status;
    return e;
  }
  return known_rho_star(ts, k_front, rho.rho, level);
}

}  // namespace frontier
