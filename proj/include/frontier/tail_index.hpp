#pragma once

// Conditional tail index rho_x estimated from the upper order statistics of
// the transformed sample: Pickands-type (three spacings at k, 2k, 4k) and
// moment-type (first two moments of the top log-spacings).

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "frontier/core.hpp"
#include "frontier/error.hpp"
#include "frontier/normal.hpp"

namespace frontier {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;

  double length() const noexcept { return hi - lo; }
  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

enum class TailKind { Pickands, Moment };

inline std::string_view to_string(TailKind k) {
  return k == TailKind::Pickands ? "pickands" : "moment";
}

struct TailIndexEstimate {
  TailKind kind = TailKind::Pickands;
  std::size_t k = 0;
  double rho = std::numeric_limits<double>::quiet_NaN();       // raw value, also kept on failure
  double variance = std::numeric_limits<double>::quiet_NaN();  // of sqrt(k)(rho_hat - rho), at rho_hat
  Status status = Status::DegenerateSpacings;
  std::optional<Interval> ci;

  bool ok() const noexcept { return status == Status::Ok; }
};

struct MomentSums {
  double m1 = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
};

/// sigma^2(rho) = rho^2 (2^{1-2/rho} + 1) / ((2^{-1/rho} - 1) log 4)^2
inline double pickands_variance(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw Error(ErrorCode::InvalidArgument, "pickands_variance: rho must be finite and > 0");
  }
  const double d = (std::exp2(-1.0 / rho) - 1.0) * std::log(4.0);
  return rho * rho * (std::exp2(1.0 - 2.0 / rho) + 1.0) / (d * d);
}

/// Asymptotic variance of sqrt(k)(rho_tilde - rho) for the moment estimator.
inline double moment_variance(double rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw Error(ErrorCode::InvalidArgument, "moment_variance: rho must be finite and > 0");
  }
  const double r = rho;
  const double brace = 4.0 - 8.0 * (2.0 + r) / (3.0 + r) + (11.0 + 5.0 * r) * (2.0 + r) / ((3.0 + r) * (4.0 + r));
  return r * (2.0 + r) * (1.0 + r) * (1.0 + r) * brace;
}

namespace detail {

inline void require_conditioning(const TransformedSample& ts) {
  if (ts.n_x == 0) throw Error(ErrorCode::EmptyConditioningSet, "no observation satisfies X <= x");
}

/// Q_j = Z^x_(n-j+1), j >= 1.
inline double top_q(const TransformedSample& ts, std::size_t j) { return ts.from_top(j - 1); }

inline void finish_rho(TailIndexEstimate& est, double raw) {
  est.rho = raw;
  if (!std::isfinite(raw)) {
    est.status = Status::DegenerateSpacings;
  } else if (raw <= 0.0) {
    est.status = Status::NonpositiveEstimate;
  } else {
    est.status = Status::Ok;
    est.variance = est.kind == TailKind::Pickands ? pickands_variance(raw) : moment_variance(raw);
  }
}

}  // namespace detail

/// Pickands-type estimate from Q_k, Q_2k, Q_4k; requires 1 <= k and 4k <= N_x.
inline TailIndexEstimate pickands_rho(const TransformedSample& ts, std::size_t k) {
  detail::require_conditioning(ts);
  if (k < 1 || 4 * k > ts.n_x) {
    throw Error(ErrorCode::OutOfRange, "pickands_rho: k = " + std::to_string(k) +
                                           " needs 1 <= k <= N_x/4 (N_x = " + std::to_string(ts.n_x) + ")");
  }
  TailIndexEstimate est;
  est.kind = TailKind::Pickands;
  est.k = k;
  const double q1 = detail::top_q(ts, k);
  const double q2 = detail::top_q(ts, 2 * k);
  const double q4 = detail::top_q(ts, 4 * k);
  const double upper = q1 - q2;
  const double lower = q2 - q4;
  if (!(upper > 0.0) || !(lower > 0.0)) return est;
  const double ratio = lower / upper;
  if (ratio == 1.0) return est;
  detail::finish_rho(est, std::numbers::ln2 / std::log(ratio));
  return est;
}

/// M1, M2 over the k log-spacings log Z_(n-i) - log Z_(n-k), i = 0..k-1.
inline MomentSums moment_sums(const TransformedSample& ts, std::size_t k) {
  detail::require_conditioning(ts);
  if (k < 1 || k + 1 > ts.n_x) {
    throw Error(ErrorCode::OutOfRange, "moment_sums: k = " + std::to_string(k) +
                                           " needs 1 <= k <= N_x - 1 (N_x = " + std::to_string(ts.n_x) + ")");
  }
  const double threshold = ts.from_top(k);
  if (!(threshold > 0.0)) {
    throw Error(ErrorCode::NonpositiveThresholdValue, "moment_sums: Z_(n-k) must be > 0");
  }
  MomentSums s;
  s.k = k;
  for (std::size_t i = 0; i < k; ++i) {
    const double d = std::log(ts.from_top(i) / threshold);
    s.m1 += d;
    s.m2 += d * d;
  }
  s.m1 /= static_cast<double>(k);
  s.m2 /= static_cast<double>(k);
  return s;
}

/// rho_tilde = -1 / (M1 + 1 - 1/2 (1 - M1^2/M2)^{-1})
inline TailIndexEstimate moment_rho_from_sums(const MomentSums& s) {
  TailIndexEstimate est;
  est.kind = TailKind::Moment;
  est.k = s.k;
  if (!(s.m2 > 0.0)) return est;
  const double ratio = s.m1 * s.m1 / s.m2;
  if (ratio >= 1.0) return est;
  const double brace = s.m1 + 1.0 - 0.5 / (1.0 - ratio);
  if (brace == 0.0) return est;
  detail::finish_rho(est, -1.0 / brace);
  return est;
}

inline TailIndexEstimate moment_rho(const TransformedSample& ts, std::size_t k) {
  return moment_rho_from_sums(moment_sums(ts, k));
}

/// Moment sums for every k = 1..k_max in one O(k_max) pass. Entries whose
/// threshold Z_(n-k) is not positive are empty.
inline std::vector<std::optional<MomentSums>> moment_sums_sweep(const TransformedSample& ts,
                                                                std::size_t k_max) {
  detail::require_conditioning(ts);
  if (k_max + 1 > ts.n_x) {
    throw Error(ErrorCode::OutOfRange, "moment_sums_sweep: k_max must be <= N_x - 1");
  }
  std::vector<std::optional<MomentSums>> out(k_max);
  const double top = ts.from_top(0);
  if (!(top > 0.0)) return out;
  // d_i = log(Z_(n) / Z_(n-i)) >= 0; log Z_(n-i) - log Z_(n-k) = d_k - d_i.
  double s1 = 0.0;
  double s2 = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double d_prev = std::log(top / ts.from_top(k - 1));
    s1 += d_prev;
    s2 += d_prev * d_prev;
    const double z = ts.from_top(k);
    if (!(z > 0.0)) break;  // every later threshold is also 0
    const double dk = std::log(top / z);
    const double kk = static_cast<double>(k);
    MomentSums s;
    s.k = k;
    s.m1 = dk - s1 / kk;
    s.m2 = std::max(0.0, dk * dk - 2.0 * dk * s1 / kk + s2 / kk);
    if (s.m1 < 0.0) s.m1 = 0.0;
    out[k - 1] = s;
  }
  return out;
}

/// rho +/- z sqrt(variance(rho)/k); empty when the estimate failed.
inline std::optional<Interval> rho_confidence_interval(const TailIndexEstimate& est, double level = 0.95) {
  const double z = two_sided_z(level);
  if (!est.ok() || est.k < 1) return std::nullopt;
  const double half = z * std::sqrt(est.variance / static_cast<double>(est.k));
  return Interval{est.rho - half, est.rho + half, level};
}

/// Pickands plot: (k, rho_hat(k)) for 1 <= k < N_x/4.
inline std::vector<TailIndexEstimate> pickands_plot(const TransformedSample& ts) {
  detail::require_conditioning(ts);
  if (ts.n_x < 5) {
    throw Error(ErrorCode::OutOfRange, "pickands_plot: needs N_x >= 5, got " + std::to_string(ts.n_x));
  }
  std::vector<TailIndexEstimate> out;
  for (std::size_t k = 1; 4 * k < ts.n_x; ++k) out.push_back(pickands_rho(ts, k));
  return out;
}

}  // namespace frontier
