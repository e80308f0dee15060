#pragma once

// Sample representation, conditional empirical distribution of Y given X <= x,
// the FDH frontier and the transformed sample Z^x = Y 1(X <= x).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "frontier/error.hpp"

namespace frontier {

struct Observation {
  std::vector<double> x;  // input quantities, p components
  double y = 0.0;         // output quantity
};

/// Validated, immutable sample of n >= 1 observations with p >= 1 inputs.
class Dataset {
 public:
  explicit Dataset(std::vector<Observation> observations) : obs_(std::move(observations)) {
    if (obs_.empty()) throw Error(ErrorCode::InvalidArgument, "dataset must hold at least one observation");
    dim_ = obs_.front().x.size();
    if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "input dimension must be >= 1");
    for (std::size_t i = 0; i < obs_.size(); ++i) {
      const auto& o = obs_[i];
      if (o.x.size() != dim_) {
        throw Error(ErrorCode::DimensionMismatch,
                    "observation " + std::to_string(i) + " has " + std::to_string(o.x.size()) +
                        " inputs, expected " + std::to_string(dim_));
      }
      for (double v : o.x) {
        if (!std::isfinite(v) || v < 0.0) {
          throw Error(ErrorCode::InvalidArgument,
                      "observation " + std::to_string(i) + ": inputs must be finite and >= 0");
        }
      }
      if (!std::isfinite(o.y) || o.y < 0.0) {
        throw Error(ErrorCode::InvalidArgument,
                    "observation " + std::to_string(i) + ": output must be finite and >= 0");
      }
    }
  }

  std::size_t size() const noexcept { return obs_.size(); }
  std::size_t input_dim() const noexcept { return dim_; }
  const Observation& operator[](std::size_t i) const { return obs_[i]; }
  const std::vector<Observation>& observations() const noexcept { return obs_; }
  auto begin() const noexcept { return obs_.begin(); }
  auto end() const noexcept { return obs_.end(); }

 private:
  std::vector<Observation> obs_;
  std::size_t dim_ = 0;
};

/// True iff xi <= x componentwise (xi is dominated by x).
inline bool dominates(std::span<const double> x, std::span<const double> xi) {
  if (x.size() != xi.size()) {
    throw Error(ErrorCode::DimensionMismatch, "dominates: vectors of dimension " +
                                                  std::to_string(x.size()) + " and " +
                                                  std::to_string(xi.size()));
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (xi[j] > x[j]) return false;
  }
  return true;
}

namespace detail {

inline void check_query(const Dataset& ds, std::span<const double> x) {
  if (x.size() != ds.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "query point has dimension " + std::to_string(x.size()) +
                                                  ", dataset has " + std::to_string(ds.input_dim()));
  }
}

inline std::size_t count_dominated(const Dataset& ds, std::span<const double> x) {
  check_query(ds, x);
  std::size_t count = 0;
  for (const auto& o : ds) count += dominates(x, o.x) ? 1 : 0;
  return count;
}

inline std::vector<double> dominated_outputs(const Dataset& ds, std::span<const double> x) {
  check_query(ds, x);
  std::vector<double> ys;
  for (const auto& o : ds) {
    if (dominates(x, o.x)) ys.push_back(o.y);
  }
  if (ys.empty()) throw Error(ErrorCode::EmptyConditioningSet, "no observation satisfies X <= x");
  return ys;
}

/// Smallest integer m with m >= alpha * n, treating products within 1e-9 of
/// an integer as that integer so that alpha = 1 - k/n maps to n - k exactly.
inline std::size_t ceil_rank(double alpha, std::size_t n) {
  const double t = alpha * static_cast<double>(n);
  const double r = std::round(t);
  double m = (std::abs(t - r) <= 1e-9 * std::max(1.0, t)) ? r : std::ceil(t);
  m = std::clamp(m, 1.0, static_cast<double>(n));
  return static_cast<std::size_t>(m);
}

}  // namespace detail

/// F_X-hat(x) = #{i : X_i <= x} / n.
inline double empirical_fx(const Dataset& ds, std::span<const double> x) {
  return static_cast<double>(detail::count_dominated(ds, x)) / static_cast<double>(ds.size());
}

/// #{i : X_i <= x, Y_i <= y} / #{i : X_i <= x}.
inline double conditional_cdf(const Dataset& ds, double y, std::span<const double> x) {
  const auto ys = detail::dominated_outputs(ds, x);
  const auto below = std::count_if(ys.begin(), ys.end(), [y](double v) { return v <= y; });
  return static_cast<double>(below) / static_cast<double>(ys.size());
}

/// inf{y >= 0 : F-hat(y|x) >= alpha}: the ceil(alpha N_x)-th smallest dominated
/// output. No interpolation.
inline double conditional_quantile(const Dataset& ds, double alpha, std::span<const double> x) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "conditional_quantile: alpha must lie in (0,1]");
  }
  auto ys = detail::dominated_outputs(ds, x);
  const std::size_t rank = detail::ceil_rank(alpha, ys.size());
  std::nth_element(ys.begin(), ys.begin() + static_cast<std::ptrdiff_t>(rank - 1), ys.end());
  return ys[rank - 1];
}

/// inf{x : F_X-hat(x) >= alpha} for a one-dimensional input.
inline double marginal_quantile(const Dataset& ds, double alpha) {
  if (ds.input_dim() != 1) throw Error(ErrorCode::DimensionMismatch, "marginal_quantile needs p = 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::OutOfRange, "marginal_quantile: alpha must lie in (0,1]");
  std::vector<double> xs;
  xs.reserve(ds.size());
  for (const auto& o : ds) xs.push_back(o.x[0]);
  const std::size_t rank = detail::ceil_rank(alpha, xs.size());
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(rank - 1), xs.end());
  return xs[rank - 1];
}

/// Free disposal hull frontier: max{Y_i : X_i <= x}.
inline double fdh(const Dataset& ds, std::span<const double> x) {
  const auto ys = detail::dominated_outputs(ds, x);
  return *std::max_element(ys.begin(), ys.end());
}

/// Sorted transformed sample Z^x_(1) <= ... <= Z^x_(n) for one query point.
struct TransformedSample {
  std::vector<double> query;
  std::vector<double> z_sorted;
  std::size_t n_x = 0;

  std::size_t n() const noexcept { return z_sorted.size(); }

  /// Z^x_(i), 1-based.
  double order_stat(std::size_t i) const { return z_sorted[i - 1]; }

  /// Z^x_(n-j): the j-th value counted down from the maximum (j = 0 is the max).
  double from_top(std::size_t j) const { return z_sorted[z_sorted.size() - 1 - j]; }
};

inline TransformedSample transform(const Dataset& ds, std::span<const double> x) {
  detail::check_query(ds, x);
  TransformedSample ts;
  ts.query.assign(x.begin(), x.end());
  ts.z_sorted.reserve(ds.size());
  for (const auto& o : ds) {
    if (dominates(x, o.x)) {
      ts.z_sorted.push_back(o.y);
      ++ts.n_x;
    } else {
      ts.z_sorted.push_back(0.0);
    }
  }
  std::sort(ts.z_sorted.begin(), ts.z_sorted.end());
  return ts;
}

/// Z^x_(n-k), equal to the conditional quantile at level 1 - k/N_x.
/// k = 0 gives the FDH value.
inline double order_stat_quantile(const TransformedSample& ts, std::size_t k) {
  if (ts.n_x == 0) throw Error(ErrorCode::EmptyConditioningSet, "no observation satisfies X <= x");
  if (k >= ts.n_x) {
    throw Error(ErrorCode::OutOfRange, "order_stat_quantile: k = " + std::to_string(k) +
                                           " must be <= N_x - 1 = " + std::to_string(ts.n_x - 1));
  }
  return ts.from_top(k);
}

}  // namespace frontier
