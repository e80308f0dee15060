#pragma once

// Data-driven threshold selection: evaluate an estimator over a grid of
// thresholds and keep the one where a sliding window of successive estimates
// has the smallest sample standard deviation.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "frontier/core.hpp"
#include "frontier/error.hpp"
#include "frontier/estimators.hpp"
#include "frontier/tail_index.hpp"

namespace frontier {

enum class SelectionTarget { PickandsRho, MomentRho, Frontier };

inline std::string_view to_string(SelectionTarget t) {
  switch (t) {
    case SelectionTarget::PickandsRho: return "pickands-rho";
    case SelectionTarget::MomentRho: return "moment-rho";
    case SelectionTarget::Frontier: return "frontier";
  }
  return "unknown";
}

struct GridEntry {
  std::size_t k = 0;  // threshold k_n actually used
  double value = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
};

struct KSelection {
  SelectionTarget target = SelectionTarget::Frontier;
  std::vector<GridEntry> grid;     // in the rule's grid order
  std::size_t window_halfwidth = 0;  // window spans 2 * window_halfwidth successive entries
  std::vector<double> rolling_sd;  // one per window start; NaN when the window holds a failure
  std::size_t chosen_window = 0;   // index of the first entry of the winning window
  std::size_t chosen_index = 0;    // grid index of chosen_k
  std::size_t chosen_k = 0;

  double chosen_value() const { return grid[chosen_index].value; }
};

namespace detail {

/// Largest r with r^2 <= num / den.
inline std::size_t floor_sqrt_ratio(std::size_t num, std::size_t den) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(num) / static_cast<double>(den)));
  while (r > 0 && r * r * den > num) --r;
  while ((r + 1) * (r + 1) * den <= num) ++r;
  return r;
}

inline double window_sd(const std::vector<GridEntry>& grid, std::size_t start, std::size_t len) {
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const auto& e = grid[start + i];
    if (!e.ok) return std::numeric_limits<double>::quiet_NaN();
    const double delta = e.value - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (e.value - mean);
  }
  return std::sqrt(m2 / static_cast<double>(len - 1));
}

inline void choose_window(KSelection& sel) {
  const std::size_t w = 2 * sel.window_halfwidth;
  if (sel.window_halfwidth == 0 || sel.grid.size() < w) {
    throw Error(ErrorCode::InsufficientStableRange,
                "grid of " + std::to_string(sel.grid.size()) + " thresholds is shorter than the window (" +
                    std::to_string(w) + ")");
  }
  const std::size_t windows = sel.grid.size() - w + 1;
  sel.rolling_sd.resize(windows);
  bool found = false;
  double best = 0.0;
  for (std::size_t s = 0; s < windows; ++s) {
    const double sd = window_sd(sel.grid, s, w);
    sel.rolling_sd[s] = sd;
    if (std::isnan(sd)) continue;
    if (!found || sd < best) {  // strict: ties keep the earliest window
      best = sd;
      sel.chosen_window = s;
      found = true;
    }
  }
  if (!found) {
    throw Error(ErrorCode::InsufficientStableRange, "every window contains a failed estimate");
  }
  const std::size_t left = sel.chosen_window + sel.window_halfwidth - 1;
  const std::size_t right = left + 1;
  sel.chosen_index = sel.grid[left].k <= sel.grid[right].k ? left : right;
  sel.chosen_k = sel.grid[sel.chosen_index].k;
}

inline GridEntry to_entry(const TailIndexEstimate& e) { return {e.k, e.rho, e.ok()}; }

}  // namespace detail

/// Pickands rho over k_n = [N_x/4] - k + 1, k = 1..[N_x/4]; window 2 [sqrt(N_x/4)].
inline KSelection select_k_pickands_rho(const TransformedSample& ts) {
  if (ts.n_x < 16) {
    throw Error(ErrorCode::InsufficientStableRange,
                "select_k_pickands_rho: needs N_x >= 16, got " + std::to_string(ts.n_x));
  }
  KSelection sel;
  sel.target = SelectionTarget::PickandsRho;
  const std::size_t top = ts.n_x / 4;
  sel.grid.reserve(top);
  for (std::size_t k = 1; k <= top; ++k) sel.grid.push_back(detail::to_entry(pickands_rho(ts, top - k + 1)));
  sel.window_halfwidth = detail::floor_sqrt_ratio(ts.n_x, 4);
  detail::choose_window(sel);
  return sel;
}

/// Moment rho over k_n = N_x - k, k = 1..N_x-1; window 2 [sqrt(N_x)].
/// Thresholds with Z_(n-k_n) = 0 enter the grid as failures.
inline KSelection select_k_moment_rho(const TransformedSample& ts) {
  if (ts.n_x < 9) {
    throw Error(ErrorCode::InsufficientStableRange,
                "select_k_moment_rho: needs N_x >= 9, got " + std::to_string(ts.n_x));
  }
  KSelection sel;
  sel.target = SelectionTarget::MomentRho;
  const std::size_t top = ts.n_x - 1;
  const auto sums = moment_sums_sweep(ts, top);
  sel.grid.reserve(top);
  for (std::size_t k = 1; k <= top; ++k) {
    const std::size_t kn = ts.n_x - k;
    const auto& s = sums[kn - 1];
    if (s) {
      sel.grid.push_back(detail::to_entry(moment_rho_from_sums(*s)));
    } else {
      sel.grid.push_back(GridEntry{kn, std::numeric_limits<double>::quiet_NaN(), false});
    }
  }
  sel.window_halfwidth = detail::floor_sqrt_ratio(ts.n_x, 1);
  detail::choose_window(sel);
  return sel;
}

/// Frontier estimator over k = 1..[sqrt(N_x)]; window 2 max(3, [sqrt(N_x)/20]).
///
/// `estimator` maps k to a FrontierEstimate; precondition errors it throws for
/// a given k are recorded as failed grid entries.
template <class Estimator>
KSelection select_k_frontier(const TransformedSample& ts, Estimator&& estimator) {
  detail::require_conditioning(ts);
  KSelection sel;
  sel.target = SelectionTarget::Frontier;
  const std::size_t top = detail::floor_sqrt_ratio(ts.n_x, 1);
  sel.grid.reserve(top);
  for (std::size_t k = 1; k <= top; ++k) {
    try {
      const FrontierEstimate e = estimator(k);
      sel.grid.push_back(GridEntry{k, e.value, e.ok()});
    } catch (const Error&) {
      sel.grid.push_back(GridEntry{k, std::numeric_limits<double>::quiet_NaN(), false});
    }
  }
  sel.window_halfwidth = std::max<std::size_t>(3, detail::floor_sqrt_ratio(ts.n_x, 400));
  detail::choose_window(sel);
  return sel;
}

}  // namespace frontier
