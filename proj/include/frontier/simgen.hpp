#pragma once

// Seeded generators for the two analytic scenarios and their exact truth.
//
//  UniformTriangle: (X, Y) uniform on {0 <= y <= x <= 1}.
//    phi(x) = x, F_X(x) = x^2, F_X(x)[1 - F(y|x)] = (x - y)^2, rho = 2, ell = 1.
//  CobbDouglas: Y = sqrt(X) exp(-U), X ~ U[0,1], U ~ Exp(3).
//    phi(x) = sqrt(x), F_X(x) = x, F(y|x) = 3 y^2 / x - 2 y^3 / x^{3/2}, rho = 2,
//    L_x(z) = F_X(x) [3 phi(x) - 2/z] / phi(x)^3, ell = 3.
//
// F(y|x) is always P(Y <= y | X <= x).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frontier/core.hpp"
#include "frontier/error.hpp"
#include "frontier/rng.hpp"

namespace frontier {

enum class ScenarioKind { UniformTriangle, CobbDouglas };

inline std::string_view to_string(ScenarioKind k) {
  return k == ScenarioKind::UniformTriangle ? "triangle" : "cobb-douglas";
}

inline ScenarioKind parse_scenario(std::string_view name) {
  if (name == "triangle" || name == "uniform-triangle") return ScenarioKind::UniformTriangle;
  if (name == "cobb-douglas" || name == "cobbdouglas") return ScenarioKind::CobbDouglas;
  throw Error(ErrorCode::ConfigError, "unknown scenario '" + std::string(name) + "'");
}

struct Scenario {
  ScenarioKind kind = ScenarioKind::UniformTriangle;
  std::size_t n = 1;
  std::uint64_t seed = 0;
};

struct GroundTruth {
  std::function<double(double)> frontier;
  std::function<double(double)> rho;
  std::function<double(double)> ell;  // lim_{z -> inf} L_x(z)
  std::function<double(double, double)> slowly_varying;  // L_x(z)
  std::function<double(double, double)> conditional_cdf;  // (y, x) -> F(y|x)
  std::function<double(double)> fx;

  /// phi_{1 - p/F_X(x)}(x): the y with F_X(x) [1 - F(y|x)] = p, by bisection.
  double high_quantile(double x, double p) const {
    const double mass = fx(x);
    if (!(p > 0.0) || p > mass) throw Error(ErrorCode::InvalidArgument, "high_quantile: need 0 < p <= F_X(x)");
    double lo = 0.0;
    double hi = frontier(x);
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mass * (1.0 - conditional_cdf(mid, x)) > p) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }
};

inline GroundTruth ground_truth(ScenarioKind kind) {
  GroundTruth t;
  if (kind == ScenarioKind::UniformTriangle) {
    t.frontier = [](double x) { return std::clamp(x, 0.0, 1.0); };
    t.rho = [](double) { return 2.0; };
    t.ell = [](double) { return 1.0; };
    t.slowly_varying = [](double, double) { return 1.0; };
    t.fx = [](double x) {
      const double c = std::clamp(x, 0.0, 1.0);
      return c * c;
    };
    t.conditional_cdf = [](double y, double x) {
      const double c = std::clamp(x, 0.0, 1.0);
      if (y <= 0.0) return 0.0;
      if (y >= c) return 1.0;
      const double r = (c - y) / c;
      return 1.0 - r * r;
    };
  } else {
    t.frontier = [](double x) { return std::sqrt(std::clamp(x, 0.0, 1.0)); };
    t.rho = [](double) { return 2.0; };
    t.ell = [](double) { return 3.0; };  // F_X(x) 3 phi / phi^3 = 3
    t.slowly_varying = [](double x, double z) {
      const double c = std::clamp(x, 0.0, 1.0);
      const double phi = std::sqrt(c);
      return c * (3.0 * phi - 2.0 / z) / (phi * phi * phi);
    };
    t.fx = [](double x) { return std::clamp(x, 0.0, 1.0); };
    t.conditional_cdf = [](double y, double x) {
      const double c = std::clamp(x, 0.0, 1.0);
      if (y <= 0.0) return 0.0;
      if (y >= std::sqrt(c)) return 1.0;
      return 3.0 * y * y / c - 2.0 * y * y * y / (c * std::sqrt(c));
    };
  }
  return t;
}

/// X = max(U1, U2) has density 2x on [0,1]; Y | X = x is uniform on [0, x].
inline Dataset gen_uniform_triangle(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
  Xoshiro256 rng(seed);
  std::vector<Observation> obs(n);
  for (auto& o : obs) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double x = std::max(u1, u2);
    o.x = {x};
    o.y = x * rng.uniform();
  }
  return Dataset(std::move(obs));
}

/// X ~ U[0,1], U = -log(1 - V)/3, Y = sqrt(X) exp(-U).
inline Dataset gen_cobb_douglas(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
  Xoshiro256 rng(seed);
  std::vector<Observation> obs(n);
  for (auto& o : obs) {
    const double x = rng.uniform();
    const double u = -std::log1p(-rng.uniform()) / 3.0;
    o.x = {x};
    o.y = std::sqrt(x) * std::exp(-u);
  }
  return Dataset(std::move(obs));
}

inline Dataset generate(const Scenario& s) {
  return s.kind == ScenarioKind::UniformTriangle ? gen_uniform_triangle(s.n, s.seed)
                                                 : gen_cobb_douglas(s.n, s.seed);
}

/// Copy of `ds` with one extra observation (x0, y0) appended.
inline Dataset inject_outlier(const Dataset& ds, std::vector<double> x0, double y0) {
  if (x0.size() != ds.input_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "outlier has wrong input dimension");
  }
  auto obs = ds.observations();
  obs.push_back(Observation{std::move(x0), y0});
  return Dataset(std::move(obs));
}

}  // namespace frontier
