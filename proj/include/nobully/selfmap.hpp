#pragma once

// Continuous self-maps of the standard simplex, wrapped behind pointwise
// validation: raw outputs may stray below zero or off the unit sum by at
// most the tolerance, and are clamped and renormalized before anyone else
// sees them.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace nobully {

namespace detail {

inline std::string point_to_string(std::span<const double> x) {
  std::ostringstream os;
  os.precision(12);
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace detail

class SelfMap {
 public:
  using Fn = std::function<std::vector<double>(std::span<const double>)>;

  SelfMap(int n, Fn raw, double tolerance = 1e-9)
      : n_(n), raw_(std::move(raw)), tol_(tolerance) {
    if (n_ < 1) throw input_error("self-map dimension must be at least 1");
    if (!raw_) throw input_error("self-map needs an evaluation function");
  }

  int dim() const { return n_; }
  double tolerance() const { return tol_; }

  // Validated evaluation: throws map_validation_error if the raw output
  // leaves the simplex by more than the tolerance, otherwise clamps small
  // negatives to zero and renormalizes to unit sum.
  std::vector<double> operator()(std::span<const double> x) const {
    std::vector<double> y = raw_(x);
    if (y.size() != static_cast<std::size_t>(n_))
      throw map_validation_error(
          "map returned " + std::to_string(y.size()) + " coordinates, expected " +
              std::to_string(n_),
          std::vector<double>(x.begin(), x.end()), y);
    double sum = 0.0;
    for (double v : y) {
      if (!(v >= -tol_) || !std::isfinite(v))
        throw map_validation_error(
            "map value " + detail::point_to_string(y) + " at " +
                detail::point_to_string(x) + " has a negative coordinate",
            std::vector<double>(x.begin(), x.end()), y);
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol_)
      throw map_validation_error(
          "map value " + detail::point_to_string(y) + " at " +
              detail::point_to_string(x) + " sums to " + std::to_string(sum),
          std::vector<double>(x.begin(), x.end()), y);
    double clamped_sum = 0.0;
    for (double& v : y) {
      if (v < 0.0) v = 0.0;
      clamped_sum += v;
    }
    for (double& v : y) v /= clamped_sum;
    return y;
  }

 private:
  int n_;
  Fn raw_;
  double tol_;
};

struct MapValidationIssue {
  std::vector<double> point;
  std::vector<double> raw;
  std::string reason;
};

struct MapValidationReport {
  std::vector<MapValidationIssue> issues;
  int points_checked = 0;
  bool ok() const { return issues.empty(); }
};

// Probe the map on the simplex vertices, the barycenter, and seeded random
// grid points, collecting every pointwise violation.
inline MapValidationReport validate_selfmap(const SelfMap& f,
                                            int random_points = 16,
                                            std::uint64_t seed = 0x5eed) {
  const int n = f.dim();
  MapValidationReport report;
  auto probe = [&](std::vector<double> x) {
    ++report.points_checked;
    try {
      (void)f(x);
    } catch (const map_validation_error& e) {
      report.issues.push_back(MapValidationIssue{x, e.raw, e.what()});
    }
  };

  for (int i = 0; i < n; ++i) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    v[static_cast<std::size_t>(i)] = 1.0;
    probe(std::move(v));
  }
  probe(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n));

  // uniform random points of the 1/denom grid via sorted cut positions
  std::mt19937_64 rng(seed);
  const std::int64_t denom = 64LL * n;
  for (int k = 0; k < random_points; ++k) {
    std::vector<std::int64_t> cuts;
    cuts.reserve(static_cast<std::size_t>(n) + 1);
    cuts.push_back(0);
    for (int i = 0; i < n - 1; ++i)
      cuts.push_back(static_cast<std::int64_t>(
          rng() % static_cast<std::uint64_t>(denom + 1)));
    cuts.push_back(denom);
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      x[static_cast<std::size_t>(i)] =
          static_cast<double>(cuts[static_cast<std::size_t>(i) + 1] -
                              cuts[static_cast<std::size_t>(i)]) /
          static_cast<double>(denom);
    probe(std::move(x));
  }
  return report;
}

// Convenience: validate and throw on the first recorded violation.
inline void require_valid_selfmap(const SelfMap& f, int random_points = 16,
                                  std::uint64_t seed = 0x5eed) {
  const auto report = validate_selfmap(f, random_points, seed);
  if (!report.ok()) {
    const auto& issue = report.issues.front();
    throw map_validation_error(issue.reason, issue.point, issue.raw);
  }
}

}  // namespace nobully
