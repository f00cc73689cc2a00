#pragma once

// Approximate Brouwer fixed points on the simplex, and the refinement loop
// that drives the approximation error below a requested residual.
//
// For a target spread eps the grid resolution is the smallest N with
// 2n/N < eps. Each grid point goes to the smallest coordinate i whose value
// does not exceed f_i there, children prefer small own-coordinates, and the
// exchange set E returned by the walk is then a cluster of pairwise
// max-distance < eps containing, for every coordinate i, a point x with
// x_i - eps <= f_i(x). Those facts are re-asserted on every run.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "selfmap.hpp"
#include "solver.hpp"

namespace nobully {

struct AfpResult {
  std::vector<GridPoint> exchange;  // E, sorted
  std::vector<int> owners;          // C, sorted
  std::vector<std::pair<int, GridPoint>> favorites;  // (i, best_i(E)) for i in C
  std::int64_t N = 0;
  double epsilon = 0.0;
  std::uint64_t steps = 0;
  PathTrace<GridPoint> trace;  // empty unless requested via SolveOptions
};

namespace detail {

inline void ensure(bool ok, const std::string& what) {
  if (!ok) throw internal_error("exchange-set property failed: " + what);
}

}  // namespace detail

// Default trace recording is off here: grid walks can be long and the
// candidate sequence is rarely wanted. `steps` is always counted.
inline AfpResult approx_fixed_point(const SelfMap& f, double eps,
                                    SolveOptions opt = {.record_trace = false}) {
  const int n = f.dim();
  const std::int64_t N = grid_resolution(n, eps);

  const GridUniverse u(n, N, Direction::smaller_better,
                       [&f](const GridPoint& x) { return afp_endowment(x, f); });
  GridPoint start;  // the vertex piling everything on the first coordinate
  start.coords.assign(static_cast<std::size_t>(n), 0);
  start.coords[0] = N;
  start.denom = N;

  auto walked = path_solve(u, start, opt);

  AfpResult r;
  r.exchange = std::move(walked.exchange);
  r.owners = std::move(walked.owners);
  r.N = N;
  r.epsilon = eps;
  r.steps = walked.steps;
  r.trace = std::move(walked.trace);
  std::sort(r.exchange.begin(), r.exchange.end());
  for (int i : r.owners)
    r.favorites.emplace_back(
        i, best_in(u, i, std::span<const GridPoint>(r.exchange)));

  // Everything below holds by construction; failures mean a solver bug.
  detail::ensure(!r.exchange.empty() && !r.owners.empty(), "empty result");
  std::int64_t favorite_sum = 0;
  for (const auto& [i, beta] : r.favorites) {
    favorite_sum += beta.coords[static_cast<std::size_t>(i)];
    for (const auto& x : r.exchange)
      detail::ensure(beta.coords[static_cast<std::size_t>(i)] <=
                         x.coords[static_cast<std::size_t>(i)],
                     "a member's own coordinate undercuts the favorite");
  }
  detail::ensure(favorite_sum > N - n, "favorite own-coordinates sum too low");
  for (const auto& x : r.exchange)
    for (int i = 0; i < n; ++i)
      if (!std::binary_search(r.owners.begin(), r.owners.end(), i))
        detail::ensure(x.coords[static_cast<std::size_t>(i)] >= 0 &&
                           x.coords[static_cast<std::size_t>(i)] < n,
                       "unowned coordinate not pinned near zero");
  detail::ensure(static_cast<double>(max_coordinate_gap(
                     std::span<const GridPoint>(r.exchange))) /
                         static_cast<double>(N) <
                     eps,
                 "cluster wider than epsilon");
  for (int i = 0; i < n; ++i) {
    bool witnessed = false;
    for (const auto& x : r.exchange) {
      const bool owned_here =
          std::binary_search(r.owners.begin(), r.owners.end(), i) &&
          u.owner(x) == i;
      const bool unowned =
          !std::binary_search(r.owners.begin(), r.owners.end(), i);
      if (!owned_here && !unowned) continue;
      const auto p = x.to_simplex();
      const auto y = f(p);
      if (p[static_cast<std::size_t>(i)] - eps <= y[static_cast<std::size_t>(i)]) {
        witnessed = true;
        break;
      }
    }
    detail::ensure(witnessed, "no witness for coordinate " + std::to_string(i));
  }
  return r;
}

struct FixedPointResult {
  std::vector<double> x;
  double residual = 0.0;
  int rounds = 0;  // approximation rounds performed
  std::int64_t N = 0;
  double epsilon = 0.0;
  std::size_t cluster_size = 0;
};

inline double residual_at(const SelfMap& f, std::span<const double> x) {
  const auto y = f(x);
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    r = std::max(r, std::abs(x[i] - y[i]));
  return r;
}

// Halve eps until the representative point (the lexicographically smallest
// member of the exchange set) has residual at or below tol. Running out of
// rounds means the budget was too small for the tolerance, not that no fixed
// point exists.
inline FixedPointResult find_fixed_point(const SelfMap& f, double tol,
                                         double eps0 = 0.5, int max_rounds = 12,
                                         SolveOptions opt = {.record_trace = false}) {
  if (!(tol > 0.0)) throw input_error("tolerance must be positive");
  if (!(eps0 > 0.0)) throw input_error("initial epsilon must be positive");
  if (max_rounds < 1) throw input_error("need at least one round");

  std::vector<double> best_x;
  double best_residual = std::numeric_limits<double>::infinity();
  double eps = eps0;
  for (int m = 0; m < max_rounds; ++m, eps /= 2.0) {
    auto afp = approx_fixed_point(f, eps, opt);
    const GridPoint& rep =
        *std::min_element(afp.exchange.begin(), afp.exchange.end());
    const auto x = rep.to_simplex();
    const double res = residual_at(f, x);
    if (res < best_residual) {
      best_residual = res;
      best_x = x;
    }
    if (res <= tol)
      return FixedPointResult{x,     res,         m + 1,
                              afp.N, afp.epsilon, afp.exchange.size()};
  }
  throw no_convergence_error(
      "residual still " + std::to_string(best_residual) + " after " +
          std::to_string(max_rounds) + " rounds; raise max_rounds or tol",
      std::move(best_x), best_residual, max_rounds);
}

}  // namespace nobully
