#pragma once

// Covering witnesses: given closed sets X_1..X_n covering every face of the
// simplex appropriately, find a tight cluster of grid points containing a
// member of each X_i. Children prefer large own-coordinates here, and each
// grid point is endowed to the smallest coordinate j with x_j > 0 and
// x in X_j. On success every coordinate owns part of the exchange set, which
// is what yields one witness per set; refinement shrinks the cluster toward
// a common point of all the sets (whose existence the closedness hypothesis
// guarantees in the limit, not at any finite stage).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "setfamily.hpp"
#include "solver.hpp"

namespace nobully {

struct KkmApproxResult {
  std::vector<GridPoint> cluster;    // S, sorted
  std::vector<GridPoint> witnesses;  // witness[i]: member of S owned by i
  std::int64_t N = 0;
  double epsilon = 0.0;
  std::uint64_t steps = 0;
  PathTrace<GridPoint> trace;
};

inline KkmApproxResult kkm_approx(const SetFamily& family, double eps,
                                  SolveOptions opt = {.record_trace = false}) {
  family.validate();
  const int n = family.n;
  const std::int64_t N = grid_resolution(n, eps);

  const GridUniverse u(n, N, Direction::larger_better,
                       [&family](const GridPoint& x) {
                         return kkm_endowment(x, family);
                       });
  GridPoint start;
  start.coords.assign(static_cast<std::size_t>(n), 0);
  start.coords[0] = N;
  start.denom = N;

  auto walked = path_solve(u, start, opt);

  KkmApproxResult r;
  r.cluster = std::move(walked.exchange);
  r.N = N;
  r.epsilon = eps;
  r.steps = walked.steps;
  r.trace = std::move(walked.trace);
  std::sort(r.cluster.begin(), r.cluster.end());

  // every coordinate must own something
  std::vector<int> c_sorted = walked.owners;
  bool all = c_sorted.size() == static_cast<std::size_t>(n);
  for (int i = 0; all && i < n; ++i) all = c_sorted[static_cast<std::size_t>(i)] == i;
  if (!all)
    throw internal_error("covering walk ended without every coordinate owning "
                         "part of the exchange set");

  r.witnesses.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const GridPoint* w = nullptr;
    for (const auto& x : r.cluster)
      if (u.owner(x) == i && (!w || x < *w)) w = &x;
    if (!w) throw internal_error("owner lost its witness");
    if (!family.members[static_cast<std::size_t>(i)](w->to_simplex()))
      throw internal_error("witness escaped its own set");
    r.witnesses[static_cast<std::size_t>(i)] = *w;
  }

  // favorite own-coordinates: at least one grid unit each, total under N + n
  std::int64_t favorite_sum = 0;
  for (int i = 0; i < n; ++i) {
    const GridPoint beta = best_in(u, i, std::span<const GridPoint>(r.cluster));
    const std::int64_t own = beta.coords[static_cast<std::size_t>(i)];
    if (own < 1)
      throw internal_error("a favorite has an empty own coordinate");
    favorite_sum += own;
  }
  if (favorite_sum >= N + n)
    throw internal_error("favorite own-coordinates sum too high");
  if (static_cast<double>(max_coordinate_gap(std::span<const GridPoint>(
          r.cluster))) /
          static_cast<double>(N) >=
      eps)
    throw internal_error("cluster wider than epsilon");
  return r;
}

struct KkmRefineResult {
  std::vector<double> point;       // centroid of the final witnesses
  std::vector<bool> memberships;   // raw membership of the point, per set
  double diameter = 0.0;           // final cluster spread in the max norm
  int rounds = 0;
  std::int64_t N = 0;
  double epsilon = 0.0;
};

// Halve eps until cluster diameter plus grid spacing drops to tol, then
// report the centroid of the witnesses. Only the limit point is guaranteed
// to lie in every set; the returned memberships are honest point evaluations.
inline KkmRefineResult kkm_refine(const SetFamily& family, double tol,
                                  double eps0 = 0.5, int max_rounds = 12,
                                  SolveOptions opt = {.record_trace = false}) {
  family.validate();
  if (!(tol > 0.0)) throw input_error("tolerance must be positive");
  if (!(eps0 > 0.0)) throw input_error("initial epsilon must be positive");
  if (max_rounds < 1) throw input_error("need at least one round");

  double best_spread = std::numeric_limits<double>::infinity();
  std::vector<double> best_point;
  double eps = eps0;
  for (int m = 0; m < max_rounds; ++m, eps /= 2.0) {
    auto approx = kkm_approx(family, eps, opt);
    const int n = family.n;
    const double diameter =
        static_cast<double>(max_coordinate_gap(
            std::span<const GridPoint>(approx.cluster))) /
        static_cast<double>(approx.N);
    std::vector<double> centroid(static_cast<std::size_t>(n), 0.0);
    for (const auto& w : approx.witnesses) {
      const auto p = w.to_simplex();
      for (int i = 0; i < n; ++i)
        centroid[static_cast<std::size_t>(i)] +=
            p[static_cast<std::size_t>(i)] / static_cast<double>(n);
    }
    const double spread = diameter + 1.0 / static_cast<double>(approx.N);
    if (spread < best_spread) {
      best_spread = spread;
      best_point = centroid;
    }
    if (spread <= tol) {
      KkmRefineResult r;
      r.point = std::move(centroid);
      r.memberships.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        r.memberships.push_back(
            family.members[static_cast<std::size_t>(i)](r.point));
      r.diameter = diameter;
      r.rounds = m + 1;
      r.N = approx.N;
      r.epsilon = approx.epsilon;
      return r;
    }
  }
  throw no_convergence_error(
      "cluster spread still " + std::to_string(best_spread) + " after " +
          std::to_string(max_rounds) + " rounds",
      std::move(best_point), best_spread, max_rounds);
}

}  // namespace nobully
