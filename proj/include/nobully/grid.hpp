#pragma once

// The uniform grid on the simplex: points with integer coordinates summing
// to N, one child per coordinate, and exact integer lexicographic
// preferences. Child i reads coordinates in the cyclic order i, i+1, ...,
// i-1 and prefers a smaller (fixed-point construction) or larger (covering
// construction) value at the first difference. No floating point enters any
// comparison.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "selfmap.hpp"
#include "setfamily.hpp"
#include "universe.hpp"

namespace nobully {

struct GridPoint {
  std::vector<std::int64_t> coords;
  std::int64_t denom = 0;  // N; the point of the simplex is coords / denom

  int dim() const { return static_cast<int>(coords.size()); }

  std::vector<double> to_simplex() const {
    std::vector<double> x(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i)
      x[i] = static_cast<double>(coords[i]) / static_cast<double>(denom);
    return x;
  }

  friend bool operator==(const GridPoint&, const GridPoint&) = default;

  // plain lexicographic order on the coordinate vector; used for canonical
  // set storage and representative selection, not for preferences
  friend bool operator<(const GridPoint& a, const GridPoint& b) {
    if (a.coords != b.coords)
      return std::lexicographical_compare(a.coords.begin(), a.coords.end(),
                                          b.coords.begin(), b.coords.end());
    return a.denom < b.denom;
  }
};

struct GridPointHash {
  std::size_t operator()(const GridPoint& p) const {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    auto mix = [&h](std::uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    for (std::int64_t c : p.coords) mix(static_cast<std::uint64_t>(c));
    mix(static_cast<std::uint64_t>(p.denom));
    return static_cast<std::size_t>(h);
  }
};

// Number of grid points: C(N + n - 1, n - 1).
inline std::uint64_t grid_count(int n, std::int64_t N) {
  if (n < 1 || N < 1) throw input_error("grid needs n >= 1 and N >= 1");
  unsigned long long r = 1;
  for (int k = 1; k <= n - 1; ++k) {
    unsigned long long num;
    if (__builtin_mul_overflow(r, static_cast<unsigned long long>(N) + k, &num))
      throw size_error("grid point count overflows 64 bits for n=" +
                       std::to_string(n) + ", N=" + std::to_string(N));
    r = num / static_cast<unsigned long long>(k);  // exact: product of k consecutive integers
  }
  return r;
}

inline std::uint64_t grid_count_saturating(int n, std::int64_t N) {
  try {
    return grid_count(n, N);
  } catch (const size_error&) {
    return UINT64_MAX;
  }
}

// Smallest N with 2n/N < eps, the resolution both grid constructions use.
inline std::int64_t grid_resolution(int n, double eps) {
  if (!(eps > 0.0)) throw input_error("epsilon must be positive");
  auto N = static_cast<std::int64_t>(std::floor(2.0 * n / eps)) + 1;
  if (N < 1) N = 1;
  while (2.0 * n / static_cast<double>(N) >= eps) ++N;  // rounding guard
  return N;
}

enum class Direction { smaller_better, larger_better };

// Negative: a preferred by the child. Zero: equal points. Positive: b
// preferred. Exact integer comparisons only.
inline int lex_compare(int child, Direction dir, std::span<const std::int64_t> a,
                       std::span<const std::int64_t> b) {
  const int n = static_cast<int>(a.size());
  if (b.size() != a.size())
    throw input_error("lex_compare needs points of equal dimension");
  if (child < 0 || child >= n)
    throw input_error("child " + std::to_string(child) +
                      " is not a coordinate of the grid");
  for (int k = 0; k < n; ++k) {
    const int idx = (child + k) % n;
    const std::int64_t av = a[static_cast<std::size_t>(idx)];
    const std::int64_t bv = b[static_cast<std::size_t>(idx)];
    if (av == bv) continue;
    const bool a_wins = dir == Direction::smaller_better ? av < bv : av > bv;
    return a_wins ? -1 : 1;
  }
  return 0;
}

inline int lex_compare(int child, Direction dir, const GridPoint& a,
                       const GridPoint& b) {
  if (a.denom != b.denom)
    throw input_error("lex_compare needs points of the same grid");
  return lex_compare(child, dir, std::span<const std::int64_t>(a.coords),
                     std::span<const std::int64_t>(b.coords));
}

// The unique toy every other grid point beats for this child: the vertex
// with everything piled on the child's own coordinate (smaller better) or on
// the last coordinate of the child's cyclic order (larger better).
inline GridPoint worst_vertex(int child, Direction dir, int n, std::int64_t N) {
  if (n < 1 || N < 1) throw input_error("grid needs n >= 1 and N >= 1");
  if (child < 0 || child >= n)
    throw input_error("child " + std::to_string(child) + " is not a coordinate");
  GridPoint p;
  p.coords.assign(static_cast<std::size_t>(n), 0);
  p.denom = N;
  const int idx =
      dir == Direction::smaller_better ? child : (child + n - 1) % n;
  p.coords[static_cast<std::size_t>(idx)] = N;
  return p;
}

// Stream every composition of N into n nonnegative parts without
// materializing the grid.
template <class F>
void for_each_composition(int n, std::int64_t N, F&& f) {
  std::vector<std::int64_t> c(static_cast<std::size_t>(n), 0);
  auto rec = [&](auto&& self, int pos, std::int64_t rem) -> void {
    if (pos == n - 1) {
      c[static_cast<std::size_t>(pos)] = rem;
      f(std::span<const std::int64_t>(c));
      return;
    }
    for (std::int64_t v = 0; v <= rem; ++v) {
      c[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, rem - v);
    }
  };
  rec(rec, 0, N);
}

namespace detail {

// Inclusive integer interval; empty when lo > hi.
struct IvSet {
  // at most a handful of disjoint, sorted intervals
  std::vector<std::pair<std::int64_t, std::int64_t>> iv;

  static IvSet full(std::int64_t lo, std::int64_t hi) {
    IvSet s;
    if (lo <= hi) s.iv.push_back({lo, hi});
    return s;
  }
  void clear() { iv.clear(); }
  bool empty() const { return iv.empty(); }
  std::int64_t min() const { return iv.front().first; }
  std::int64_t max() const { return iv.back().second; }

  // intersect with a union of at most two intervals
  void restrict_to(std::span<const std::pair<std::int64_t, std::int64_t>> parts) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    for (const auto& [alo, ahi] : iv)
      for (const auto& [blo, bhi] : parts) {
        const std::int64_t lo = alo > blo ? alo : blo;
        const std::int64_t hi = ahi < bhi ? ahi : bhi;
        if (lo <= hi) out.push_back({lo, hi});
      }
    std::sort(out.begin(), out.end());
    iv = std::move(out);
  }
};

// Three-coordinate victim search in O(N): walk the victim-candidate's first
// coordinate (in the scanning child's cyclic order) from worst to best; each
// bound then confines the middle coordinate to a union of at most two
// intervals.
inline std::optional<GridPoint> victim_worst_grid3(
    int j, Direction dir, std::int64_t N,
    std::span<const std::pair<int, GridPoint>> bounds) {
  const int j0 = j, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
  const bool smaller = dir == Direction::smaller_better;

  // a runs over x_{j0}; for smaller-better the worst point maximizes (a, b),
  // for larger-better it minimizes them.
  for (std::int64_t step = 0; step <= N; ++step) {
    const std::int64_t a = smaller ? N - step : step;
    IvSet feasible = IvSet::full(0, N - a);
    for (const auto& [c, bp] : bounds) {
      const std::int64_t b0 = bp.coords[static_cast<std::size_t>(j0)];
      const std::int64_t b1 = bp.coords[static_cast<std::size_t>(j1)];
      const std::int64_t b2 = bp.coords[static_cast<std::size_t>(j2)];
      std::pair<std::int64_t, std::int64_t> parts[2];
      std::size_t nparts = 0;
      if (c == j0) {
        const bool strict = smaller ? a > b0 : a < b0;
        if (strict) {
          parts[nparts++] = {0, N - a};
        } else if (a == b0) {
          parts[nparts++] = smaller
                                ? std::pair<std::int64_t, std::int64_t>{b1 + 1, N - a}
                                : std::pair<std::int64_t, std::int64_t>{0, b1 - 1};
        }
        // else: bound already beaten on the first coordinate; no victim here
      } else if (c == j1) {
        parts[nparts++] = smaller
                              ? std::pair<std::int64_t, std::int64_t>{b1 + 1, N - a}
                              : std::pair<std::int64_t, std::int64_t>{0, b1 - 1};
        const std::int64_t tie_rest = N - a - b1;  // x_{j2} when b == b1
        const bool tie_ok = smaller ? tie_rest > b2 : tie_rest < b2;
        if (tie_ok && b1 >= 0 && b1 <= N - a) parts[nparts++] = {b1, b1};
      } else {  // c == j2
        // x_{j2} = N - a - b
        const std::int64_t eq_b = N - a - b2;  // b making x_{j2} == b2
        parts[nparts++] = smaller
                              ? std::pair<std::int64_t, std::int64_t>{0, eq_b - 1}
                              : std::pair<std::int64_t, std::int64_t>{eq_b + 1, N - a};
        const bool tie_ok = smaller ? a > b0 : a < b0;
        if (tie_ok && eq_b >= 0 && eq_b <= N - a) parts[nparts++] = {eq_b, eq_b};
      }
      if (nparts == 0) {
        feasible.clear();
        break;
      }
      feasible.restrict_to(
          std::span<const std::pair<std::int64_t, std::int64_t>>(parts, nparts));
      if (feasible.empty()) break;
    }
    if (!feasible.empty()) {
      const std::int64_t b = smaller ? feasible.max() : feasible.min();
      GridPoint p;
      p.coords.assign(3, 0);
      p.denom = N;
      p.coords[static_cast<std::size_t>(j0)] = a;
      p.coords[static_cast<std::size_t>(j1)] = b;
      p.coords[static_cast<std::size_t>(j2)] = N - a - b;
      return p;
    }
  }
  return std::nullopt;
}

}  // namespace detail

// ToyUniverse over the 1/N grid. Ownership is computed lazily through the
// endowment rule and memoized per point; the memo is not synchronized, so a
// universe instance belongs to one solver run at a time.
class GridUniverse {
 public:
  using toy_type = GridPoint;
  using EndowmentFn = std::function<int(const GridPoint&)>;

  GridUniverse(int n, std::int64_t N, Direction dir, EndowmentFn endow)
      : n_(n), N_(N), dir_(dir), endow_(std::move(endow)) {
    if (n_ < 1 || N_ < 1) throw input_error("grid needs n >= 1 and N >= 1");
    if (!endow_) throw input_error("grid universe needs an endowment rule");
  }

  int dim() const { return n_; }
  std::int64_t resolution() const { return N_; }
  Direction direction() const { return dir_; }

  int owner(const GridPoint& t) const {
    require(t);
    if (auto it = owner_memo_.find(t); it != owner_memo_.end())
      return it->second;
    const int c = endow_(t);
    if (c < 0 || c >= n_)
      throw internal_error("endowment rule returned child " +
                           std::to_string(c) + " outside 0.." +
                           std::to_string(n_ - 1));
    owner_memo_.emplace(t, c);
    return c;
  }

  bool prefers(int c, const GridPoint& a, const GridPoint& b) const {
    return lex_compare(c, dir_, a, b) < 0;
  }

  GridPoint worst_of(int c) const { return worst_vertex(c, dir_, n_, N_); }

  bool contains(const GridPoint& t) const {
    if (t.denom != N_ || t.dim() != n_) return false;
    std::int64_t sum = 0;
    for (std::int64_t c : t.coords) {
      if (c < 0) return false;
      sum += c;
    }
    return sum == N_;
  }

  std::uint64_t toy_count() const { return grid_count_saturating(n_, N_); }
  int child_count() const { return n_; }

  template <class F>
  void for_each_toy(F&& f) const {
    GridPoint buf;
    buf.denom = N_;
    for_each_composition(n_, N_, [&](std::span<const std::int64_t> c) {
      buf.coords.assign(c.begin(), c.end());
      f(static_cast<const GridPoint&>(buf));
    });
  }

  std::optional<GridPoint> victim_worst(
      int j, std::span<const VictimBound<GridPoint>> bounds) const {
    if (n_ == 3) return detail::victim_worst_grid3(j, dir_, N_, bounds);
    return victim_worst_scan(j, bounds);
  }

  // full-scan baseline the accelerated search must agree with
  std::optional<GridPoint> victim_worst_scan(
      int j, std::span<const VictimBound<GridPoint>> bounds) const {
    std::optional<std::vector<std::int64_t>> hit;
    for_each_composition(n_, N_, [&](std::span<const std::int64_t> x) {
      for (const auto& [c, bound] : bounds)
        if (lex_compare(c, dir_, std::span<const std::int64_t>(bound.coords), x) >= 0)
          return;  // bound does not strictly beat x
      if (!hit || lex_compare(j, dir_, std::span<const std::int64_t>(*hit), x) < 0)
        hit.emplace(x.begin(), x.end());  // keep the j-worst victim
    });
    if (!hit) return std::nullopt;
    return GridPoint{std::move(*hit), N_};
  }

 private:
  void require(const GridPoint& t) const {
    if (!contains(t))
      throw input_error("grid point is not on this grid");
  }

  int n_;
  std::int64_t N_;
  Direction dir_;
  EndowmentFn endow_;
  mutable std::unordered_map<GridPoint, int, GridPointHash> owner_memo_;
};

static_assert(ToyUniverse<GridUniverse>);

// Fixed-point endowment: the smallest coordinate i with x_i <= f_i(x).
// Exact arithmetic guarantees such an i exists (both coordinate sums are 1);
// if rounding leaves the set empty, fall back to the coordinate minimizing
// x_i - f_i(x), which keeps runs deterministic.
inline int afp_endowment(const GridPoint& x, const SelfMap& f) {
  const auto p = x.to_simplex();
  const auto y = f(p);
  for (int i = 0; i < x.dim(); ++i)
    if (p[static_cast<std::size_t>(i)] <= y[static_cast<std::size_t>(i)])
      return i;
  int arg = 0;
  double best = p[0] - y[0];
  for (int i = 1; i < x.dim(); ++i) {
    const double d = p[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)];
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  return arg;
}

// Covering endowment: the smallest j with x_j > 0 whose set contains x.
// Failure here is exactly a pointwise violation of the covering hypothesis.
inline int kkm_endowment(const GridPoint& x, const SetFamily& family) {
  family.validate();
  const auto p = x.to_simplex();
  for (int jj = 0; jj < x.dim(); ++jj) {
    if (x.coords[static_cast<std::size_t>(jj)] <= 0) continue;
    if (family.members[static_cast<std::size_t>(jj)](p)) return jj;
  }
  throw covering_error(
      "covering hypothesis fails: no set X_j with x_j > 0 contains the point",
      x.coords, x.denom);
}

// Largest single-coordinate gap over all pairs; the integer form of the
// cluster diameter in the max norm.
inline std::int64_t max_coordinate_gap(std::span<const GridPoint> pts) {
  std::int64_t gap = 0;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      for (std::size_t i = 0; i < pts[a].coords.size(); ++i) {
        const std::int64_t d = pts[a].coords[i] - pts[b].coords[i];
        const std::int64_t ad = d < 0 ? -d : d;
        if (ad > gap) gap = ad;
      }
  return gap;
}

}  // namespace nobully
