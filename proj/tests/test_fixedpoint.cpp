#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <nobully/dsl.hpp>
#include <nobully/fixed_point.hpp>

using namespace nobully;

namespace {

SelfMap builtin(const char* name, int n = 3) {
  return dsl::to_selfmap(dsl::builtin_map(name, n));
}

// independent re-check of everything an exchange set promises
void check_cluster(const AfpResult& r, const SelfMap& f) {
  const int n = f.dim();
  REQUIRE(!r.exchange.empty());
  REQUIRE(!r.owners.empty());

  // favorites lower-bound their child's coordinate across the cluster
  std::int64_t favorite_sum = 0;
  for (const auto& [i, beta] : r.favorites) {
    favorite_sum += beta.coords[static_cast<std::size_t>(i)];
    for (const auto& x : r.exchange)
      REQUIRE(beta.coords[static_cast<std::size_t>(i)] <=
              x.coords[static_cast<std::size_t>(i)]);
  }
  REQUIRE(favorite_sum > r.N - n);

  // unowned coordinates are pinned below n grid units
  for (const auto& x : r.exchange)
    for (int i = 0; i < n; ++i)
      if (!std::binary_search(r.owners.begin(), r.owners.end(), i)) {
        REQUIRE(x.coords[static_cast<std::size_t>(i)] >= 0);
        REQUIRE(x.coords[static_cast<std::size_t>(i)] < n);
      }

  // pairwise spread below epsilon
  for (const auto& x : r.exchange)
    for (const auto& y : r.exchange)
      for (int i = 0; i < n; ++i) {
        const double d = std::abs(static_cast<double>(
                             x.coords[static_cast<std::size_t>(i)] -
                             y.coords[static_cast<std::size_t>(i)])) /
                         static_cast<double>(r.N);
        REQUIRE(d < r.epsilon);
      }

  // a per-coordinate witness with x_i - eps <= f_i(x)
  for (int i = 0; i < n; ++i) {
    bool witnessed = false;
    for (const auto& x : r.exchange) {
      const auto p = x.to_simplex();
      const auto y = f(p);
      if (p[static_cast<std::size_t>(i)] - r.epsilon <=
          y[static_cast<std::size_t>(i)]) {
        witnessed = true;
        break;
      }
    }
    REQUIRE(witnessed);
  }
}

}  // namespace

TEST_CASE("self-maps validate pointwise") {
  CHECK(validate_selfmap(builtin("identity")).ok());

  const SelfMap bad(2, [](std::span<const double>) {
    return std::vector<double>{0.6, 0.6};
  });
  const auto report = validate_selfmap(bad);
  CHECK(!report.ok());
  CHECK(report.issues.size() == static_cast<std::size_t>(report.points_checked));
  CHECK_THROWS_AS(require_valid_selfmap(bad), map_validation_error);

  // softmax-wrapped expressions always land inside the simplex
  CHECK(validate_selfmap(dsl::to_selfmap(
            dsl::parse_map_text("wrapper: softmax\n2*x1 - x2\nx2\nx3^2\n")))
            .ok());
}

TEST_CASE("self-maps reject wrong dimensions") {
  const SelfMap f(3, [](std::span<const double>) {
    return std::vector<double>{0.5, 0.5};
  });
  CHECK_THROWS_AS(f(std::vector<double>{0.4, 0.3, 0.3}), map_validation_error);
  CHECK_THROWS_AS(SelfMap(0, [](std::span<const double>) {
                    return std::vector<double>{};
                  }),
                  input_error);
}

TEST_CASE("self-map wrapper clamps and renormalizes") {
  const SelfMap f(2, [](std::span<const double>) {
    return std::vector<double>{-5e-10, 1.0 + 2e-10};
  });
  const auto y = f(std::vector<double>{0.5, 0.5});
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 1.0);

  const SelfMap worse(2, [](std::span<const double>) {
    return std::vector<double>{-1e-3, 1.0 + 1e-3};
  });
  CHECK_THROWS_AS(worse(std::vector<double>{0.5, 0.5}), map_validation_error);
}

TEST_CASE("grid resolution is the smallest with 2n/N below epsilon") {
  CHECK(grid_resolution(3, 0.5) == 13);
  CHECK(grid_resolution(3, 0.1) == 61);
  CHECK(grid_resolution(2, 1.0) == 5);
  CHECK(grid_resolution(1, 3.0) == 1);
  for (const double eps : {0.7, 0.25, 0.031}) {
    const auto N = grid_resolution(3, eps);
    CHECK(6.0 / static_cast<double>(N) < eps);
    if (N > 1) CHECK(6.0 / static_cast<double>(N - 1) >= eps);
  }
  CHECK_THROWS_AS(grid_resolution(3, 0.0), input_error);
}

TEST_CASE("identity map pins the first vertex") {
  const auto f = builtin("identity");
  const auto r = approx_fixed_point(f, 0.5);
  CHECK(r.N == 13);
  REQUIRE(r.exchange.size() == 1);
  CHECK(r.exchange[0].coords == std::vector<std::int64_t>{13, 0, 0});
  CHECK(r.owners == std::vector<int>{0});
  check_cluster(r, f);
}

TEST_CASE("rotation map clusters at the barycenter") {
  const auto f = builtin("cyclic");
  const auto r = approx_fixed_point(f, 0.1);
  check_cluster(r, f);
  for (const auto& x : r.exchange)
    for (double v : x.to_simplex()) CHECK(std::abs(v - 1.0 / 3.0) <= 0.1);
}

TEST_CASE("constant map clusters at its value") {
  const auto f = builtin("constant:0.2,0.3,0.5");
  const auto r = approx_fixed_point(f, 0.1);
  check_cluster(r, f);
  const double slack = 0.1 + 3.0 / static_cast<double>(r.N);
  const std::vector<double> c{0.2, 0.3, 0.5};
  for (const auto& x : r.exchange) {
    const auto p = x.to_simplex();
    for (int i = 0; i < 3; ++i)
      CHECK(std::abs(p[static_cast<std::size_t>(i)] -
                     c[static_cast<std::size_t>(i)]) <= slack);
  }
}

TEST_CASE("exchange-set properties hold across builtins and spreads") {
  for (const char* name :
       {"identity", "cyclic", "softmax-demo", "constant:0.2,0.3,0.5"}) {
    const auto f = builtin(name);
    for (const double eps : {0.5, 0.1}) {
      CAPTURE(name, eps);
      check_cluster(approx_fixed_point(f, eps), f);
    }
  }
}

TEST_CASE("other dimensions run on the scanned victim search") {
  // n != 3 takes the streamed-scan path end to end
  const auto two = dsl::to_selfmap(dsl::builtin_map("cyclic", 2));
  const auto r2 = find_fixed_point(two, 1e-2);
  CHECK(std::abs(r2.x[0] - 0.5) <= 2e-2);
  CHECK(std::abs(r2.x[1] - 0.5) <= 2e-2);

  const auto four = dsl::to_selfmap(dsl::builtin_map("cyclic", 4));
  const auto r4 = approx_fixed_point(four, 0.4);
  check_cluster(r4, four);
  for (const auto& x : r4.exchange)
    for (double v : x.to_simplex()) CHECK(std::abs(v - 0.25) <= 0.4);

  const auto c5 = dsl::to_selfmap(dsl::builtin_map("constant:0.1,0.2,0.3,0.25,0.15", 5));
  check_cluster(approx_fixed_point(c5, 0.8), c5);
}

TEST_CASE("per-step re-checking accepts whole grid walks") {
  // full no-bullying scans at every step; affordable at coarse resolutions
  SolveOptions opt;
  opt.check_each_step = true;
  opt.record_trace = false;
  for (const char* name : {"cyclic", "constant:0.2,0.3,0.5"}) {
    const auto f = builtin(name);
    CHECK_NOTHROW(approx_fixed_point(f, 0.4, opt));
  }
}

TEST_CASE("approximation is deterministic") {
  const auto f = builtin("cyclic");
  const auto a = approx_fixed_point(f, 0.1);
  const auto b = approx_fixed_point(f, 0.1);
  CHECK(a.exchange == b.exchange);
  CHECK(a.owners == b.owners);
  CHECK(a.steps == b.steps);
}

TEST_CASE("refinement meets the identity map exactly") {
  const auto r = find_fixed_point(builtin("identity"), 1e-6);
  CHECK(r.x == std::vector<double>{1.0, 0.0, 0.0});
  CHECK(r.residual == 0.0);
  CHECK(r.rounds == 1);
}

TEST_CASE("refinement pins the rotation map near the barycenter") {
  const auto r = find_fixed_point(builtin("cyclic"), 1e-2);
  REQUIRE(r.residual <= 1e-2);
  for (double v : r.x) CHECK(std::abs(v - 1.0 / 3.0) <= 2e-2);
}

TEST_CASE("refinement tracks a constant map's value") {
  const auto r = find_fixed_point(builtin("constant:0.2,0.3,0.5"), 1e-3);
  REQUIRE(r.residual <= 1e-3);
  const std::vector<double> c{0.2, 0.3, 0.5};
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(r.x[static_cast<std::size_t>(i)] -
                   c[static_cast<std::size_t>(i)]) <= 1e-3);
}

TEST_CASE("an unreachable tolerance reports the best residual found") {
  try {
    find_fixed_point(builtin("cyclic"), 1e-15, 0.5, 3);
    FAIL("expected no_convergence_error");
  } catch (const no_convergence_error& e) {
    CHECK(e.rounds == 3);
    CHECK(e.best_residual > 0.0);
    CHECK(e.best_residual < 0.5);
    CHECK(e.best_point.size() == 3);
  }
}

TEST_CASE("the residual is the max coordinate gap to the image") {
  const auto f = builtin("constant:0.2,0.3,0.5");
  const std::vector<double> x{0.25, 0.25, 0.5};
  CHECK(residual_at(f, x) == Catch::Approx(0.05).margin(1e-12));
}
