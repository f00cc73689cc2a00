#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <nobully/dsl.hpp>
#include <nobully/kkm.hpp>

using namespace nobully;

namespace {

SetFamily barycenter_family() {
  SetFamily fam;
  fam.n = 3;
  for (int i = 0; i < 3; ++i)
    fam.members.push_back([i](std::span<const double> x) {
      return x[static_cast<std::size_t>(i)] >= 1.0 / 3.0 - 1e-12;
    });
  return fam;
}

SetFamily full_family(int n) {
  SetFamily fam;
  fam.n = n;
  for (int i = 0; i < n; ++i)
    fam.members.push_back([](std::span<const double>) { return true; });
  return fam;
}

SetFamily half_family() {
  SetFamily fam;
  fam.n = 2;
  fam.members.push_back([](std::span<const double> x) { return x[0] >= 0.5; });
  fam.members.push_back([](std::span<const double> x) { return x[1] >= 0.5; });
  return fam;
}

void check_witnesses(const KkmApproxResult& r, const SetFamily& fam) {
  REQUIRE(r.witnesses.size() == static_cast<std::size_t>(fam.n));
  for (int i = 0; i < fam.n; ++i) {
    // each witness is in the cluster and in its set
    const auto& w = r.witnesses[static_cast<std::size_t>(i)];
    CHECK(std::find(r.cluster.begin(), r.cluster.end(), w) != r.cluster.end());
    CHECK(fam.members[static_cast<std::size_t>(i)](w.to_simplex()));
  }
  const double spread =
      static_cast<double>(max_coordinate_gap(
          std::span<const GridPoint>(r.cluster))) /
      static_cast<double>(r.N);
  CHECK(spread < r.epsilon);
}

}  // namespace

TEST_CASE("witness clusters for the barycenter family") {
  const auto fam = barycenter_family();
  for (const double eps : {0.5, 0.1}) {
    const auto r = kkm_approx(fam, eps);
    check_witnesses(r, fam);
    for (const auto& x : r.cluster)
      for (double v : x.to_simplex()) CHECK(std::abs(v - 1.0 / 3.0) <= eps);
  }
}

TEST_CASE("the full family accepts any cluster") {
  const auto fam = full_family(3);
  const auto r = kkm_approx(fam, 0.25);
  check_witnesses(r, fam);
}

TEST_CASE("half-space family witnesses straddle the midpoint") {
  const auto fam = half_family();
  const auto r = kkm_approx(fam, 0.05);
  check_witnesses(r, fam);
  for (const auto& w : r.witnesses) {
    const auto p = w.to_simplex();
    CHECK(std::abs(p[0] - 0.5) <= 0.05);
    CHECK(std::abs(p[1] - 0.5) <= 0.05);
  }
}

TEST_CASE("covering violations surface with the offending point") {
  SetFamily fam;
  fam.n = 2;
  fam.members.push_back([](std::span<const double> x) { return x[0] >= 0.9; });
  fam.members.push_back([](std::span<const double> x) { return x[1] >= 0.9; });
  try {
    kkm_refine(fam, 0.05);
    FAIL("expected covering_error");
  } catch (const covering_error& e) {
    CHECK(e.coords.size() == 2);
    // the reported point really is uncovered
    CHECK(static_cast<double>(e.coords[0]) / static_cast<double>(e.denom) < 0.9);
    CHECK(static_cast<double>(e.coords[1]) / static_cast<double>(e.denom) < 0.9);
  }
}

TEST_CASE("refinement reaches the barycenter") {
  const auto r = kkm_refine(barycenter_family(), 0.02);
  REQUIRE(r.point.size() == 3);
  for (double v : r.point) CHECK(std::abs(v - 1.0 / 3.0) <= 0.02);
  for (bool m : r.memberships) CHECK(m);
  CHECK(r.diameter + 1.0 / static_cast<double>(r.N) <= 0.02);
}

TEST_CASE("refinement on the full family stops in one round") {
  const auto r = kkm_refine(full_family(2), 0.5);
  CHECK(r.rounds == 1);
}

TEST_CASE("refinement pins the half-space family's corner point") {
  const auto r = kkm_refine(half_family(), 0.02);
  CHECK(std::abs(r.point[0] - 0.5) <= 0.02);
  CHECK(std::abs(r.point[1] - 0.5) <= 0.02);
}

TEST_CASE("kkm runs are deterministic") {
  const auto fam = barycenter_family();
  const auto a = kkm_approx(fam, 0.1);
  const auto b = kkm_approx(fam, 0.1);
  CHECK(a.cluster == b.cluster);
  CHECK(a.witnesses == b.witnesses);
  CHECK(a.steps == b.steps);
}

TEST_CASE("family validation") {
  SetFamily fam;
  fam.n = 2;
  fam.members.push_back([](std::span<const double>) { return true; });
  CHECK_THROWS_AS(kkm_approx(fam, 0.1), input_error);  // missing member
}
