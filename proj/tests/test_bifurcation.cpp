#include <doctest.h>

#include <algorithm>

#include "kickjt/bifurcation.hpp"
#include "support.hpp"

using namespace kickjt;
using testing::reference_config;

namespace {

bool at_origin(const FixedPoint& f) {
  const auto& o = f.point.osc;
  return std::max({std::abs(o.qx), std::abs(o.qy), std::abs(o.px), std::abs(o.py)}) < 1e-9;
}

std::vector<FixedPoint> census(double lambda) {
  const auto cfg = reference_config(lambda);
  const auto seeds = default_seeds(cfg);
  return find_fixed_points(cfg, seeds).points;
}

int count(const std::vector<FixedPoint>& pts, Stability s, bool origin) {
  return static_cast<int>(std::count_if(pts.begin(), pts.end(), [&](const FixedPoint& f) {
    return f.classification == s && at_origin(f) == origin;
  }));
}

const FixedPoint* pole(const std::vector<FixedPoint>& pts, double sz) {
  for (const auto& f : pts)
    if (at_origin(f) && std::abs(f.point.spin.z - sz) < 1e-12) return &f;
  return nullptr;
}

bool parity_images(const FixedPoint& a, const FixedPoint& b, double tol) {
  const auto& p = a.point;
  const auto& q = b.point;
  const double d[] = {p.osc.qx + q.osc.qx, p.osc.qy + q.osc.qy, p.osc.px + q.osc.px, p.osc.py + q.osc.py,
                      p.spin.x + q.spin.x, p.spin.y + q.spin.y, p.spin.z - q.spin.z};
  return std::all_of(std::begin(d), std::end(d), [&](double x) { return std::abs(x) <= tol; });
}

}  // namespace

TEST_CASE("critical couplings at the reference parameters") {
  const auto c = critical_couplings(reference_omega(), reference_delta());
  REQUIRE(c.size() == 2);
  CHECK(c[0].branch == Branch::Plus);
  CHECK(c[1].branch == Branch::Minus);
  CHECK(c[0].value == doctest::Approx(0.26425).epsilon(2e-5));
  CHECK(c[1].value == doctest::Approx(0.45770).epsilon(2e-5));
  for (const auto& b : c) {
    const double cot = 1.0 / std::tan(reference_delta() / 2.0);
    const double rhs = 8.0 * std::tan(reference_omega() / 2.0) / (cot + (b.branch == Branch::Plus ? 1.0 : -1.0));
    CHECK(std::abs(b.value * b.value - rhs) <= 1e-12);
  }
}

TEST_CASE("singular denominator leaves the other branch") {
  const auto c = critical_couplings(0.2, std::numbers::pi / 2.0);
  REQUIRE(c.size() == 1);
  CHECK(c[0].branch == Branch::Plus);
  CHECK(c[0].value * c[0].value == doctest::Approx(8.0 * std::tan(0.1) / 2.0));
}

TEST_CASE("no positive branch") {
  for (double w : {0.1, 1.0, 3.0}) CHECK(critical_couplings(w, 3.0 * std::numbers::pi / 2.0).empty());
}

TEST_CASE("classification rules") {
  CHECK(classify(0, true, false) == Stability::Stable);
  CHECK(classify(0, false, false) == Stability::Unstable);
  CHECK(classify(1, false, false) == Stability::Saddle);
  CHECK(classify(2, false, false) == Stability::Unstable);
  CHECK(classify(0, true, true) == Stability::Degenerate);
  CHECK(classify(1, false, true) == Stability::Degenerate);
}

TEST_CASE("census below the first bifurcation") {
  const auto pts = census(0.15);
  REQUIRE(pts.size() == 2);
  REQUIRE(pole(pts, -0.5));
  REQUIRE(pole(pts, 0.5));
  CHECK(pole(pts, -0.5)->classification == Stability::Stable);
  CHECK(pole(pts, 0.5)->classification == Stability::Unstable);
}

TEST_CASE("census between the bifurcations") {
  const auto pts = census(0.32);
  REQUIRE(pole(pts, -0.5));
  CHECK(pole(pts, -0.5)->classification == Stability::Saddle);
  CHECK(count(pts, Stability::Stable, false) == 2);
  CHECK(pts.size() == 4);
  std::vector<FixedPoint> stable;
  for (const auto& f : pts)
    if (f.classification == Stability::Stable && !at_origin(f)) stable.push_back(f);
  REQUIRE(stable.size() == 2);
  CHECK(parity_images(stable[0], stable[1], 1e-8));
}

TEST_CASE("census above the second bifurcation") {
  const auto pts = census(0.5);
  REQUIRE(pole(pts, -0.5));
  CHECK(pole(pts, -0.5)->classification == Stability::Unstable);
  CHECK(pole(pts, -0.5)->hyperbolic_pairs == 2);
  CHECK(count(pts, Stability::Saddle, false) == 2);
  CHECK(count(pts, Stability::Stable, false) == 2);
  std::vector<FixedPoint> saddles;
  for (const auto& f : pts)
    if (f.classification == Stability::Saddle) saddles.push_back(f);
  REQUIRE(saddles.size() == 2);
  CHECK(parity_images(saddles[0], saddles[1], 1e-8));
}

TEST_CASE("fixed points satisfy the map when re-checked") {
  for (double lambda : {0.15, 0.32, 0.5}) {
    const auto cfg = reference_config(lambda);
    for (const auto& f : census(lambda)) {
      CHECK(testing::max_abs_diff(step(f.point, cfg), f.point) <= 10.0 * cfg.numerics().newton_tol);
      CHECK(f.residual <= cfg.numerics().newton_tol);
      CHECK(std::is_sorted(f.multiplier_moduli.begin(), f.multiplier_moduli.end()));
    }
  }
}

TEST_CASE("classification agrees with the multiplier moduli") {
  for (double lambda : {0.15, 0.32, 0.5}) {
    for (const auto& f : census(lambda)) {
      const int expanding = static_cast<int>(std::count_if(f.multiplier_moduli.begin(), f.multiplier_moduli.end(),
                                                           [](double m) { return m > 1.0 + kStabilityTol; }));
      CHECK(expanding == f.hyperbolic_pairs);
      if (f.classification == Stability::Stable) CHECK(f.multiplier_moduli.back() <= 1.0 + kStabilityTol);
      if (f.classification == Stability::Saddle) CHECK(expanding == 1);
    }
  }
}

TEST_CASE("no off-origin fixed point below the first bifurcation") {
  const auto cfg = reference_config(0.15);
  const double k = -std::tan(cfg.omega() / 2.0);
  std::vector<PhasePoint> seeds;
  for (int i = -5; i <= 5; ++i)
    for (int j = -5; j <= 5; ++j)
      for (double theta : {0.6, 1.2, 1.9, 2.5})
        for (double phi : {0.0, 1.6, 3.2, 4.8})
          seeds.push_back({{double(i), double(j), k * i, k * j}, SpinVector::from_angles(theta, phi)});
  const auto found = find_fixed_points(cfg, seeds);
  for (const auto& f : found.points) {
    if (std::hypot(f.point.osc.qx, f.point.osc.qy) <= 5.0) CHECK(at_origin(f));
  }
}

TEST_CASE("parallel search equals the serial reference") {
  const auto cfg = reference_config(0.5);
  const auto seeds = default_seeds(cfg);
  const auto a = find_fixed_points(cfg, seeds, Exec::Serial);
  const auto b = find_fixed_points(cfg, seeds, Exec::Parallel);
  REQUIRE(a.points.size() == b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(testing::max_abs_diff(a.points[i].point, b.points[i].point) == 0.0);
  CHECK(a.failures.size() == b.failures.size());
}

TEST_CASE("branch scan below the first bifurcation") {
  std::vector<double> grid;
  for (int i = 0; i <= 25; ++i) grid.push_back(0.01 * i);
  for (const auto& row : branch_scan(reference_config(0.0), grid)) {
    int stable = 0;
    for (const auto& bp : row.points) {
      if (bp.fixed_point.classification != Stability::Stable) continue;
      ++stable;
      CHECK(at_origin(bp.fixed_point));
      CHECK(bp.fixed_point.point.spin.z == -0.5);
    }
    CHECK(stable == 1);
  }
}

TEST_CASE("branch scan between the bifurcations") {
  std::vector<double> grid;
  for (int i = 27; i <= 45; ++i) grid.push_back(0.01 * i);
  const auto rows = branch_scan(reference_config(0.0), grid);
  std::vector<int> ids;
  double previous = 0.0;
  for (const auto& row : rows) {
    std::vector<const BranchPoint*> stable;
    for (const auto& bp : row.points)
      if (bp.fixed_point.classification == Stability::Stable) stable.push_back(&bp);
    REQUIRE(stable.size() == 2);
    std::vector<int> now{stable[0]->branch_id, stable[1]->branch_id};
    std::sort(now.begin(), now.end());
    if (!ids.empty()) CHECK(now == ids);
    ids = now;
    const auto& p = stable[0]->fixed_point.point.osc;
    const auto& q = stable[1]->fixed_point.point.osc;
    const double sep = std::hypot(p.qx - q.qx, p.qy - q.qy);
    CHECK(sep > previous);
    previous = sep;
  }
}

TEST_CASE("branch births coincide with the critical couplings") {
  const auto crit = critical_couplings(reference_omega(), reference_delta());
  const double h = 0.01;
  std::vector<double> grid;
  for (int i = 20; i <= 52; ++i) grid.push_back(h * i);
  const auto rows = branch_scan(reference_config(0.0), grid);
  auto first_with = [&](Stability s) {
    for (const auto& row : rows)
      for (const auto& bp : row.points)
        if (bp.fixed_point.classification == s && !at_origin(bp.fixed_point)) return row.lambda;
    return -1.0;
  };
  CHECK(std::abs(first_with(Stability::Stable) - crit[0].value) <= h);
  CHECK(std::abs(first_with(Stability::Saddle) - crit[1].value) <= h);
}

TEST_CASE("portrait with no iterations is the initial grid") {
  PortraitGrid grid;
  grid.points_per_axis = 5;
  const auto cloud = portrait(reference_config(0.32), grid, 0);
  const auto ics = grid.initial_conditions();
  REQUIRE(cloud.size() == ics.size());
  for (std::size_t i = 0; i < ics.size(); ++i) {
    CHECK(cloud[i].qx == ics[i].osc.qx);
    CHECK(cloud[i].qy == ics[i].osc.qy);
  }
}

TEST_CASE("portrait reflection symmetries") {
  // Axes of the square initial-condition grid: 0, pi/4, pi/2, 3pi/4.
  const double quarter = std::numbers::pi / 4.0;
  PortraitGrid grid;
  grid.p_slope = -std::tan(reference_omega() / 2.0);
  const auto below = portrait(reference_config(0.15), grid, 2000);
  for (int k = 0; k < 4; ++k) CHECK(reflection_symmetry_score(below, k * quarter, 6.0, 40) > 0.95);

  const auto between = portrait(reference_config(0.32), grid, 2000);
  CHECK(reflection_symmetry_score(between, quarter, 6.0, 40) > 0.95);
  CHECK(reflection_symmetry_score(between, 3.0 * quarter, 6.0, 40) > 0.95);
  CHECK(reflection_symmetry_score(between, 0.0, 6.0, 40) < 0.9);
  CHECK(reflection_symmetry_score(between, 2.0 * quarter, 6.0, 40) < 0.9);
}

TEST_CASE("parallel portrait equals the serial reference") {
  PortraitGrid grid;
  const auto cfg = reference_config(0.32);
  const auto a = portrait(cfg, grid, 300, Exec::Serial);
  const auto b = portrait(cfg, grid, 300, Exec::Parallel);
  REQUIRE(a.size() == b.size());
  CHECK(std::equal(a.begin(), a.end(), b.begin(),
                   [](const PortraitPoint& x, const PortraitPoint& y) { return x.qx == y.qx && x.qy == y.qy; }));
}

TEST_CASE("symmetry score of a symmetric and an asymmetric cloud") {
  std::vector<PortraitPoint> sym{{1.1, 2.3}, {2.3, 1.1}};
  CHECK(reflection_symmetry_score(sym, std::numbers::pi / 4.0, 3.0, 12) == doctest::Approx(1.0));
  std::vector<PortraitPoint> lopsided{{1.1, 2.3}};
  CHECK(reflection_symmetry_score(lopsided, std::numbers::pi / 4.0, 3.0, 12) == doctest::Approx(0.0));
}
