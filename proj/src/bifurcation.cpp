#include "kickjt/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "kickjt/error.hpp"

namespace kickjt {

const char* to_string(Stability s) {
  switch (s) {
    case Stability::Stable: return "Stable";
    case Stability::Saddle: return "Saddle";
    case Stability::Unstable: return "Unstable";
    case Stability::Degenerate: return "Degenerate";
  }
  return "?";
}

double critical_coupling_rhs(double omega, double delta, Branch branch) {
  const double cot_half = 1.0 / std::tan(delta / 2.0);
  const double denom = branch == Branch::Plus ? cot_half + 1.0 : cot_half - 1.0;
  return 8.0 * std::tan(omega / 2.0) / denom;
}

std::vector<CriticalCoupling> critical_couplings(double omega, double delta) {
  std::vector<CriticalCoupling> out;
  const double cot_half = 1.0 / std::tan(delta / 2.0);
  for (Branch b : {Branch::Plus, Branch::Minus}) {
    const double denom = b == Branch::Plus ? cot_half + 1.0 : cot_half - 1.0;
    // cot(pi/4) - 1 evaluates to ~1e-16 rather than 0; treat it as the singular case.
    if (std::abs(denom) < 1e-12) continue;
    const double rhs = 8.0 * std::tan(omega / 2.0) / denom;
    if (std::isfinite(rhs) && rhs > 0.0) out.push_back({std::sqrt(rhs), b});
  }
  std::sort(out.begin(), out.end(),
            [](const CriticalCoupling& a, const CriticalCoupling& b) { return a.value < b.value; });
  return out;
}

Stability classify(int hyperbolic_pairs, bool krein_definite, bool near_unity) {
  if (near_unity) return Stability::Degenerate;
  if (hyperbolic_pairs == 1) return Stability::Saddle;
  if (hyperbolic_pairs >= 2) return Stability::Unstable;
  return krein_definite ? Stability::Stable : Stability::Unstable;
}

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;

enum class Chart { Canonical, North, South };

Chart chart_for(const PhasePoint& p) {
  if (p.spin.z > 0.45) return Chart::North;
  if (p.spin.z < -0.45) return Chart::South;
  return Chart::Canonical;
}

Vec6 to_chart(const PhasePoint& p, Chart chart) {
  if (chart == Chart::Canonical) return to_canonical(p);
  Vec6 c;
  c << p.osc.qx, p.osc.px, p.osc.qy, p.osc.py, p.spin.x, p.spin.y;
  return c;
}

std::optional<PhasePoint> from_chart(const Vec6& c, Chart chart) {
  if (chart == Chart::Canonical) {
    if (std::abs(c(5)) >= 0.5 - kPoleGuard) return std::nullopt;
    return from_canonical(c);
  }
  const double r2 = c(4) * c(4) + c(5) * c(5);
  if (r2 >= 0.25) return std::nullopt;
  const double z = std::sqrt(0.25 - r2);
  PhasePoint p;
  p.osc = {c(0), c(2), c(1), c(3)};
  p.spin = {c(4), c(5), chart == Chart::North ? z : -z};
  return p;
}

double cartesian_residual(const PhasePoint& x, const ValidatedConfig& cfg) {
  const PhasePoint y = step(x, cfg);
  const double d[7] = {y.osc.qx - x.osc.qx, y.osc.qy - x.osc.qy, y.osc.px - x.osc.px,
                       y.osc.py - x.osc.py, y.spin.x - x.spin.x, y.spin.y - x.spin.y,
                       y.spin.z - x.spin.z};
  double m = 0.0;
  for (double v : d) m = std::max(m, std::abs(v));
  return m;
}

// F(c) = chart(step(x(c))) - c.
std::optional<Vec6> chart_residual(const Vec6& c, Chart chart, const ValidatedConfig& cfg) {
  const auto x = from_chart(c, chart);
  if (!x) return std::nullopt;
  Vec6 f = to_chart(step(*x, cfg), chart) - c;
  if (chart == Chart::Canonical) f(4) = wrap_angle(f(4));
  return f;
}

std::optional<Matrix6> chart_jacobian(const Vec6& c, Chart chart, const ValidatedConfig& cfg) {
  const double h = cfg.numerics().fd_step;
  Matrix6 j;
  for (int k = 0; k < 6; ++k) {
    Vec6 plus = c, minus = c;
    plus(k) += h;
    minus(k) -= h;
    const auto fp = chart_residual(plus, chart, cfg);
    const auto fm = chart_residual(minus, chart, cfg);
    if (!fp || !fm) return std::nullopt;
    Vec6 d = *fp - *fm;
    if (chart == Chart::Canonical) d(4) = wrap_angle(d(4));
    j.col(k) = d / (2.0 * h);
  }
  return j;
}

// Poisson tensor {x_i, x_j} in chart coordinates, with {q, p} = 1 and
// {s_x, s_y} = s_z (cyclic).
Matrix6 poisson_tensor(const PhasePoint& p, Chart chart) {
  Matrix6 P = Matrix6::Zero();
  P(0, 1) = 1.0;
  P(1, 0) = -1.0;
  P(2, 3) = 1.0;
  P(3, 2) = -1.0;
  const auto& s = p.spin;
  Eigen::Matrix3d cart;
  cart << 0.0, s.z, -s.y, -s.z, 0.0, s.x, s.y, -s.x, 0.0;
  Eigen::Matrix<double, 2, 3> d;
  if (chart == Chart::Canonical) {
    const double r2 = s.x * s.x + s.y * s.y;
    d << -s.y / r2, s.x / r2, 0.0, 0.0, 0.0, 1.0;
  } else {
    d << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0;
  }
  P.block<2, 2>(4, 4) = d * cart * d.transpose();
  return P;
}

struct Linearization {
  std::array<double, 6> moduli{};
  int hyperbolic = 0;
  bool krein_definite = false;
  bool near_unity = false;
};

Linearization linearize(const PhasePoint& x, Chart chart, const ValidatedConfig& cfg) {
  const auto jf = chart_jacobian(to_chart(x, chart), chart, cfg);
  if (!jf) throw PoleProximityError("linearisation leaves the chart");
  const Matrix6 m = *jf + Matrix6::Identity();
  Eigen::EigenSolver<Matrix6> es(m, true);
  const auto mu = es.eigenvalues();
  const auto vecs = es.eigenvectors();
  const Eigen::Matrix<std::complex<double>, 6, 6> omega =
      poisson_tensor(x, chart).inverse().cast<std::complex<double>>();

  Linearization lin;
  int plus = 0, minus = 0;
  for (int k = 0; k < 6; ++k) {
    const double mod = std::abs(mu(k));
    lin.moduli[static_cast<std::size_t>(k)] = mod;
    if (mod > 1.0 + kStabilityTol) ++lin.hyperbolic;
    if (std::abs(mu(k) - 1.0) < kStabilityTol || std::abs(mu(k) + 1.0) < kStabilityTol)
      lin.near_unity = true;
    if (std::abs(mod - 1.0) <= kStabilityTol && mu(k).imag() > 1e-8) {
      const auto v = vecs.col(k);
      const double krein = (std::complex<double>(0.0, 1.0) * v.dot(omega * v)).real();
      (krein > 0.0 ? plus : minus) += 1;
    }
  }
  std::sort(lin.moduli.begin(), lin.moduli.end());
  lin.krein_definite = lin.hyperbolic == 0 && (plus == 0 || minus == 0) && (plus + minus) > 0;
  return lin;
}

struct NewtonOutcome {
  std::optional<PhasePoint> root;
  std::string failure;
};

NewtonOutcome newton(const PhasePoint& seed, const ValidatedConfig& cfg) {
  const Chart chart = chart_for(seed);
  if (chart == Chart::Canonical && std::abs(seed.spin.z) >= 0.5 - kPoleGuard)
    return {std::nullopt, "PoleProximity: seed at spin pole"};
  Vec6 c = to_chart(seed, chart);
  const auto& num = cfg.numerics();
  for (int it = 0; it <= num.newton_max_iter; ++it) {
    const auto x = from_chart(c, chart);
    if (!x)
      return {std::nullopt, chart == Chart::Canonical ? "PoleProximity: iterate reached a spin pole"
                                                      : "NoConvergence: iterate left the hemisphere"};
    if (cartesian_residual(*x, cfg) <= num.newton_tol) return {x, {}};
    if (it == num.newton_max_iter) break;
    const auto f = chart_residual(c, chart, cfg);
    const auto j = chart_jacobian(c, chart, cfg);
    if (!f || !j) return {std::nullopt, "PoleProximity: Jacobian stencil left the chart"};
    Vec6 dc = j->fullPivLu().solve(-*f);
    if (!dc.allFinite()) return {std::nullopt, "NoConvergence: singular Jacobian"};
    const double size = dc.lpNorm<Eigen::Infinity>();
    if (size > 1.0) dc /= size;
    c += dc;
  }
  return {std::nullopt, "NoConvergence: iteration cap reached"};
}

double distance(const PhasePoint& a, const PhasePoint& b) {
  const double d[7] = {a.osc.qx - b.osc.qx, a.osc.qy - b.osc.qy, a.osc.px - b.osc.px,
                       a.osc.py - b.osc.py, a.spin.x - b.spin.x, a.spin.y - b.spin.y,
                       a.spin.z - b.spin.z};
  double s = 0.0;
  for (double v : d) s += v * v;
  return std::sqrt(s);
}

bool coordinate_less(const FixedPoint& a, const FixedPoint& b) {
  const auto key = [](const FixedPoint& f) {
    const auto& p = f.point;
    return std::array<double, 7>{p.osc.qx, p.osc.qy, p.spin.z, p.osc.px,
                                 p.osc.py, p.spin.x, p.spin.y};
  };
  return key(a) < key(b);
}

constexpr double kDedupRadius = 1e-6;

}  // namespace

FixedPoint analyze_fixed_point(const PhasePoint& p, const ValidatedConfig& cfg) {
  FixedPoint fp;
  fp.point = p;
  fp.residual = cartesian_residual(p, cfg);
  const Linearization lin = linearize(p, chart_for(p), cfg);
  fp.multiplier_moduli = lin.moduli;
  fp.hyperbolic_pairs = lin.hyperbolic;
  fp.krein_definite = lin.krein_definite;
  fp.classification = classify(lin.hyperbolic, lin.krein_definite, lin.near_unity);
  return fp;
}

std::vector<PhasePoint> default_seeds(const ValidatedConfig& cfg) {
  std::vector<PhasePoint> seeds;
  seeds.push_back({{}, {0.0, 0.0, -0.5}});
  seeds.push_back({{}, {0.0, 0.0, 0.5}});
  const double slope = -std::tan(cfg.omega() / 2.0);
  const double radii[] = {0.5, 1.0, 2.0, 4.0};
  const double heights[] = {-0.4, -0.2, 0.2, 0.4};
  for (int diag : {1, -1}) {
    for (double sign : {1.0, -1.0}) {
      for (double r : radii) {
        const double qx = sign * r / std::numbers::sqrt2;
        const double qy = diag * qx;
        for (double sz : heights) {
          const double rho = std::sqrt(0.25 - sz * sz);
          for (int k = 0; k < 8; ++k) {
            const double phi = k * std::numbers::pi / 4.0;
            seeds.push_back({{qx, qy, slope * qx, slope * qy},
                             {rho * std::cos(phi), rho * std::sin(phi), sz}});
          }
        }
      }
    }
  }
  return seeds;
}

FixedPointSearch find_fixed_points(const ValidatedConfig& cfg, std::span<const PhasePoint> seeds,
                                   Exec exec) {
  std::vector<NewtonOutcome> outcomes(seeds.size());
  for_each_index(exec, seeds.size(), [&](std::size_t i) { outcomes[i] = newton(seeds[i], cfg); });

  FixedPointSearch result;
  std::vector<PhasePoint> roots;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].root) {
      result.failures.push_back({i, outcomes[i].failure});
      continue;
    }
    const PhasePoint& r = *outcomes[i].root;
    const bool seen = std::any_of(roots.begin(), roots.end(),
                                  [&](const PhasePoint& q) { return distance(q, r) < kDedupRadius; });
    if (!seen) roots.push_back(r);
  }

  result.points.resize(roots.size());
  for_each_index(exec, roots.size(),
                 [&](std::size_t i) { result.points[i] = analyze_fixed_point(roots[i], cfg); });
  std::sort(result.points.begin(), result.points.end(), coordinate_less);
  return result;
}

std::vector<BranchScanRow> branch_scan(const ValidatedConfig& cfg, std::span<const double> lambdas,
                                       Exec exec) {
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1]))
      throw OutOfRangeError({"lambda_grid"}, "branch_scan requires a strictly ascending grid");

  std::vector<std::vector<FixedPoint>> per_lambda(lambdas.size());
  // Grid points are independent; each search runs its seeds serially.
  for_each_index(exec, lambdas.size(), [&](std::size_t i) {
    const ValidatedConfig c = cfg.with_lambda(lambdas[i]);
    const auto seeds = default_seeds(c);
    per_lambda[i] = find_fixed_points(c, seeds, Exec::Serial).points;
  });

  std::vector<BranchScanRow> rows;
  int next_id = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    BranchScanRow row{lambdas[i], {}};
    const auto& current = per_lambda[i];
    std::vector<int> ids(current.size(), -1);
    if (!rows.empty()) {
      const auto& prev = rows.back().points;
      struct Pair {
        double d;
        std::size_t cur, prev;
      };
      std::vector<Pair> pairs;
      for (std::size_t a = 0; a < current.size(); ++a)
        for (std::size_t b = 0; b < prev.size(); ++b)
          pairs.push_back({distance(current[a].point, prev[b].fixed_point.point), a, b});
      std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
        return std::tie(x.d, x.cur, x.prev) < std::tie(y.d, y.cur, y.prev);
      });
      std::vector<bool> prev_used(prev.size(), false);
      for (const Pair& p : pairs) {
        if (ids[p.cur] >= 0 || prev_used[p.prev]) continue;
        ids[p.cur] = prev[p.prev].branch_id;
        prev_used[p.prev] = true;
      }
    }
    for (std::size_t a = 0; a < current.size(); ++a) {
      if (ids[a] < 0) ids[a] = next_id++;
      row.points.push_back({ids[a], current[a]});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<PhasePoint> PortraitGrid::initial_conditions() const {
  std::vector<PhasePoint> out;
  const std::size_t n = points_per_axis;
  out.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double qx = n == 1 ? 0.0 : -extent + 2.0 * extent * static_cast<double>(i) / static_cast<double>(n - 1);
      const double qy = n == 1 ? 0.0 : -extent + 2.0 * extent * static_cast<double>(j) / static_cast<double>(n - 1);
      out.push_back({{qx, qy, p_slope * qx, p_slope * qy}, spin});
    }
  }
  return out;
}

std::vector<PortraitPoint> portrait(const ValidatedConfig& cfg, const PortraitGrid& grid,
                                    std::size_t n_iter, Exec exec) {
  const auto starts = grid.initial_conditions();
  const std::size_t stride = n_iter + 1;
  std::vector<PortraitPoint> cloud(starts.size() * stride);
  for_each_index(exec, starts.size(), [&](std::size_t i) {
    PhasePoint p = starts[i];
    for (std::size_t k = 0; k < stride; ++k) {
      if (k) p = step(p, cfg);
      cloud[i * stride + k] = {p.osc.qx, p.osc.qy};
    }
  });
  return cloud;
}

double reflection_symmetry_score(std::span<const PortraitPoint> cloud, double axis_angle,
                                 double extent, std::size_t bins) {
  const double c2 = std::cos(2.0 * axis_angle), s2 = std::sin(2.0 * axis_angle);
  std::vector<double> direct(bins * bins, 0.0), mirrored(bins * bins, 0.0);
  auto bin_of = [&](double x, double y) -> std::optional<std::size_t> {
    if (std::abs(x) >= extent || std::abs(y) >= extent) return std::nullopt;
    const auto ix = static_cast<std::size_t>((x + extent) / (2.0 * extent) * static_cast<double>(bins));
    const auto iy = static_cast<std::size_t>((y + extent) / (2.0 * extent) * static_cast<double>(bins));
    return std::min(ix, bins - 1) * bins + std::min(iy, bins - 1);
  };
  for (const auto& p : cloud) {
    if (auto b = bin_of(p.qx, p.qy)) direct[*b] += 1.0;
    if (auto b = bin_of(c2 * p.qx + s2 * p.qy, s2 * p.qx - c2 * p.qy)) mirrored[*b] += 1.0;
  }
  double common = 0.0, total = 0.0;
  for (std::size_t k = 0; k < direct.size(); ++k) {
    common += std::min(direct[k], mirrored[k]);
    total += 0.5 * (direct[k] + mirrored[k]);
  }
  return total > 0.0 ? common / total : 1.0;
}

}  // namespace kickjt
