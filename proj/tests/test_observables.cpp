#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "kickjt/bifurcation.hpp"
#include "kickjt/error.hpp"
#include "kickjt/observables.hpp"
#include "support.hpp"

using namespace kickjt;
using testing::reference_config;

namespace {

QuantumState from_terms(const FockBasis& b, std::initializer_list<std::pair<std::array<int, 3>, Complex>> terms) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(b.size()));
  for (const auto& [s, c] : terms) v(static_cast<Eigen::Index>(*b.index_of(s[0], s[1], s[2]))) += c;
  return QuantumState::normalized(v);
}

DensityMatrix pair_density(const Eigen::MatrixXcd& rho, int mode_dim) { return {rho, Subsystem::OscPair, mode_dim}; }

Eigen::MatrixXcd random_density(Eigen::Index n, std::mt19937_64& rng) {
  Eigen::MatrixXcd a(n, n);
  std::normal_distribution<double> g;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

FixedPoint stable_fixed_point(double lambda) {
  const auto cfg = reference_config(lambda);
  const auto seeds = default_seeds(cfg);
  for (const auto& f : find_fixed_points(cfg, seeds).points)
    if (f.classification == Stability::Stable && f.point.osc.qx > 0.1) return f;
  FAIL("no stable fixed point off the origin");
  return {};
}

}  // namespace

TEST_CASE("coherent states") {
  const FockBasis b(18);
  const Eigen::VectorXcd vac = coherent_state(0.0, 0.0, b);
  CHECK(std::abs(vac(0) - 1.0) <= 1e-15);
  CHECK(vac.tail(vac.size() - 1).norm() == 0.0);

  const Eigen::VectorXcd one = coherent_state(1.0, 0.0, b);
  CHECK(std::abs(one.dot(vac)) == doctest::Approx(std::exp(-0.5)).epsilon(1e-6));
  CHECK(std::abs(one.norm() - 1.0) <= 1e-12);

  const Complex big = std::sqrt(30.0);
  CHECK_THROWS_AS(coherent_state(big, 0.0, b), TruncationLossError);
  try {
    coherent_state(big, 0.0, b);
  } catch (const TruncationLossError& e) {
    CHECK(e.loss() >= 1e-6);
  }
  CHECK(coherent_alpha(1.0, 2.0) == Complex(1.0, 2.0) / std::sqrt(2.0));
}

TEST_CASE("Husimi function of the oscillator ground state") {
  const FockBasis b(18);
  const auto g = pgs_seed(b);
  for (Complex ax : {Complex(0, 0), Complex(0.5, -0.3), Complex(1.2, 0.4)})
    for (Complex ay : {Complex(0, 0), Complex(-0.7, 0.2)})
      CHECK(husimi(g, ax, ay, b) == doctest::Approx(std::exp(-std::norm(ax) - std::norm(ay))).epsilon(1e-13));
}

TEST_CASE("Husimi normalisation by quadrature") {
  const FockBasis b(18);
  const auto g = pgs_seed(b);
  const auto axis = uniform_grid(-5.0, 5.0, 41);
  const double h = axis[1] - axis[0];
  double total = 0.0;
  for (double xr : axis)
    for (double xi : axis) {
      if (xr * xr + xi * xi > 25.0) continue;
      for (double yr : axis)
        for (double yi : axis)
          if (yr * yr + yi * yi <= 25.0) total += husimi(g, {xr, xi}, {yr, yi}, b);
    }
  total *= std::pow(h, 4) / (std::numbers::pi * std::numbers::pi);
  CHECK(total == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("Husimi of a coherent product state peaks at its own point") {
  const FockBasis b(30);
  const Complex ax(1.0, -0.5), ay(-0.8, 1.2);
  const auto s = product_state(coherent_state(ax, ay, b), SpinDirection{1.0, 2.0}.spinor(), b);
  CHECK(husimi(s, ax, ay, b) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(husimi(s, ax + 0.3, ay, b) < 1.0);
}

TEST_CASE("Husimi is non-negative and deterministic in parallel") {
  std::mt19937_64 rng(21);
  const FockBasis b(10);
  const auto s = testing::random_state(b, rng);
  const auto axis = uniform_grid(-4.0, 4.0, 25);
  const auto serial = husimi_plane(s, b, symmetry_plane(reference_omega()), axis, axis, Exec::Serial);
  const auto parallel = husimi_plane(s, b, symmetry_plane(reference_omega()), axis, axis, Exec::Parallel);
  CHECK(serial.values == parallel.values);
  for (double v : serial.values) CHECK(v >= -1e-12);
  const auto line = husimi_line(s, b, diagonal_section(reference_omega()), axis, Exec::Serial);
  CHECK(line.values == husimi_line(s, b, diagonal_section(reference_omega()), axis).values);
}

TEST_CASE("section geometry") {
  const double w = reference_omega();
  const auto line = diagonal_section(w).at(2.0);
  CHECK(line[0] == 2.0);
  CHECK(line[1] == 2.0);
  CHECK(line[2] == doctest::Approx(-std::tan(w / 2.0) * 2.0));
  const auto plane = symmetry_plane(w).at(1.0, -3.0);
  CHECK(plane[0] == 1.0);
  CHECK(plane[1] == -3.0);
  CHECK(plane[3] == doctest::Approx(3.0 * std::tan(w / 2.0)));
  const auto g = uniform_grid(-6.0, 6.0, 161);
  CHECK(g.front() == -6.0);
  CHECK(g.back() == 6.0);
  CHECK(g[80] == 0.0);
}

TEST_CASE("PGS Husimi section below and above the bifurcation") {
  const FockBasis b(18);
  TrackOptions opt;
  opt.waypoints = {0.15};
  const auto path = track_eigenstate(0.0, 0.32, pgs_seed(b), reference_config(0.0), opt);
  const auto ts = uniform_grid(-6.0, 6.0, 161);
  const auto below = husimi_line(path.at(0.15)->state, b, diagonal_section(reference_omega()), ts);
  const auto pb = find_peaks(below.u, below.values);
  REQUIRE(pb.size() == 1);
  CHECK(std::abs(pb[0].position) < 1e-12);

  const auto above = husimi_line(path.at(0.32)->state, b, diagonal_section(reference_omega()), ts);
  const auto pa = find_peaks(above.u, above.values);
  REQUIRE(pa.size() == 2);
  CHECK(pa[0].position < 0.0);
  CHECK(pa[1].position > 0.0);
  CHECK(std::abs(std::abs(pa[0].position) - pa[1].position) <= 0.05 * pa[1].position);
}

TEST_CASE("reduced density matrices") {
  const FockBasis b(10);
  const auto product = product_state(coherent_state(0.6, Complex(0.2, -0.4), b), SpinDirection{0.0, 0.0}.spinor(), b);
  const auto spin = reduced_density(product, b, Subsystem::Spin);
  CHECK(spin.subsystem == Subsystem::Spin);
  CHECK(std::abs(spin.rho(0, 0) - 1.0) <= 1e-12);
  CHECK(std::abs(spin.rho(1, 1)) <= 1e-12);
  CHECK(von_neumann_entropy(spin) <= 1e-10);

  const auto bell = from_terms(b, {{{0, 0, 1}, 1.0}, {{1, 0, -1}, 1.0}});
  const auto rs = reduced_density(bell, b, Subsystem::Spin);
  CHECK((rs.rho - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(von_neumann_entropy(rs) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(22);
  for (int i = 0; i < 100; ++i) {
    const auto s = testing::random_state(b, rng);
    for (auto keep : {Subsystem::Spin, Subsystem::OscX, Subsystem::OscY, Subsystem::OscPair, Subsystem::SpinOscX}) {
      const auto r = reduced_density(s, b, keep);
      CHECK(std::abs(r.rho.trace() - 1.0) <= 1e-10);
      CHECK((r.rho - r.rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
      if (i % 25 == 0)
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(r.rho).eigenvalues().minCoeff() >= -1e-10);
    }
  }
  const auto r = reduced_density(testing::random_state(b, rng), b, Subsystem::SpinOscX);
  CHECK(r.rho.rows() == 2 * 11);
  CHECK(reduced_density(testing::random_state(b, rng), b, Subsystem::OscPair).rho.rows() == 121);
}

TEST_CASE("complementary reductions of a pure state share their entropy") {
  std::mt19937_64 rng(23);
  const FockBasis b(5);
  const auto s = testing::random_state(b, rng);
  // spin | oscillators, and osc_x | spin + osc_y
  CHECK(von_neumann_entropy(reduced_density(s, b, Subsystem::Spin)) ==
        doctest::Approx(von_neumann_entropy(reduced_density(s, b, Subsystem::OscPair))).epsilon(1e-9));
}

TEST_CASE("von Neumann entropy") {
  DensityMatrix half{0.5 * Eigen::MatrixXcd::Identity(2, 2), Subsystem::Spin, 1};
  CHECK(von_neumann_entropy(half) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(von_neumann_entropy(half, LogBase::E) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  DensityMatrix skew{Eigen::Vector2cd(0.25, 0.75).asDiagonal(), Subsystem::Spin, 1};
  CHECK(von_neumann_entropy(skew) == doctest::Approx(0.811278).epsilon(1e-6));

  std::mt19937_64 rng(24);
  for (int i = 0; i < 10; ++i) {
    const Eigen::MatrixXcd rho = random_density(6, rng);
    const Eigen::MatrixXcd u = testing::random_unitary(6, rng);
    DensityMatrix a{rho, Subsystem::OscX, 6}, c{u * rho * u.adjoint(), Subsystem::OscX, 6};
    CHECK(von_neumann_entropy(a) == doctest::Approx(von_neumann_entropy(c)).epsilon(1e-10));
    CHECK(von_neumann_entropy(a) > 1e-3);
    CHECK((rho * rho).trace().real() < 1.0 - 1e-10);
  }
  Eigen::VectorXcd v = testing::random_state(FockBasis(1), rng).amplitudes;
  DensityMatrix pure{v * v.adjoint(), Subsystem::OscX, 6};
  CHECK(std::abs((pure.rho * pure.rho).trace().real() - 1.0) <= 1e-10);
  CHECK(von_neumann_entropy(pure) <= 1e-10);
}

TEST_CASE("logarithmic negativity") {
  // ((0,0) + (1,1)) / sqrt(2) over two qubit-truncated modes.
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(0) = psi(3) = 1.0 / std::sqrt(2.0);
  CHECK(log_negativity(pair_density(psi * psi.adjoint(), 2)) == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(25);
  for (int i = 0; i < 20; ++i) {
    const Eigen::MatrixXcd rx = random_density(3, rng), ry = random_density(3, rng);
    CHECK(log_negativity(pair_density(kron(rx, ry), 3)) <= 1e-12);
  }
  for (int i = 0; i < 20; ++i) {
    Eigen::MatrixXcd mix = Eigen::MatrixXcd::Zero(9, 9);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double p = w(rng);
      mix += p * kron(random_density(3, rng), random_density(3, rng));
      total += p;
    }
    CHECK(log_negativity(pair_density(mix / total, 3)) <= 1e-12);
  }
  for (int i = 0; i < 10; ++i) {
    const auto s = testing::random_state(FockBasis(4), rng);
    const auto pair = reduced_density(s, FockBasis(4), Subsystem::OscPair);
    CHECK(std::abs(log_negativity(pair, Subsystem::OscX) - log_negativity(pair, Subsystem::OscY)) <= 1e-12);
  }
  CHECK_THROWS_AS(log_negativity({Eigen::MatrixXcd::Identity(2, 2) / 2.0, Subsystem::Spin, 1}), DimensionMismatchError);
}

TEST_CASE("approximate bifurcated states") {
  const FockBasis b(18);
  const auto fp = stable_fixed_point(0.32);
  const auto [g, e] = approx_bifurcated_states(fp, b);
  const auto parity = build_operators(b, reference_config(0.32)).parity.matrix;
  CHECK((parity * g.amplitudes + g.amplitudes).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK((parity * e.amplitudes - e.amplitudes).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(std::abs(g.amplitudes.dot(e.amplitudes)) <= 1e-8);
  CHECK(sector_leakage(g, b, Parity::O) <= 1e-16);
  CHECK(sector_leakage(e, b, Parity::E) <= 1e-16);

  // (a - b) and (a + b) recombine into a once their norms are restored.
  const Complex ax = coherent_alpha(fp.point.osc.qx, fp.point.osc.px);
  const Complex ay = coherent_alpha(fp.point.osc.qy, fp.point.osc.py);
  const auto n = SpinDirection::from_vector(fp.point.spin);
  const Eigen::VectorXcd a = product_state(coherent_projection(ax, ay, b), n.spinor(), b).amplitudes;
  const Eigen::VectorXcd m = product_state(coherent_projection(-ax, -ay, b), n.flipped().spinor(), b).amplitudes;
  const Eigen::VectorXcd rebuilt = 0.5 * ((a - m).norm() * g.amplitudes + (a + m).norm() * e.amplitudes);
  CHECK((rebuilt - a).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(std::abs((g.amplitudes + e.amplitudes).normalized().dot(a.normalized())) > 0.999);
}

TEST_CASE("spin directions") {
  const auto d = SpinDirection::from_vector({0.0, 0.0, -0.5});
  CHECK(d.theta == doctest::Approx(std::numbers::pi));
  const auto e = SpinDirection::from_vector(SpinVector::from_angles(1.0, 5.0));
  CHECK(e.theta == doctest::Approx(1.0));
  CHECK(e.phi == doctest::Approx(5.0));
  const auto f = e.flipped();
  CHECK(f.phi == doctest::Approx(5.0 + std::numbers::pi - 2.0 * std::numbers::pi));
  CHECK(f.phi >= 0.0);
  CHECK(std::abs(e.spinor().norm() - 1.0) <= 1e-15);
}

TEST_CASE("detection probability") {
  CHECK(detection_probability(std::numbers::pi, 1.0, 1.0) == doctest::Approx(0.0));
  CHECK(detection_probability(0.7, 0.0, 0.0) == 0.0);
  CHECK(detection_probability(0.0, 10.0, 10.0) == doctest::Approx(1.0 - std::exp(-400.0)));
  CHECK(detection_probability(std::numbers::pi / 2.0, 0.5, 0.0) ==
        doctest::Approx(0.5 * (1.0 - std::exp(-0.5))).epsilon(1e-15));
}

TEST_CASE("curve derivative") {
  CHECK_THROWS_AS(curve_derivative(std::vector<CurvePoint>{{0.0, 1.0}, {1.0, 2.0}}), GridTooSmallError);
  std::vector<CurvePoint> flat{{0.0, 3.0}, {0.1, 3.0}, {0.3, 3.0}, {0.4, 3.0}};
  for (const auto& d : curve_derivative(flat)) CHECK(std::abs(d.value) <= 1e-12);

  std::vector<CurvePoint> sq;
  for (int i = 0; i <= 20; ++i) sq.push_back({0.05 * i, std::pow(0.05 * i, 2)});
  const auto d = curve_derivative(sq);
  REQUIRE(d.size() == sq.size());
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i].lambda == sq[i].lambda);
  for (std::size_t i = 1; i + 1 < d.size(); ++i) CHECK(d[i].value == doctest::Approx(2.0 * sq[i].lambda).epsilon(1e-12));

  std::vector<CurvePoint> uneven{{0.0, 0.0}, {0.1, 0.01}, {0.35, 0.1225}, {0.4, 0.16}, {0.7, 0.49}};
  const auto du = curve_derivative(uneven);
  for (std::size_t i = 1; i + 1 < du.size(); ++i) CHECK(du[i].value == doctest::Approx(2.0 * uneven[i].lambda));
}

TEST_CASE("peak detection") {
  std::vector<double> xs, one, two;
  for (int i = -50; i <= 50; ++i) {
    const double x = 0.1 * i;
    xs.push_back(x);
    one.push_back(std::exp(-x * x));
    two.push_back(std::exp(-std::pow(x - 2.0, 2)) + std::exp(-std::pow(x + 2.0, 2)) + 0.01 * std::exp(-x * x / 0.01));
  }
  const auto p1 = find_peaks(xs, one);
  REQUIRE(p1.size() == 1);
  CHECK(std::abs(p1[0].position) < 1e-12);
  const auto p2 = find_peaks(xs, two);
  REQUIRE(p2.size() == 2);
  CHECK(p2[0].position == doctest::Approx(-2.0));
  CHECK(p2[1].position == doctest::Approx(2.0));
}

TEST_CASE("PGS entanglement vanishes at zero coupling and is symmetric in x and y") {
  const FockBasis b(18);
  const auto m0 = entanglement_measures(pgs_seed(b), b);
  CHECK(m0.s_spin <= 1e-6);
  CHECK(m0.s_osc_x <= 1e-6);
  CHECK(m0.log_negativity <= 1e-6);

  const auto path = track_eigenstate(0.0, 0.3, pgs_seed(b), reference_config(0.0));
  const auto& s = path.points.back().state;
  const double sx = von_neumann_entropy(reduced_density(s, b, Subsystem::OscX));
  const double sy = von_neumann_entropy(reduced_density(s, b, Subsystem::OscY));
  CHECK(sx == doctest::Approx(sy).epsilon(1e-8));
  CHECK(sx > 0.1);
  const auto many = entanglement_measures(std::vector<QuantumState>{s, pgs_seed(b)}, b, Exec::Parallel);
  CHECK(many[0].s_osc_x == entanglement_measures(s, b).s_osc_x);
}
