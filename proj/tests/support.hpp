#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <algorithm>
#include <array>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "kickjt/classical_map.hpp"
#include "kickjt/model.hpp"
#include "kickjt/quantum_floquet.hpp"

namespace testing {

inline kickjt::ValidatedConfig reference_config(double lambda, int truncation = 18) {
  kickjt::NumericsConfig n;
  n.truncation = truncation;
  return kickjt::validate_params({kickjt::reference_omega(), kickjt::reference_delta(), lambda}, n);
}

inline kickjt::PhasePoint random_point(std::mt19937_64& rng, double q_range = 3.0) {
  std::uniform_real_distribution<double> q(-q_range, q_range);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> phi(0.0, 2.0 * std::numbers::pi);
  const double z = 0.5 * u(rng);
  const double r = std::sqrt(0.25 - z * z);
  const double a = phi(rng);
  return {{q(rng), q(rng), q(rng), q(rng)}, {r * std::cos(a), r * std::sin(a), z}};
}

/// The closed-form one-period map written out term by term.
inline kickjt::PhasePoint closed_form_map(const kickjt::PhasePoint& s, double omega, double delta, double lam) {
  const double qx = s.osc.qx, qy = s.osc.qy, px = s.osc.px, py = s.osc.py;
  const double sx = s.spin.x, sy = s.spin.y, sz = s.spin.z;
  const double cw = std::cos(omega), sw = std::sin(omega), cd = std::cos(delta), sd = std::sin(delta);
  const double cx = std::cos(qx * lam), sxl = std::sin(qx * lam), cy = std::cos(qy * lam), syl = std::sin(qy * lam);
  const double kx = px - lam * (sx * cy + sz * syl);
  const double ky = py - lam * sy;
  kickjt::PhasePoint o;
  o.osc.qx = kx * sw + qx * cw;
  o.osc.qy = ky * sw + qy * cw;
  o.osc.px = kx * cw - qx * sw;
  o.osc.py = ky * cw - qy * sw;
  o.spin.x = (cd * cy - sd * sxl * syl) * sx - sd * cx * sy + (cd * syl + sd * sxl * cy) * sz;
  o.spin.y = (cd * sxl * syl + sd * cy) * sx + cd * cx * sy + (-cd * sxl * cy + sd * syl) * sz;
  o.spin.z = -syl * cx * sx + sxl * sy + cy * cx * sz;
  return o;
}

inline double max_abs_diff(const kickjt::PhasePoint& a, const kickjt::PhasePoint& b) {
  const double d[] = {a.osc.qx - b.osc.qx, a.osc.qy - b.osc.qy, a.osc.px - b.osc.px, a.osc.py - b.osc.py,
                      a.spin.x - b.spin.x, a.spin.y - b.spin.y, a.spin.z - b.spin.z};
  double m = 0.0;
  for (double x : d) m = std::max(m, std::abs(x));
  return m;
}

inline kickjt::QuantumState random_state(const kickjt::FockBasis& basis, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = {g(rng), g(rng)};
  return kickjt::QuantumState::normalized(v);
}

inline Eigen::MatrixXcd random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = {g(rng), g(rng)};
  return Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ();
}

/// Distance between angles on the circle.
inline double circular_distance(double a, double b) {
  return std::abs(std::remainder(a - b, 2.0 * std::numbers::pi));
}

// Floquet matrix assembled from scratch: own state ordering (spin outer),
// ladder operators, Kronecker spin factors and dense matrix exponentials.
inline Eigen::MatrixXcd reference_floquet(int nt, double omega, double delta, double lambda) {
  std::vector<std::array<int, 3>> states;  // (sigma, nx, ny)
  for (int sigma : {1, -1})
    for (int nx = 0; nx <= nt; ++nx)
      for (int ny = 0; nx + ny <= nt; ++ny) states.push_back({sigma, nx, ny});
  const auto n = static_cast<Eigen::Index>(states.size());
  auto find = [&](int s, int nx, int ny) -> Eigen::Index {
    for (Eigen::Index i = 0; i < n; ++i)
      if (states[i] == std::array<int, 3>{s, nx, ny}) return i;
    return -1;
  };
  Eigen::MatrixXcd qx = Eigen::MatrixXcd::Zero(n, n), qy = qx, sx = qx, sy = qx, h0 = qx;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto [s, nx, ny] = states[i];
    if (const auto j = find(s, nx + 1, ny); j >= 0) qx(j, i) = qx(i, j) = std::sqrt((nx + 1) / 2.0);
    if (const auto j = find(s, nx, ny + 1); j >= 0) qy(j, i) = qy(i, j) = std::sqrt((ny + 1) / 2.0);
    const auto flip = find(-s, nx, ny);
    sx(flip, i) = 0.5;
    sy(flip, i) = std::complex<double>(0.0, s > 0 ? 0.5 : -0.5);  // s_y|+> = (i/2)|->
    h0(i, i) = std::polar(1.0, -(omega * (nx + ny + 1) + delta * 0.5 * s));
  }
  const std::complex<double> mi(0.0, -lambda);
  const Eigen::MatrixXcd kx = (mi * qx * sx).exp();
  const Eigen::MatrixXcd ky = (mi * qy * sy).exp();
  return h0 * kx * ky;
}

inline std::vector<double> sorted_phases(const Eigen::VectorXcd& eig) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < eig.size(); ++i) out.push_back(std::arg(eig(i)));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testing
