#include "kickjt/classical_map.hpp"

#include <cmath>
#include <numbers>

#include "kickjt/error.hpp"

namespace kickjt {

SpinVector SpinVector::from_angles(double theta, double phi) {
  return {0.5 * std::sin(theta) * std::cos(phi), 0.5 * std::sin(theta) * std::sin(phi),
          0.5 * std::cos(theta)};
}

SpinVector SpinVector::normalized(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  const double k = 0.5 / r;
  return {x * k, y * k, z * k};
}

double SpinVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

namespace {

// Rotation of the (u, v) pair by angle a: u' = u cos a + v sin a, v' = v cos a - u sin a.
inline void rotate_pair(double& u, double& v, double a) {
  const double c = std::cos(a), s = std::sin(a);
  const double nu = u * c + v * s;
  const double nv = v * c - u * s;
  u = nu;
  v = nv;
}

}  // namespace

PhasePoint submap(SubMap kind, const PhasePoint& state, const ValidatedConfig& cfg) {
  PhasePoint out = state;
  const double lam = cfg.lambda();
  switch (kind) {
    case SubMap::KickY:
      out.osc.py -= lam * state.spin.y;
      // (s_x, s_z) rotate about y; s_y is conserved.
      rotate_pair(out.spin.x, out.spin.z, lam * state.osc.qy);
      break;
    case SubMap::KickX:
      out.osc.px -= lam * state.spin.x;
      // (s_z, s_y) rotate about x; s_x is conserved.
      rotate_pair(out.spin.z, out.spin.y, lam * state.osc.qx);
      break;
    case SubMap::Harmonic:
      rotate_pair(out.osc.qx, out.osc.px, cfg.omega());
      rotate_pair(out.osc.qy, out.osc.py, cfg.omega());
      rotate_pair(out.spin.y, out.spin.x, cfg.delta());
      break;
  }
  return out;
}

PhasePoint submap_inverse(SubMap kind, const PhasePoint& state, const ValidatedConfig& cfg) {
  PhasePoint out = state;
  const double lam = cfg.lambda();
  switch (kind) {
    case SubMap::KickY:
      rotate_pair(out.spin.x, out.spin.z, -lam * state.osc.qy);
      out.osc.py += lam * out.spin.y;
      break;
    case SubMap::KickX:
      rotate_pair(out.spin.z, out.spin.y, -lam * state.osc.qx);
      out.osc.px += lam * out.spin.x;
      break;
    case SubMap::Harmonic:
      rotate_pair(out.osc.qx, out.osc.px, -cfg.omega());
      rotate_pair(out.osc.qy, out.osc.py, -cfg.omega());
      rotate_pair(out.spin.y, out.spin.x, -cfg.delta());
      break;
  }
  return out;
}

Eigen::Matrix3d spin_propagator(double qx, double qy, const ValidatedConfig& cfg) {
  const double lam = cfg.lambda();
  const double ca = std::cos(lam * qy), sa = std::sin(lam * qy);
  const double cb = std::cos(lam * qx), sb = std::sin(lam * qx);
  const double cd = std::cos(cfg.delta()), sd = std::sin(cfg.delta());
  Eigen::Matrix3d r;
  r << cd * ca - sd * sb * sa, -sd * cb, cd * sa + sd * sb * ca,  //
      cd * sb * sa + sd * ca, cd * cb, -cd * sb * ca + sd * sa,  //
      -sa * cb, sb, ca * cb;
  return r;
}

PhasePoint step(const PhasePoint& s, const ValidatedConfig& cfg) {
  const double lam = cfg.lambda();
  const double cw = std::cos(cfg.omega()), sw = std::sin(cfg.omega());
  const auto& o = s.osc;
  const double kicked_px =
      o.px - lam * (s.spin.x * std::cos(lam * o.qy) + s.spin.z * std::sin(lam * o.qy));
  const double kicked_py = o.py - lam * s.spin.y;

  PhasePoint out;
  out.osc.qx = kicked_px * sw + o.qx * cw;
  out.osc.qy = kicked_py * sw + o.qy * cw;
  out.osc.px = kicked_px * cw - o.qx * sw;
  out.osc.py = kicked_py * cw - o.qy * sw;

  const Eigen::Vector3d spin = spin_propagator(o.qx, o.qy, cfg) * Eigen::Vector3d(s.spin.x, s.spin.y, s.spin.z);
  out.spin = {spin.x(), spin.y(), spin.z()};
  return out;
}

PhasePoint step_inverse(const PhasePoint& state, const ValidatedConfig& cfg) {
  PhasePoint p = submap_inverse(SubMap::Harmonic, state, cfg);
  p = submap_inverse(SubMap::KickX, p, cfg);
  return submap_inverse(SubMap::KickY, p, cfg);
}

Trajectory iterate(const PhasePoint& initial, std::size_t n, const ValidatedConfig& cfg) {
  Trajectory t;
  t.points.reserve(n + 1);
  t.points.push_back(initial);
  for (std::size_t k = 0; k < n; ++k) t.points.push_back(step(t.points.back(), cfg));
  return t;
}

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::remainder(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

Canonical to_canonical(const PhasePoint& p) {
  Canonical c;
  c << p.osc.qx, p.osc.px, p.osc.qy, p.osc.py, std::atan2(p.spin.y, p.spin.x), p.spin.z;
  return c;
}

PhasePoint from_canonical(const Canonical& c) {
  const double r = std::sqrt(std::max(0.25 - c(5) * c(5), 0.0));
  PhasePoint p;
  p.osc = {c(0), c(2), c(1), c(3)};
  p.spin = {r * std::cos(c(4)), r * std::sin(c(4)), c(5)};
  return p;
}

namespace {

using Matrix7 = Eigen::Matrix<double, 7, 7>;

// Cartesian order (q_x, p_x, q_y, p_y, s_x, s_y, s_z).
Matrix7 submap_jacobian(SubMap kind, const PhasePoint& s, const ValidatedConfig& cfg) {
  Matrix7 j = Matrix7::Identity();
  const double lam = cfg.lambda();
  const PhasePoint o = submap(kind, s, cfg);
  switch (kind) {
    case SubMap::KickY: {
      const double c = std::cos(lam * s.osc.qy), sn = std::sin(lam * s.osc.qy);
      j(3, 5) = -lam;
      j(4, 4) = c, j(4, 6) = sn, j(4, 2) = lam * o.spin.z;
      j(6, 6) = c, j(6, 4) = -sn, j(6, 2) = -lam * o.spin.x;
      break;
    }
    case SubMap::KickX: {
      const double c = std::cos(lam * s.osc.qx), sn = std::sin(lam * s.osc.qx);
      j(1, 4) = -lam;
      j(6, 6) = c, j(6, 5) = sn, j(6, 0) = lam * o.spin.y;
      j(5, 5) = c, j(5, 6) = -sn, j(5, 0) = -lam * o.spin.z;
      break;
    }
    case SubMap::Harmonic: {
      const double cw = std::cos(cfg.omega()), sw = std::sin(cfg.omega());
      const double cd = std::cos(cfg.delta()), sd = std::sin(cfg.delta());
      for (int k : {0, 2}) j(k, k) = cw, j(k, k + 1) = sw, j(k + 1, k) = -sw, j(k + 1, k + 1) = cw;
      j(5, 5) = cd, j(5, 4) = sd, j(4, 5) = -sd, j(4, 4) = cd;
      break;
    }
  }
  return j;
}

}  // namespace

Matrix6 jacobian_canonical(const PhasePoint& state, const ValidatedConfig& cfg) {
  if (std::abs(state.spin.z) >= 0.5 - kPoleGuard)
    throw PoleProximityError("jacobian_canonical: |s_z| too close to 1/2, canonical chart degenerates");
  const PhasePoint after_y = submap(SubMap::KickY, state, cfg);
  const PhasePoint after_x = submap(SubMap::KickX, after_y, cfg);
  const PhasePoint out = submap(SubMap::Harmonic, after_x, cfg);
  if (std::abs(out.spin.z) >= 0.5 - kPoleGuard)
    throw PoleProximityError("jacobian_canonical: image too close to a pole, canonical chart degenerates");
  const Matrix7 cart = submap_jacobian(SubMap::Harmonic, after_x, cfg) * submap_jacobian(SubMap::KickX, after_y, cfg) *
                       submap_jacobian(SubMap::KickY, state, cfg);

  // d(cartesian)/d(canonical) at the input and its counterpart at the image.
  Eigen::Matrix<double, 7, 6> in = Eigen::Matrix<double, 7, 6>::Zero();
  const auto& s = state.spin;
  const double r2 = s.x * s.x + s.y * s.y;
  for (int k = 0; k < 4; ++k) in(k, k) = 1.0;
  in(4, 4) = -s.y, in(5, 4) = s.x;
  in(4, 5) = -s.z * s.x / r2, in(5, 5) = -s.z * s.y / r2, in(6, 5) = 1.0;

  Eigen::Matrix<double, 6, 7> back = Eigen::Matrix<double, 6, 7>::Zero();
  const auto& t = out.spin;
  const double t2 = t.x * t.x + t.y * t.y;
  for (int k = 0; k < 4; ++k) back(k, k) = 1.0;
  back(4, 4) = -t.y / t2, back(4, 5) = t.x / t2, back(5, 6) = 1.0;
  return back * cart * in;
}

}  // namespace kickjt
