#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "kickjt/model.hpp"

namespace kickjt {

/// Classical pseudo-spin; lives on the sphere of radius 1/2.
struct SpinVector {
  double x = 0.0;
  double y = 0.0;
  double z = -0.5;

  /// Point on the radius-1/2 sphere with polar angle theta and azimuth phi.
  static SpinVector from_angles(double theta, double phi);
  /// Rescales (x, y, z) onto the radius-1/2 sphere.
  static SpinVector normalized(double x, double y, double z);

  double norm() const;
};

struct OscillatorPoint {
  double qx = 0.0;
  double qy = 0.0;
  double px = 0.0;
  double py = 0.0;
};

struct PhasePoint {
  OscillatorPoint osc;
  SpinVector spin;
};

enum class SubMap { KickY, KickX, Harmonic };

/// One of the three elementary maps. The kicks shift the kicked momentum by
/// -lambda * s_chi and rotate the spin about the chi axis by lambda * q_chi;
/// Harmonic rotates each oscillator plane by omega and the spin about z by delta.
PhasePoint submap(SubMap kind, const PhasePoint& state, const ValidatedConfig& cfg);
PhasePoint submap_inverse(SubMap kind, const PhasePoint& state, const ValidatedConfig& cfg);

/// One period of the kicked map in closed form (Harmonic after KickX after KickY).
PhasePoint step(const PhasePoint& state, const ValidatedConfig& cfg);
/// Inverse of step, built from the inverse sub-maps in reverse order.
PhasePoint step_inverse(const PhasePoint& state, const ValidatedConfig& cfg);

/// The 3x3 matrix that step applies to (s_x, s_y, s_z); depends only on (q_x, q_y).
Eigen::Matrix3d spin_propagator(double qx, double qy, const ValidatedConfig& cfg);

struct Trajectory {
  std::vector<PhasePoint> points;  ///< points[k] = step^k(initial)
  std::size_t size() const { return points.size(); }
};

Trajectory iterate(const PhasePoint& initial, std::size_t n, const ValidatedConfig& cfg);

/// Canonical coordinates (q_x, p_x, q_y, p_y, phi, s_z), phi = atan2(s_y, s_x).
using Canonical = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// Canonical chart is unusable within this distance of the poles |s_z| = 1/2.
inline constexpr double kPoleGuard = 1e-6;

Canonical to_canonical(const PhasePoint& p);
PhasePoint from_canonical(const Canonical& c);

/// Wraps an angle difference into (-pi, pi].
double wrap_angle(double a);

/// Central finite-difference Jacobian of one step in canonical coordinates.
/// Throws PoleProximityError when |s_z| >= 1/2 - kPoleGuard.
Matrix6 jacobian_canonical(const PhasePoint& state, const ValidatedConfig& cfg);

}  // namespace kickjt
