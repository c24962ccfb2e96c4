#pragma once

#include <array>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kickjt/bifurcation.hpp"
#include "kickjt/parallel.hpp"
#include "kickjt/quantum_floquet.hpp"

namespace kickjt {

/// alpha = (q + i p) / sqrt(2)
inline Complex coherent_alpha(double q, double p) { return Complex(q, p) / std::numbers::sqrt2; }

/// Projection of the untruncated two-mode coherent state |ax, ay> onto the
/// oscillator states of the basis (indexed by FockBasis::mode_index). Not
/// renormalised, so overlaps with truncated states are exact.
Eigen::VectorXcd coherent_projection(Complex ax, Complex ay, const FockBasis& basis);

/// 1 - ||projection||^2: weight of |ax, ay> beyond the cutoff.
double coherent_truncation_loss(Complex ax, Complex ay, const FockBasis& basis);

/// Normalised truncated coherent state (oscillator factor only). Throws
/// TruncationLossError when the weight beyond the cutoff is 1e-6 or more.
Eigen::VectorXcd coherent_state(Complex ax, Complex ay, const FockBasis& basis);

/// cos(theta/2)|+> + e^{i phi} sin(theta/2)|->, stored as (+, -).
struct SpinDirection {
  double theta = 0.0;  ///< [0, pi]
  double phi = 0.0;    ///< [0, 2 pi)

  static SpinDirection from_vector(const SpinVector& s);
  SpinDirection flipped() const;  ///< phi -> phi + pi
  Eigen::Vector2cd spinor() const;
};

/// Oscillator factor (over modes) times spinor (+, -) in the full basis.
QuantumState product_state(const Eigen::VectorXcd& oscillator, const Eigen::Vector2cd& spinor,
                           const FockBasis& basis);

/// Husimi density of the spin-traced state at (ax, ay).
double husimi(const QuantumState& state, Complex ax, Complex ay, const FockBasis& basis);

/// Phase-space point (q_x, q_y, p_x, p_y).
using PhaseCoords = std::array<double, 4>;

/// Affine line origin + t * direction in (q_x, q_y, p_x, p_y).
struct SectionLine {
  PhaseCoords origin{};
  PhaseCoords direction{};
  PhaseCoords at(double t) const;
};

/// Affine plane origin + u * first + v * second.
struct SectionPlane {
  PhaseCoords origin{};
  PhaseCoords first{};
  PhaseCoords second{};
  PhaseCoords at(double u, double v) const;
};

/// q_x = q_y = t, p_chi = -tan(omega/2) q_chi.
SectionLine diagonal_section(double omega);
/// (q_x, q_y) = (u, v), p_chi = -tan(omega/2) q_chi.
SectionPlane symmetry_plane(double omega);

/// n equally spaced samples on [lo, hi].
std::vector<double> uniform_grid(double lo, double hi, std::size_t n);

struct HusimiGrid {
  std::vector<double> u;       ///< coordinates along the first axis
  std::vector<double> v;       ///< second axis (empty for a line section)
  std::vector<double> values;  ///< row-major, u outer
};

HusimiGrid husimi_line(const QuantumState& state, const FockBasis& basis, const SectionLine& line,
                       std::span<const double> ts, Exec exec = Exec::Parallel);
HusimiGrid husimi_plane(const QuantumState& state, const FockBasis& basis, const SectionPlane& plane,
                        std::span<const double> us, std::span<const double> vs, Exec exec = Exec::Parallel);

enum class Subsystem { Spin, OscX, OscY, OscPair, SpinOscX };
const char* to_string(Subsystem s);

/// Reduced state of the kept subsystem. Index conventions: spin (+, -);
/// oscillator x or y by occupation 0..N_t; osc pair by nx * (N_t + 1) + ny;
/// spin+osc_x by spin_index * (N_t + 1) + nx.
struct DensityMatrix {
  Eigen::MatrixXcd rho;
  Subsystem subsystem;
  int mode_dim;  ///< N_t + 1
};

DensityMatrix reduced_density(const QuantumState& state, const FockBasis& basis, Subsystem keep);

enum class LogBase { Two, E };

double von_neumann_entropy(const DensityMatrix& rho, LogBase base = LogBase::Two);

/// log2 of the trace norm of the partial transpose over one oscillator.
double log_negativity(const DensityMatrix& pair, Subsystem transpose_over = Subsystem::OscX);

/// Normalised (|a,n> - |-a,n'>) and (|a,n> + |-a,n'>) built from a fixed point:
/// a from its oscillator coordinates, n from its spin, n' = n rotated by pi.
std::pair<QuantumState, QuantumState> approx_bifurcated_states(const FixedPoint& fp, const FockBasis& basis);

/// s times the phase that makes <ref|s> real and non-negative.
QuantumState phase_aligned(const QuantumState& s, const QuantumState& ref);

/// (psi_g + psi_e) / sqrt(2) for numerically obtained doublet states, whose
/// phases are first aligned with approx_bifurcated_states(fp): the
/// superposition then concentrates near the fixed point fp.
QuantumState localized_superposition(const QuantumState& psi_g, const QuantumState& psi_e, const FixedPoint& fp,
                                     const FockBasis& basis);

/// cos^2(theta/2) (1 - exp(-2 ax^2 - 2 ay^2)).
double detection_probability(double theta, double alpha_x, double alpha_y);

struct CurvePoint {
  double lambda;
  double value;
};

/// Central differences inside (exact for quadratics on any grid), one-sided
/// at the ends. Throws GridTooSmallError below 3 points.
std::vector<CurvePoint> curve_derivative(std::span<const CurvePoint> series);

struct Peak {
  std::size_t index;
  double position;
  double height;      ///< smoothed value
  double prominence;
};

/// Local maxima of the 3-point smoothed samples whose prominence is at least
/// rel_prominence times the global smoothed maximum.
std::vector<Peak> find_peaks(std::span<const double> xs, std::span<const double> ys,
                             double rel_prominence = 0.05);

struct EntanglementSample {
  double s_spin;   ///< spin vs both oscillators
  double s_osc_x;  ///< oscillator x vs spin + oscillator y
  double log_negativity;  ///< between the oscillators, spin traced out
};

EntanglementSample entanglement_measures(const QuantumState& state, const FockBasis& basis);

/// Measures for many states; items are independent.
std::vector<EntanglementSample> entanglement_measures(std::span<const QuantumState> states,
                                                      const FockBasis& basis, Exec exec = Exec::Parallel);

}  // namespace kickjt
