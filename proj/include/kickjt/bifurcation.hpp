#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kickjt/classical_map.hpp"
#include "kickjt/model.hpp"
#include "kickjt/parallel.hpp"

namespace kickjt {

/// Sign in the denominator cot(delta/2) +/- 1 of the critical-coupling formula.
enum class Branch { Plus, Minus };

struct CriticalCoupling {
  double value;  ///< lambda_b > 0
  Branch branch;
};

/// lambda_b^2 = 8 tan(omega/2) / (cot(delta/2) +/- 1), keeping branches whose
/// right-hand side is finite and strictly positive. Sorted ascending.
std::vector<CriticalCoupling> critical_couplings(double omega, double delta);

/// Right-hand side of the critical-coupling formula for one branch.
double critical_coupling_rhs(double omega, double delta, Branch branch);

enum class Stability { Stable, Saddle, Unstable, Degenerate };
const char* to_string(Stability s);

/// Tolerance for placing multipliers on or off the unit circle.
inline constexpr double kStabilityTol = 1e-4;

struct FixedPoint {
  PhasePoint point;
  double residual = 0.0;  ///< max-norm of step(x) - x
  Stability classification = Stability::Degenerate;
  std::array<double, 6> multiplier_moduli{};  ///< ascending
  int hyperbolic_pairs = 0;                   ///< multipliers with |mu| > 1 + tol
  bool krein_definite = false;                ///< all unit-circle pairs share one Krein sign
};

/// Classification from the linearisation (multipliers and Krein signatures).
///   Degenerate: some multiplier within tol of +1 or -1.
///   Stable:     elliptic and Krein-definite.
///   Saddle:     exactly one hyperbolic pair.
///   Unstable:   two or more hyperbolic pairs, or elliptic with mixed Krein
///               signature (the excited pole, an energy maximum of the spin).
Stability classify(int hyperbolic_pairs, bool krein_definite, bool near_unity);

struct SeedFailure {
  std::size_t seed_index;
  std::string reason;  ///< "NoConvergence" or "PoleProximity", plus detail
};

struct FixedPointSearch {
  std::vector<FixedPoint> points;  ///< deduplicated, sorted
  std::vector<SeedFailure> failures;
};

/// Seeds: both trivial fixed points plus points on the two diagonals
/// q_x = +/-q_y with p = -tan(omega/2) q, radii {0.5, 1, 2, 4}, several spin
/// directions in both hemispheres.
std::vector<PhasePoint> default_seeds(const ValidatedConfig& cfg);

/// Newton iteration on step(x) - x from each seed. Near a pole the chart is
/// (s_x, s_y) on that hemisphere, elsewhere the canonical (phi, s_z) chart.
FixedPointSearch find_fixed_points(const ValidatedConfig& cfg, std::span<const PhasePoint> seeds,
                                   Exec exec = Exec::Parallel);

/// Linearisation data at an (assumed) fixed point.
FixedPoint analyze_fixed_point(const PhasePoint& p, const ValidatedConfig& cfg);

struct BranchPoint {
  int branch_id;
  FixedPoint fixed_point;
};

struct BranchScanRow {
  double lambda;
  std::vector<BranchPoint> points;
};

/// Fixed points along an ascending lambda grid. Branch ids are carried across
/// consecutive grid points by greedy nearest-neighbour matching; unmatched
/// points open a new branch.
std::vector<BranchScanRow> branch_scan(const ValidatedConfig& cfg, std::span<const double> lambdas,
                                       Exec exec = Exec::Parallel);

/// Initial conditions for a phase portrait: a square (q_x, q_y) grid with
/// momenta on the line p = p_slope * q and a common spin.
struct PortraitGrid {
  double extent = 4.0;          ///< q in [-extent, extent]
  std::size_t points_per_axis = 9;
  double p_slope = 0.0;
  SpinVector spin{0.0, 0.0, -0.5};

  std::vector<PhasePoint> initial_conditions() const;
};

struct PortraitPoint {
  double qx;
  double qy;
};

/// (q_x, q_y) of every visited point, initial conditions in grid order, each
/// followed by its n_iter images.
std::vector<PortraitPoint> portrait(const ValidatedConfig& cfg, const PortraitGrid& grid,
                                    std::size_t n_iter, Exec exec = Exec::Parallel);

/// Histogram overlap of a point cloud with its mirror image in the line through
/// the origin at angle `axis_angle`: 1 for a perfectly symmetric cloud.
double reflection_symmetry_score(std::span<const PortraitPoint> cloud, double axis_angle,
                                 double extent, std::size_t bins);

}  // namespace kickjt
