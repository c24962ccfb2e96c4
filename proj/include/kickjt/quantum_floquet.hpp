#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kickjt/model.hpp"

namespace kickjt {

using Complex = std::complex<double>;

/// Parity sectors of Pi = -i exp(i pi J_z): O has eigenvalue -1, E has +1.
enum class Parity { O, E };
const char* to_string(Parity p);

struct BasisEntry {
  int nx;
  int ny;
  int sigma;  ///< +1 for |+>, -1 for |->
  Parity parity;
  int total() const { return nx + ny; }
};

/// Two-mode Fock states (n_x, n_y) with n_x + n_y <= N_t, times the two spin
/// states. Ordered by ascending (N, n_x, sigma) with |-> before |+>, so entries
/// 2k and 2k+1 share oscillator state k.
class FockBasis {
 public:
  explicit FockBasis(int truncation);

  int truncation() const noexcept { return truncation_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t mode_count() const noexcept { return entries_.size() / 2; }
  const BasisEntry& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<BasisEntry>& entries() const noexcept { return entries_; }

  /// Index of oscillator state (n_x, n_y); requires n_x + n_y <= N_t.
  static std::size_t mode_index(int nx, int ny) {
    const int n = nx + ny;
    return static_cast<std::size_t>(n * (n + 1) / 2 + nx);
  }
  std::optional<std::size_t> index_of(int nx, int ny, int sigma) const;
  /// Basis indices belonging to one parity sector, ascending.
  const std::vector<Eigen::Index>& sector(Parity p) const {
    return p == Parity::O ? sector_o_ : sector_e_;
  }

 private:
  int truncation_;
  std::vector<BasisEntry> entries_;
  std::vector<Eigen::Index> sector_o_;
  std::vector<Eigen::Index> sector_e_;
};

Parity parity_of(int total_quanta, int sigma);

struct OperatorFlags {
  bool hermitian = false;
  bool unitary = false;
  bool diagonal = false;
};

struct Operator {
  Eigen::MatrixXcd matrix;
  OperatorFlags flags;
  Eigen::Index dim() const { return matrix.rows(); }
};

struct SparseOperator {
  Eigen::SparseMatrix<Complex> matrix;
  OperatorFlags flags;
  Eigen::Index dim() const { return matrix.rows(); }
};

struct QuantumState {
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
  Eigen::Index dim() const { return amplitudes.size(); }
  /// Throws DimensionMismatchError on a zero vector.
  static QuantumState normalized(Eigen::VectorXcd v);
  static QuantumState basis_state(const FockBasis& basis, int nx, int ny, int sigma);
};

struct OperatorSet {
  Operator qx;
  Operator qy;
  Operator h0_propagator;  ///< diag exp(-i[omega (N+1) + delta m_sigma])
  Operator parity;         ///< diag -i exp(i pi (N + m_sigma)), entries -1 / +1
};

OperatorSet build_operators(const FockBasis& basis, const ValidatedConfig& cfg);

/// Position, momentum and spin operators as sparse matrices; usable at
/// truncations where dense storage is impractical.
struct ObservableSet {
  SparseOperator qx, qy, px, py, sx, sy, sz;
};
ObservableSet build_observables(const FockBasis& basis);

enum class Axis { X, Y, Z };

/// exp(-i strength q_osc s_spin) on the truncated basis, exactly unitary.
/// q_osc splits into tridiagonal chains (one per fixed other-mode occupation),
/// each exponentiated through its own eigendecomposition, combined with the
/// spectral projectors of s_spin.
class KickPropagator {
 public:
  KickPropagator(const FockBasis& basis, Axis oscillator, Axis spin, double strength);

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  Operator dense() const;

 private:
  struct Chain {
    std::vector<Eigen::Index> plus;   ///< basis indices of |n, +> along the chain
    std::vector<Eigen::Index> minus;  ///< basis indices of |n, ->
    Eigen::MatrixXcd block;           ///< 2L x 2L, ordered (plus..., minus...)
  };
  Eigen::Index dim_;
  std::vector<Chain> chains_;
};

/// exp(-i lambda q_chi s_chi) for chi in {X, Y}.
Operator kick_propagator(Axis axis, double lambda, const FockBasis& basis);

/// U = H0_propagator * K_x * K_y.
Operator floquet_operator(const ValidatedConfig& cfg, const FockBasis& basis);

/// Restriction of U to one parity sector (rows/cols in sector index order).
Eigen::MatrixXcd floquet_sector_block(const ValidatedConfig& cfg, const FockBasis& basis, Parity p);

/// Applies U without forming it; cost is linear in the chain sizes squared.
class FloquetPropagator {
 public:
  FloquetPropagator(const ValidatedConfig& cfg, const FockBasis& basis);
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;

 private:
  Eigen::VectorXcd h0_phases_;
  KickPropagator kick_x_;
  KickPropagator kick_y_;
};

/// exp(-i angle sigma_y) acting on the spin factor.
Operator spin_rotation_y(double angle, const FockBasis& basis);

struct FloquetSpectrum {
  std::vector<double> eigenphases;   ///< in (-pi, pi]
  std::vector<QuantumState> eigenvectors;
  std::vector<double> residuals;     ///< ||U v - e^{i theta} v||
  std::vector<double> moduli;        ///< |eigenvalue|
  double max_residual() const;
};

/// Complex Schur decomposition of the normal matrix U; the Schur vectors are
/// the orthonormal eigenvectors. Throws EigFailureError if a residual exceeds
/// residual_tol or U is not flagged unitary.
FloquetSpectrum diagonalize(const Operator& u, double residual_tol);

/// Eigendecomposition of a unitary block; eigenvectors are embedded into the
/// full basis through `embedding` (basis index of each block row).
FloquetSpectrum diagonalize_block(const Eigen::MatrixXcd& block, const std::vector<Eigen::Index>& embedding,
                                  Eigen::Index full_dim, double residual_tol);

Complex expectation(const QuantumState& state, const Operator& op);
Complex expectation(const QuantumState& state, const SparseOperator& op);

/// Squared weight of the state outside parity sector p.
double sector_leakage(const QuantumState& state, const FockBasis& basis, Parity p);

/// Max-norm helpers for structural checks.
double unitarity_defect(const Eigen::MatrixXcd& u);
double commutator_defect(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// --- continuation in lambda ---------------------------------------------------

struct TrackOptions {
  double initial_step = 0.01;
  double max_step = 0.02;
  double min_step = 1e-6;
  /// Couplings the path must land on exactly (e.g. an output grid).
  std::vector<double> waypoints;
  /// Diagonalise the full U instead of the seed's parity block; sector
  /// leakage then measures how well the eigensolver respects parity.
  bool full_space = false;
};

struct TrackPoint {
  double lambda;
  QuantumState state;
  double eigenphase;
  double delta_lambda;  ///< step that led here (0 for the seed)
  double overlap;       ///< |<previous|this>| (1 for the seed)
  double sector_leakage;
};

struct TrackedPath {
  Parity sector;
  std::vector<TrackPoint> points;
  int rejected_steps = 0;

  /// Point with exactly this coupling, if the path visited it.
  const TrackPoint* at(double lambda) const;
};

/// Follows a Floquet eigenstate from lambda_start to lambda_end. Each trial
/// step picks the sector eigenvector of U(lambda + dl) with the largest
/// overlap against the current state and accepts when 1 - |overlap| is below
/// the configured threshold; rejected steps halve dl, every second consecutive
/// acceptance grows it by 1.5. Throws StepUnderflowError below min_step.
TrackedPath track_eigenstate(double lambda_start, double lambda_end, const QuantumState& seed,
                             const ValidatedConfig& cfg, const TrackOptions& options = {});

/// |0,0>|->, the lambda = 0 ground state (sector O).
QuantumState pgs_seed(const FockBasis& basis);
/// (|1,0> + |0,1>)|-> / sqrt(2): the one-quantum mode along q_x = q_y
/// (sector E), the small-amplitude limit of the symmetric bifurcated doublet.
QuantumState pes_seed(const FockBasis& basis);

}  // namespace kickjt
