#include "kickjt/quantum_floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "kickjt/error.hpp"

namespace kickjt {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::Index as_index(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Spin matrices in the order (+, -).
Eigen::Matrix2cd spin_matrix(Axis a) {
  Eigen::Matrix2cd s;
  switch (a) {
    case Axis::X: s << 0.0, 0.5, 0.5, 0.0; break;
    case Axis::Y: s << 0.0, -0.5 * kI, 0.5 * kI, 0.0; break;
    case Axis::Z: s << 0.5, 0.0, 0.0, -0.5; break;
  }
  return s;
}

using Triplets = std::vector<Eigen::Triplet<Complex>>;

SparseOperator from_triplets(Eigen::Index dim, const Triplets& t, OperatorFlags flags) {
  SparseOperator op;
  op.matrix.resize(dim, dim);
  op.matrix.setFromTriplets(t.begin(), t.end());
  op.flags = flags;
  return op;
}

Eigen::VectorXcd h0_phases(const FockBasis& basis, const ValidatedConfig& cfg) {
  Eigen::VectorXcd ph(as_index(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& e = basis[i];
    const double energy = cfg.omega() * (e.total() + 1) + cfg.delta() * 0.5 * e.sigma;
    ph(as_index(i)) = std::exp(-kI * energy);
  }
  return ph;
}

}  // namespace

OperatorSet build_operators(const FockBasis& basis, const ValidatedConfig& cfg) {
  const Eigen::Index dim = as_index(basis.size());
  OperatorSet ops;
  ops.qx.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  ops.qy.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& e = basis[i];
    if (auto j = basis.index_of(e.nx + 1, e.ny, e.sigma)) {
      const double v = std::sqrt((e.nx + 1) / 2.0);
      ops.qx.matrix(as_index(*j), as_index(i)) = v;
      ops.qx.matrix(as_index(i), as_index(*j)) = v;
    }
    if (auto j = basis.index_of(e.nx, e.ny + 1, e.sigma)) {
      const double v = std::sqrt((e.ny + 1) / 2.0);
      ops.qy.matrix(as_index(*j), as_index(i)) = v;
      ops.qy.matrix(as_index(i), as_index(*j)) = v;
    }
  }
  ops.qx.flags = ops.qy.flags = {true, false, false};

  ops.h0_propagator.matrix = h0_phases(basis, cfg).asDiagonal();
  ops.h0_propagator.flags = {false, true, true};

  ops.parity.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t i = 0; i < basis.size(); ++i)
    ops.parity.matrix(as_index(i), as_index(i)) = basis[i].parity == Parity::O ? -1.0 : 1.0;
  ops.parity.flags = {true, true, true};
  return ops;
}

ObservableSet build_observables(const FockBasis& basis) {
  const Eigen::Index dim = as_index(basis.size());
  Triplets qx, qy, px, py, sx, sy, sz;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& e = basis[i];
    const auto ii = as_index(i);
    if (auto j = basis.index_of(e.nx + 1, e.ny, e.sigma)) {
      const double v = std::sqrt((e.nx + 1) / 2.0);
      const auto jj = as_index(*j);
      qx.emplace_back(jj, ii, v);
      qx.emplace_back(ii, jj, v);
      px.emplace_back(jj, ii, kI * v);
      px.emplace_back(ii, jj, -kI * v);
    }
    if (auto j = basis.index_of(e.nx, e.ny + 1, e.sigma)) {
      const double v = std::sqrt((e.ny + 1) / 2.0);
      const auto jj = as_index(*j);
      qy.emplace_back(jj, ii, v);
      qy.emplace_back(ii, jj, v);
      py.emplace_back(jj, ii, kI * v);
      py.emplace_back(ii, jj, -kI * v);
    }
    const auto flip = as_index(*basis.index_of(e.nx, e.ny, -e.sigma));
    sx.emplace_back(ii, flip, 0.5);
    // <+|s_y|-> = -i/2, <-|s_y|+> = +i/2
    sy.emplace_back(ii, flip, e.sigma > 0 ? -0.5 * kI : 0.5 * kI);
    sz.emplace_back(ii, ii, 0.5 * e.sigma);
  }
  const OperatorFlags herm{true, false, false};
  return {from_triplets(dim, qx, herm), from_triplets(dim, qy, herm), from_triplets(dim, px, herm),
          from_triplets(dim, py, herm), from_triplets(dim, sx, herm), from_triplets(dim, sy, herm),
          from_triplets(dim, sz, {true, false, true})};
}

KickPropagator::KickPropagator(const FockBasis& basis, Axis oscillator, Axis spin, double strength)
    : dim_(as_index(basis.size())) {
  if (oscillator == Axis::Z) throw DimensionMismatchError("no oscillator along z");
  const int nt = basis.truncation();
  const Eigen::Matrix2cd s = spin_matrix(spin);
  const Eigen::Matrix2cd proj_up = 0.5 * Eigen::Matrix2cd::Identity() + s;
  const Eigen::Matrix2cd proj_down = 0.5 * Eigen::Matrix2cd::Identity() - s;

  for (int other = 0; other <= nt; ++other) {
    const int len = nt - other + 1;
    Chain chain;
    for (int k = 0; k < len; ++k) {
      const int nx = oscillator == Axis::X ? k : other;
      const int ny = oscillator == Axis::X ? other : k;
      chain.plus.push_back(as_index(*basis.index_of(nx, ny, 1)));
      chain.minus.push_back(as_index(*basis.index_of(nx, ny, -1)));
    }
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(len, len);
    for (int k = 0; k + 1 < len; ++k) q(k, k + 1) = q(k + 1, k) = std::sqrt((k + 1) / 2.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q);
    const Eigen::MatrixXcd w = es.eigenvectors().cast<Complex>();
    const Eigen::VectorXd t = es.eigenvalues();
    // exp(-i strength m q) for spin eigenvalue m = +1/2 and -1/2.
    const Eigen::MatrixXcd e_up =
        w * (-kI * strength * 0.5 * t.cast<Complex>()).array().exp().matrix().asDiagonal() * w.adjoint();
    const Eigen::MatrixXcd e_down =
        w * (kI * strength * 0.5 * t.cast<Complex>()).array().exp().matrix().asDiagonal() * w.adjoint();
    chain.block.resize(2 * len, 2 * len);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        chain.block.block(a * len, b * len, len, len) = proj_up(a, b) * e_up + proj_down(a, b) * e_down;
    chains_.push_back(std::move(chain));
  }
}

Eigen::VectorXcd KickPropagator::apply(const Eigen::VectorXcd& v) const {
  if (v.size() != dim_) throw DimensionMismatchError("KickPropagator::apply: dimension mismatch");
  Eigen::VectorXcd out(dim_);
  for (const Chain& c : chains_) {
    const auto len = as_index(c.plus.size());
    Eigen::VectorXcd local(2 * len);
    for (Eigen::Index k = 0; k < len; ++k) {
      local(k) = v(c.plus[static_cast<std::size_t>(k)]);
      local(len + k) = v(c.minus[static_cast<std::size_t>(k)]);
    }
    const Eigen::VectorXcd r = c.block * local;
    for (Eigen::Index k = 0; k < len; ++k) {
      out(c.plus[static_cast<std::size_t>(k)]) = r(k);
      out(c.minus[static_cast<std::size_t>(k)]) = r(len + k);
    }
  }
  return out;
}

Operator KickPropagator::dense() const {
  Operator op;
  op.matrix = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (const Chain& c : chains_) {
    std::vector<Eigen::Index> idx = c.plus;
    idx.insert(idx.end(), c.minus.begin(), c.minus.end());
    op.matrix(idx, idx) = c.block;
  }
  op.flags = {false, true, false};
  return op;
}

Operator kick_propagator(Axis axis, double lambda, const FockBasis& basis) {
  if (axis == Axis::Z) throw DimensionMismatchError("kicks act along x or y");
  return KickPropagator(basis, axis, axis, lambda).dense();
}

Operator floquet_operator(const ValidatedConfig& cfg, const FockBasis& basis) {
  const Operator kx = kick_propagator(Axis::X, cfg.lambda(), basis);
  const Operator ky = kick_propagator(Axis::Y, cfg.lambda(), basis);
  Operator u;
  u.matrix = h0_phases(basis, cfg).asDiagonal() * (kx.matrix * ky.matrix);
  u.flags = {false, true, cfg.lambda() == 0.0};
  return u;
}

Eigen::MatrixXcd floquet_sector_block(const ValidatedConfig& cfg, const FockBasis& basis, Parity p) {
  const auto& idx = basis.sector(p);
  const Eigen::MatrixXcd kx = kick_propagator(Axis::X, cfg.lambda(), basis).matrix(idx, idx);
  const Eigen::MatrixXcd ky = kick_propagator(Axis::Y, cfg.lambda(), basis).matrix(idx, idx);
  const Eigen::VectorXcd phases = h0_phases(basis, cfg)(idx);
  return phases.asDiagonal() * (kx * ky);
}

FloquetPropagator::FloquetPropagator(const ValidatedConfig& cfg, const FockBasis& basis)
    : h0_phases_(h0_phases(basis, cfg)),
      kick_x_(basis, Axis::X, Axis::X, cfg.lambda()),
      kick_y_(basis, Axis::Y, Axis::Y, cfg.lambda()) {}

Eigen::VectorXcd FloquetPropagator::apply(const Eigen::VectorXcd& v) const {
  return h0_phases_.cwiseProduct(kick_x_.apply(kick_y_.apply(v)));
}

Operator spin_rotation_y(double angle, const FockBasis& basis) {
  const Eigen::Index dim = as_index(basis.size());
  Operator r;
  r.matrix = Eigen::MatrixXcd::Zero(dim, dim);
  // exp(-i a sigma_y) = cos a - i sin a sigma_y; in (+, -) order [[c, -s], [s, c]].
  const double c = std::cos(angle), s = std::sin(angle);
  for (std::size_t k = 0; k < basis.mode_count(); ++k) {
    const auto down = as_index(2 * k), up = as_index(2 * k + 1);
    r.matrix(up, up) = c;
    r.matrix(up, down) = -s;
    r.matrix(down, up) = s;
    r.matrix(down, down) = c;
  }
  r.flags = {false, true, false};
  return r;
}

double FloquetSpectrum::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

namespace {

double principal_phase(Complex z) {
  double a = std::arg(z);
  if (a <= -std::numbers::pi) a = std::numbers::pi;
  return a;
}

// Fixes the global phase so that the largest-magnitude component is real positive.
void canonical_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const Complex c = v(k);
  v *= std::conj(c) / std::abs(c);
}

FloquetSpectrum spectrum_from_schur(const Eigen::MatrixXcd& m, const std::vector<Eigen::Index>* embedding,
                                    Eigen::Index full_dim, double residual_tol) {
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(m, true);
  if (schur.info() != Eigen::Success) throw EigFailureError("complex Schur decomposition failed", INFINITY);
  const Eigen::MatrixXcd& t = schur.matrixT();
  Eigen::MatrixXcd q = schur.matrixU();
  const Eigen::Index n = m.rows();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) order[static_cast<std::size_t>(k)] = k;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return principal_phase(t(a, a)) < principal_phase(t(b, b));
  });

  FloquetSpectrum spec;
  for (Eigen::Index k : order) {
    const Complex mu = t(k, k);
    const double theta = principal_phase(mu);
    auto v = q.col(k);
    canonical_phase(v);
    const double res = (m * v - std::exp(kI * theta) * v).norm();
    spec.eigenphases.push_back(theta);
    spec.moduli.push_back(std::abs(mu));
    spec.residuals.push_back(res);
    if (embedding) {
      Eigen::VectorXcd full = Eigen::VectorXcd::Zero(full_dim);
      full(*embedding) = v;
      spec.eigenvectors.push_back({full});
    } else {
      spec.eigenvectors.push_back({v});
    }
  }
  const double worst = spec.max_residual();
  if (worst > residual_tol)
    throw EigFailureError("eigenpair residual " + std::to_string(worst) + " exceeds tolerance", worst);
  return spec;
}

}  // namespace

FloquetSpectrum diagonalize(const Operator& u, double residual_tol) {
  if (!u.flags.unitary) throw EigFailureError("diagonalize requires an operator flagged unitary", INFINITY);
  return spectrum_from_schur(u.matrix, nullptr, u.dim(), residual_tol);
}

FloquetSpectrum diagonalize_block(const Eigen::MatrixXcd& block, const std::vector<Eigen::Index>& embedding,
                                  Eigen::Index full_dim, double residual_tol) {
  if (as_index(embedding.size()) != block.rows())
    throw DimensionMismatchError("diagonalize_block: embedding size mismatch");
  return spectrum_from_schur(block, &embedding, full_dim, residual_tol);
}

Complex expectation(const QuantumState& state, const Operator& op) {
  if (op.dim() != state.dim()) throw DimensionMismatchError("expectation: dimension mismatch");
  return state.amplitudes.dot(op.matrix * state.amplitudes);
}

Complex expectation(const QuantumState& state, const SparseOperator& op) {
  if (op.dim() != state.dim()) throw DimensionMismatchError("expectation: dimension mismatch");
  const Eigen::VectorXcd av = op.matrix * state.amplitudes;
  return state.amplitudes.dot(av);
}

double sector_leakage(const QuantumState& state, const FockBasis& basis, Parity p) {
  const Parity other = p == Parity::O ? Parity::E : Parity::O;
  return state.amplitudes(basis.sector(other)).squaredNorm();
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  return (u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

double commutator_defect(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a * b - b * a).cwiseAbs().maxCoeff();
}

}  // namespace kickjt
