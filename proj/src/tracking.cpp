#include <algorithm>
#include <cmath>
#include <numbers>

#include "kickjt/error.hpp"
#include "kickjt/quantum_floquet.hpp"

namespace kickjt {

const TrackPoint* TrackedPath::at(double lambda) const {
  for (const auto& p : points)
    if (p.lambda == lambda) return &p;
  return nullptr;
}

QuantumState pgs_seed(const FockBasis& basis) { return QuantumState::basis_state(basis, 0, 0, -1); }

QuantumState pes_seed(const FockBasis& basis) {
  if (basis.truncation() < 1) throw DimensionMismatchError("pes_seed needs N_t >= 1");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  v(static_cast<Eigen::Index>(*basis.index_of(1, 0, -1))) = 1.0;
  v(static_cast<Eigen::Index>(*basis.index_of(0, 1, -1))) = 1.0;
  return QuantumState::normalized(v);
}

namespace {

FloquetSpectrum spectrum_at(const ValidatedConfig& cfg, const FockBasis& basis, Parity sector, bool full) {
  const double tol = cfg.numerics().eig_residual_tol;
  if (full) return diagonalize(floquet_operator(cfg, basis), tol);
  return diagonalize_block(floquet_sector_block(cfg, basis, sector), basis.sector(sector),
                           static_cast<Eigen::Index>(basis.size()), tol);
}

}  // namespace

TrackedPath track_eigenstate(double lambda_start, double lambda_end, const QuantumState& seed,
                             const ValidatedConfig& cfg, const TrackOptions& options) {
  if (!(lambda_start < lambda_end))
    throw OutOfRangeError({"lambda_end"}, "track_eigenstate requires lambda_start < lambda_end");
  const FockBasis basis(cfg.truncation());
  if (seed.dim() != static_cast<Eigen::Index>(basis.size()))
    throw DimensionMismatchError("seed does not match the configured truncation");

  const QuantumState start = QuantumState::normalized(seed.amplitudes);
  const double leak_o = sector_leakage(start, basis, Parity::O);
  const double leak_e = sector_leakage(start, basis, Parity::E);
  if (std::min(leak_o, leak_e) > 1e-12) throw Error("track_eigenstate: seed mixes parity sectors");
  const Parity sector = leak_o <= leak_e ? Parity::O : Parity::E;

  const ValidatedConfig start_cfg = cfg.with_lambda(lambda_start);
  const Operator u0 = floquet_operator(start_cfg, basis);
  const Eigen::VectorXcd u_seed = u0.matrix * start.amplitudes;
  const Complex mu = start.amplitudes.dot(u_seed);
  const double seed_residual = (u_seed - mu * start.amplitudes).norm();
  if (seed_residual > cfg.numerics().eig_residual_tol)
    throw EigFailureError("seed is not an eigenvector of U(lambda_start)", seed_residual);

  std::vector<double> stops;
  for (double w : options.waypoints)
    if (w > lambda_start && w < lambda_end) stops.push_back(w);
  stops.push_back(lambda_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  TrackedPath path;
  path.sector = sector;
  path.points.push_back({lambda_start, start, std::arg(mu), 0.0, 1.0, std::min(leak_o, leak_e)});

  const double threshold = cfg.numerics().overlap_threshold;
  double lambda = lambda_start;
  double step = std::min(options.initial_step, options.max_step);
  int streak = 0;
  std::size_t next_stop = 0;
  while (next_stop < stops.size()) {
    const double target = stops[next_stop];
    const bool reaches = step >= target - lambda;
    const double trial = reaches ? target : lambda + step;
    const double dl = trial - lambda;

    const FloquetSpectrum spec = spectrum_at(cfg.with_lambda(trial), basis, sector, options.full_space);
    const Eigen::VectorXcd& current = path.points.back().state.amplitudes;
    std::size_t best = 0;
    double best_overlap = -1.0;
    for (std::size_t k = 0; k < spec.eigenvectors.size(); ++k) {
      const double ov = std::abs(current.dot(spec.eigenvectors[k].amplitudes));
      if (ov > best_overlap) {
        best_overlap = ov;
        best = k;
      }
    }

    if (1.0 - best_overlap < threshold) {
      Eigen::VectorXcd v = spec.eigenvectors[best].amplitudes;
      const Complex ov = current.dot(v);
      v *= std::conj(ov) / std::abs(ov);  // continuous gauge along the path
      QuantumState s{v};
      const double leak = sector_leakage(s, basis, sector);
      path.points.push_back({trial, std::move(s), spec.eigenphases[best], dl, best_overlap, leak});
      lambda = trial;
      if (reaches) ++next_stop;
      if (++streak == 2) {
        step = std::min(step * 1.5, options.max_step);
        streak = 0;
      }
    } else {
      ++path.rejected_steps;
      streak = 0;
      step = dl / 2.0;
      if (step < options.min_step)
        throw StepUnderflowError("continuation step fell below min_step (sharp avoided crossing)", lambda);
    }
  }
  return path;
}

}  // namespace kickjt
