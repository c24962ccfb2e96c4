#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "kickjt/error.hpp"
#include "kickjt/observables.hpp"

namespace kickjt {

SpinDirection SpinDirection::from_vector(const SpinVector& s) {
  const double r = s.norm();
  if (r == 0.0) throw DimensionMismatchError("spin direction of a zero vector");
  SpinDirection d;
  d.theta = std::acos(std::clamp(s.z / r, -1.0, 1.0));
  d.phi = std::atan2(s.y, s.x);
  if (d.phi < 0.0) d.phi += 2.0 * std::numbers::pi;
  return d;
}

SpinDirection SpinDirection::flipped() const {
  SpinDirection d = *this;
  d.phi = std::fmod(phi + std::numbers::pi, 2.0 * std::numbers::pi);
  return d;
}

Eigen::Vector2cd SpinDirection::spinor() const {
  return {Complex(std::cos(theta / 2.0), 0.0), std::polar(std::sin(theta / 2.0), phi)};
}

QuantumState product_state(const Eigen::VectorXcd& oscillator, const Eigen::Vector2cd& spinor,
                           const FockBasis& basis) {
  if (oscillator.size() != static_cast<Eigen::Index>(basis.mode_count()))
    throw DimensionMismatchError("product_state: oscillator factor does not match basis");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index k = 0; k < oscillator.size(); ++k) {
    v(2 * k) = oscillator(k) * spinor(1);
    v(2 * k + 1) = oscillator(k) * spinor(0);
  }
  return QuantumState{std::move(v)};
}

const char* to_string(Subsystem s) {
  switch (s) {
    case Subsystem::Spin: return "spin";
    case Subsystem::OscX: return "osc_x";
    case Subsystem::OscY: return "osc_y";
    case Subsystem::OscPair: return "osc_pair";
    case Subsystem::SpinOscX: return "spin_osc_x";
  }
  return "?";
}

namespace {

// M[s](nx, ny) = <nx, ny, s|psi>, s = 0 for |+>, 1 for |->; zero-padded square.
std::array<Eigen::MatrixXcd, 2> amplitude_tensor(const QuantumState& state, const FockBasis& basis) {
  if (state.dim() != static_cast<Eigen::Index>(basis.size()))
    throw DimensionMismatchError("reduced_density: state does not match basis");
  const int d = basis.truncation() + 1;
  std::array<Eigen::MatrixXcd, 2> m{Eigen::MatrixXcd::Zero(d, d), Eigen::MatrixXcd::Zero(d, d)};
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& e = basis[i];
    m[e.sigma > 0 ? 0 : 1](e.nx, e.ny) = state.amplitudes(static_cast<Eigen::Index>(i));
  }
  return m;
}

Eigen::VectorXcd row_major(const Eigen::MatrixXcd& m) {
  Eigen::VectorXcd v(m.size());
  for (Eigen::Index a = 0; a < m.rows(); ++a)
    for (Eigen::Index b = 0; b < m.cols(); ++b) v(a * m.cols() + b) = m(a, b);
  return v;
}

}  // namespace

DensityMatrix reduced_density(const QuantumState& state, const FockBasis& basis, Subsystem keep) {
  const auto m = amplitude_tensor(state, basis);
  const int d = basis.truncation() + 1;
  DensityMatrix out{{}, keep, d};
  switch (keep) {
    case Subsystem::Spin:
      out.rho.resize(2, 2);
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) out.rho(s, t) = (m[s].array() * m[t].array().conjugate()).sum();
      break;
    case Subsystem::OscX:
      out.rho = m[0] * m[0].adjoint() + m[1] * m[1].adjoint();
      break;
    case Subsystem::OscY:
      out.rho = m[0].transpose() * m[0].conjugate() + m[1].transpose() * m[1].conjugate();
      break;
    case Subsystem::OscPair: {
      const Eigen::VectorXcd v0 = row_major(m[0]);
      const Eigen::VectorXcd v1 = row_major(m[1]);
      out.rho = v0 * v0.adjoint() + v1 * v1.adjoint();
      break;
    }
    case Subsystem::SpinOscX: {
      Eigen::MatrixXcd stacked(2 * d, d);
      stacked << m[0], m[1];
      out.rho = stacked * stacked.adjoint();
      break;
    }
  }
  return out;
}

double von_neumann_entropy(const DensityMatrix& rho, LogBase base) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.rho, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigFailureError("entropy: eigensolver failed", 0.0);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-14) s -= p * std::log(p);
  }
  return base == LogBase::Two ? s / std::numbers::ln2 : s;
}

double log_negativity(const DensityMatrix& pair, Subsystem transpose_over) {
  if (pair.subsystem != Subsystem::OscPair)
    throw DimensionMismatchError("log_negativity needs the oscillator-pair state");
  if (transpose_over != Subsystem::OscX && transpose_over != Subsystem::OscY)
    throw DimensionMismatchError("log_negativity transposes over osc_x or osc_y");
  const Eigen::Index d = pair.mode_dim;
  Eigen::MatrixXcd pt(d * d, d * d);
  const bool over_x = transpose_over == Subsystem::OscX;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      for (Eigen::Index c = 0; c < d; ++c)
        for (Eigen::Index e = 0; e < d; ++e)
          pt(a * d + b, c * d + e) = over_x ? pair.rho(c * d + b, a * d + e) : pair.rho(a * d + e, c * d + b);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(pt, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigFailureError("log_negativity: eigensolver failed", 0.0);
  const double en = std::log2(es.eigenvalues().cwiseAbs().sum());
  return (en < 0.0 && en > -1e-12) ? 0.0 : en;
}

std::pair<QuantumState, QuantumState> approx_bifurcated_states(const FixedPoint& fp, const FockBasis& basis) {
  const auto& o = fp.point.osc;
  const Complex ax = coherent_alpha(o.qx, o.px);
  const Complex ay = coherent_alpha(o.qy, o.py);
  const SpinDirection n = SpinDirection::from_vector(fp.point.spin);
  const QuantumState a = product_state(coherent_projection(ax, ay, basis), n.spinor(), basis);
  const QuantumState b = product_state(coherent_projection(-ax, -ay, basis), n.flipped().spinor(), basis);
  return {QuantumState::normalized(a.amplitudes - b.amplitudes), QuantumState::normalized(a.amplitudes + b.amplitudes)};
}

QuantumState phase_aligned(const QuantumState& s, const QuantumState& ref) {
  const Complex ov = ref.amplitudes.dot(s.amplitudes);
  if (std::abs(ov) == 0.0) return s;
  return QuantumState{s.amplitudes * (std::conj(ov) / std::abs(ov))};
}

QuantumState localized_superposition(const QuantumState& psi_g, const QuantumState& psi_e, const FixedPoint& fp,
                                     const FockBasis& basis) {
  const auto [g_ref, e_ref] = approx_bifurcated_states(fp, basis);
  return QuantumState::normalized(phase_aligned(psi_g, g_ref).amplitudes + phase_aligned(psi_e, e_ref).amplitudes);
}

double detection_probability(double theta, double alpha_x, double alpha_y) {
  const double c = std::cos(theta / 2.0);
  return c * c * (1.0 - std::exp(-2.0 * alpha_x * alpha_x - 2.0 * alpha_y * alpha_y));
}

std::vector<CurvePoint> curve_derivative(std::span<const CurvePoint> s) {
  const std::size_t n = s.size();
  if (n < 3) throw GridTooSmallError("curve_derivative needs at least 3 points, got " + std::to_string(n));
  std::vector<CurvePoint> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i].lambda = s[i].lambda;
  d[0].value = (s[1].value - s[0].value) / (s[1].lambda - s[0].lambda);
  d[n - 1].value = (s[n - 1].value - s[n - 2].value) / (s[n - 1].lambda - s[n - 2].lambda);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double hm = s[i].lambda - s[i - 1].lambda;
    const double hp = s[i + 1].lambda - s[i].lambda;
    d[i].value = (hm * hm * s[i + 1].value - hp * hp * s[i - 1].value + (hp * hp - hm * hm) * s[i].value) /
                 (hm * hp * (hm + hp));
  }
  return d;
}

std::vector<Peak> find_peaks(std::span<const double> xs, std::span<const double> ys, double rel_prominence) {
  const std::size_t n = ys.size();
  if (xs.size() != n) throw DimensionMismatchError("find_peaks: xs and ys differ in length");
  if (n < 3) return {};
  std::vector<double> sm(n);
  sm[0] = 0.5 * (ys[0] + ys[1]);
  sm[n - 1] = 0.5 * (ys[n - 2] + ys[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) sm[i] = (ys[i - 1] + ys[i] + ys[i + 1]) / 3.0;
  const double global = *std::max_element(sm.begin(), sm.end());

  std::vector<Peak> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || sm[i] > sm[i - 1];
    const bool right_ok = i + 1 == n || sm[i] >= sm[i + 1];
    if (!left_ok || !right_ok) continue;
    double left_min = sm[i];
    for (std::size_t j = i; j-- > 0 && sm[j] <= sm[i];) left_min = std::min(left_min, sm[j]);
    double right_min = sm[i];
    for (std::size_t j = i + 1; j < n && sm[j] <= sm[i]; ++j) right_min = std::min(right_min, sm[j]);
    // An edge has no base on its open side; the other side decides.
    double base;
    if (i == 0) base = right_min;
    else if (i + 1 == n) base = left_min;
    else base = std::max(left_min, right_min);
    const double prom = sm[i] - base;
    if (prom >= rel_prominence * global && prom > 0.0) peaks.push_back({i, xs[i], sm[i], prom});
  }
  return peaks;
}

EntanglementSample entanglement_measures(const QuantumState& state, const FockBasis& basis) {
  EntanglementSample e;
  e.s_spin = von_neumann_entropy(reduced_density(state, basis, Subsystem::Spin));
  e.s_osc_x = von_neumann_entropy(reduced_density(state, basis, Subsystem::OscX));
  e.log_negativity = log_negativity(reduced_density(state, basis, Subsystem::OscPair));
  return e;
}

std::vector<EntanglementSample> entanglement_measures(std::span<const QuantumState> states, const FockBasis& basis,
                                                      Exec exec) {
  std::vector<EntanglementSample> out(states.size());
  for_each_index(exec, states.size(), [&](std::size_t i) { out[i] = entanglement_measures(states[i], basis); });
  return out;
}

}  // namespace kickjt
