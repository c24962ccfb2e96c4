#include <cmath>

#include "kickjt/error.hpp"
#include "kickjt/observables.hpp"

namespace kickjt {

namespace {

// alpha^n / sqrt(n!) for n = 0..nmax.
std::vector<Complex> scaled_powers(Complex a, int nmax) {
  std::vector<Complex> out(static_cast<std::size_t>(nmax) + 1);
  out[0] = 1.0;
  for (int n = 1; n <= nmax; ++n)
    out[static_cast<std::size_t>(n)] = out[static_cast<std::size_t>(n - 1)] * a / std::sqrt(static_cast<double>(n));
  return out;
}

}  // namespace

Eigen::VectorXcd coherent_projection(Complex ax, Complex ay, const FockBasis& basis) {
  const int nt = basis.truncation();
  const auto fx = scaled_powers(ax, nt);
  const auto fy = scaled_powers(ay, nt);
  const double envelope = std::exp(-0.5 * (std::norm(ax) + std::norm(ay)));
  Eigen::VectorXcd c(static_cast<Eigen::Index>(basis.mode_count()));
  for (int n = 0; n <= nt; ++n)
    for (int nx = 0; nx <= n; ++nx)
      c(static_cast<Eigen::Index>(FockBasis::mode_index(nx, n - nx))) =
          envelope * fx[static_cast<std::size_t>(nx)] * fy[static_cast<std::size_t>(n - nx)];
  return c;
}

double coherent_truncation_loss(Complex ax, Complex ay, const FockBasis& basis) {
  return 1.0 - coherent_projection(ax, ay, basis).squaredNorm();
}

Eigen::VectorXcd coherent_state(Complex ax, Complex ay, const FockBasis& basis) {
  Eigen::VectorXcd c = coherent_projection(ax, ay, basis);
  const double loss = 1.0 - c.squaredNorm();
  if (loss >= 1e-6)
    throw TruncationLossError("coherent state loses " + std::to_string(loss) + " of its norm at the cutoff", loss);
  return c / c.norm();
}

double husimi(const QuantumState& state, Complex ax, Complex ay, const FockBasis& basis) {
  if (state.dim() != static_cast<Eigen::Index>(basis.size()))
    throw DimensionMismatchError("husimi: state does not match basis");
  const Eigen::VectorXcd c = coherent_projection(ax, ay, basis);
  Complex down = 0.0, up = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const Complex w = std::conj(c(k));
    down += w * state.amplitudes(2 * k);
    up += w * state.amplitudes(2 * k + 1);
  }
  return std::norm(down) + std::norm(up);
}

PhaseCoords SectionLine::at(double t) const {
  PhaseCoords p;
  for (std::size_t i = 0; i < 4; ++i) p[i] = origin[i] + t * direction[i];
  return p;
}

PhaseCoords SectionPlane::at(double u, double v) const {
  PhaseCoords p;
  for (std::size_t i = 0; i < 4; ++i) p[i] = origin[i] + u * first[i] + v * second[i];
  return p;
}

SectionLine diagonal_section(double omega) {
  const double k = -std::tan(omega / 2.0);
  return {{0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, k, k}};
}

SectionPlane symmetry_plane(double omega) {
  const double k = -std::tan(omega / 2.0);
  return {{0.0, 0.0, 0.0, 0.0}, {1.0, 0.0, k, 0.0}, {0.0, 1.0, 0.0, k}};
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  if (n == 1) {
    g[0] = lo;
    return g;
  }
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return g;
}

namespace {

double husimi_at(const QuantumState& s, const FockBasis& basis, const PhaseCoords& x) {
  return husimi(s, coherent_alpha(x[0], x[2]), coherent_alpha(x[1], x[3]), basis);
}

}  // namespace

HusimiGrid husimi_line(const QuantumState& state, const FockBasis& basis, const SectionLine& line,
                       std::span<const double> ts, Exec exec) {
  HusimiGrid g;
  g.u.assign(ts.begin(), ts.end());
  g.values.resize(ts.size());
  for_each_index(exec, ts.size(), [&](std::size_t i) { g.values[i] = husimi_at(state, basis, line.at(ts[i])); });
  return g;
}

HusimiGrid husimi_plane(const QuantumState& state, const FockBasis& basis, const SectionPlane& plane,
                        std::span<const double> us, std::span<const double> vs, Exec exec) {
  HusimiGrid g;
  g.u.assign(us.begin(), us.end());
  g.v.assign(vs.begin(), vs.end());
  g.values.resize(us.size() * vs.size());
  const std::size_t nv = vs.size();
  for_each_index(exec, g.values.size(), [&](std::size_t k) {
    g.values[k] = husimi_at(state, basis, plane.at(us[k / nv], vs[k % nv]));
  });
  return g;
}

}  // namespace kickjt
