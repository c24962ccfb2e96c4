#include "kickjt/quantum_floquet.hpp"

#include "kickjt/error.hpp"

namespace kickjt {

const char* to_string(Parity p) { return p == Parity::O ? "O" : "E"; }

Parity parity_of(int total_quanta, int sigma) {
  // Eigenvalue of Pi on |N, l>|sigma> is sigma * (-1)^N.
  const int eigenvalue = (total_quanta % 2 == 0 ? 1 : -1) * sigma;
  return eigenvalue < 0 ? Parity::O : Parity::E;
}

FockBasis::FockBasis(int truncation) : truncation_(truncation) {
  if (truncation < 0) throw OutOfRangeError({"truncation"}, "must be >= 0");
  const auto modes = static_cast<std::size_t>((truncation + 1) * (truncation + 2) / 2);
  entries_.reserve(2 * modes);
  for (int n = 0; n <= truncation; ++n) {
    for (int nx = 0; nx <= n; ++nx) {
      for (int sigma : {-1, 1}) {
        const Parity p = parity_of(n, sigma);
        (p == Parity::O ? sector_o_ : sector_e_).push_back(static_cast<Eigen::Index>(entries_.size()));
        entries_.push_back({nx, n - nx, sigma, p});
      }
    }
  }
}

std::optional<std::size_t> FockBasis::index_of(int nx, int ny, int sigma) const {
  if (nx < 0 || ny < 0 || nx + ny > truncation_ || (sigma != 1 && sigma != -1)) return std::nullopt;
  return 2 * mode_index(nx, ny) + (sigma > 0 ? 1 : 0);
}

QuantumState QuantumState::normalized(Eigen::VectorXcd v) {
  const double n = v.norm();
  if (!(n > 0.0)) throw DimensionMismatchError("cannot normalise a zero state");
  return {v / n};
}

QuantumState QuantumState::basis_state(const FockBasis& basis, int nx, int ny, int sigma) {
  const auto i = basis.index_of(nx, ny, sigma);
  if (!i) throw DimensionMismatchError("basis state outside the truncated basis");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  v(static_cast<Eigen::Index>(*i)) = 1.0;
  return {v};
}

}  // namespace kickjt
