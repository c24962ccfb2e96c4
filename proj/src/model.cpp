#include "kickjt/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kickjt/error.hpp"

namespace kickjt {

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace

OutOfRangeError::OutOfRangeError(std::vector<std::string> fields, const std::string& detail)
    : Error("OutOfRange(" + join(fields, ", ") + "): " + detail), fields_(std::move(fields)) {}

ValidatedConfig validate_params(const ModelParams& p, const NumericsConfig& n) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<std::string> bad;
  std::ostringstream detail;
  auto flag = [&](const char* name, const std::string& why) {
    bad.emplace_back(name);
    detail << name << ' ' << why << "; ";
  };
  auto open_angle = [](double x) { return std::isfinite(x) && x > 0.0 && x < two_pi; };

  if (!open_angle(p.omega)) flag("omega", "must lie in (0, 2pi)");
  if (!open_angle(p.delta)) flag("delta", "must lie in (0, 2pi)");
  if (!std::isfinite(p.lambda) || p.lambda < 0.0) flag("lambda", "must be finite and >= 0");
  if (n.truncation < 0) flag("truncation", "must be >= 0");
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!positive(n.newton_tol)) flag("newton_tol", "must be > 0");
  if (n.newton_max_iter <= 0) flag("newton_max_iter", "must be > 0");
  if (!positive(n.overlap_threshold) || n.overlap_threshold >= 1.0)
    flag("overlap_threshold", "must lie in (0, 1)");
  if (!positive(n.eig_residual_tol)) flag("eig_residual_tol", "must be > 0");
  if (!positive(n.fd_step)) flag("fd_step", "must be > 0");

  if (!bad.empty()) throw OutOfRangeError(std::move(bad), detail.str());
  return ValidatedConfig(p, n);
}

ValidatedConfig ValidatedConfig::with_lambda(double lambda) const {
  ModelParams p = params_;
  p.lambda = lambda;
  return validate_params(p, numerics_);
}

ValidatedConfig ValidatedConfig::with_truncation(int truncation) const {
  NumericsConfig n = numerics_;
  n.truncation = truncation;
  return validate_params(params_, n);
}

}  // namespace kickjt
