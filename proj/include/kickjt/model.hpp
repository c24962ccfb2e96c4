#pragma once

#include <cmath>
#include <numbers>

namespace kickjt {

/// Dimensionless model parameters: phase advance omega = w*tau, spin splitting
/// delta = D*tau, kick coupling lambda. Units: hbar = 1, m = 1/w.
struct ModelParams {
  double omega = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
};

struct NumericsConfig {
  int truncation = 18;  ///< maximum total phonon number N_t
  double newton_tol = 1e-12;
  int newton_max_iter = 60;
  double overlap_threshold = 0.01;
  double eig_residual_tol = 1e-9;
  double fd_step = 1e-6;
};

/// Parameters that passed validate_params. Immutable; safe to share between threads.
class ValidatedConfig {
 public:
  const ModelParams& params() const noexcept { return params_; }
  const NumericsConfig& numerics() const noexcept { return numerics_; }

  double omega() const noexcept { return params_.omega; }
  double delta() const noexcept { return params_.delta; }
  double lambda() const noexcept { return params_.lambda; }
  int truncation() const noexcept { return numerics_.truncation; }

  /// Same configuration at another coupling (re-validated).
  ValidatedConfig with_lambda(double lambda) const;
  ValidatedConfig with_truncation(int truncation) const;

 private:
  friend ValidatedConfig validate_params(const ModelParams&, const NumericsConfig&);
  ValidatedConfig(const ModelParams& p, const NumericsConfig& n) : params_(p), numerics_(n) {}

  ModelParams params_;
  NumericsConfig numerics_;
};

/// Checks every invariant and throws OutOfRangeError naming all offending fields.
ValidatedConfig validate_params(const ModelParams& params, const NumericsConfig& numerics = {});

inline double acot(double x) { return std::numbers::pi / 2.0 - std::atan(x); }

// Reference parameter set: omega = pi/60, delta = 2 acot(2).
inline double reference_omega() { return std::numbers::pi / 60.0; }
inline double reference_delta() { return 2.0 * acot(2.0); }

}  // namespace kickjt
