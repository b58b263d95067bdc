#pragma once

// Single-sample update rules for the LMS family used in sparse channel
// estimation. Every step is a pure function: it reads a WeightState and
// returns the successor state together with the a-priori error.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace sparselms {

using Vector = Eigen::VectorXd;

enum class Variant { Standard, ZA, RZA, RL1, LP, Oracle };

std::string_view variant_name(Variant v) noexcept;
std::optional<Variant> parse_variant(std::string_view name) noexcept;

/// Current estimate w_k and the previous estimate w_{k-1}. Only the
/// reweighted-l1 rule reads w_prev; the others carry it along so every
/// variant shares one state type.
struct WeightState {
  Vector w;
  Vector w_prev;

  static WeightState zeros(std::size_t n);
  std::size_t size() const noexcept { return static_cast<std::size_t>(w.size()); }
};

/// rho and eps are interpreted per variant:
///   ZA:  rho = rho_ZA                 (eps unused)
///   RZA: rho = rho_RZA, eps = eps_RZA
///   RL1: rho = rho_r,   eps = eps_r
///   LP:  rho = rho_p,   eps = eps_p, p in (0, 1)
/// Oracle uses `support` (0-based tap indices) and ignores rho/eps.
struct FilterParams {
  Variant variant = Variant::Standard;
  double mu = 0.05;
  double rho = 0.0;
  double eps = 1.0;
  double p = 0.5;
  std::vector<std::size_t> support;

  /// Throws ContractViolation if the parameters are unusable for a filter
  /// of length n.
  void validate(std::size_t n) const;
};

/// Sliding input window [x_k, x_{k-1}, ..., x_{k-N+1}], zero-initialized.
class TapDelayLine {
 public:
  explicit TapDelayLine(std::size_t n);

  void push(double sample);
  void reset();

  const Vector& window() const noexcept { return x_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(x_.size()); }

 private:
  Vector x_;
};

struct StepOutput {
  double error = 0.0;
  WeightState next;
};

/// sgn with sgn(0) = 0.
inline double sgn(double v) noexcept { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double predict_and_error(const WeightState& state, const Vector& x, double d);

StepOutput lms_step(const WeightState& state, const Vector& x, double d, const FilterParams& params);
StepOutput za_step(const WeightState& state, const Vector& x, double d, const FilterParams& params);
StepOutput rza_step(const WeightState& state, const Vector& x, double d, const FilterParams& params);
StepOutput rl1_step(const WeightState& state, const Vector& x, double d, const FilterParams& params);
StepOutput lp_step(const WeightState& state, const Vector& x, double d, const FilterParams& params);
StepOutput oracle_step(const WeightState& state, const Vector& x, double d, const FilterParams& params);

/// Dispatches on params.variant.
StepOutput step(const WeightState& state, const Vector& x, double d, const FilterParams& params);

namespace detail {

// Shared pieces of the update rules. The basis-generalized steps reuse
// them so that Psi = I follows the exact same arithmetic path.

/// Checks dimensions and finiteness of (state, x, d).
void check_step_inputs(const WeightState& state, const Vector& x, double d);

/// ZA shrinkage direction sgn(u).
Vector za_direction(const Vector& u);
/// RZA direction sgn(u) / (1 + eps |u|).
Vector rza_direction(const Vector& u, double eps);
/// Reweighted-l1 direction sgn(u) / (eps + |u_prev|).
Vector rl1_direction(const Vector& u, const Vector& u_prev, double eps);
/// lp direction ||u||_p^{1-p} sgn(u) / (eps + |u|^{1-p}); zero for u == 0.
Vector lp_direction(const Vector& u, double p, double eps);

/// Standard LMS prediction/update; returns (error, w + mu e x).
StepOutput gradient_step(const WeightState& state, const Vector& x, double d, double mu);

}  // namespace detail

}  // namespace sparselms
