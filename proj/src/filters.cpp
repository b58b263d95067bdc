#include "sparselms/filters.hpp"

#include <cmath>
#include <string>

#include "sparselms/errors.hpp"

namespace sparselms {

namespace {

constexpr std::pair<Variant, std::string_view> kVariantNames[] = {
    {Variant::Standard, "standard"}, {Variant::ZA, "za"}, {Variant::RZA, "rza"},
    {Variant::RL1, "rl1"},           {Variant::LP, "lp"}, {Variant::Oracle, "oracle"},
};

void require_variant(const FilterParams& params, Variant expected) {
  if (params.variant != expected) {
    throw ContractViolation("step rule for '" + std::string(variant_name(expected)) +
                            "' called with variant '" +
                            std::string(variant_name(params.variant)) + "'");
  }
}

// Subtracts rho * direction in place. Skipped when rho == 0 so that a
// disabled penalty reproduces the plain LMS trajectory bit for bit.
void apply_penalty(StepOutput& out, double rho, const Vector& direction) {
  if (rho != 0.0) out.next.w -= rho * direction;
}

}  // namespace

std::string_view variant_name(Variant v) noexcept {
  for (const auto& [variant, name] : kVariantNames) {
    if (variant == v) return name;
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) noexcept {
  for (const auto& [variant, n] : kVariantNames) {
    if (n == name) return variant;
  }
  return std::nullopt;
}

WeightState WeightState::zeros(std::size_t n) {
  return WeightState{Vector::Zero(static_cast<Eigen::Index>(n)),
                     Vector::Zero(static_cast<Eigen::Index>(n))};
}

void FilterParams::validate(std::size_t n) const {
  if (n == 0) throw ContractViolation("filter length must be at least 1");
  if (!std::isfinite(mu) || mu < 0.0) throw ContractViolation("step size mu must be finite and >= 0");
  if (!std::isfinite(rho) || rho < 0.0) throw ContractViolation("rho must be finite and >= 0");
  const bool uses_eps =
      variant == Variant::RZA || variant == Variant::RL1 || variant == Variant::LP;
  if (uses_eps && !(std::isfinite(eps) && eps > 0.0)) {
    throw ContractViolation("eps must be finite and > 0 for variant '" +
                            std::string(variant_name(variant)) + "'");
  }
  if (variant == Variant::LP && !(p > 0.0 && p < 1.0)) {
    throw ContractViolation("lp variant requires 0 < p < 1");
  }
  if (variant == Variant::Oracle) {
    for (std::size_t idx : support) {
      if (idx >= n) {
        throw ContractViolation("oracle support index " + std::to_string(idx) +
                                " out of range for length " + std::to_string(n));
      }
    }
  }
}

TapDelayLine::TapDelayLine(std::size_t n) : x_(Vector::Zero(static_cast<Eigen::Index>(n))) {
  if (n == 0) throw ContractViolation("tap delay line length must be at least 1");
}

void TapDelayLine::push(double sample) {
  for (Eigen::Index i = x_.size() - 1; i > 0; --i) x_[i] = x_[i - 1];
  x_[0] = sample;
}

void TapDelayLine::reset() { x_.setZero(); }

namespace detail {

void check_step_inputs(const WeightState& state, const Vector& x, double d) {
  if (state.w.size() == 0) throw ContractViolation("empty weight state");
  if (state.w.size() != state.w_prev.size()) {
    throw ContractViolation("w and w_prev lengths differ");
  }
  if (x.size() != state.w.size()) {
    throw ContractViolation("input window length " + std::to_string(x.size()) +
                            " does not match filter length " + std::to_string(state.w.size()));
  }
  if (!std::isfinite(d) || !x.allFinite() || !state.w.allFinite() || !state.w_prev.allFinite()) {
    throw ContractViolation("non-finite value in step inputs");
  }
}

Vector za_direction(const Vector& u) {
  return u.unaryExpr([](double v) { return sgn(v); });
}

Vector rza_direction(const Vector& u, double eps) {
  Vector g(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) g[i] = sgn(u[i]) / (1.0 + eps * std::abs(u[i]));
  return g;
}

Vector rl1_direction(const Vector& u, const Vector& u_prev, double eps) {
  Vector g(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) g[i] = sgn(u[i]) / (eps + std::abs(u_prev[i]));
  return g;
}

Vector lp_direction(const Vector& u, double p, double eps) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) sum += std::pow(std::abs(u[i]), p);
  Vector g = Vector::Zero(u.size());
  if (sum == 0.0) return g;
  const double norm_p = std::pow(sum, 1.0 / p);
  const double scale = std::pow(norm_p, 1.0 - p);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    g[i] = scale * sgn(u[i]) / (eps + std::pow(std::abs(u[i]), 1.0 - p));
  }
  return g;
}

StepOutput gradient_step(const WeightState& state, const Vector& x, double d, double mu) {
  check_step_inputs(state, x, d);
  StepOutput out;
  out.error = d - state.w.dot(x);
  out.next.w = state.w + (mu * out.error) * x;
  out.next.w_prev = state.w;
  return out;
}

}  // namespace detail

double predict_and_error(const WeightState& state, const Vector& x, double d) {
  if (x.size() != state.w.size()) {
    throw ContractViolation("input window length does not match filter length");
  }
  return d - state.w.dot(x);
}

StepOutput lms_step(const WeightState& state, const Vector& x, double d, const FilterParams& params) {
  require_variant(params, Variant::Standard);
  params.validate(state.size());
  return detail::gradient_step(state, x, d, params.mu);
}

StepOutput za_step(const WeightState& state, const Vector& x, double d, const FilterParams& params) {
  require_variant(params, Variant::ZA);
  params.validate(state.size());
  StepOutput out = detail::gradient_step(state, x, d, params.mu);
  apply_penalty(out, params.rho, detail::za_direction(state.w));
  return out;
}

StepOutput rza_step(const WeightState& state, const Vector& x, double d, const FilterParams& params) {
  require_variant(params, Variant::RZA);
  params.validate(state.size());
  StepOutput out = detail::gradient_step(state, x, d, params.mu);
  apply_penalty(out, params.rho, detail::rza_direction(state.w, params.eps));
  return out;
}

StepOutput rl1_step(const WeightState& state, const Vector& x, double d, const FilterParams& params) {
  require_variant(params, Variant::RL1);
  params.validate(state.size());
  StepOutput out = detail::gradient_step(state, x, d, params.mu);
  apply_penalty(out, params.rho, detail::rl1_direction(state.w, state.w_prev, params.eps));
  return out;
}

StepOutput lp_step(const WeightState& state, const Vector& x, double d, const FilterParams& params) {
  require_variant(params, Variant::LP);
  params.validate(state.size());
  StepOutput out = detail::gradient_step(state, x, d, params.mu);
  apply_penalty(out, params.rho, detail::lp_direction(state.w, params.p, params.eps));
  return out;
}

StepOutput oracle_step(const WeightState& state, const Vector& x, double d, const FilterParams& params) {
  require_variant(params, Variant::Oracle);
  params.validate(state.size());
  StepOutput out = detail::gradient_step(state, x, d, params.mu);
  std::vector<bool> keep(state.size(), false);
  for (std::size_t idx : params.support) keep[idx] = true;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (!keep[i]) out.next.w[static_cast<Eigen::Index>(i)] = 0.0;
  }
  return out;
}

StepOutput step(const WeightState& state, const Vector& x, double d, const FilterParams& params) {
  switch (params.variant) {
    case Variant::Standard: return lms_step(state, x, d, params);
    case Variant::ZA: return za_step(state, x, d, params);
    case Variant::RZA: return rza_step(state, x, d, params);
    case Variant::RL1: return rl1_step(state, x, d, params);
    case Variant::LP: return lp_step(state, x, d, params);
    case Variant::Oracle: return oracle_step(state, x, d, params);
  }
  throw ContractViolation("unknown filter variant");
}

}  // namespace sparselms
