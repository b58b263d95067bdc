#include "sparselms/analysis.hpp"

#include <cmath>
#include <sstream>

#include "sparselms/errors.hpp"
#include "sparselms/random.hpp"

namespace sparselms {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kEigenFloor = -1e-12;

void require_stable(double mu, const Covariance& r) {
  if (!std::isfinite(mu) || mu < 0.0) throw ContractViolation("step size must be finite and >= 0");
  if (mu * r.lambda_max() >= 1.0) {
    std::ostringstream msg;
    msg << "mu * lambda_max = " << mu * r.lambda_max() << " >= 1";
    throw StabilityError(msg.str());
  }
}

void check_snapshots(std::span<const StateSnapshot> snapshots, std::size_t n) {
  for (const auto& s : snapshots) {
    if (static_cast<std::size_t>(s.w.size()) != n || s.w_prev.size() != s.w.size()) {
      throw ContractViolation("snapshot length does not match covariance size");
    }
  }
}

}  // namespace

Covariance::Covariance(Matrix r) : r_(std::move(r)) {
  if (r_.rows() == 0 || r_.rows() != r_.cols()) {
    throw ContractViolation("covariance must be square and non-empty");
  }
  if (!r_.allFinite()) throw ContractViolation("covariance has non-finite entries");
  if ((r_ - r_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw ContractViolation("covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(r_);
  if (solver.info() != Eigen::Success) throw ContractViolation("eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  if (eigenvalues_.minCoeff() < kEigenFloor) {
    throw ContractViolation("covariance is not positive semi-definite");
  }
}

Covariance Covariance::identity(std::size_t n) {
  const auto m = static_cast<Eigen::Index>(n);
  return Covariance(Matrix::Identity(m, m));
}

double eta(double mu, const Covariance& r) {
  require_stable(mu, r);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < r.eigenvalues().size(); ++i) {
    const double ml = mu * r.eigenvalues()[i];
    sum += ml / (1.0 - ml);
  }
  return sum;
}

double xi_standard(double mu, const Covariance& r, double sigma2_n) {
  const double e = eta(mu, r);
  if (e >= 2.0) throw StabilityError("eta >= 2: excess MSE formula undefined");
  return e / (2.0 - e) * sigma2_n;
}

Matrix stability_inverse(double mu, const Covariance& r) {
  require_stable(mu, r);
  const Matrix& q = r.eigenvectors();
  Vector inv_gamma(r.eigenvalues().size());
  for (Eigen::Index i = 0; i < inv_gamma.size(); ++i) {
    inv_gamma[i] = 1.0 / (1.0 - mu * r.eigenvalues()[i]);
  }
  return q * inv_gamma.asDiagonal() * q.transpose();
}

double empirical_excess_mse(std::span<const Vector> errors, const Covariance& r) {
  if (errors.empty()) throw ContractViolation("empirical excess MSE needs at least one sample");
  // tr{R mean(v v^T)} = mean(v^T R v)
  double sum = 0.0;
  for (const auto& v : errors) {
    if (static_cast<std::size_t>(v.size()) != r.size()) {
      throw ContractViolation("error vector length does not match covariance size");
    }
    sum += v.dot(r.matrix() * v);
  }
  return sum / static_cast<double>(errors.size());
}

double alpha_prime_term(const Vector& w_k, const Vector& w_prev, const Vector& truth, double eps) {
  double estimate = 0.0;
  double actual = 0.0;
  for (Eigen::Index i = 0; i < w_k.size(); ++i) {
    const double denom = eps + std::abs(w_prev[i]);
    estimate += std::abs(w_k[i]) / denom;
    actual += std::abs(truth[i]) / denom;
  }
  return 2.0 * (estimate - actual);
}

double beta_prime_term(const Vector& w_k, const Vector& w_prev, double eps,
                       const Matrix& stability_inv) {
  const Vector u = detail::rl1_direction(w_k, w_prev, eps);
  return u.dot(stability_inv * u);
}

double estimate_alpha_prime(std::span<const StateSnapshot> snapshots, double eps) {
  if (snapshots.empty()) throw ContractViolation("alpha' estimate needs at least one snapshot");
  double sum = 0.0;
  for (const auto& s : snapshots) {
    if (s.truth.size() != s.w.size() || s.w_prev.size() != s.w.size()) {
      throw ContractViolation("snapshot vectors have inconsistent lengths");
    }
    sum += alpha_prime_term(s.w, s.w_prev, s.truth, eps);
  }
  return sum / static_cast<double>(snapshots.size());
}

double estimate_beta_prime(std::span<const StateSnapshot> snapshots, double eps, double mu,
                           const Covariance& r) {
  if (snapshots.empty()) throw ContractViolation("beta' estimate needs at least one snapshot");
  check_snapshots(snapshots, r.size());
  const Matrix inv = stability_inverse(mu, r);
  double sum = 0.0;
  for (const auto& s : snapshots) sum += beta_prime_term(s.w, s.w_prev, eps, inv);
  return sum / static_cast<double>(snapshots.size());
}

double beta_prime_bound(double eps, double mu, const Covariance& r) {
  require_stable(mu, r);
  return static_cast<double>(r.size()) / (eps * eps * (1.0 - mu * r.lambda_max()));
}

Rl1Prediction xi_rl1_predicted(double eta_value, double sigma2_n, double alpha_prime,
                               double beta_prime, double rho_r, double mu) {
  if (eta_value >= 2.0) throw StabilityError("eta >= 2: excess MSE formula undefined");
  if (beta_prime < 0.0) throw ContractViolation("beta' must be non-negative");
  Rl1Prediction out;
  out.xi_standard = eta_value / (2.0 - eta_value) * sigma2_n;
  const double correction =
      (beta_prime * rho_r * rho_r - alpha_prime * rho_r) / (mu * (2.0 - eta_value));
  out.xi = out.xi_standard + correction;
  if (beta_prime > 0.0) out.rho_star = alpha_prime / beta_prime;
  return out;
}

ExcessMsePrediction predict_excess_mse(double mu, const Covariance& r, double sigma2_n,
                                       double alpha_prime, double beta_prime, double rho_r,
                                       double eps_r) {
  ExcessMsePrediction out;
  out.eta = eta(mu, r);
  out.alpha_prime = alpha_prime;
  out.beta_prime = beta_prime;
  out.beta_bound = beta_prime_bound(eps_r, mu, r);
  const auto pred = xi_rl1_predicted(out.eta, sigma2_n, alpha_prime, beta_prime, rho_r, mu);
  out.xi_standard = pred.xi_standard;
  out.xi_rl1 = pred.xi;
  out.rho_star = pred.rho_star;
  return out;
}

Vector mean_bound(double rho_r, double eps_r, double mu, const Covariance& r) {
  require_stable(mu, r);
  if (!(eps_r > 0.0)) throw ContractViolation("eps_r must be > 0");
  if (r.eigenvalues().minCoeff() <= 0.0) {
    throw StabilityError("degenerate covariance: mean bound needs all eigenvalues > 0");
  }
  if (!(mu > 0.0)) throw ContractViolation("mean bound needs mu > 0");
  const Matrix qt = r.eigenvectors().transpose();
  const double q_max = qt.cwiseAbs().rowwise().sum().maxCoeff();
  Vector bound(r.eigenvalues().size());
  for (Eigen::Index i = 0; i < bound.size(); ++i) {
    bound[i] = rho_r * q_max / (mu * r.eigenvalues()[i] * eps_r);
  }
  return bound;
}

Vector mean_mode_error(std::span<const StateSnapshot> snapshots, const Covariance& r) {
  if (snapshots.empty()) throw ContractViolation("mean mode error needs at least one snapshot");
  Vector mean_v = Vector::Zero(static_cast<Eigen::Index>(r.size()));
  for (const auto& s : snapshots) {
    if (static_cast<std::size_t>(s.w.size()) != r.size() || s.truth.size() != s.w.size()) {
      throw ContractViolation("snapshot length does not match covariance size");
    }
    mean_v += s.w - s.truth;
  }
  mean_v /= static_cast<double>(snapshots.size());
  return (r.eigenvectors().transpose() * mean_v).cwiseAbs();
}

double check_fourth_moment_identity(const Covariance& r, const Matrix& v_cov,
                                    std::size_t samples, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(r.size());
  if (v_cov.rows() != n || v_cov.cols() != n) {
    throw ContractViolation("V must match the covariance dimension");
  }
  if (samples == 0) throw ContractViolation("fourth-moment check needs samples > 0");
  const Matrix& rm = r.matrix();
  const Matrix rhs = 2.0 * rm * v_cov * rm + rm * (rm * v_cov).trace();

  // x = Q Lambda^{1/2} z, z ~ N(0, I)
  const Vector root = r.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix mix = r.eigenvectors() * root.asDiagonal();
  Matrix lhs = Matrix::Zero(n, n);
  Vector z(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.gaussian();
    const Vector x = mix * z;
    const double quad = x.dot(v_cov * x);
    lhs.noalias() += quad * (x * x.transpose());
  }
  lhs /= static_cast<double>(samples);

  const double scale = rhs.cwiseAbs().maxCoeff();
  const double diff = (lhs - rhs).cwiseAbs().maxCoeff();
  if (scale == 0.0) return diff == 0.0 ? 0.0 : diff;
  return diff / scale;
}

}  // namespace sparselms
