#pragma once

// Mean-square analysis of the reweighted-l1 penalized LMS: theoretical
// excess MSE, Monte-Carlo estimators for the penalty correction terms
// alpha' and beta', the beta' upper bound, the per-mode bound on the
// asymptotic mean coefficient error, and the Gaussian fourth-moment
// identity used in the derivation.

#include <cstddef>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "sparselms/filters.hpp"

namespace sparselms {

using Matrix = Eigen::MatrixXd;

class Rng;

/// Input covariance R = E[x x^T]; symmetric PSD, eigendecomposed once.
class Covariance {
 public:
  explicit Covariance(Matrix r);
  static Covariance identity(std::size_t n);

  const Matrix& matrix() const noexcept { return r_; }
  /// Ascending eigenvalues and matching orthonormal eigenvectors (columns).
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }
  const Matrix& eigenvectors() const noexcept { return eigenvectors_; }
  double lambda_max() const noexcept { return eigenvalues_[eigenvalues_.size() - 1]; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(r_.rows()); }

 private:
  Matrix r_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

/// Per-run state captured at a fixed iteration k.
struct StateSnapshot {
  std::size_t iteration = 0;
  Vector w;       // w_k
  Vector w_prev;  // w_{k-1}
  Vector truth;   // true channel w
};

/// eta = mu tr{R (I - mu R)^{-1}} = sum_i mu l_i / (1 - mu l_i).
double eta(double mu, const Covariance& r);

/// Standard-LMS excess MSE eta / (2 - eta) * sigma2_n.
double xi_standard(double mu, const Covariance& r, double sigma2_n);

/// (I - mu R)^{-1} via the eigendecomposition of R.
Matrix stability_inverse(double mu, const Covariance& r);

/// tr{R * mean(v v^T)} over the supplied coefficient error vectors.
double empirical_excess_mse(std::span<const Vector> errors, const Covariance& r);

/// One run's contribution: sum_i |w_k[i]| / (eps + |w_{k-1}[i]|) - |w[i]| / (eps + |w_{k-1}[i]|),
/// times 2.
double alpha_prime_term(const Vector& w_k, const Vector& w_prev, const Vector& truth, double eps);

/// u^T (I - mu R)^{-1} u with u = sgn(w_k) / (eps + |w_{k-1}|).
double beta_prime_term(const Vector& w_k, const Vector& w_prev, double eps,
                       const Matrix& stability_inv);

double estimate_alpha_prime(std::span<const StateSnapshot> snapshots, double eps);
double estimate_beta_prime(std::span<const StateSnapshot> snapshots, double eps, double mu,
                           const Covariance& r);

/// N / (eps^2 (1 - mu lambda_max)).
double beta_prime_bound(double eps, double mu, const Covariance& r);

struct Rl1Prediction {
  double xi_standard = 0.0;
  double xi = 0.0;
  /// alpha' / beta'; below it the penalty lowers the excess MSE. Empty
  /// when beta' == 0.
  std::optional<double> rho_star;
};

/// xi = eta/(2-eta) sigma2 + beta' rho (rho - alpha'/beta') / (mu (2-eta)),
/// evaluated in the expanded form (beta' rho^2 - alpha' rho) / (mu (2-eta))
/// so beta' == 0 needs no special case.
Rl1Prediction xi_rl1_predicted(double eta_value, double sigma2_n, double alpha_prime,
                               double beta_prime, double rho_r, double mu);

/// Everything the report's analysis block carries.
struct ExcessMsePrediction {
  double eta = 0.0;
  double xi_standard = 0.0;
  double alpha_prime = 0.0;
  double beta_prime = 0.0;
  double beta_bound = 0.0;
  double xi_rl1 = 0.0;
  std::optional<double> rho_star;
};

ExcessMsePrediction predict_excess_mse(double mu, const Covariance& r, double sigma2_n,
                                       double alpha_prime, double beta_prime, double rho_r,
                                       double eps_r);

/// Per-mode bound rho q_m / (mu lambda_i eps) on |E[Q^T v_k]| as k -> inf,
/// where q_m is the largest absolute row sum of Q^T.
Vector mean_bound(double rho_r, double eps_r, double mu, const Covariance& r);

/// |mean over runs of Q^T (w_k - w)| per mode.
Vector mean_mode_error(std::span<const StateSnapshot> snapshots, const Covariance& r);

/// Draws x ~ N(0, R) and compares the sample mean of x x^T V x x^T with
/// 2 R V R + R tr{R V}. Returns max |LHS - RHS| / max |RHS| (0 when both
/// sides vanish).
double check_fourth_moment_identity(const Covariance& r, const Matrix& v_cov,
                                    std::size_t samples, Rng& rng);

}  // namespace sparselms
