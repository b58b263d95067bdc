#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "sparselms/analysis.hpp"
#include "sparselms/errors.hpp"
#include "sparselms/random.hpp"

using namespace sparselms;

namespace {

Matrix random_pd(std::size_t n, Rng& rng) {
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.gaussian();
  }
  return a * a.transpose() / static_cast<double>(n) + 0.1 * Matrix::Identity(n, n);
}

// eta through an explicit inverse, independent of the eigen path
double eta_direct(double mu, const Matrix& r) {
  const auto n = r.rows();
  const Matrix inv = (Matrix::Identity(n, n) - mu * r).lu().inverse();
  return mu * (r * inv).trace();
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST_CASE("eta examples") {
  CHECK(eta(0.05, Covariance::identity(16)) == doctest::Approx(0.8421053).epsilon(1e-7));
  CHECK(eta(0.05, Covariance::identity(16)) == doctest::Approx(16 * 0.05 / 0.95).epsilon(1e-15));
  CHECK(eta(1e-9, Covariance::identity(4)) < 1e-8);
  CHECK(eta(0.1, Covariance(Matrix::Constant(1, 1, 2.0))) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(eta(1.0, Covariance::identity(2)), StabilityError);
}

TEST_CASE("xi_standard examples") {
  CHECK(xi_standard(0.05, Covariance::identity(16), 0.01) ==
        doctest::Approx(7.2727e-3).epsilon(1e-4));
  CHECK(xi_standard(0.05, Covariance::identity(16), 0.0) == 0.0);
  CHECK(xi_standard(0.1, Covariance(Matrix::Constant(1, 1, 2.0)), 1.0) ==
        doctest::Approx(0.142857).epsilon(1e-5));
  // eta >= 2
  CHECK_THROWS_AS(xi_standard(0.12, Covariance::identity(16), 0.01), StabilityError);
}

TEST_CASE("eigen path agrees with a direct inverse") {
  Rng rng(21);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + static_cast<std::size_t>(t % 7);
    const Covariance r(random_pd(n, rng));
    const double mu = 0.4 / r.lambda_max();
    const double a = eta(mu, r);
    const double b = eta_direct(mu, r.matrix());
    CHECK(std::fabs(a - b) <= 1e-10 * std::fabs(b));
    const Matrix inv = (Matrix::Identity(n, n) - mu * r.matrix()).inverse();
    CHECK((stability_inverse(mu, r) - inv).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("covariance validation") {
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = 0.5;
  CHECK_THROWS_AS(Covariance{m}, ContractViolation);
  Matrix neg = -Matrix::Identity(2, 2);
  CHECK_THROWS_AS(Covariance{neg}, ContractViolation);
}

TEST_CASE("empirical_excess_mse") {
  const auto r = Covariance::identity(2);
  std::vector<Vector> zeros(3, Vector::Zero(2));
  CHECK(empirical_excess_mse(zeros, r) == 0.0);
  std::vector<Vector> one{vec({1, 0})};
  CHECK(empirical_excess_mse(one, r) == 1.0);
  Matrix rm(2, 2);
  rm << 2, 1, 1, 2;
  std::vector<Vector> pair{vec({1, 1}), vec({1, -1})};
  // mean of v^T R v: (6 + 2) / 2
  CHECK(empirical_excess_mse(pair, Covariance(rm)) == doctest::Approx(4.0));
}

TEST_CASE("alpha' and beta' trivial cases") {
  std::vector<StateSnapshot> same;
  const Vector w = vec({1, 0, -1, 0});
  for (int i = 0; i < 4; ++i) same.push_back({250, w, w, w});
  CHECK(estimate_alpha_prime(same, 0.05) == 0.0);

  std::vector<StateSnapshot> zero(3, StateSnapshot{250, Vector::Zero(4), vec({1, 1, 1, 1}), w});
  CHECK(estimate_beta_prime(zero, 0.05, 0.05, Covariance::identity(4)) == 0.0);
}

TEST_CASE("alpha' and beta' single-run terms by hand") {
  const Vector wk = vec({0.9, -0.1});
  const Vector wp = vec({0.8, 0.0});
  const Vector truth = vec({1.0, 0.0});
  const double eps = 0.05;
  const double expected = 2.0 * ((0.9 / 0.85 + 0.1 / 0.05) - (1.0 / 0.85));
  CHECK(alpha_prime_term(wk, wp, truth, eps) == doctest::Approx(expected).epsilon(1e-14));

  const Matrix inv = stability_inverse(0.05, Covariance::identity(2));
  const double beta = (1.0 / (0.85 * 0.85) + 1.0 / (0.05 * 0.05)) / 0.95;
  CHECK(beta_prime_term(wk, wp, eps, inv) == doctest::Approx(beta).epsilon(1e-14));
}

TEST_CASE("beta' bound") {
  CHECK(beta_prime_bound(0.05, 0.05, Covariance::identity(16)) ==
        doctest::Approx(6736.8).epsilon(1e-5));
  // the bound is attained when every tap of w_k is nonzero and w_{k-1} = 0
  std::vector<StateSnapshot> worst(2, StateSnapshot{1, Vector::Constant(16, 0.3),
                                                    Vector::Zero(16), Vector::Zero(16)});
  const auto r = Covariance::identity(16);
  CHECK(estimate_beta_prime(worst, 0.05, 0.05, r) ==
        doctest::Approx(beta_prime_bound(0.05, 0.05, r)).epsilon(1e-12));
}

TEST_CASE("beta' is non-negative for random states") {
  Rng rng(6);
  Matrix rm = random_pd(5, rng);
  const Covariance r(rm);
  const double mu = 0.5 / r.lambda_max();
  std::vector<StateSnapshot> snaps;
  for (int i = 0; i < 50; ++i) {
    Vector a(5), b(5);
    for (int j = 0; j < 5; ++j) {
      a[j] = rng.gaussian();
      b[j] = rng.gaussian();
    }
    snaps.push_back({1, a, b, Vector::Zero(5)});
  }
  const double beta = estimate_beta_prime(snaps, 0.05, mu, r);
  CHECK(beta >= 0.0);
  CHECK(beta <= beta_prime_bound(0.05, mu, r));
}

TEST_CASE("xi_rl1_predicted") {
  const double e = eta(0.05, Covariance::identity(16));
  const double xs = e / (2 - e) * 0.01;
  const auto zero = xi_rl1_predicted(e, 0.01, 3.0, 5000.0, 0.0, 0.05);
  CHECK(zero.xi == zero.xi_standard);
  CHECK(zero.xi_standard == doctest::Approx(xs).epsilon(1e-15));

  const auto gain = xi_rl1_predicted(e, 0.01, 3.0, 5000.0, 3e-4, 0.05);
  REQUIRE(gain.rho_star.has_value());
  CHECK(*gain.rho_star == doctest::Approx(3.0 / 5000.0));
  CHECK(gain.xi < gain.xi_standard);

  const auto loss = xi_rl1_predicted(e, 0.01, -2.0, 1000.0, 1e-4, 0.05);
  CHECK(loss.xi > loss.xi_standard);

  CHECK_FALSE(xi_rl1_predicted(e, 0.01, 1.0, 0.0, 1e-4, 0.05).rho_star.has_value());
}

TEST_CASE("predict_excess_mse bundles the pieces") {
  const auto r = Covariance::identity(16);
  const auto p = predict_excess_mse(0.05, r, 0.01, 3.0, 5000.0, 5e-4, 0.05);
  CHECK(p.eta == eta(0.05, r));
  CHECK(p.xi_standard == xi_standard(0.05, r, 0.01));
  CHECK(p.beta_bound == beta_prime_bound(0.05, 0.05, r));
  CHECK(p.xi_rl1 == xi_rl1_predicted(p.eta, 0.01, 3.0, 5000.0, 5e-4, 0.05).xi);
}

TEST_CASE("mean_bound") {
  const auto r = Covariance::identity(16);
  const Vector b = mean_bound(5e-4, 0.05, 0.05, r);
  for (Eigen::Index i = 0; i < b.size(); ++i) CHECK(b[i] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(mean_bound(0.0, 0.05, 0.05, r).cwiseAbs().maxCoeff() == 0.0);
  const Vector half = mean_bound(5e-4, 0.1, 0.05, r);
  for (Eigen::Index i = 0; i < b.size(); ++i) CHECK(half[i] == doctest::Approx(b[i] / 2));

  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 1.0;
  diag(1, 1) = 2.0;
  const Vector d = mean_bound(1e-3, 0.05, 0.05, Covariance(diag));
  CHECK(d[0] == doctest::Approx(1e-3 / (0.05 * 1.0 * 0.05)));
  CHECK(d[1] == doctest::Approx(1e-3 / (0.05 * 2.0 * 0.05)));
}

TEST_CASE("mean_mode_error") {
  const Vector truth = vec({1, 0});
  std::vector<StateSnapshot> snaps{{1, vec({1.2, 0.1}), truth, truth},
                                   {1, vec({0.9, -0.3}), truth, truth}};
  const Vector m = mean_mode_error(snaps, Covariance::identity(2));
  CHECK(m[0] + m[1] == doctest::Approx(0.05 + 0.1));
}

TEST_CASE("fourth-moment identity") {
  Rng rng(12);
  CHECK(check_fourth_moment_identity(Covariance::identity(3), Matrix::Zero(3, 3), 1000, rng) ==
        0.0);
  CHECK(check_fourth_moment_identity(Covariance::identity(1), Matrix::Identity(1, 1), 200000,
                                     rng) < 0.03);
  CHECK(check_fourth_moment_identity(Covariance::identity(4), Matrix::Identity(4, 4), 200000,
                                     rng) < 0.03);
  Matrix rm(2, 2);
  rm << 1.0, 0.3, 0.3, 0.5;
  Matrix v(2, 2);
  v << 2.0, -0.4, -0.4, 1.0;
  CHECK(check_fourth_moment_identity(Covariance(rm), v, 400000, rng) < 0.03);
}
