#pragma once

// Orthonormal sparsity bases and the basis-generalized penalized updates.
// Vectors are columns throughout: the penalty direction g is formed in the
// Psi domain and mapped back as Psi^T g.

#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "sparselms/filters.hpp"

namespace sparselms {

using Matrix = Eigen::MatrixXd;

enum class BasisKind { Identity, DCT, Custom };

class OrthonormalBasis {
 public:
  /// Validates Psi Psi^T = I within `tolerance` per entry.
  explicit OrthonormalBasis(Matrix psi, BasisKind kind = BasisKind::Custom,
                            double tolerance = 1e-12);

  static OrthonormalBasis identity(std::size_t n);

  const Matrix& matrix() const noexcept { return psi_; }
  BasisKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(psi_.rows()); }

  /// Psi v: coordinates in the sparsity domain.
  Vector analyze(const Vector& v) const;
  /// Psi^T u: back to the time domain.
  Vector synthesize(const Vector& u) const;

 private:
  Matrix psi_;
  BasisKind kind_;
};

/// Orthonormal DCT-II: Psi[k][m] = c_k sqrt(2/n) cos(pi (2m+1) k / (2n)),
/// c_0 = 1/sqrt(2), c_k = 1 otherwise.
OrthonormalBasis dct_matrix(std::size_t n);

/// Reads a square matrix from a text file (comma and/or whitespace
/// separated, '#' comments) and checks orthonormality within 1e-8.
OrthonormalBasis load_basis_csv(const std::string& path);

/// max |(Psi Psi^T - I)_ij|
double orthonormality_error(const Matrix& psi);

StepOutput za_step_basis(const WeightState& state, const Vector& x, double d,
                         const FilterParams& params, const OrthonormalBasis& basis);
StepOutput rza_step_basis(const WeightState& state, const Vector& x, double d,
                          const FilterParams& params, const OrthonormalBasis& basis);
StepOutput rl1_step_basis(const WeightState& state, const Vector& x, double d,
                          const FilterParams& params, const OrthonormalBasis& basis);
StepOutput lp_step_basis(const WeightState& state, const Vector& x, double d,
                         const FilterParams& params, const OrthonormalBasis& basis);

/// Dispatches on params.variant. Standard ignores the basis; Oracle is only
/// accepted with an identity basis.
StepOutput step(const WeightState& state, const Vector& x, double d, const FilterParams& params,
                const OrthonormalBasis& basis);

}  // namespace sparselms
