#include "sparselms/basis.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sparselms/errors.hpp"

namespace sparselms {

namespace {

void check_basis_dimension(const WeightState& state, const OrthonormalBasis& basis) {
  if (basis.size() != state.size()) {
    throw ContractViolation("basis dimension " + std::to_string(basis.size()) +
                            " does not match filter length " + std::to_string(state.size()));
  }
}

void check_variant(const FilterParams& params, Variant expected) {
  if (params.variant != expected) {
    throw ContractViolation("basis step for '" + std::string(variant_name(expected)) +
                            "' called with variant '" +
                            std::string(variant_name(params.variant)) + "'");
  }
}

// Shared tail of every basis step: base LMS update, then
// w_{k+1} -= rho * Psi^T g with g computed by `direction` in the Psi domain.
template <typename Direction>
StepOutput basis_step(const WeightState& state, const Vector& x, double d,
                      const FilterParams& params, const OrthonormalBasis& basis,
                      Direction&& direction) {
  params.validate(state.size());
  check_basis_dimension(state, basis);
  StepOutput out = detail::gradient_step(state, x, d, params.mu);
  if (params.rho != 0.0) {
    const Vector g = direction();
    out.next.w -= params.rho * basis.synthesize(g);
  }
  return out;
}

}  // namespace

OrthonormalBasis::OrthonormalBasis(Matrix psi, BasisKind kind, double tolerance)
    : psi_(std::move(psi)), kind_(kind) {
  if (psi_.rows() == 0 || psi_.rows() != psi_.cols()) {
    throw ContractViolation("basis matrix must be square and non-empty");
  }
  if (!psi_.allFinite()) throw ContractViolation("basis matrix has non-finite entries");
  const double err = orthonormality_error(psi_);
  if (!(err <= tolerance)) {
    std::ostringstream msg;
    msg << "basis matrix is not orthonormal: max |Psi Psi^T - I| = " << err
        << " exceeds tolerance " << tolerance;
    throw ContractViolation(msg.str());
  }
}

OrthonormalBasis OrthonormalBasis::identity(std::size_t n) {
  if (n == 0) throw ContractViolation("basis dimension must be at least 1");
  const auto m = static_cast<Eigen::Index>(n);
  return OrthonormalBasis(Matrix::Identity(m, m), BasisKind::Identity);
}

Vector OrthonormalBasis::analyze(const Vector& v) const { return psi_ * v; }

Vector OrthonormalBasis::synthesize(const Vector& u) const { return psi_.transpose() * u; }

double orthonormality_error(const Matrix& psi) {
  const Matrix gram = psi * psi.transpose();
  return (gram - Matrix::Identity(psi.rows(), psi.rows())).cwiseAbs().maxCoeff();
}

OrthonormalBasis dct_matrix(std::size_t n) {
  if (n == 0) throw ContractViolation("DCT size must be at least 1");
  const auto m = static_cast<Eigen::Index>(n);
  const double nd = static_cast<double>(n);
  const double scale = std::sqrt(2.0 / nd);
  Matrix psi(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double ck = (k == 0) ? 1.0 / std::numbers::sqrt2 : 1.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double angle = std::numbers::pi * static_cast<double>((2 * j + 1) * k) / (2.0 * nd);
      psi(k, j) = ck * scale * std::cos(angle);
    }
  }
  return OrthonormalBasis(std::move(psi), BasisKind::DCT);
}

OrthonormalBasis load_basis_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open basis file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& c : line) {
      if (c == ',' || c == ';') c = ' ';
    }
    std::istringstream fields(line);
    std::vector<double> row;
    std::string tok;
    while (fields >> tok) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw UsageError("basis file '" + path + "' line " + std::to_string(line_no) +
                         ": not a number: '" + tok + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const std::size_t n = rows.size();
  if (n == 0) throw UsageError("basis file '" + path + "' has no rows");
  Matrix psi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) {
      throw UsageError("basis file '" + path + "': row " + std::to_string(i + 1) + " has " +
                       std::to_string(rows[i].size()) + " entries, expected " + std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      psi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  try {
    return OrthonormalBasis(std::move(psi), BasisKind::Custom, 1e-8);
  } catch (const ContractViolation& e) {
    throw UsageError("basis file '" + path + "': " + e.what());
  }
}

StepOutput za_step_basis(const WeightState& state, const Vector& x, double d,
                         const FilterParams& params, const OrthonormalBasis& basis) {
  check_variant(params, Variant::ZA);
  return basis_step(state, x, d, params, basis,
                    [&] { return detail::za_direction(basis.analyze(state.w)); });
}

StepOutput rza_step_basis(const WeightState& state, const Vector& x, double d,
                          const FilterParams& params, const OrthonormalBasis& basis) {
  check_variant(params, Variant::RZA);
  return basis_step(state, x, d, params, basis, [&] {
    return detail::rza_direction(basis.analyze(state.w), params.eps);
  });
}

StepOutput rl1_step_basis(const WeightState& state, const Vector& x, double d,
                          const FilterParams& params, const OrthonormalBasis& basis) {
  check_variant(params, Variant::RL1);
  return basis_step(state, x, d, params, basis, [&] {
    return detail::rl1_direction(basis.analyze(state.w), basis.analyze(state.w_prev), params.eps);
  });
}

StepOutput lp_step_basis(const WeightState& state, const Vector& x, double d,
                         const FilterParams& params, const OrthonormalBasis& basis) {
  check_variant(params, Variant::LP);
  return basis_step(state, x, d, params, basis, [&] {
    return detail::lp_direction(basis.analyze(state.w), params.p, params.eps);
  });
}

StepOutput step(const WeightState& state, const Vector& x, double d, const FilterParams& params,
                const OrthonormalBasis& basis) {
  switch (params.variant) {
    case Variant::Standard:
      check_basis_dimension(state, basis);
      return lms_step(state, x, d, params);
    case Variant::ZA: return za_step_basis(state, x, d, params, basis);
    case Variant::RZA: return rza_step_basis(state, x, d, params, basis);
    case Variant::RL1: return rl1_step_basis(state, x, d, params, basis);
    case Variant::LP: return lp_step_basis(state, x, d, params, basis);
    case Variant::Oracle:
      if (basis.kind() != BasisKind::Identity) {
        throw ContractViolation("oracle filter is only defined with an identity basis");
      }
      check_basis_dimension(state, basis);
      return oracle_step(state, x, d, params);
  }
  throw ContractViolation("unknown filter variant");
}

}  // namespace sparselms
