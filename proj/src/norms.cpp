#include "qproc/norms.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "qproc/dense.hpp"

namespace qproc {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

void check_params(int k, int extra) {
  if (k < 1 || extra < 1) throw std::invalid_argument("norm constant needs params >= 1");
}

}  // namespace

double norm_constant_expansion(int c_e, int d_e, int k) {
  check_params(k, c_e);
  if (d_e < 1) throw std::invalid_argument("norm constant needs params >= 1");
  const double r = 2.0 * d_e / (d_e + 1.0);
  const double base = std::sqrt(6.0) + 2.0 * std::sqrt(3.0);
  return std::sqrt(2.0 * factorial(k)) /
         (std::pow(c_e, 1.0 / (2.0 * d_e)) * std::pow(k, k + 1.5 + 1.0 / r) *
          std::pow(base, k));
}

double norm_constant_klocal(int k) {
  check_params(k, 1);
  const double r = 2.0 * k / (k + 1.0);
  const double base = std::sqrt(6.0) + 2.0 * std::sqrt(3.0);
  return std::sqrt(2.0 * factorial(k)) /
         (2.0 * std::pow(k, k + 1.5 + 1.0 / r) * std::pow(base, k));
}

double norm_constant_bounded(int k, int d) {
  check_params(k, d);
  const double base = 2.0 * std::sqrt(6.0) + 4.0 * std::sqrt(3.0);
  return std::sqrt(2.0 * factorial(k)) /
         (std::sqrt(static_cast<double>(d)) * std::pow(k, k + 2.5) * std::pow(base, k));
}

double spectral_norm(const SparsePauliOp& op) {
  check_dense_n(op.n());
  const DenseMat m = dense_matrix(op);
  Eigen::SelfAdjointEigenSolver<DenseMat> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

InequalityReport verify_inequality(const SparsePauliOp& op, NormKind kind) {
  const SparsePauliOp body = op.without_identity();
  InequalityReport report;
  report.k = std::max(1, body.max_weight());
  report.d = std::max(1, body.degree());
  report.rhs = spectral_norm(op);
  if (kind == NormKind::GeneralKLocal) {
    const double p = 2.0 * report.k / (report.k + 1.0);
    report.lhs = norm_constant_klocal(report.k) / 3.0 * op.pauli_p_norm(p);
  } else {
    report.lhs = norm_constant_bounded(report.k, report.d) / 3.0 * op.pauli_p_norm(1.0);
  }
  report.holds = report.lhs <= report.rhs + 1e-12;
  return report;
}

}  // namespace qproc
