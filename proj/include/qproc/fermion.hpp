#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "json.hpp"
#include "qproc/pauli.hpp"
#include "qproc/states.hpp"

namespace qproc {

enum class ChainKind { XY, Ising };

// Open-boundary spin chain:
//   XY:    H = 1/4 sum_i (X_i X_{i+1} + Y_i Y_{i+1}) + 1/2 sum_i h_i Z_i
//   Ising: H = 1/2 sum_i X_i X_{i+1}                 + 1/2 sum_i h_i Z_i
struct ChainModel {
  ChainKind kind = ChainKind::XY;
  int n = 1;
  std::vector<double> fields;

  static ChainModel homogeneous(ChainKind kind, int n, double h = 0.5);
  static ChainModel disordered(ChainKind kind, int n, double lo, double hi, uint64_t seed);

  // Full spin Hamiltonian; intended for dense cross-checks at small n.
  SparsePauliOp hamiltonian() const;

  nlohmann::json to_json() const;
  static ChainModel from_json(const nlohmann::json& j);
};

// Quadratic Majorana generator A (2n x 2n, antisymmetric) with
// H = (i/4) sum_{ab} A_ab gamma_a gamma_b under the convention
//   gamma_{2i}   = (prod_{j<i} Z_j) X_i,
//   gamma_{2i+1} = (prod_{j<i} Z_j) Y_i,
//   Z_i = -i gamma_{2i} gamma_{2i+1}          (sites 0-based).
Eigen::MatrixXd build_quadratic(const ChainModel& model);

// Heisenberg rotation gamma_a(t) = sum_b R(t)_ab gamma_b with R(t) = exp(A t),
// computed from the eigendecomposition of the Hermitian matrix iA so that
// t = 1e6 carries no stepping error. The small single-particle eigenproblem
// is solved in extended precision; phases like 1e6 * lambda would otherwise
// eat eight digits.
class MajoranaRotation {
 public:
  explicit MajoranaRotation(const ChainModel& model);
  Eigen::MatrixXd at(double t) const;
  int n() const { return n_; }

 private:
  int n_;
  Eigen::Matrix<long double, Eigen::Dynamic, 1> evals_;
  Eigen::MatrixXcd evecs_;
};

// Z_i(t) = e^{itH} Z_i e^{-itH} expanded over O(n^2) Pauli strings.
SparsePauliOp heisenberg_z(const Eigen::MatrixXd& rotation, int site);
SparsePauliOp heisenberg_z(const ChainModel& model, int site, double t);

double expectation_z_t(const ChainModel& model, int site, double t, const ProductState& s);

// <Z_i(t)> for every site on a product state, via the Majorana two-point
// table; equals the string expansion but costs O(n^3) for all sites at once.
std::vector<double> expectation_z_all(const Eigen::MatrixXd& rotation, const ProductState& s);

}  // namespace qproc
