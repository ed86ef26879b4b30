#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <vector>

#include "qproc/pauli.hpp"
#include "qproc/rng.hpp"
#include "qproc/states.hpp"

namespace qproc {

using Cplx = std::complex<double>;
using DenseVec = Eigen::VectorXcd;
using DenseMat = Eigen::MatrixXcd;

// Dense ops are capped here; beyond this the 2^n objects stop being the
// cheap ground truth they are meant to be.
inline constexpr int kMaxDenseQubits = 12;

void check_dense_n(int n);

DenseVec statevector(const ProductState& s);
DenseMat density_matrix(const ProductState& s);
DenseMat to_density(const DenseVec& psi);

DenseMat dense_matrix(const SparsePauliOp& op);
DenseMat dense_matrix(const PauliString& p);

// Tr(P rho) without materializing P.
Cplx pauli_trace(const PauliString& p, const DenseMat& rho);
// Tr(P |psi><psi|).
Cplx pauli_expect(const PauliString& p, const DenseVec& psi);

double expectation(const SparsePauliOp& op, const DenseMat& rho);
double expectation(const SparsePauliOp& op, const DenseVec& psi);

// CPTP map on <= kMaxDenseQubits qubits. Hamiltonian mode evolves by
// e^{-itH} through an eigendecomposition, so arbitrarily large t is exact.
class DenseChannel {
 public:
  enum class Kind { Identity, Unitary, Hamiltonian, Kraus };

  static DenseChannel identity(int n);
  static DenseChannel unitary(DenseMat u);
  static DenseChannel hamiltonian(SparsePauliOp h, double t);
  static DenseChannel kraus(int n, std::vector<DenseMat> ops);

  int n() const { return n_; }
  Kind kind() const { return kind_; }
  bool preserves_purity() const { return kind_ != Kind::Kraus; }

  DenseMat apply(const DenseMat& rho) const;
  DenseVec apply_pure(const DenseVec& psi) const;

 private:
  DenseChannel(int n, Kind k) : n_(n), kind_(k) {}
  const DenseMat& unitary_matrix() const;

  int n_;
  Kind kind_;
  DenseMat u_;
  std::vector<DenseMat> kraus_;
  SparsePauliOp ham_{1};
  double t_ = 0.0;
  mutable std::shared_ptr<DenseMat> cached_u_;
};

// Measure each qubit in the given basis (0 = X, 1 = Y, 2 = Z), sampling the
// exact joint Born distribution through sequential conditionals.
std::vector<StabLabel> born_sample(const DenseMat& rho, const std::vector<int>& bases, Rng& rng);
std::vector<StabLabel> born_sample(const DenseVec& psi, const std::vector<int>& bases, Rng& rng);

// gamma*(rho_A) = 2^-L sum over fully non-identity words of Tr(Q rho_A)^2.
double nonidentity_purity(const DenseMat& rho_a);

// Pauli expectations read from a dense state; the provider used when a
// learned model predicts on entangled inputs.
class DenseStateProvider final : public PauliExpectationProvider {
 public:
  using PauliExpectationProvider::expect;
  explicit DenseStateProvider(DenseVec psi);
  int n() const override { return n_; }
  double expect(const PauliString& p) const override {
    return pauli_expect(p, psi_).real();
  }

 private:
  int n_;
  DenseVec psi_;
};

}  // namespace qproc
