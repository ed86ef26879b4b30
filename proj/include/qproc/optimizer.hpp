#pragma once

#include <array>
#include <vector>

#include "qproc/pauli.hpp"
#include "qproc/rng.hpp"
#include "qproc/states.hpp"

namespace qproc {

// H = alpha_I I + sum_kappa H_kappa split by Pauli weight; kappa_star picks
// the slice maximizing sum |alpha_P|^r (ties toward the smallest kappa).
struct SliceDecomposition {
  double alpha_identity = 0.0;
  int k = 0;                          // max weight
  int kappa_star = 0;                 // 1-based selected slice
  double r = 1.0;
  std::vector<SparsePauliOp> slices;  // slices[kappa - 1]

  const SparsePauliOp& selected() const { return slices[kappa_star - 1]; }
};

SliceDecomposition select_slice(const SparsePauliOp& h, double r);

// beta table indexed [qubit][axis]; axis 0 = X, 1 = Y, 2 = Z.
using BetaTable = std::vector<std::array<double, 3>>;

// Exact signed average over all 2^{kappa*-1} sign patterns of the replica
// mixtures. For kappa* = 1 the replica product is empty and beta reduces to
// the bare single-site coefficients.
BetaTable compute_beta(const SliceDecomposition& slices,
                       const std::vector<ProductState>& replicas);

Bloch local_optimize(const std::array<double, 3>& beta_row);

struct PolarizationDraw {
  std::vector<ProductState> replicas;  // kappa* states, last one optimized
  std::vector<int> sigma;              // kappa* signs in {-1, +1}
};

// Coefficients a_0..a_k of f(t) = Tr(H rho(t)), a_kappa = Tr(H_kappa rho(1)).
std::vector<double> family_polynomial(const SliceDecomposition& slices,
                                      const PolarizationDraw& draw);

// argmax over a 10001-point uniform grid on [-1, 1] of |f(t) - a_0|,
// ties toward the smallest |t|.
double sweep_t(const std::vector<double>& coeffs);

struct OptResult {
  ProductState state;
  double value = 0.0;
  bool maximizing = false;
  double t_star = 0.0;
  double margin = 0.0;  // value - alpha_I
};

OptResult optimize(const SparsePauliOp& h, const ExpansionProfile& profile, Rng& rng);

// Polarization lift pol(O) of a homogeneous k-local observable, realized on
// n*k qubits indexed (replica s, site i) -> s * n + i.
SparsePauliOp polarization(const SparsePauliOp& homogeneous_op, int k);

}  // namespace qproc
