#pragma once

#include "qproc/pauli.hpp"

namespace qproc {

// Closed-form constants from the optimization guarantee. All lie in (0, 1]
// for integer parameters >= 1.
//
//   C(c_e, d_e, k) = sqrt(2 k!) / (c_e^{1/(2 d_e)} k^{k+1.5+1/r} (sqrt6 + 2 sqrt3)^k)
//   C(k)          = C(4^k, k, k)
//   C(k, d)       = sqrt(2 k!) / (sqrt(d) k^{k+2.5} (2 sqrt6 + 4 sqrt3)^k)
double norm_constant_expansion(int c_e, int d_e, int k);
double norm_constant_klocal(int k);
double norm_constant_bounded(int k, int d);

// Largest |eigenvalue| of the dense matrix; n <= 12.
double spectral_norm(const SparsePauliOp& op);

enum class NormKind { GeneralKLocal, BoundedDegree };

struct InequalityReport {
  int k = 0;
  int d = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// Checks (1/3) C(k) ||H||_{Pauli, 2k/(k+1)} <= ||H|| (general) or
// (1/3) C(k, d) ||H||_{Pauli, 1} <= ||H|| (bounded degree), with k and d
// inferred from the operator by weight / per-string degree scan.
InequalityReport verify_inequality(const SparsePauliOp& op, NormKind kind);

}  // namespace qproc
