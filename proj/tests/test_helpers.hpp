#pragma once

#include <cmath>
#include <vector>

#include "qproc/dense.hpp"
#include "qproc/pauli.hpp"
#include "qproc/rng.hpp"
#include "qproc/states.hpp"

namespace qproc::testing {

inline PauliString ps(const char* letters) { return PauliString::from_string(letters); }

inline SparsePauliOp op_of(int n,
                           std::initializer_list<std::pair<const char*, double>> terms) {
  SparsePauliOp op(n);
  for (const auto& [s, c] : terms) op.add(ps(s), c);
  return op;
}

// random operator with `terms` non-identity strings of weight <= k
inline SparsePauliOp random_klocal(int n, int k, int terms, Rng& rng) {
  // cap at the number of available strings
  double pool = 0.0;
  double binom = 1.0;
  for (int w = 1; w <= std::min(k, n); ++w) {
    binom *= static_cast<double>(n - w + 1) / w;
    pool += binom * std::pow(3.0, w);
  }
  terms = std::min(terms, static_cast<int>(std::min(pool, 1e6)));
  SparsePauliOp op(n);
  while (static_cast<int>(op.without_identity().size()) < terms) {
    PauliString p(n);
    const int w = 1 + static_cast<int>(rng.below(k));
    std::vector<int> sites;
    while (static_cast<int>(sites.size()) < w) {
      const int q = static_cast<int>(rng.below(n));
      bool seen = false;
      for (int s : sites) seen |= s == q;
      if (!seen) sites.push_back(q);
    }
    for (int q : sites)
      p.set(q, static_cast<PauliLetter>(1 + rng.below(3)));
    op.add(p, 2.0 * rng.next_double() - 1.0);
  }
  return op;
}

// homogeneous: every term has weight exactly k
inline SparsePauliOp random_homogeneous(int n, int k, int terms, Rng& rng) {
  SparsePauliOp op(n);
  while (static_cast<int>(op.size()) < terms) {
    PauliString p(n);
    std::vector<int> sites;
    while (static_cast<int>(sites.size()) < k) {
      const int q = static_cast<int>(rng.below(n));
      bool seen = false;
      for (int s : sites) seen |= s == q;
      if (!seen) sites.push_back(q);
    }
    for (int q : sites) p.set(q, static_cast<PauliLetter>(1 + rng.below(3)));
    op.add(p, 2.0 * rng.next_double() - 1.0);
  }
  return op;
}

inline std::vector<StabLabel> all_labels() {
  return {StabLabel::Zp, StabLabel::Zm, StabLabel::Xp,
          StabLabel::Xm, StabLabel::Yp, StabLabel::Ym};
}

// every stab_1 product state on n qubits (6^n of them)
inline std::vector<ProductState> all_stab_products(int n) {
  std::vector<std::vector<StabLabel>> current{{}};
  for (int q = 0; q < n; ++q) {
    std::vector<std::vector<StabLabel>> next;
    for (const auto& prefix : current) {
      for (StabLabel l : all_labels()) {
        auto row = prefix;
        row.push_back(l);
        next.push_back(std::move(row));
      }
    }
    current = std::move(next);
  }
  std::vector<ProductState> states;
  states.reserve(current.size());
  for (const auto& labels : current) states.push_back(ProductState::from_labels(labels));
  return states;
}

// Exact expectation of the shadow estimator under the identity channel:
// walk every basis assignment and every outcome with its Born probability.
inline double enumerated_shadow_estimate(const ProductState& input,
                                         const SparsePauliOp& o) {
  const int n = input.n();
  const DenseMat rho = density_matrix(input);
  double total = 0.0;
  std::vector<int> bases(n, 0);
  while (true) {
    for (int outcome = 0; outcome < (1 << n); ++outcome) {
      std::vector<StabLabel> labels(n);
      ProductState meas(n);
      for (int q = 0; q < n; ++q) {
        const int sign = (outcome >> q) & 1 ? -1 : 1;
        labels[q] = make_label(bases[q], sign);
        meas.qubits[q] = bloch_of(labels[q]);
      }
      const DenseMat proj = density_matrix(meas);
      const double p = (rho * proj).trace().real();
      if (p <= 0.0) continue;
      double est = 0.0;
      for (const auto& [pauli, c] : o.terms()) {
        double v = c;
        for (int q : pauli.support()) {
          if (label_axis(labels[q]) != static_cast<int>(pauli.letter(q)) - 1) {
            v = 0.0;
            break;
          }
          v *= 3.0 * label_sign(labels[q]);
        }
        est += v;
      }
      total += p * est / std::pow(3.0, n);
    }
    int q = 0;
    while (q < n && bases[q] == 2) bases[q++] = 0;
    if (q == n) break;
    bases[q]++;
  }
  return total;
}

}  // namespace qproc::testing
