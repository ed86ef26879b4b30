#pragma once

#include <array>
#include <string>
#include <vector>

#include "qproc/pauli.hpp"
#include "qproc/rng.hpp"

namespace qproc {

using Bloch = std::array<double, 3>;  // (X, Y, Z) components

// The six single-qubit stabilizer states, i.e. Pauli eigenstates.
enum class StabLabel : uint8_t { Zp = 0, Zm, Xp, Xm, Yp, Ym };

inline constexpr int kNumStabLabels = 6;

Bloch bloch_of(StabLabel s);
std::string label_str(StabLabel s);
StabLabel label_from_str(const std::string& s);

// Which axis a label lies on: 0 = X, 1 = Y, 2 = Z; sign is the eigenvalue.
int label_axis(StabLabel s);
int label_sign(StabLabel s);
StabLabel make_label(int axis, int sign);

// Product of n single-qubit pure states, stored as unit Bloch vectors.
struct ProductState {
  std::vector<Bloch> qubits;

  ProductState() = default;
  explicit ProductState(int n) : qubits(n, Bloch{0.0, 0.0, 1.0}) {}

  int n() const { return static_cast<int>(qubits.size()); }

  static ProductState from_labels(const std::vector<StabLabel>& labels);

  // Tr(P |s><s|) = product of Bloch components over dom(P).
  double expect(const PauliString& p) const;
  double expect(const SparsePauliOp& op) const;
};

std::vector<StabLabel> sample_stab_labels(int n, Rng& rng);
ProductState sample_stab_product(int n, Rng& rng);

// Uniform on the unit 2-sphere.
Bloch sample_haar_qubit(Rng& rng);
ProductState sample_haar_product(int n, Rng& rng);

// Expectation source for states that need not be product states.
class PauliExpectationProvider {
 public:
  virtual ~PauliExpectationProvider() = default;
  virtual int n() const = 0;
  virtual double expect(const PauliString& p) const = 0;

  double expect(const SparsePauliOp& op) const;
};

class ProductStateProvider final : public PauliExpectationProvider {
 public:
  using PauliExpectationProvider::expect;
  explicit ProductStateProvider(ProductState s) : state_(std::move(s)) {}
  int n() const override { return state_.n(); }
  double expect(const PauliString& p) const override { return state_.expect(p); }

 private:
  ProductState state_;
};

// Left block of m qubits in (|0...0> + sign*|1...1>)/sqrt(2), right block a
// product state. Pauli expectations follow the parity structure of the GHZ
// block: diagonal words need an even number of Z's, off-diagonal words must
// cover the whole block with X/Y letters and an even number of Y's.
class GhzProductProvider final : public PauliExpectationProvider {
 public:
  using PauliExpectationProvider::expect;
  GhzProductProvider(int m, int sign, ProductState right);
  int n() const override { return m_ + right_.n(); }
  double expect(const PauliString& p) const override;

 private:
  int m_;
  int sign_;
  ProductState right_;
};

}  // namespace qproc
