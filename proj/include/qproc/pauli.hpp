#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace qproc {

// Coefficients whose magnitude drops below this after arithmetic are removed.
inline constexpr double kCoeffZeroTol = 1e-15;

enum class PauliLetter : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char letter_char(PauliLetter p);
PauliLetter letter_from_char(char c);

// n-qubit Pauli word, packed 2 bits per qubit. Qubit 0 is the first character
// of the text form, e.g. "XIZY" acts with X on qubit 0 and Y on qubit 3.
class PauliString {
 public:
  explicit PauliString(int n);
  static PauliString from_string(std::string_view letters);

  int n() const { return n_; }
  PauliLetter letter(int qubit) const {
    return static_cast<PauliLetter>((words_[qubit >> 5] >> ((qubit & 31) * 2)) & 3u);
  }
  void set(int qubit, PauliLetter p);

  int weight() const;
  std::vector<int> support() const;
  bool is_identity() const;

  std::string str() const;

  bool operator==(const PauliString& other) const {
    return n_ == other.n_ && words_ == other.words_;
  }
  size_t hash() const;

 private:
  int n_;
  std::vector<uint64_t> words_;
};

struct PauliStringHash {
  size_t operator()(const PauliString& p) const { return p.hash(); }
};

// Hermitian operator with real coefficients on the Pauli basis. Zero
// insertions are dropped; iteration order over the map is never semantic
// (all reductions use compensated sums).
class SparsePauliOp {
 public:
  using TermMap = std::unordered_map<PauliString, double, PauliStringHash>;

  explicit SparsePauliOp(int n) : n_(n) {}

  int n() const { return n_; }
  size_t size() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }

  void add(const PauliString& p, double coeff);
  double coeff(const PauliString& p) const;
  double identity_coeff() const;

  SparsePauliOp truncate(int k) const;
  SparsePauliOp without_identity() const;
  SparsePauliOp scaled(double factor) const;
  SparsePauliOp plus(const SparsePauliOp& other) const;

  double pauli_p_norm(double p) const;
  int max_weight() const;

  // Max over qubits of the number of non-identity terms acting on it
  // (per-Pauli-string degree).
  int degree() const;

  nlohmann::json to_json() const;
  static SparsePauliOp from_json(const nlohmann::json& j);

 private:
  int n_;
  TermMap terms_;
};

struct ExpansionProfile {
  int c_e = 1;
  int d_e = 1;
  double r = 1.0;  // 2*d_e / (d_e + 1)
};

// Exhaustive scan over all C(n, d_e) qubit subsets Y, counting terms P with
// Y within dom(P) or dom(P) within Y; c_e is the max count.
ExpansionProfile expansion_coefficient(const SparsePauliOp& op, int d_e);

// All Pauli strings with weight <= k, identity included. With `geometric`
// set, only strings whose support fits in a contiguous window of k qubits.
std::vector<PauliString> enumerate_paulis(int n, int k, bool geometric = false);

}  // namespace qproc
