#include "qproc/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace qproc {

char letter_char(PauliLetter p) {
  switch (p) {
    case PauliLetter::I: return 'I';
    case PauliLetter::X: return 'X';
    case PauliLetter::Y: return 'Y';
    case PauliLetter::Z: return 'Z';
  }
  return '?';
}

PauliLetter letter_from_char(char c) {
  switch (c) {
    case 'I': return PauliLetter::I;
    case 'X': return PauliLetter::X;
    case 'Y': return PauliLetter::Y;
    case 'Z': return PauliLetter::Z;
    default: throw std::invalid_argument("invalid Pauli letter");
  }
}

PauliString::PauliString(int n) : n_(n), words_((n + 31) / 32, 0) {
  if (n < 1) throw std::invalid_argument("PauliString needs n >= 1");
}

PauliString PauliString::from_string(std::string_view letters) {
  PauliString p(static_cast<int>(letters.size()));
  for (size_t i = 0; i < letters.size(); ++i)
    p.set(static_cast<int>(i), letter_from_char(letters[i]));
  return p;
}

void PauliString::set(int qubit, PauliLetter p) {
  uint64_t& w = words_[qubit >> 5];
  const int shift = (qubit & 31) * 2;
  w = (w & ~(uint64_t{3} << shift)) | (static_cast<uint64_t>(p) << shift);
}

int PauliString::weight() const {
  int count = 0;
  for (uint64_t w : words_) {
    // a qubit is non-identity iff either of its two bits is set
    const uint64_t lo = w & 0x5555555555555555ULL;
    const uint64_t hi = (w >> 1) & 0x5555555555555555ULL;
    count += std::popcount(lo | hi);
  }
  return count;
}

std::vector<int> PauliString::support() const {
  std::vector<int> dom;
  for (int i = 0; i < n_; ++i)
    if (letter(i) != PauliLetter::I) dom.push_back(i);
  return dom;
}

bool PauliString::is_identity() const {
  for (uint64_t w : words_)
    if (w != 0) return false;
  return true;
}

std::string PauliString::str() const {
  std::string s(n_, 'I');
  for (int i = 0; i < n_; ++i) s[i] = letter_char(letter(i));
  return s;
}

size_t PauliString::hash() const {
  uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<uint64_t>(n_);
  for (uint64_t w : words_) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 29;
  }
  return static_cast<size_t>(h);
}

void SparsePauliOp::add(const PauliString& p, double coeff) {
  if (p.n() != n_) throw std::invalid_argument("qubit count mismatch");
  auto it = terms_.find(p);
  if (it == terms_.end()) {
    if (std::abs(coeff) >= kCoeffZeroTol) terms_.emplace(p, coeff);
    return;
  }
  it->second += coeff;
  if (std::abs(it->second) < kCoeffZeroTol) terms_.erase(it);
}

double SparsePauliOp::coeff(const PauliString& p) const {
  auto it = terms_.find(p);
  return it == terms_.end() ? 0.0 : it->second;
}

double SparsePauliOp::identity_coeff() const { return coeff(PauliString(n_)); }

SparsePauliOp SparsePauliOp::truncate(int k) const {
  if (k < 0) throw std::invalid_argument("truncate needs k >= 0");
  SparsePauliOp out(n_);
  for (const auto& [p, c] : terms_)
    if (p.weight() <= k) out.terms_.emplace(p, c);
  return out;
}

SparsePauliOp SparsePauliOp::without_identity() const {
  SparsePauliOp out(n_);
  for (const auto& [p, c] : terms_)
    if (!p.is_identity()) out.terms_.emplace(p, c);
  return out;
}

SparsePauliOp SparsePauliOp::scaled(double factor) const {
  SparsePauliOp out(n_);
  for (const auto& [p, c] : terms_) out.add(p, c * factor);
  return out;
}

SparsePauliOp SparsePauliOp::plus(const SparsePauliOp& other) const {
  SparsePauliOp out = *this;
  for (const auto& [p, c] : other.terms_) out.add(p, c);
  return out;
}

double SparsePauliOp::pauli_p_norm(double p) const {
  if (p < 1.0) throw std::domain_error("Pauli-p norm needs p >= 1");
  // compensated sum; order independent up to rounding of the compensation
  double sum = 0.0, comp = 0.0;
  std::vector<double> mags;
  mags.reserve(terms_.size());
  for (const auto& [ps, c] : terms_) mags.push_back(std::abs(c));
  std::sort(mags.begin(), mags.end());
  for (double m : mags) {
    const double term = std::pow(m, p);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return std::pow(sum, 1.0 / p);
}

int SparsePauliOp::max_weight() const {
  int k = 0;
  for (const auto& [p, c] : terms_) k = std::max(k, p.weight());
  return k;
}

int SparsePauliOp::degree() const {
  std::vector<int> per_qubit(n_, 0);
  for (const auto& [p, c] : terms_)
    for (int i : p.support()) per_qubit[i]++;
  int d = 0;
  for (int v : per_qubit) d = std::max(d, v);
  return d;
}

nlohmann::json SparsePauliOp::to_json() const {
  // sorted by string form so the file is stable across runs
  std::vector<std::pair<std::string, double>> list;
  list.reserve(terms_.size());
  for (const auto& [p, c] : terms_) list.emplace_back(p.str(), c);
  std::sort(list.begin(), list.end());
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [s, c] : list) arr.push_back({{"p", s}, {"c", c}});
  return arr;
}

SparsePauliOp SparsePauliOp::from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument("operator JSON must be a non-empty array");
  const std::string first = j.at(0).at("p").get<std::string>();
  SparsePauliOp op(static_cast<int>(first.size()));
  for (const auto& item : j)
    op.add(PauliString::from_string(item.at("p").get<std::string>()),
           item.at("c").get<double>());
  return op;
}

ExpansionProfile expansion_coefficient(const SparsePauliOp& op, int d_e) {
  const int n = op.n();
  if (d_e < 1 || d_e > n) throw std::invalid_argument("need 1 <= d_e <= n");

  std::vector<std::vector<int>> supports;
  supports.reserve(op.size());
  for (const auto& [p, c] : op.terms())
    if (!p.is_identity()) supports.push_back(p.support());

  // walk all C(n, d_e) subsets
  std::vector<int> subset(d_e);
  for (int i = 0; i < d_e; ++i) subset[i] = i;
  int c_e = 0;
  while (true) {
    int count = 0;
    for (const auto& dom : supports) {
      const bool dom_in_subset = std::includes(subset.begin(), subset.end(),
                                               dom.begin(), dom.end());
      const bool subset_in_dom = std::includes(dom.begin(), dom.end(),
                                               subset.begin(), subset.end());
      if (dom_in_subset || subset_in_dom) count++;
    }
    c_e = std::max(c_e, count);

    int i = d_e - 1;
    while (i >= 0 && subset[i] == n - d_e + i) --i;
    if (i < 0) break;
    subset[i]++;
    for (int j = i + 1; j < d_e; ++j) subset[j] = subset[j - 1] + 1;
  }
  if (!supports.empty()) c_e = std::max(c_e, 1);

  ExpansionProfile profile;
  profile.c_e = c_e;
  profile.d_e = d_e;
  profile.r = 2.0 * d_e / (d_e + 1.0);
  return profile;
}

namespace {

void fill_letters(const std::vector<int>& dom, int pos, PauliString& base,
                  std::vector<PauliString>& out) {
  if (pos == static_cast<int>(dom.size())) {
    out.push_back(base);
    return;
  }
  for (PauliLetter l : {PauliLetter::X, PauliLetter::Y, PauliLetter::Z}) {
    base.set(dom[pos], l);
    fill_letters(dom, pos + 1, base, out);
  }
  base.set(dom[pos], PauliLetter::I);
}

void supports_up_to(int n, int k, int start, std::vector<int>& current,
                    std::vector<std::vector<int>>& out) {
  if (!current.empty()) out.push_back(current);
  if (static_cast<int>(current.size()) == k) return;
  for (int i = start; i < n; ++i) {
    current.push_back(i);
    supports_up_to(n, k, i + 1, current, out);
    current.pop_back();
  }
}

}  // namespace

std::vector<PauliString> enumerate_paulis(int n, int k, bool geometric) {
  std::vector<PauliString> out;
  out.push_back(PauliString(n));  // identity
  if (k == 0) return out;

  std::vector<std::vector<int>> supports;
  if (geometric) {
    // supports whose span (max - min + 1) fits in k contiguous qubits
    for (int lo = 0; lo < n; ++lo) {
      const int hi_max = std::min(n - 1, lo + k - 1);
      for (int hi = lo; hi <= hi_max; ++hi) {
        // endpoints fixed, interior qubits optional
        std::vector<int> interior;
        for (int i = lo + 1; i < hi; ++i) interior.push_back(i);
        const int m = static_cast<int>(interior.size());
        for (int mask = 0; mask < (1 << m); ++mask) {
          std::vector<int> dom{lo};
          for (int b = 0; b < m; ++b)
            if (mask & (1 << b)) dom.push_back(interior[b]);
          if (hi != lo) dom.push_back(hi);
          supports.push_back(std::move(dom));
        }
      }
    }
  } else {
    std::vector<int> current;
    supports_up_to(n, k, 0, current, supports);
  }

  PauliString base(n);
  for (const auto& dom : supports) fill_letters(dom, 0, base, out);
  return out;
}

}  // namespace qproc
