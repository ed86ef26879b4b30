#include "qproc/states.hpp"

#include <cmath>
#include <stdexcept>

namespace qproc {

Bloch bloch_of(StabLabel s) {
  switch (s) {
    case StabLabel::Zp: return {0.0, 0.0, 1.0};
    case StabLabel::Zm: return {0.0, 0.0, -1.0};
    case StabLabel::Xp: return {1.0, 0.0, 0.0};
    case StabLabel::Xm: return {-1.0, 0.0, 0.0};
    case StabLabel::Yp: return {0.0, 1.0, 0.0};
    case StabLabel::Ym: return {0.0, -1.0, 0.0};
  }
  throw std::invalid_argument("bad StabLabel");
}

std::string label_str(StabLabel s) {
  switch (s) {
    case StabLabel::Zp: return "Z+";
    case StabLabel::Zm: return "Z-";
    case StabLabel::Xp: return "X+";
    case StabLabel::Xm: return "X-";
    case StabLabel::Yp: return "Y+";
    case StabLabel::Ym: return "Y-";
  }
  throw std::invalid_argument("bad StabLabel");
}

StabLabel label_from_str(const std::string& s) {
  if (s.size() != 2 || (s[1] != '+' && s[1] != '-'))
    throw std::invalid_argument("bad stabilizer label: " + s);
  const int sign = s[1] == '+' ? 1 : -1;
  switch (s[0]) {
    case 'X': return make_label(0, sign);
    case 'Y': return make_label(1, sign);
    case 'Z': return make_label(2, sign);
    default: throw std::invalid_argument("bad stabilizer label: " + s);
  }
}

int label_axis(StabLabel s) {
  switch (s) {
    case StabLabel::Xp: case StabLabel::Xm: return 0;
    case StabLabel::Yp: case StabLabel::Ym: return 1;
    default: return 2;
  }
}

int label_sign(StabLabel s) {
  switch (s) {
    case StabLabel::Zp: case StabLabel::Xp: case StabLabel::Yp: return 1;
    default: return -1;
  }
}

StabLabel make_label(int axis, int sign) {
  static constexpr StabLabel plus[3] = {StabLabel::Xp, StabLabel::Yp, StabLabel::Zp};
  static constexpr StabLabel minus[3] = {StabLabel::Xm, StabLabel::Ym, StabLabel::Zm};
  if (axis < 0 || axis > 2) throw std::invalid_argument("bad axis");
  return sign > 0 ? plus[axis] : minus[axis];
}

ProductState ProductState::from_labels(const std::vector<StabLabel>& labels) {
  ProductState s;
  s.qubits.reserve(labels.size());
  for (StabLabel l : labels) s.qubits.push_back(bloch_of(l));
  return s;
}

double ProductState::expect(const PauliString& p) const {
  if (p.n() != n()) throw std::invalid_argument("qubit count mismatch");
  double value = 1.0;
  for (int i = 0; i < p.n(); ++i) {
    const PauliLetter l = p.letter(i);
    if (l == PauliLetter::I) continue;
    value *= qubits[i][static_cast<int>(l) - 1];
    if (value == 0.0) return 0.0;
  }
  return value;
}

double ProductState::expect(const SparsePauliOp& op) const {
  double sum = 0.0, comp = 0.0;
  for (const auto& [p, c] : op.terms()) {
    const double y = c * expect(p) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

std::vector<StabLabel> sample_stab_labels(int n, Rng& rng) {
  std::vector<StabLabel> labels(n);
  for (int i = 0; i < n; ++i)
    labels[i] = static_cast<StabLabel>(rng.below(kNumStabLabels));
  return labels;
}

ProductState sample_stab_product(int n, Rng& rng) {
  return ProductState::from_labels(sample_stab_labels(n, rng));
}

Bloch sample_haar_qubit(Rng& rng) {
  const double z = 2.0 * rng.next_double() - 1.0;
  const double phi = 2.0 * M_PI * rng.next_double();
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

ProductState sample_haar_product(int n, Rng& rng) {
  ProductState state;
  state.qubits.reserve(n);
  for (int i = 0; i < n; ++i) state.qubits.push_back(sample_haar_qubit(rng));
  return state;
}

double PauliExpectationProvider::expect(const SparsePauliOp& op) const {
  double sum = 0.0, comp = 0.0;
  for (const auto& [p, c] : op.terms()) {
    const double y = c * expect(p) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

GhzProductProvider::GhzProductProvider(int m, int sign, ProductState right)
    : m_(m), sign_(sign), right_(std::move(right)) {
  if (m < 1 || (sign != 1 && sign != -1))
    throw std::invalid_argument("bad GHZ block");
}

double GhzProductProvider::expect(const PauliString& p) const {
  if (p.n() != n()) throw std::invalid_argument("qubit count mismatch");

  // left (GHZ) block
  int z_count = 0, y_count = 0, xy_count = 0, x_count = 0;
  for (int i = 0; i < m_; ++i) {
    switch (p.letter(i)) {
      case PauliLetter::I: break;
      case PauliLetter::Z: z_count++; break;
      case PauliLetter::X: x_count++; xy_count++; break;
      case PauliLetter::Y: y_count++; xy_count++; break;
    }
  }
  double left;
  if (xy_count == 0) {
    left = (z_count % 2 == 0) ? 1.0 : 0.0;
  } else if (xy_count == m_ && z_count == 0 && y_count % 2 == 0) {
    left = sign_ * (y_count % 4 == 0 ? 1.0 : -1.0);
  } else {
    left = 0.0;
  }
  if (left == 0.0) return 0.0;

  double right = 1.0;
  for (int i = m_; i < n(); ++i) {
    const PauliLetter l = p.letter(i);
    if (l == PauliLetter::I) continue;
    right *= right_.qubits[i - m_][static_cast<int>(l) - 1];
  }
  return left * right;
}

}  // namespace qproc
