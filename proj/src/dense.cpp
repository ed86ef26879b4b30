#include "qproc/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace qproc {

namespace {

constexpr Cplx kI{0.0, 1.0};

// Single-qubit action of a Pauli letter on basis index bit b:
// P |b> = phase(b) |b ^ flip>.
struct LetterAction {
  int flip;      // 0 or 1
  Cplx phase0;   // phase when incoming bit is 0
  Cplx phase1;   // phase when incoming bit is 1
};

LetterAction action_of(PauliLetter l) {
  switch (l) {
    case PauliLetter::I: return {0, 1.0, 1.0};
    case PauliLetter::X: return {1, 1.0, 1.0};
    case PauliLetter::Y: return {1, kI, -kI};  // Y|0> = i|1>, Y|1> = -i|0>
    case PauliLetter::Z: return {0, 1.0, -1.0};
  }
  return {0, 1.0, 1.0};
}

// P |j> = phase |j ^ mask>; returns (mask, phase for row j).
std::pair<uint64_t, Cplx> apply_to_index(const PauliString& p, uint64_t j) {
  uint64_t mask = 0;
  Cplx phase = 1.0;
  for (int q = 0; q < p.n(); ++q) {
    const PauliLetter l = p.letter(q);
    if (l == PauliLetter::I) continue;
    const LetterAction a = action_of(l);
    const int bit = (j >> q) & 1;
    phase *= bit ? a.phase1 : a.phase0;
    mask |= static_cast<uint64_t>(a.flip) << q;
  }
  return {mask, phase};
}

// bit masks and phases for every basis state, computed once per string
void string_action(const PauliString& p, uint64_t dim, std::vector<Cplx>& phases,
                   uint64_t& mask) {
  phases.assign(dim, 1.0);
  mask = 0;
  for (int q = 0; q < p.n(); ++q) {
    const PauliLetter l = p.letter(q);
    if (l == PauliLetter::I) continue;
    const LetterAction a = action_of(l);
    mask |= static_cast<uint64_t>(a.flip) << q;
    const uint64_t qbit = uint64_t{1} << q;
    for (uint64_t j = 0; j < dim; ++j) phases[j] *= (j & qbit) ? a.phase1 : a.phase0;
  }
}

const DenseMat& gate_h() {
  static const DenseMat h = [] {
    DenseMat m(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    m << s, s, s, -s;
    return m;
  }();
  return h;
}

const DenseMat& gate_hsdag() {
  // maps Y eigenstates onto the computational basis
  static const DenseMat g = [] {
    DenseMat m(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    m << Cplx{s, 0}, Cplx{0, -s}, Cplx{s, 0}, Cplx{0, s};
    return m;
  }();
  return g;
}

void apply_single_qubit(DenseVec& psi, const DenseMat& g, int qubit) {
  const uint64_t dim = psi.size();
  const uint64_t qbit = uint64_t{1} << qubit;
  for (uint64_t j = 0; j < dim; ++j) {
    if (j & qbit) continue;
    const Cplx a = psi[j], b = psi[j | qbit];
    psi[j] = g(0, 0) * a + g(0, 1) * b;
    psi[j | qbit] = g(1, 0) * a + g(1, 1) * b;
  }
}

void apply_single_qubit(DenseMat& rho, const DenseMat& g, int qubit) {
  const uint64_t dim = rho.rows();
  const uint64_t qbit = uint64_t{1} << qubit;
  // rho <- (G x I) rho (G x I)^dag, one column/row pair at a time
  for (uint64_t c = 0; c < dim; ++c) {
    for (uint64_t j = 0; j < dim; ++j) {
      if (j & qbit) continue;
      const Cplx a = rho(j, c), b = rho(j | qbit, c);
      rho(j, c) = g(0, 0) * a + g(0, 1) * b;
      rho(j | qbit, c) = g(1, 0) * a + g(1, 1) * b;
    }
  }
  for (uint64_t rI = 0; rI < dim; ++rI) {
    for (uint64_t j = 0; j < dim; ++j) {
      if (j & qbit) continue;
      const Cplx a = rho(rI, j), b = rho(rI, j | qbit);
      rho(rI, j) = std::conj(g(0, 0)) * a + std::conj(g(0, 1)) * b;
      rho(rI, j | qbit) = std::conj(g(1, 0)) * a + std::conj(g(1, 1)) * b;
    }
  }
}

}  // namespace

void check_dense_n(int n) {
  if (n < 1 || n > kMaxDenseQubits)
    throw std::invalid_argument("dense backend supports 1 <= n <= 12 qubits");
}

DenseVec statevector(const ProductState& s) {
  check_dense_n(s.n());
  DenseVec psi = DenseVec::Ones(1);
  for (int q = 0; q < s.n(); ++q) {
    const Bloch& b = s.qubits[q];
    // |psi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>
    const double ct = std::clamp(b[2], -1.0, 1.0);
    const double c = std::sqrt((1.0 + ct) / 2.0);
    const double sn = std::sqrt((1.0 - ct) / 2.0);
    const double phi = std::atan2(b[1], b[0]);
    Eigen::Vector2cd q_state;
    q_state << Cplx{c, 0.0}, std::polar(sn, phi);
    // tensor with qubit q as the q-th bit (little-endian)
    DenseVec next(psi.size() * 2);
    for (Eigen::Index j = 0; j < psi.size(); ++j) {
      next[j] = psi[j] * q_state[0];
      next[j + psi.size()] = psi[j] * q_state[1];
    }
    psi = std::move(next);
  }
  return psi;
}

DenseMat density_matrix(const ProductState& s) { return to_density(statevector(s)); }

DenseMat to_density(const DenseVec& psi) { return psi * psi.adjoint(); }

DenseMat dense_matrix(const PauliString& p) {
  check_dense_n(p.n());
  const uint64_t dim = uint64_t{1} << p.n();
  DenseMat m = DenseMat::Zero(dim, dim);
  std::vector<Cplx> phases;
  uint64_t mask;
  string_action(p, dim, phases, mask);
  for (uint64_t j = 0; j < dim; ++j) m(j ^ mask, j) = phases[j];
  return m;
}

DenseMat dense_matrix(const SparsePauliOp& op) {
  check_dense_n(op.n());
  const uint64_t dim = uint64_t{1} << op.n();
  DenseMat m = DenseMat::Zero(dim, dim);
  std::vector<Cplx> phases;
  uint64_t mask;
  for (const auto& [p, c] : op.terms()) {
    string_action(p, dim, phases, mask);
    for (uint64_t j = 0; j < dim; ++j) m(j ^ mask, j) += c * phases[j];
  }
  return m;
}

Cplx pauli_trace(const PauliString& p, const DenseMat& rho) {
  const uint64_t dim = rho.rows();
  std::vector<Cplx> phases;
  uint64_t mask;
  string_action(p, dim, phases, mask);
  Cplx sum = 0.0;
  // Tr(P rho) = sum_j <j|P rho|j> = sum_j phase(j^mask) rho(j^mask, j)
  for (uint64_t j = 0; j < dim; ++j) sum += phases[j ^ mask] * rho(j ^ mask, j);
  return sum;
}

Cplx pauli_expect(const PauliString& p, const DenseVec& psi) {
  const uint64_t dim = psi.size();
  std::vector<Cplx> phases;
  uint64_t mask;
  string_action(p, dim, phases, mask);
  Cplx sum = 0.0;
  for (uint64_t j = 0; j < dim; ++j)
    sum += std::conj(psi[j]) * phases[j ^ mask] * psi[j ^ mask];
  return sum;
}

double expectation(const SparsePauliOp& op, const DenseMat& rho) {
  if ((uint64_t{1} << op.n()) != static_cast<uint64_t>(rho.rows()))
    throw std::invalid_argument("operator/state dimension mismatch");
  double sum = 0.0;
  for (const auto& [p, c] : op.terms()) sum += c * pauli_trace(p, rho).real();
  return sum;
}

double expectation(const SparsePauliOp& op, const DenseVec& psi) {
  if ((uint64_t{1} << op.n()) != static_cast<uint64_t>(psi.size()))
    throw std::invalid_argument("operator/state dimension mismatch");
  double sum = 0.0;
  for (const auto& [p, c] : op.terms()) sum += c * pauli_expect(p, psi).real();
  return sum;
}

DenseChannel DenseChannel::identity(int n) {
  check_dense_n(n);
  return DenseChannel(n, Kind::Identity);
}

DenseChannel DenseChannel::unitary(DenseMat u) {
  const auto dim = u.rows();
  if (dim != u.cols() || dim < 2 || (dim & (dim - 1)) != 0)
    throw std::invalid_argument("unitary must be square with power-of-two size");
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  check_dense_n(n);
  if ((u.adjoint() * u - DenseMat::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("matrix is not unitary");
  DenseChannel ch(n, Kind::Unitary);
  ch.u_ = std::move(u);
  return ch;
}

DenseChannel DenseChannel::hamiltonian(SparsePauliOp h, double t) {
  check_dense_n(h.n());
  DenseChannel ch(h.n(), Kind::Hamiltonian);
  ch.ham_ = std::move(h);
  ch.t_ = t;
  return ch;
}

DenseChannel DenseChannel::kraus(int n, std::vector<DenseMat> ops) {
  check_dense_n(n);
  if (ops.empty()) throw std::invalid_argument("empty Kraus list");
  const Eigen::Index dim = Eigen::Index{1} << n;
  DenseMat sum = DenseMat::Zero(dim, dim);
  for (const auto& k : ops) {
    if (k.rows() != dim || k.cols() != dim)
      throw std::invalid_argument("Kraus operator dimension mismatch");
    sum += k.adjoint() * k;
  }
  if ((sum - DenseMat::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("Kraus list is not trace preserving");
  DenseChannel ch(n, Kind::Kraus);
  ch.kraus_ = std::move(ops);
  return ch;
}

const DenseMat& DenseChannel::unitary_matrix() const {
  if (kind_ == Kind::Unitary) return u_;
  if (!cached_u_) {
    const DenseMat h = dense_matrix(ham_);
    Eigen::SelfAdjointEigenSolver<DenseMat> es(h);
    // Rayleigh-quotient polish: large t amplifies eigenvalue error, and the
    // quotient carries a smaller constant than the QR sweep
    const DenseMat hv = h * es.eigenvectors();
    DenseVec phases(hv.cols());
    for (Eigen::Index i = 0; i < hv.cols(); ++i) {
      const double lambda = es.eigenvectors().col(i).dot(hv.col(i)).real();
      phases[i] = std::polar(1.0, -t_ * lambda);
    }
    cached_u_ = std::make_shared<DenseMat>(es.eigenvectors() * phases.asDiagonal() *
                                           es.eigenvectors().adjoint());
  }
  return *cached_u_;
}

DenseMat DenseChannel::apply(const DenseMat& rho) const {
  switch (kind_) {
    case Kind::Identity: return rho;
    case Kind::Unitary:
    case Kind::Hamiltonian: {
      const DenseMat& u = unitary_matrix();
      return u * rho * u.adjoint();
    }
    case Kind::Kraus: {
      DenseMat out = DenseMat::Zero(rho.rows(), rho.cols());
      for (const auto& k : kraus_) out += k * rho * k.adjoint();
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

DenseVec DenseChannel::apply_pure(const DenseVec& psi) const {
  switch (kind_) {
    case Kind::Identity: return psi;
    case Kind::Unitary:
    case Kind::Hamiltonian: return unitary_matrix() * psi;
    case Kind::Kraus: throw std::invalid_argument("Kraus channel does not preserve purity");
  }
  throw std::logic_error("unreachable");
}

std::vector<StabLabel> born_sample(const DenseVec& psi_in, const std::vector<int>& bases,
                                   Rng& rng) {
  DenseVec psi = psi_in;
  const uint64_t dim = psi.size();
  int n = 0;
  while ((uint64_t{1} << n) < dim) ++n;
  if (static_cast<int>(bases.size()) != n) throw std::invalid_argument("bases size mismatch");

  std::vector<StabLabel> labels(n);
  for (int q = 0; q < n; ++q) {
    if (bases[q] == 0) apply_single_qubit(psi, gate_h(), q);
    else if (bases[q] == 1) apply_single_qubit(psi, gate_hsdag(), q);

    const uint64_t qbit = uint64_t{1} << q;
    double p0 = 0.0;
    for (uint64_t j = 0; j < dim; ++j)
      if (!(j & qbit)) p0 += std::norm(psi[j]);

    const int outcome = rng.next_double() < p0 ? 0 : 1;
    labels[q] = make_label(bases[q], outcome == 0 ? 1 : -1);

    const double norm = outcome == 0 ? p0 : 1.0 - p0;
    const double scale = norm > 0.0 ? 1.0 / std::sqrt(norm) : 0.0;
    for (uint64_t j = 0; j < dim; ++j) {
      const bool keep = ((j & qbit) != 0) == (outcome == 1);
      psi[j] = keep ? psi[j] * scale : Cplx{0.0, 0.0};
    }
  }
  return labels;
}

std::vector<StabLabel> born_sample(const DenseMat& rho_in, const std::vector<int>& bases,
                                   Rng& rng) {
  DenseMat rho = rho_in;
  const uint64_t dim = rho.rows();
  int n = 0;
  while ((uint64_t{1} << n) < dim) ++n;
  if (static_cast<int>(bases.size()) != n) throw std::invalid_argument("bases size mismatch");

  std::vector<StabLabel> labels(n);
  for (int q = 0; q < n; ++q) {
    if (bases[q] == 0) apply_single_qubit(rho, gate_h(), q);
    else if (bases[q] == 1) apply_single_qubit(rho, gate_hsdag(), q);

    const uint64_t qbit = uint64_t{1} << q;
    double p0 = 0.0;
    for (uint64_t j = 0; j < dim; ++j)
      if (!(j & qbit)) p0 += rho(j, j).real();
    p0 = std::clamp(p0, 0.0, 1.0);

    const int outcome = rng.next_double() < p0 ? 0 : 1;
    labels[q] = make_label(bases[q], outcome == 0 ? 1 : -1);

    const double norm = outcome == 0 ? p0 : 1.0 - p0;
    const double scale = norm > 0.0 ? 1.0 / norm : 0.0;
    for (uint64_t rI = 0; rI < dim; ++rI) {
      const bool keep_r = ((rI & qbit) != 0) == (outcome == 1);
      for (uint64_t c = 0; c < dim; ++c) {
        const bool keep_c = ((c & qbit) != 0) == (outcome == 1);
        rho(rI, c) = (keep_r && keep_c) ? rho(rI, c) * scale : Cplx{0.0, 0.0};
      }
    }
  }
  return labels;
}

DenseStateProvider::DenseStateProvider(DenseVec psi) : psi_(std::move(psi)) {
  n_ = 0;
  while ((Eigen::Index{1} << n_) < psi_.size()) ++n_;
  check_dense_n(n_);
}

double nonidentity_purity(const DenseMat& rho_a) {
  const uint64_t dim = rho_a.rows();
  int l = 0;
  while ((uint64_t{1} << l) < dim) ++l;
  check_dense_n(l);

  // iterate over all 3^L fully non-identity words
  std::vector<int> word(l, 0);  // 0=X,1=Y,2=Z
  double total = 0.0;
  while (true) {
    PauliString p(l);
    for (int i = 0; i < l; ++i)
      p.set(i, static_cast<PauliLetter>(word[i] + 1));
    const double v = pauli_trace(p, rho_a).real();
    total += v * v;

    int i = 0;
    while (i < l && word[i] == 2) word[i++] = 0;
    if (i == l) break;
    word[i]++;
  }
  return total / static_cast<double>(dim);
}

}  // namespace qproc
