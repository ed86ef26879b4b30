#include "qproc/fermion.hpp"

#include <cmath>
#include <stdexcept>

#include "qproc/rng.hpp"

namespace qproc {

namespace {

constexpr double kBilinearTol = 1e-12;

// -i gamma_b gamma_c for b < c is a real-coefficient Pauli string:
//   same site j:          +  Z_j
//   b even (X-type):      -  Y_j Z ... Z B_l
//   b odd  (Y-type):      +  X_j Z ... Z B_l
// with B_l = X for c even, Y for c odd.
struct BilinearString {
  double sign;
  PauliString p;
};

BilinearString bilinear_string(int n, int b, int c) {
  const int j = b / 2, l = c / 2;
  PauliString p(n);
  if (j == l) {
    p.set(j, PauliLetter::Z);
    return {1.0, p};
  }
  const double sign = (b % 2 == 0) ? -1.0 : 1.0;
  p.set(j, (b % 2 == 0) ? PauliLetter::Y : PauliLetter::X);
  for (int m = j + 1; m < l; ++m) p.set(m, PauliLetter::Z);
  p.set(l, (c % 2 == 0) ? PauliLetter::X : PauliLetter::Y);
  return {sign, p};
}

}  // namespace

ChainModel ChainModel::homogeneous(ChainKind kind, int n, double h) {
  ChainModel m;
  m.kind = kind;
  m.n = n;
  m.fields.assign(n, h);
  return m;
}

ChainModel ChainModel::disordered(ChainKind kind, int n, double lo, double hi,
                                  uint64_t seed) {
  ChainModel m;
  m.kind = kind;
  m.n = n;
  m.fields.resize(n);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) m.fields[i] = lo + (hi - lo) * rng.next_double();
  return m;
}

SparsePauliOp ChainModel::hamiltonian() const {
  SparsePauliOp h(n);
  const double coupling = kind == ChainKind::XY ? 0.25 : 0.5;
  for (int i = 0; i + 1 < n; ++i) {
    PauliString xx(n);
    xx.set(i, PauliLetter::X);
    xx.set(i + 1, PauliLetter::X);
    h.add(xx, coupling);
    if (kind == ChainKind::XY) {
      PauliString yy(n);
      yy.set(i, PauliLetter::Y);
      yy.set(i + 1, PauliLetter::Y);
      h.add(yy, coupling);
    }
  }
  for (int i = 0; i < n; ++i) {
    PauliString z(n);
    z.set(i, PauliLetter::Z);
    h.add(z, 0.5 * fields[i]);
  }
  return h;
}

nlohmann::json ChainModel::to_json() const {
  nlohmann::json j;
  j["kind"] = kind == ChainKind::XY ? "xy" : "ising";
  j["n"] = n;
  j["field"] = nlohmann::json{{"mode", "explicit"}, {"values", fields}};
  return j;
}

ChainModel ChainModel::from_json(const nlohmann::json& j) {
  const std::string kind_str = j.at("kind").get<std::string>();
  ChainKind kind;
  if (kind_str == "xy") kind = ChainKind::XY;
  else if (kind_str == "ising") kind = ChainKind::Ising;
  else throw std::invalid_argument("unsupported chain kind: " + kind_str);

  const int n = j.at("n").get<int>();
  const auto& field = j.at("field");
  const std::string mode = field.at("mode").get<std::string>();
  if (mode == "homogeneous")
    return homogeneous(kind, n, field.at("h").get<double>());
  if (mode == "disordered")
    return disordered(kind, n, field.at("low").get<double>(),
                      field.at("high").get<double>(), field.at("seed").get<uint64_t>());
  if (mode == "explicit") {
    ChainModel m;
    m.kind = kind;
    m.n = n;
    m.fields = field.at("values").get<std::vector<double>>();
    if (static_cast<int>(m.fields.size()) != n)
      throw std::invalid_argument("field values length mismatch");
    return m;
  }
  throw std::invalid_argument("unsupported field mode: " + mode);
}

Eigen::MatrixXd build_quadratic(const ChainModel& model) {
  const int n = model.n;
  if (n < 1 || static_cast<int>(model.fields.size()) != n)
    throw std::invalid_argument("invalid chain model");
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  // a term c * (-i) gamma_b gamma_c (b < c) contributes A_bc = -2c
  auto put = [&a](int b, int c, double coeff) {
    a(b, c) += -2.0 * coeff;
    a(c, b) -= -2.0 * coeff;
  };
  for (int i = 0; i + 1 < n; ++i) {
    if (model.kind == ChainKind::XY) {
      // X_i X_{i+1} = -i g_{2i+1} g_{2i+2};  Y_i Y_{i+1} = +i g_{2i} g_{2i+3}
      put(2 * i + 1, 2 * i + 2, 0.25);
      put(2 * i, 2 * i + 3, -0.25);
    } else {
      put(2 * i + 1, 2 * i + 2, 0.5);
    }
  }
  for (int i = 0; i < n; ++i) put(2 * i, 2 * i + 1, 0.5 * model.fields[i]);
  return a;
}

MajoranaRotation::MajoranaRotation(const ChainModel& model) : n_(model.n) {
  using CplxLD = std::complex<long double>;
  using MatLD = Eigen::Matrix<CplxLD, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::MatrixXd a = build_quadratic(model);
  MatLD herm(a.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      herm(r, c) = CplxLD(0.0L, static_cast<long double>(a(r, c)));
  Eigen::SelfAdjointEigenSolver<MatLD> es(herm);
  evals_ = es.eigenvalues();
  evecs_.resize(a.rows(), a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      evecs_(r, c) = std::complex<double>(
          static_cast<double>(es.eigenvectors()(r, c).real()),
          static_cast<double>(es.eigenvectors()(r, c).imag()));
}

Eigen::MatrixXd MajoranaRotation::at(double t) const {
  // exp(A t) = V exp(-i L t) V^dag with iA = V L V^dag
  Eigen::VectorXcd phases(evals_.size());
  for (Eigen::Index i = 0; i < evals_.size(); ++i) {
    const long double theta = -evals_[i] * static_cast<long double>(t);
    phases[i] = std::complex<double>(static_cast<double>(cosl(theta)),
                                     static_cast<double>(sinl(theta)));
  }
  const Eigen::MatrixXcd r = evecs_ * phases.asDiagonal() * evecs_.adjoint();
  return r.real();
}

SparsePauliOp heisenberg_z(const Eigen::MatrixXd& rotation, int site) {
  const int n = static_cast<int>(rotation.rows()) / 2;
  if (site < 0 || site >= n) throw std::out_of_range("site index out of range");
  const auto u = rotation.row(2 * site);
  const auto v = rotation.row(2 * site + 1);
  SparsePauliOp op(n);
  for (int b = 0; b < 2 * n; ++b) {
    for (int c = b + 1; c < 2 * n; ++c) {
      const double m = u[b] * v[c] - u[c] * v[b];
      if (std::abs(m) < kBilinearTol) continue;
      const BilinearString bs = bilinear_string(n, b, c);
      op.add(bs.p, bs.sign * m);
    }
  }
  return op;
}

SparsePauliOp heisenberg_z(const ChainModel& model, int site, double t) {
  return heisenberg_z(MajoranaRotation(model).at(t), site);
}

double expectation_z_t(const ChainModel& model, int site, double t,
                       const ProductState& s) {
  if (s.n() != model.n) throw std::invalid_argument("state size mismatch");
  return s.expect(heisenberg_z(model, site, t));
}

std::vector<double> expectation_z_all(const Eigen::MatrixXd& rotation,
                                      const ProductState& s) {
  const int n = s.n();
  if (rotation.rows() != 2 * n) throw std::invalid_argument("rotation size mismatch");

  // G(b, c) = <-i gamma_b gamma_c>_s for b < c, antisymmetric extension.
  // For fixed b the Z-string product between the endpoints grows one site at
  // a time, so the whole table costs O(n^2).
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int b = 0; b < 2 * n; ++b) {
    const int j = b / 2;
    const double head = (b % 2 == 0) ? -s.qubits[j][1] : s.qubits[j][0];
    double zprod = 1.0;
    for (int c = b + 1; c < 2 * n; ++c) {
      const int l = c / 2;
      double val;
      if (l == j) {
        val = s.qubits[j][2];  // same-site pair is Z_j
      } else {
        const double tail = (c % 2 == 0) ? s.qubits[l][0] : s.qubits[l][1];
        val = head * zprod * tail;
      }
      g(b, c) = val;
      g(c, b) = -val;
      if (l > j && c % 2 == 1) zprod *= s.qubits[l][2];  // site l now interior
    }
  }

  const Eigen::MatrixXd twopoint = rotation * g * rotation.transpose();
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = twopoint(2 * i, 2 * i + 1);
  return out;
}

}  // namespace qproc
