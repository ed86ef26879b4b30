#include "qproc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qproc {

SliceDecomposition select_slice(const SparsePauliOp& h, double r) {
  SliceDecomposition out;
  out.alpha_identity = h.identity_coeff();
  out.r = r;
  out.k = h.max_weight();
  if (out.k == 0)
    throw std::invalid_argument("nothing to optimize: H has only an identity term");

  out.slices.assign(out.k, SparsePauliOp(h.n()));
  std::vector<double> slice_mass(out.k, 0.0);
  for (const auto& [p, c] : h.terms()) {
    const int w = p.weight();
    if (w == 0) continue;
    out.slices[w - 1].add(p, c);
    slice_mass[w - 1] += std::pow(std::abs(c), r);
  }

  int best = 0;
  for (int kappa = 1; kappa < out.k; ++kappa)
    if (slice_mass[kappa] > slice_mass[best]) best = kappa;
  out.kappa_star = best + 1;
  return out;
}

BetaTable compute_beta(const SliceDecomposition& slices,
                       const std::vector<ProductState>& replicas) {
  const SparsePauliOp& h_star = slices.selected();
  const int n = h_star.n();
  const int kappa = slices.kappa_star;
  if (static_cast<int>(replicas.size()) != kappa - 1)
    throw std::invalid_argument("need kappa* - 1 replica states");

  BetaTable beta(n, {0.0, 0.0, 0.0});

  if (kappa == 1) {
    // degenerate polarization: the sigma average is empty and every other
    // qubit carries I/2, so beta is the bare coefficient
    for (const auto& [p, c] : h_star.terms()) {
      const int i = p.support()[0];
      beta[i][static_cast<int>(p.letter(i)) - 1] += c;
    }
    return beta;
  }

  struct Term {
    std::vector<int> dom;
    std::vector<int> axes;
    double coeff;
  };
  std::vector<Term> terms;
  terms.reserve(h_star.size());
  for (const auto& [p, c] : h_star.terms()) {
    Term t;
    t.dom = p.support();
    for (int q : t.dom) t.axes.push_back(static_cast<int>(p.letter(q)) - 1);
    t.coeff = c;
    terms.push_back(std::move(t));
  }

  const int patterns = 1 << (kappa - 1);
  const double pattern_weight = 1.0 / patterns;
  std::vector<std::array<double, 3>> mix(n);
  for (int mask = 0; mask < patterns; ++mask) {
    double parity = 1.0;
    for (int s = 0; s < kappa - 1; ++s)
      if (mask & (1 << s)) parity = -parity;

    // per-qubit mixture Bloch vector (1/(kappa-1)) sum_s sigma_s b_(s,j)
    for (int j = 0; j < n; ++j) {
      std::array<double, 3> m{0.0, 0.0, 0.0};
      for (int s = 0; s < kappa - 1; ++s) {
        const double sigma = (mask & (1 << s)) ? -1.0 : 1.0;
        for (int a = 0; a < 3; ++a) m[a] += sigma * replicas[s].qubits[j][a];
      }
      for (int a = 0; a < 3; ++a) mix[j][a] = m[a] / (kappa - 1);
    }

    for (const auto& t : terms) {
      const int deg = static_cast<int>(t.dom.size());
      for (int hole = 0; hole < deg; ++hole) {
        double prod = 1.0;
        for (int j = 0; j < deg; ++j) {
          if (j == hole) continue;
          prod *= mix[t.dom[j]][t.axes[j]];
          if (prod == 0.0) break;
        }
        beta[t.dom[hole]][t.axes[hole]] +=
            parity * pattern_weight * t.coeff * prod;
      }
    }
  }
  return beta;
}

Bloch local_optimize(const std::array<double, 3>& beta_row) {
  const double norm = std::sqrt(beta_row[0] * beta_row[0] + beta_row[1] * beta_row[1] +
                                beta_row[2] * beta_row[2]);
  if (norm < 1e-14) return {0.0, 0.0, 1.0};
  return {beta_row[0] / norm, beta_row[1] / norm, beta_row[2] / norm};
}

std::vector<double> family_polynomial(const SliceDecomposition& slices,
                                      const PolarizationDraw& draw) {
  if (slices.slices.empty()) return {slices.alpha_identity};
  const int kappa = slices.kappa_star;
  const int n = slices.slices[0].n();
  if (static_cast<int>(draw.replicas.size()) != kappa ||
      static_cast<int>(draw.sigma.size()) != kappa)
    throw std::invalid_argument("draw needs kappa* replicas and signs");

  // per-qubit deviation vector of rho(t) at t = 1
  std::vector<std::array<double, 3>> mix(n, {0.0, 0.0, 0.0});
  for (int j = 0; j < n; ++j) {
    for (int s = 0; s < kappa; ++s)
      for (int a = 0; a < 3; ++a)
        mix[j][a] += draw.sigma[s] * draw.replicas[s].qubits[j][a];
    for (int a = 0; a < 3; ++a) mix[j][a] /= kappa;
  }

  std::vector<double> coeffs(slices.k + 1, 0.0);
  coeffs[0] = slices.alpha_identity;
  for (int w = 1; w <= slices.k; ++w) {
    double sum = 0.0;
    for (const auto& [p, c] : slices.slices[w - 1].terms()) {
      double prod = c;
      for (int q : p.support()) {
        prod *= mix[q][static_cast<int>(p.letter(q)) - 1];
        if (prod == 0.0) break;
      }
      sum += prod;
    }
    coeffs[w] = sum;
  }
  return coeffs;
}

double sweep_t(const std::vector<double>& coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("empty polynomial");
  constexpr int kGridPoints = 10001;
  auto eval = [&coeffs](double t) {
    double v = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) v = v * t + coeffs[i];
    return v;
  };
  double best_t = -1.0;
  double best_gain = -1.0;
  for (int g = 0; g < kGridPoints; ++g) {
    const double t = -1.0 + 2.0 * g / (kGridPoints - 1);
    const double gain = std::abs(eval(t) - coeffs[0]);
    if (gain > best_gain || (gain == best_gain && std::abs(t) < std::abs(best_t))) {
      best_gain = gain;
      best_t = t;
    }
  }
  return best_t;
}

OptResult optimize(const SparsePauliOp& h, const ExpansionProfile& profile, Rng& rng) {
  const int n = h.n();
  SliceDecomposition slices = select_slice(h, profile.r);
  const int kappa = slices.kappa_star;

  PolarizationDraw draw;
  draw.replicas.reserve(kappa);
  for (int s = 0; s < kappa - 1; ++s) draw.replicas.push_back(sample_haar_product(n, rng));

  const BetaTable beta = compute_beta(slices, draw.replicas);
  ProductState optimized(n);
  for (int j = 0; j < n; ++j) optimized.qubits[j] = local_optimize(beta[j]);
  draw.replicas.push_back(std::move(optimized));

  draw.sigma.resize(kappa);
  for (int s = 0; s < kappa; ++s) draw.sigma[s] = rng.sign();

  const std::vector<double> coeffs = family_polynomial(slices, draw);
  const double t_star = sweep_t(coeffs);

  double f_star = 0.0;
  for (size_t i = coeffs.size(); i-- > 0;) f_star = f_star * t_star + coeffs[i];

  // sample a pure product state from rho(t*) qubit by qubit
  OptResult result;
  result.t_star = t_star;
  result.maximizing = f_star - slices.alpha_identity > 0.0;
  result.state = ProductState(n);
  for (int j = 0; j < n; ++j) {
    std::array<double, 3> m{0.0, 0.0, 0.0};
    for (int s = 0; s < kappa; ++s)
      for (int a = 0; a < 3; ++a)
        m[a] += draw.sigma[s] * draw.replicas[s].qubits[j][a];
    for (int a = 0; a < 3; ++a) m[a] *= t_star / kappa;
    const double len = std::sqrt(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]);
    Bloch axis = len < 1e-14 ? Bloch{0.0, 0.0, 1.0}
                             : Bloch{m[0] / len, m[1] / len, m[2] / len};
    const double p_plus = 0.5 * (1.0 + len);
    const double flip = rng.next_double() < p_plus ? 1.0 : -1.0;
    result.state.qubits[j] = {flip * axis[0], flip * axis[1], flip * axis[2]};
  }

  result.value = result.state.expect(h);
  result.margin = result.value - slices.alpha_identity;
  return result;
}

SparsePauliOp polarization(const SparsePauliOp& homogeneous_op, int k) {
  const int n = homogeneous_op.n();
  double kfact = 1.0;
  for (int i = 2; i <= k; ++i) kfact *= i;

  SparsePauliOp out(n * k);
  std::vector<int> perm(k);
  for (const auto& [p, c] : homogeneous_op.terms()) {
    const auto dom = p.support();
    if (static_cast<int>(dom.size()) != k)
      throw std::invalid_argument("polarization needs a homogeneous k-local operator");
    std::iota(perm.begin(), perm.end(), 0);
    do {
      PauliString lifted(n * k);
      for (int s = 0; s < k; ++s)
        lifted.set(perm[s] * n + dom[s], p.letter(dom[s]));
      out.add(lifted, c / kfact);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

}  // namespace qproc
