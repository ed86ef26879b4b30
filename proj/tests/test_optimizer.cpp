#include "doctest.h"

#include <cmath>

#include "qproc/dense.hpp"
#include "qproc/norms.hpp"
#include "qproc/optimizer.hpp"
#include "test_helpers.hpp"

using namespace qproc;
using namespace qproc::testing;

TEST_CASE("slice selection") {
  const SparsePauliOp h = op_of(2, {{"ZI", 1.0}, {"ZZ", 0.1}});
  const SliceDecomposition slices = select_slice(h, 1.0);
  CHECK(slices.kappa_star == 1);
  CHECK(slices.k == 2);

  const SparsePauliOp homo = op_of(3, {{"ZZI", 0.4}, {"IXX", -0.2}});
  CHECK(select_slice(homo, 4.0 / 3.0).kappa_star == 2);

  SparsePauliOp only_identity(2);
  only_identity.add(PauliString(2), 1.0);
  CHECK_THROWS(select_slice(only_identity, 1.0));
}

TEST_CASE("selected slice carries at least 1/k of the total r-mass") {
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 1 + trial % 3;
    const SparsePauliOp h = random_klocal(4, k, 6, rng);
    const double r = 2.0 * k / (k + 1.0);
    const SliceDecomposition slices = select_slice(h, r);
    double total = 0.0, selected = 0.0;
    for (const auto& [p, c] : h.terms())
      if (!p.is_identity()) total += std::pow(std::abs(c), r);
    for (const auto& [p, c] : slices.selected().terms())
      selected += std::pow(std::abs(c), r);
    CHECK(slices.k * selected >= total - 1e-12);
  }
}

TEST_CASE("beta reduces to bare coefficients when kappa* = 1") {
  const SparsePauliOp h = op_of(3, {{"IXI", 0.7}});
  const SliceDecomposition slices = select_slice(h, 1.0);
  REQUIRE(slices.kappa_star == 1);
  const BetaTable beta = compute_beta(slices, {});
  CHECK(beta[1][0] == doctest::Approx(0.7));
  CHECK(beta[0][0] == 0.0);
  CHECK(beta[2][2] == 0.0);
}

TEST_CASE("beta for a single ZZ term folds to the replica Bloch component") {
  const SparsePauliOp h = op_of(2, {{"ZZ", 1.0}});
  const SliceDecomposition slices = select_slice(h, 4.0 / 3.0);
  REQUIRE(slices.kappa_star == 2);
  Rng rng(52);
  const std::vector<ProductState> replicas{sample_haar_product(2, rng)};
  const BetaTable beta = compute_beta(slices, replicas);
  // E_sigma[s1 * <Z>_{mix}] with mix deviation sigma1 * bloch: the average
  // folds to the replica's Bloch-Z on the other qubit
  CHECK(beta[0][2] == doctest::Approx(replicas[0].qubits[1][2]).epsilon(1e-12));
  CHECK(beta[1][2] == doctest::Approx(replicas[0].qubits[0][2]).epsilon(1e-12));
  CHECK(beta[0][0] == 0.0);
}

TEST_CASE("beta equals the polarized-observable expectation up to the constant") {
  // Tr(pol(H_{k,i,p}) x replicas) = ((k-1)^{k-1} / (k-1)!) beta_{i,p}
  Rng rng(53);
  const int n = 3;
  const SparsePauliOp h = random_homogeneous(n, 3, 4, rng);
  const SliceDecomposition slices = select_slice(h, 1.5);
  REQUIRE(slices.kappa_star == 3);
  const std::vector<ProductState> replicas{sample_haar_product(n, rng),
                                           sample_haar_product(n, rng)};
  const BetaTable beta = compute_beta(slices, replicas);

  const int kappa = 3;
  const double constant = std::pow(kappa - 1.0, kappa - 1) / 2.0;  // (k-1)!/... = 2
  for (int i = 0; i < n; ++i) {
    for (int axis = 0; axis < 3; ++axis) {
      // H_{k,i,p} on the same n qubits with identity at i
      SparsePauliOp restricted(n);
      for (const auto& [p, c] : slices.selected().terms()) {
        if (p.letter(i) != static_cast<PauliLetter>(axis + 1)) continue;
        PauliString q = p;
        q.set(i, PauliLetter::I);
        restricted.add(q, c);
      }
      if (restricted.size() == 0) {
        CHECK(beta[i][axis] == doctest::Approx(0.0).epsilon(1e-12));
        continue;
      }
      const SparsePauliOp lifted = polarization(restricted, kappa - 1);
      // product state over (kappa-1) replicas of the n qubits
      ProductState big(n * (kappa - 1));
      for (int s = 0; s < kappa - 1; ++s)
        for (int q = 0; q < n; ++q) big.qubits[s * n + q] = replicas[s].qubits[q];
      CHECK(big.expect(lifted) ==
            doctest::Approx(constant * beta[i][axis]).epsilon(1e-10));
    }
  }
}

TEST_CASE("local optimization normalizes beta rows") {
  CHECK(local_optimize({0.0, 0.0, 2.0}) == Bloch{0.0, 0.0, 1.0});
  const Bloch diag = local_optimize({1.0, 1.0, 0.0});
  CHECK(diag[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(diag[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(local_optimize({0.0, 0.0, 0.0}) == Bloch{0.0, 0.0, 1.0});

  // achieved value ||beta||_2 >= sum |beta| / sqrt(3)
  Rng rng(54);
  for (int trial = 0; trial < 50; ++trial) {
    const std::array<double, 3> row{rng.normal(), rng.normal(), rng.normal()};
    const Bloch direction = local_optimize(row);
    const double achieved =
        row[0] * direction[0] + row[1] * direction[1] + row[2] * direction[2];
    const double l1 = std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]);
    CHECK(achieved >= l1 / std::sqrt(3.0) - 1e-12);
  }
}

TEST_CASE("family polynomial matches direct evaluation of Tr(H rho(t))") {
  Rng rng(55);
  const int n = 3;
  const SparsePauliOp h = random_klocal(n, 3, 8, rng).plus(op_of(3, {{"III", 0.3}}));
  const SliceDecomposition slices = select_slice(h, 1.5);
  const int kappa = slices.kappa_star;

  PolarizationDraw draw;
  for (int s = 0; s < kappa; ++s) draw.replicas.push_back(sample_haar_product(n, rng));
  for (int s = 0; s < kappa; ++s) draw.sigma.push_back(rng.sign());

  const std::vector<double> coeffs = family_polynomial(slices, draw);
  for (int trial = 0; trial < 5; ++trial) {
    const double t = 2.0 * rng.next_double() - 1.0;
    double horner = 0.0;
    for (size_t i = coeffs.size(); i-- > 0;) horner = horner * t + coeffs[i];
    // direct: per-qubit mixed state I/2 + (t / kappa) sum_s sigma_s (psi - I/2)
    double direct = 0.0;
    for (const auto& [p, c] : h.terms()) {
      double prod = c;
      for (int q : p.support()) {
        double component = 0.0;
        for (int s = 0; s < kappa; ++s)
          component +=
              draw.sigma[s] * draw.replicas[s].qubits[q][static_cast<int>(p.letter(q)) - 1];
        prod *= t / kappa * component;
      }
      direct += prod;
    }
    CHECK(horner == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("family polynomial of an identity-only decomposition is constant") {
  SliceDecomposition slices;
  slices.alpha_identity = 0.42;
  slices.k = 0;
  slices.kappa_star = 0;
  const std::vector<double> coeffs = family_polynomial(slices, {});
  REQUIRE(coeffs.size() == 1);
  CHECK(coeffs[0] == 0.42);
}

TEST_CASE("markov brothers bound on the family coefficients") {
  Rng rng(56);
  const int n = 3;
  for (int trial = 0; trial < 20; ++trial) {
    const SparsePauliOp h = random_klocal(n, 3, 6, rng);
    const SliceDecomposition slices = select_slice(h, 1.5);
    PolarizationDraw draw;
    for (int s = 0; s < slices.kappa_star; ++s) {
      draw.replicas.push_back(sample_haar_product(n, rng));
      draw.sigma.push_back(rng.sign());
    }
    const std::vector<double> coeffs = family_polynomial(slices, draw);
    double sup = 0.0;
    for (int g = 0; g <= 2000; ++g) {
      const double t = -1.0 + g / 1000.0;
      double v = 0.0;
      for (size_t i = coeffs.size(); i-- > 1;) v = v * t + coeffs[i];
      sup = std::max(sup, std::abs(v * t));
    }
    const double factor = std::pow(1.0 + std::sqrt(2.0), slices.k);
    for (size_t i = 1; i < coeffs.size(); ++i)
      CHECK(std::abs(coeffs[i]) <= factor * sup + 1e-9);
  }
}

TEST_CASE("sweep_t finds grid optima") {
  CHECK(std::abs(sweep_t({0.0, 1.0})) == doctest::Approx(1.0));
  CHECK(std::abs(sweep_t({0.0, 0.0, -1.0})) == doctest::Approx(1.0));

  Rng rng(57);
  for (int trial = 0; trial < 30; ++trial) {
    const std::vector<double> coeffs{rng.normal(), rng.normal(), rng.normal(),
                                     rng.normal()};
    const double t_star = sweep_t(coeffs);
    auto gain = [&](double t) {
      double v = 0.0;
      for (size_t i = coeffs.size(); i-- > 0;) v = v * t + coeffs[i];
      return std::abs(v - coeffs[0]);
    };
    // closed-form candidates: endpoints and roots of the derivative
    double best = std::max(gain(-1.0), gain(1.0));
    const double a = 3.0 * coeffs[3], b = 2.0 * coeffs[2], c = coeffs[1];
    const double disc = b * b - 4.0 * a * c;
    if (a != 0.0 && disc >= 0.0) {
      for (double sign : {-1.0, 1.0}) {
        const double root = (-b + sign * std::sqrt(disc)) / (2.0 * a);
        if (std::abs(root) <= 1.0) best = std::max(best, gain(root));
      }
    }
    CHECK(gain(t_star) >= best - 1e-6);
  }
}

TEST_CASE("optimizer is exact for a single-qubit Z") {
  const SparsePauliOp h = op_of(1, {{"Z", 1.0}});
  const ExpansionProfile profile = expansion_coefficient(h, 1);
  Rng rng(58);
  for (int run = 0; run < 20; ++run) {
    const OptResult result = optimize(h, profile, rng);
    CHECK(std::abs(result.value) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(result.t_star) == doctest::Approx(1.0));
  }
}

TEST_CASE("optimizer margin beats the theorem constant for ZZ") {
  const SparsePauliOp h = op_of(2, {{"ZZ", 1.0}});
  const ExpansionProfile profile = expansion_coefficient(h, 2);
  Rng rng(59);
  double sum = 0.0;
  const int runs = 2000;
  for (int run = 0; run < runs; ++run) sum += std::abs(optimize(h, profile, rng).margin);
  const double mean = sum / runs;
  CHECK(mean >= norm_constant_expansion(16, 2, 2) * 1.0);
}

TEST_CASE("optimizer margin beats the bounded-degree constant on a chain") {
  // nearest-neighbour ZZ chain: expansion dimension 1, degree 2
  const int n = 5;
  SparsePauliOp h(n);
  Rng coeff_rng(66);
  for (int i = 0; i + 1 < n; ++i) {
    PauliString p(n);
    p.set(i, PauliLetter::Z);
    p.set(i + 1, PauliLetter::Z);
    h.add(p, 0.3 + coeff_rng.next_double());
  }
  const ExpansionProfile profile = expansion_coefficient(h, 1);
  const double bound = norm_constant_expansion(profile.c_e, 1, 2) *
                       h.without_identity().pauli_p_norm(1.0);
  Rng rng(67);
  double sum = 0.0, sum_sq = 0.0;
  const int runs = 2000;
  for (int run = 0; run < runs; ++run) {
    const double margin = std::abs(optimize(h, profile, rng).margin);
    sum += margin;
    sum_sq += margin * margin;
  }
  const double mean = sum / runs;
  const double se = std::sqrt(std::max(0.0, sum_sq / runs - mean * mean) / runs);
  CHECK(mean + 3.0 * se >= bound);
}

TEST_CASE("identity shifts do not change the sampled margins") {
  Rng rng_a(60), rng_b(60);
  const SparsePauliOp h = op_of(2, {{"ZI", 0.8}, {"XX", -0.5}});
  const SparsePauliOp shifted = h.plus(op_of(2, {{"II", 3.0}}));
  const ExpansionProfile profile = expansion_coefficient(h, 2);
  for (int run = 0; run < 50; ++run) {
    const OptResult a = optimize(h, profile, rng_a);
    const OptResult b = optimize(shifted, profile, rng_b);
    CHECK(a.margin == doctest::Approx(b.margin).epsilon(1e-12));
    CHECK(a.t_star == b.t_star);
  }
}

TEST_CASE("optimizer output states are unit product states") {
  Rng rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const SparsePauliOp h = random_klocal(4, 3, 6, rng);
    const ExpansionProfile profile = expansion_coefficient(h, 2);
    const OptResult result = optimize(h, profile, rng);
    for (const Bloch& b : result.state.qubits)
      CHECK(b[0] * b[0] + b[1] * b[1] + b[2] * b[2] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(result.t_star) <= 1.0);
  }
}

TEST_CASE("polarization identity on random homogeneous observables") {
  Rng rng(62);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 1 + trial % 3;
    const int n = 2 + trial % 3;
    const SparsePauliOp o = random_homogeneous(n, std::min(k, n), 4, rng);
    const int kk = std::min(k, n);
    const SparsePauliOp lifted = polarization(o, kk);

    // replica states rho_(s, i)
    std::vector<ProductState> reps;
    for (int s = 0; s < kk; ++s) reps.push_back(sample_haar_product(n, rng));
    ProductState big(n * kk);
    for (int s = 0; s < kk; ++s)
      for (int q = 0; q < n; ++q) big.qubits[s * n + q] = reps[s].qubits[q];

    const double t = 2.0 * rng.next_double() - 1.0;
    const double lhs = std::pow(t, kk) * big.expect(lifted);

    // sign-averaged right-hand side
    double rhs = 0.0;
    for (int mask = 0; mask < (1 << kk); ++mask) {
      double parity = 1.0;
      for (int s = 0; s < kk; ++s)
        if (mask & (1 << s)) parity = -parity;
      double tr = 0.0;
      for (const auto& [p, c] : o.terms()) {
        double prod = c;
        for (int q : p.support()) {
          double comp = 0.0;
          for (int s = 0; s < kk; ++s) {
            const double sigma = (mask & (1 << s)) ? -1.0 : 1.0;
            comp += sigma * reps[s].qubits[q][static_cast<int>(p.letter(q)) - 1];
          }
          prod *= t / kk * comp;
        }
        tr += prod;
      }
      rhs += parity * tr;
    }
    rhs /= (1 << kk);
    double kfact = 1.0;
    for (int i = 2; i <= kk; ++i) kfact *= i;
    rhs *= std::pow(kk, kk) / kfact;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("polarization identity against the dense oracle at n=2, k=2") {
  Rng rng(63);
  const SparsePauliOp o = random_homogeneous(2, 2, 3, rng);
  const SparsePauliOp lifted = polarization(o, 2);
  std::vector<ProductState> reps{sample_haar_product(2, rng),
                                 sample_haar_product(2, rng)};
  ProductState big(4);
  for (int s = 0; s < 2; ++s)
    for (int q = 0; q < 2; ++q) big.qubits[s * 2 + q] = reps[s].qubits[q];
  CHECK(big.expect(lifted) ==
        doctest::Approx(expectation(lifted, statevector(big))).epsilon(1e-10));
}

TEST_CASE("polarization preserves the normalized Frobenius mass") {
  Rng rng(64);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 1 + trial % 3;
    const int n = std::max(2, k);
    const SparsePauliOp o = random_homogeneous(n, k, 5, rng);
    const SparsePauliOp lifted = polarization(o, k);
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    const double direct = std::pow(o.pauli_p_norm(2.0), 2);
    const double polarized = kfact * std::pow(lifted.pauli_p_norm(2.0), 2);
    CHECK(direct == doctest::Approx(polarized).epsilon(1e-9));
  }
}
