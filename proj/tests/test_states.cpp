#include "doctest.h"

#include <array>
#include <cmath>

#include "qproc/dense.hpp"
#include "qproc/experiments.hpp"
#include "qproc/states.hpp"
#include "test_helpers.hpp"

using namespace qproc;
using namespace qproc::testing;

TEST_CASE("label round trips and Bloch vectors") {
  for (StabLabel l : all_labels()) {
    CHECK(label_from_str(label_str(l)) == l);
    const Bloch b = bloch_of(l);
    CHECK(b[0] * b[0] + b[1] * b[1] + b[2] * b[2] == doctest::Approx(1.0));
    CHECK(b[label_axis(l)] == label_sign(l));
  }
  CHECK_THROWS(label_from_str("Q+"));
}

TEST_CASE("stab sampling is uniform and replayable") {
  Rng rng(42);
  std::array<int, 6> counts{};
  const int draws = 60000;
  for (int i = 0; i < draws; ++i)
    counts[static_cast<int>(sample_stab_labels(1, rng)[0])]++;
  for (int c : counts)
    CHECK(std::abs(c / static_cast<double>(draws) - 1.0 / 6) < 0.01);

  Rng a(123), b(123);
  for (int i = 0; i < 50; ++i)
    CHECK(sample_stab_labels(8, a) == sample_stab_labels(8, b));
}

TEST_CASE("stab ensemble has zero mean Z") {
  Rng rng(43);
  double sum = 0.0;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i)
    sum += sample_stab_product(1, rng).qubits[0][2];
  // mean of +-1/0 draws, sd ~ sqrt(1/3)/sqrt(N)
  CHECK(std::abs(sum / draws) < 3.0 * std::sqrt(1.0 / 3.0 / draws));
}

TEST_CASE("haar qubit sampling moments") {
  Rng rng(44);
  const int draws = 100000;
  double mean_z = 0.0, mean_z2 = 0.0;
  for (int i = 0; i < draws; ++i) {
    const Bloch b = sample_haar_qubit(rng);
    CHECK(std::abs(b[0] * b[0] + b[1] * b[1] + b[2] * b[2] - 1.0) < 1e-12);
    mean_z += b[2];
    mean_z2 += b[2] * b[2];
  }
  mean_z /= draws;
  mean_z2 /= draws;
  CHECK(std::abs(mean_z) < 3.0 / std::sqrt(3.0 * draws));
  CHECK(mean_z2 == doctest::Approx(1.0 / 3.0).epsilon(0.03));
}

TEST_CASE("GHZ provider matches the dense entangled state") {
  for (int n : {4, 6, 10}) {
    const GhzProductProvider provider = entangled_test_state(n);
    const DenseVec psi = entangled_test_statevector(n);
    CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
    Rng rng(100 + n);
    for (int trial = 0; trial < 200; ++trial) {
      const SparsePauliOp o = random_klocal(n, std::min(4, n), 3, rng);
      CHECK(provider.expect(o) == doctest::Approx(expectation(o, psi)).epsilon(1e-10));
    }
    // full X/Y words across the GHZ block exercise the off-diagonal branch
    PauliString allx(n);
    for (int i = 0; i < n / 2; ++i) allx.set(i, PauliLetter::X);
    CHECK(provider.expect(allx) ==
          doctest::Approx(pauli_expect(allx, psi).real()).epsilon(1e-10));
    PauliString xy(n);
    xy.set(0, PauliLetter::Y);
    xy.set(1, PauliLetter::Y);
    for (int i = 2; i < n / 2; ++i) xy.set(i, PauliLetter::X);
    CHECK(provider.expect(xy) ==
          doctest::Approx(pauli_expect(xy, psi).real()).epsilon(1e-10));
  }
}

TEST_CASE("domain wall state is a Z step profile") {
  const ProductState wall = domain_wall_state(6);
  for (int i = 0; i < 6; ++i) {
    PauliString z(6);
    z.set(i, PauliLetter::Z);
    CHECK(wall.expect(z) == (i < 3 ? -1.0 : 1.0));
  }
}
