#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "qproc/norms.hpp"
#include "qproc/shadows.hpp"
#include "test_helpers.hpp"

using namespace qproc;
using namespace qproc::testing;

TEST_CASE("shadow norm closed form") {
  CHECK(shadow_norm_pauli(ps("II")) == 1.0);
  CHECK(shadow_norm_pauli(ps("XX")) == doctest::Approx(3.0));
  CHECK(shadow_norm_pauli(ps("XYZI")) == doctest::Approx(std::pow(3.0, 1.5)));
  CHECK(shadow_norm_pauli(ps("XYZX")) == doctest::Approx(9.0));
}

TEST_CASE("randomized measurement of |0> under the identity channel") {
  const DenseShadowBackend backend(DenseChannel::identity(1));
  const ProductState zero = ProductState::from_labels({StabLabel::Zp});
  Rng rng(31);
  std::map<StabLabel, int> counts;
  const int draws = 60000;
  for (int i = 0; i < draws; ++i)
    counts[randomized_pauli_measure(backend, zero, rng)[0]]++;
  // basis uniform over {X,Y,Z}; outcome Born-distributed per basis
  const std::map<StabLabel, double> expected{
      {StabLabel::Zp, 1.0 / 3}, {StabLabel::Zm, 0.0},       {StabLabel::Xp, 1.0 / 6},
      {StabLabel::Xm, 1.0 / 6}, {StabLabel::Yp, 1.0 / 6},   {StabLabel::Ym, 1.0 / 6}};
  for (const auto& [label, p] : expected)
    CHECK(std::abs(counts[label] / static_cast<double>(draws) - p) < 0.01);
}

TEST_CASE("single-snapshot estimator is unbiased for the identity channel") {
  const DenseShadowBackend backend(DenseChannel::identity(1));
  const ProductState zero = ProductState::from_labels({StabLabel::Zp});
  const SparsePauliOp z = op_of(1, {{"Z", 1.0}});
  // exact expectation over the enumerable outcome distribution
  CHECK(enumerated_shadow_estimate(zero, z) == doctest::Approx(1.0).epsilon(1e-12));

  // and empirically
  Rng rng(32);
  std::vector<std::vector<StabLabel>> snaps;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i)
    snaps.push_back(randomized_pauli_measure(backend, zero, rng));
  CHECK(shadow_estimate(snaps, z) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("estimator ignores identity and mismatched axes") {
  SparsePauliOp identity(2);
  identity.add(PauliString(2), 1.0);
  const std::vector<std::vector<StabLabel>> snaps{{StabLabel::Zp, StabLabel::Xm}};
  CHECK(shadow_estimate(snaps, identity) == 1.0);

  // X observable on a qubit measured in the Z basis contributes zero
  const SparsePauliOp x1 = op_of(2, {{"XI", 1.0}});
  CHECK(shadow_estimate(snaps, x1) == 0.0);

  CHECK_THROWS(shadow_estimate(std::vector<std::vector<StabLabel>>{}, x1));
}

TEST_CASE("collect_process_shadow snapshot rows for the identity channel") {
  const DenseShadowBackend backend(DenseChannel::identity(2));
  const ProcessShadow empty =
      collect_process_shadow(backend, 0, ShadowMode::Snapshot, {}, 0, 7);
  CHECK(empty.rows.empty());

  const ProcessShadow shadow =
      collect_process_shadow(backend, 3000, ShadowMode::Snapshot, {}, 0, 7);
  CHECK(shadow.rows.size() == 3000);
  // conditioned on in-label Z+ and out measured on the Z axis, the outcome
  // is always Z+
  int seen = 0;
  for (const auto& row : shadow.rows) {
    for (int q = 0; q < 2; ++q) {
      if (row.in[q] != StabLabel::Zp) continue;
      if (label_axis(row.out[q]) != 2) continue;
      CHECK(row.out[q] == StabLabel::Zp);
      seen++;
    }
  }
  CHECK(seen > 100);
}

TEST_CASE("expectation-mode noise follows the 500-shot binomial scale") {
  const DenseShadowBackend backend(DenseChannel::identity(1));
  std::vector<std::pair<std::string, SparsePauliOp>> obs{
      {"Z_1", op_of(1, {{"Z", 1.0}})}};
  const ProcessShadow shadow =
      collect_process_shadow(backend, 4000, ShadowMode::Expectation, obs, 500, 11);
  CHECK(shadow.shots == 500);

  double sq_dev = 0.0;
  int off_axis = 0;
  for (const auto& row : shadow.rows) {
    const double exact = bloch_of(row.in[0])[2];
    if (exact == 0.0) {
      sq_dev += row.y[0] * row.y[0];
      off_axis++;
    } else {
      CHECK(row.y[0] == exact);  // p = 0 or 1, no shot noise
    }
  }
  // std of y around 0 is sqrt(1/500)
  const double sd = std::sqrt(sq_dev / off_axis);
  CHECK(sd == doctest::Approx(std::sqrt(1.0 / 500)).epsilon(0.1));
}

TEST_CASE("snapshot sampling works through mixed-state channels") {
  // amplitude damping: Kraus pair, output mixed for gamma < 1
  const double gamma = 0.5;
  DenseMat k0 = DenseMat::Zero(2, 2), k1 = DenseMat::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  const DenseShadowBackend backend(DenseChannel::kraus(1, {k0, k1}));

  const ProductState one = ProductState::from_labels({StabLabel::Zm});
  Rng rng(55);
  int z_plus = 0, z_total = 0;
  for (int i = 0; i < 30000; ++i) {
    const auto labels = randomized_pauli_measure(backend, one, rng);
    if (label_axis(labels[0]) == 2) {
      z_total++;
      z_plus += labels[0] == StabLabel::Zp;
    }
  }
  // output state diag(gamma, 1-gamma); Z+ frequency should be gamma
  CHECK(z_total > 5000);
  CHECK(std::abs(z_plus / static_cast<double>(z_total) - gamma) < 0.02);
}

TEST_CASE("datasets replay byte-identically from the seed") {
  const DenseShadowBackend backend(DenseChannel::identity(2));
  const auto write_once = [&](const char* path) {
    const ProcessShadow shadow =
        collect_process_shadow(backend, 50, ShadowMode::Snapshot, {}, 0, 321);
    write_process_shadow(shadow, path, nlohmann::json{{"version", "test"}});
  };
  write_once("replay_a.jsonl");
  write_once("replay_b.jsonl");
  std::ifstream a("replay_a.jsonl"), b("replay_b.jsonl");
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  CHECK(sa == sb);
  CHECK(!sa.empty());
  std::remove("replay_a.jsonl");
  std::remove("replay_b.jsonl");
}

TEST_CASE("dataset files round trip") {
  const DenseShadowBackend backend(DenseChannel::identity(2));
  std::vector<std::pair<std::string, SparsePauliOp>> obs{
      {"Z_1", op_of(2, {{"ZI", 1.0}})}, {"Z_2", op_of(2, {{"IZ", 1.0}})}};
  ProcessShadow shadow =
      collect_process_shadow(backend, 20, ShadowMode::Expectation, obs, 500, 5);
  shadow.channel_desc = nlohmann::json{{"type", "identity"}, {"n", 2}};
  write_process_shadow(shadow, "roundtrip.jsonl", {});
  const ProcessShadow back = read_process_shadow("roundtrip.jsonl");
  CHECK(back.n == shadow.n);
  CHECK(back.mode == shadow.mode);
  CHECK(back.shots == shadow.shots);
  CHECK(back.observable_ids == shadow.observable_ids);
  REQUIRE(back.rows.size() == shadow.rows.size());
  for (size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(back.rows[i].in == shadow.rows[i].in);
    CHECK(back.rows[i].y == shadow.rows[i].y);
  }
  std::remove("roundtrip.jsonl");
}

TEST_CASE("estimator error stays small for bounded-degree observables at n=8") {
  const int n = 8;
  Rng rng(67);
  const ProductState input = sample_stab_product(n, rng);
  const DenseShadowBackend backend(DenseChannel::identity(n));

  std::vector<std::vector<StabLabel>> snaps;
  Rng sample_rng(68);
  for (int i = 0; i < 10000; ++i)
    snaps.push_back(randomized_pauli_measure(backend, input, sample_rng));

  double max_err = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    SparsePauliOp o(n);
    for (int i = 0; i + 1 < n; i += 2) {
      PauliString p(n);
      p.set(i, static_cast<PauliLetter>(1 + rng.below(3)));
      p.set(i + 1, static_cast<PauliLetter>(1 + rng.below(3)));
      o.add(p, 2.0 * rng.next_double() - 1.0);
    }
    const SparsePauliOp scaled = o.scaled(1.0 / spectral_norm(o));
    const double err =
        std::abs(shadow_estimate(snaps, scaled) - input.expect(scaled));
    max_err = std::max(max_err, err);
  }
  CHECK(max_err < 0.15);
}

TEST_CASE("fermion backend evaluates only single-site Z observables") {
  const ChainModel model = ChainModel::homogeneous(ChainKind::XY, 4, 0.5);
  const FermionShadowBackend backend(model, 2.0);
  CHECK(!backend.can_sample());
  CHECK(backend.can_expect());
  const ProductState s = ProductState::from_labels(
      {StabLabel::Zp, StabLabel::Xm, StabLabel::Yp, StabLabel::Zm});
  PauliString z2(4);
  z2.set(1, PauliLetter::Z);
  const auto values = backend.expect_output(s, {z2});
  CHECK(values[0] == doctest::Approx(expectation_z_t(model, 1, 2.0, s)).epsilon(1e-10));

  Rng rng(1);
  CHECK_THROWS(randomized_pauli_measure(backend, s, rng));
  CHECK_THROWS(backend.expect_output(s, {ps("XIII")}));
}
