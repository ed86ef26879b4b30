#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qproc/dense.hpp"
#include "qproc/fermion.hpp"
#include "qproc/pauli.hpp"
#include "qproc/rng.hpp"
#include "qproc/states.hpp"

namespace qproc {

double shadow_norm_pauli(const PauliString& p);

// Classical shadow of a fixed state: outcomes of randomized Pauli
// measurements, one stab_1 label per qubit per snapshot.
struct StateShadow {
  int n = 0;
  std::vector<std::vector<StabLabel>> snapshots;
};

enum class ShadowMode { Snapshot, Expectation };

struct ProcessShadowRow {
  std::vector<StabLabel> in;
  std::vector<StabLabel> out;  // snapshot mode
  std::vector<double> y;       // expectation mode, aligned with observable_ids
};

// Dataset S_N(E): random stab_1 product inputs with either measurement
// outcomes (snapshot) or noisy expectation values (expectation).
struct ProcessShadow {
  int n = 0;
  ShadowMode mode = ShadowMode::Snapshot;
  int shots = 0;
  uint64_t seed = 0;
  nlohmann::json channel_desc;
  std::vector<std::string> observable_ids;
  std::vector<ProcessShadowRow> rows;

  int index_of(const std::string& observable_id) const;
};

// A channel the shadow collector can drive. Sampling backends produce Born
// samples of E(rho_in); expectation backends produce exact per-Pauli-term
// output expectations.
class ShadowBackend {
 public:
  virtual ~ShadowBackend() = default;
  virtual int n() const = 0;
  virtual bool can_sample() const { return false; }
  virtual bool can_expect() const { return false; }
  virtual std::vector<StabLabel> sample_output(const ProductState& in,
                                               const std::vector<int>& bases,
                                               Rng& rng) const;
  virtual std::vector<double> expect_output(const ProductState& in,
                                            const std::vector<PauliString>& obs) const;
};

class DenseShadowBackend final : public ShadowBackend {
 public:
  explicit DenseShadowBackend(DenseChannel channel) : channel_(std::move(channel)) {}
  int n() const override { return channel_.n(); }
  bool can_sample() const override { return true; }
  bool can_expect() const override { return true; }
  std::vector<StabLabel> sample_output(const ProductState& in,
                                       const std::vector<int>& bases,
                                       Rng& rng) const override;
  std::vector<double> expect_output(const ProductState& in,
                                    const std::vector<PauliString>& obs) const override;

 private:
  DenseChannel channel_;
};

// e^{-itH} for a free-fermion chain; expectation mode only, observables must
// be single-site Z strings (the only ones the figures need).
class FermionShadowBackend final : public ShadowBackend {
 public:
  FermionShadowBackend(const ChainModel& model, double t);
  int n() const override { return model_.n; }
  bool can_expect() const override { return true; }
  std::vector<double> expect_output(const ProductState& in,
                                    const std::vector<PauliString>& obs) const override;
  const Eigen::MatrixXd& rotation() const { return rotation_; }

 private:
  ChainModel model_;
  Eigen::MatrixXd rotation_;
};

// One randomized experiment: uniform random bases, Born-sampled outcome.
std::vector<StabLabel> randomized_pauli_measure(const ShadowBackend& backend,
                                                const ProductState& in, Rng& rng);

// Collect N rows. Snapshot mode samples measurement outcomes; expectation
// mode stores y = sum_Q a_Q (mean of `shots` +-1 draws with mean <Q>) per
// observable, the per-term binomial noise model.
ProcessShadow collect_process_shadow(
    const ShadowBackend& backend, int num_rows, ShadowMode mode,
    const std::vector<std::pair<std::string, SparsePauliOp>>& observables,
    int shots, uint64_t seed);

double noisy_mean_pm1(double mean, int shots, Rng& rng);

// (1/N) sum_l sum_Q a_Q prod_{i in dom(Q)} 3 <s_li| Q_i |s_li>.
double shadow_estimate(const std::vector<std::vector<StabLabel>>& snapshots,
                       const SparsePauliOp& op);
double shadow_estimate(const StateShadow& shadow, const SparsePauliOp& op);
double shadow_estimate(const ProcessShadow& shadow, const SparsePauliOp& op);

void write_process_shadow(const ProcessShadow& shadow, const std::string& path,
                          const nlohmann::json& provenance);
ProcessShadow read_process_shadow(const std::string& path);

}  // namespace qproc
