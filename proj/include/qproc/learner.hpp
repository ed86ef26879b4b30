#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qproc/pauli.hpp"
#include "qproc/shadows.hpp"
#include "qproc/states.hpp"

namespace qproc {

struct TrainRow {
  ProductState state;
  double y = 0.0;
};

enum class LearnerMode {
  ObservableSetting1,  // split + sample-maximum clip + eta grid
  ObservableSetting2,  // full data, small-beta filter only, no clip
  ProcessSetting1,
  ProcessSetting2,
  Lasso,
};

struct LearnerConfig {
  LearnerMode mode = LearnerMode::ProcessSetting1;
  double eps = 0.5;
  double eps_prime = 0.5;
  double delta = 0.01;
  int k_override = 0;      // > 0 forces the truncation weight
  bool geometric = false;  // restrict features to contiguous spans
  uint64_t seed = 0;
  int folds = 2;
  std::vector<int> k_grid{1, 2, 3, 4};
  std::vector<double> a_grid;  // empty -> 2^-15 .. 2^-3

  int truncation_weight(double scale) const;  // ceil(log_1.5(scale / eps))
  nlohmann::json to_json() const;
};

struct FilterStats {
  std::vector<PauliString> paulis;
  std::vector<double> xhat;
  std::vector<double> betahat;
};

// Empirical x_P and beta_P over the rows, for every |P| <= k.
FilterStats estimate_stats(std::span<const TrainRow> rows, int k, bool geometric = false);
// Same x_P but beta_P = (1/3)^|P| analytically (stab_1 product inputs).
FilterStats estimate_stats_analytic_beta(std::span<const TrainRow> rows, int k,
                                         bool geometric = false);

// Three-branch rule: drop small beta, drop small influence, else x/beta.
SparsePauliOp filter_coefficients(const FilterStats& stats, int n, double eta,
                                  double eps_tilde);
// Two-branch rule used by setting 2: drop small beta only.
SparsePauliOp filter_small_beta(const FilterStats& stats, int n, double eps_tilde);

struct LearnedObservable {
  SparsePauliOp coefficients{1};
  double theta_hat = std::numeric_limits<double>::infinity();
  nlohmann::json config;

  bool clipping() const { return std::isfinite(theta_hat); }
  double predict(const ProductState& state) const;
  double predict(const PauliExpectationProvider& provider) const;

  nlohmann::json to_json() const;
  static LearnedObservable from_json(const nlohmann::json& j);
};

LearnedObservable learn_observable(std::span<const TrainRow> rows,
                                   const LearnerConfig& config);

// Process learner: builds labels from the shadow (snapshot rows through the
// inverse-channel estimator, expectation rows read directly) and filters
// with analytic beta. `observable_id` selects the y column in expectation
// mode and may be empty in snapshot mode.
LearnedObservable learn_process(const ProcessShadow& shadow, const SparsePauliOp& obs,
                                const std::string& observable_id,
                                const LearnerConfig& config);

std::vector<TrainRow> rows_from_shadow(const ProcessShadow& shadow,
                                       const SparsePauliOp& obs,
                                       const std::string& observable_id);

// Feature matrix Tr(P rho_l) in compressed columns, built once per (states,
// k) and reusable across label vectors (one regression per observable).
class LassoFeatures {
 public:
  LassoFeatures(std::span<const ProductState> states, int n, int k, bool geometric);

  int num_rows() const { return num_rows_; }
  size_t num_features() const { return paulis_.size(); }

  // min (1/2N) sum_l (y_l - sum_P a_P Tr(P rho_l))^2 + a sum_P |a_P| by
  // cyclic coordinate descent with soft thresholding.
  SparsePauliOp fit(std::span<const double> y, double a, int max_sweeps = 10000) const;

  // Warm-started path over penalties (descending); returns held-out RMSE
  // per penalty, training on rows with row_used set.
  std::vector<double> path_rmse(std::span<const double> y,
                                const std::vector<uint8_t>& row_used,
                                std::span<const double> a_desc) const;

  double objective(std::span<const double> y, const SparsePauliOp& model,
                   double a) const;

 private:
  void descend(std::span<const double> y, const std::vector<uint8_t>& row_used,
               double a, std::vector<double>& alpha, std::vector<double>& residual,
               int max_sweeps) const;

  int n_;
  int num_rows_;
  std::vector<PauliString> paulis_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
};

SparsePauliOp lasso_fit(std::span<const TrainRow> rows, int n, int k, double a,
                        bool geometric = true);

struct LassoSelection {
  int k = 1;
  double a = 0.0;
  double cv_rmse = 0.0;
  LearnedObservable model;
};

LassoSelection cross_validate(std::span<const TrainRow> rows, int n,
                              const LearnerConfig& config);

std::vector<double> default_lasso_grid();

}  // namespace qproc
