#pragma once

#include <string>
#include <vector>

#include "qproc/fermion.hpp"
#include "qproc/learner.hpp"
#include "qproc/shadows.hpp"

namespace qproc {

// Expectation-mode dataset for e^{-itH} on a spin chain with observables
// Z_1..Z_n (ids "Z_1".."Z_n", 1-based), 500-shot noise by default.
ProcessShadow gen_chain_dataset(const ChainModel& model, double t, int num_rows,
                                int shots, uint64_t seed);

// One LASSO model per site for the Heisenberg-evolved Z_i; hyperparameters
// (k, a) are chosen once by cross-validation on the middle site and shared,
// then each site is fit at the chosen pair.
struct ZModelSet {
  int k = 1;
  double a = 0.0;
  std::vector<SparsePauliOp> per_site;

  std::vector<double> predict(const ProductState& state) const;
  std::vector<double> predict(const PauliExpectationProvider& provider) const;
};

ZModelSet train_z_models(const ProcessShadow& shadow, const LearnerConfig& config);

// RMSE of all-site Z predictions over fresh Haar product states against the
// exact free-fermion values.
double eval_rmse_product(const ZModelSet& models, const ChainModel& model, double t,
                         int num_states, uint64_t seed);

ProductState domain_wall_state(int n);
// GHZ-like left half, clockwise-rotating product right half.
GhzProductProvider entangled_test_state(int n);
DenseVec entangled_test_statevector(int n);  // n <= 12, independent dense build

struct FigPoint {
  double x = 0.0;
  double rmse = 0.0;
};

struct StructuredRow {
  int site = 0;
  double t = 0.0;
  double predicted = 0.0;
  double exact = 0.0;
};

std::vector<FigPoint> fig2b_series(const ChainModel& model, double t,
                                   const std::vector<int>& train_sizes, int shots,
                                   uint64_t seed, const LearnerConfig& config);
std::vector<FigPoint> fig2c_series(const ChainModel& model,
                                   const std::vector<double>& times, int num_rows,
                                   int shots, uint64_t seed,
                                   const LearnerConfig& config);
std::vector<FigPoint> fig2d_series(ChainKind kind, const std::vector<int>& sizes,
                                   double field, double t, int num_rows, int shots,
                                   uint64_t seed, const LearnerConfig& config);

// Domain-wall predictions vs exact fermion values across a time grid.
std::vector<StructuredRow> fig3_rows(const ChainModel& model,
                                     const std::vector<double>& times, int num_rows,
                                     int shots, uint64_t seed,
                                     const LearnerConfig& config);

// Entangled-state predictions; exact values come from the dense oracle when
// n <= 12, else from the fermion expansion evaluated on the parity-rule
// provider.
std::vector<StructuredRow> fig4_rows(const ChainModel& model,
                                     const std::vector<double>& times, int num_rows,
                                     int shots, uint64_t seed,
                                     const LearnerConfig& config);

}  // namespace qproc
