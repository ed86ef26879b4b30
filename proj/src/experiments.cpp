#include "qproc/experiments.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "qproc/dense.hpp"
#include "qproc/parallel.hpp"

namespace qproc {

ProcessShadow gen_chain_dataset(const ChainModel& model, double t, int num_rows,
                                int shots, uint64_t seed) {
  const FermionShadowBackend backend(model, t);
  std::vector<std::pair<std::string, SparsePauliOp>> observables;
  observables.reserve(model.n);
  for (int i = 0; i < model.n; ++i) {
    PauliString z(model.n);
    z.set(i, PauliLetter::Z);
    SparsePauliOp op(model.n);
    op.add(z, 1.0);
    observables.emplace_back("Z_" + std::to_string(i + 1), std::move(op));
  }
  ProcessShadow shadow = collect_process_shadow(backend, num_rows,
                                                ShadowMode::Expectation, observables,
                                                shots, seed);
  shadow.channel_desc = nlohmann::json{
      {"type", "chain"}, {"model", model.to_json()}, {"t", t}};
  return shadow;
}

std::vector<double> ZModelSet::predict(const ProductState& state) const {
  std::vector<double> out(per_site.size());
  for (size_t i = 0; i < per_site.size(); ++i) out[i] = state.expect(per_site[i]);
  return out;
}

std::vector<double> ZModelSet::predict(const PauliExpectationProvider& provider) const {
  std::vector<double> out(per_site.size());
  for (size_t i = 0; i < per_site.size(); ++i) out[i] = provider.expect(per_site[i]);
  return out;
}

ZModelSet train_z_models(const ProcessShadow& shadow, const LearnerConfig& config) {
  if (shadow.mode != ShadowMode::Expectation)
    throw std::invalid_argument("train_z_models needs an expectation-mode dataset");
  const int n = shadow.n;
  const size_t num_rows = shadow.rows.size();

  std::vector<ProductState> states;
  states.reserve(num_rows);
  for (const auto& r : shadow.rows) states.push_back(ProductState::from_labels(r.in));

  std::vector<std::vector<double>> labels(n, std::vector<double>(num_rows));
  for (int i = 0; i < n; ++i) {
    const int col = shadow.index_of("Z_" + std::to_string(i + 1));
    for (size_t r = 0; r < num_rows; ++r) labels[i][r] = shadow.rows[r].y[col];
  }

  // hyperparameter selection on the middle site, shared across sites
  const int pilot = n / 2;
  std::vector<TrainRow> pilot_rows(num_rows);
  for (size_t r = 0; r < num_rows; ++r)
    pilot_rows[r] = {states[r], labels[pilot][r]};
  LearnerConfig cv_config = config;
  cv_config.mode = LearnerMode::Lasso;
  cv_config.geometric = true;
  const LassoSelection selection = cross_validate(pilot_rows, n, cv_config);

  ZModelSet models;
  models.k = selection.k;
  models.a = selection.a;
  models.per_site.assign(n, SparsePauliOp(n));
  const LassoFeatures features(states, n, selection.k, /*geometric=*/true);
  parallel_for(n, [&](int i) {
    models.per_site[i] = features.fit(labels[i], selection.a);
  });
  return models;
}

double eval_rmse_product(const ZModelSet& models, const ChainModel& model, double t,
                         int num_states, uint64_t seed) {
  const Eigen::MatrixXd rotation = MajoranaRotation(model).at(t);
  double sq = 0.0;
  int count = 0;
  for (int s = 0; s < num_states; ++s) {
    Rng rng = Rng::substream(seed, 0xe7a1u ^ static_cast<uint64_t>(s));
    const ProductState state = sample_haar_product(model.n, rng);
    const std::vector<double> exact = expectation_z_all(rotation, state);
    const std::vector<double> predicted = models.predict(state);
    for (int i = 0; i < model.n; ++i) {
      const double d = predicted[i] - exact[i];
      sq += d * d;
      count++;
    }
  }
  return std::sqrt(sq / count);
}

ProductState domain_wall_state(int n) {
  ProductState s(n);
  for (int i = 0; i < n; ++i)
    s.qubits[i] = {0.0, 0.0, i < n / 2 ? -1.0 : 1.0};
  return s;
}

namespace {

ProductState rotating_half(int m) {
  // spins rotating clockwise in the XZ plane: ->, down, <-, up, ...
  static const Bloch cycle[4] = {
      {1.0, 0.0, 0.0}, {0.0, 0.0, -1.0}, {-1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
  ProductState s(m);
  for (int i = 0; i < m; ++i) s.qubits[i] = cycle[i % 4];
  return s;
}

}  // namespace

GhzProductProvider entangled_test_state(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("need even n >= 2");
  const int m = n / 2;
  // even number of -> over {left,right}^m equals (|0..0> + (-1)^m |1..1>)/sqrt2
  const int sign = m % 2 == 0 ? 1 : -1;
  return GhzProductProvider(m, sign, rotating_half(m));
}

DenseVec entangled_test_statevector(int n) {
  check_dense_n(n);
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("need even n >= 2");
  const int m = n / 2;

  // left half built directly as the even-parity superposition of X-basis
  // strings, -> = |+>
  const uint64_t left_dim = uint64_t{1} << m;
  DenseVec left = DenseVec::Zero(left_dim);
  const double amp = 1.0 / std::sqrt(std::ldexp(1.0, m - 1)) /
                     std::sqrt(std::ldexp(1.0, m));
  for (uint64_t pattern = 0; pattern < left_dim; ++pattern) {
    // bit set = "->" on that site; keep even number of "->"
    if (std::popcount(pattern) % 2 != 0) continue;
    for (uint64_t x = 0; x < left_dim; ++x) {
      // |-> contributes (-1)^{x_i}
      const int minus_signs = std::popcount(x & ~pattern);
      left[x] += (minus_signs % 2 == 0 ? amp : -amp);
    }
  }

  const DenseVec right = statevector(rotating_half(m));
  DenseVec full(left_dim * right.size());
  for (Eigen::Index rI = 0; rI < right.size(); ++rI)
    for (uint64_t l = 0; l < left_dim; ++l)
      full[static_cast<Eigen::Index>(rI << m) + l] = left[l] * right[rI];
  return full;
}

std::vector<FigPoint> fig2b_series(const ChainModel& model, double t,
                                   const std::vector<int>& train_sizes, int shots,
                                   uint64_t seed, const LearnerConfig& config) {
  std::vector<FigPoint> out;
  for (size_t i = 0; i < train_sizes.size(); ++i) {
    const ProcessShadow shadow =
        gen_chain_dataset(model, t, train_sizes[i], shots, seed + i);
    const ZModelSet models = train_z_models(shadow, config);
    out.push_back({static_cast<double>(train_sizes[i]),
                   eval_rmse_product(models, model, t, 200, seed ^ 0x77)});
  }
  return out;
}

std::vector<FigPoint> fig2c_series(const ChainModel& model,
                                   const std::vector<double>& times, int num_rows,
                                   int shots, uint64_t seed,
                                   const LearnerConfig& config) {
  std::vector<FigPoint> out;
  for (size_t i = 0; i < times.size(); ++i) {
    const ProcessShadow shadow =
        gen_chain_dataset(model, times[i], num_rows, shots, seed + i);
    const ZModelSet models = train_z_models(shadow, config);
    out.push_back({times[i],
                   eval_rmse_product(models, model, times[i], 200, seed ^ 0x77)});
  }
  return out;
}

std::vector<FigPoint> fig2d_series(ChainKind kind, const std::vector<int>& sizes,
                                   double field, double t, int num_rows, int shots,
                                   uint64_t seed, const LearnerConfig& config) {
  std::vector<FigPoint> out;
  for (size_t i = 0; i < sizes.size(); ++i) {
    const ChainModel model = ChainModel::homogeneous(kind, sizes[i], field);
    const ProcessShadow shadow =
        gen_chain_dataset(model, t, num_rows, shots, seed + i);
    const ZModelSet models = train_z_models(shadow, config);
    out.push_back({static_cast<double>(sizes[i]),
                   eval_rmse_product(models, model, t, 200, seed ^ 0x77)});
  }
  return out;
}

std::vector<StructuredRow> fig3_rows(const ChainModel& model,
                                     const std::vector<double>& times, int num_rows,
                                     int shots, uint64_t seed,
                                     const LearnerConfig& config) {
  const ProductState wall = domain_wall_state(model.n);
  std::vector<StructuredRow> out;
  for (size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    const ProcessShadow shadow = gen_chain_dataset(model, t, num_rows, shots, seed + ti);
    const ZModelSet models = train_z_models(shadow, config);
    const std::vector<double> predicted = models.predict(wall);
    const std::vector<double> exact =
        expectation_z_all(MajoranaRotation(model).at(t), wall);
    for (int i = 0; i < model.n; ++i)
      out.push_back({i + 1, t, predicted[i], exact[i]});
  }
  return out;
}

std::vector<StructuredRow> fig4_rows(const ChainModel& model,
                                     const std::vector<double>& times, int num_rows,
                                     int shots, uint64_t seed,
                                     const LearnerConfig& config) {
  const GhzProductProvider state = entangled_test_state(model.n);
  const bool dense = model.n <= kMaxDenseQubits;

  std::vector<StructuredRow> out;
  for (size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    const ProcessShadow shadow = gen_chain_dataset(model, t, num_rows, shots, seed + ti);
    const ZModelSet models = train_z_models(shadow, config);
    const std::vector<double> predicted = models.predict(state);

    std::vector<double> exact(model.n);
    if (dense) {
      const DenseChannel channel = DenseChannel::hamiltonian(model.hamiltonian(), t);
      const DenseVec evolved = channel.apply_pure(entangled_test_statevector(model.n));
      for (int i = 0; i < model.n; ++i) {
        PauliString z(model.n);
        z.set(i, PauliLetter::Z);
        exact[i] = pauli_expect(z, evolved).real();
      }
    } else {
      const Eigen::MatrixXd rotation = MajoranaRotation(model).at(t);
      parallel_for(model.n, [&](int i) {
        exact[i] = state.expect(heisenberg_z(rotation, i));
      });
    }
    for (int i = 0; i < model.n; ++i)
      out.push_back({i + 1, t, predicted[i], exact[i]});
  }
  return out;
}

}  // namespace qproc
