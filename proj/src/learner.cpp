#include "qproc/learner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "qproc/norms.hpp"
#include "qproc/rng.hpp"

namespace qproc {

namespace {

constexpr double kLassoTol = 1e-7;
constexpr int kLassoMaxSweeps = 10000;

double checked_eps(double eps) {
  if (eps <= 0.0 || eps >= 1.0) throw std::invalid_argument("need 0 < eps < 1");
  return eps;
}

}  // namespace

int LearnerConfig::truncation_weight(double scale) const {
  if (k_override > 0) return k_override;
  return static_cast<int>(std::ceil(std::log(scale / checked_eps(eps)) / std::log(1.5)));
}

nlohmann::json LearnerConfig::to_json() const {
  nlohmann::json j;
  const char* names[] = {"observable-setting1", "observable-setting2", "process-setting1",
                         "process-setting2", "lasso"};
  j["mode"] = names[static_cast<int>(mode)];
  j["eps"] = eps;
  j["eps_prime"] = eps_prime;
  j["delta"] = delta;
  if (k_override > 0) j["k"] = k_override;
  j["geometric"] = geometric;
  j["seed"] = seed;
  if (mode == LearnerMode::Lasso) {
    j["folds"] = folds;
    j["k_grid"] = k_grid;
    j["a_grid"] = a_grid.empty() ? default_lasso_grid() : a_grid;
  }
  return j;
}

namespace {

FilterStats stats_impl(std::span<const TrainRow> rows, int k, bool geometric,
                       bool analytic_beta) {
  if (rows.empty()) throw std::invalid_argument("empty training data");
  const int n = rows[0].state.n();
  FilterStats stats;
  stats.paulis = enumerate_paulis(n, k, geometric);
  stats.xhat.assign(stats.paulis.size(), 0.0);
  stats.betahat.assign(stats.paulis.size(), 0.0);

  const double inv_n = 1.0 / static_cast<double>(rows.size());
  for (size_t f = 0; f < stats.paulis.size(); ++f) {
    const PauliString& p = stats.paulis[f];
    double x = 0.0, b = 0.0;
    for (const TrainRow& row : rows) {
      const double t = row.state.expect(p);
      if (t == 0.0) continue;
      x += t * row.y;
      b += t * t;
    }
    stats.xhat[f] = x * inv_n;
    stats.betahat[f] = analytic_beta ? std::pow(3.0, -p.weight()) : b * inv_n;
  }
  return stats;
}

}  // namespace

FilterStats estimate_stats(std::span<const TrainRow> rows, int k, bool geometric) {
  return stats_impl(rows, k, geometric, false);
}

FilterStats estimate_stats_analytic_beta(std::span<const TrainRow> rows, int k,
                                         bool geometric) {
  return stats_impl(rows, k, geometric, true);
}

SparsePauliOp filter_coefficients(const FilterStats& stats, int n, double eta,
                                  double eps_tilde) {
  if (eta <= 0.0 || eps_tilde <= 0.0)
    throw std::invalid_argument("filter needs eta > 0 and eps_tilde > 0");
  SparsePauliOp model(n);
  const double influence_cut = 2.0 * eta * std::sqrt(eps_tilde);
  for (size_t f = 0; f < stats.paulis.size(); ++f) {
    const double beta = stats.betahat[f];
    if (beta <= 2.0 * eps_tilde) continue;
    const double x = stats.xhat[f];
    if (std::abs(x) / std::sqrt(beta) <= influence_cut) continue;
    model.add(stats.paulis[f], x / beta);
  }
  return model;
}

SparsePauliOp filter_small_beta(const FilterStats& stats, int n, double eps_tilde) {
  SparsePauliOp model(n);
  for (size_t f = 0; f < stats.paulis.size(); ++f) {
    if (stats.betahat[f] <= 2.0 * eps_tilde) continue;
    model.add(stats.paulis[f], stats.xhat[f] / stats.betahat[f]);
  }
  return model;
}

double LearnedObservable::predict(const ProductState& state) const {
  double v = state.expect(coefficients);
  if (clipping()) v = std::clamp(v, -theta_hat, theta_hat);
  return v;
}

double LearnedObservable::predict(const PauliExpectationProvider& provider) const {
  double v = provider.expect(coefficients);
  if (clipping()) v = std::clamp(v, -theta_hat, theta_hat);
  return v;
}

nlohmann::json LearnedObservable::to_json() const {
  nlohmann::json j;
  j["coefficients"] = coefficients.to_json();
  j["n"] = coefficients.n();
  if (clipping()) j["theta_hat"] = theta_hat;
  else j["theta_hat"] = "inf";
  j["config"] = config;
  return j;
}

LearnedObservable LearnedObservable::from_json(const nlohmann::json& j) {
  LearnedObservable model;
  const int n = j.at("n").get<int>();
  model.coefficients = SparsePauliOp(n);
  for (const auto& item : j.at("coefficients"))
    model.coefficients.add(PauliString::from_string(item.at("p").get<std::string>()),
                           item.at("c").get<double>());
  const auto& theta = j.at("theta_hat");
  model.theta_hat = theta.is_string() ? std::numeric_limits<double>::infinity()
                                      : theta.get<double>();
  if (j.contains("config")) model.config = j["config"];
  return model;
}

namespace {

double validation_mse(const LearnedObservable& model, std::span<const TrainRow> rows) {
  double sum = 0.0;
  for (const TrainRow& row : rows) {
    const double d = model.predict(row.state) - row.y;
    sum += d * d;
  }
  return sum / static_cast<double>(rows.size());
}

LearnedObservable observable_setting1(std::span<const TrainRow> rows,
                                      const LearnerConfig& config) {
  const int n = rows[0].state.n();
  const size_t n_tr = rows.size() * 4 / 5;
  const auto train = rows.subspan(0, n_tr);
  const auto val = rows.subspan(n_tr);

  double theta = 0.0;
  for (const TrainRow& row : train) theta = std::max(theta, std::abs(row.y));

  LearnedObservable model;
  model.config = config.to_json();
  model.theta_hat = theta;
  model.coefficients = SparsePauliOp(n);
  if (theta == 0.0) return model;  // degenerate all-zero labels

  const int k = config.truncation_weight(1.0);
  const double ck = norm_constant_klocal(k);
  const double eps_tilde = std::pow(config.eps_prime / 12.0, k + 1) *
                           std::pow(ck / 3.0, 2.0 * k);
  const int grid_len = static_cast<int>(std::ceil(std::log2(1.0 / eps_tilde))) + 1;

  const FilterStats stats = estimate_stats(train, k, config.geometric);

  double best_mse = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid_len; ++j) {
    const double eta = std::ldexp(theta, j);  // 2^j * theta
    LearnedObservable candidate;
    candidate.theta_hat = theta;
    candidate.coefficients = filter_coefficients(stats, n, eta, eps_tilde);
    const double mse = validation_mse(candidate, val);
    if (mse < best_mse) {
      best_mse = mse;
      model.coefficients = std::move(candidate.coefficients);
    }
  }
  return model;
}

LearnedObservable observable_setting2(std::span<const TrainRow> rows,
                                      const LearnerConfig& config) {
  const int n = rows[0].state.n();
  const int k = config.truncation_weight(2.0);
  const double eps_tilde = config.eps / (6.0 * std::pow(n, k));

  const FilterStats stats = estimate_stats(rows, k, config.geometric);
  LearnedObservable model;
  model.config = config.to_json();
  model.coefficients = filter_small_beta(stats, n, eps_tilde);
  return model;
}

}  // namespace

LearnedObservable learn_observable(std::span<const TrainRow> rows,
                                   const LearnerConfig& config) {
  if (rows.size() < 10) throw std::invalid_argument("need at least 10 training rows");
  switch (config.mode) {
    case LearnerMode::ObservableSetting1: return observable_setting1(rows, config);
    case LearnerMode::ObservableSetting2: return observable_setting2(rows, config);
    default: throw std::invalid_argument("learn_observable needs an observable-setting mode");
  }
}

std::vector<TrainRow> rows_from_shadow(const ProcessShadow& shadow,
                                       const SparsePauliOp& obs,
                                       const std::string& observable_id) {
  if (shadow.rows.empty()) throw std::invalid_argument("empty shadow");
  if (obs.n() != shadow.n) throw std::invalid_argument("observable/shadow size mismatch");

  std::vector<TrainRow> rows;
  rows.reserve(shadow.rows.size());
  if (shadow.mode == ShadowMode::Expectation) {
    const int col = shadow.index_of(observable_id);
    for (const auto& r : shadow.rows)
      rows.push_back({ProductState::from_labels(r.in), r.y[col]});
  } else {
    for (const auto& r : shadow.rows) {
      double y = 0.0;
      for (const auto& [q, a] : obs.terms()) {
        double v = a;
        for (int i : q.support()) {
          if (label_axis(r.out[i]) != static_cast<int>(q.letter(i)) - 1) {
            v = 0.0;
            break;
          }
          v *= 3.0 * label_sign(r.out[i]);
        }
        y += v;
      }
      rows.push_back({ProductState::from_labels(r.in), y});
    }
  }
  return rows;
}

LearnedObservable learn_process(const ProcessShadow& shadow, const SparsePauliOp& obs,
                                const std::string& observable_id,
                                const LearnerConfig& config) {
  const std::vector<TrainRow> rows = rows_from_shadow(shadow, obs, observable_id);
  const int n = shadow.n;

  const double eta = obs.pauli_p_norm(1.0);
  const SparsePauliOp body = obs.without_identity();
  const int kappa = std::max(1, body.max_weight());
  const int degree = std::max(1, body.degree());
  const double c_kd = norm_constant_bounded(kappa, degree);

  int k;
  double eps_tilde;
  if (config.mode == LearnerMode::ProcessSetting1) {
    k = config.truncation_weight(1.0);
    const double ck = norm_constant_klocal(k);
    eps_tilde = std::pow(config.eps_prime / (6.0 * std::ldexp(1.0, k)), k + 1) *
                std::pow(c_kd / 3.0, 2.0) * std::pow(ck / 3.0, 2.0 * k);
  } else if (config.mode == LearnerMode::ProcessSetting2) {
    k = config.truncation_weight(2.0);
    eps_tilde = config.eps / (9.0 * std::ldexp(1.0, k + 1) * std::pow(n, k)) *
                std::pow(c_kd / 3.0, 2.0);
  } else {
    throw std::invalid_argument("learn_process needs a process-setting mode");
  }

  const FilterStats stats =
      estimate_stats_analytic_beta(rows, k, config.geometric);
  LearnedObservable model;
  model.config = config.to_json();
  model.config["eta"] = eta;
  model.coefficients = filter_coefficients(stats, n, eta, eps_tilde);
  return model;
}

std::vector<double> default_lasso_grid() {
  std::vector<double> grid;
  for (int e = -15; e <= -3; ++e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

LassoFeatures::LassoFeatures(std::span<const ProductState> states, int n, int k,
                             bool geometric)
    : n_(n), num_rows_(static_cast<int>(states.size())) {
  paulis_ = enumerate_paulis(n, k, geometric);
  cols_.resize(paulis_.size());
  for (size_t f = 0; f < paulis_.size(); ++f) {
    const PauliString& p = paulis_[f];
    for (int r = 0; r < num_rows_; ++r) {
      const double v = states[r].expect(p);
      if (v != 0.0) cols_[f].emplace_back(r, v);
    }
  }
}

// The residual vector tracks y - X*alpha for every row (updates touch all
// rows), so held-out predictions can be read off it directly.
void LassoFeatures::descend(std::span<const double> y,
                            const std::vector<uint8_t>& row_used, double a,
                            std::vector<double>& alpha,
                            std::vector<double>& residual, int max_sweeps) const {
  int active = 0;
  for (int r = 0; r < num_rows_; ++r) active += row_used[r];
  const double inv_n = 1.0 / static_cast<double>(active);

  std::vector<double> col_scale(cols_.size(), 0.0);
  for (size_t f = 0; f < cols_.size(); ++f) {
    double s = 0.0;
    for (const auto& [r, v] : cols_[f])
      if (row_used[r]) s += v * v;
    col_scale[f] = s * inv_n;
  }

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (size_t f = 0; f < cols_.size(); ++f) {
      if (col_scale[f] == 0.0) continue;
      double corr = 0.0;
      for (const auto& [r, v] : cols_[f])
        if (row_used[r]) corr += v * residual[r];
      const double z = corr * inv_n + col_scale[f] * alpha[f];
      const double mag = std::abs(z) - a;
      const double next = mag > 0.0 ? std::copysign(mag, z) / col_scale[f] : 0.0;
      const double delta = next - alpha[f];
      if (delta != 0.0) {
        for (const auto& [r, v] : cols_[f]) residual[r] -= delta * v;
        alpha[f] = next;
        max_change = std::max(max_change, std::abs(delta));
      }
    }
    if (max_change < kLassoTol) break;
  }
}

SparsePauliOp LassoFeatures::fit(std::span<const double> y, double a,
                                 int max_sweeps) const {
  if (a < 0.0) throw std::invalid_argument("lasso penalty must be >= 0");
  if (static_cast<int>(y.size()) != num_rows_)
    throw std::invalid_argument("label length mismatch");
  std::vector<uint8_t> used(num_rows_, 1);
  std::vector<double> alpha(paulis_.size(), 0.0);
  std::vector<double> residual(y.begin(), y.end());
  descend(y, used, a, alpha, residual, max_sweeps);
  SparsePauliOp model(n_);
  for (size_t f = 0; f < paulis_.size(); ++f)
    if (alpha[f] != 0.0) model.add(paulis_[f], alpha[f]);
  return model;
}

std::vector<double> LassoFeatures::path_rmse(std::span<const double> y,
                                             const std::vector<uint8_t>& row_used,
                                             std::span<const double> a_desc) const {
  std::vector<double> alpha(paulis_.size(), 0.0);
  std::vector<double> residual(y.begin(), y.end());
  std::vector<double> rmse(a_desc.size(), 0.0);
  for (size_t ai = 0; ai < a_desc.size(); ++ai) {
    descend(y, row_used, a_desc[ai], alpha, residual, kLassoMaxSweeps);
    double sq = 0.0;
    int held = 0;
    for (int r = 0; r < num_rows_; ++r) {
      if (row_used[r]) continue;
      sq += residual[r] * residual[r];
      held++;
    }
    rmse[ai] = std::sqrt(sq / std::max(1, held));
  }
  return rmse;
}

double LassoFeatures::objective(std::span<const double> y,
                                const SparsePauliOp& model, double a) const {
  std::vector<double> residual(y.begin(), y.end());
  double l1 = 0.0;
  for (size_t f = 0; f < paulis_.size(); ++f) {
    const double c = model.coeff(paulis_[f]);
    if (c == 0.0) continue;
    l1 += std::abs(c);
    for (const auto& [r, v] : cols_[f]) residual[r] -= c * v;
  }
  double sq = 0.0;
  for (double r : residual) sq += r * r;
  return sq / (2.0 * num_rows_) + a * l1;
}

SparsePauliOp lasso_fit(std::span<const TrainRow> rows, int n, int k, double a,
                        bool geometric) {
  std::vector<ProductState> states;
  std::vector<double> y;
  states.reserve(rows.size());
  y.reserve(rows.size());
  for (const TrainRow& row : rows) {
    states.push_back(row.state);
    y.push_back(row.y);
  }
  const LassoFeatures features(states, n, k, geometric);
  return features.fit(y, a);
}

LassoSelection cross_validate(std::span<const TrainRow> rows, int n,
                              const LearnerConfig& config) {
  if (config.folds < 2) throw std::invalid_argument("need at least 2 folds");
  if (rows.size() < static_cast<size_t>(config.folds))
    throw std::invalid_argument("fewer rows than folds");
  const std::vector<double> a_grid =
      config.a_grid.empty() ? default_lasso_grid() : config.a_grid;

  // seeded fold assignment
  std::vector<int> fold_of(rows.size());
  {
    std::vector<int> perm(rows.size());
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng = Rng::substream(config.seed, 0xf01d);
    for (size_t i = perm.size(); i > 1; --i)
      std::swap(perm[i - 1], perm[rng.below(i)]);
    for (size_t pos = 0; pos < perm.size(); ++pos)
      fold_of[perm[pos]] = static_cast<int>(pos) % config.folds;
  }

  // path over a descending for warm starts; k ascending so ties resolve to
  // the smaller k and the larger a
  std::vector<double> a_desc = a_grid;
  std::sort(a_desc.begin(), a_desc.end(), std::greater<>());
  std::vector<int> k_grid = config.k_grid;
  std::sort(k_grid.begin(), k_grid.end());

  std::vector<ProductState> states;
  std::vector<double> y;
  states.reserve(rows.size());
  y.reserve(rows.size());
  for (const TrainRow& row : rows) {
    states.push_back(row.state);
    y.push_back(row.y);
  }

  int best_k = 0;
  double best_a = 0.0;
  double best_rmse = std::numeric_limits<double>::infinity();

  for (int k : k_grid) {
    const LassoFeatures features(states, n, k, config.geometric);
    std::vector<double> rmse_sum(a_desc.size(), 0.0);

    for (int fold = 0; fold < config.folds; ++fold) {
      std::vector<uint8_t> used(rows.size());
      for (size_t r = 0; r < rows.size(); ++r) used[r] = fold_of[r] != fold;
      const std::vector<double> fold_rmse = features.path_rmse(y, used, a_desc);
      for (size_t ai = 0; ai < a_desc.size(); ++ai) rmse_sum[ai] += fold_rmse[ai];
    }

    for (size_t ai = 0; ai < a_desc.size(); ++ai) {
      const double mean_rmse = rmse_sum[ai] / config.folds;
      if (mean_rmse < best_rmse - 1e-12) {
        best_rmse = mean_rmse;
        best_k = k;
        best_a = a_desc[ai];
      }
    }
  }

  LassoSelection selection;
  selection.k = best_k;
  selection.a = best_a;
  selection.cv_rmse = best_rmse;
  selection.model.coefficients = lasso_fit(rows, n, best_k, best_a, config.geometric);
  selection.model.config = config.to_json();
  selection.model.config["selected_k"] = best_k;
  selection.model.config["selected_a"] = best_a;
  return selection;
}

}  // namespace qproc
