#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qproc/dense.hpp"
#include "qproc/experiments.hpp"
#include "qproc/learner.hpp"
#include "qproc/norms.hpp"
#include "qproc/optimizer.hpp"
#include "qproc/parallel.hpp"
#include "qproc/shadows.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("bad JSON in " + path + ": " + e.what());
  }
  return j;
}

uint64_t config_hash(const json& j) {
  const std::string s = j.dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json provenance(const json& config, uint64_t seed) {
  return json{{"version", kVersion},
              {"seed", seed},
              {"config_hash", config_hash(config)}};
}

std::string csv_header(const json& config, uint64_t seed) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "# qproc %s seed=%llu config_hash=%016llx", kVersion,
                static_cast<unsigned long long>(seed),
                static_cast<unsigned long long>(config_hash(config)));
  return buf;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

qproc::SparsePauliOp parse_operator(const json& j) {
  return qproc::SparsePauliOp::from_json(j);
}

// channel spec: {"type": "identity"|"hamiltonian"|"unitary-file"|"chain", ...}
struct ChannelSpec {
  json raw;
  int n = 0;
  bool is_chain = false;
  qproc::ChainModel chain;
  double t = 0.0;
  std::unique_ptr<qproc::ShadowBackend> backend;
};

ChannelSpec parse_channel(const json& j) {
  ChannelSpec spec;
  spec.raw = j;
  const std::string type = j.at("type").get<std::string>();
  if (type == "identity") {
    spec.n = j.at("n").get<int>();
    spec.backend = std::make_unique<qproc::DenseShadowBackend>(
        qproc::DenseChannel::identity(spec.n));
  } else if (type == "hamiltonian") {
    const qproc::SparsePauliOp h = parse_operator(j.at("terms"));
    spec.n = h.n();
    spec.backend = std::make_unique<qproc::DenseShadowBackend>(
        qproc::DenseChannel::hamiltonian(h, j.at("t").get<double>()));
  } else if (type == "unitary-file") {
    const json u = load_json(j.at("path").get<std::string>());
    const auto rows = u.get<std::vector<std::vector<double>>>();
    // flat [re, im, re, im, ...] rows
    const Eigen::Index dim = static_cast<Eigen::Index>(rows.size());
    qproc::DenseMat m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      if (rows[r].size() != static_cast<size_t>(2 * dim))
        throw ConfigError("unitary rows must hold interleaved re/im pairs");
      for (Eigen::Index c = 0; c < dim; ++c)
        m(r, c) = qproc::Cplx{rows[r][2 * c], rows[r][2 * c + 1]};
    }
    qproc::DenseChannel ch = qproc::DenseChannel::unitary(std::move(m));
    spec.n = ch.n();
    spec.backend = std::make_unique<qproc::DenseShadowBackend>(std::move(ch));
  } else if (type == "chain") {
    spec.is_chain = true;
    spec.chain = qproc::ChainModel::from_json(j.at("model"));
    spec.t = j.at("t").get<double>();
    spec.n = spec.chain.n;
    spec.backend =
        std::make_unique<qproc::FermionShadowBackend>(spec.chain, spec.t);
  } else {
    throw ConfigError("unsupported channel type: " + type);
  }
  return spec;
}

std::vector<std::pair<std::string, qproc::SparsePauliOp>> parse_observables(
    const json& j, int n) {
  std::vector<std::pair<std::string, qproc::SparsePauliOp>> obs;
  if (j.is_string() && j.get<std::string>() == "z-all") {
    for (int i = 0; i < n; ++i) {
      qproc::PauliString z(n);
      z.set(i, qproc::PauliLetter::Z);
      qproc::SparsePauliOp op(n);
      op.add(z, 1.0);
      obs.emplace_back("Z_" + std::to_string(i + 1), std::move(op));
    }
    return obs;
  }
  for (const auto& item : j)
    obs.emplace_back(item.at("id").get<std::string>(),
                     parse_operator(item.at("terms")));
  return obs;
}

qproc::LearnerMode parse_mode(const std::string& name) {
  if (name == "observable-setting1") return qproc::LearnerMode::ObservableSetting1;
  if (name == "observable-setting2") return qproc::LearnerMode::ObservableSetting2;
  if (name == "process-setting1") return qproc::LearnerMode::ProcessSetting1;
  if (name == "process-setting2") return qproc::LearnerMode::ProcessSetting2;
  if (name == "lasso") return qproc::LearnerMode::Lasso;
  throw ConfigError("unsupported learner mode: " + name);
}

qproc::LearnerConfig parse_learner_config(const json& j, uint64_t seed) {
  qproc::LearnerConfig config;
  config.mode = parse_mode(j.value("mode", std::string("process-setting1")));
  config.eps = j.value("eps", 0.5);
  config.eps_prime = j.value("eps_prime", 0.5);
  config.delta = j.value("delta", 0.01);
  config.k_override = j.value("k", 0);
  config.geometric = j.value("geometric", false);
  config.folds = j.value("folds", 2);
  if (j.contains("k_grid")) config.k_grid = j["k_grid"].get<std::vector<int>>();
  if (j.contains("a_grid")) config.a_grid = j["a_grid"].get<std::vector<double>>();
  config.seed = j.value("seed", seed);
  return config;
}

// the single-site shorthand "Z_5" used by expectation datasets
qproc::SparsePauliOp observable_from_id(const std::string& id, int n) {
  if (id.size() < 3 || id[1] != '_') throw ConfigError("bad observable id: " + id);
  const char letter = id[0];
  const int site = std::stoi(id.substr(2)) - 1;
  if (site < 0 || site >= n) throw ConfigError("observable site out of range: " + id);
  qproc::PauliString p(n);
  p.set(site, qproc::letter_from_char(letter));
  qproc::SparsePauliOp op(n);
  op.add(p, 1.0);
  return op;
}

int cmd_gen_data(const std::string& config_path, uint64_t seed,
                 const std::string& out_path) {
  const json config = load_json(config_path);
  ChannelSpec channel = parse_channel(config.at("channel"));
  const json& ds = config.at("dataset");
  const int num_rows = ds.at("n_rows").get<int>();
  const std::string mode_str = ds.value("mode", std::string("snapshot"));
  const uint64_t used_seed = config.value("seed", seed);

  qproc::ProcessShadow shadow;
  if (mode_str == "snapshot") {
    shadow = qproc::collect_process_shadow(*channel.backend, num_rows,
                                           qproc::ShadowMode::Snapshot, {}, 0,
                                           used_seed);
  } else if (mode_str == "expectation") {
    const auto observables =
        parse_observables(config.at("observables"), channel.n);
    shadow = qproc::collect_process_shadow(*channel.backend, num_rows,
                                           qproc::ShadowMode::Expectation,
                                           observables, ds.value("shots", 500),
                                           used_seed);
  } else {
    throw ConfigError("unsupported dataset mode: " + mode_str);
  }
  shadow.channel_desc = channel.raw;
  qproc::write_process_shadow(shadow, out_path, provenance(config, used_seed));
  return 0;
}

int cmd_learn(const std::string& data_path, const std::string& config_path,
              uint64_t seed, const std::string& out_path) {
  const json config = load_json(config_path);
  const qproc::ProcessShadow shadow = qproc::read_process_shadow(data_path);
  const qproc::LearnerConfig learner = parse_learner_config(config, seed);

  std::string obs_id = config.value("observable_id", std::string());
  qproc::SparsePauliOp obs(shadow.n);
  if (config.contains("observable"))
    obs = parse_operator(config["observable"]);
  else if (!obs_id.empty())
    obs = observable_from_id(obs_id, shadow.n);
  else
    throw ConfigError("learn config needs observable or observable_id");

  qproc::LearnedObservable model;
  switch (learner.mode) {
    case qproc::LearnerMode::ProcessSetting1:
    case qproc::LearnerMode::ProcessSetting2:
      model = qproc::learn_process(shadow, obs, obs_id, learner);
      break;
    case qproc::LearnerMode::ObservableSetting1:
    case qproc::LearnerMode::ObservableSetting2: {
      const auto rows = qproc::rows_from_shadow(shadow, obs, obs_id);
      model = qproc::learn_observable(rows, learner);
      break;
    }
    case qproc::LearnerMode::Lasso: {
      const auto rows = qproc::rows_from_shadow(shadow, obs, obs_id);
      model = qproc::cross_validate(rows, shadow.n, learner).model;
      break;
    }
  }

  json out = model.to_json();
  out["provenance"] = provenance(config, learner.seed);
  std::ofstream f(out_path);
  f << out.dump(2) << "\n";
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& states_path,
                uint64_t seed, const std::string& out_path) {
  const json model_json = load_json(model_path);
  const qproc::LearnedObservable model =
      qproc::LearnedObservable::from_json(model_json);

  std::ifstream in(states_path);
  if (!in) throw ConfigError("cannot open " + states_path);

  std::ofstream out(out_path);
  out << csv_header(model_json, seed) << "\n";
  out << "index,prediction\n";
  std::string line;
  int index = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json row = json::parse(line);
    qproc::ProductState state;
    if (row.contains("labels")) {
      std::vector<qproc::StabLabel> labels;
      for (const auto& l : row["labels"])
        labels.push_back(qproc::label_from_str(l.get<std::string>()));
      state = qproc::ProductState::from_labels(labels);
    } else if (row.contains("bloch")) {
      for (const auto& b : row["bloch"])
        state.qubits.push_back({b.at(0).get<double>(), b.at(1).get<double>(),
                                b.at(2).get<double>()});
    } else {
      throw ConfigError("state row needs labels or bloch");
    }
    const double value = model.predict(state);
    if (!std::isfinite(value)) return kExitNumeric;
    out << index++ << "," << fmt(value) << "\n";
  }
  return 0;
}

int cmd_optimize(const std::string& ham_path, int runs, int d_e, uint64_t seed,
                 const std::string& out_path) {
  const json ham_json = load_json(ham_path);
  const qproc::SparsePauliOp h =
      ham_json.is_array() ? parse_operator(ham_json)
                          : parse_operator(ham_json.at("terms"));
  const int k = h.without_identity().max_weight();
  if (k == 0) throw ConfigError("hamiltonian has no non-identity term");
  const int dim = d_e > 0 ? d_e : k;
  const qproc::ExpansionProfile profile = qproc::expansion_coefficient(h, dim);

  const double alpha_i = h.identity_coeff();
  double sum_abs = 0.0, sum_sq = 0.0;
  qproc::Rng rng(seed);
  json last;
  for (int run = 0; run < runs; ++run) {
    const qproc::OptResult result = qproc::optimize(h, profile, rng);
    sum_abs += std::abs(result.margin);
    sum_sq += result.margin * result.margin;
    if (run + 1 == runs) {
      json state = json::array();
      for (const auto& q : result.state.qubits) state.push_back({q[0], q[1], q[2]});
      last = json{{"state", state},
                  {"value", result.value},
                  {"direction", result.maximizing ? "max" : "min"},
                  {"t_star", result.t_star},
                  {"margin", result.margin}};
    }
  }
  const double mean_abs = sum_abs / runs;
  const double bound =
      qproc::norm_constant_expansion(profile.c_e, profile.d_e, k) *
      h.without_identity().pauli_p_norm(profile.r);
  if (!std::isfinite(mean_abs)) return kExitNumeric;

  json out{{"runs", runs},
           {"alpha_identity", alpha_i},
           {"mean_abs_margin", mean_abs},
           {"stderr_abs_margin",
            std::sqrt(std::max(0.0, sum_sq / runs - mean_abs * mean_abs) / runs)},
           {"theorem_bound", bound},
           {"bound_satisfied", mean_abs >= bound},
           {"profile",
            {{"c_e", profile.c_e}, {"d_e", profile.d_e}, {"r", profile.r}, {"k", k}}},
           {"last_run", last},
           {"provenance", provenance(ham_json, seed)}};
  std::ofstream f(out_path);
  f << out.dump(2) << "\n";
  return 0;
}

int cmd_verify_norms(int k, int n, int trials, const std::string& kind_str,
                     uint64_t seed, const std::string& out_path) {
  const qproc::NormKind kind = kind_str == "bounded"
                                   ? qproc::NormKind::BoundedDegree
                                   : qproc::NormKind::GeneralKLocal;
  const json config{{"k", k}, {"n", n}, {"trials", trials}, {"kind", kind_str}};
  std::ofstream out(out_path);
  out << csv_header(config, seed) << "\n";
  out << "instance_id,k,d,lhs,rhs,holds\n";

  qproc::Rng rng(seed);
  int violations = 0;
  for (int trial = 0; trial < trials; ++trial) {
    // random k-local operator, coefficients uniform in [-1, 1]
    qproc::SparsePauliOp op(n);
    const auto pool = qproc::enumerate_paulis(n, k, false);
    const int terms = 1 + static_cast<int>(rng.below(pool.size()));
    for (int t = 0; t < terms; ++t) {
      const auto& p = pool[rng.below(pool.size())];
      if (p.is_identity()) continue;
      op.add(p, 2.0 * rng.next_double() - 1.0);
    }
    if (op.without_identity().size() == 0) continue;
    const qproc::InequalityReport report = qproc::verify_inequality(op, kind);
    if (!report.holds) violations++;
    out << trial << "," << report.k << "," << report.d << "," << fmt(report.lhs)
        << "," << fmt(report.rhs) << "," << (report.holds ? 1 : 0) << "\n";
  }
  return violations == 0 ? 0 : kExitNumeric;
}

int cmd_reproduce_fig(const std::string& which, const std::string& config_path,
                      uint64_t seed, const std::string& out_path) {
  json config = config_path.empty() ? json::object() : load_json(config_path);
  const uint64_t used_seed = config.value("seed", seed);
  const int n = config.value("n", 50);
  const int num_rows = config.value("n_rows", 10000);
  const int shots = config.value("shots", 500);
  const std::string kind_str = config.value("kind", std::string("xy"));
  const qproc::ChainKind kind =
      kind_str == "ising" ? qproc::ChainKind::Ising : qproc::ChainKind::XY;
  const double field = config.value("h", 0.5);
  qproc::ChainModel model = qproc::ChainModel::homogeneous(kind, n, field);
  if (config.contains("field") &&
      config["field"].value("mode", std::string()) == "disordered")
    model = qproc::ChainModel::disordered(
        kind, n, config["field"].value("low", -5.0), config["field"].value("high", 5.0),
        config["field"].value("seed", used_seed));

  qproc::LearnerConfig learner;
  if (config.contains("learner"))
    learner = parse_learner_config(config["learner"], used_seed);
  learner.mode = qproc::LearnerMode::Lasso;
  learner.geometric = true;
  learner.seed = used_seed;

  std::ofstream out(out_path);
  out << csv_header(config, used_seed) << "\n";

  if (which == "2b" || which == "2c" || which == "2d") {
    std::vector<qproc::FigPoint> points;
    if (which == "2b") {
      const std::vector<int> sizes =
          config.value("train_sizes", std::vector<int>{100, 1000, 10000});
      points = qproc::fig2b_series(model, config.value("t", 1e6), sizes, shots,
                                   used_seed, learner);
      out << "n_train,rmse\n";
    } else if (which == "2c") {
      const std::vector<double> times = config.value(
          "times", std::vector<double>{1, 10, 100, 1000, 10000, 100000, 1000000});
      points = qproc::fig2c_series(model, times, num_rows, shots, used_seed, learner);
      out << "t,rmse\n";
    } else {
      const std::vector<int> sizes =
          config.value("sizes", std::vector<int>{10, 20, 30, 40, 50});
      points = qproc::fig2d_series(kind, sizes, field, config.value("t", 1e6),
                                   num_rows, shots, used_seed, learner);
      out << "n,rmse\n";
    }
    for (const auto& p : points) {
      if (!std::isfinite(p.rmse)) return kExitNumeric;
      out << fmt(p.x) << "," << fmt(p.rmse) << "\n";
    }
    return 0;
  }

  if (which == "3" || which == "4") {
    const std::vector<double> times = config.value(
        "times", std::vector<double>{0, 1, 3, 10, 100, 10000, 1000000});
    const auto rows = which == "3"
                          ? qproc::fig3_rows(model, times, num_rows, shots,
                                             used_seed, learner)
                          : qproc::fig4_rows(model, times, num_rows, shots,
                                             used_seed, learner);
    out << "site,t,predicted,exact\n";
    for (const auto& r : rows) {
      if (!std::isfinite(r.predicted) || !std::isfinite(r.exact)) return kExitNumeric;
      out << r.site << "," << fmt(r.t) << "," << fmt(r.predicted) << ","
          << fmt(r.exact) << "\n";
    }
    return 0;
  }
  throw ConfigError("unsupported figure: " + which);
}

int cmd_bench() {
  const auto t0 = std::chrono::steady_clock::now();
  const qproc::ChainModel model = qproc::ChainModel::homogeneous(qproc::ChainKind::XY, 50);
  const qproc::MajoranaRotation rotation(model);
  const Eigen::MatrixXd r = rotation.at(1e6);
  qproc::Rng rng(1);
  double sink = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto state = qproc::sample_haar_product(50, rng);
    for (double v : qproc::expectation_z_all(r, state)) sink += v;
  }
  const auto t1 = std::chrono::steady_clock::now();
  const qproc::SparsePauliOp z25 = qproc::heisenberg_z(r, 25);
  const auto t2 = std::chrono::steady_clock::now();
  std::printf("fermion 100 states x 50 sites: %lld ms (checksum %.6f)\n",
              static_cast<long long>(
                  std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()),
              sink);
  std::printf("heisenberg_z expansion at n=50: %lld us, %zu strings\n",
              static_cast<long long>(
                  std::chrono::duration_cast<std::chrono::microseconds>(t2 - t1).count()),
              z25.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"learning and optimizing quantum processes from randomized experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  uint64_t seed = 1;
  int threads = 0;
  std::string out_path = "out";
  app.add_option("--seed", seed, "master RNG seed")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (0 = auto)");

  std::string config_path, data_path, model_path, states_path, ham_path, which, kind;
  int runs = 1000, k = 2, n = 4, trials = 500, d_e = 0;

  auto* gen = app.add_subcommand("gen-data", "generate a randomized-experiment dataset");
  gen->add_option("--config", config_path)->required();
  gen->add_option("--out", out_path)->required();

  auto* learn = app.add_subcommand("learn", "train a model from a dataset");
  learn->add_option("--data", data_path)->required();
  learn->add_option("--config", config_path)->required();
  learn->add_option("--out", out_path)->required();

  auto* predict = app.add_subcommand("predict", "predict states with a trained model");
  predict->add_option("--model", model_path)->required();
  predict->add_option("--states", states_path)->required();
  predict->add_option("--out", out_path)->required();

  auto* optimize = app.add_subcommand("optimize", "random product-state optimizer");
  optimize->add_option("--hamiltonian", ham_path)->required();
  optimize->add_option("--runs", runs)->capture_default_str();
  optimize->add_option("--d-e", d_e, "expansion dimension (0 = max weight)");
  optimize->add_option("--out", out_path)->required();

  auto* verify = app.add_subcommand("verify-norms", "norm-inequality sweep");
  verify->add_option("--k", k)->capture_default_str();
  verify->add_option("--n", n)->capture_default_str();
  verify->add_option("--trials", trials)->capture_default_str();
  verify->add_option("--kind", kind, "general|bounded")->default_val("general");
  verify->add_option("--out", out_path)->required();

  auto* fig = app.add_subcommand("reproduce-fig", "regenerate figure data as CSV");
  fig->add_option("--which", which, "2b|2c|2d|3|4")->required();
  fig->add_option("--config", config_path);
  fig->add_option("--out", out_path)->required();

  app.add_subcommand("bench", "quick timing of the heavy kernels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  qproc::set_parallel_threads(threads);

  try {
    if (gen->parsed()) return cmd_gen_data(config_path, seed, out_path);
    if (learn->parsed()) return cmd_learn(data_path, config_path, seed, out_path);
    if (predict->parsed()) return cmd_predict(model_path, states_path, seed, out_path);
    if (optimize->parsed()) return cmd_optimize(ham_path, runs, d_e, seed, out_path);
    if (verify->parsed()) return cmd_verify_norms(k, n, trials, kind, seed, out_path);
    if (fig->parsed()) return cmd_reproduce_fig(which, config_path, seed, out_path);
    return cmd_bench();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
