#include "qproc/shadows.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "qproc/parallel.hpp"

namespace qproc {

double shadow_norm_pauli(const PauliString& p) {
  return std::pow(3.0, 0.5 * p.weight());
}

int ProcessShadow::index_of(const std::string& observable_id) const {
  const auto it = std::find(observable_ids.begin(), observable_ids.end(), observable_id);
  if (it == observable_ids.end())
    throw std::invalid_argument("observable not in dataset: " + observable_id);
  return static_cast<int>(it - observable_ids.begin());
}

std::vector<StabLabel> ShadowBackend::sample_output(const ProductState&,
                                                    const std::vector<int>&, Rng&) const {
  throw std::runtime_error("backend does not support snapshot sampling");
}

std::vector<double> ShadowBackend::expect_output(const ProductState&,
                                                 const std::vector<PauliString>&) const {
  throw std::runtime_error("backend does not support exact expectations");
}

std::vector<StabLabel> DenseShadowBackend::sample_output(const ProductState& in,
                                                         const std::vector<int>& bases,
                                                         Rng& rng) const {
  if (channel_.preserves_purity()) {
    const DenseVec out = channel_.apply_pure(statevector(in));
    return born_sample(out, bases, rng);
  }
  const DenseMat out = channel_.apply(density_matrix(in));
  return born_sample(out, bases, rng);
}

std::vector<double> DenseShadowBackend::expect_output(
    const ProductState& in, const std::vector<PauliString>& obs) const {
  std::vector<double> values(obs.size());
  if (channel_.preserves_purity()) {
    const DenseVec out = channel_.apply_pure(statevector(in));
    for (size_t i = 0; i < obs.size(); ++i)
      values[i] = pauli_expect(obs[i], out).real();
  } else {
    const DenseMat out = channel_.apply(density_matrix(in));
    for (size_t i = 0; i < obs.size(); ++i)
      values[i] = pauli_trace(obs[i], out).real();
  }
  return values;
}

FermionShadowBackend::FermionShadowBackend(const ChainModel& model, double t)
    : model_(model), rotation_(MajoranaRotation(model).at(t)) {}

std::vector<double> FermionShadowBackend::expect_output(
    const ProductState& in, const std::vector<PauliString>& obs) const {
  const std::vector<double> z_all = expectation_z_all(rotation_, in);
  std::vector<double> values(obs.size());
  for (size_t i = 0; i < obs.size(); ++i) {
    const PauliString& p = obs[i];
    const auto dom = p.support();
    if (dom.size() != 1 || p.letter(dom[0]) != PauliLetter::Z)
      throw std::runtime_error(
          "fermion backend only evaluates single-site Z observables");
    values[i] = z_all[dom[0]];
  }
  return values;
}

std::vector<StabLabel> randomized_pauli_measure(const ShadowBackend& backend,
                                                const ProductState& in, Rng& rng) {
  if (!backend.can_sample())
    throw std::runtime_error("backend does not support snapshot sampling");
  std::vector<int> bases(backend.n());
  for (int& b : bases) b = static_cast<int>(rng.below(3));
  return backend.sample_output(in, bases, rng);
}

double noisy_mean_pm1(double mean, int shots, Rng& rng) {
  const double p = std::clamp(0.5 * (1.0 + mean), 0.0, 1.0);
  int plus = 0;
  for (int s = 0; s < shots; ++s)
    if (rng.next_double() < p) plus++;
  return (2.0 * plus - shots) / shots;
}

ProcessShadow collect_process_shadow(
    const ShadowBackend& backend, int num_rows, ShadowMode mode,
    const std::vector<std::pair<std::string, SparsePauliOp>>& observables,
    int shots, uint64_t seed) {
  const int n = backend.n();
  ProcessShadow shadow;
  shadow.n = n;
  shadow.mode = mode;
  shadow.seed = seed;
  shadow.rows.resize(num_rows);

  if (mode == ShadowMode::Expectation) {
    if (observables.empty()) throw std::invalid_argument("expectation mode needs observables");
    if (shots < 1) throw std::invalid_argument("expectation mode needs shots >= 1");
    shadow.shots = shots;
    for (const auto& [id, op] : observables) shadow.observable_ids.push_back(id);

    // flatten the Pauli terms of all observables once
    std::vector<PauliString> terms;
    std::vector<std::vector<std::pair<int, double>>> assembly(observables.size());
    for (size_t o = 0; o < observables.size(); ++o) {
      for (const auto& [p, c] : observables[o].second.terms()) {
        assembly[o].emplace_back(static_cast<int>(terms.size()), c);
        terms.push_back(p);
      }
    }

    parallel_for(num_rows, [&](int row) {
      Rng rng = Rng::substream(seed, static_cast<uint64_t>(row));
      auto& r = shadow.rows[row];
      r.in = sample_stab_labels(n, rng);
      const std::vector<double> exact =
          backend.expect_output(ProductState::from_labels(r.in), terms);
      r.y.resize(observables.size());
      for (size_t o = 0; o < observables.size(); ++o) {
        double y = 0.0;
        for (const auto& [idx, c] : assembly[o])
          y += c * noisy_mean_pm1(exact[idx], shots, rng);
        r.y[o] = y;
      }
    });
  } else {
    parallel_for(num_rows, [&](int row) {
      Rng rng = Rng::substream(seed, static_cast<uint64_t>(row));
      auto& r = shadow.rows[row];
      r.in = sample_stab_labels(n, rng);
      r.out = randomized_pauli_measure(backend, ProductState::from_labels(r.in), rng);
    });
  }
  return shadow;
}

double shadow_estimate(const std::vector<std::vector<StabLabel>>& snapshots,
                       const SparsePauliOp& op) {
  if (snapshots.empty()) throw std::invalid_argument("empty shadow");
  for (const auto& snap : snapshots)
    if (static_cast<int>(snap.size()) != op.n())
      throw std::invalid_argument("snapshot size does not match the observable");
  // precompute supports once; identity qubits contribute factor 1
  struct Term {
    std::vector<std::pair<int, int>> axes;  // (qubit, axis)
    double coeff;
  };
  std::vector<Term> terms;
  terms.reserve(op.size());
  for (const auto& [p, c] : op.terms()) {
    Term t;
    t.coeff = c;
    for (int q : p.support())
      t.axes.emplace_back(q, static_cast<int>(p.letter(q)) - 1);
    terms.push_back(std::move(t));
  }

  double sum = 0.0, comp = 0.0;
  for (const auto& snap : snapshots) {
    double row = 0.0;
    for (const auto& t : terms) {
      double v = t.coeff;
      for (const auto& [q, axis] : t.axes) {
        if (label_axis(snap[q]) != axis) {
          v = 0.0;
          break;
        }
        v *= 3.0 * label_sign(snap[q]);
      }
      row += v;
    }
    const double y = row - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return sum / static_cast<double>(snapshots.size());
}

double shadow_estimate(const StateShadow& shadow, const SparsePauliOp& op) {
  return shadow_estimate(shadow.snapshots, op);
}

double shadow_estimate(const ProcessShadow& shadow, const SparsePauliOp& op) {
  if (shadow.mode != ShadowMode::Snapshot)
    throw std::invalid_argument("shadow_estimate needs snapshot-mode data");
  std::vector<std::vector<StabLabel>> outs;
  outs.reserve(shadow.rows.size());
  for (const auto& r : shadow.rows) outs.push_back(r.out);
  return shadow_estimate(outs, op);
}

namespace {

nlohmann::json labels_to_json(const std::vector<StabLabel>& labels) {
  nlohmann::json arr = nlohmann::json::array();
  for (StabLabel l : labels) arr.push_back(label_str(l));
  return arr;
}

std::vector<StabLabel> labels_from_json(const nlohmann::json& arr) {
  std::vector<StabLabel> labels;
  labels.reserve(arr.size());
  for (const auto& s : arr) labels.push_back(label_from_str(s.get<std::string>()));
  return labels;
}

}  // namespace

void write_process_shadow(const ProcessShadow& shadow, const std::string& path,
                          const nlohmann::json& provenance) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);

  nlohmann::json header;
  header["n"] = shadow.n;
  header["mode"] = shadow.mode == ShadowMode::Snapshot ? "snapshot" : "expectation";
  header["shots"] = shadow.shots;
  header["seed"] = shadow.seed;
  header["channel"] = shadow.channel_desc;
  if (shadow.mode == ShadowMode::Expectation)
    header["observables"] = shadow.observable_ids;
  for (auto it = provenance.begin(); it != provenance.end(); ++it)
    header[it.key()] = it.value();
  out << header.dump() << "\n";

  for (const auto& r : shadow.rows) {
    nlohmann::json row;
    row["in"] = labels_to_json(r.in);
    if (shadow.mode == ShadowMode::Snapshot) {
      row["out"] = labels_to_json(r.out);
    } else {
      nlohmann::json y = nlohmann::json::object();
      for (size_t o = 0; o < shadow.observable_ids.size(); ++o)
        y[shadow.observable_ids[o]] = r.y[o];
      row["y"] = y;
    }
    out << row.dump() << "\n";
  }
}

ProcessShadow read_process_shadow(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file");

  const nlohmann::json header = nlohmann::json::parse(line);
  ProcessShadow shadow;
  shadow.n = header.at("n").get<int>();
  shadow.mode = header.at("mode").get<std::string>() == "snapshot"
                    ? ShadowMode::Snapshot
                    : ShadowMode::Expectation;
  shadow.shots = header.value("shots", 0);
  shadow.seed = header.value("seed", uint64_t{0});
  if (header.contains("channel")) shadow.channel_desc = header["channel"];
  if (header.contains("observables"))
    shadow.observable_ids = header["observables"].get<std::vector<std::string>>();

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json row = nlohmann::json::parse(line);
    ProcessShadowRow r;
    r.in = labels_from_json(row.at("in"));
    if (static_cast<int>(r.in.size()) != shadow.n)
      throw std::runtime_error("dataset row length does not match the header");
    if (shadow.mode == ShadowMode::Snapshot) {
      r.out = labels_from_json(row.at("out"));
      if (r.out.size() != r.in.size())
        throw std::runtime_error("dataset row length does not match the header");
    } else {
      r.y.resize(shadow.observable_ids.size());
      const auto& y = row.at("y");
      for (size_t o = 0; o < shadow.observable_ids.size(); ++o)
        r.y[o] = y.at(shadow.observable_ids[o]).get<double>();
    }
    shadow.rows.push_back(std::move(r));
  }
  return shadow;
}

}  // namespace qproc
