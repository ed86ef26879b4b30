#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

#include "qproc/dense.hpp"
#include "qproc/experiments.hpp"
#include "qproc/learner.hpp"
#include "qproc/norms.hpp"
#include "qproc/optimizer.hpp"
#include "qproc/shadows.hpp"

namespace py = pybind11;
using namespace qproc;

namespace {

using Terms = std::vector<std::pair<std::string, double>>;
using BlochList = std::vector<std::array<double, 3>>;

SparsePauliOp op_from(const Terms& terms) {
  if (terms.empty()) throw std::invalid_argument("empty operator");
  SparsePauliOp op(static_cast<int>(terms[0].first.size()));
  for (const auto& [p, c] : terms) op.add(PauliString::from_string(p), c);
  return op;
}

Terms op_to(const SparsePauliOp& op) {
  Terms out;
  out.reserve(op.size());
  for (const auto& [p, c] : op.terms()) out.emplace_back(p.str(), c);
  std::sort(out.begin(), out.end());
  return out;
}

ProductState state_from(const BlochList& bloch) {
  ProductState s;
  s.qubits.assign(bloch.begin(), bloch.end());
  return s;
}

ChainModel chain_from(const std::string& kind, int n, double h) {
  return ChainModel::homogeneous(kind == "ising" ? ChainKind::Ising : ChainKind::XY,
                                 n, h);
}

}  // namespace

PYBIND11_MODULE(_qproc, m) {
  m.doc() = "quantum process learning from randomized experiments";
  m.attr("__version__") = "0.1.0";

  m.def("pauli_weight",
        [](const std::string& p) { return PauliString::from_string(p).weight(); });

  m.def("pauli_p_norm",
        [](const Terms& terms, double p) { return op_from(terms).pauli_p_norm(p); });

  m.def("truncate", [](const Terms& terms, int k) {
    return op_to(op_from(terms).truncate(k));
  });

  m.def("expectation_on_product", [](const std::string& p, const BlochList& bloch) {
    return state_from(bloch).expect(PauliString::from_string(p));
  });

  m.def("shadow_norm_pauli", [](const std::string& p) {
    return shadow_norm_pauli(PauliString::from_string(p));
  });

  m.def("shadow_estimate",
        [](const std::vector<std::vector<std::string>>& snapshots, const Terms& terms) {
          std::vector<std::vector<StabLabel>> labels;
          labels.reserve(snapshots.size());
          for (const auto& snap : snapshots) {
            std::vector<StabLabel> row;
            row.reserve(snap.size());
            for (const auto& s : snap) row.push_back(label_from_str(s));
            labels.push_back(std::move(row));
          }
          return shadow_estimate(labels, op_from(terms));
        });

  m.def(
      "gen_chain_dataset",
      [](const std::string& kind, int n, double field, double t, int rows, int shots,
         uint64_t seed, const std::string& path) {
        const ChainModel model = chain_from(kind, n, field);
        ProcessShadow shadow = gen_chain_dataset(model, t, rows, shots, seed);
        write_process_shadow(shadow, path, nlohmann::json{{"version", "0.1.0"}});
      },
      py::arg("kind"), py::arg("n"), py::arg("field"), py::arg("t"), py::arg("rows"),
      py::arg("shots"), py::arg("seed"), py::arg("path"));

  m.def(
      "chain_expect_z",
      [](const std::string& kind, int n, double field, double t, const BlochList& bloch) {
        const ChainModel model = chain_from(kind, n, field);
        return expectation_z_all(MajoranaRotation(model).at(t), state_from(bloch));
      },
      py::arg("kind"), py::arg("n"), py::arg("field"), py::arg("t"), py::arg("bloch"));

  m.def(
      "heisenberg_z",
      [](const std::string& kind, int n, double field, int site, double t) {
        return op_to(heisenberg_z(chain_from(kind, n, field), site, t));
      },
      py::arg("kind"), py::arg("n"), py::arg("field"), py::arg("site"), py::arg("t"));

  m.def(
      "learn_process_file",
      [](const std::string& path, const std::string& observable_id,
         const std::string& mode, double eps, double eps_prime) {
        const ProcessShadow shadow = read_process_shadow(path);
        LearnerConfig config;
        config.mode = mode == "process-setting2" ? LearnerMode::ProcessSetting2
                                                  : LearnerMode::ProcessSetting1;
        config.eps = eps;
        config.eps_prime = eps_prime;
        const int col = shadow.index_of(observable_id);
        PauliString z(shadow.n);
        const std::string& id = shadow.observable_ids[col];
        z.set(std::stoi(id.substr(id.find('_') + 1)) - 1, PauliLetter::Z);
        SparsePauliOp obs(shadow.n);
        obs.add(z, 1.0);
        return op_to(learn_process(shadow, obs, observable_id, config).coefficients);
      },
      py::arg("path"), py::arg("observable_id"), py::arg("mode") = "process-setting1",
      py::arg("eps") = 0.4, py::arg("eps_prime") = 0.4);

  m.def(
      "lasso_fit",
      [](const std::vector<BlochList>& states, const std::vector<double>& y, int k,
         double a, bool geometric) {
        if (states.empty() || states.size() != y.size())
          throw std::invalid_argument("states/labels size mismatch");
        std::vector<TrainRow> rows(states.size());
        for (size_t i = 0; i < states.size(); ++i)
          rows[i] = {state_from(states[i]), y[i]};
        return op_to(lasso_fit(rows, rows[0].state.n(), k, a, geometric));
      },
      py::arg("states"), py::arg("y"), py::arg("k"), py::arg("a"),
      py::arg("geometric") = true);

  m.def(
      "predict",
      [](const Terms& model, double theta_hat, const BlochList& bloch) {
        LearnedObservable learned;
        learned.coefficients = op_from(model);
        learned.theta_hat = theta_hat;
        return learned.predict(state_from(bloch));
      },
      py::arg("model"), py::arg("theta_hat"), py::arg("bloch"));

  m.def(
      "optimize_hamiltonian",
      [](const Terms& terms, int runs, int d_e, uint64_t seed) {
        const SparsePauliOp h = op_from(terms);
        const int k = h.without_identity().max_weight();
        const ExpansionProfile profile =
            expansion_coefficient(h, d_e > 0 ? d_e : k);
        Rng rng(seed);
        double sum_abs = 0.0;
        OptResult last;
        for (int run = 0; run < runs; ++run) {
          last = optimize(h, profile, rng);
          sum_abs += std::abs(last.margin);
        }
        py::dict out;
        out["mean_abs_margin"] = sum_abs / runs;
        out["theorem_bound"] =
            norm_constant_expansion(profile.c_e, profile.d_e, k) *
            h.without_identity().pauli_p_norm(profile.r);
        out["last_value"] = last.value;
        out["last_t_star"] = last.t_star;
        out["last_direction"] = last.maximizing ? "max" : "min";
        return out;
      },
      py::arg("terms"), py::arg("runs") = 100, py::arg("d_e") = 0, py::arg("seed") = 1);

  m.def("norm_constant_klocal", &norm_constant_klocal);
  m.def("norm_constant_bounded", &norm_constant_bounded);

  m.def(
      "verify_norm_inequality",
      [](const Terms& terms, const std::string& kind) {
        const InequalityReport report = verify_inequality(
            op_from(terms), kind == "bounded" ? NormKind::BoundedDegree
                                              : NormKind::GeneralKLocal);
        return py::make_tuple(report.lhs, report.rhs, report.holds);
      },
      py::arg("terms"), py::arg("kind") = "general");
}
