import math
import os
import tempfile

import _qproc as q


def test_version():
    assert q.__version__ == "0.1.0"


def test_pauli_basics():
    assert q.pauli_weight("XIZY") == 3
    assert q.pauli_weight("II") == 0
    terms = [("ZZ", 0.5), ("XI", 0.25)]
    assert math.isclose(q.pauli_p_norm(terms, 1.0), 0.75)
    kept = dict(q.truncate(terms + [("XX", 0.1)], 1))
    assert "XI" in kept and "ZZ" not in kept


def test_expectations_and_shadow_norm():
    bloch = [(0.0, 0.0, 1.0), (1.0, 0.0, 0.0)]
    assert q.expectation_on_product("ZI", bloch) == 1.0
    assert q.expectation_on_product("ZX", bloch) == 1.0
    assert q.expectation_on_product("ZZ", bloch) == 0.0
    assert math.isclose(q.shadow_norm_pauli("XX"), 3.0)


def test_shadow_estimate_identity():
    snaps = [["Z+", "X-"], ["Z+", "Y+"]]
    assert q.shadow_estimate(snaps, [("ZI", 1.0)]) == 3.0
    assert q.shadow_estimate(snaps, [("XI", 1.0)]) == 0.0


def test_fermion_round_trip():
    bloch = [(0.0, 0.0, 1.0)] * 6
    z0 = q.chain_expect_z("xy", 6, 0.5, 0.0, bloch)
    assert all(math.isclose(v, 1.0, abs_tol=1e-12) for v in z0)
    terms = dict(q.heisenberg_z("xy", 6, 0.5, 2, 0.0))
    assert math.isclose(terms["IIZIII"], 1.0)
    # norm conservation at long time
    weights = q.heisenberg_z("ising", 6, 0.5, 3, 1e6)
    assert math.isclose(sum(c * c for _, c in weights), 1.0, rel_tol=1e-8)


def test_dataset_and_learning_pipeline():
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "data.jsonl")
        q.gen_chain_dataset("xy", 6, 0.5, 0.0, 2000, 500, 7, path)
        model = dict(q.learn_process_file(path, "Z_3", "process-setting1", 0.4, 0.4))
        assert math.isclose(model.get("IIZIII", 0.0), 1.0, abs_tol=0.15)


def test_lasso_and_predict():
    states = [[(0, 0, 1), (0, 0, -1)], [(0, 0, -1), (0, 0, -1)],
              [(0, 0, 1), (0, 0, 1)], [(1, 0, 0), (0, 0, 1)],
              [(0, 0, -1), (0, 0, 1)], [(0, 1, 0), (0, 0, -1)]] * 20
    y = [b[0][2] for b in states]
    model = q.lasso_fit(states, y, 1, 1e-6)
    coeffs = dict(model)
    assert math.isclose(coeffs.get("ZI", 0.0), 1.0, abs_tol=1e-3)
    pred = q.predict(model, float("inf"), [(0, 0, -1), (1, 0, 0)])
    assert math.isclose(pred, -1.0, abs_tol=1e-3)


def test_optimizer_and_norms():
    report = q.optimize_hamiltonian([("ZZII", 1.0), ("IZZI", -0.5)], runs=200, seed=3)
    assert report["mean_abs_margin"] >= report["theorem_bound"]
    lhs, rhs, holds = q.verify_norm_inequality([("ZZ", 1.0), ("XI", -0.4)])
    assert holds and lhs <= rhs
    assert 0.0 < q.norm_constant_klocal(2) < 1.0
