# Copyright 2026 The qexpect Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import math
import os
import pathlib

import numpy as np
import pytest

import qexpect as qx

CONFIGS = pathlib.Path(
    os.environ.get("QEXPECT_CONFIG_DIR", pathlib.Path(__file__).resolve().parents[2] / "configs")
)

ZERO = qx.StateVector.basis(2, 0)
ONE = qx.StateVector.basis(2, 1)
X = qx.Observable.rotated(math.pi / 4, 0.0, "X")
Y = qx.Observable.rotated(math.pi / 4, math.pi / 2, "Y")


def test_state_normalizes():
    psi = qx.StateVector([3, 4j])
    assert psi.dim == 2
    assert np.allclose(psi.amplitudes, [0.6, 0.8j])


def test_state_rejects_zero_vector():
    with pytest.raises(qx.InvalidInput):
        qx.StateVector([0, 0])


def test_born_against_rotated_basis():
    dist = qx.born_distribution(ZERO, qx.Observable.rotated(math.pi / 3))
    assert [o for o, _ in dist] == [1.0, -1.0]
    assert dist[0][1] == pytest.approx(0.25, abs=1e-12)
    assert dist[1][1] == pytest.approx(0.75, abs=1e-12)


def test_rabi_quarter_period_flips():
    out = qx.evolve(ZERO, qx.Hamiltonian.rabi(1.0), math.pi / 2)
    assert out.same_ray(ONE)
    u = qx.Hamiltonian.rabi(1.0).propagator(0.3)
    assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-12)


def test_collapse_and_impossible_outcome():
    plus = X.eigenvectors[0]
    assert qx.collapse(plus, qx.Projector.onto(ZERO)).same_ray(ZERO)
    with pytest.raises(qx.ImpossibleOutcome):
        qx.collapse(ZERO, qx.Projector.onto(ONE))


def test_sequential_joint_and_order_effect():
    p = qx.Observable.price()
    joint = qx.sequential_joint(ZERO, p, X)
    assert sum(r[2] for r in joint["rows"]) == pytest.approx(1.0, abs=1e-12)
    ji = qx.sequential_joint(ZERO, X, p)
    assert qx.order_effect_tables(joint, ji) == pytest.approx(qx.order_effect(ZERO, p, X), abs=1e-12)
    assert qx.order_effect(ZERO, p, X) == pytest.approx(0.25, abs=1e-12)


def test_interference_term():
    r = qx.interference_term(ZERO, qx.Projector.onto(ZERO), X)
    assert r["p_direct"] == pytest.approx(1.0, abs=1e-12)
    assert r["p_classical_sum"] == pytest.approx(0.5, abs=1e-12)
    assert r["interference"] == pytest.approx(0.5, abs=1e-12)


def test_uncertainty_saturates_for_pauli_pair():
    r = qx.uncertainty_product(ZERO, X, Y)
    assert r["product"] == pytest.approx(1.0, abs=1e-12)
    assert r["robertson_bound"] == pytest.approx(1.0, abs=1e-12)


def test_classical_helpers():
    assert qx.total_probability([0.4, 0.6], [0.5, 0.25]) == pytest.approx(0.35, abs=1e-12)
    post = qx.bayes_update([0.5, 0.5], [0.2, 0.6])
    assert post == pytest.approx([0.25, 0.75], abs=1e-12)
    with pytest.raises(qx.ImpossibleEvidence):
        qx.bayes_update([1.0, 0.0], [0.0, 0.5])


def test_ensemble_is_seeded_and_near_born():
    psi = qx.StateVector([math.cos(0.4), math.sin(0.4)])
    a = qx.run_ensemble(psi, qx.Observable.price(), 20000, 5)
    b = qx.run_ensemble(psi, qx.Observable.price(), 20000, 5, threads=3)
    assert a == b
    p = math.cos(0.4) ** 2
    assert abs(a[0][1] - p) <= 5 * math.sqrt(p * (1 - p) / 20000)


def test_simulate_market_is_deterministic():
    path = qx.simulate_market(str(CONFIGS / "rabi_market.json"), seed=11)
    again = qx.simulate_market(str(CONFIGS / "rabi_market.json"), seed=11)
    assert path == again
    assert len(path["periods"]) == 5
    for row in path["periods"]:
        assert row["up_fraction"] + row["down_fraction"] == pytest.approx(1.0, abs=1e-12)
        assert row["price_close"] > 0


def test_cli_entry_point():
    code, out, err = qx.run_cli(["born", str(CONFIGS / "two_basis_pi3.json")])
    assert code == 0, err
    assert out.splitlines() == [
        "outcome,probability",
        "1.000000000000,0.250000000000",
        "-1.000000000000,0.750000000000",
    ]
    code, _, _ = qx.run_cli(["born", str(CONFIGS / "missing.json")])
    assert code != 0
