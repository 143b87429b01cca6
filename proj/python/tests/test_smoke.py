# Copyright 2026 The mcomplete Authors. All Rights Reserved.
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

import numpy as np
import pytest

import mcomplete as mc


def test_full_reveal_recovers_exactly():
    f = mc.random_low_rank(30, 20, 2, [2.0, 1.0], seed=3)
    e = mc.reveal(f, "uniform", 600, seed=4)
    assert len(e) == 600
    res = mc.complete(e, 2)
    assert res["cleaned"]
    assert mc.rmse(f, res["reconstruction"])["rel_frobenius"] < 1e-5
    tight = mc.complete(e, 2, fit_tol=1e-24, grad_tol=0.0, max_iters=5000)
    assert mc.rmse(f, tight["reconstruction"])["rel_frobenius"] < 1e-8


def test_reveal_is_deterministic():
    f = mc.random_low_rank(40, 40, 1, seed=1)
    a = mc.reveal(f, "uniform", 300, seed=9).triplets()
    b = mc.reveal(f, "uniform", 300, seed=9).triplets()
    assert a == b
    assert mc.reveal(f, "uniform", 300, seed=10).triplets() != a


def test_sparse_round_trip(tmp_path):
    e = mc.SparseObserved(3, 4, [0, 2], [1, 3], [1.5, -2.0])
    d = e.to_dense()
    assert d.shape == (3, 4)
    assert d[0, 1] == 1.5 and d[2, 3] == -2.0
    path = str(tmp_path / "e.mtx")
    mc.write_matrix_market(path, e)
    assert mc.read_matrix_market(path).triplets() == e.triplets()


def test_distances_and_svd():
    rng = np.random.default_rng(0)
    q, _ = np.linalg.qr(rng.standard_normal((10, 2)))
    x = np.sqrt(10) * q
    d = mc.distances(x, x)
    assert d["geodesic"] == pytest.approx(0.0, abs=1e-7)
    e = mc.SparseObserved(5, 4, [0, 1, 2], [0, 1, 2], [3.0, 2.0, 1.0])
    _, s, _ = mc.top_r_svd(e, 2)
    assert s == pytest.approx([3.0, 2.0], rel=1e-10)


def test_errors_map_to_python_exceptions(tmp_path):
    f = mc.random_low_rank(10, 10, 1, seed=1)
    with pytest.raises(ValueError):
        mc.reveal(f, "uniform", 101)
    with pytest.raises(mc.DataError):
        mc.read_matrix_market(str(tmp_path / "missing.mtx"))


def test_run_experiment():
    spec = {
        "kind": "rmse_scaling",
        "dims": [60],
        "ranks": [2],
        "eps": [8.0, 16.0],
        "sigma": [1.5, 1.0],
        "seeds": [1, 2],
    }
    summary, runs = mc.run_experiment(spec)
    assert len(runs) == 4
    assert summary["failures"] == 0
    assert len(summary["groups"]) == 2
