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

"""Low-rank matrix completion: trimming, spectral projection and Grassmann cleaning."""

import json

from ._core import (
    DataError,
    LowRankFactors,
    NumericalError,
    SparseObserved,
    __version__,
    complete,
    cost_f,
    distances,
    principal_angles,
    project_tr,
    random_low_rank,
    read_factors,
    read_matrix_market,
    reveal,
    rmse,
    solve_s,
    top_r_svd,
    trim,
    write_factors,
    write_matrix_market,
)
from ._core import _run_experiment


def run_experiment(spec):
    """Runs an experiment grid. `spec` holds the keys of the "spec" object in
    a run record; missing keys take their defaults. Returns (summary, runs)."""
    summary, runs = _run_experiment(json.dumps(spec))
    return json.loads(summary), [json.loads(r) for r in runs]


__all__ = [
    "DataError",
    "LowRankFactors",
    "NumericalError",
    "SparseObserved",
    "__version__",
    "complete",
    "cost_f",
    "distances",
    "principal_angles",
    "project_tr",
    "random_low_rank",
    "read_factors",
    "read_matrix_market",
    "reveal",
    "rmse",
    "run_experiment",
    "solve_s",
    "top_r_svd",
    "trim",
    "write_factors",
    "write_matrix_market",
]
