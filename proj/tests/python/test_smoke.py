# Copyright 2026 The connshift Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import math

import numpy as np
import pytest
from scipy import stats
from sklearn.metrics import cohen_kappa_score

import connshift


def test_pearson_matches_scipy():
    rng = np.random.default_rng(0)
    x = rng.normal(size=30)
    y = 0.5 * x + rng.normal(size=30)
    r, p = connshift.pearson(x.tolist(), y.tolist())
    ref = stats.pearsonr(x, y)
    assert r == pytest.approx(ref[0], abs=1e-12)
    assert p == pytest.approx(ref[1], rel=1e-9)


def test_pearson_constant_input_is_undefined():
    with pytest.raises(connshift.UndefinedError):
        connshift.pearson([1.0, 2.0, 3.0], [4.0, 4.0, 4.0])


def test_kappa_matches_sklearn():
    a = ["x", "y", "y", "z", "x", "y", "z", "z"]
    b = ["x", "y", "z", "z", "y", "y", "z", "x"]
    assert connshift.cohen_kappa(a, b) == pytest.approx(cohen_kappa_score(a, b))


def test_gumbel_softmax_formula():
    p = [0.1, 0.2, 0.7]
    noise = [0.3, -1.2, 0.5]
    tau = 0.4
    z = (np.log(p) + np.array(noise)) / tau
    want = np.exp(z - z.max())
    want /= want.sum()
    assert connshift.gumbel_softmax(p, tau, noise) == pytest.approx(want.tolist())
    assert sum(connshift.sample_gumbel(p, 1.0, 3)) == pytest.approx(1.0)


def test_losses():
    assert connshift.combine_joint_loss(2.0, 3.0) == 4.0
    assert connshift.cross_entropy([0.25, 0.75], 1) == pytest.approx(-math.log(0.75))
    assert connshift.entropy([0.5, 0.5]) == pytest.approx(math.log(2))


def test_filtering():
    rows = [("a1", "A", 0.9), ("a2", "A", 0.5), ("b1", "B", 0.8)]
    assert connshift.relation_thresholds(rows) == pytest.approx({"A": 0.7, "B": 0.8})
    assert connshift.filter_indices(rows) == [0, 2]
    assert connshift.filter_indices([("g", "G", 0.65), ("h", "G", 0.75)], floor=0.6) == [0, 1]


def test_audit():
    assert connshift.categorize("Expansion", "Expansion") == "none"
    assert connshift.categorize("Temporal", "Expansion") == "case1"
    assert connshift.categorize("Temporal;Expansion", "Expansion") == "case2"
    assert connshift.categorize("NoRel", "Expansion") == "case3"
    counts = connshift.categorize_shifts([("A", "A"), ("B", "A"), ("NoRel", "A")])
    assert counts == {"pairs": 3, "shift_num": 2, "case1": 1, "case2": 0, "case3": 1}
    with pytest.raises(connshift.DataError):
        connshift.categorize("NoRel;A", "A")


def test_gbdt_copied_feature():
    rng = np.random.default_rng(1)
    rows = rng.integers(0, 2, size=(200, 3)).astype(float)
    imp = connshift.gbdt_importance(rows.tolist(), rows[:, 1].tolist())
    assert sum(imp) == pytest.approx(1.0)
    assert imp[1] > 0.99


def test_run_experiment_on_synthetic(tmp_path):
    planted = connshift.write_synthetic(str(tmp_path / "corpus"))
    assert planted == pytest.approx(0.3)
    report = connshift.run_experiment(
        dataset="tsv",
        data_root=tmp_path / "corpus",
        mode="common",
        seeds=[1],
    )
    assert report["mode"] == "common"
    assert 0.0 < report["accuracy"]["mean"] <= 1.0
    with pytest.raises(connshift.ConfigError):
        connshift.run_experiment(mode="nonsense")
