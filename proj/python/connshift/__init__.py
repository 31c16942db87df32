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


"""Label shift analysis and mitigation for discourse relation classifiers."""

import json as _json

from ._connshift import (
    ConfigError,
    DataError,
    Error,
    IoError,
    UndefinedError,
    UsageError,
    categorize,
    categorize_shifts,
    cohen_kappa,
    combine_joint_loss,
    cross_entropy,
    entropy,
    filter_indices,
    gbdt_importance,
    gumbel_softmax,
    pearson,
    relation_thresholds,
    sample_gumbel,
    write_synthetic,
)
from ._connshift import run_experiment_json as _run_experiment_json


def run_experiment(config=None, **overrides):
    """Run one experiment mode and return the report as a dict.

    `config` is the text of a key = value config file; keyword arguments
    are appended as further assignments and win over it.
    """
    lines = [config or ""]
    for key, value in overrides.items():
        if isinstance(value, (list, tuple)):
            value = ",".join(str(v) for v in value)
        lines.append(f"{key} = {value}")
    return _json.loads(_run_experiment_json("\n".join(lines)))


__all__ = [name for name in dir() if not name.startswith("_")]
