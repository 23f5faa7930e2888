# Copyright 2026 The Crowdgroups Authors.
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
"""Social group detection in pedestrian crowds."""

from crowdgroups._core import (
    ConfigError,
    ContractError,
    DataError,
    Model,
    ParseError,
    Scene,
    dtw_raw_cost,
    exhaustive_cc,
    f_cdf,
    gmitre_score,
    gmm_eval,
    greedy_cc,
    mitre_score,
    partition_score,
    positive_pairwise_metric,
    predict,
    prepare_windows,
    run_experiment,
    structured_loss,
    synth,
    train,
)

__all__ = [
    "ConfigError",
    "ContractError",
    "DataError",
    "Model",
    "ParseError",
    "Scene",
    "dtw_raw_cost",
    "exhaustive_cc",
    "f_cdf",
    "gmitre_score",
    "gmm_eval",
    "greedy_cc",
    "mitre_score",
    "partition_score",
    "positive_pairwise_metric",
    "predict",
    "prepare_windows",
    "run_experiment",
    "structured_loss",
    "synth",
    "train",
]
