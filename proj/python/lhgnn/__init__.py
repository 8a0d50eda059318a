# Copyright 2026 The LHGNN Authors. All Rights Reserved.
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
# ==============================================================================
"""Python bindings for the lhgnn C++ core."""

import json

from lhgnn._lhgnn import (
    ConfigError,
    DimensionError,
    Error,
    FormatError,
    MetricError,
    NumericError,
    ParameterError,
    StateError,
    accuracy,
    fuzzy_cmeans,
    kmeans,
    knn,
    logmel,
    max_relative,
    mean_average_precision,
    memberships,
)
from lhgnn._lhgnn import Model as _Model


class Model(_Model):
  """Classifier built from a model config dict, e.g. {"preset": "tiny"}."""

  def __init__(self, config=None, seed=0):
    super().__init__(json.dumps(config or {}), seed)


__all__ = [
    "ConfigError", "DimensionError", "Error", "FormatError", "MetricError",
    "Model", "NumericError", "ParameterError", "StateError", "accuracy",
    "fuzzy_cmeans", "kmeans", "knn", "logmel", "max_relative",
    "mean_average_precision", "memberships",
]
