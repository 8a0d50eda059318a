/* Copyright 2026 The LHGNN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef LHGNN_ERRORS_HPP_
#define LHGNN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace lhgnn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or extent mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Argument outside its admissible range (k >= N, std <= 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed file, manifest, or checkpoint directory.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Operation called out of order, e.g. backward before forward.
class StateError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced or consumed.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Metric has no defined value for the given inputs.
class MetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace lhgnn

#endif  // LHGNN_ERRORS_HPP_
