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

#ifndef LHGNN_BINARY_IO_HPP_
#define LHGNN_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "lhgnn/errors.hpp"

// Little-endian scalar IO shared by the WAV, feature-cache and checkpoint
// readers.
namespace lhgnn::binary {

template <typename V>
V byteswap_if_big(V v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(V)];
    std::memcpy(bytes, &v, sizeof(V));
    for (std::size_t i = 0; i < sizeof(V) / 2; ++i) std::swap(bytes[i], bytes[sizeof(V) - 1 - i]);
    std::memcpy(&v, bytes, sizeof(V));
  }
  return v;
}

template <typename V>
void put(std::ostream& out, V v) {
  v = byteswap_if_big(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(V));
}

template <typename V>
V get(std::istream& in, const std::string& what) {
  V v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(V))) {
    throw FormatError("truncated " + what);
  }
  return byteswap_if_big(v);
}

}  // namespace lhgnn::binary

#endif  // LHGNN_BINARY_IO_HPP_
