// Copyright 2026 The graphseq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace graphseq {

inline constexpr std::string_view kVersion = "1.0.0";

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON syntax or layout).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input that is well-formed but disagrees with the schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class OrderingError : public Error {
 public:
  using Error::Error;
};

/// Graph needs more node tokens than the vocabulary provides.
class BudgetError : public Error {
 public:
  using Error::Error;
};

class VocabError : public Error {
 public:
  using Error::Error;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

/// Dense index tagged with the domain it indexes into.
template <typename Tag>
struct StrongIndex {
  std::uint32_t value = 0;

  constexpr StrongIndex() = default;
  constexpr explicit StrongIndex(std::uint32_t v) : value(v) {}
  constexpr explicit StrongIndex(std::size_t v) : value(static_cast<std::uint32_t>(v)) {}
  constexpr explicit StrongIndex(int v) : value(static_cast<std::uint32_t>(v)) {}

  constexpr auto operator<=>(const StrongIndex&) const = default;
};

using NodeTypeId = StrongIndex<struct NodeTypeTag>;
using EdgeTypeId = StrongIndex<struct EdgeTypeTag>;

/// Fixed-width bitset sized at runtime. Used for logit masks.
class TokenMask {
 public:
  TokenMask() = default;
  explicit TokenMask(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const { return size_; }

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(std::size_t i) const {
    return i < size_ && ((words_[i >> 6] >> (i & 63)) & 1u) != 0;
  }

  void set_range(std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i) set(i);
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  bool none() const {
    for (auto w : words_) {
      if (w != 0) return false;
    }
    return true;
  }

  /// Position of the n-th set bit (0-based). Requires n < count().
  std::size_t nth(std::size_t n) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      auto w = words_[wi];
      auto c = static_cast<std::size_t>(std::popcount(w));
      if (n >= c) {
        n -= c;
        continue;
      }
      while (n-- > 0) w &= w - 1;
      return wi * 64 + static_cast<std::size_t>(std::countr_zero(w));
    }
    throw std::out_of_range("TokenMask::nth past last set bit");
  }

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      auto w = words_[wi];
      while (w != 0) {
        f(wi * 64 + static_cast<std::size_t>(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  std::vector<std::uint32_t> to_vector() const {
    std::vector<std::uint32_t> out;
    out.reserve(count());
    for_each([&](std::size_t i) { out.push_back(static_cast<std::uint32_t>(i)); });
    return out;
  }

  friend bool operator==(const TokenMask&, const TokenMask&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// 64-bit FNV-1a. Stable across platforms; used for fingerprints, not security.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t seed = 0xcbf29ce484222325ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace graphseq
