// Copyright 2026 The lcorr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lcorr/errors.hpp"

namespace lcorr {

// Variables are 0-based throughout: variable i lives in bit (i % 64) of word
// (i / 64). For explicit tables this makes variable 0 the least-significant
// bit of the table index.

constexpr std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

// Read-only view of an n-bit point.
struct BitSpan {
  std::span<const std::uint64_t> words;
  std::size_t n = 0;

  bool operator[](std::size_t i) const { return (words[i >> 6] >> (i & 63)) & 1u; }

  std::size_t weight() const {
    std::size_t w = 0;
    for (auto word : words) w += static_cast<std::size_t>(std::popcount(word));
    return w;
  }

  // Integer index of the point; only meaningful for n <= 64.
  std::uint64_t index() const { return words.empty() ? 0 : words[0]; }
};

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t n) : n_(n), words_(words_for(n), 0) {}

  static BitVector from_index(std::size_t n, std::uint64_t index) {
    BitVector v(n);
    if (n > 0) v.words_[0] = n >= 64 ? index : index & ((std::uint64_t{1} << n) - 1);
    return v;
  }

  static BitVector from_span(BitSpan s) {
    BitVector v(s.n);
    std::copy(s.words.begin(), s.words.end(), v.words_.begin());
    return v;
  }

  std::size_t size() const { return n_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  bool operator[](std::size_t i) const { return get(i); }

  void set(std::size_t i, bool value = true) {
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (value) {
      words_[i >> 6] |= bit;
    } else {
      words_[i >> 6] &= ~bit;
    }
  }

  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  std::size_t weight() const { return span().weight(); }
  std::uint64_t index() const { return span().index(); }

  BitSpan span() const { return {words_, n_}; }
  operator BitSpan() const { return span(); }

  std::span<std::uint64_t> words() { return words_; }
  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
};

// Packed list of n-bit points with contiguous storage.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t n, std::size_t count = 0)
      : n_(n), stride_(words_for(n)), data_(count * stride_, 0), count_(count) {}

  std::size_t dims() const { return n_; }
  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  std::size_t stride() const { return stride_; }

  void resize(std::size_t count) {
    count_ = count;
    data_.assign(count * stride_, 0);
  }

  void push_back(BitSpan x) {
    if (x.n != n_) throw DimensionMismatch("PointSet::push_back", n_, x.n);
    data_.insert(data_.end(), x.words.begin(), x.words.end());
    ++count_;
  }

  BitSpan operator[](std::size_t i) const {
    return {std::span<const std::uint64_t>(data_.data() + i * stride_, stride_), n_};
  }

  std::span<std::uint64_t> row(std::size_t i) {
    return {data_.data() + i * stride_, stride_};
  }

 private:
  std::size_t n_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> data_;
  std::size_t count_ = 0;
};

// Hex encoding of a bit string: hex digit j carries bits 4j..4j+3, with bit 4j
// in the digit's least-significant position. Bit i is therefore bit (i % 4) of
// digit (i / 4), read left to right.
namespace hex {

inline std::string encode(std::span<const std::uint64_t> words, std::size_t bits) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out((bits + 3) / 4, '0');
  for (std::size_t j = 0; j < out.size(); ++j) {
    unsigned v = 0;
    for (unsigned b = 0; b < 4; ++b) {
      const std::size_t i = 4 * j + b;
      if (i < bits && ((words[i >> 6] >> (i & 63)) & 1u)) v |= 1u << b;
    }
    out[j] = kDigits[v];
  }
  return out;
}

inline std::vector<std::uint64_t> decode(std::string_view text, std::size_t bits) {
  if (text.size() != (bits + 3) / 4) {
    throw InvalidArgument("hex string has " + std::to_string(text.size()) + " digits, expected " +
                          std::to_string((bits + 3) / 4));
  }
  std::vector<std::uint64_t> words(words_for(bits), 0);
  for (std::size_t j = 0; j < text.size(); ++j) {
    const char c = text[j];
    unsigned v = 0;
    if (c >= '0' && c <= '9') {
      v = static_cast<unsigned>(c - '0');
    } else if (c >= 'a' && c <= 'f') {
      v = static_cast<unsigned>(c - 'a' + 10);
    } else if (c >= 'A' && c <= 'F') {
      v = static_cast<unsigned>(c - 'A' + 10);
    } else {
      throw InvalidArgument(std::string("invalid hex digit '") + c + "'");
    }
    for (unsigned b = 0; b < 4; ++b) {
      const std::size_t i = 4 * j + b;
      if (!((v >> b) & 1u)) continue;
      if (i >= bits) throw InvalidArgument("hex string sets bits past the declared length");
      words[i >> 6] |= std::uint64_t{1} << (i & 63);
    }
  }
  return words;
}

inline std::string encode(BitSpan x) { return encode(x.words, x.n); }

inline BitVector decode_point(std::string_view text, std::size_t n) {
  BitVector v(n);
  auto words = decode(text, n);
  std::copy(words.begin(), words.end(), v.words().begin());
  return v;
}

}  // namespace hex

}  // namespace lcorr
