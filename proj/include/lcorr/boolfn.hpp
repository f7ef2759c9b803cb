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
#include <array>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lcorr/bits.hpp"
#include "lcorr/errors.hpp"
#include "lcorr/random.hpp"

namespace lcorr {

// Explicit tables are bit-packed; 2^24 entries is 2 MiB.
inline constexpr std::size_t kMaxTableVars = 24;

namespace detail {

inline void check_table_vars(std::size_t n, const char* what) {
  if (n > kMaxTableVars) {
    throw CapacityExceeded(std::string(what) + ": " + std::to_string(n) +
                           " variables exceeds the explicit-table limit of " +
                           std::to_string(kMaxTableVars));
  }
}

// Fixed-length packed bit array.
class PackedBits {
 public:
  PackedBits() = default;
  explicit PackedBits(std::size_t size) : size_(size), words_(words_for(size), 0) {}
  PackedBits(std::size_t size, std::vector<std::uint64_t> words) : size_(size), words_(std::move(words)) {
    if (words_.size() != words_for(size)) throw InvalidArgument("packed table has the wrong word count");
  }

  std::size_t size() const { return size_; }
  bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v) {
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    words_[i >> 6] = v ? (words_[i >> 6] | bit) : (words_[i >> 6] & ~bit);
  }
  std::span<const std::uint64_t> words() const { return words_; }

  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  void randomize(Rng& rng) { rng.fill_bits(words_, size_); }

  friend bool operator==(const PackedBits&, const PackedBits&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace detail

// Full table of f: {0,1}^n -> {0,1}; entry x is f at the point whose bit i is x_i.
class TruthTable {
 public:
  TruthTable() = default;
  explicit TruthTable(std::size_t n) : n_(n), bits_((detail::check_table_vars(n, "TruthTable"), std::size_t{1} << n)) {}
  TruthTable(std::size_t n, std::vector<std::uint64_t> words)
      : n_(n), bits_((detail::check_table_vars(n, "TruthTable"), std::size_t{1} << n), std::move(words)) {}

  static TruthTable random(std::size_t n, Rng& rng) {
    TruthTable t(n);
    t.bits_.randomize(rng);
    return t;
  }

  std::size_t vars() const { return n_; }
  std::size_t entries() const { return bits_.size(); }
  bool operator[](std::uint64_t index) const { return bits_.get(index); }
  void set(std::uint64_t index, bool v) { bits_.set(index, v); }
  std::span<const std::uint64_t> words() const { return bits_.words(); }
  std::size_t ones() const { return bits_.count(); }

  TruthTable complement() const {
    TruthTable t(n_);
    for (std::size_t i = 0; i < entries(); ++i) t.set(i, !(*this)[i]);
    return t;
  }

  friend bool operator==(const TruthTable&, const TruthTable&) = default;

 private:
  std::size_t n_ = 0;
  detail::PackedBits bits_;
};

// Core of a k-junta: entry z is the output when the j-th junta variable equals z_j.
class JuntaCore {
 public:
  JuntaCore() : JuntaCore(0) {}
  explicit JuntaCore(std::size_t k) : k_(k), bits_((detail::check_table_vars(k, "JuntaCore"), std::size_t{1} << k)) {}
  JuntaCore(std::size_t k, std::vector<std::uint64_t> words)
      : k_(k), bits_((detail::check_table_vars(k, "JuntaCore"), std::size_t{1} << k), std::move(words)) {}

  static JuntaCore random(std::size_t k, Rng& rng) {
    JuntaCore c(k);
    c.bits_.randomize(rng);
    return c;
  }

  static JuntaCore constant(bool v) {
    JuntaCore c(0);
    c.bits_.set(0, v);
    return c;
  }

  template <typename F>
  static JuntaCore from(std::size_t k, F&& fn) {
    JuntaCore c(k);
    for (std::size_t z = 0; z < c.entries(); ++z) c.bits_.set(z, fn(static_cast<std::uint64_t>(z)));
    return c;
  }

  std::size_t arity() const { return k_; }
  std::size_t entries() const { return bits_.size(); }
  bool operator[](std::uint64_t z) const { return bits_.get(z); }
  void set(std::uint64_t z, bool v) { bits_.set(z, v); }
  std::span<const std::uint64_t> words() const { return bits_.words(); }

  friend bool operator==(const JuntaCore&, const JuntaCore&) = default;

 private:
  std::size_t k_;
  detail::PackedBits bits_;
};

// Core of an (n-k)-symmetric function: entry (z, w) is stored at w * 2^k + z,
// where z is the assignment to the k asymmetric variables and w in [0, m] the
// Hamming weight of the m symmetric ones.
class PsfCore {
 public:
  PsfCore() : PsfCore(0, 0) {}
  PsfCore(std::size_t k, std::size_t m)
      : k_(k), m_(m), bits_((detail::check_table_vars(k, "PsfCore"), (std::size_t{1} << k) * (m + 1))) {}
  PsfCore(std::size_t k, std::size_t m, std::vector<std::uint64_t> words)
      : k_(k), m_(m), bits_((detail::check_table_vars(k, "PsfCore"), (std::size_t{1} << k) * (m + 1)), std::move(words)) {}

  static PsfCore random(std::size_t k, std::size_t m, Rng& rng) {
    PsfCore c(k, m);
    c.bits_.randomize(rng);
    return c;
  }

  template <typename F>
  static PsfCore from(std::size_t k, std::size_t m, F&& fn) {
    PsfCore c(k, m);
    for (std::size_t w = 0; w <= m; ++w) {
      for (std::uint64_t z = 0; z < (std::uint64_t{1} << k); ++z) c.set(z, w, fn(z, w));
    }
    return c;
  }

  std::size_t arity() const { return k_; }
  std::size_t symmetric_count() const { return m_; }
  std::size_t entries() const { return bits_.size(); }
  bool operator()(std::uint64_t z, std::size_t w) const { return bits_.get((w << k_) + z); }
  void set(std::uint64_t z, std::size_t w, bool v) { bits_.set((w << k_) + z, v); }
  std::span<const std::uint64_t> words() const { return bits_.words(); }

  friend bool operator==(const PsfCore&, const PsfCore&) = default;

 private:
  std::size_t k_;
  std::size_t m_;
  detail::PackedBits bits_;
};

// Permutation sigma of the variables; f_sigma(x) = f(x_sigma(0), ..., x_sigma(n-1)).
class Isomorphism {
 public:
  Isomorphism() = default;
  explicit Isomorphism(std::vector<std::uint32_t> perm) : perm_(std::move(perm)) {
    std::vector<bool> seen(perm_.size(), false);
    for (auto p : perm_) {
      if (p >= perm_.size() || seen[p]) throw InvalidArgument("isomorphism is not a permutation");
      seen[p] = true;
    }
  }

  static Isomorphism identity(std::size_t n) {
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    return Isomorphism(std::move(p));
  }

  static Isomorphism random(std::size_t n, Rng& rng) {
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    rng.shuffle(std::span(p));
    return Isomorphism(std::move(p));
  }

  std::size_t size() const { return perm_.size(); }
  std::uint32_t operator()(std::size_t i) const { return perm_[i]; }
  const std::vector<std::uint32_t>& perm() const { return perm_; }

  bool is_identity() const {
    for (std::size_t i = 0; i < perm_.size(); ++i) {
      if (perm_[i] != i) return false;
    }
    return true;
  }

  Isomorphism inverse() const {
    std::vector<std::uint32_t> inv(perm_.size());
    for (std::size_t i = 0; i < perm_.size(); ++i) inv[perm_[i]] = static_cast<std::uint32_t>(i);
    return Isomorphism(std::move(inv));
  }

  // (outer o inner)(i) = outer(inner(i)).
  friend Isomorphism compose(const Isomorphism& outer, const Isomorphism& inner) {
    if (outer.size() != inner.size()) throw DimensionMismatch("compose", outer.size(), inner.size());
    std::vector<std::uint32_t> p(inner.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = outer.perm_[inner.perm_[i]];
    return Isomorphism(std::move(p));
  }

  // The point (x_sigma(0), ..., x_sigma(n-1)).
  BitVector apply(BitSpan x) const {
    if (x.n != perm_.size()) throw DimensionMismatch("Isomorphism::apply", perm_.size(), x.n);
    BitVector y(x.n);
    for (std::size_t i = 0; i < perm_.size(); ++i) {
      if (x[perm_[i]]) y.set(i);
    }
    return y;
  }

  friend bool operator==(const Isomorphism&, const Isomorphism&) = default;

 private:
  std::vector<std::uint32_t> perm_;
};

// Uniform, immutable evaluation facade over explicit tables, juntas and
// partially symmetric functions. Copies share the explicit table.
class FunctionView {
 public:
  enum class Kind { table, junta, psf };

  FunctionView() : FunctionView(junta(JuntaCore::constant(false), {}, 0)) {}

  static FunctionView table(TruthTable t) {
    FunctionView v;
    v.n_ = t.vars();
    v.impl_ = std::make_shared<const TruthTable>(std::move(t));
    return v;
  }

  static FunctionView junta(JuntaCore core, std::vector<std::uint32_t> positions, std::size_t n) {
    if (core.arity() != positions.size()) {
      throw InvalidArgument("junta core arity " + std::to_string(core.arity()) + " does not match " +
                            std::to_string(positions.size()) + " positions");
    }
    check_positions(positions, n);
    return FunctionView(n, std::move(core), std::move(positions));
  }

  static FunctionView psf(PsfCore core, std::vector<std::uint32_t> positions, std::size_t n) {
    if (core.arity() != positions.size()) {
      throw InvalidArgument("psf core arity " + std::to_string(core.arity()) + " does not match " +
                            std::to_string(positions.size()) + " positions");
    }
    if (core.arity() + core.symmetric_count() != n) {
      throw DimensionMismatch("psf core", n, core.arity() + core.symmetric_count());
    }
    check_positions(positions, n);
    return FunctionView(n, std::move(core), std::move(positions));
  }

  static FunctionView constant(std::size_t n, bool value) {
    return junta(JuntaCore::constant(value), {}, n);
  }

  Kind kind() const { return static_cast<Kind>(impl_.index()); }
  std::size_t dims() const { return n_; }
  const std::vector<std::uint32_t>& positions() const { return positions_; }

  const TruthTable& truth_table() const { return *std::get<TablePtr>(impl_); }
  const JuntaCore& junta_core() const { return std::get<JuntaCore>(impl_); }
  const PsfCore& psf_core() const { return std::get<PsfCore>(impl_); }

  // Unchecked evaluation; callers guarantee x.n == dims().
  bool eval_unchecked(BitSpan x) const {
    return std::visit([&](const auto& impl) { return eval_impl(impl, x); }, impl_);
  }

  bool operator()(BitSpan x) const {
    if (x.n != n_) throw DimensionMismatch("eval", n_, x.n);
    return eval_unchecked(x);
  }

  // out[i] = f(points[i]).
  void evaluate(const PointSet& points, std::span<std::uint8_t> out) const {
    if (points.dims() != n_) throw DimensionMismatch("evaluate", n_, points.dims());
    std::visit(
        [&](const auto& impl) {
          for (std::size_t i = 0; i < points.size(); ++i) out[i] = eval_impl(impl, points[i]) ? 1 : 0;
        },
        impl_);
  }

  friend bool operator==(const FunctionView& a, const FunctionView& b) {
    if (a.n_ != b.n_ || a.positions_ != b.positions_ || a.impl_.index() != b.impl_.index()) return false;
    if (a.kind() == Kind::table) return a.truth_table() == b.truth_table();
    return a.impl_ == b.impl_;
  }

 private:
  using TablePtr = std::shared_ptr<const TruthTable>;

  template <typename Core>
  FunctionView(std::size_t n, Core core, std::vector<std::uint32_t> positions)
      : n_(n), impl_(std::move(core)), positions_(std::move(positions)) {}

  static void check_positions(const std::vector<std::uint32_t>& positions, std::size_t n) {
    std::vector<bool> seen(n, false);
    for (auto p : positions) {
      if (p >= n) throw InvalidArgument("position " + std::to_string(p) + " out of range for n=" + std::to_string(n));
      if (seen[p]) throw InvalidArgument("duplicate position " + std::to_string(p));
      seen[p] = true;
    }
  }

  std::uint64_t core_index(BitSpan x) const {
    std::uint64_t z = 0;
    for (std::size_t j = 0; j < positions_.size(); ++j) z |= static_cast<std::uint64_t>(x[positions_[j]]) << j;
    return z;
  }

  bool eval_impl(const TablePtr& t, BitSpan x) const { return (*t)[x.index()]; }
  bool eval_impl(const JuntaCore& c, BitSpan x) const { return c[core_index(x)]; }
  bool eval_impl(const PsfCore& c, BitSpan x) const {
    const std::uint64_t z = core_index(x);
    return c(z, x.weight() - static_cast<std::size_t>(std::popcount(z)));
  }

  std::size_t n_ = 0;
  std::variant<TablePtr, JuntaCore, PsfCore> impl_;
  std::vector<std::uint32_t> positions_;
};

inline bool eval(const FunctionView& f, BitSpan x) { return f(x); }

// Every point of {0,1}^n for n <= 24, visited in index order.
template <typename F>
void for_each_point(std::size_t n, F&& fn) {
  detail::check_table_vars(n, "exhaustive enumeration");
  std::uint64_t word = 0;
  const BitSpan x{std::span<const std::uint64_t>(&word, n == 0 ? 0 : 1), n};
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i) {
    word = i;
    fn(i, x);
  }
}

inline TruthTable to_table(const FunctionView& f) {
  TruthTable t(f.dims());
  if (f.kind() == FunctionView::Kind::table) return f.truth_table();
  for_each_point(f.dims(), [&](std::uint64_t i, BitSpan x) { t.set(i, f.eval_unchecked(x)); });
  return t;
}

// The view of f_sigma. Junta and psf views only have their positions rewritten.
inline FunctionView apply_isomorphism(const FunctionView& f, const Isomorphism& sigma) {
  if (sigma.size() != f.dims()) throw DimensionMismatch("apply_isomorphism", f.dims(), sigma.size());
  const std::size_t n = f.dims();
  switch (f.kind()) {
    case FunctionView::Kind::junta:
    case FunctionView::Kind::psf: {
      std::vector<std::uint32_t> pos(f.positions().size());
      for (std::size_t j = 0; j < pos.size(); ++j) pos[j] = sigma(f.positions()[j]);
      return f.kind() == FunctionView::Kind::junta ? FunctionView::junta(f.junta_core(), std::move(pos), n)
                                                   : FunctionView::psf(f.psf_core(), std::move(pos), n);
    }
    case FunctionView::Kind::table:
      break;
  }
  // Table: T'[x] = T[x_sigma]. Bit sigma(i) of x lands in bit i of x_sigma; the
  // remap is done a byte of x at a time.
  const Isomorphism inv = sigma.inverse();
  const std::size_t chunks = (n + 7) / 8;
  std::vector<std::array<std::uint64_t, 256>> lut(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    for (unsigned v = 0; v < 256; ++v) {
      std::uint64_t out = 0;
      for (unsigned b = 0; b < 8; ++b) {
        const std::size_t src = 8 * c + b;
        if (src < n && ((v >> b) & 1u)) out |= std::uint64_t{1} << inv(src);
      }
      lut[c][v] = out;
    }
  }
  const TruthTable& src = f.truth_table();
  TruthTable dst(n);
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    std::uint64_t y = 0;
    for (std::size_t c = 0; c < chunks; ++c) y |= lut[c][(x >> (8 * c)) & 0xff];
    dst.set(x, src[y]);
  }
  return FunctionView::table(std::move(dst));
}

// Exact fraction of points where f and g differ (n <= 24).
inline double distance_exact(const FunctionView& f, const FunctionView& g) {
  if (f.dims() != g.dims()) throw DimensionMismatch("distance", f.dims(), g.dims());
  const std::size_t n = f.dims();
  detail::check_table_vars(n, "exact distance");
  std::uint64_t diff = 0;
  if (f.kind() == FunctionView::Kind::table && g.kind() == FunctionView::Kind::table) {
    auto a = f.truth_table().words();
    auto b = g.truth_table().words();
    for (std::size_t i = 0; i < a.size(); ++i) diff += static_cast<std::uint64_t>(std::popcount(a[i] ^ b[i]));
  } else {
    for_each_point(n, [&](std::uint64_t, BitSpan x) { diff += f.eval_unchecked(x) != g.eval_unchecked(x); });
  }
  return static_cast<double>(diff) / static_cast<double>(std::uint64_t{1} << n);
}

// Empirical disagreement over uniform samples.
inline double distance_sampled(const FunctionView& f, const FunctionView& g, std::size_t samples,
                               std::uint64_t seed) {
  if (f.dims() != g.dims()) throw DimensionMismatch("distance", f.dims(), g.dims());
  if (samples == 0) throw InvalidArgument("sampled distance needs at least one sample");
  Rng rng(seed);
  BitVector x(f.dims());
  std::size_t diff = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    rng.fill_bits(x.words(), x.size());
    diff += f.eval_unchecked(x) != g.eval_unchecked(x);
  }
  return static_cast<double>(diff) / static_cast<double>(samples);
}

struct ExactDistance {};
struct SampledDistance {
  std::size_t samples;
  std::uint64_t seed;
};

inline double distance(const FunctionView& f, const FunctionView& g, ExactDistance = {}) {
  return distance_exact(f, g);
}
inline double distance(const FunctionView& f, const FunctionView& g, SampledDistance mode) {
  return distance_sampled(f, g, mode.samples, mode.seed);
}

}  // namespace lcorr
