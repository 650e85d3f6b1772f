// Copyright 2026 The s2c-iae Authors.
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

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "s2c/error.hpp"
#include "s2c/text.hpp"

namespace s2c {

using Embedding = std::vector<double>;

inline double dot(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) throw UsageError("embedding dimensions differ");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline void l2_normalize(Embedding& v) {
  double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  if (norm > 0)
    for (double& x : v) x /= norm;
}

/// Sentence-embedding contract. Implementations must be deterministic and
/// safe to call from several threads at once.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual Embedding embed(std::string_view text) const = 0;
  virtual std::size_t dimension() const = 0;
};

/// Signed feature-hashed bag of lower-cased words, L2-normalised. Needs no
/// model weights; texts sharing words get a positive dot product.
class HashingEmbedder final : public Embedder {
 public:
  explicit HashingEmbedder(std::size_t dimension = 256) : dim_(dimension) {
    if (dim_ == 0) throw UsageError("embedding dimension must be positive");
  }

  Embedding embed(std::string_view text) const override {
    Embedding v(dim_, 0.0);
    for (const auto& tok : text::split_whitespace(text)) {
      std::uint64_t h = text::fnv1a64(text::ascii_lower(tok));
      v[h % dim_] += (h >> 63) ? -1.0 : 1.0;
    }
    l2_normalize(v);
    return v;
  }

  std::size_t dimension() const override { return dim_; }

 private:
  std::size_t dim_;
};

/// Looks texts up in a table of precomputed vectors, e.g. exported from a
/// real sentence encoder.
///
/// File format, one row per line:
///
///   <16 hex digits: FNV-1a 64 of the UTF-8 text>\t<v1> <v2> ... <vd>
///
/// Blank lines and lines starting with '#' are ignored. Every row must have
/// the same dimension. Vectors are L2-normalised on load.
class PrecomputedEmbedder final : public Embedder {
 public:
  static std::string key(std::string_view text) { return text::hex64(text::fnv1a64(text)); }

  static PrecomputedEmbedder load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embedding table: " + path);
    return parse(in);
  }

  static PrecomputedEmbedder parse(std::istream& in) {
    PrecomputedEmbedder e;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') continue;
      auto tab = line.find('\t');
      if (tab != 16) throw DataError("embedding table line " + std::to_string(lineno) + ": expected 16-digit hash and tab");
      std::string k = line.substr(0, tab);
      std::istringstream vs(line.substr(tab + 1));
      Embedding v;
      double x;
      while (vs >> x) v.push_back(x);
      if (!vs.eof()) throw DataError("embedding table line " + std::to_string(lineno) + ": bad number");
      if (v.empty()) throw DataError("embedding table line " + std::to_string(lineno) + ": empty vector");
      if (e.dim_ == 0) e.dim_ = v.size();
      if (v.size() != e.dim_) throw DataError("embedding table line " + std::to_string(lineno) + ": dimension mismatch");
      l2_normalize(v);
      e.table_[k] = std::move(v);
    }
    return e;
  }

  void insert(std::string_view text, Embedding v) {
    if (dim_ == 0) dim_ = v.size();
    if (v.size() != dim_) throw UsageError("embedding dimension mismatch");
    l2_normalize(v);
    table_[key(text)] = std::move(v);
  }

  Embedding embed(std::string_view text) const override {
    auto it = table_.find(key(text));
    if (it == table_.end()) throw DataError("no precomputed embedding for text hash " + key(text));
    return it->second;
  }

  std::size_t dimension() const override { return dim_; }
  std::size_t size() const { return table_.size(); }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, Embedding> table_;
};

}  // namespace s2c
