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

// Per-document memory of earlier predictions and similarity retrieval.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "s2c/embedding.hpp"
#include "s2c/error.hpp"
#include "s2c/types.hpp"

namespace s2c {

struct MemoryEntry {
  EventPrediction prediction;
  Embedding embedding;
};

// Append-only cache of the predictions made so far for one document.
class DocumentMemory {
 public:
  explicit DocumentMemory(std::string doc_id) : doc_id_(std::move(doc_id)) {}

  // Appends `prediction`, embedded by its filled text.
  void cache(EventPrediction prediction, const Embedder& embedder) {
    if (prediction.event_ref.doc_id != doc_id_)
      throw UsageError("cannot cache a prediction of document " + prediction.event_ref.doc_id +
                       " in the memory of document " + doc_id_);
    Embedding e = embedder.embed(prediction.filled_text);
    entries_.push_back({std::move(prediction), std::move(e)});
  }

  const std::string& doc_id() const { return doc_id_; }
  const std::vector<MemoryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::string doc_id_;
  std::vector<MemoryEntry> entries_;
};

// Raw similarity f(c, m_j): dot product of the context embedding with each
// cached prediction's embedding.
inline std::vector<double> similarity_scores(const DocumentMemory& memory, const Embedding& context) {
  std::vector<double> f;
  f.reserve(memory.size());
  for (const auto& e : memory.entries()) f.push_back(dot(context, e.embedding));
  return f;
}

// Softmax of the similarities over the memory. nullopt when the memory is
// empty, which means "no retrieval".
inline std::optional<std::vector<double>> score_all(const DocumentMemory& memory, const Embedding& context) {
  if (memory.empty()) return std::nullopt;
  std::vector<double> f = similarity_scores(memory, context);
  double mx = *std::max_element(f.begin(), f.end());
  double z = 0;
  for (double& x : f) z += (x = std::exp(x - mx));
  for (double& x : f) x /= z;
  return f;
}

inline std::optional<std::vector<double>> score_all(const DocumentMemory& memory, std::string_view context_text,
                                                    const Embedder& embedder) {
  return score_all(memory, embedder.embed(context_text));
}

// Index of the highest-scoring entry; the earliest cached entry wins ties.
inline std::optional<std::size_t> retrieve_index(const DocumentMemory& memory, const Embedding& context) {
  auto scores = score_all(memory, context);
  if (!scores) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores->size(); ++j)
    if ((*scores)[j] > (*scores)[best]) best = j;
  return best;
}

// The retrieved prediction m^R, or null when the memory is empty.
inline const EventPrediction* retrieve(const DocumentMemory& memory, const Embedding& context) {
  auto idx = retrieve_index(memory, context);
  return idx ? &memory.entries()[*idx].prediction : nullptr;
}

inline const EventPrediction* retrieve(const DocumentMemory& memory, std::string_view context_text,
                                       const Embedder& embedder) {
  if (memory.empty()) return nullptr;
  return retrieve(memory, embedder.embed(context_text));
}

}  // namespace s2c
