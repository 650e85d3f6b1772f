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

// Domain types shared by every stage of the extraction pipeline.

#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "s2c/error.hpp"
#include "s2c/text.hpp"

namespace s2c {

inline constexpr std::string_view kArgPlaceholder = "<arg>";
inline constexpr std::string_view kTriggerMarker = "<tgr>";
inline constexpr std::string_view kBeginMarker = "<s>";
inline constexpr std::string_view kEndMarker = "</s>";
inline constexpr std::string_view kEosMarker = "[EOS]";
inline constexpr std::string_view kConjunction = "and";

// Half-open token span [start, end).
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > start ? end - start : 0; }
  bool empty() const { return end <= start; }
  bool contains(const Span& other) const { return start <= other.start && other.end <= end; }
  bool overlaps(const Span& other) const { return start < other.end && other.start < end; }

  friend auto operator<=>(const Span&, const Span&) = default;
};

struct GoldArgument {
  Span span;
  std::string role;
  bool informative = true;
};

struct EventMention {
  std::string event_type;
  Span trigger;
  int appearance_index = 0;  // 1-based
  std::vector<GoldArgument> gold_arguments;
};

class CorefClusters {
 public:
  CorefClusters() = default;

  explicit CorefClusters(std::vector<std::vector<Span>> clusters) : clusters_(std::move(clusters)) {
    for (std::size_t a = 0; a < clusters_.size(); ++a)
      for (std::size_t b = a + 1; b < clusters_.size(); ++b)
        for (const Span& x : clusters_[a])
          for (const Span& y : clusters_[b])
            if (x == y) throw DataError("coreference clusters are not disjoint");
  }

  const std::vector<std::vector<Span>>& clusters() const { return clusters_; }

  // Cluster holding exactly `span`; failing that, one holding a mention that
  // starts on the same token. Null when the span is a singleton.
  const std::vector<Span>* cluster_of(const Span& span) const {
    for (const auto& c : clusters_)
      if (std::find(c.begin(), c.end(), span) != c.end()) return &c;
    for (const auto& c : clusters_)
      for (const Span& m : c)
        if (m.start == span.start) return &c;
    return nullptr;
  }

 private:
  std::vector<std::vector<Span>> clusters_;
};

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;
  // Sorted token offsets at which a sentence starts or ends (includes 0 and
  // tokens.size() when sentence information is present).
  std::vector<std::size_t> sentence_boundaries;
  std::vector<EventMention> events;
  CorefClusters coref;

  std::string span_text(const Span& s) const {
    std::string out;
    for (std::size_t i = s.start; i < s.end && i < tokens.size(); ++i) {
      if (i != s.start) out += ' ';
      out += tokens[i];
    }
    return out;
  }

  const EventMention& event(int appearance_index) const {
    if (appearance_index < 1 || static_cast<std::size_t>(appearance_index) > events.size())
      throw UsageError("document " + doc_id + " has no event " + std::to_string(appearance_index));
    return events[static_cast<std::size_t>(appearance_index - 1)];
  }
};

struct TemplateSlot {
  int slot_id = 0;
  std::string role;
};

// One element of a template scaffold: a literal token or a numbered slot.
using ScaffoldItem = std::variant<std::string, int>;

struct Template {
  std::string event_type;
  std::string text;                   // as written in the ontology, with <argN> slots
  std::vector<TemplateSlot> slots;    // ordered by slot id, contiguous from 1
  std::vector<ScaffoldItem> scaffold; // tokens of `text` in order

  // Template text with every numbered slot replaced by the generic placeholder.
  std::string generic_text() const {
    std::vector<std::string> parts;
    parts.reserve(scaffold.size());
    for (const auto& item : scaffold) {
      if (const auto* lit = std::get_if<std::string>(&item))
        parts.push_back(*lit);
      else
        parts.emplace_back(kArgPlaceholder);
    }
    return text::join(parts);
  }

  const std::string* role_of(int slot_id) const {
    for (const auto& s : slots)
      if (s.slot_id == slot_id) return &s.role;
    return nullptr;
  }

  std::optional<int> slot_of(std::string_view role) const {
    for (const auto& s : slots)
      if (s.role == role) return s.slot_id;
    return std::nullopt;
  }
};

// Top-K first-token logits plus the aggregate exp-mass of every logit outside
// the top K (sum of exp(z) over the truncated tail; zero when nothing was cut).
struct LogitVector {
  std::vector<double> values;
  double residual_mass = 0.0;
  std::vector<std::int64_t> token_ids;  // parallel to `values`; may be empty

  friend bool operator==(const LogitVector&, const LogitVector&) = default;
};

struct EventRef {
  std::string doc_id;
  int appearance_index = 0;

  friend auto operator<=>(const EventRef&, const EventRef&) = default;
};

struct ArgumentPrediction {
  std::string text;
  int slot_id = 0;
  std::string role;
  std::optional<LogitVector> first_token_logits;
  double raw_prob = 1.0;
  std::optional<double> calibrated_prob;

  friend bool operator==(const ArgumentPrediction&, const ArgumentPrediction&) = default;
};

struct EventPrediction {
  EventRef event_ref;
  std::string filled_text;
  std::vector<ArgumentPrediction> arguments;
  int prediction_order = 0;

  friend bool operator==(const EventPrediction&, const EventPrediction&) = default;
};

}  // namespace s2c
