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

// Argument-pair decoding constraints and confidence-bounded pruning.

#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "s2c/calibration.hpp"
#include "s2c/error.hpp"
#include "s2c/memory.hpp"

namespace s2c {

// An argument predicted with `source_role` may not be decoded with
// `banned_role` in any later-predicted event of the same document.
struct ConstraintRule {
  std::string source_role;
  std::string banned_role;

  friend bool operator==(const ConstraintRule&, const ConstraintRule&) = default;
};

// Rules file: JSON array of [source_role, banned_role] pairs or of
// {"source_role": ..., "banned_role": ...} objects.
inline std::vector<ConstraintRule> parse_rules(std::string_view content) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("rules file is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw DataError("rules file must be a JSON array");
  std::vector<ConstraintRule> rules;
  for (const auto& r : doc) {
    ConstraintRule rule;
    try {
      if (r.is_array() && r.size() == 2) {
        rule = {r[0].get<std::string>(), r[1].get<std::string>()};
      } else {
        rule = {r.at("source_role").get<std::string>(), r.at("banned_role").get<std::string>()};
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed constraint rule: ") + e.what());
    }
    if (rule.source_role.empty() || rule.banned_role.empty()) throw DataError("constraint rule with empty role");
    if (rule.source_role == rule.banned_role)
      throw DataError("constraint rule bans its own source role " + rule.source_role);
    rules.push_back(std::move(rule));
  }
  return rules;
}

inline std::vector<ConstraintRule> load_rules(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open rules file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_rules(ss.str());
}

// Open confidence interval (lower, upper) inside which a constraint stays on.
struct Bounds {
  double lower = 0.0;
  double upper = 1.0;

  Bounds() = default;
  Bounds(double lo, double hi) : lower(lo), upper(hi) {
    if (!(0 <= lo && lo <= hi && hi <= 1))
      throw UsageError("bounds must satisfy 0 <= lower <= upper <= 1, got (" + std::to_string(lo) + ", " +
                       std::to_string(hi) + ")");
  }

  bool admits(double p) const { return lower < p && p < upper; }

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

// Surface strings that may not be decoded, per role.
struct BannedSet {
  std::map<std::string, std::set<std::string>> by_role;

  bool contains(const std::string& role, const std::string& text) const {
    auto it = by_role.find(role);
    return it != by_role.end() && it->second.count(text);
  }
  bool empty() const { return by_role.empty(); }
  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [_, s] : by_role) n += s.size();
    return n;
  }

  friend bool operator==(const BannedSet&, const BannedSet&) = default;
};

namespace detail {

inline BannedSet derive(const DocumentMemory& memory, const std::vector<ConstraintRule>& rules,
                        const std::optional<Bounds>& bounds) {
  BannedSet banned;
  for (const auto& entry : memory.entries()) {
    for (const auto& arg : entry.prediction.arguments) {
      for (const auto& rule : rules) {
        if (arg.role != rule.source_role) continue;
        if (bounds) {
          if (!arg.calibrated_prob)
            throw DataError("cached argument \"" + arg.text + "\" of " + entry.prediction.event_ref.doc_id + "#" +
                            std::to_string(entry.prediction.event_ref.appearance_index) +
                            " has no calibrated probability");
          if (!bounds->admits(*arg.calibrated_prob)) continue;
        }
        banned.by_role[rule.banned_role].insert(arg.text);
      }
    }
  }
  return banned;
}

}  // namespace detail

// Bounded constraints: a cached argument bans its text under the rule's
// banned role only while lower < calibrated_prob < upper.
inline BannedSet derive_banned(const DocumentMemory& memory, const std::vector<ConstraintRule>& rules,
                               const Bounds& bounds) {
  return detail::derive(memory, rules, bounds);
}

// Original constraints: every rule-matching cached argument bans its text.
inline BannedSet derive_banned_unpruned(const DocumentMemory& memory, const std::vector<ConstraintRule>& rules) {
  return detail::derive(memory, rules, std::nullopt);
}

// Picks the confidence interval in which constraints are trusted:
//   1. candidate bins hold at least the median bin count (and are nonempty);
//   2. contiguous candidates merge into runs; of several runs keep the one
//      with the smallest mean |acc - conf|;
//   3. drop bins from either end of the kept run while their gap exceeds the
//      run's mean gap.
// Returns the bin edges of what remains.
inline Bounds select_bounds(std::span<const double> calibrated_probs, std::size_t k,
                            const ReliabilityBins& reliability) {
  if (calibrated_probs.empty()) throw DataError("cannot select bounds without probabilities");
  if (reliability.k != k || reliability.bins.size() != k)
    throw UsageError("reliability bins computed with a different bin count");
  auto counts = histogram(calibrated_probs, k);
  if (std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 0; }))
    throw DataError("all probability bins are empty");

  std::vector<std::size_t> sorted = counts;
  std::sort(sorted.begin(), sorted.end());
  double median = k % 2 ? static_cast<double>(sorted[k / 2])
                        : (static_cast<double>(sorted[k / 2 - 1]) + static_cast<double>(sorted[k / 2])) / 2.0;

  std::vector<std::pair<std::size_t, std::size_t>> runs;  // [first, last] bin indices
  for (std::size_t i = 0; i < k; ++i) {
    bool candidate = counts[i] > 0 && static_cast<double>(counts[i]) >= median;
    if (!candidate) continue;
    if (!runs.empty() && runs.back().second + 1 == i)
      runs.back().second = i;
    else
      runs.push_back({i, i});
  }

  // Mean gap over bins of the run that the reliability diagram has data for.
  auto mean_gap = [&](std::size_t first, std::size_t last) {
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t i = first; i <= last; ++i) {
      if (reliability.bins[i].count == 0) continue;
      sum += reliability.bins[i].gap();
      ++n;
    }
    return n ? sum / static_cast<double>(n) : 0.0;
  };

  auto best = runs.front();
  double best_gap = mean_gap(best.first, best.second);
  for (std::size_t r = 1; r < runs.size(); ++r) {
    double g = mean_gap(runs[r].first, runs[r].second);
    if (g < best_gap) {
      best_gap = g;
      best = runs[r];
    }
  }

  auto worse = [&](std::size_t i) { return reliability.bins[i].count > 0 && reliability.bins[i].gap() > best_gap; };
  auto [first, last] = best;
  while (first < last && worse(first)) ++first;
  while (last > first && worse(last)) --last;
  return Bounds(reliability.lower_edge(first), reliability.upper_edge(last));
}

}  // namespace s2c
