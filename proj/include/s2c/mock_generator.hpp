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

// Deterministic in-tree generators that replay gold annotations: the oracle
// replays them exactly, the mock with seeded noise. Neither needs a model.

#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "s2c/calibration.hpp"
#include "s2c/generator.hpp"
#include "s2c/ontology.hpp"

namespace s2c {

struct ScriptKey {
  std::string doc_id;
  int appearance_index = 0;
  int slot_id = 0;
  std::string text;

  friend auto operator<=>(const ScriptKey&, const ScriptKey&) = default;
};

// Fixed first-token logits for particular arguments.
using ScriptedLogits = std::map<ScriptKey, LogitVector>;

// One JSON object per line:
//   {"doc_id": "d1", "event": 2, "slot": 1, "text": "Mike",
//    "logits": [3.0, 1.0, 0.0], "residual_mass": 0.0}
inline ScriptedLogits load_scripted_logits(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open scripted logits: " + path);
  ScriptedLogits out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      ScriptKey key{j.at("doc_id").get<std::string>(), j.at("event").get<int>(), j.at("slot").get<int>(),
                    j.at("text").get<std::string>()};
      LogitVector z;
      z.values = j.at("logits").get<std::vector<double>>();
      z.residual_mass = j.value("residual_mass", 0.0);
      out[key] = std::move(z);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed scripted logits line: ") + e.what());
    }
  }
  return out;
}

namespace detail {

// Uniform double in [0,1) from a 64-bit engine, independent of the
// standard library's distribution implementation.
inline double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

class GoldReplay {
 public:
  GoldReplay(const std::vector<Document>& docs, const Ontology& ontology) : ontology_(ontology) {
    for (const auto& d : docs) docs_.emplace(d.doc_id, d);
  }

  const Document& doc(const std::string& id) const {
    auto it = docs_.find(id);
    if (it == docs_.end()) throw UsageError("generator has no document " + id);
    return it->second;
  }

  const Ontology& ontology() const { return ontology_; }

  // (slot, text) of the informative gold arguments, in annotation order.
  std::vector<std::pair<int, std::string>> gold_fills(const Document& d, const EventMention& ev) const {
    const Template& t = ontology_.at(ev.event_type);
    std::vector<std::pair<int, std::string>> out;
    for (const auto& g : ev.gold_arguments) {
      if (!g.informative) continue;
      if (auto slot = t.slot_of(g.role)) out.emplace_back(*slot, d.span_text(g.span));
    }
    return out;
  }

 private:
  std::unordered_map<std::string, Document> docs_;
  Ontology ontology_;
};

// Drops banned fills, renders the template and attaches logits per argument.
template <class LogitFn>
GenerateResponse assemble(const Template& tmpl, const std::vector<std::pair<int, std::string>>& fills,
                          const BannedSet& banned, LogitFn&& logits_for) {
  std::map<int, std::vector<std::string>> by_slot;
  for (const auto& [slot, txt] : fills) {
    const std::string* role = tmpl.role_of(slot);
    if (!role || banned.contains(*role, txt)) continue;
    auto& v = by_slot[slot];
    if (std::find(v.begin(), v.end(), txt) == v.end()) v.push_back(txt);
  }
  GenerateResponse resp;
  resp.filled_text = fill_template(tmpl, by_slot);
  resp.arguments = parse_filled_template(resp.filled_text, tmpl);
  for (auto& a : resp.arguments) {
    a.role.clear();
    a.first_token_logits = logits_for(a);
    a.raw_prob = raw_probability(*a.first_token_logits);
  }
  return resp;
}

}  // namespace detail

// Replays the informative gold arguments of each event (minus banned ones).
// Logits come from the script when present, otherwise from a seeded hash of
// the argument, so that confidences vary between arguments.
class OracleGenerator final : public Generator {
 public:
  OracleGenerator(const std::vector<Document>& docs, const Ontology& ontology, ScriptedLogits script = {},
                  std::uint64_t seed = 0, std::size_t vocab_size = 32)
      : gold_(docs, ontology), script_(std::move(script)), seed_(seed), vocab_(vocab_size) {
    if (vocab_ < 2) throw UsageError("oracle vocabulary needs at least two tokens");
  }

  GenerateResponse generate(const GenerateRequest& req) const override {
    const auto& ref = req.input.event_ref;
    const Document& d = gold_.doc(ref.doc_id);
    const EventMention& ev = d.event(ref.appearance_index);
    const Template& tmpl = gold_.ontology().at(ev.event_type);
    return detail::assemble(tmpl, gold_.gold_fills(d, ev), req.banned, [&](const ArgumentPrediction& a) {
      ScriptKey key{ref.doc_id, ref.appearance_index, a.slot_id, a.text};
      if (auto it = script_.find(key); it != script_.end()) return it->second;
      std::mt19937_64 rng(text::mix64(seed_ ^ text::fnv1a64(ref.doc_id + "#" + std::to_string(ref.appearance_index) +
                                                            "#" + std::to_string(a.slot_id) + "#" + a.text)));
      std::vector<double> full(vocab_);
      for (double& v : full) v = detail::u01(rng) - 0.5;
      full[text::fnv1a64(text::first_token(a.text)) % vocab_] = 0.5 + 6.0 * detail::u01(rng);
      return truncate_logits(full, req.top_k);
    });
  }

 private:
  detail::GoldReplay gold_;
  ScriptedLogits script_;
  std::uint64_t seed_;
  std::size_t vocab_;
};

struct MockConfig {
  std::uint64_t seed = 0;
  std::size_t vocab_size = 64;
  double drop_rate = 0.2;      // gold argument left out
  double swap_rate = 0.1;      // gold argument put in another slot
  double spurious_rate = 0.3;  // one context word added to a random slot
};

// A noisy, over-confident stand-in for a trained model. Output is a pure
// function of (seed, rendered input), so a changed retrieval changes the
// prediction just as it would for a real model.
class MockGenerator final : public Generator {
 public:
  MockGenerator(const std::vector<Document>& docs, const Ontology& ontology, MockConfig config = {},
                ScriptedLogits script = {})
      : gold_(docs, ontology), config_(config), script_(std::move(script)) {
    if (config_.vocab_size < 2) throw UsageError("mock vocabulary needs at least two tokens");
  }

  GenerateResponse generate(const GenerateRequest& req) const override {
    const auto& ref = req.input.event_ref;
    const Document& d = gold_.doc(ref.doc_id);
    const EventMention& ev = d.event(ref.appearance_index);
    const Template& tmpl = gold_.ontology().at(ev.event_type);

    std::mt19937_64 rng(text::mix64(config_.seed ^ text::fnv1a64(req.input.text())));
    std::vector<std::pair<int, std::string>> fills;
    for (auto [slot, txt] : gold_.gold_fills(d, ev)) {
      double r = detail::u01(rng);
      if (r < config_.drop_rate) continue;
      if (r < config_.drop_rate + config_.swap_rate && tmpl.slots.size() > 1) {
        int other = tmpl.slots[static_cast<std::size_t>(rng() % (tmpl.slots.size() - 1))].slot_id;
        slot = other >= slot ? other + 1 : other;
      }
      fills.emplace_back(slot, std::move(txt));
    }
    if (detail::u01(rng) < config_.spurious_rate && !req.input.context.empty()) {
      const std::string& word = req.input.context[rng() % req.input.context.size()];
      if (word != kTriggerMarker && word != kConjunction && word != kArgPlaceholder)
        fills.emplace_back(tmpl.slots[rng() % tmpl.slots.size()].slot_id, word);
    }

    // Correct arguments get a somewhat larger margin, but both kinds are
    // confident: raw probabilities cluster near 1.
    auto gold = gold_.gold_fills(d, ev);
    return detail::assemble(tmpl, fills, req.banned, [&](const ArgumentPrediction& a) {
      ScriptKey key{ref.doc_id, ref.appearance_index, a.slot_id, a.text};
      if (auto it = script_.find(key); it != script_.end()) return it->second;
      bool right = std::find(gold.begin(), gold.end(), std::make_pair(a.slot_id, a.text)) != gold.end();
      std::vector<double> full(config_.vocab_size);
      for (double& v : full) v = detail::u01(rng) - 0.5;
      double margin = right ? 5.0 + 4.0 * detail::u01(rng) : 3.5 + 4.0 * detail::u01(rng);
      full[text::fnv1a64(text::first_token(a.text)) % config_.vocab_size] = margin;
      return truncate_logits(full, req.top_k);
    });
  }

 private:
  detail::GoldReplay gold_;
  MockConfig config_;
  ScriptedLogits script_;
};

}  // namespace s2c
