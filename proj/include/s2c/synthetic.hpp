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

// Seeded synthetic news-style corpus with events, informative and pronoun
// arguments and coreference clusters. Gold annotations never violate the
// bundled constraint rules.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "s2c/constraints.hpp"
#include "s2c/ontology.hpp"
#include "s2c/types.hpp"

namespace s2c::synthetic {

inline constexpr std::string_view kOntologyJson = R"([
  {"event_type": "Conflict.Attack.Unspecified",
   "template": "<arg1> attacked <arg2> using <arg3> at <arg4> place",
   "roles": {"arg1": "Attacker", "arg2": "Target", "arg3": "Instrument", "arg4": "Place"}},
  {"event_type": "Justice.ArrestJailDetain.Unspecified",
   "template": "<arg1> arrested or jailed <arg2> for <arg3> at <arg4> place",
   "roles": {"arg1": "Jailer", "arg2": "Detainee", "arg3": "Crime", "arg4": "Place"}},
  {"event_type": "Life.Die.Unspecified",
   "template": "<arg1> killed <arg2> with <arg3> at <arg4> place",
   "roles": {"arg1": "Killer", "arg2": "Victim", "arg3": "Instrument", "arg4": "Place"}},
  {"event_type": "Life.Injure.Unspecified",
   "template": "<arg1> injured <arg2> with <arg3> at <arg4> place",
   "roles": {"arg1": "Injurer", "arg2": "Victim", "arg3": "Instrument", "arg4": "Place"}},
  {"event_type": "Contact.Contact.Unspecified",
   "template": "<arg1> communicated with <arg2> about <arg3> at <arg4> place",
   "roles": {"arg1": "Communicator", "arg2": "Recipient", "arg3": "Topic", "arg4": "Place"}}
])";

inline constexpr std::string_view kRulesJson = R"([
  ["Detainee", "Attacker"],
  ["Detainee", "Killer"],
  ["Detainee", "Injurer"],
  ["Victim", "Attacker"],
  ["Victim", "Jailer"],
  ["Victim", "Communicator"]
])";

inline Ontology ontology() { return parse_ontology(kOntologyJson); }
inline std::vector<ConstraintRule> rules() { return parse_rules(kRulesJson); }

struct CorpusShape {
  std::size_t documents = 20;
  std::size_t events = 365;  // total over all documents
  std::uint64_t seed = 1;
  std::string id_prefix = "doc";
  double pronoun_rate = 0.35;
  double conjunction_rate = 0.1;
  double empty_event_rate = 0.05;
};

namespace detail {

enum class Kind { Person, Weapon, Location, Crime, Topic };

struct Entity {
  Kind kind;
  std::vector<std::string> name;
  std::string pronoun;
  std::vector<Span> mentions;
  std::optional<Span> name_mention;
  std::set<std::string> roles;
};

inline const std::vector<std::vector<std::string>>& names(Kind k) {
  static const std::vector<std::vector<std::string>> people = {
      {"Dzhokhar", "Tsarnaev"}, {"Tamerlan", "Tsarnaev"}, {"Mike", "Jones"}, {"Sean", "Collier"},
      {"Maria", "Lopez"},       {"Ibrahim", "Todashev"}, {"Anna", "Kim"},   {"Peter", "Novak"},
      {"Ruth", "Adler"},        {"Omar", "Haddad"},      {"Lena", "Fischer"}, {"Victor", "Crane"},
      {"Grace", "Okafor"},      {"Hugo", "Brandt"},      {"Nadia", "Petrova"}, {"Samuel", "Reyes"}};
  static const std::vector<std::vector<std::string>> weapons = {
      {"pressure", "cooker", "bombs"}, {"handgun"}, {"rifle"}, {"knife"}, {"explosives"}, {"truck"}};
  static const std::vector<std::vector<std::string>> places = {
      {"Boston"}, {"Watertown"}, {"Cambridge"}, {"Boylston", "Street"}, {"Copley", "Square"}, {"Dorchester"},
      {"Moakley", "courthouse"}, {"Quincy"}};
  static const std::vector<std::vector<std::string>> crimes = {
      {"murder"}, {"terrorism"}, {"robbery"}, {"arson"}, {"conspiracy"}};
  static const std::vector<std::vector<std::string>> topics = {
      {"bombing"}, {"investigation"}, {"trial"}, {"ransom"}};
  switch (k) {
    case Kind::Person: return people;
    case Kind::Weapon: return weapons;
    case Kind::Location: return places;
    case Kind::Crime: return crimes;
    case Kind::Topic: return topics;
  }
  return people;
}

inline Kind kind_of(std::string_view role) {
  if (role == "Instrument") return Kind::Weapon;
  if (role == "Place") return Kind::Location;
  if (role == "Crime") return Kind::Crime;
  if (role == "Topic") return Kind::Topic;
  return Kind::Person;
}

inline const std::map<std::string, std::vector<std::string>>& triggers() {
  static const std::map<std::string, std::vector<std::string>> t = {
      {"Conflict.Attack.Unspecified", {"bombed", "stormed", "ambushed"}},
      {"Justice.ArrestJailDetain.Unspecified", {"detained", "captured", "imprisoned"}},
      {"Life.Die.Unspecified", {"murdered", "shot", "slew"}},
      {"Life.Injure.Unspecified", {"wounded", "hurt", "maimed"}},
      {"Contact.Contact.Unspecified", {"phoned", "emailed", "met"}}};
  return t;
}

inline const std::vector<std::vector<std::string>>& fillers() {
  static const std::vector<std::vector<std::string>> f = {
      {"Officials", "said", "the", "inquiry", "continued", "."},
      {"Witnesses", "described", "a", "chaotic", "scene", "."},
      {"The", "city", "remained", "on", "alert", "."},
      {"Reporters", "gathered", "outside", "the", "station", "."}};
  return f;
}

}  // namespace detail

// Builds `shape.documents` documents with `shape.events` events in total
// (spread as evenly as possible). Deterministic in `shape.seed`.
inline std::vector<Document> make_corpus(const CorpusShape& shape, const Ontology& onto,
                                         const std::vector<ConstraintRule>& rule_set) {
  using namespace detail;
  std::mt19937_64 rng(shape.seed);
  auto u01 = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  std::vector<std::string> types;
  for (const auto& [t, _] : onto.templates()) types.push_back(t);

  auto conflicts = [&](const Entity& e, const std::string& role) {
    for (const auto& r : rule_set) {
      if (r.banned_role == role && e.roles.count(r.source_role)) return true;
      if (r.source_role == role && e.roles.count(r.banned_role)) return true;
    }
    return false;
  };

  std::vector<Document> docs;
  for (std::size_t di = 0; di < shape.documents; ++di) {
    std::size_t n_events = shape.events / shape.documents + (di < shape.events % shape.documents ? 1 : 0);
    Document doc;
    doc.doc_id = shape.id_prefix + "-" + std::to_string(di + 1);
    std::vector<Entity> entities;
    for (Kind k : {Kind::Person, Kind::Weapon, Kind::Location, Kind::Crime, Kind::Topic}) {
      const auto& pool = names(k);
      std::vector<std::size_t> order(pool.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[pick(i)]);
      std::size_t take = k == Kind::Person ? std::min<std::size_t>(8, pool.size()) : std::min<std::size_t>(3, pool.size());
      for (std::size_t i = 0; i < take; ++i)
        entities.push_back({k, pool[order[i]], k == Kind::Person ? (u01() < 0.5 ? "he" : "she") : "it", {}, {}, {}});
    }

    std::vector<std::size_t> bounds{0};
    auto add_sentence = [&](const std::vector<std::string>& toks) {
      doc.tokens.insert(doc.tokens.end(), toks.begin(), toks.end());
      bounds.push_back(doc.tokens.size());
    };
    // Adds a mention of entity `ei` at the end of the document; returns the
    // mention span and whether it is a name.
    auto mention = [&](std::size_t ei) -> std::pair<Span, bool> {
      Entity& e = entities[ei];
      std::size_t start = doc.tokens.size();
      bool use_pronoun = e.name_mention && e.kind == Kind::Person && u01() < shape.pronoun_rate;
      if (use_pronoun) {
        doc.tokens.push_back(e.pronoun);
      } else {
        doc.tokens.insert(doc.tokens.end(), e.name.begin(), e.name.end());
      }
      Span s{start, doc.tokens.size()};
      e.mentions.push_back(s);
      if (!use_pronoun && !e.name_mention) e.name_mention = s;
      return {s, !use_pronoun};
    };

    for (std::size_t ev_i = 0; ev_i < n_events; ++ev_i) {
      if (u01() < 0.3) add_sentence(fillers()[pick(fillers().size())]);
      EventMention ev;
      ev.event_type = types[pick(types.size())];
      const Template& tmpl = onto.at(ev.event_type);
      bool empty = u01() < shape.empty_event_rate;

      // Role -> entities, respecting the constraint rules document-wide.
      std::vector<std::pair<std::string, std::vector<std::size_t>>> fills;
      for (const auto& slot : tmpl.slots) {
        if (empty || u01() < 0.3) continue;
        std::vector<std::size_t> candidates;
        for (std::size_t i = 0; i < entities.size(); ++i)
          if (entities[i].kind == kind_of(slot.role) && !conflicts(entities[i], slot.role)) candidates.push_back(i);
        std::vector<std::size_t> chosen;
        for (const auto& [r, es] : fills)
          for (std::size_t e : es) candidates.erase(std::remove(candidates.begin(), candidates.end(), e), candidates.end());
        if (candidates.empty()) continue;
        std::size_t first = candidates[pick(candidates.size())];
        chosen.push_back(first);
        if (kind_of(slot.role) == Kind::Person && u01() < shape.conjunction_rate && candidates.size() > 1) {
          std::size_t second = candidates[pick(candidates.size())];
          if (second != first) chosen.push_back(second);
        }
        for (std::size_t e : chosen) entities[e].roles.insert(slot.role);
        fills.emplace_back(slot.role, std::move(chosen));
      }

      // Sentence: [first role] trigger [others joined by prepositions] .
      const auto& trig_words = triggers().at(ev.event_type);
      std::string trig = trig_words[pick(trig_words.size())];
      std::vector<std::pair<std::string, std::pair<Span, bool>>> placed;
      auto emit_group = [&](const std::string& role, const std::vector<std::size_t>& es) {
        for (std::size_t k = 0; k < es.size(); ++k) {
          if (k) doc.tokens.emplace_back("and");
          placed.push_back({role, mention(es[k])});
          placed.back().first = role + "#" + std::to_string(es[k]);
        }
      };
      std::size_t next = 0;
      if (!fills.empty() && fills[0].first == tmpl.slots[0].role) {
        emit_group(fills[0].first, fills[0].second);
        next = 1;
      } else {
        doc.tokens.emplace_back("Someone");
      }
      ev.trigger = {doc.tokens.size(), doc.tokens.size() + 1};
      doc.tokens.push_back(trig);
      static const char* preps[] = {"near", "in", "by", "over"};
      for (std::size_t f = next; f < fills.size(); ++f) {
        if (f > next) doc.tokens.emplace_back(preps[pick(4)]);
        emit_group(fills[f].first, fills[f].second);
      }
      doc.tokens.emplace_back(".");
      bounds.push_back(doc.tokens.size());

      for (const auto& [key, m] : placed) {
        std::string role = key.substr(0, key.find('#'));
        std::size_t ei = std::stoul(key.substr(key.find('#') + 1));
        const auto& [span, is_name] = m;
        if (is_name) {
          ev.gold_arguments.push_back({span, role, true});
        } else {
          ev.gold_arguments.push_back({*entities[ei].name_mention, role, true});
          ev.gold_arguments.push_back({span, role, false});
        }
      }
      doc.events.push_back(std::move(ev));
    }
    if (doc.tokens.empty()) add_sentence({"Nothing", "happened", "."});

    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());
    doc.sentence_boundaries = bounds;
    for (std::size_t i = 0; i < doc.events.size(); ++i) doc.events[i].appearance_index = static_cast<int>(i + 1);
    std::vector<std::vector<Span>> clusters;
    for (const auto& e : entities)
      if (e.mentions.size() > 1) clusters.push_back(e.mentions);
    doc.coref = CorefClusters(std::move(clusters));
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline std::vector<Document> make_corpus(const CorpusShape& shape) { return make_corpus(shape, ontology(), rules()); }

}  // namespace s2c::synthetic
