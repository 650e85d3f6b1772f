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

// Event ontology: event type -> template with numbered, role-typed slots.
//
// File format (JSON array, one object per event type):
//
//   [
//     {"event_type": "Conflict.Attack.Unspecified",
//      "template": "<arg1> attacked <arg2> using <arg3> at <arg4> place",
//      "roles": {"arg1": "Attacker", "arg2": "Target",
//                "arg3": "Instrument", "arg4": "Place"}}
//   ]
//
// An empty (or whitespace-only) file is an empty ontology.

#pragma once

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "s2c/error.hpp"
#include "s2c/text.hpp"
#include "s2c/types.hpp"

namespace s2c {

class Ontology {
 public:
  void add(Template t) {
    std::string key = t.event_type;
    if (!templates_.emplace(key, std::move(t)).second)
      throw DataError("duplicate event type in ontology: " + key);
  }

  const Template* find(std::string_view event_type) const {
    auto it = templates_.find(std::string(event_type));
    return it == templates_.end() ? nullptr : &it->second;
  }

  const Template& at(std::string_view event_type) const {
    if (const Template* t = find(event_type)) return *t;
    throw DataError("unknown event type: " + std::string(event_type));
  }

  bool has_role(std::string_view event_type, std::string_view role) const {
    const Template* t = find(event_type);
    return t && t->slot_of(role).has_value();
  }

  std::size_t size() const { return templates_.size(); }
  bool empty() const { return templates_.empty(); }
  const std::map<std::string, Template>& templates() const { return templates_; }

 private:
  std::map<std::string, Template> templates_;
};

namespace detail {

// "<arg12>" -> 12; anything else -> nullopt.
inline std::optional<int> numbered_slot(std::string_view tok) {
  constexpr std::string_view prefix = "<arg";
  if (tok.size() <= prefix.size() + 1 || tok.substr(0, prefix.size()) != prefix || tok.back() != '>')
    return std::nullopt;
  std::string_view digits = tok.substr(prefix.size(), tok.size() - prefix.size() - 1);
  int value = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || value < 1) return std::nullopt;
  return value;
}

}  // namespace detail

// Builds a template from its text and a slot -> role table. Throws DataError
// on repeated slots, slots without a role, roles naming absent slots, or slot
// ids that are not contiguous from 1.
inline Template make_template(std::string event_type, std::string template_text,
                              const std::map<int, std::string>& roles) {
  Template t;
  t.event_type = std::move(event_type);
  t.text = std::move(template_text);

  std::set<int> seen;
  for (auto& tok : text::split_whitespace(t.text)) {
    if (auto id = detail::numbered_slot(tok)) {
      if (!seen.insert(*id).second)
        throw DataError("template for " + t.event_type + " uses slot <arg" + std::to_string(*id) +
                        "> more than once");
      t.scaffold.emplace_back(*id);
    } else {
      t.scaffold.emplace_back(std::move(tok));
    }
  }
  for (int id : seen)
    if (!roles.count(id))
      throw DataError("template for " + t.event_type + " has slot <arg" + std::to_string(id) +
                      "> without a role");
  std::set<std::string> role_names;
  for (const auto& [id, role] : roles) {
    if (!seen.count(id))
      throw DataError("role table for " + t.event_type + " names slot " + std::to_string(id) +
                      " absent from its template");
    if (role.empty()) throw DataError("empty role name in " + t.event_type);
    if (!role_names.insert(role).second)
      throw DataError("role " + role + " mapped to more than one slot in " + t.event_type);
  }
  int expected = 1;
  for (int id : seen) {
    if (id != expected)
      throw DataError("slot ids of " + t.event_type + " are not contiguous from 1");
    t.slots.push_back({id, roles.at(id)});
    ++expected;
  }
  return t;
}

inline Ontology parse_ontology(std::string_view content) {
  Ontology ontology;
  bool blank = std::all_of(content.begin(), content.end(),
                           [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  if (blank) return ontology;

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(content);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("ontology is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw DataError("ontology must be a JSON array of event types");

  for (const auto& entry : doc) {
    try {
      std::map<int, std::string> roles;
      for (const auto& [key, value] : entry.at("roles").items()) {
        auto id = detail::numbered_slot("<" + key + ">");
        if (!id) throw DataError("bad slot key in role table: " + key);
        roles[*id] = value.get<std::string>();
      }
      ontology.add(make_template(entry.at("event_type").get<std::string>(),
                                 entry.at("template").get<std::string>(), roles));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed ontology entry: ") + e.what());
    }
  }
  return ontology;
}

inline Ontology load_ontology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open ontology file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_ontology(ss.str());
}

}  // namespace s2c
