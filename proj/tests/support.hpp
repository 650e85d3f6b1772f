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

// Shared fixtures for the unit tests.

#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "s2c/s2c.hpp"

namespace s2c::testing {

inline constexpr std::string_view kOntology = R"([
  {"event_type": "Attack",
   "template": "<arg1> attacked <arg2> using <arg3> at <arg4> place",
   "roles": {"arg1": "Attacker", "arg2": "Target", "arg3": "Instrument", "arg4": "Place"}},
  {"event_type": "Arrest",
   "template": "<arg1> arrested <arg2> for <arg3> at <arg4> place",
   "roles": {"arg1": "Jailer", "arg2": "Detainee", "arg3": "Crime", "arg4": "Place"}}
])";

inline const Ontology& ontology() {
  static const Ontology o = parse_ontology(kOntology);
  return o;
}

//  0 Dzhokhar 1 Tsarnaev 2 bombed 3 the 4 marathon 5 in 6 Boston 7 .
//  8 Police 9 detained 10 Mike 11 in 12 Watertown 13 .
// 14 He 15 was 16 charged 17 .
inline Document boston() {
  Document d;
  d.doc_id = "d1";
  d.tokens = {"Dzhokhar", "Tsarnaev", "bombed",    "the", "marathon", "in", "Boston",  ".",       "Police",
              "detained", "Mike",     "in",        "Watertown", ".",  "He",       "was", "charged", "."};
  d.sentence_boundaries = {0, 8, 14, 18};
  EventMention attack{"Attack", {2, 3}, 1, {{{0, 2}, "Attacker", true}, {{3, 5}, "Target", true}, {{6, 7}, "Place", true}}};
  EventMention arrest{"Arrest", {9, 10}, 2, {{{8, 9}, "Jailer", true}, {{10, 11}, "Detainee", true}, {{12, 13}, "Place", true}}};
  d.events = {attack, arrest};
  d.coref = CorefClusters({{{10, 11}, {14, 15}}});
  return d;
}

inline LogitVector logits(std::vector<double> v, double residual = 0.0) {
  LogitVector z;
  z.values = std::move(v);
  z.residual_mass = residual;
  return z;
}

// Scoped scratch directory.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("s2c-test-" + text::hex64((static_cast<std::uint64_t>(rd()) << 32) ^ rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, std::string_view content) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << content;
}

}  // namespace s2c::testing
