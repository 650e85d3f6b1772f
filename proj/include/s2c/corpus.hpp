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

// Corpus ingestion. One JSON document per line:
//
//   {"doc_id": "d1",
//    "tokens": ["Police", "detained", "Mike", ...],
//    "sentences": [[0, 12], [12, 30]],
//    "events": [{"event_type": "Justice.ArrestJailDetain.Unspecified",
//                "trigger": [1, 2],
//                "arguments": [{"start": 2, "end": 3, "role": "Detainee",
//                               "informative": true}]}],
//    "coref": [[[2, 3], [14, 15]]]}
//
// All spans are half-open [start, end) token offsets. "sentences" and "coref"
// are optional. Events may appear in any order; they are sorted by trigger
// start and numbered from 1.

#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "s2c/error.hpp"
#include "s2c/ontology.hpp"
#include "s2c/types.hpp"

namespace s2c {

namespace detail {

inline Span read_span(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw DataError("span must be a [start, end] pair");
  auto s = j[0].get<long long>();
  auto e = j[1].get<long long>();
  if (s < 0 || e < 0) throw DataError("negative span offset");
  return {static_cast<std::size_t>(s), static_cast<std::size_t>(e)};
}

inline nlohmann::json span_json(const Span& s) { return nlohmann::json::array({s.start, s.end}); }

inline std::string span_str(const Span& s) {
  return "[" + std::to_string(s.start) + ", " + std::to_string(s.end) + ")";
}

}  // namespace detail

// Parses one corpus record. Returns nullopt (after a warning) when the record
// uses an event type missing from the ontology; throws DataError naming the
// doc_id for malformed spans or roles.
inline std::optional<Document> parse_document(const nlohmann::json& rec, const Ontology& ontology,
                                              const WarningSink& on_warning = {}) {
  Document doc;
  try {
    doc.doc_id = rec.at("doc_id").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw DataError("corpus record without a string doc_id");
  }
  if (doc.doc_id.empty()) throw DataError("corpus record with empty doc_id");
  auto fail = [&](const std::string& what) -> DataError {
    return DataError("document " + doc.doc_id + ": " + what);
  };

  try {
    doc.tokens = rec.at("tokens").get<std::vector<std::string>>();
    const std::size_t n = doc.tokens.size();

    if (rec.contains("sentences")) {
      std::vector<std::size_t> b;
      for (const auto& s : rec["sentences"]) {
        Span sp = detail::read_span(s);
        if (sp.end > n || sp.start > sp.end) throw fail("sentence span " + detail::span_str(sp) + " out of range");
        b.push_back(sp.start);
        b.push_back(sp.end);
      }
      if (!b.empty()) {
        b.push_back(0);
        b.push_back(n);
      }
      std::sort(b.begin(), b.end());
      b.erase(std::unique(b.begin(), b.end()), b.end());
      doc.sentence_boundaries = std::move(b);
    }

    for (const auto& ev : rec.at("events")) {
      EventMention m;
      m.event_type = ev.at("event_type").get<std::string>();
      if (!ontology.find(m.event_type)) {
        warn(on_warning, "skipping document " + doc.doc_id + ": unknown event type " + m.event_type);
        return std::nullopt;
      }
      m.trigger = detail::read_span(ev.at("trigger"));
      if (m.trigger.empty() || m.trigger.end > n)
        throw fail("trigger span " + detail::span_str(m.trigger) + " outside " + std::to_string(n) + " tokens");
      if (ev.contains("arguments")) {
        for (const auto& a : ev["arguments"]) {
          GoldArgument g;
          g.span = {a.at("start").get<std::size_t>(), a.at("end").get<std::size_t>()};
          g.role = a.at("role").get<std::string>();
          g.informative = a.value("informative", true);
          if (g.span.empty() || g.span.end > n)
            throw fail("argument span " + detail::span_str(g.span) + " outside " + std::to_string(n) + " tokens");
          if (!ontology.has_role(m.event_type, g.role))
            throw fail("role " + g.role + " not defined for " + m.event_type);
          m.gold_arguments.push_back(std::move(g));
        }
      }
      doc.events.push_back(std::move(m));
    }

    std::stable_sort(doc.events.begin(), doc.events.end(),
                     [](const EventMention& a, const EventMention& b) { return a.trigger.start < b.trigger.start; });
    for (std::size_t i = 0; i < doc.events.size(); ++i) {
      doc.events[i].appearance_index = static_cast<int>(i + 1);
      if (i > 0 && doc.events[i - 1].trigger.overlaps(doc.events[i].trigger))
        throw fail("overlapping trigger spans " + detail::span_str(doc.events[i - 1].trigger) + " and " +
                   detail::span_str(doc.events[i].trigger));
    }

    if (rec.contains("coref")) {
      std::vector<std::vector<Span>> clusters;
      for (const auto& c : rec["coref"]) {
        std::vector<Span> cluster;
        for (const auto& s : c) {
          Span sp = detail::read_span(s);
          if (sp.empty() || sp.end > n) throw fail("coreference span " + detail::span_str(sp) + " out of range");
          cluster.push_back(sp);
        }
        clusters.push_back(std::move(cluster));
      }
      doc.coref = CorefClusters(std::move(clusters));
    }
  } catch (const nlohmann::json::exception& e) {
    throw fail(std::string("malformed record: ") + e.what());
  } catch (const DataError& e) {
    std::string msg = e.what();
    if (msg.find(doc.doc_id) == std::string::npos) throw fail(msg);
    throw;
  }
  return doc;
}

inline std::vector<Document> parse_corpus_stream(std::istream& in, const Ontology& ontology,
                                                 const WarningSink& on_warning = {}) {
  std::vector<Document> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("corpus line " + std::to_string(lineno) + " is not valid JSON: " + e.what());
    }
    if (auto doc = parse_document(rec, ontology, on_warning)) docs.push_back(std::move(*doc));
  }
  return docs;
}

inline std::vector<Document> parse_corpus(const std::string& path, const Ontology& ontology,
                                          const WarningSink& on_warning = {}) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);
  return parse_corpus_stream(in, ontology, on_warning);
}

inline nlohmann::json document_json(const Document& doc) {
  nlohmann::json j;
  j["doc_id"] = doc.doc_id;
  j["tokens"] = doc.tokens;
  auto sentences = nlohmann::json::array();
  for (std::size_t i = 0; i + 1 < doc.sentence_boundaries.size(); ++i)
    sentences.push_back(detail::span_json({doc.sentence_boundaries[i], doc.sentence_boundaries[i + 1]}));
  j["sentences"] = sentences;
  auto events = nlohmann::json::array();
  for (const auto& ev : doc.events) {
    nlohmann::json e;
    e["event_type"] = ev.event_type;
    e["trigger"] = detail::span_json(ev.trigger);
    auto args = nlohmann::json::array();
    for (const auto& g : ev.gold_arguments)
      args.push_back({{"start", g.span.start}, {"end", g.span.end}, {"role", g.role}, {"informative", g.informative}});
    e["arguments"] = args;
    events.push_back(e);
  }
  j["events"] = events;
  auto coref = nlohmann::json::array();
  for (const auto& c : doc.coref.clusters()) {
    auto cj = nlohmann::json::array();
    for (const auto& s : c) cj.push_back(detail::span_json(s));
    coref.push_back(cj);
  }
  j["coref"] = coref;
  return j;
}

inline void write_corpus(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  for (const auto& d : docs) out << document_json(d).dump() << '\n';
}

}  // namespace s2c
