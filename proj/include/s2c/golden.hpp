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

// Golden wire-protocol frames for conformance testing of remote generators.
// Every frame is derived from a fixed synthetic document, so the bytes are
// stable across runs and platforms.

#pragma once

#include <map>
#include <string>

#include "s2c/embedding.hpp"
#include "s2c/memory.hpp"
#include "s2c/mock_generator.hpp"
#include "s2c/pipeline.hpp"
#include "s2c/synthetic.hpp"
#include "s2c/wire.hpp"

namespace s2c::golden {

inline std::vector<Document> corpus() {
  synthetic::CorpusShape shape;
  shape.documents = 1;
  shape.events = 3;
  shape.seed = 3;
  shape.id_prefix = "golden";
  return synthetic::make_corpus(shape);
}

// File name -> frame (one line, '\n'-terminated).
inline std::map<std::string, std::string> frames() {
  const Ontology onto = synthetic::ontology();
  const auto docs = corpus();
  const Document& doc = docs.front();
  OracleGenerator gen(docs, onto, {}, 0, 64);
  std::map<std::string, std::string> out;

  const EventMention& first = doc.events.at(0);
  const Template& t1 = onto.at(first.event_type);
  GenerateRequest r1{render_input(first, doc, t1, nullptr), {}, kDefaultTopK};
  GenerateResponse a1 = gen.generate(r1);
  out["request_first.jsonl"] = wire::encode_request(r1);
  out["response_first.jsonl"] = wire::encode_response(a1);

  // Second event, with the first prediction retrieved, every text of the
  // first prediction banned under every role of the second template, and
  // the second event's own first gold argument banned under its role.
  EventPrediction p1 = to_prediction(a1, r1, t1, 1);
  const EventMention& second = doc.events.at(1);
  const Template& t2 = onto.at(second.event_type);
  GenerateRequest r2{render_input(second, doc, t2, &p1), {}, kDefaultTopK};
  for (const auto& slot : t2.slots)
    for (const auto& a : p1.arguments) r2.banned.by_role[slot.role].insert(a.text);
  for (const auto& g : second.gold_arguments)
    if (g.informative) {
      r2.banned.by_role[g.role].insert(doc.span_text(g.span));
      break;
    }
  out["request_banned.jsonl"] = wire::encode_request(r2);
  out["response_banned.jsonl"] = wire::encode_response(gen.generate(r2));

  std::vector<std::string> texts = {p1.filled_text, "Boston"};
  HashingEmbedder emb(8);
  wire::EmbedResult er;
  for (const auto& t : texts) er.vectors.push_back(emb.embed(t));
  out["embed_request.jsonl"] = wire::encode_embed_request(texts);
  out["embed_response.jsonl"] = wire::encode_embeddings(er);

  out["error_retryable.jsonl"] = wire::encode_error("model busy", true);
  out["error_fatal.jsonl"] = wire::encode_error("unknown event type", false);
  return out;
}

}  // namespace s2c::golden
