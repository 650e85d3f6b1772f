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

// Generator wire protocol, version 1.
//
// Every message is one compact JSON object followed by '\n'. Keys are
// emitted in lexicographic order so encodings are byte-stable.
//
// Request:
//   {"banned": {"<role>": ["<text>", ...]}, "doc_id": "...", "event_index": 2,
//    "event_type": "...", "input": "<s> ... </s> <s> ... </s> ... [EOS]",
//    "protocol": "s2c-gen/1", "template": "<arg> attacked <arg> ...",
//    "top_k": 50, "type": "generate"}
//
// Response:
//   {"arguments": [{"logits": [[<token id>, <logit>], ...], "raw_prob": 0.93,
//                   "residual_log_mass": -1.2 | null, "slot": 2,
//                   "text": "Boston"}],
//    "filled_text": "...", "protocol": "s2c-gen/1", "type": "result"}
//
// Error:
//   {"message": "...", "protocol": "s2c-gen/1", "retryable": true,
//    "type": "error"}
//
// Embedding request and response:
//   {"protocol": "s2c-gen/1", "texts": ["...", ...], "type": "embed"}
//   {"protocol": "s2c-gen/1", "type": "embeddings",
//    "vectors": [[0.1, ...], ...], "warnings": ["..."]}
//
// residual_log_mass is the natural log of the exp-mass of all logits beyond
// the top K, or null when nothing was truncated.

#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "s2c/error.hpp"
#include "s2c/generator.hpp"
#include "s2c/sequence.hpp"

namespace s2c::wire {

inline constexpr std::string_view kProtocol = "s2c-gen/1";

inline nlohmann::json banned_json(const BannedSet& banned) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [role, texts] : banned.by_role) j[role] = std::vector<std::string>(texts.begin(), texts.end());
  return j;
}

inline BannedSet banned_from_json(const nlohmann::json& j) {
  BannedSet b;
  for (const auto& [role, texts] : j.items())
    for (const auto& t : texts) b.by_role[role].insert(t.get<std::string>());
  return b;
}

inline nlohmann::json logits_json(const LogitVector& z) {
  auto pairs = nlohmann::json::array();
  for (std::size_t i = 0; i < z.values.size(); ++i) {
    std::int64_t id = i < z.token_ids.size() ? z.token_ids[i] : static_cast<std::int64_t>(i);
    pairs.push_back(nlohmann::json::array({id, z.values[i]}));
  }
  return pairs;
}

inline std::string encode_request(const GenerateRequest& req) {
  nlohmann::json j;
  j["protocol"] = kProtocol;
  j["type"] = "generate";
  j["doc_id"] = req.input.event_ref.doc_id;
  j["event_index"] = req.input.event_ref.appearance_index;
  j["event_type"] = req.input.event_type;
  j["input"] = req.input.text();
  j["template"] = req.input.template_text;
  j["banned"] = banned_json(req.banned);
  j["top_k"] = req.top_k;
  return j.dump() + "\n";
}

inline std::string encode_response(const GenerateResponse& resp) {
  nlohmann::json j;
  j["protocol"] = kProtocol;
  j["type"] = "result";
  j["filled_text"] = resp.filled_text;
  auto args = nlohmann::json::array();
  for (const auto& a : resp.arguments) {
    nlohmann::json aj;
    aj["text"] = a.text;
    aj["slot"] = a.slot_id;
    aj["raw_prob"] = a.raw_prob;
    if (a.first_token_logits) {
      aj["logits"] = logits_json(*a.first_token_logits);
      double r = a.first_token_logits->residual_mass;
      aj["residual_log_mass"] = r > 0 ? nlohmann::json(std::log(r)) : nlohmann::json(nullptr);
    }
    args.push_back(std::move(aj));
  }
  j["arguments"] = args;
  return j.dump() + "\n";
}

inline std::string encode_error(std::string_view message, bool retryable) {
  nlohmann::json j;
  j["protocol"] = kProtocol;
  j["type"] = "error";
  j["message"] = message;
  j["retryable"] = retryable;
  return j.dump() + "\n";
}

inline std::string encode_embed_request(std::span<const std::string> texts) {
  nlohmann::json j;
  j["protocol"] = kProtocol;
  j["type"] = "embed";
  j["texts"] = std::vector<std::string>(texts.begin(), texts.end());
  return j.dump() + "\n";
}

struct EmbedResult {
  std::vector<std::vector<double>> vectors;
  std::vector<std::string> warnings;
};

inline std::string encode_embeddings(const EmbedResult& r) {
  nlohmann::json j;
  j["protocol"] = kProtocol;
  j["type"] = "embeddings";
  j["vectors"] = r.vectors;
  j["warnings"] = r.warnings;
  return j.dump() + "\n";
}

namespace detail {

inline nlohmann::json parse_frame(std::string_view frame) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(frame);
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("frame is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ProtocolError("frame is not a JSON object");
  auto proto = j.find("protocol");
  if (proto == j.end() || !proto->is_string()) throw ProtocolError("frame without protocol version");
  if (proto->get<std::string>() != kProtocol)
    throw ProtocolError("protocol version mismatch: expected " + std::string(kProtocol) + ", got " +
                        proto->get<std::string>());
  return j;
}

}  // namespace detail

// Decodes a request. The input text is split back into its segments; the
// template text is taken from the dedicated field.
inline GenerateRequest decode_request(std::string_view frame) {
  auto j = detail::parse_frame(frame);
  try {
    if (j.at("type") != "generate") throw ProtocolError("expected a generate request");
    GenerateRequest req;
    req.input.event_ref = {j.at("doc_id").get<std::string>(), j.at("event_index").get<int>()};
    req.input.event_type = j.at("event_type").get<std::string>();
    auto seg = split_input_text(j.at("input").get<std::string>());
    req.input.retrieved = seg.retrieved;
    req.input.context = seg.context;
    req.input.template_text = j.at("template").get<std::string>();
    req.banned = banned_from_json(j.at("banned"));
    req.top_k = j.at("top_k").get<int>();
    if (req.top_k < 1) throw ProtocolError("top_k must be at least 1");
    return req;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed request: ") + e.what());
  } catch (const DataError& e) {
    throw ProtocolError(std::string("malformed request: ") + e.what());
  }
}

// Decodes a response frame. Error frames become TransportError when the peer
// marks them retryable, ProtocolError otherwise.
inline GenerateResponse decode_response(std::string_view frame) {
  auto j = detail::parse_frame(frame);
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "error") {
      std::string msg = "generator error: " + j.value("message", std::string("(no message)"));
      if (j.value("retryable", false)) throw TransportError(msg);
      throw ProtocolError(msg);
    }
    if (type != "result") throw ProtocolError("unexpected frame type " + type);
    GenerateResponse resp;
    resp.filled_text = j.at("filled_text").get<std::string>();
    for (const auto& aj : j.at("arguments")) {
      ArgumentPrediction a;
      a.text = aj.at("text").get<std::string>();
      a.slot_id = aj.at("slot").get<int>();
      a.raw_prob = aj.at("raw_prob").get<double>();
      if (aj.contains("logits") && !aj["logits"].is_null()) {
        LogitVector z;
        for (const auto& p : aj["logits"]) {
          if (!p.is_array() || p.size() != 2) throw ProtocolError("logit entry is not a [token, logit] pair");
          z.token_ids.push_back(p[0].is_number_integer() ? p[0].get<std::int64_t>() : -1);
          z.values.push_back(p[1].get<double>());
        }
        auto r = aj.find("residual_log_mass");
        z.residual_mass = (r == aj.end() || r->is_null()) ? 0.0 : std::exp(r->get<double>());
        a.first_token_logits = std::move(z);
      }
      resp.arguments.push_back(std::move(a));
    }
    return resp;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed response: ") + e.what());
  }
}

inline std::vector<std::string> decode_embed_request(std::string_view frame) {
  auto j = detail::parse_frame(frame);
  try {
    if (j.at("type") != "embed") throw ProtocolError("expected an embed request");
    return j.at("texts").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed embed request: ") + e.what());
  }
}

// Decodes an embeddings frame; every vector must share one dimension.
inline EmbedResult decode_embeddings(std::string_view frame) {
  auto j = detail::parse_frame(frame);
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "error") {
      std::string msg = "embedder error: " + j.value("message", std::string("(no message)"));
      if (j.value("retryable", false)) throw TransportError(msg);
      throw ProtocolError(msg);
    }
    if (type != "embeddings") throw ProtocolError("unexpected frame type " + type);
    EmbedResult r;
    r.vectors = j.at("vectors").get<std::vector<std::vector<double>>>();
    if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
    for (const auto& v : r.vectors)
      if (v.size() != r.vectors.front().size() || v.empty()) throw ProtocolError("embedding dimensions differ");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed embeddings frame: ") + e.what());
  }
}

}  // namespace s2c::wire
