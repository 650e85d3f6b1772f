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

// The pluggable generator contract and response validation.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "s2c/constraints.hpp"
#include "s2c/sequence.hpp"
#include "s2c/types.hpp"

namespace s2c {

inline constexpr int kDefaultTopK = 50;

struct GenerateRequest {
  InputSequence input;
  BannedSet banned;
  int top_k = kDefaultTopK;
};

struct GenerateResponse {
  std::string filled_text;
  // text, slot_id, first_token_logits and raw_prob are set by the generator;
  // role is filled in from the template on receipt.
  std::vector<ArgumentPrediction> arguments;

  friend bool operator==(const GenerateResponse&, const GenerateResponse&) = default;
};

// Fills one event template. Implementations must tolerate concurrent calls
// for different documents.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual GenerateResponse generate(const GenerateRequest& request) const = 0;
};

enum class DiagnosticKind {
  Alignment,         // filled text does not match the template scaffold
  ArgumentMismatch,  // argument list disagrees with the filled text
  UnknownSlot,
  BanViolation,
  MissingLogits,
  BadLogits,
  BadProbability,
};

inline std::string_view to_string(DiagnosticKind k) {
  switch (k) {
    case DiagnosticKind::Alignment: return "alignment";
    case DiagnosticKind::ArgumentMismatch: return "argument-mismatch";
    case DiagnosticKind::UnknownSlot: return "unknown-slot";
    case DiagnosticKind::BanViolation: return "ban-violation";
    case DiagnosticKind::MissingLogits: return "missing-logits";
    case DiagnosticKind::BadLogits: return "bad-logits";
    case DiagnosticKind::BadProbability: return "bad-probability";
  }
  return "unknown";
}

struct Diagnostic {
  DiagnosticKind kind;
  int slot_id = 0;
  std::string message;
};

// Checks a response against its request. Never throws on malformed content;
// an empty result means the response is acceptable.
inline std::vector<Diagnostic> validate_response(const GenerateResponse& resp, const GenerateRequest& req,
                                                 const Template& tmpl) {
  std::vector<Diagnostic> out;
  std::vector<ArgumentPrediction> parsed;
  try {
    parsed = parse_filled_template(resp.filled_text, tmpl);
  } catch (const AlignmentError& e) {
    out.push_back({DiagnosticKind::Alignment, 0, e.what()});
  }

  for (const auto& a : resp.arguments) {
    const std::string* role = tmpl.role_of(a.slot_id);
    if (!role) {
      out.push_back({DiagnosticKind::UnknownSlot, a.slot_id,
                     "argument \"" + a.text + "\" names slot " + std::to_string(a.slot_id) + " absent from template"});
      continue;
    }
    if (req.banned.contains(*role, a.text))
      out.push_back({DiagnosticKind::BanViolation, a.slot_id, "\"" + a.text + "\" is banned as " + *role});
    if (!a.first_token_logits || a.first_token_logits->values.empty()) {
      out.push_back({DiagnosticKind::MissingLogits, a.slot_id,
                     "no first-token logits for \"" + a.text + "\" in slot " + std::to_string(a.slot_id)});
    } else {
      const auto& z = *a.first_token_logits;
      bool finite = std::all_of(z.values.begin(), z.values.end(), [](double v) { return std::isfinite(v); });
      bool ids_ok = z.token_ids.empty() || z.token_ids.size() == z.values.size();
      if (!finite || !ids_ok || !(z.residual_mass >= 0) || !std::isfinite(z.residual_mass))
        out.push_back({DiagnosticKind::BadLogits, a.slot_id, "malformed logits in slot " + std::to_string(a.slot_id)});
      else if (static_cast<int>(z.values.size()) > req.top_k)
        out.push_back({DiagnosticKind::BadLogits, a.slot_id,
                       "more than top_k=" + std::to_string(req.top_k) + " logits in slot " + std::to_string(a.slot_id)});
    }
    if (!(a.raw_prob > 0 && a.raw_prob <= 1))
      out.push_back({DiagnosticKind::BadProbability, a.slot_id, "raw probability outside (0,1] in slot " +
                                                                    std::to_string(a.slot_id)});
  }

  if (out.empty() || out.front().kind != DiagnosticKind::Alignment) {
    auto key = [](const ArgumentPrediction& a) { return std::make_pair(a.slot_id, a.text); };
    std::vector<std::pair<int, std::string>> want, got;
    for (const auto& a : parsed) want.push_back(key(a));
    for (const auto& a : resp.arguments) got.push_back(key(a));
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (want != got)
      out.push_back({DiagnosticKind::ArgumentMismatch, 0, "argument list does not match filled text"});
    // Bans also apply to whatever the filled text itself carries.
    for (const auto& a : parsed)
      if (req.banned.contains(a.role, a.text) &&
          std::none_of(resp.arguments.begin(), resp.arguments.end(),
                       [&](const ArgumentPrediction& r) { return r.slot_id == a.slot_id && r.text == a.text; }))
        out.push_back({DiagnosticKind::BanViolation, a.slot_id, "\"" + a.text + "\" is banned as " + a.role});
  }
  return out;
}

// Turns an accepted response into an event prediction with roles attached.
inline EventPrediction to_prediction(const GenerateResponse& resp, const GenerateRequest& req, const Template& tmpl,
                                     int prediction_order) {
  EventPrediction p;
  p.event_ref = req.input.event_ref;
  p.filled_text = resp.filled_text;
  p.prediction_order = prediction_order;
  p.arguments = resp.arguments;
  for (auto& a : p.arguments) {
    const std::string* role = tmpl.role_of(a.slot_id);
    a.role = role ? *role : std::string();
  }
  return p;
}

// Keeps the `top_k` largest logits (ties by lower token id) and folds the
// rest into residual_mass.
inline LogitVector truncate_logits(std::span<const double> full, int top_k) {
  if (top_k < 1) throw UsageError("top_k must be at least 1");
  std::vector<std::size_t> idx(full.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return full[a] > full[b]; });
  LogitVector z;
  std::size_t keep = std::min(idx.size(), static_cast<std::size_t>(top_k));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    if (r < keep) {
      z.values.push_back(full[idx[r]]);
      z.token_ids.push_back(static_cast<std::int64_t>(idx[r]));
    } else {
      z.residual_mass += std::exp(full[idx[r]]);
    }
  }
  return z;
}

}  // namespace s2c
