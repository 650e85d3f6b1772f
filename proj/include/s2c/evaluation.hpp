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

// Argument identification / classification scoring under head-word and
// coreference matching, plus the unidentified/spurious/misclassified error
// breakdown.

#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "s2c/error.hpp"
#include "s2c/text.hpp"
#include "s2c/types.hpp"

namespace s2c {

enum class MatchMode { Head, Coref };

inline std::string_view to_string(MatchMode m) { return m == MatchMode::Head ? "head" : "coref"; }

inline bool head_match(std::string_view pred_text, const Span& gold, const Document& doc,
                       const WarningSink& on_warning = {}) {
  std::string_view head = text::first_token(pred_text);
  if (head.empty()) {
    warn(on_warning, "empty predicted argument text in " + doc.doc_id);
    return false;
  }
  if (gold.empty() || gold.end > doc.tokens.size()) throw DataError("gold span out of range in " + doc.doc_id);
  return text::ascii_lower(head) == text::ascii_lower(doc.tokens[gold.start]);
}

inline bool coref_match(std::string_view pred_text, const Span& gold, const CorefClusters& clusters,
                        const Document& doc, const WarningSink& on_warning = {}) {
  if (head_match(pred_text, gold, doc, on_warning)) return true;
  if (const auto* cluster = clusters.cluster_of(gold))
    for (const Span& mention : *cluster)
      if (head_match(pred_text, mention, doc)) return true;
  return false;
}

struct PredictedArgument {
  std::string text;
  std::string role;
};

struct EventPredictions {
  EventRef event_ref;
  std::vector<PredictedArgument> arguments;
};

inline EventPredictions to_scored(const EventPrediction& p) {
  EventPredictions e{p.event_ref, {}};
  for (const auto& a : p.arguments) e.arguments.push_back({a.text, a.role});
  return e;
}

namespace detail {

// Maximum-weight assignment (Hungarian algorithm, O(n^3)) on a rows x cols
// matrix of nonnegative integer weights. Returns, per row, the matched
// column or -1; zero-weight pairs are reported as unmatched.
inline std::vector<int> max_weight_assignment(const std::vector<std::vector<long long>>& w) {
  const std::size_t rows = w.size();
  const std::size_t cols = rows ? w[0].size() : 0;
  const std::size_t n = std::max(rows, cols);
  std::vector<int> result(rows, -1);
  if (n == 0) return result;
  long long max_w = 0;
  for (const auto& r : w)
    for (long long x : r) max_w = std::max(max_w, x);
  // Minimise cost = max_w - weight over a padded square matrix (1-based).
  auto cost = [&](std::size_t i, std::size_t j) -> long long {
    if (i > rows || j > cols) return max_w;
    return max_w - w[i - 1][j - 1];
  };
  const long long inf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<long long> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      std::size_t i0 = p[j0], j1 = 0;
      long long delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        long long cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  for (std::size_t j = 1; j <= n; ++j) {
    std::size_t i = p[j];
    if (i >= 1 && i <= rows && j <= cols && w[i - 1][j - 1] > 0) result[i - 1] = static_cast<int>(j - 1);
  }
  return result;
}

}  // namespace detail

// Per-event match counts.
struct EventCounts {
  std::size_t predicted = 0;
  std::size_t gold = 0;
  std::size_t identified = 0;     // size of a maximum span matching
  std::size_t classified = 0;     // size of a maximum span+role matching
  std::size_t misclassified = 0;  // further span-only pairs beside a maximum span+role matching
};

// Matches predictions against the informative gold arguments of one event.
// Each gold argument is consumed at most once.
inline EventCounts match_event(const std::vector<PredictedArgument>& preds, const EventMention& event,
                               const Document& doc, MatchMode mode, const WarningSink& on_warning = {}) {
  std::vector<const GoldArgument*> golds;
  for (const auto& g : event.gold_arguments)
    if (g.informative) golds.push_back(&g);

  EventCounts c;
  c.predicted = preds.size();
  c.gold = golds.size();
  if (preds.empty() || golds.empty()) return c;

  const long long heavy = static_cast<long long>(preds.size() + golds.size()) + 1;
  std::vector<std::vector<long long>> span_w(preds.size(), std::vector<long long>(golds.size(), 0));
  std::vector<std::vector<long long>> role_w = span_w, lex_w = span_w;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < golds.size(); ++j) {
      bool span = mode == MatchMode::Head ? head_match(preds[i].text, golds[j]->span, doc, on_warning)
                                          : coref_match(preds[i].text, golds[j]->span, doc.coref, doc, on_warning);
      bool role = span && preds[i].role == golds[j]->role;
      span_w[i][j] = span;
      role_w[i][j] = role;
      lex_w[i][j] = role ? heavy : (span ? 1 : 0);
    }
  }
  auto count = [](const std::vector<int>& m) {
    return static_cast<std::size_t>(std::count_if(m.begin(), m.end(), [](int x) { return x >= 0; }));
  };
  c.identified = count(detail::max_weight_assignment(span_w));
  c.classified = count(detail::max_weight_assignment(role_w));
  auto lex = detail::max_weight_assignment(lex_w);
  std::size_t lex_role = 0;
  for (std::size_t i = 0; i < lex.size(); ++i)
    if (lex[i] >= 0 && role_w[i][static_cast<std::size_t>(lex[i])]) ++lex_role;
  c.misclassified = count(lex) - lex_role;
  return c;
}

struct PRF {
  std::size_t correct = 0;
  std::size_t predicted = 0;
  std::size_t gold = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;

  static PRF from_counts(std::size_t correct, std::size_t predicted, std::size_t gold) {
    PRF r{correct, predicted, gold};
    r.precision = predicted ? static_cast<double>(correct) / static_cast<double>(predicted) : 0.0;
    r.recall = gold ? static_cast<double>(correct) / static_cast<double>(gold) : 0.0;
    r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
  }
};

struct Scores {
  PRF arg_i;
  PRF arg_c;
};

struct ErrorCounts {
  std::size_t unidentified = 0;
  std::size_t spurious = 0;
  std::size_t misclassified = 0;

  std::size_t total() const { return unidentified + spurious + misclassified; }
};

struct Evaluation {
  Scores scores;
  ErrorCounts errors;
};

// Micro-averaged scores and error counts over a corpus. Events without an
// entry in `preds` count as predicting nothing; a prediction for an event
// absent from `docs` is an error.
inline Evaluation evaluate(const std::vector<EventPredictions>& preds, const std::vector<Document>& docs,
                           MatchMode mode, const WarningSink& on_warning = {}) {
  std::map<EventRef, const std::vector<PredictedArgument>*> by_event;
  std::map<std::string, const Document*> by_doc;
  for (const auto& d : docs) by_doc[d.doc_id] = &d;
  for (const auto& p : preds) {
    auto it = by_doc.find(p.event_ref.doc_id);
    if (it == by_doc.end() || p.event_ref.appearance_index < 1 ||
        static_cast<std::size_t>(p.event_ref.appearance_index) > it->second->events.size())
      throw DataError("prediction for unknown event " + p.event_ref.doc_id + "#" +
                      std::to_string(p.event_ref.appearance_index));
    if (!by_event.emplace(p.event_ref, &p.arguments).second)
      throw DataError("duplicate prediction for event " + p.event_ref.doc_id + "#" +
                      std::to_string(p.event_ref.appearance_index));
  }

  static const std::vector<PredictedArgument> kNone;
  std::size_t n_pred = 0, n_gold = 0, ident = 0, classif = 0, mis = 0;
  for (const auto& d : docs) {
    for (const auto& ev : d.events) {
      auto it = by_event.find({d.doc_id, ev.appearance_index});
      const auto& p = it == by_event.end() ? kNone : *it->second;
      EventCounts c = match_event(p, ev, d, mode, on_warning);
      n_pred += c.predicted;
      n_gold += c.gold;
      ident += c.identified;
      classif += c.classified;
      mis += c.misclassified;
    }
  }
  Evaluation e;
  e.scores.arg_i = PRF::from_counts(ident, n_pred, n_gold);
  e.scores.arg_c = PRF::from_counts(classif, n_pred, n_gold);
  e.errors.misclassified = mis;
  e.errors.unidentified = n_gold - classif - mis;
  e.errors.spurious = n_pred - classif - mis;
  return e;
}

inline Scores score(const std::vector<EventPredictions>& preds, const std::vector<Document>& docs, MatchMode mode) {
  return evaluate(preds, docs, mode).scores;
}

inline ErrorCounts error_report(const std::vector<EventPredictions>& preds, const std::vector<Document>& docs,
                                MatchMode mode) {
  return evaluate(preds, docs, mode).errors;
}

}  // namespace s2c
