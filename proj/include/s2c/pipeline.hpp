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

// Two-pass extraction: a front-to-back pass measures event difficulty, a
// second pass predicts events from simple to complex with document memory
// and (optionally) confidence-bounded constraints.

#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "s2c/calibration.hpp"
#include "s2c/constraints.hpp"
#include "s2c/embedding.hpp"
#include "s2c/evaluation.hpp"
#include "s2c/generator.hpp"
#include "s2c/memory.hpp"
#include "s2c/ontology.hpp"
#include "s2c/scheduler.hpp"
#include "s2c/sequence.hpp"

namespace s2c {

// R1: the first pass retrieves from memory like the second pass does.
// R2: the first pass sends no retrieved prediction at all.
enum class DifficultyMode { R1, R2 };

inline std::string_view to_string(DifficultyMode m) { return m == DifficultyMode::R1 ? "r1" : "r2"; }

struct PassOptions {
  std::size_t window = kDefaultWindow;
  int top_k = kDefaultTopK;
};

enum class ConstraintMode { Off, Original, Bounded };

inline std::string_view to_string(ConstraintMode m) {
  switch (m) {
    case ConstraintMode::Off: return "off";
    case ConstraintMode::Original: return "original";
    case ConstraintMode::Bounded: return "bounded";
  }
  return "off";
}

struct ConstraintSettings {
  ConstraintMode mode = ConstraintMode::Off;
  Bounds bounds;
  std::vector<ConstraintRule> rules;
};

// What one generate call saw; kept for analysis and for the identities the
// tests check (banned sets, retrieval provenance).
struct CallRecord {
  int appearance_index = 0;
  int prediction_order = 0;
  std::optional<EventRef> retrieved_from;
  BannedSet banned;
};

struct PassResult {
  std::vector<EventPrediction> predictions;  // appearance order
  std::vector<CallRecord> calls;             // call order
};

namespace detail {

inline std::string event_name(const std::string& doc_id, int idx) { return doc_id + "#" + std::to_string(idx); }

// Calls the generator, re-validates the response and tags any failure with
// the event it happened on.
inline EventPrediction generate_checked(const Generator& generator, const GenerateRequest& req, const Template& tmpl,
                                        int prediction_order) {
  const std::string where =
      "document " + req.input.event_ref.doc_id + " event " + std::to_string(req.input.event_ref.appearance_index);
  GenerateResponse resp;
  try {
    resp = generator.generate(req);
  } catch (const TransportError& e) {
    throw TransportError(where + ": " + e.what());
  } catch (const ProtocolError& e) {
    throw ProtocolError(where + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw ProtocolError(where + ": generator failed: " + e.what());
  }
  auto diags = validate_response(resp, req, tmpl);
  if (!diags.empty()) {
    std::string msg = where + ": invalid generator response:";
    for (const auto& d : diags) msg += " [" + std::string(to_string(d.kind)) + "] " + d.message;
    throw ProtocolError(msg);
  }
  return to_prediction(resp, req, tmpl, prediction_order);
}

}  // namespace detail

// Front-to-back pass over `doc`, caching every prediction. Records raw
// probabilities and logits; calibration happens later.
inline PassResult first_inference(const Document& doc, const Ontology& ontology, const Generator& generator,
                                  const Embedder& embedder, DifficultyMode mode, const PassOptions& opt = {}) {
  PassResult out;
  DocumentMemory memory(doc.doc_id);
  for (const auto& ev : doc.events) {
    const Template& tmpl = ontology.at(ev.event_type);
    const EventPrediction* retrieved = nullptr;
    if (mode == DifficultyMode::R1 && !memory.empty())
      retrieved = retrieve(memory, make_event_context(ev, doc, tmpl, opt.window).text(), embedder);
    GenerateRequest req{render_input(ev, doc, tmpl, retrieved, opt.window), {}, opt.top_k};
    CallRecord rec{ev.appearance_index, ev.appearance_index,
                   retrieved ? std::optional<EventRef>(retrieved->event_ref) : std::nullopt, {}};
    EventPrediction pred = detail::generate_checked(generator, req, tmpl, ev.appearance_index);
    memory.cache(pred, embedder);
    out.predictions.push_back(std::move(pred));
    out.calls.push_back(std::move(rec));
  }
  return out;
}

// Predicts the events of `doc` in schedule order with a fresh memory. Every
// prediction is calibrated with `temperature` before it is cached, so the
// constraint bounds see calibrated probabilities.
inline PassResult second_inference(const Document& doc, const PredictionSchedule& schedule, const Ontology& ontology,
                                   const Generator& generator, const Embedder& embedder, Temperature temperature,
                                   const ConstraintSettings& constraints, const PassOptions& opt = {}) {
  if (schedule.size() != doc.events.size())
    throw UsageError("schedule for " + doc.doc_id + " has " + std::to_string(schedule.size()) + " entries, document has " +
                     std::to_string(doc.events.size()) + " events");
  PassResult out;
  std::vector<std::optional<EventPrediction>> by_appearance(doc.events.size());
  DocumentMemory memory(doc.doc_id);
  int order = 0;
  for (int idx : schedule.sequence()) {
    ++order;
    const EventMention& ev = doc.event(idx);
    const Template& tmpl = ontology.at(ev.event_type);
    const EventPrediction* retrieved =
        memory.empty() ? nullptr : retrieve(memory, make_event_context(ev, doc, tmpl, opt.window).text(), embedder);
    BannedSet banned;
    switch (constraints.mode) {
      case ConstraintMode::Off: break;
      case ConstraintMode::Original: banned = derive_banned_unpruned(memory, constraints.rules); break;
      case ConstraintMode::Bounded: banned = derive_banned(memory, constraints.rules, constraints.bounds); break;
    }
    GenerateRequest req{render_input(ev, doc, tmpl, retrieved, opt.window), banned, opt.top_k};
    out.calls.push_back({idx, order, retrieved ? std::optional<EventRef>(retrieved->event_ref) : std::nullopt,
                         std::move(banned)});
    EventPrediction pred = detail::generate_checked(generator, req, tmpl, order);
    calibrate_prediction(pred, temperature);
    memory.cache(pred, embedder);
    by_appearance[static_cast<std::size_t>(idx - 1)] = std::move(pred);
  }
  for (auto& p : by_appearance) out.predictions.push_back(std::move(*p));
  return out;
}

// Difficulties of first-pass predictions and the simple-to-complex schedule
// they induce.
inline std::pair<std::vector<EventDifficulty>, PredictionSchedule> schedule_from_first_pass(
    std::vector<EventPrediction>& first_pass, Temperature temperature, bool use_calibrated = true) {
  std::vector<EventDifficulty> diffs;
  std::vector<double> d;
  for (auto& p : first_pass) {
    calibrate_prediction(p, temperature);
    diffs.push_back(difficulty_of(p, use_calibrated));
    d.push_back(diffs.back().event_difficulty);
  }
  return {std::move(diffs), reorder(d)};
}

// ----------------------------------------------------------------------------
// Experiment conditions

enum class Condition { F2BMemory, F2BMemoryConstraints, S2C, S2CCD };

inline constexpr std::string_view kConditionNames[] = {"f2b-m", "f2b-m-c", "s2c", "s2c-cd"};

inline std::string_view to_string(Condition c) { return kConditionNames[static_cast<int>(c)]; }

inline Condition parse_condition(std::string_view name) {
  for (int i = 0; i < 4; ++i)
    if (kConditionNames[i] == name) return static_cast<Condition>(i);
  throw UsageError("unknown condition \"" + std::string(name) + "\"; valid conditions: f2b-m, f2b-m-c, s2c, s2c-cd");
}

struct ExperimentConfig {
  Condition condition = Condition::S2CCD;
  PassOptions pass;
  DifficultyMode difficulty_mode = DifficultyMode::R1;
  bool reorder_uncalibrated = false;  // diagnostic: order by raw probabilities
  TemperatureGrid grid;
  std::size_t bins = kDefaultBins;
  std::optional<Bounds> bounds_override;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
};

struct ExperimentData {
  std::vector<Document> test;
  std::vector<Document> validation;
  Ontology ontology;
  std::vector<ConstraintRule> rules;
};

struct DocumentRun {
  std::string doc_id;
  std::optional<PassResult> first_pass;
  std::vector<EventDifficulty> difficulties;  // empty for front-to-back conditions
  PredictionSchedule schedule;
  PassResult second_pass;
};

struct CalibrationRecord {
  EventRef event_ref;
  int slot_id = 0;
  std::string text;
  LabeledLogits labeled;
};

struct Provenance {
  std::string temperature_source = "validation";
  std::vector<std::string> validation_docs;
  std::vector<std::string> test_docs;
};

struct RunArtifact {
  Condition condition = Condition::S2CCD;
  std::uint64_t seed = 0;
  DifficultyMode difficulty_mode = DifficultyMode::R1;
  ConstraintMode constraint_mode = ConstraintMode::Off;
  double temperature = 1.0;
  std::optional<Bounds> bounds;
  bool bounds_selected = false;  // true when chosen from validation data
  CalibrationReport calibration;
  std::vector<CalibrationRecord> calibration_log;
  Provenance provenance;
  std::vector<DocumentRun> documents;
  Evaluation head;
  Evaluation coref;

  std::vector<EventPredictions> scored_predictions() const {
    std::vector<EventPredictions> out;
    for (const auto& d : documents)
      for (const auto& p : d.second_pass.predictions) out.push_back(to_scored(p));
    return out;
  }
};

namespace detail {

// Runs fn(i) for i in [0, n) on up to `workers` threads; rethrows the first
// failure (lowest index) after all threads finish.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline bool head_role_correct(const ArgumentPrediction& a, const EventMention& ev, const Document& doc) {
  for (const auto& g : ev.gold_arguments)
    if (g.informative && g.role == a.role && head_match(a.text, g.span, doc)) return true;
  return false;
}

}  // namespace detail

// Front-to-back memory pass over the validation documents; each argument is
// labelled correct when it head-matches a gold argument with the same role.
inline std::vector<CalibrationRecord> collect_calibration_data(const std::vector<Document>& docs,
                                                               const Ontology& ontology, const Generator& generator,
                                                               const Embedder& embedder, const PassOptions& opt,
                                                               std::size_t workers = 1) {
  std::vector<std::vector<CalibrationRecord>> per_doc(docs.size());
  detail::parallel_for(docs.size(), workers, [&](std::size_t i) {
    const Document& d = docs[i];
    auto pass = first_inference(d, ontology, generator, embedder, DifficultyMode::R1, opt);
    for (const auto& p : pass.predictions) {
      const EventMention& ev = d.event(p.event_ref.appearance_index);
      for (const auto& a : p.arguments) {
        if (!a.first_token_logits) throw DataError("validation argument without logits");
        per_doc[i].push_back({p.event_ref, a.slot_id, a.text, {*a.first_token_logits, detail::head_role_correct(a, ev, d)}});
      }
    }
  });
  std::vector<CalibrationRecord> out;
  for (auto& v : per_doc) out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  return out;
}

inline std::vector<LabeledLogits> labeled(const std::vector<CalibrationRecord>& log) {
  std::vector<LabeledLogits> out;
  out.reserve(log.size());
  for (const auto& r : log) out.push_back(r.labeled);
  return out;
}

// Runs one condition end to end on the test documents: temperature fitted
// on validation, optional difficulty pass and reordering, final pass,
// scoring. Deterministic for deterministic generators and embedders.
inline RunArtifact run_experiment(const ExperimentData& data, const ExperimentConfig& config,
                                  const Generator& generator, const Embedder& embedder) {
  if (data.validation.empty()) throw UsageError("a validation corpus is required to fit the temperature");
  RunArtifact art;
  art.condition = config.condition;
  art.seed = config.seed;
  art.difficulty_mode = config.difficulty_mode;
  for (const auto& d : data.validation) art.provenance.validation_docs.push_back(d.doc_id);
  for (const auto& d : data.test) art.provenance.test_docs.push_back(d.doc_id);
  for (const auto& id : art.provenance.test_docs)
    if (std::find(art.provenance.validation_docs.begin(), art.provenance.validation_docs.end(), id) !=
        art.provenance.validation_docs.end())
      throw UsageError("document " + id + " is in both the validation and the test corpus");

  art.calibration_log =
      collect_calibration_data(data.validation, data.ontology, generator, embedder, config.pass, config.workers);
  auto val = labeled(art.calibration_log);
  if (val.empty()) throw DataError("validation pass produced no arguments to calibrate on");
  Temperature t = fit_temperature(val, config.grid, config.bins);
  art.temperature = t.value();
  art.calibration = calibration_report(val, t, config.bins);

  const bool reorders = config.condition == Condition::S2C || config.condition == Condition::S2CCD;
  ConstraintSettings cs;
  cs.rules = data.rules;
  switch (config.condition) {
    case Condition::F2BMemory:
    case Condition::S2C: cs.mode = ConstraintMode::Off; break;
    case Condition::F2BMemoryConstraints: cs.mode = ConstraintMode::Original; break;
    case Condition::S2CCD: {
      cs.mode = ConstraintMode::Bounded;
      if (config.bounds_override) {
        cs.bounds = *config.bounds_override;
      } else {
        std::vector<double> probs;
        for (const auto& v : val) probs.push_back(scale(v.logits, t));
        cs.bounds = select_bounds(probs, config.bins, art.calibration.after);
        art.bounds_selected = true;
      }
      art.bounds = cs.bounds;
      break;
    }
  }
  art.constraint_mode = cs.mode;

  art.documents.resize(data.test.size());
  detail::parallel_for(data.test.size(), config.workers, [&](std::size_t i) {
    const Document& d = data.test[i];
    DocumentRun run;
    run.doc_id = d.doc_id;
    if (reorders) {
      run.first_pass = first_inference(d, data.ontology, generator, embedder, config.difficulty_mode, config.pass);
      auto [diffs, sched] = schedule_from_first_pass(run.first_pass->predictions, t, !config.reorder_uncalibrated);
      run.difficulties = std::move(diffs);
      run.schedule = std::move(sched);
    } else {
      run.schedule = PredictionSchedule::front_to_back(d.events.size());
    }
    run.second_pass = second_inference(d, run.schedule, data.ontology, generator, embedder, t, cs, config.pass);
    art.documents[i] = std::move(run);
  });

  auto preds = art.scored_predictions();
  art.head = evaluate(preds, data.test, MatchMode::Head);
  art.coref = evaluate(preds, data.test, MatchMode::Coref);
  return art;
}

}  // namespace s2c
