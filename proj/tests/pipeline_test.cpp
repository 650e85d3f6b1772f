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

#include <gtest/gtest.h>

#include "support.hpp"

namespace s2c {
namespace {

using testing::boston;

// boston() plus a third event: "charged" with the pronoun as Detainee.
Document three_events() {
  Document d = boston();
  d.events.push_back({"Arrest", {16, 17}, 3, {{{14, 15}, "Detainee", true}}});
  return d;
}

Document one_event() {
  Document d = boston();
  d.events.resize(1);
  return d;
}

// Wraps a generator and keeps every request it sees.
class Recording final : public Generator {
 public:
  explicit Recording(const Generator& inner) : inner_(inner) {}
  GenerateResponse generate(const GenerateRequest& r) const override {
    std::lock_guard lock(mu_);
    seen.push_back(r);
    return inner_.generate(r);
  }
  mutable std::vector<GenerateRequest> seen;

 private:
  const Generator& inner_;
  mutable std::mutex mu_;
};

class Throwing final : public Generator {
 public:
  GenerateResponse generate(const GenerateRequest&) const override { throw DataError("model exploded"); }
};

class Garbage final : public Generator {
 public:
  GenerateResponse generate(const GenerateRequest&) const override { return {"not a template", {}}; }
};

struct Fixture {
  Ontology onto = testing::ontology();
  std::vector<Document> docs{three_events()};
  OracleGenerator oracle{docs, onto};
  HashingEmbedder embedder{64};
};

TEST(FirstInference, SingleEventNeverRetrieves) {
  Fixture f;
  Document d = one_event();
  OracleGenerator gen({d}, f.onto);
  Recording rec(gen);
  auto pass = first_inference(d, f.onto, rec, f.embedder, DifficultyMode::R1);
  ASSERT_EQ(pass.calls.size(), 1u);
  EXPECT_FALSE(pass.calls[0].retrieved_from);
  EXPECT_TRUE(rec.seen[0].input.retrieved.empty());
  EXPECT_EQ(rec.seen[0].input.text().rfind("<s> </s> <s> ", 0), 0u);
}

TEST(FirstInference, R1RetrievesFromEarlierEvents) {
  Fixture f;
  Recording rec(f.oracle);
  auto pass = first_inference(f.docs[0], f.onto, rec, f.embedder, DifficultyMode::R1);
  ASSERT_EQ(pass.calls.size(), 3u);
  EXPECT_FALSE(pass.calls[0].retrieved_from);
  ASSERT_TRUE(pass.calls[1].retrieved_from);
  EXPECT_EQ(pass.calls[1].retrieved_from->appearance_index, 1);
  ASSERT_TRUE(pass.calls[2].retrieved_from);
  EXPECT_LT(pass.calls[2].retrieved_from->appearance_index, 3);
  int from = pass.calls[2].retrieved_from->appearance_index;
  EXPECT_EQ(rec.seen[2].input.retrieved, pass.predictions[static_cast<std::size_t>(from - 1)].filled_text);
  for (const auto& r : rec.seen) EXPECT_TRUE(r.banned.empty());
}

TEST(FirstInference, R2NeverRetrieves) {
  Fixture f;
  Recording rec(f.oracle);
  auto pass = first_inference(f.docs[0], f.onto, rec, f.embedder, DifficultyMode::R2);
  for (const auto& c : pass.calls) EXPECT_FALSE(c.retrieved_from);
  for (const auto& r : rec.seen) EXPECT_TRUE(r.input.retrieved.empty());
  for (const auto& p : pass.predictions) {
    EXPECT_EQ(p.prediction_order, p.event_ref.appearance_index);
    for (const auto& a : p.arguments) EXPECT_FALSE(a.calibrated_prob);
  }
}

TEST(FirstInference, OracleFillsEqualGold) {
  Fixture f;
  auto pass = first_inference(f.docs[0], f.onto, f.oracle, f.embedder, DifficultyMode::R1);
  EXPECT_EQ(pass.predictions[0].filled_text, "Dzhokhar Tsarnaev attacked the marathon using <arg> at Boston place");
  EXPECT_EQ(pass.predictions[1].filled_text, "Police arrested Mike for <arg> at Watertown place");
  EXPECT_EQ(pass.predictions[2].filled_text, "<arg> arrested He for <arg> at <arg> place");
  EXPECT_EQ(pass.predictions[2].arguments.at(0).role, "Detainee");
}

TEST(FirstInference, GeneratorFailureNamesEvent) {
  Fixture f;
  Throwing t;
  try {
    first_inference(f.docs[0], f.onto, t, f.embedder, DifficultyMode::R1);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("document d1 event 1"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("model exploded"), std::string::npos);
  }
  Garbage g;
  try {
    first_inference(f.docs[0], f.onto, g, f.embedder, DifficultyMode::R1);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(std::string(e.what()).find("document d1 event 1"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("[alignment]"), std::string::npos) << e.what();
  }
}

TEST(SecondInference, FollowsScheduleAndCalibrates) {
  Fixture f;
  auto sched = PredictionSchedule::from_orders({3, 1, 2}, ScheduleMode::SimpleToComplex);
  auto pass = second_inference(f.docs[0], sched, f.onto, f.oracle, f.embedder, Temperature(2.0), {});
  ASSERT_EQ(pass.calls.size(), 3u);
  EXPECT_EQ(pass.calls[0].appearance_index, 2);
  EXPECT_EQ(pass.calls[1].appearance_index, 3);
  EXPECT_EQ(pass.calls[2].appearance_index, 1);
  EXPECT_FALSE(pass.calls[0].retrieved_from);
  EXPECT_EQ(pass.calls[1].retrieved_from->appearance_index, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& p = pass.predictions[i];
    EXPECT_EQ(p.event_ref.appearance_index, static_cast<int>(i + 1));
    EXPECT_EQ(p.prediction_order, sched.orders()[i]);
    for (const auto& a : p.arguments) {
      ASSERT_TRUE(a.calibrated_prob);
      EXPECT_DOUBLE_EQ(*a.calibrated_prob, scale(*a.first_token_logits, Temperature(2.0)));
    }
  }
}

TEST(SecondInference, ScheduleSizeMustMatch) {
  Fixture f;
  EXPECT_THROW(second_inference(f.docs[0], PredictionSchedule::front_to_back(2), f.onto, f.oracle, f.embedder,
                                Temperature(1.0), {}),
               UsageError);
}

TEST(SecondInference, EqualDifficultiesReproduceFrontToBack) {
  Fixture f;
  MockGenerator mock(f.docs, f.onto, {7});
  std::vector<double> equal(3, 0.4);
  auto s2c = second_inference(f.docs[0], reorder(equal), f.onto, mock, f.embedder, Temperature(1.3), {});
  auto f2b = second_inference(f.docs[0], PredictionSchedule::front_to_back(3), f.onto, mock, f.embedder,
                              Temperature(1.3), {});
  EXPECT_EQ(s2c.predictions, f2b.predictions);
}

TEST(SecondInference, DegenerateBoundsMatchNoConstraints) {
  Fixture f;
  ConstraintSettings on{ConstraintMode::Bounded, Bounds(0.6, 0.6), {{"Detainee", "Attacker"}, {"Attacker", "Jailer"}}};
  auto sched = PredictionSchedule::from_orders({2, 1, 3}, ScheduleMode::SimpleToComplex);
  auto a = second_inference(f.docs[0], sched, f.onto, f.oracle, f.embedder, Temperature(1.0), on);
  auto b = second_inference(f.docs[0], sched, f.onto, f.oracle, f.embedder, Temperature(1.0), {});
  EXPECT_EQ(a.predictions, b.predictions);
  for (const auto& c : a.calls) EXPECT_TRUE(c.banned.empty());
}

TEST(SecondInference, OriginalConstraintsBanAcrossEvents) {
  Fixture f;
  // Mike is predicted as Detainee first; the rule then bans him as Jailer.
  ConstraintSettings on{ConstraintMode::Original, {}, {{"Detainee", "Jailer"}}};
  auto pass = second_inference(f.docs[0], PredictionSchedule::front_to_back(3), f.onto, f.oracle, f.embedder,
                               Temperature(1.0), on);
  EXPECT_TRUE(pass.calls[0].banned.empty());
  EXPECT_TRUE(pass.calls[1].banned.empty());
  EXPECT_TRUE(pass.calls[2].banned.contains("Jailer", "Mike"));
  EXPECT_EQ(pass.calls[2].banned.size(), 1u);
}

TEST(SecondInference, FullBoundsMatchOriginal) {
  Fixture f;
  MockGenerator mock(f.docs, f.onto, {3});
  std::vector<ConstraintRule> rules{{"Detainee", "Attacker"}, {"Attacker", "Detainee"}, {"Jailer", "Detainee"}};
  auto sched = PredictionSchedule::from_orders({3, 2, 1}, ScheduleMode::SimpleToComplex);
  auto bounded = second_inference(f.docs[0], sched, f.onto, mock, f.embedder, Temperature(1.5),
                                  {ConstraintMode::Bounded, Bounds(0, 1), rules});
  auto original = second_inference(f.docs[0], sched, f.onto, mock, f.embedder, Temperature(1.5),
                                   {ConstraintMode::Original, {}, rules});
  ASSERT_EQ(bounded.calls.size(), original.calls.size());
  for (std::size_t i = 0; i < bounded.calls.size(); ++i) EXPECT_EQ(bounded.calls[i].banned, original.calls[i].banned);
  EXPECT_EQ(bounded.predictions, original.predictions);
}

TEST(ScheduleFromFirstPass, OrdersByCalibratedDifficulty) {
  Fixture f;
  ScriptedLogits script;
  // Event 1 arguments are uncertain, event 3 is near certain.
  script[{"d1", 1, 1, "Dzhokhar Tsarnaev"}] = testing::logits({0.2, 0, 0, 0});
  script[{"d1", 1, 2, "the marathon"}] = testing::logits({0.2, 0, 0, 0});
  script[{"d1", 1, 4, "Boston"}] = testing::logits({0.2, 0, 0, 0});
  script[{"d1", 2, 1, "Police"}] = testing::logits({3, 0, 0, 0});
  script[{"d1", 2, 2, "Mike"}] = testing::logits({3, 0, 0, 0});
  script[{"d1", 2, 4, "Watertown"}] = testing::logits({3, 0, 0, 0});
  script[{"d1", 3, 2, "He"}] = testing::logits({9, 0, 0, 0});
  OracleGenerator gen(f.docs, f.onto, script);
  auto pass = first_inference(f.docs[0], f.onto, gen, f.embedder, DifficultyMode::R1);
  auto [diffs, sched] = schedule_from_first_pass(pass.predictions, Temperature(1.0));
  ASSERT_EQ(diffs.size(), 3u);
  EXPECT_LT(diffs[2].event_difficulty, diffs[0].event_difficulty);
  EXPECT_EQ(sched.sequence().front(), 3);
  EXPECT_EQ(sched.sequence().back(), 1);
}

TEST(Conditions, ParseAndPrint) {
  for (auto name : kConditionNames) EXPECT_EQ(to_string(parse_condition(name)), name);
  try {
    parse_condition("s2c-x");
    FAIL();
  } catch (const UsageError& e) {
    std::string m = e.what();
    for (auto name : kConditionNames) EXPECT_NE(m.find(name), std::string::npos) << m;
  }
}

ExperimentData synthetic_data(std::size_t docs = 4, std::size_t events = 40) {
  ExperimentData d;
  d.ontology = synthetic::ontology();
  d.rules = synthetic::rules();
  synthetic::CorpusShape t;
  t.documents = docs;
  t.events = events;
  t.seed = 21;
  d.test = synthetic::make_corpus(t);
  synthetic::CorpusShape v = t;
  v.seed = 22;
  v.id_prefix = "val";
  d.validation = synthetic::make_corpus(v);
  return d;
}

std::vector<Document> all_docs(const ExperimentData& d) {
  auto all = d.test;
  all.insert(all.end(), d.validation.begin(), d.validation.end());
  return all;
}

TEST(RunExperiment, OracleIsPerfectUnderEveryCondition) {
  auto data = synthetic_data();
  OracleGenerator oracle(all_docs(data), data.ontology);
  HashingEmbedder emb(64);
  for (auto name : kConditionNames) {
    ExperimentConfig c;
    c.condition = parse_condition(name);
    auto art = run_experiment(data, c, oracle, emb);
    EXPECT_DOUBLE_EQ(art.head.scores.arg_c.f1, 1.0) << name;
    EXPECT_DOUBLE_EQ(art.coref.scores.arg_c.f1, 1.0) << name;
    EXPECT_EQ(art.head.errors.total(), 0u) << name;
  }
}

TEST(RunExperiment, ConditionWiring) {
  auto data = synthetic_data();
  MockGenerator mock(all_docs(data), data.ontology, {5});
  HashingEmbedder emb(64);
  ExperimentConfig c;
  c.condition = Condition::F2BMemory;
  auto f2b = run_experiment(data, c, mock, emb);
  EXPECT_EQ(f2b.constraint_mode, ConstraintMode::Off);
  EXPECT_FALSE(f2b.bounds);
  for (const auto& d : f2b.documents) {
    EXPECT_FALSE(d.first_pass);
    EXPECT_EQ(d.schedule.mode(), ScheduleMode::FrontToBack);
  }
  c.condition = Condition::F2BMemoryConstraints;
  EXPECT_EQ(run_experiment(data, c, mock, emb).constraint_mode, ConstraintMode::Original);
  c.condition = Condition::S2C;
  auto s2c = run_experiment(data, c, mock, emb);
  EXPECT_EQ(s2c.constraint_mode, ConstraintMode::Off);
  for (const auto& d : s2c.documents) {
    EXPECT_TRUE(d.first_pass);
    EXPECT_EQ(d.difficulties.size(), d.schedule.size());
    EXPECT_EQ(d.schedule.mode(), ScheduleMode::SimpleToComplex);
  }
  c.condition = Condition::S2CCD;
  auto cd = run_experiment(data, c, mock, emb);
  EXPECT_EQ(cd.constraint_mode, ConstraintMode::Bounded);
  ASSERT_TRUE(cd.bounds);
  EXPECT_TRUE(cd.bounds_selected);
  c.bounds_override = Bounds(0.2, 0.9);
  auto fixed = run_experiment(data, c, mock, emb);
  EXPECT_EQ(*fixed.bounds, Bounds(0.2, 0.9));
  EXPECT_FALSE(fixed.bounds_selected);
  // Temperature is fitted on validation and reused for the test documents.
  EXPECT_EQ(f2b.temperature, s2c.temperature);
  EXPECT_EQ(f2b.calibration_log.size(), cd.calibration_log.size());
  for (const auto& r : cd.calibration_log) EXPECT_EQ(r.event_ref.doc_id.rfind("val", 0), 0u);
}

TEST(RunExperiment, DeterministicAndWorkerIndependent) {
  auto data = synthetic_data(6, 50);
  MockGenerator mock(all_docs(data), data.ontology, {9});
  HashingEmbedder emb(64);
  ExperimentConfig c;
  auto a = run_experiment(data, c, mock, emb);
  c.workers = 4;
  auto b = run_experiment(data, c, mock, emb);
  EXPECT_EQ(metrics_json(a.head, a.coref), metrics_json(b.head, b.coref));
  ASSERT_EQ(a.documents.size(), b.documents.size());
  for (std::size_t i = 0; i < a.documents.size(); ++i) {
    EXPECT_EQ(a.documents[i].second_pass.predictions, b.documents[i].second_pass.predictions);
    EXPECT_EQ(a.documents[i].schedule, b.documents[i].schedule);
  }
  EXPECT_EQ(a.temperature, b.temperature);
}

TEST(RunExperiment, RejectsBadSplits) {
  auto data = synthetic_data();
  OracleGenerator oracle(all_docs(data), data.ontology);
  HashingEmbedder emb(16);
  auto overlap = data;
  overlap.validation.push_back(overlap.test.front());
  EXPECT_THROW(run_experiment(overlap, {}, oracle, emb), UsageError);
  auto none = data;
  none.validation.clear();
  EXPECT_THROW(run_experiment(none, {}, oracle, emb), UsageError);
}

}  // namespace
}  // namespace s2c
