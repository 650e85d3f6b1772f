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

const std::vector<ConstraintRule> kRules{{"Detainee", "Attacker"}, {"Victim", "Target"}};

DocumentMemory memory_with(std::vector<std::tuple<std::string, std::string, std::optional<double>>> args) {
  static const HashingEmbedder embedder(16);
  DocumentMemory m("d1");
  EventPrediction p;
  p.event_ref = {"d1", 2};
  p.filled_text = "Police arrested Mike for <arg> at Watertown place";
  for (auto& [text, role, prob] : args) {
    ArgumentPrediction a;
    a.text = text;
    a.role = role;
    a.calibrated_prob = prob;
    p.arguments.push_back(a);
  }
  m.cache(p, embedder);
  return m;
}

TEST(DeriveBanned, InsideBoundsBans) {
  auto m = memory_with({{"Mike", "Detainee", 0.7}, {"Police", "Jailer", 0.9}});
  auto b = derive_banned(m, kRules, Bounds(0.5, 0.8));
  EXPECT_EQ(b.size(), 1u);
  EXPECT_TRUE(b.contains("Attacker", "Mike"));
  EXPECT_FALSE(b.contains("Detainee", "Mike"));
}

TEST(DeriveBanned, OutsideBoundsDoesNotBan) {
  EXPECT_TRUE(derive_banned(memory_with({{"Mike", "Detainee", 0.9}}), kRules, Bounds(0.5, 0.8)).empty());
  // Both ends are open.
  EXPECT_TRUE(derive_banned(memory_with({{"Mike", "Detainee", 0.8}}), kRules, Bounds(0.5, 0.8)).empty());
  EXPECT_TRUE(derive_banned(memory_with({{"Mike", "Detainee", 0.5}}), kRules, Bounds(0.5, 0.8)).empty());
}

TEST(DeriveBanned, DegenerateBoundsBanNothing) {
  auto m = memory_with({{"Mike", "Detainee", 0.7}});
  EXPECT_TRUE(derive_banned(m, kRules, Bounds(0.7, 0.7)).empty());
  EXPECT_TRUE(derive_banned(m, kRules, Bounds(0.3, 0.3)).empty());
}

TEST(DeriveBanned, UnprunedIgnoresConfidence) {
  auto m = memory_with({{"Mike", "Detainee", std::nullopt}, {"Bob", "Victim", 0.99}});
  auto b = derive_banned_unpruned(m, kRules);
  EXPECT_TRUE(b.contains("Attacker", "Mike"));
  EXPECT_TRUE(b.contains("Target", "Bob"));
  EXPECT_EQ(b.size(), 2u);
}

TEST(DeriveBanned, MissingCalibratedProbabilityIsError) {
  auto m = memory_with({{"Mike", "Detainee", std::nullopt}});
  EXPECT_THROW(derive_banned(m, kRules, Bounds(0.0, 1.0)), DataError);
}

TEST(DeriveBanned, EmptyMemoryBansNothing) {
  DocumentMemory m("d1");
  EXPECT_TRUE(derive_banned(m, kRules, Bounds()).empty());
  EXPECT_TRUE(derive_banned_unpruned(m, kRules).empty());
}

TEST(Bounds, Validation) {
  EXPECT_NO_THROW(Bounds(0, 1));
  EXPECT_THROW(Bounds(0.6, 0.5), UsageError);
  EXPECT_THROW(Bounds(-0.1, 0.5), UsageError);
  EXPECT_THROW(Bounds(0.1, 1.5), UsageError);
  EXPECT_TRUE(Bounds(0, 1).admits(0.5));
  EXPECT_FALSE(Bounds(0, 1).admits(1.0));
}

ReliabilityBins reliability(std::vector<std::size_t> counts, std::vector<double> gaps) {
  ReliabilityBins r;
  r.k = counts.size();
  r.bins.resize(r.k);
  for (std::size_t i = 0; i < r.k; ++i) {
    r.n += counts[i];
    r.bins[i].count = counts[i];
    if (!counts[i]) continue;
    r.bins[i].confidence = (static_cast<double>(i) + 0.5) / static_cast<double>(r.k);
    r.bins[i].accuracy = r.bins[i].confidence - gaps[i];
  }
  return r;
}

std::vector<double> probs_for(const std::vector<std::size_t>& counts) {
  std::vector<double> p;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t c = 0; c < counts[i]; ++c) p.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(counts.size()));
  return p;
}

TEST(SelectBounds, UniformAndCalibratedKeepsEverything) {
  std::vector<std::size_t> counts(10, 10);
  auto b = select_bounds(probs_for(counts), 10, reliability(counts, std::vector<double>(10, 0.0)));
  EXPECT_EQ(b.lower, 0.0);
  EXPECT_EQ(b.upper, 1.0);
}

TEST(SelectBounds, SingleOccupiedBin) {
  std::vector<std::size_t> counts(10, 0);
  counts[6] = 40;
  auto b = select_bounds(probs_for(counts), 10, reliability(counts, std::vector<double>(10, 0.1)));
  EXPECT_DOUBLE_EQ(b.lower, 0.6);
  EXPECT_DOUBLE_EQ(b.upper, 0.7);
}

TEST(SelectBounds, PrefersBetterCalibratedRun) {
  std::vector<std::size_t> counts{0, 20, 20, 0, 0, 0, 20, 20, 0, 0};
  std::vector<double> gaps{0, 0.3, 0.3, 0, 0, 0, 0.05, 0.05, 0, 0};
  auto b = select_bounds(probs_for(counts), 10, reliability(counts, gaps));
  EXPECT_DOUBLE_EQ(b.lower, 0.6);
  EXPECT_DOUBLE_EQ(b.upper, 0.8);
}

TEST(SelectBounds, TrimsBadlyCalibratedEnds) {
  std::vector<std::size_t> counts{0, 0, 0, 30, 30, 30, 30, 30, 0, 0};
  std::vector<double> gaps{0, 0, 0, 0.3, 0.02, 0.02, 0.02, 0.3, 0, 0};
  auto b = select_bounds(probs_for(counts), 10, reliability(counts, gaps));
  EXPECT_DOUBLE_EQ(b.lower, 0.4);
  EXPECT_DOUBLE_EQ(b.upper, 0.7);
}

TEST(SelectBounds, Errors) {
  std::vector<std::size_t> counts(10, 1);
  auto r = reliability(counts, std::vector<double>(10, 0));
  EXPECT_THROW(select_bounds(std::vector<double>{}, 10, r), DataError);
  EXPECT_THROW(select_bounds(probs_for(counts), 5, r), UsageError);
}

TEST(ParseRules, PairsAndObjects) {
  auto r = parse_rules(R"([["Detainee","Attacker"], {"source_role":"Victim","banned_role":"Target"}])");
  EXPECT_EQ(r, kRules);
  EXPECT_TRUE(parse_rules("[]").empty());
}

TEST(ParseRules, Rejects) {
  EXPECT_THROW(parse_rules("{"), DataError);
  EXPECT_THROW(parse_rules(R"({"a":"b"})"), DataError);
  EXPECT_THROW(parse_rules(R"([["a"]])"), DataError);
  EXPECT_THROW(parse_rules(R"([["a", 3]])"), DataError);
  EXPECT_THROW(parse_rules(R"([["", "b"]])"), DataError);
  EXPECT_THROW(parse_rules(R"([["Victim", "Victim"]])"), DataError);
  EXPECT_THROW(load_rules("/nonexistent/rules.json"), DataError);
}

}  // namespace
}  // namespace s2c
