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

// Run configuration files and the multi-seed experiment driver.
//
// Config file (JSON). Relative paths resolve against the config's directory.
//
//   {
//     "condition": "s2c-cd",            // f2b-m | f2b-m-c | s2c | s2c-cd
//     "ontology": "ontology.json",
//     "test": "test.jsonl",
//     "validation": "dev.jsonl",
//     "rules": "rules.json",            // optional
//     "output": "runs/s2c-cd",
//     "window": 384, "top_k": 50, "bins": 10,
//     "grid": {"lo": 0.5, "hi": 5.0, "step": 0.01},
//     "bounds": null,                   // or [lower, upper] to skip selection
//     "seeds": [0], "workers": 1,
//     "difficulty_mode": "r1",          // r1 | r2
//     "reorder_uncalibrated": false,
//     "generator": "mock",              // mock | oracle | remote:<address>
//     "mock": {"vocab_size": 64, "drop_rate": 0.2, "swap_rate": 0.1,
//              "spurious_rate": 0.3},
//     "scripted_logits": null,          // path, optional
//     "embedder": "hash",               // hash | table:<path> | remote:<address>
//     "embedding_dim": 256
//   }

#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "s2c/artifact.hpp"
#include "s2c/corpus.hpp"
#include "s2c/mock_generator.hpp"
#include "s2c/pipeline.hpp"
#include "s2c/remote.hpp"

namespace s2c {

struct RunConfig {
  ExperimentConfig experiment;
  std::vector<std::uint64_t> seeds{0};
  fs::path ontology;
  fs::path test;
  fs::path validation;
  std::optional<fs::path> rules;
  fs::path output = "runs";
  std::string generator = "mock";
  MockConfig mock;
  std::optional<fs::path> scripted_logits;
  std::string embedder = "hash";
  std::size_t embedding_dim = 256;
};

inline Bounds parse_bounds(std::string_view s) {
  auto comma = s.find(',');
  if (comma == std::string_view::npos) throw UsageError("bounds must be given as lower,upper");
  try {
    return Bounds(std::stod(std::string(s.substr(0, comma))), std::stod(std::string(s.substr(comma + 1))));
  } catch (const std::invalid_argument&) {
    throw UsageError("bounds must be two numbers: " + std::string(s));
  }
}

// "lo:hi:step"
inline TemperatureGrid parse_grid(std::string_view s) {
  TemperatureGrid g;
  auto a = s.find(':');
  auto b = a == std::string_view::npos ? a : s.find(':', a + 1);
  if (b == std::string_view::npos) throw UsageError("grid must be given as lo:hi:step");
  try {
    g.lo = std::stod(std::string(s.substr(0, a)));
    g.hi = std::stod(std::string(s.substr(a + 1, b - a - 1)));
    g.step = std::stod(std::string(s.substr(b + 1)));
  } catch (const std::invalid_argument&) {
    throw UsageError("grid must be three numbers lo:hi:step: " + std::string(s));
  }
  g.points();  // validates
  return g;
}

inline RunConfig parse_run_config(const nlohmann::json& j, const fs::path& base_dir) {
  RunConfig c;
  auto path_of = [&](const std::string& key) -> fs::path {
    fs::path p = j.at(key).get<std::string>();
    return p.is_absolute() ? p : base_dir / p;
  };
  try {
    auto& e = c.experiment;
    if (j.contains("condition")) e.condition = parse_condition(j["condition"].get<std::string>());
    c.ontology = path_of("ontology");
    c.test = path_of("test");
    c.validation = path_of("validation");
    if (j.contains("rules") && !j["rules"].is_null()) c.rules = path_of("rules");
    if (j.contains("output")) c.output = path_of("output");
    e.pass.window = j.value("window", kDefaultWindow);
    e.pass.top_k = j.value("top_k", kDefaultTopK);
    e.bins = j.value("bins", kDefaultBins);
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      e.grid = {g.value("lo", 0.5), g.value("hi", 5.0), g.value("step", 0.01)};
    }
    if (j.contains("bounds") && !j["bounds"].is_null()) {
      auto b = j["bounds"].get<std::vector<double>>();
      if (b.size() != 2) throw UsageError("bounds must be [lower, upper]");
      e.bounds_override = Bounds(b[0], b[1]);
    }
    if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    e.workers = j.value("workers", std::size_t{1});
    auto mode = j.value("difficulty_mode", std::string("r1"));
    if (mode != "r1" && mode != "r2") throw UsageError("difficulty_mode must be r1 or r2");
    e.difficulty_mode = mode == "r1" ? DifficultyMode::R1 : DifficultyMode::R2;
    e.reorder_uncalibrated = j.value("reorder_uncalibrated", false);
    c.generator = j.value("generator", std::string("mock"));
    if (j.contains("mock")) {
      const auto& m = j["mock"];
      c.mock.vocab_size = m.value("vocab_size", c.mock.vocab_size);
      c.mock.drop_rate = m.value("drop_rate", c.mock.drop_rate);
      c.mock.swap_rate = m.value("swap_rate", c.mock.swap_rate);
      c.mock.spurious_rate = m.value("spurious_rate", c.mock.spurious_rate);
    }
    if (j.contains("scripted_logits") && !j["scripted_logits"].is_null()) c.scripted_logits = path_of("scripted_logits");
    c.embedder = j.value("embedder", std::string("hash"));
    c.embedding_dim = j.value("embedding_dim", std::size_t{256});
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("invalid config: ") + e.what());
  }
  if (c.seeds.empty()) throw UsageError("config needs at least one seed");
  if (c.experiment.pass.window == 0) throw UsageError("window must be positive");
  if (c.experiment.pass.top_k < 1) throw UsageError("top_k must be at least 1");
  if (c.experiment.bins == 0) throw UsageError("bins must be at least 1");
  c.experiment.grid.points();
  return c;
}

inline RunConfig load_run_config(const fs::path& path) {
  if (!fs::exists(path)) throw UsageError("config file not found: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_run_config(j, path.parent_path());
}

inline ExperimentData load_experiment_data(const RunConfig& c, const WarningSink& on_warning = {}) {
  ExperimentData d;
  d.ontology = load_ontology(c.ontology.string());
  d.test = parse_corpus(c.test.string(), d.ontology, on_warning);
  d.validation = parse_corpus(c.validation.string(), d.ontology, on_warning);
  if (c.rules) d.rules = load_rules(c.rules->string());
  return d;
}

inline std::unique_ptr<Embedder> make_embedder(const RunConfig& c, const WarningSink& on_warning = {}) {
  if (c.embedder == "hash") return std::make_unique<HashingEmbedder>(c.embedding_dim);
  if (c.embedder.rfind("table:", 0) == 0)
    return std::make_unique<PrecomputedEmbedder>(PrecomputedEmbedder::load(c.embedder.substr(6)));
  if (c.embedder.rfind("remote:", 0) == 0) return std::make_unique<RemoteEmbedder>(c.embedder.substr(7), on_warning);
  throw UsageError("unknown embedder \"" + c.embedder + "\"; use hash, table:<path> or remote:<address>");
}

// Generator for one seed. Gold-replaying generators see test and validation
// documents.
inline std::unique_ptr<Generator> make_generator(const RunConfig& c, const ExperimentData& data, std::uint64_t seed) {
  ScriptedLogits script;
  if (c.scripted_logits) script = load_scripted_logits(c.scripted_logits->string());
  std::vector<Document> all = data.test;
  all.insert(all.end(), data.validation.begin(), data.validation.end());
  if (c.generator == "oracle") return std::make_unique<OracleGenerator>(all, data.ontology, std::move(script), seed);
  if (c.generator == "mock") {
    MockConfig m = c.mock;
    m.seed = seed;
    return std::make_unique<MockGenerator>(all, data.ontology, m, std::move(script));
  }
  if (c.generator.rfind("remote:", 0) == 0) return std::make_unique<RemoteGenerator>(c.generator.substr(7));
  throw UsageError("unknown generator \"" + c.generator + "\"; use mock, oracle or remote:<address>");
}

// Runs every seed, writes <output>/seed-<s>/ per seed plus
// <output>/summary.json with per-seed and mean F1 values.
inline std::vector<RunArtifact> run_all_seeds(const RunConfig& c, const WarningSink& log = {}) {
  ExperimentData data = load_experiment_data(c, log);
  warn(log, "loaded " + std::to_string(data.test.size()) + " test and " + std::to_string(data.validation.size()) +
                " validation documents");
  auto embedder = make_embedder(c, log);
  std::vector<RunArtifact> runs;
  nlohmann::json summary;
  summary["condition"] = to_string(c.experiment.condition);
  summary["seeds"] = nlohmann::json::array();
  double sum[4] = {0, 0, 0, 0};
  for (std::uint64_t seed : c.seeds) {
    warn(log, "running " + std::string(to_string(c.experiment.condition)) + " with seed " + std::to_string(seed));
    ExperimentConfig e = c.experiment;
    e.seed = seed;
    auto gen = make_generator(c, data, seed);
    RunArtifact art = run_experiment(data, e, *gen, *embedder);
    write_artifact(c.output / ("seed-" + std::to_string(seed)), art);
    double f[4] = {art.head.scores.arg_i.f1, art.coref.scores.arg_i.f1, art.head.scores.arg_c.f1,
                   art.coref.scores.arg_c.f1};
    for (int i = 0; i < 4; ++i) sum[i] += f[i];
    summary["seeds"].push_back({{"seed", seed},
                                {"temperature", art.temperature},
                                {"arg_i_head_f1", f[0]},
                                {"arg_i_coref_f1", f[1]},
                                {"arg_c_head_f1", f[2]},
                                {"arg_c_coref_f1", f[3]}});
    runs.push_back(std::move(art));
  }
  double n = static_cast<double>(c.seeds.size());
  summary["mean"] = {{"arg_i_head_f1", sum[0] / n},
                     {"arg_i_coref_f1", sum[1] / n},
                     {"arg_c_head_f1", sum[2] / n},
                     {"arg_c_coref_f1", sum[3] / n}};
  write_file_atomic(c.output / "summary.json", summary.dump(2) + "\n");
  return runs;
}

}  // namespace s2c
