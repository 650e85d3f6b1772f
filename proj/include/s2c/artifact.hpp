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

// On-disk run artifacts and analysis tables.
//
// A run directory holds:
//   manifest.json          condition, seed, temperature, bounds, provenance
//   calibration.json       reliability bins and ECE before/after scaling
//   calibration_log.jsonl  validation arguments: logits + correctness label
//   predictions/<doc>.json final predictions and per-call banned sets
//   schedules.tsv          appearance index, difficulty, pass orders
//   metrics.json           Arg-I/Arg-C x head/coref P/R/F1 and error counts
//
// Every file is written to a temporary name and renamed into place.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "s2c/pipeline.hpp"
#include "s2c/wire.hpp"

namespace s2c {

namespace fs = std::filesystem;

inline void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw DataError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json prf_json(const PRF& r) {
  return {{"precision", r.precision}, {"recall", r.recall}, {"f1", r.f1},
          {"correct", r.correct},     {"predicted", r.predicted}, {"gold", r.gold}};
}

inline nlohmann::json errors_json(const ErrorCounts& e) {
  double total = static_cast<double>(e.total());
  auto pct = [&](std::size_t n) { return total > 0 ? 100.0 * static_cast<double>(n) / total : 0.0; };
  return {{"unidentified", e.unidentified}, {"spurious", e.spurious}, {"misclassified", e.misclassified},
          {"unidentified_pct", pct(e.unidentified)}, {"spurious_pct", pct(e.spurious)},
          {"misclassified_pct", pct(e.misclassified)}};
}

inline nlohmann::json metrics_json(const Evaluation& head, const Evaluation& coref) {
  return {{"arg_i", {{"head", prf_json(head.scores.arg_i)}, {"coref", prf_json(coref.scores.arg_i)}}},
          {"arg_c", {{"head", prf_json(head.scores.arg_c)}, {"coref", prf_json(coref.scores.arg_c)}}},
          {"errors", {{"head", errors_json(head.errors)}, {"coref", errors_json(coref.errors)}}}};
}

// Plain-text report: Arg-I/Arg-C x Head/Coref blocks, then the error table.
inline std::string metrics_text(const Evaluation& head, const Evaluation& coref) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  auto block = [&](std::string_view name, const PRF& r) {
    out << name << "  P " << 100 * r.precision << "  R " << 100 * r.recall << "  F1 " << 100 * r.f1 << "  ("
        << r.correct << "/" << r.predicted << " predicted, " << r.gold << " gold)\n";
  };
  block("Arg-I Head ", head.scores.arg_i);
  block("Arg-I Coref", coref.scores.arg_i);
  block("Arg-C Head ", head.scores.arg_c);
  block("Arg-C Coref", coref.scores.arg_c);
  out << "\nerrors       unidentified  spurious  misclassified\n";
  auto row = [&](std::string_view name, const ErrorCounts& e) {
    out << name << "  " << std::setw(12) << e.unidentified << "  " << std::setw(8) << e.spurious << "  "
        << std::setw(13) << e.misclassified << "\n";
  };
  row("head       ", head.errors);
  row("coref      ", coref.errors);
  return out.str();
}

inline nlohmann::json bins_json(const ReliabilityBins& b) {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < b.bins.size(); ++i)
    rows.push_back({{"lower", b.lower_edge(i)},
                    {"upper", b.upper_edge(i)},
                    {"count", b.bins[i].count},
                    {"confidence", b.bins[i].confidence},
                    {"accuracy", b.bins[i].accuracy}});
  return rows;
}

inline nlohmann::json calibration_json(const CalibrationReport& r) {
  return {{"temperature", r.temperature}, {"bins", r.k},           {"n", r.n},
          {"ece_before", r.ece_before},   {"ece_after", r.ece_after}, {"reliability_before", bins_json(r.before)},
          {"reliability_after", bins_json(r.after)}};
}

inline nlohmann::json calibration_record_json(const CalibrationRecord& r) {
  return {{"doc_id", r.event_ref.doc_id},
          {"event", r.event_ref.appearance_index},
          {"slot", r.slot_id},
          {"text", r.text},
          {"logits", r.labeled.logits.values},
          {"residual_mass", r.labeled.logits.residual_mass},
          {"correct", r.labeled.correct}};
}

// Reads a prediction log (the calibration_log.jsonl format). Only "logits"
// and "correct" are required per line.
inline std::vector<CalibrationRecord> read_prediction_log(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<CalibrationRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      CalibrationRecord r;
      r.event_ref = {j.value("doc_id", std::string()), j.value("event", 0)};
      r.slot_id = j.value("slot", 0);
      r.text = j.value("text", std::string());
      r.labeled.logits.values = j.at("logits").get<std::vector<double>>();
      r.labeled.logits.residual_mass = j.value("residual_mass", 0.0);
      r.labeled.correct = j.at("correct").get<bool>();
      if (r.labeled.logits.values.empty()) throw DataError("empty logits");
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw DataError(path.string() + " line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline nlohmann::json argument_json(const ArgumentPrediction& a) {
  nlohmann::json j = {{"text", a.text}, {"slot", a.slot_id}, {"role", a.role}, {"raw_prob", a.raw_prob}};
  j["calibrated_prob"] = a.calibrated_prob ? nlohmann::json(*a.calibrated_prob) : nlohmann::json(nullptr);
  if (a.first_token_logits) {
    j["logits"] = wire::logits_json(*a.first_token_logits);
    j["residual_mass"] = a.first_token_logits->residual_mass;
  }
  return j;
}

inline nlohmann::json prediction_json(const EventPrediction& p) {
  auto args = nlohmann::json::array();
  for (const auto& a : p.arguments) args.push_back(argument_json(a));
  return {{"event", p.event_ref.appearance_index},
          {"prediction_order", p.prediction_order},
          {"filled_text", p.filled_text},
          {"arguments", args}};
}

inline nlohmann::json document_run_json(const DocumentRun& d) {
  auto preds = nlohmann::json::array();
  for (const auto& p : d.second_pass.predictions) preds.push_back(prediction_json(p));
  auto calls = nlohmann::json::array();
  for (const auto& c : d.second_pass.calls) {
    nlohmann::json cj = {{"event", c.appearance_index},
                         {"prediction_order", c.prediction_order},
                         {"banned", wire::banned_json(c.banned)}};
    cj["retrieved_from"] = c.retrieved_from ? nlohmann::json(c.retrieved_from->appearance_index) : nlohmann::json(nullptr);
    calls.push_back(cj);
  }
  nlohmann::json j = {{"doc_id", d.doc_id}, {"predictions", preds}, {"calls", calls}};
  if (d.first_pass) {
    auto first = nlohmann::json::array();
    for (const auto& p : d.first_pass->predictions) first.push_back(prediction_json(p));
    j["first_pass"] = first;
  }
  return j;
}

// Per-document schedule table: appearance index, difficulty, first- and
// second-pass prediction orders.
inline std::string schedules_tsv(const RunArtifact& art) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "doc_id\tevent\tdifficulty\tfirst_pass_order\tsecond_pass_order\n";
  for (const auto& d : art.documents) {
    for (std::size_t i = 0; i < d.schedule.size(); ++i) {
      out << d.doc_id << '\t' << (i + 1) << '\t';
      if (i < d.difficulties.size())
        out << d.difficulties[i].event_difficulty;
      else
        out << "NA";
      out << '\t' << (i + 1) << '\t' << d.schedule.orders()[i] << '\n';
    }
  }
  return out.str();
}

inline nlohmann::json manifest_json(const RunArtifact& art) {
  nlohmann::json j;
  j["condition"] = to_string(art.condition);
  j["seed"] = art.seed;
  j["difficulty_mode"] = to_string(art.difficulty_mode);
  j["constraints"] = to_string(art.constraint_mode);
  j["temperature"] = art.temperature;
  if (art.bounds)
    j["bounds"] = {{"lower", art.bounds->lower}, {"upper", art.bounds->upper}, {"selected", art.bounds_selected}};
  else
    j["bounds"] = nullptr;
  j["provenance"] = {{"temperature_fitted_on", art.provenance.temperature_source},
                     {"temperature_applied_to", "test"},
                     {"validation_docs", art.provenance.validation_docs},
                     {"test_docs", art.provenance.test_docs}};
  return j;
}

inline void write_artifact(const fs::path& dir, const RunArtifact& art) {
  write_file_atomic(dir / "manifest.json", manifest_json(art).dump(2) + "\n");
  write_file_atomic(dir / "calibration.json", calibration_json(art.calibration).dump(2) + "\n");
  std::string log;
  for (const auto& r : art.calibration_log) log += calibration_record_json(r).dump() + "\n";
  write_file_atomic(dir / "calibration_log.jsonl", log);
  for (const auto& d : art.documents)
    write_file_atomic(dir / "predictions" / (d.doc_id + ".json"), document_run_json(d).dump(2) + "\n");
  write_file_atomic(dir / "schedules.tsv", schedules_tsv(art));
  write_file_atomic(dir / "metrics.json", metrics_json(art.head, art.coref).dump(2) + "\n");
  write_file_atomic(dir / "metrics.txt", metrics_text(art.head, art.coref));
}

// Histogram and reliability tables for one confidence set.
inline std::string histogram_tsv(const ReliabilityBins& b) {
  std::ostringstream out;
  out << std::setprecision(17) << "lower\tupper\tcount\tfraction\n";
  for (std::size_t i = 0; i < b.bins.size(); ++i)
    out << b.lower_edge(i) << '\t' << b.upper_edge(i) << '\t' << b.bins[i].count << '\t'
        << (b.n ? static_cast<double>(b.bins[i].count) / static_cast<double>(b.n) : 0.0) << '\n';
  return out.str();
}

inline std::string reliability_tsv(const ReliabilityBins& b) {
  std::ostringstream out;
  out << std::setprecision(17) << "lower\tupper\tcount\tconfidence\taccuracy\tgap\n";
  for (std::size_t i = 0; i < b.bins.size(); ++i)
    out << b.lower_edge(i) << '\t' << b.upper_edge(i) << '\t' << b.bins[i].count << '\t' << b.bins[i].confidence
        << '\t' << b.bins[i].accuracy << '\t' << b.bins[i].gap() << '\n';
  return out.str();
}

// Locates the run directory: `path` itself when it holds a manifest,
// otherwise its first seed-* subdirectory that does.
inline fs::path resolve_run_dir(const fs::path& path) {
  if (fs::exists(path / "manifest.json")) return path;
  if (fs::is_directory(path)) {
    std::vector<fs::path> seeds;
    for (const auto& e : fs::directory_iterator(path))
      if (e.is_directory() && e.path().filename().string().rfind("seed-", 0) == 0 && fs::exists(e.path() / "manifest.json"))
        seeds.push_back(e.path());
    std::sort(seeds.begin(), seeds.end());
    if (!seeds.empty()) return seeds.front();
  }
  throw DataError("no run artifact at " + path.string());
}

// Writes histogram_{before,after}.tsv and reliability_{before,after}.tsv
// for the run in `run_dir` at `k` bins into `out_dir`.
inline CalibrationReport write_report(const fs::path& run_dir, const fs::path& out_dir, std::size_t k) {
  fs::path dir = resolve_run_dir(run_dir);
  auto manifest = nlohmann::json::parse(read_file(dir / "manifest.json"));
  Temperature t(manifest.at("temperature").get<double>());
  auto log = read_prediction_log(dir / "calibration_log.jsonl");
  auto data = labeled(log);
  auto report = calibration_report(data, t, k);
  write_file_atomic(out_dir / "histogram_before.tsv", histogram_tsv(report.before));
  write_file_atomic(out_dir / "histogram_after.tsv", histogram_tsv(report.after));
  write_file_atomic(out_dir / "reliability_before.tsv", reliability_tsv(report.before));
  write_file_atomic(out_dir / "reliability_after.tsv", reliability_tsv(report.after));
  write_file_atomic(out_dir / "calibration.json", calibration_json(report).dump(2) + "\n");
  return report;
}

}  // namespace s2c
