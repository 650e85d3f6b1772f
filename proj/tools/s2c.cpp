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

// Command-line front end.
//
//   s2c run --config cfg.json [--condition c] [--seed s ...] [--workers n]
//           [--bins k] [--grid lo:hi:step] [--bounds lo,hi] [--generator g]
//   s2c calibrate <prediction-log.jsonl> [--grid lo:hi:step] [--bins k] [--out f]
//   s2c report <run-dir> [--bins k] [--out dir]
//   s2c synth --out dir [--docs n] [--events n] [--seed s]
//   s2c serve --config cfg.json [--generator mock|oracle] [--port p] [--seed s]
//   s2c golden --out dir
//
// Exit codes: 0 ok, 1 internal, 2 usage, 3 data, 4 transport, 5 protocol.

#include <pthread.h>
#include <signal.h>

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "s2c/s2c.hpp"

namespace {

enum Exit { kOk = 0, kInternal = 1, kUsage = 2, kData = 3, kTransport = 4, kProtocol = 5 };

void log_line(std::string_view msg) { std::cerr << "s2c: " << msg << '\n'; }

struct RunFlags {
  std::string config;
  std::string condition;
  std::vector<std::uint64_t> seeds;
  std::size_t workers = 0;
  std::size_t bins = 0;
  std::string grid;
  std::string bounds;
  std::string generator;
  std::string output;
};

int cmd_run(const RunFlags& f) {
  s2c::RunConfig c = s2c::load_run_config(f.config);
  if (!f.condition.empty()) c.experiment.condition = s2c::parse_condition(f.condition);
  if (!f.seeds.empty()) c.seeds = f.seeds;
  if (f.workers) c.experiment.workers = f.workers;
  if (f.bins) c.experiment.bins = f.bins;
  if (!f.grid.empty()) c.experiment.grid = s2c::parse_grid(f.grid);
  if (!f.bounds.empty()) c.experiment.bounds_override = s2c::parse_bounds(f.bounds);
  if (!f.generator.empty()) c.generator = f.generator;
  if (!f.output.empty()) c.output = f.output;
  auto runs = s2c::run_all_seeds(c, log_line);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    log_line("seed " + std::to_string(r.seed) + ": T'=" + std::to_string(r.temperature) +
             " Arg-C head F1=" + std::to_string(r.head.scores.arg_c.f1) +
             " coref F1=" + std::to_string(r.coref.scores.arg_c.f1));
    std::cout << (c.output / ("seed-" + std::to_string(r.seed))).string() << '\n';
  }
  return kOk;
}

int cmd_calibrate(const std::string& log_path, const std::string& grid, std::size_t bins, const std::string& out) {
  if (bins == 0) throw s2c::UsageError("bins must be at least 1");
  s2c::TemperatureGrid g = grid.empty() ? s2c::TemperatureGrid{} : s2c::parse_grid(grid);
  auto log = s2c::read_prediction_log(log_path);
  auto data = s2c::labeled(log);
  s2c::Temperature t = s2c::fit_temperature(data, g, bins);
  auto report = s2c::calibration_report(data, t, bins);
  std::string text = s2c::calibration_json(report).dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    s2c::write_file_atomic(out, text);
  log_line("fitted T'=" + std::to_string(report.temperature) + " ECE " + std::to_string(report.ece_before) + " -> " +
           std::to_string(report.ece_after) + " over " + std::to_string(report.n) + " arguments");
  return kOk;
}

int cmd_report(const std::string& run, std::size_t bins, const std::string& out) {
  if (bins == 0) throw s2c::UsageError("bins must be at least 1");
  s2c::fs::path dir = s2c::resolve_run_dir(run);
  s2c::fs::path out_dir = out.empty() ? dir / "report" : s2c::fs::path(out);
  auto report = s2c::write_report(dir, out_dir, bins);
  log_line("wrote " + std::to_string(bins) + "-bin tables for " + std::to_string(report.n) + " arguments");
  std::cout << out_dir.string() << '\n';
  return kOk;
}

int cmd_synth(const std::string& out, std::size_t docs, std::size_t events, std::uint64_t seed) {
  if (docs == 0) throw s2c::UsageError("docs must be at least 1");
  s2c::fs::path dir(out);
  s2c::synthetic::CorpusShape test{docs, events, seed, "doc"};
  s2c::synthetic::CorpusShape dev{docs, events, seed + 1000, "dev"};
  s2c::write_file_atomic(dir / "ontology.json", std::string(s2c::synthetic::kOntologyJson) + "\n");
  s2c::write_file_atomic(dir / "rules.json", std::string(s2c::synthetic::kRulesJson) + "\n");
  s2c::fs::create_directories(dir);
  s2c::write_corpus((dir / "test.jsonl").string(), s2c::synthetic::make_corpus(test));
  s2c::write_corpus((dir / "dev.jsonl").string(), s2c::synthetic::make_corpus(dev));
  nlohmann::json cfg = {{"condition", "s2c-cd"}, {"ontology", "ontology.json"}, {"test", "test.jsonl"},
                        {"validation", "dev.jsonl"}, {"rules", "rules.json"},     {"output", "runs"},
                        {"generator", "mock"},       {"seeds", {0}}};
  s2c::write_file_atomic(dir / "config.json", cfg.dump(2) + "\n");
  std::cout << dir.string() << '\n';
  return kOk;
}

int cmd_serve(const std::string& config, const std::string& generator, std::uint16_t port, std::uint64_t seed) {
  s2c::RunConfig c = s2c::load_run_config(config);
  if (!generator.empty()) c.generator = generator;
  if (c.generator.rfind("remote:", 0) == 0) throw s2c::UsageError("serve needs a local generator (mock or oracle)");
  auto data = s2c::load_experiment_data(c, log_line);
  auto gen = s2c::make_generator(c, data, seed);
  if (c.embedder.rfind("remote:", 0) == 0) throw s2c::UsageError("serve needs a local embedder (hash or table)");
  auto emb = s2c::make_embedder(c, log_line);
  // Block the stop signals before any server thread starts so they are
  // delivered only to sigwait below.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
  s2c::GeneratorServer server(*gen, port, emb.get());
  std::cout << server.address() << std::endl;
  log_line("serving " + c.generator + " generator on " + server.address());
  int sig = 0;
  sigwait(&stop_signals, &sig);
  server.stop();
  return kOk;
}

int cmd_golden(const std::string& out) {
  for (const auto& [name, frame] : s2c::golden::frames()) s2c::write_file_atomic(s2c::fs::path(out) / name, frame);
  std::cout << out << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simple-to-complex document-level event argument extraction"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "Run an experiment condition and write its artifact");
  run->add_option("--config", rf.config, "Run configuration (JSON)")->required();
  run->add_option("--condition", rf.condition, "f2b-m | f2b-m-c | s2c | s2c-cd");
  run->add_option("--seed,--seeds", rf.seeds, "Seed(s); overrides the config")->delimiter(',');
  run->add_option("--workers", rf.workers, "Documents processed in parallel");
  run->add_option("--bins", rf.bins, "Calibration bins");
  run->add_option("--grid", rf.grid, "Temperature grid lo:hi:step");
  run->add_option("--bounds", rf.bounds, "Fixed probability bounds lo,hi");
  run->add_option("--generator", rf.generator, "mock | oracle | remote:<address>");
  run->add_option("--output", rf.output, "Output directory");

  std::string log_path, cal_grid, cal_out;
  std::size_t cal_bins = s2c::kDefaultBins;
  auto* cal = app.add_subcommand("calibrate", "Fit a temperature on a prediction log");
  cal->add_option("log", log_path, "Prediction log (JSONL with logits and correct)")->required();
  cal->add_option("--grid", cal_grid, "Temperature grid lo:hi:step");
  cal->add_option("--bins", cal_bins, "Calibration bins");
  cal->add_option("--out", cal_out, "Write the report here instead of stdout");

  std::string rep_dir, rep_out;
  std::size_t rep_bins = s2c::kDefaultBins;
  auto* rep = app.add_subcommand("report", "Write histogram and reliability tables for a run");
  rep->add_option("run", rep_dir, "Run artifact directory")->required();
  rep->add_option("--bins", rep_bins, "Number of bins");
  rep->add_option("--out", rep_out, "Output directory (default <run>/report)");

  std::string syn_out;
  std::size_t syn_docs = 20, syn_events = 365;
  std::uint64_t syn_seed = 1;
  auto* syn = app.add_subcommand("synth", "Write a synthetic corpus, ontology, rules and config");
  syn->add_option("--out", syn_out, "Output directory")->required();
  syn->add_option("--docs", syn_docs, "Documents per split");
  syn->add_option("--events", syn_events, "Events per split");
  syn->add_option("--seed", syn_seed, "Seed");

  std::string srv_config, srv_gen;
  std::uint16_t srv_port = 0;
  std::uint64_t srv_seed = 0;
  auto* srv = app.add_subcommand("serve", "Serve a local generator over the wire protocol");
  srv->add_option("--config", srv_config, "Run configuration (JSON)")->required();
  srv->add_option("--generator", srv_gen, "mock | oracle");
  srv->add_option("--port", srv_port, "TCP port on 127.0.0.1 (0 picks one)");
  srv->add_option("--seed", srv_seed, "Generator seed");

  std::string gold_out;
  auto* gold = app.add_subcommand("golden", "Write golden wire-protocol frames");
  gold->add_option("--out", gold_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*run) return cmd_run(rf);
    if (*cal) return cmd_calibrate(log_path, cal_grid, cal_bins, cal_out);
    if (*rep) return cmd_report(rep_dir, rep_bins, rep_out);
    if (*syn) return cmd_synth(syn_out, syn_docs, syn_events, syn_seed);
    if (*srv) return cmd_serve(srv_config, srv_gen, srv_port, srv_seed);
    if (*gold) return cmd_golden(gold_out);
  } catch (const s2c::UsageError& e) {
    log_line(std::string("usage error: ") + e.what());
    return kUsage;
  } catch (const s2c::DataError& e) {
    log_line(std::string("data error: ") + e.what());
    return kData;
  } catch (const s2c::TransportError& e) {
    log_line(std::string("generator transport error: ") + e.what());
    return kTransport;
  } catch (const s2c::ProtocolError& e) {
    log_line(std::string("generator protocol error: ") + e.what());
    return kProtocol;
  } catch (const std::exception& e) {
    log_line(std::string("error: ") + e.what());
    return kInternal;
  }
  return kUsage;
}
