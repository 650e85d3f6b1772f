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

// Temperature scaling of first-token logits, reliability binning and
// expected calibration error.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "s2c/error.hpp"
#include "s2c/types.hpp"

namespace s2c {

inline constexpr std::size_t kDefaultBins = 10;

class Temperature {
 public:
  explicit Temperature(double value) : value_(value) {
    if (!(value > 0) || !std::isfinite(value))
      throw UsageError("temperature must be a positive finite number, got " + std::to_string(value));
  }
  double value() const { return value_; }
  friend bool operator==(const Temperature&, const Temperature&) = default;

 private:
  double value_;
};

// Max of softmax(z / T) over the retained logits. The truncated tail enters
// the normaliser as one pseudo-logit log(residual_mass) / T; it is never a
// candidate for the max.
inline double scale(const LogitVector& z, Temperature t) {
  if (z.values.empty()) throw DataError("empty logit vector");
  if (z.residual_mass < 0 || !std::isfinite(z.residual_mass)) throw DataError("invalid residual mass");
  const double inv_t = 1.0 / t.value();
  double mx = *std::max_element(z.values.begin(), z.values.end()) * inv_t;
  bool has_tail = z.residual_mass > 0;
  double tail = has_tail ? std::log(z.residual_mass) * inv_t : 0.0;
  double shift = has_tail ? std::max(mx, tail) : mx;
  double denom = 0;
  for (double v : z.values) denom += std::exp(v * inv_t - shift);
  if (has_tail) denom += std::exp(tail - shift);
  return std::exp(mx - shift) / denom;
}

inline double raw_probability(const LogitVector& z) { return scale(z, Temperature(1.0)); }

struct ScoredPrediction {
  double confidence = 0;
  bool correct = false;
};

struct ReliabilityBin {
  std::size_t count = 0;
  double confidence = 0;  // mean confidence in the bin; 0 when empty
  double accuracy = 0;    // fraction correct in the bin; 0 when empty

  double gap() const { return std::abs(accuracy - confidence); }
};

struct ReliabilityBins {
  std::size_t k = 0;
  std::size_t n = 0;
  std::vector<ReliabilityBin> bins;

  double lower_edge(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(k); }
  double upper_edge(std::size_t i) const { return static_cast<double>(i + 1) / static_cast<double>(k); }
};

// Bin of `confidence` among k equal intervals (0,1/k], ..., ((k-1)/k,1];
// the first bin also takes 0.
inline std::size_t bin_index(double confidence, std::size_t k) {
  if (k == 0) throw UsageError("bin count must be at least 1");
  const double kd = static_cast<double>(k);
  double scaled = std::ceil(confidence * kd);
  std::size_t idx = scaled <= 1 ? 0 : std::min(k - 1, static_cast<std::size_t>(scaled) - 1);
  // Snap to the exact edges i/k so that e.g. 0.3 lands in (0.2, 0.3].
  while (idx > 0 && confidence <= static_cast<double>(idx) / kd) --idx;
  while (idx + 1 < k && confidence > static_cast<double>(idx + 1) / kd) ++idx;
  return idx;
}

inline ReliabilityBins bin(std::span<const ScoredPrediction> preds, std::size_t k = kDefaultBins) {
  if (k == 0) throw UsageError("bin count must be at least 1");
  ReliabilityBins out;
  out.k = k;
  out.n = preds.size();
  out.bins.assign(k, {});
  std::vector<double> conf_sum(k, 0.0);
  std::vector<std::size_t> hits(k, 0);
  for (const auto& p : preds) {
    if (!(p.confidence >= 0 && p.confidence <= 1)) throw DataError("confidence outside [0,1]");
    std::size_t i = bin_index(p.confidence, k);
    ++out.bins[i].count;
    conf_sum[i] += p.confidence;
    if (p.correct) ++hits[i];
  }
  for (std::size_t i = 0; i < k; ++i) {
    auto& b = out.bins[i];
    if (b.count == 0) continue;
    b.confidence = conf_sum[i] / static_cast<double>(b.count);
    b.accuracy = static_cast<double>(hits[i]) / static_cast<double>(b.count);
  }
  return out;
}

// Confidence histogram with the same binning (counts only).
inline std::vector<std::size_t> histogram(std::span<const double> confidences, std::size_t k = kDefaultBins) {
  std::vector<std::size_t> counts(k, 0);
  for (double c : confidences) ++counts[bin_index(c, k)];
  return counts;
}

inline double ece(const ReliabilityBins& bins) {
  if (bins.n == 0) return 0.0;
  double total = 0;
  for (const auto& b : bins.bins)
    total += static_cast<double>(b.count) / static_cast<double>(bins.n) * b.gap();
  return total;
}

struct LabeledLogits {
  LogitVector logits;
  bool correct = false;
};

inline std::vector<ScoredPrediction> score_with(std::span<const LabeledLogits> data, Temperature t) {
  std::vector<ScoredPrediction> out;
  out.reserve(data.size());
  for (const auto& d : data) out.push_back({scale(d.logits, t), d.correct});
  return out;
}

inline double ece_at(std::span<const LabeledLogits> data, Temperature t, std::size_t k = kDefaultBins) {
  auto scored = score_with(data, t);
  return ece(bin(scored, k));
}

// Inclusive grid lo, lo+step, ..., hi of candidate temperatures.
struct TemperatureGrid {
  double lo = 0.5;
  double hi = 5.0;
  double step = 0.01;

  std::vector<double> points() const {
    if (!(lo > 0) || !(hi >= lo) || !(step > 0))
      throw UsageError("temperature grid needs 0 < lo <= hi and step > 0");
    auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> pts;
    pts.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) pts.push_back(lo + static_cast<double>(i) * step);
    return pts;
  }
};

// Grid point with the lowest ECE over the validation data; the smallest
// temperature wins ties.
inline Temperature fit_temperature(std::span<const LabeledLogits> validation, const TemperatureGrid& grid = {},
                                   std::size_t k = kDefaultBins) {
  if (validation.empty()) throw DataError("cannot fit a temperature on an empty validation set");
  auto pts = grid.points();
  double best_t = pts.front();
  double best_ece = ece_at(validation, Temperature(best_t), k);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    double e = ece_at(validation, Temperature(pts[i]), k);
    if (e < best_ece) {
      best_ece = e;
      best_t = pts[i];
    }
  }
  return Temperature(best_t);
}

// Sets calibrated_prob from the first-token logits. `where` names the
// argument in the error message.
inline void first_token_confidence(ArgumentPrediction& arg, Temperature t, std::string_view where = {}) {
  if (!arg.first_token_logits || arg.first_token_logits->values.empty())
    throw DataError("missing first-token logits for " +
                    (where.empty() ? std::string("argument") : std::string(where)) + " slot " +
                    std::to_string(arg.slot_id));
  arg.calibrated_prob = scale(*arg.first_token_logits, t);
}

inline void calibrate_prediction(EventPrediction& pred, Temperature t) {
  std::string where = "event " + pred.event_ref.doc_id + "#" + std::to_string(pred.event_ref.appearance_index);
  for (auto& a : pred.arguments) first_token_confidence(a, t, where);
}

// Data behind the probability histograms and reliability diagrams.
struct CalibrationReport {
  double temperature = 1.0;
  std::size_t k = kDefaultBins;
  std::size_t n = 0;
  ReliabilityBins before;
  ReliabilityBins after;
  double ece_before = 0;
  double ece_after = 0;
};

inline CalibrationReport calibration_report(std::span<const LabeledLogits> data, Temperature fitted,
                                            std::size_t k = kDefaultBins) {
  CalibrationReport r;
  r.temperature = fitted.value();
  r.k = k;
  r.n = data.size();
  r.before = bin(score_with(data, Temperature(1.0)), k);
  r.after = bin(score_with(data, fitted), k);
  r.ece_before = ece(r.before);
  r.ece_after = ece(r.after);
  return r;
}

}  // namespace s2c
