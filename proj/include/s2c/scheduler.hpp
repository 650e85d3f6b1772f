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

// Event difficulty and simple-to-complex ordering.

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "s2c/error.hpp"
#include "s2c/types.hpp"

namespace s2c {

// Difficulty of an event with no predicted arguments; sorts after every
// event that has at least one.
inline constexpr double kNoArgumentDifficulty = 2.0;

inline std::vector<double> argument_difficulties(std::span<const double> probs) {
  std::vector<double> d;
  d.reserve(probs.size());
  for (double p : probs) {
    if (!(p > 0 && p <= 1)) throw DataError("argument probability outside (0,1]: " + std::to_string(p));
    d.push_back(1.0 - p);
  }
  return d;
}

inline double event_difficulty(std::span<const double> arg_difficulties) {
  if (arg_difficulties.empty()) return kNoArgumentDifficulty;
  return std::accumulate(arg_difficulties.begin(), arg_difficulties.end(), 0.0) /
         static_cast<double>(arg_difficulties.size());
}

struct EventDifficulty {
  EventRef event_ref;
  std::vector<double> argument_difficulties;
  double event_difficulty = kNoArgumentDifficulty;
};

enum class ScheduleMode { FrontToBack, SimpleToComplex };

inline std::string_view to_string(ScheduleMode m) {
  return m == ScheduleMode::FrontToBack ? "F2B" : "S2C";
}

// Prediction order of every event of a document.
class PredictionSchedule {
 public:
  static PredictionSchedule front_to_back(std::size_t n_events) {
    PredictionSchedule s;
    s.mode_ = ScheduleMode::FrontToBack;
    s.order_.resize(n_events);
    std::iota(s.order_.begin(), s.order_.end(), 1);
    return s;
  }

  // `orders[i]` is the 1-based prediction order of the (i+1)-th appearing
  // event. Throws unless the orders are a permutation of 1..n.
  static PredictionSchedule from_orders(std::vector<int> orders, ScheduleMode mode) {
    std::vector<bool> seen(orders.size(), false);
    for (int o : orders) {
      if (o < 1 || static_cast<std::size_t>(o) > orders.size() || seen[static_cast<std::size_t>(o - 1)])
        throw DataError("prediction orders are not a permutation of 1..n");
      seen[static_cast<std::size_t>(o - 1)] = true;
    }
    PredictionSchedule s;
    s.order_ = std::move(orders);
    s.mode_ = mode;
    return s;
  }

  int order_of(int appearance_index) const { return order_.at(static_cast<std::size_t>(appearance_index - 1)); }

  // Appearance indices in the order they are to be predicted.
  std::vector<int> sequence() const {
    std::vector<int> seq(order_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) seq[static_cast<std::size_t>(order_[i] - 1)] = static_cast<int>(i + 1);
    return seq;
  }

  const std::vector<int>& orders() const { return order_; }
  std::size_t size() const { return order_.size(); }
  ScheduleMode mode() const { return mode_; }

  friend bool operator==(const PredictionSchedule&, const PredictionSchedule&) = default;

 private:
  std::vector<int> order_;
  ScheduleMode mode_ = ScheduleMode::FrontToBack;
};

// Ascending difficulty; equal difficulties keep appearance order.
inline PredictionSchedule reorder(std::span<const double> difficulties) {
  for (double d : difficulties)
    if (std::isnan(d)) throw DataError("NaN event difficulty");
  std::vector<std::size_t> idx(difficulties.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return difficulties[a] < difficulties[b]; });
  std::vector<int> orders(difficulties.size());
  for (std::size_t pos = 0; pos < idx.size(); ++pos) orders[idx[pos]] = static_cast<int>(pos + 1);
  return PredictionSchedule::from_orders(std::move(orders), ScheduleMode::SimpleToComplex);
}

// Difficulty of a predicted event from its arguments' probabilities:
// calibrated ones by default, raw ones when `use_calibrated` is false.
inline EventDifficulty difficulty_of(const EventPrediction& pred, bool use_calibrated = true) {
  std::vector<double> probs;
  for (const auto& a : pred.arguments) {
    if (use_calibrated) {
      if (!a.calibrated_prob)
        throw DataError("argument in slot " + std::to_string(a.slot_id) + " of " + pred.event_ref.doc_id + "#" +
                        std::to_string(pred.event_ref.appearance_index) + " is not calibrated");
      probs.push_back(*a.calibrated_prob);
    } else {
      probs.push_back(a.raw_prob);
    }
  }
  EventDifficulty d;
  d.event_ref = pred.event_ref;
  d.argument_difficulties = argument_difficulties(probs);
  d.event_difficulty = event_difficulty(d.argument_difficulties);
  return d;
}

}  // namespace s2c
