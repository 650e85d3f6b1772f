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

// Generator input construction and filled-template parsing.

#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "s2c/error.hpp"
#include "s2c/text.hpp"
#include "s2c/types.hpp"

namespace s2c {

inline constexpr std::size_t kDefaultWindow = 384;

// Window of `window` tokens centred on the trigger, clamped to the document,
// then widened outward to the nearest sentence boundaries.
inline Span context_window(const Document& doc, const Span& trigger, std::size_t window) {
  if (window == 0) throw UsageError("context window must be positive");
  const std::size_t n = doc.tokens.size();
  std::size_t start = trigger.start;
  std::size_t end = trigger.end;
  if (trigger.size() < window) {
    std::size_t extra = window - trigger.size();
    std::size_t left = extra / 2;
    std::size_t right = extra - left;
    // Shift whatever does not fit on one side to the other.
    if (left > start) {
      right += left - start;
      left = start;
    }
    if (end + right > n) {
      std::size_t overflow = end + right - n;
      right = n - end;
      left = std::min(start, left + overflow);
    }
    start -= left;
    end += right;
  }
  const auto& b = doc.sentence_boundaries;
  if (!b.empty()) {
    auto lo = std::upper_bound(b.begin(), b.end(), start);
    if (lo != b.begin()) start = *std::prev(lo);
    auto hi = std::lower_bound(b.begin(), b.end(), end);
    if (hi != b.end()) end = *hi;
  }
  return {start, std::min(end, n)};
}

// Context words plus the unfilled template; the text retrieval is keyed on.
struct EventContext {
  Span window;
  std::vector<std::string> context_tokens;
  const Template* event_template = nullptr;

  std::string text() const {
    std::string out = text::join(context_tokens);
    if (event_template) {
      if (!out.empty()) out += ' ';
      out += event_template->generic_text();
    }
    return out;
  }
};

inline EventContext make_event_context(const EventMention& event, const Document& doc, const Template& tmpl,
                                       std::size_t window) {
  EventContext ctx;
  ctx.window = context_window(doc, event.trigger, window);
  ctx.context_tokens.assign(doc.tokens.begin() + static_cast<std::ptrdiff_t>(ctx.window.start),
                            doc.tokens.begin() + static_cast<std::ptrdiff_t>(ctx.window.end));
  ctx.event_template = &tmpl;
  return ctx;
}

// The generator input:  <s> retrieved </s> <s> template </s> context [EOS]
struct InputSequence {
  EventRef event_ref;
  std::string event_type;
  std::string retrieved;  // empty when nothing was retrieved
  std::string template_text;
  std::vector<std::string> context;  // window tokens with the trigger marked
  Span window;

  std::string text() const {
    std::string out(kBeginMarker);
    if (!retrieved.empty()) {
      out += ' ';
      out += retrieved;
    }
    out += ' ';
    out += kEndMarker;
    out += ' ';
    out += kBeginMarker;
    out += ' ';
    out += template_text;
    out += ' ';
    out += kEndMarker;
    for (const auto& tok : context) {
      out += ' ';
      out += tok;
    }
    out += ' ';
    out += kEosMarker;
    return out;
  }
};

inline InputSequence render_input(const EventMention& event, const Document& doc, const Template& tmpl,
                                  const EventPrediction* retrieved, std::size_t window = kDefaultWindow) {
  InputSequence seq;
  seq.event_ref = {doc.doc_id, event.appearance_index};
  seq.event_type = event.event_type;
  if (retrieved) seq.retrieved = retrieved->filled_text;
  seq.template_text = tmpl.generic_text();
  seq.window = context_window(doc, event.trigger, window);
  for (std::size_t i = seq.window.start; i < seq.window.end; ++i) {
    if (i == event.trigger.start) seq.context.emplace_back(kTriggerMarker);
    seq.context.push_back(doc.tokens[i]);
    if (i + 1 == event.trigger.end) seq.context.emplace_back(kTriggerMarker);
  }
  return seq;
}

// Segments recovered from rendered input text.
struct InputSegments {
  std::string retrieved;
  std::string template_text;
  std::vector<std::string> context;
};

inline InputSegments split_input_text(std::string_view rendered) {
  auto toks = text::split_whitespace(rendered);
  std::size_t i = 0;
  auto expect = [&](std::string_view marker) {
    if (i >= toks.size() || toks[i] != marker)
      throw DataError("input sequence missing marker " + std::string(marker) + ": " + std::string(rendered));
    ++i;
  };
  auto until = [&](std::string_view marker) {
    std::vector<std::string> part;
    while (i < toks.size() && toks[i] != marker) part.push_back(toks[i++]);
    return text::join(part);
  };
  InputSegments seg;
  expect(kBeginMarker);
  seg.retrieved = until(kEndMarker);
  expect(kEndMarker);
  expect(kBeginMarker);
  seg.template_text = until(kEndMarker);
  expect(kEndMarker);
  if (toks.empty() || toks.back() != kEosMarker) throw DataError("input sequence missing [EOS]");
  seg.context.assign(toks.begin() + static_cast<std::ptrdiff_t>(i), toks.end() - 1);
  return seg;
}

// Fills each slot with its argument texts joined by the conjunction; slots
// without arguments keep the generic placeholder.
inline std::string fill_template(const Template& tmpl, const std::map<int, std::vector<std::string>>& fills) {
  std::vector<std::string> parts;
  for (const auto& item : tmpl.scaffold) {
    if (const auto* lit = std::get_if<std::string>(&item)) {
      parts.push_back(*lit);
      continue;
    }
    auto it = fills.find(std::get<int>(item));
    if (it == fills.end() || it->second.empty()) {
      parts.emplace_back(kArgPlaceholder);
    } else {
      parts.push_back(text::join(it->second, " " + std::string(kConjunction) + " "));
    }
  }
  return text::join(parts);
}

namespace detail {

class ScaffoldAligner {
 public:
  ScaffoldAligner(const std::vector<ScaffoldItem>& scaffold, const std::vector<std::string>& tokens)
      : scaffold_(scaffold), tokens_(tokens) {}

  // Per-slot token ranges; slots are matched longest-first. Spans that split
  // cleanly on the conjunction are preferred over ones that would drop it.
  std::optional<std::vector<std::pair<int, Span>>> align() {
    for (bool strict : {true, false}) {
      strict_ = strict;
      fills_.clear();
      failed_.clear();
      if (match(0, 0)) return fills_;
    }
    return std::nullopt;
  }

 private:
  bool well_formed(std::size_t begin, std::size_t end) const {
    if (tokens_[begin] == kConjunction || tokens_[end - 1] == kConjunction) return false;
    for (std::size_t i = begin + 1; i < end; ++i)
      if (tokens_[i] == kConjunction && tokens_[i - 1] == kConjunction) return false;
    return true;
  }

  bool match(std::size_t si, std::size_t ti) {
    if (si == scaffold_.size()) return ti == tokens_.size();
    if (failed_.count({si, ti})) return false;
    const auto& item = scaffold_[si];
    if (const auto* lit = std::get_if<std::string>(&item)) {
      if (ti < tokens_.size() && tokens_[ti] == *lit && match(si + 1, ti + 1)) return true;
    } else {
      for (std::size_t len = tokens_.size() - ti; len >= 1; --len) {
        if (strict_ && !well_formed(ti, ti + len)) continue;
        fills_.push_back({std::get<int>(item), {ti, ti + len}});
        if (match(si + 1, ti + len)) return true;
        fills_.pop_back();
      }
    }
    failed_.insert({si, ti});
    return false;
  }

  const std::vector<ScaffoldItem>& scaffold_;
  const std::vector<std::string>& tokens_;
  std::vector<std::pair<int, Span>> fills_;
  std::set<std::pair<std::size_t, std::size_t>> failed_;
  bool strict_ = true;
};

}  // namespace detail

// Aligns a filled template against its scaffold and returns one prediction
// per extracted argument (text, slot and role only). Placeholders left in
// place yield nothing; a slot holding "A and B" yields two arguments.
inline std::vector<ArgumentPrediction> parse_filled_template(std::string_view filled_text, const Template& tmpl) {
  auto tokens = text::split_whitespace(filled_text);
  detail::ScaffoldAligner aligner(tmpl.scaffold, tokens);
  auto fills = aligner.align();
  if (!fills) throw AlignmentError(std::string(filled_text), tmpl.generic_text());

  std::vector<ArgumentPrediction> out;
  for (const auto& fill : *fills) {
    const int slot = fill.first;
    const Span& span = fill.second;
    const std::string* role = tmpl.role_of(slot);
    std::vector<std::string> piece;
    auto flush = [&] {
      if (!piece.empty() && !(piece.size() == 1 && piece[0] == kArgPlaceholder)) {
        ArgumentPrediction a;
        a.text = text::join(piece);
        a.slot_id = slot;
        a.role = role ? *role : std::string();
        out.push_back(std::move(a));
      }
      piece.clear();
    };
    for (std::size_t i = span.start; i < span.end; ++i) {
      if (tokens[i] == kConjunction)
        flush();
      else
        piece.push_back(tokens[i]);
    }
    flush();
  }
  return out;
}

}  // namespace s2c
