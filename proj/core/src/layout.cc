// Copyright 2026 The PLM Authors.
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

#include "plm/layout.h"

#include <algorithm>
#include <ostream>
#include <sstream>

#include "plm/errors.h"

namespace plm {

namespace {

bool IsStream(SlotRole role) { return !IsLevitated(role); }

std::string SpanText(const Span &span) {
  std::ostringstream out;
  out << span;
  return out.str();
}

// Text stream of a window with optional solid markers around `subject`
// (window coordinates). Marker pairs are appended later.
EncodingLayout StartLayout(const ContextWindow &window, const Vocabulary &vocab,
                           const Span *subject) {
  EncodingLayout layout;
  layout.doc_offset = window.doc_offset();
  const MarkerVocab &markers = vocab.markers();
  auto push = [&layout](int token, SlotRole role) {
    layout.slot_token_ids.push_back(token);
    layout.slot_roles.push_back(role);
    layout.slot_position_ids.push_back(layout.num_slots());
  };
  for (int w = 1; w <= window.size(); ++w) {
    if (subject != nullptr && w == subject->start) {
      layout.subject_start_slot = layout.num_slots();
      push(markers.subj_start, SlotRole::kSolid);
    }
    layout.token_slots.push_back(layout.num_slots());
    push(vocab.Id(window.tokens[w - 1]), SlotRole::kText);
    layout.token_positions.push_back(layout.slot_position_ids.back());
    if (subject != nullptr && w == subject->end) {
      layout.subject_end_slot = layout.num_slots();
      push(markers.subj_end, SlotRole::kSolid);
    }
  }
  return layout;
}

void AppendPair(EncodingLayout &layout, const Span &doc_span, int start_token,
                int end_token) {
  const Span local = doc_span.Shifted(-layout.doc_offset);
  const int pair = static_cast<int>(layout.pairs.size());
  MarkerPair marker_pair{doc_span, layout.num_slots(), layout.num_slots() + 1};
  layout.slot_token_ids.push_back(start_token);
  layout.slot_roles.push_back(SlotRole::kLevStart);
  layout.slot_position_ids.push_back(layout.token_positions[local.start - 1]);
  layout.slot_token_ids.push_back(end_token);
  layout.slot_roles.push_back(SlotRole::kLevEnd);
  layout.slot_position_ids.push_back(layout.token_positions[local.end - 1]);
  layout.origin[marker_pair.start_slot] = {doc_span, pair, SlotRole::kLevStart};
  layout.origin[marker_pair.end_slot] = {doc_span, pair, SlotRole::kLevEnd};
  layout.pairs.push_back(marker_pair);
}

void FillVisibility(EncodingLayout &layout) {
  const int n = layout.num_slots();
  layout.visibility.assign(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    const bool levitated = IsLevitated(layout.slot_roles[i]);
    const int partner = levitated ? layout.partner(i) : -1;
    for (int j = 0; j < n; ++j) {
      bool visible = IsStream(layout.slot_roles[j]);
      if (levitated) visible = visible || j == i || j == partner;
      layout.set_visible(i, j, visible);
    }
  }
}

void CheckSpan(const ContextWindow &window, const Span &span,
               const char *what) {
  if (!window.ContainsDocSpan(span)) {
    throw LayoutError(std::string(what) + " " + SpanText(span) +
                      " lies outside the window of '" + window.doc_id + "'");
  }
}

}  // namespace

const char *ToString(SlotRole role) {
  switch (role) {
    case SlotRole::kText:
      return "TEXT";
    case SlotRole::kSolid:
      return "SOLID";
    case SlotRole::kLevStart:
      return "LEV_START";
    case SlotRole::kLevEnd:
      return "LEV_END";
  }
  return "?";
}

int EncodingLayout::num_text_slots() const {
  return static_cast<int>(
      std::count_if(slot_roles.begin(), slot_roles.end(), IsStream));
}

int EncodingLayout::partner(int slot) const {
  auto it = origin.find(slot);
  if (it == origin.end()) return -1;
  const MarkerPair &pair = pairs.at(it->second.pair);
  return slot == pair.start_slot ? pair.end_slot : pair.start_slot;
}

int EncodingLayout::FindPair(const Span &span) const {
  for (size_t p = 0; p < pairs.size(); ++p) {
    if (pairs[p].span == span) return static_cast<int>(p);
  }
  return -1;
}

EncodingLayout BuildTextLayout(const ContextWindow &window,
                               const Vocabulary &vocab) {
  EncodingLayout layout = StartLayout(window, vocab, nullptr);
  layout.kind = LayoutKind::kText;
  FillVisibility(layout);
  return layout;
}

EncodingLayout BuildSpanLayout(const ContextWindow &window,
                               const SpanGroup &group, const Vocabulary &vocab,
                               int max_slots) {
  const int needed = window.size() + 2 * group.size();
  if (needed > max_slots) {
    throw OverflowError("span group " + std::to_string(group.group_index) +
                        " needs " + std::to_string(needed) +
                        " slots, limit is " + std::to_string(max_slots));
  }
  for (const Span &span : group.spans) CheckSpan(window, span, "span");
  EncodingLayout layout = StartLayout(window, vocab, nullptr);
  layout.kind = LayoutKind::kSpan;
  const MarkerVocab &markers = vocab.markers();
  for (const Span &span : group.spans) {
    AppendPair(layout, span, markers.span_start, markers.span_end);
  }
  FillVisibility(layout);
  return layout;
}

EncodingLayout BuildPairLayout(const ContextWindow &window, const Span &subject,
                               const std::vector<Span> &objects,
                               const Vocabulary &vocab, int max_slots) {
  const int needed = window.size() + 2 + 2 * static_cast<int>(objects.size());
  if (needed > max_slots) {
    throw OverflowError("pair instance for subject " + SpanText(subject) +
                        " needs " + std::to_string(needed) +
                        " slots, limit is " + std::to_string(max_slots));
  }
  CheckSpan(window, subject, "subject");
  for (const Span &object : objects) {
    CheckSpan(window, object, "object");
    if (object == subject) {
      throw LayoutError("object " + SpanText(object) + " is the subject");
    }
  }
  const Span local_subject = window.ToWindow(subject);
  EncodingLayout layout = StartLayout(window, vocab, &local_subject);
  layout.kind = LayoutKind::kPair;
  layout.subject = subject;
  const MarkerVocab &markers = vocab.markers();
  for (const Span &object : objects) {
    AppendPair(layout, object, markers.obj_start, markers.obj_end);
  }
  FillVisibility(layout);
  return layout;
}

std::vector<Violation> ValidateLayout(const EncodingLayout &layout) {
  std::vector<Violation> violations;
  auto report = [&](int i, int j, std::string rule) {
    violations.push_back({i, j, std::move(rule)});
  };
  const int n = layout.num_slots();
  if (static_cast<int>(layout.slot_position_ids.size()) != n ||
      static_cast<int>(layout.slot_roles.size()) != n ||
      layout.visibility.size() != static_cast<size_t>(n) * n) {
    report(-1, -1, "slot arrays and visibility matrix disagree in size");
    return violations;
  }

  // Marker pairing must be a perfect matching on levitated slots.
  std::vector<int> pair_of(n, -1);
  bool pairing_ok = true;
  for (size_t p = 0; p < layout.pairs.size(); ++p) {
    const MarkerPair &pair = layout.pairs[p];
    const bool in_range = pair.start_slot >= 0 && pair.start_slot < n &&
                          pair.end_slot >= 0 && pair.end_slot < n;
    if (!in_range || layout.slot_roles[pair.start_slot] != SlotRole::kLevStart ||
        layout.slot_roles[pair.end_slot] != SlotRole::kLevEnd) {
      report(pair.start_slot, pair.end_slot,
             "pair " + std::to_string(p) + " is not a LEV_START/LEV_END pair");
      pairing_ok = false;
      continue;
    }
    for (int slot : {pair.start_slot, pair.end_slot}) {
      if (pair_of[slot] >= 0) {
        report(slot, -1, "marker slot belongs to more than one pair");
        pairing_ok = false;
      }
      pair_of[slot] = static_cast<int>(p);
      auto it = layout.origin.find(slot);
      if (it == layout.origin.end() || it->second.pair != static_cast<int>(p) ||
          it->second.role != layout.slot_roles[slot] ||
          it->second.span != pair.span) {
        report(slot, -1, "origin entry does not match its marker pair");
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (IsLevitated(layout.slot_roles[i]) && pair_of[i] < 0) {
      report(i, -1, "levitated marker without a partner");
      pairing_ok = false;
    }
  }
  for (const auto &[slot, origin] : layout.origin) {
    if (slot < 0 || slot >= n || !IsLevitated(layout.slot_roles[slot])) {
      report(slot, -1, "origin entry for a non-marker slot");
    }
  }

  // Stream positions are 1..m in order; marker positions copy the positions
  // of their span's boundary tokens.
  int expected = 1;
  for (int i = 0; i < n; ++i) {
    if (!IsStream(layout.slot_roles[i])) continue;
    if (layout.slot_position_ids[i] != expected) {
      report(i, -1,
             "stream slot has position " +
                 std::to_string(layout.slot_position_ids[i]) + ", expected " +
                 std::to_string(expected));
    }
    ++expected;
  }
  const int window_size = static_cast<int>(layout.token_positions.size());
  for (const MarkerPair &pair : layout.pairs) {
    const Span local = pair.span.Shifted(-layout.doc_offset);
    if (local.start < 1 || local.end > window_size || local.start > local.end) {
      report(pair.start_slot, pair.end_slot,
             "marker span lies outside the window");
      continue;
    }
    if (pair.start_slot >= 0 && pair.start_slot < n &&
        layout.slot_position_ids[pair.start_slot] !=
            layout.token_positions[local.start - 1]) {
      report(pair.start_slot, -1,
             "LEV_START position differs from its span start token");
    }
    if (pair.end_slot >= 0 && pair.end_slot < n &&
        layout.slot_position_ids[pair.end_slot] !=
            layout.token_positions[local.end - 1]) {
      report(pair.end_slot, -1,
             "LEV_END position differs from its span end token");
    }
  }

  if (!pairing_ok) return violations;
  for (int i = 0; i < n; ++i) {
    const bool levitated = IsLevitated(layout.slot_roles[i]);
    int partner = -1;
    if (levitated) {
      const MarkerPair &pair = layout.pairs[pair_of[i]];
      partner = pair.start_slot == i ? pair.end_slot : pair.start_slot;
    }
    for (int j = 0; j < n; ++j) {
      const bool stream_j = IsStream(layout.slot_roles[j]);
      const bool expected_visible =
          stream_j || (levitated && (j == i || j == partner));
      if (layout.visible(i, j) == expected_visible) continue;
      std::string rule;
      if (!levitated) {
        rule = stream_j ? "text slot must see text slot"
                        : "text slot must not see a levitated marker";
      } else if (stream_j) {
        rule = "marker must see text slot";
      } else if (j == i || j == partner) {
        rule = "marker must see itself and its partner";
      } else {
        rule = "marker must not see a foreign marker";
      }
      report(i, j, rule);
    }
  }
  return violations;
}

void DumpLayout(const EncodingLayout &layout, const Vocabulary &vocab,
                std::ostream &out) {
  const int n = layout.num_slots();
  out << "slots " << n << "\n";
  for (int i = 0; i < n; ++i) {
    out << i << ' ' << vocab.word(layout.slot_token_ids[i]) << ' '
        << layout.slot_position_ids[i] << ' ' << ToString(layout.slot_roles[i]);
    auto it = layout.origin.find(i);
    if (it != layout.origin.end()) {
      out << " pair=" << it->second.pair << " span=" << it->second.span;
    }
    out << '\n';
  }
  out << "visibility\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out << (layout.visible(i, j) ? '1' : '0');
    out << '\n';
  }
}

}  // namespace plm
