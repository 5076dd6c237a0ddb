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

#ifndef PLM_LAYOUT_H_
#define PLM_LAYOUT_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "plm/corpus.h"
#include "plm/spanspace.h"
#include "plm/vocab.h"

namespace plm {

enum class SlotRole : uint8_t { kText, kSolid, kLevStart, kLevEnd };

const char *ToString(SlotRole role);

inline bool IsLevitated(SlotRole role) {
  return role == SlotRole::kLevStart || role == SlotRole::kLevEnd;
}

enum class LayoutKind : uint8_t { kText, kSpan, kPair };

// Where a marker slot comes from. Spans are in document coordinates.
struct MarkerOrigin {
  Span span;
  int pair = -1;
  SlotRole role = SlotRole::kLevStart;
};

struct MarkerPair {
  Span span;
  int start_slot = -1;
  int end_slot = -1;
};

// An encoder input: the text stream (with solid markers for pair layouts)
// followed by levitated marker pairs, one pair per span.
//
// A text or solid slot sees exactly the text and solid slots. A levitated
// marker sees the text and solid slots, itself and its partner.
struct EncodingLayout {
  LayoutKind kind = LayoutKind::kText;
  std::vector<int> slot_token_ids;
  std::vector<int> slot_position_ids;
  std::vector<SlotRole> slot_roles;
  // Row-major |slots| x |slots|; visibility[i * n + j] != 0 iff slot i may
  // attend to slot j.
  std::vector<uint8_t> visibility;
  std::map<int, MarkerOrigin> origin;
  // Levitated pairs in append order; index is the pair ordinal.
  std::vector<MarkerPair> pairs;

  // Window bookkeeping: window token w (1-based) sits at slot
  // token_slots[w - 1] with position id token_positions[w - 1].
  int doc_offset = 0;
  std::vector<int> token_slots;
  std::vector<int> token_positions;

  // Pair layouts only.
  Span subject;
  int subject_start_slot = -1;
  int subject_end_slot = -1;

  int num_slots() const { return static_cast<int>(slot_token_ids.size()); }
  int num_text_slots() const;
  bool visible(int i, int j) const {
    return visibility[static_cast<size_t>(i) * num_slots() + j] != 0;
  }
  void set_visible(int i, int j, bool value) {
    visibility[static_cast<size_t>(i) * num_slots() + j] = value ? 1 : 0;
  }
  // Partner slot of a levitated marker, -1 for text and solid slots.
  int partner(int slot) const;
  // Pair ordinal of `span` (document coordinates), -1 if absent.
  int FindPair(const Span &span) const;
};

// Text only, fully visible. Used for text-only passes and as the baseline
// layouts are compared against.
EncodingLayout BuildTextLayout(const ContextWindow &window,
                               const Vocabulary &vocab);

// Text tokens keep positions 1..|window|; the pair for span (a, b) gets the
// positions of tokens a and b. Spans are in document coordinates. Throws
// LayoutError for spans outside the window and OverflowError when the
// layout would exceed `max_slots`.
EncodingLayout BuildSpanLayout(const ContextWindow &window,
                               const SpanGroup &group, const Vocabulary &vocab,
                               int max_slots);

// Inserts [S] / [/S] around `subject`, renumbers the stream, and appends one
// levitated [O] / [/O] pair per object at the renumbered positions of the
// object's boundary tokens.
EncodingLayout BuildPairLayout(const ContextWindow &window, const Span &subject,
                               const std::vector<Span> &objects,
                               const Vocabulary &vocab, int max_slots);

struct Violation {
  int slot_i = -1;
  int slot_j = -1;
  std::string rule;
};

// Empty iff every structural, position and visibility rule holds.
std::vector<Violation> ValidateLayout(const EncodingLayout &layout);

// Plain-text dump: one row per slot (token, position, role, origin) followed
// by the visibility grid.
void DumpLayout(const EncodingLayout &layout, const Vocabulary &vocab,
                std::ostream &out);

}  // namespace plm

#endif  // PLM_LAYOUT_H_
