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

#ifndef PLM_SPAN_H_
#define PLM_SPAN_H_

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>

namespace plm {

// Inclusive token interval with 1-based indices. Which sequence the indices
// refer to (document, sentence or window) is fixed by the caller.
struct Span {
  int start = 1;
  int end = 1;

  int length() const { return end - start + 1; }
  bool Contains(int token) const { return start <= token && token <= end; }
  bool Overlaps(const Span &other) const {
    return start <= other.end && other.start <= end;
  }
  Span Shifted(int offset) const { return {start + offset, end + offset}; }

  friend auto operator<=>(const Span &, const Span &) = default;
  friend bool operator==(const Span &, const Span &) = default;
};

inline std::ostream &operator<<(std::ostream &os, const Span &span) {
  return os << "(" << span.start << "," << span.end << ")";
}

struct SpanHash {
  std::size_t operator()(const Span &span) const {
    return std::hash<long long>()((static_cast<long long>(span.start) << 32) ^
                                  static_cast<unsigned>(span.end));
  }
};

}  // namespace plm

#endif  // PLM_SPAN_H_
