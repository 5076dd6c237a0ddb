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

#ifndef PLM_CORPUS_H_
#define PLM_CORPUS_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "plm/span.h"

namespace plm {

// Spans are 1-based inclusive document token indices.
struct EntityMention {
  Span span;
  std::string label;

  friend bool operator==(const EntityMention &, const EntityMention &) = default;
};

struct RelationMention {
  Span subject;
  Span object;
  std::string label;

  friend bool operator==(const RelationMention &,
                         const RelationMention &) = default;
};

struct Document {
  std::string doc_id;
  std::vector<std::string> tokens;
  // Contiguous, in order, covering [1, tokens.size()].
  std::vector<Span> sentence_bounds;
  std::vector<EntityMention> entities;
  std::vector<RelationMention> relations;

  int num_tokens() const { return static_cast<int>(tokens.size()); }
  int num_sentences() const { return static_cast<int>(sentence_bounds.size()); }

  // 0-based index of the sentence containing `token`, or -1.
  int SentenceOf(int token) const;

  // Entities lying inside sentence `sent` (0-based), sorted by span.
  std::vector<EntityMention> EntitiesInSentence(int sent) const;

  const std::string &token(int index) const { return tokens[index - 1]; }
};

using Corpus = std::vector<Document>;

// Entity types, relation types and the symmetric relation subset. Entity
// class ids used by the NER head are 0 for NONE and i + 1 for
// entity_types[i].
struct LabelSchema {
  std::vector<std::string> entity_types;
  std::vector<std::string> relation_types;
  std::vector<std::string> symmetric_relations;
  // Nested schemas keep overlapping predictions; flat schemas resolve them.
  bool nested = false;

  // Throws ConfigError on duplicates or unknown symmetric labels.
  void Validate() const;

  int num_entity_classes() const {
    return static_cast<int>(entity_types.size()) + 1;
  }
  // Returns the NER class id of `label`, or -1 if unknown.
  int EntityClass(const std::string &label) const;
  // Returns the index of `label` in entity_types, or -1.
  int EntityTypeIndex(const std::string &label) const;
  bool IsSymmetric(const std::string &relation) const;

  // Collects label inventories in first-seen order.
  static LabelSchema FromCorpus(const Corpus &corpus,
                                const std::vector<std::string> &symmetric = {},
                                bool nested = false);
};

struct Diagnostic {
  // 1-based input line, or 0 when not tied to a line.
  int line = 0;
  std::string doc_id;
  std::string message;
  // Warnings leave the document in the corpus; errors reject it.
  bool warning = false;
};

struct ReadResult {
  Corpus corpus;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
};

// Column format, token first, IOB2 tag last. "-DOCSTART-" lines split
// documents. Sentences with ill-formed tag sequences are dropped and reported.
ReadResult ParseBio(std::istream &in, const std::string &name = "bio");
ReadResult ReadBio(const std::string &path);
// Throws ValidationError for overlapping entities, which IOB2 cannot encode.
void WriteBio(const Corpus &corpus, std::ostream &out);

// One JSON document per line:
//   {"doc_key": ..., "sentences": [[tok, ...], ...],
//    "ner": [[[start, end, label], ...], ...],
//    "relations": [[[s_start, s_end, o_start, o_end, label], ...], ...]}
// Indices are 1-based over the whole document. Throws InputError on JSON
// syntax errors.
ReadResult ParseJsonl(std::istream &in, const std::string &name = "jsonl");
ReadResult ReadJsonl(const std::string &path);
void WriteJsonl(const Corpus &corpus, std::ostream &out);

// Structural checks for a Document. Errors are fatal, warnings (relations
// spanning two sentences) are informational.
std::vector<Diagnostic> ValidateDocument(const Document &doc);

// A contiguous slice of a document around one focus sentence.
struct ContextWindow {
  std::string doc_id;
  std::vector<std::string> tokens;
  // Focus sentence in window coordinates (1-based).
  Span focus;
  // origin[w - 1] is the document index of window token w.
  std::vector<int> origin;

  int size() const { return static_cast<int>(tokens.size()); }
  int doc_offset() const { return origin.empty() ? 0 : origin.front() - 1; }
  Span ToWindow(const Span &doc_span) const {
    return doc_span.Shifted(-doc_offset());
  }
  Span ToDocument(const Span &window_span) const {
    return window_span.Shifted(doc_offset());
  }
  bool ContainsDocSpan(const Span &doc_span) const;
  // The focus sentence in document coordinates.
  Span FocusInDocument() const { return ToDocument(focus); }
};

// Centers sentence `sent_idx` (1-based) in a window of at most `max_len`
// tokens that never crosses the document boundary. When the context cannot
// be split evenly the extra token goes to the left.
ContextWindow ExpandContext(const Document &doc, int sent_idx, int max_len);

}  // namespace plm

#endif  // PLM_CORPUS_H_
