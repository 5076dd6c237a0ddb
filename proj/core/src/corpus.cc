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

#include "plm/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "plm/errors.h"

namespace plm {

using json = nlohmann::json;

namespace {

std::vector<std::string> SplitWhitespace(const std::string &line) {
  std::istringstream in(line);
  std::vector<std::string> fields;
  std::string field;
  while (in >> field) fields.push_back(field);
  return fields;
}

bool IsBlank(const std::string &line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::string FormatSpan(const Span &span) {
  std::ostringstream out;
  out << span;
  return out.str();
}

// Accumulates sentences of one BIO document.
struct BioBuilder {
  Document doc;
  std::vector<Diagnostic> *diagnostics;

  // Decodes one sentence. Returns false (and records a diagnostic) when the
  // tag sequence is not valid IOB2.
  bool AddSentence(const std::vector<std::string> &tokens,
                   const std::vector<std::string> &tags,
                   const std::vector<int> &lines) {
    const int offset = doc.num_tokens();
    std::vector<EntityMention> found;
    int open_start = -1;
    std::string open_type;
    auto close = [&](int last) {
      if (open_start >= 0) {
        found.push_back({{offset + open_start + 1, offset + last + 1},
                         open_type});
        open_start = -1;
        open_type.clear();
      }
    };
    for (size_t i = 0; i < tags.size(); ++i) {
      const std::string &tag = tags[i];
      const int index = static_cast<int>(i);
      if (tag == "O") {
        close(index - 1);
        continue;
      }
      if (tag.size() < 3 || tag[1] != '-' || (tag[0] != 'B' && tag[0] != 'I')) {
        Reject(lines[i], "malformed tag '" + tag + "'");
        return false;
      }
      const std::string type = tag.substr(2);
      if (tag[0] == 'B') {
        close(index - 1);
        open_start = index;
        open_type = type;
      } else if (open_start < 0 || open_type != type) {
        Reject(lines[i], "tag '" + tag +
                             "' does not continue a B-" + type + " or I-" +
                             type + " run (IOB2 required)");
        return false;
      }
    }
    close(static_cast<int>(tags.size()) - 1);
    doc.tokens.insert(doc.tokens.end(), tokens.begin(), tokens.end());
    doc.sentence_bounds.push_back(
        {offset + 1, offset + static_cast<int>(tokens.size())});
    doc.entities.insert(doc.entities.end(), found.begin(), found.end());
    return true;
  }

  void Reject(int line, const std::string &why) {
    diagnostics->push_back(
        {line, doc.doc_id, "sentence rejected: " + why, false});
  }
};

}  // namespace

int Document::SentenceOf(int token) const {
  auto it = std::upper_bound(
      sentence_bounds.begin(), sentence_bounds.end(), token,
      [](int t, const Span &bounds) { return t < bounds.start; });
  if (it == sentence_bounds.begin()) return -1;
  --it;
  if (!it->Contains(token)) return -1;
  return static_cast<int>(it - sentence_bounds.begin());
}

std::vector<EntityMention> Document::EntitiesInSentence(int sent) const {
  std::vector<EntityMention> result;
  const Span &bounds = sentence_bounds.at(sent);
  for (const EntityMention &e : entities) {
    if (bounds.Contains(e.span.start) && bounds.Contains(e.span.end)) {
      result.push_back(e);
    }
  }
  std::stable_sort(result.begin(), result.end(),
                   [](const EntityMention &a, const EntityMention &b) {
                     return a.span < b.span;
                   });
  return result;
}

void LabelSchema::Validate() const {
  auto check_unique = [](const std::vector<std::string> &labels,
                         const char *what) {
    std::set<std::string> seen;
    for (const std::string &label : labels) {
      if (!seen.insert(label).second) {
        throw ConfigError(std::string("duplicate ") + what + " '" + label +
                          "'");
      }
    }
  };
  check_unique(entity_types, "entity type");
  check_unique(relation_types, "relation type");
  check_unique(symmetric_relations, "symmetric relation");
  for (const std::string &label : symmetric_relations) {
    if (std::find(relation_types.begin(), relation_types.end(), label) ==
        relation_types.end()) {
      throw ConfigError("symmetric relation '" + label +
                        "' is not a relation type");
    }
  }
}

int LabelSchema::EntityClass(const std::string &label) const {
  const int index = EntityTypeIndex(label);
  return index < 0 ? -1 : index + 1;
}

int LabelSchema::EntityTypeIndex(const std::string &label) const {
  auto it = std::find(entity_types.begin(), entity_types.end(), label);
  return it == entity_types.end() ? -1
                                  : static_cast<int>(it - entity_types.begin());
}

bool LabelSchema::IsSymmetric(const std::string &relation) const {
  return std::find(symmetric_relations.begin(), symmetric_relations.end(),
                   relation) != symmetric_relations.end();
}

LabelSchema LabelSchema::FromCorpus(const Corpus &corpus,
                                    const std::vector<std::string> &symmetric,
                                    bool nested) {
  LabelSchema schema;
  schema.nested = nested;
  std::set<std::string> seen_entities;
  std::set<std::string> seen_relations;
  for (const Document &doc : corpus) {
    for (const EntityMention &e : doc.entities) {
      if (seen_entities.insert(e.label).second) {
        schema.entity_types.push_back(e.label);
      }
    }
    for (const RelationMention &r : doc.relations) {
      if (seen_relations.insert(r.label).second) {
        schema.relation_types.push_back(r.label);
      }
    }
  }
  for (const std::string &label : symmetric) {
    // Symmetric labels absent from the data are still legal relation types.
    if (seen_relations.insert(label).second) {
      schema.relation_types.push_back(label);
    }
    schema.symmetric_relations.push_back(label);
  }
  schema.Validate();
  return schema;
}

bool ReadResult::ok() const {
  return std::all_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic &d) { return d.warning; });
}

ReadResult ParseBio(std::istream &in, const std::string &name) {
  ReadResult result;
  BioBuilder builder;
  builder.diagnostics = &result.diagnostics;
  int doc_count = 0;
  auto new_doc = [&]() {
    builder.doc = Document();
    builder.doc.doc_id = name + ":" + std::to_string(doc_count++);
  };
  auto flush_doc = [&]() {
    if (!builder.doc.tokens.empty()) {
      result.corpus.push_back(std::move(builder.doc));
    }
    new_doc();
  };
  new_doc();

  std::vector<std::string> tokens, tags;
  std::vector<int> lines;
  auto flush_sentence = [&]() {
    if (!tokens.empty()) builder.AddSentence(tokens, tags, lines);
    tokens.clear();
    tags.clear();
    lines.clear();
  };

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (IsBlank(line)) {
      flush_sentence();
      continue;
    }
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.front() == "-DOCSTART-") {
      flush_sentence();
      flush_doc();
      continue;
    }
    if (fields.size() < 2) {
      result.diagnostics.push_back(
          {line_no, builder.doc.doc_id, "line has no tag column", false});
      // Poison the sentence so it is rejected as a whole.
      tokens.push_back(fields.front());
      tags.push_back("?");
      lines.push_back(line_no);
      continue;
    }
    tokens.push_back(fields.front());
    tags.push_back(fields.back());
    lines.push_back(line_no);
  }
  if (in.bad()) throw InputError("error reading " + name);
  flush_sentence();
  flush_doc();
  return result;
}

ReadResult ReadBio(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return ParseBio(in, path);
}

void WriteBio(const Corpus &corpus, std::ostream &out) {
  for (const Document &doc : corpus) {
    std::vector<std::string> tags(doc.tokens.size(), "O");
    std::vector<EntityMention> sorted = doc.entities;
    std::sort(sorted.begin(), sorted.end(),
              [](const EntityMention &a, const EntityMention &b) {
                return a.span < b.span;
              });
    for (size_t i = 1; i < sorted.size(); ++i) {
      if (sorted[i].span.Overlaps(sorted[i - 1].span)) {
        throw ValidationError("document '" + doc.doc_id +
                              "' has overlapping entities " +
                              FormatSpan(sorted[i - 1].span) + " and " +
                              FormatSpan(sorted[i].span));
      }
    }
    for (const EntityMention &e : sorted) {
      tags[e.span.start - 1] = "B-" + e.label;
      for (int t = e.span.start + 1; t <= e.span.end; ++t) {
        tags[t - 1] = "I-" + e.label;
      }
    }
    out << "-DOCSTART- O\n\n";
    for (const Span &bounds : doc.sentence_bounds) {
      for (int t = bounds.start; t <= bounds.end; ++t) {
        out << doc.token(t) << ' ' << tags[t - 1] << '\n';
      }
      out << '\n';
    }
  }
}

std::vector<Diagnostic> ValidateDocument(const Document &doc) {
  std::vector<Diagnostic> issues;
  auto error = [&](const std::string &message) {
    issues.push_back({0, doc.doc_id, message, false});
  };
  int expected = 1;
  for (const Span &bounds : doc.sentence_bounds) {
    if (bounds.start != expected || bounds.end < bounds.start) {
      error("sentence bounds " + FormatSpan(bounds) +
            " do not continue the partition at token " +
            std::to_string(expected));
      return issues;
    }
    expected = bounds.end + 1;
  }
  if (expected != doc.num_tokens() + 1) {
    error("sentence bounds cover " + std::to_string(expected - 1) + " of " +
          std::to_string(doc.num_tokens()) + " tokens");
    return issues;
  }
  std::set<Span> entity_spans;
  for (const EntityMention &e : doc.entities) {
    const int sent = doc.SentenceOf(e.span.start);
    if (e.span.start > e.span.end || sent < 0 ||
        !doc.sentence_bounds[sent].Contains(e.span.end)) {
      error("entity span " + FormatSpan(e.span) + " (" + e.label +
            ") is not inside a single sentence");
    }
    entity_spans.insert(e.span);
  }
  for (const RelationMention &r : doc.relations) {
    const std::string what = "relation " + FormatSpan(r.subject) + "->" +
                             FormatSpan(r.object) + " (" + r.label + ")";
    if (r.subject == r.object) {
      error(what + " has identical subject and object");
      continue;
    }
    if (!entity_spans.count(r.subject) || !entity_spans.count(r.object)) {
      error(what + " references a span that is not an entity mention");
      continue;
    }
    if (doc.SentenceOf(r.subject.start) != doc.SentenceOf(r.object.start)) {
      issues.push_back({0, doc.doc_id, what + " crosses sentences", true});
    }
  }
  return issues;
}

ReadResult ParseJsonl(std::istream &in, const std::string &name) {
  ReadResult result;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error &e) {
      throw InputError(name + ":" + std::to_string(line_no) +
                       ": JSON parse error: " + e.what());
    }
    Document doc;
    std::vector<Diagnostic> issues;
    try {
      doc.doc_id = obj.contains("doc_key")
                       ? obj.at("doc_key").get<std::string>()
                       : name + ":" + std::to_string(line_no);
      for (const json &sentence : obj.at("sentences")) {
        const int start = doc.num_tokens() + 1;
        for (const json &token : sentence) {
          doc.tokens.push_back(token.get<std::string>());
        }
        doc.sentence_bounds.push_back({start, doc.num_tokens()});
      }
      const int num_sentences = doc.num_sentences();
      if (obj.contains("ner")) {
        const json &ner = obj.at("ner");
        for (size_t s = 0; s < ner.size(); ++s) {
          for (const json &item : ner[s]) {
            EntityMention e{{item.at(0).get<int>(), item.at(1).get<int>()},
                            item.at(2).get<std::string>()};
            if (static_cast<int>(s) < num_sentences &&
                !(doc.sentence_bounds[s].Contains(e.span.start) &&
                  doc.sentence_bounds[s].Contains(e.span.end))) {
              issues.push_back({line_no, doc.doc_id,
                                "entity span " + FormatSpan(e.span) + " (" +
                                    e.label + ") lies outside sentence " +
                                    std::to_string(s + 1),
                                false});
            }
            doc.entities.push_back(std::move(e));
          }
        }
      }
      if (obj.contains("relations")) {
        for (const json &sentence_relations : obj.at("relations")) {
          for (const json &item : sentence_relations) {
            doc.relations.push_back(
                {{item.at(0).get<int>(), item.at(1).get<int>()},
                 {item.at(2).get<int>(), item.at(3).get<int>()},
                 item.at(4).get<std::string>()});
          }
        }
      }
    } catch (const json::exception &e) {
      throw InputError(name + ":" + std::to_string(line_no) +
                       ": unexpected document structure: " + e.what());
    }
    if (issues.empty()) issues = ValidateDocument(doc);
    bool fatal = false;
    for (Diagnostic &d : issues) {
      d.line = line_no;
      fatal = fatal || !d.warning;
      result.diagnostics.push_back(d);
    }
    if (!fatal) result.corpus.push_back(std::move(doc));
  }
  if (in.bad()) throw InputError("error reading " + name);
  return result;
}

ReadResult ReadJsonl(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return ParseJsonl(in, path);
}

void WriteJsonl(const Corpus &corpus, std::ostream &out) {
  for (const Document &doc : corpus) {
    json obj;
    obj["doc_key"] = doc.doc_id;
    json sentences = json::array();
    json ner = json::array();
    json relations = json::array();
    for (int s = 0; s < doc.num_sentences(); ++s) {
      const Span &bounds = doc.sentence_bounds[s];
      json tokens = json::array();
      for (int t = bounds.start; t <= bounds.end; ++t) {
        tokens.push_back(doc.token(t));
      }
      sentences.push_back(std::move(tokens));
      json sentence_ner = json::array();
      for (const EntityMention &e : doc.EntitiesInSentence(s)) {
        sentence_ner.push_back({e.span.start, e.span.end, e.label});
      }
      ner.push_back(std::move(sentence_ner));
      relations.push_back(json::array());
    }
    for (const RelationMention &r : doc.relations) {
      int sent = doc.SentenceOf(r.subject.start);
      if (sent < 0) sent = 0;
      relations[sent].push_back({r.subject.start, r.subject.end,
                                 r.object.start, r.object.end, r.label});
    }
    obj["sentences"] = std::move(sentences);
    obj["ner"] = std::move(ner);
    obj["relations"] = std::move(relations);
    out << obj.dump() << '\n';
  }
}

bool ContextWindow::ContainsDocSpan(const Span &doc_span) const {
  if (origin.empty()) return false;
  return doc_span.start >= origin.front() && doc_span.end <= origin.back() &&
         doc_span.start <= doc_span.end;
}

ContextWindow ExpandContext(const Document &doc, int sent_idx, int max_len) {
  if (sent_idx < 1 || sent_idx > doc.num_sentences()) {
    throw ConfigError("sentence index " + std::to_string(sent_idx) +
                      " out of range for document '" + doc.doc_id + "'");
  }
  const Span sentence = doc.sentence_bounds[sent_idx - 1];
  if (max_len < sentence.length()) {
    throw ConfigError("context window " + std::to_string(max_len) +
                      " is shorter than sentence " + std::to_string(sent_idx) +
                      " of '" + doc.doc_id + "' (" +
                      std::to_string(sentence.length()) + " tokens)");
  }
  const int width = std::min(max_len, doc.num_tokens());
  const int extra = width - sentence.length();
  const int left_available = sentence.start - 1;
  const int right_available = doc.num_tokens() - sentence.end;
  int left = (extra + 1) / 2;
  int right = extra - left;
  if (left > left_available) {
    left = left_available;
    right = extra - left;
  }
  if (right > right_available) {
    right = right_available;
    left = extra - right;
  }

  ContextWindow window;
  window.doc_id = doc.doc_id;
  const int first = sentence.start - left;
  const int last = sentence.end + right;
  for (int t = first; t <= last; ++t) {
    window.tokens.push_back(doc.token(t));
    window.origin.push_back(t);
  }
  window.focus = {left + 1, left + sentence.length()};
  return window;
}

}  // namespace plm
