#include "themekg/model.h"

#include <algorithm>
#include <array>
#include <cctype>

#include "themekg/errors.h"
#include "themekg/text.h"

namespace themekg {

void Theme::validate() const {
  if (trim(name).empty()) throw InvalidArgument("theme name is empty");
  if (trim(description).empty()) {
    throw InvalidArgument("theme description is empty");
  }
  if (root_categories.empty()) {
    throw InvalidArgument("theme has no root categories");
  }
  std::set<std::string> seen;
  for (const auto &root : root_categories) {
    if (trim(root).empty()) throw InvalidArgument("empty root category");
    if (!seen.insert(normalize(root)).second) {
      throw InvalidArgument("duplicate root category: " + root);
    }
  }
}

std::string_view Document::slice(Span span) const {
  return std::string_view(text).substr(span.begin, span.size());
}

std::string_view Document::sentence_text(size_t index) const {
  return slice(sentences.at(index));
}

size_t Document::sentence_of(size_t offset) const {
  if (sentences.empty()) throw InvalidArgument("document has no sentences");
  auto it = std::upper_bound(
      sentences.begin(), sentences.end(), offset,
      [](size_t value, const Span &s) { return value < s.begin; });
  if (it == sentences.begin()) return 0;
  return static_cast<size_t>(std::distance(sentences.begin(), it)) - 1;
}

Span Document::covering(size_t first, size_t last) const {
  return Span{sentences.at(first).begin, sentences.at(last).end};
}

void Document::validate() const {
  if (doc_id.empty()) throw InvalidArgument("document id is empty");
  size_t prev_end = 0;
  for (const auto &s : sentences) {
    if (s.begin > s.end || s.end > text.size()) {
      throw InvalidArgument("sentence span out of bounds in " + doc_id);
    }
    if (s.begin < prev_end) {
      throw InvalidArgument("overlapping sentence spans in " + doc_id);
    }
    prev_end = s.end;
  }
}

namespace {

constexpr std::array<std::string_view, 16> kAbbreviations = {
    "e.g", "i.e", "etc", "mr", "mrs", "ms", "dr", "prof", "st", "vs",
    "inc", "ltd", "co", "no", "fig", "approx"};

bool is_abbreviation(std::string_view text, size_t dot) {
  size_t b = dot;
  while (b > 0 && !is_space(text[b - 1])) --b;
  std::string word = unicode_lower(text.substr(b, dot - b));
  while (!word.empty() && is_ascii_punct(word.front()) && word.front() != '.') {
    word.erase(word.begin());
  }
  if (word.size() == 1 && std::isalpha(static_cast<unsigned char>(word[0]))) {
    return true;  // initials
  }
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), word) !=
         kAbbreviations.end();
}

bool starts_sentence(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isupper(u) || std::isdigit(u) || c == '"' || c == '\'' ||
         c == '(' || u >= 0x80;
}

}  // namespace

std::vector<Span> split_sentences(std::string_view text) {
  std::vector<Span> out;
  auto emit = [&](size_t b, size_t e) {
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    if (b < e) out.push_back(Span{b, e});
  };
  size_t start = 0;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n' && i + 1 < text.size()) {
      size_t j = i + 1;
      while (j < text.size() && (text[j] == ' ' || text[j] == '\t' ||
                                 text[j] == '\r')) {
        ++j;
      }
      if (j < text.size() && text[j] == '\n') {
        emit(start, i);
        start = j + 1;
        i = j + 1;
        continue;
      }
    }
    if (c == '.' || c == '!' || c == '?') {
      size_t end = i + 1;
      while (end < text.size() && (text[end] == '"' || text[end] == '\'' ||
                                   text[end] == ')')) {
        ++end;
      }
      size_t j = end;
      while (j < text.size() && is_space(text[j])) ++j;
      bool boundary = j == text.size() ||
                      (j > end && starts_sentence(text[j]) &&
                       !(c == '.' && is_abbreviation(text, i)));
      if (boundary) {
        emit(start, end);
        start = j;
        i = j;
        continue;
      }
    }
    ++i;
  }
  emit(start, text.size());
  return out;
}

Document make_document(std::string doc_id, std::string text) {
  Document doc;
  doc.doc_id = std::move(doc_id);
  doc.text = std::move(text);
  doc.sentences = split_sentences(doc.text);
  doc.validate();
  return doc;
}

StopRelations::StopRelations()
    : StopRelations(std::vector<std::string>{"is", "are", "was", "were", "be",
                                             "been", "being", "has", "have",
                                             "had"}) {}

StopRelations::StopRelations(const std::vector<std::string> &phrases) {
  for (const auto &p : phrases) phrases_.insert(normalize(p));
}

bool StopRelations::contains(std::string_view phrase) const {
  return phrases_.count(normalize(phrase)) > 0;
}

RelationPhrase::RelationPhrase(std::string text)
    : text_(collapse_whitespace(strip_punctuation(text))),
      normalized_(normalize(text)) {
  if (normalized_.empty()) throw InvalidArgument("empty relation phrase");
}

std::optional<RelationPhrase> RelationPhrase::parse(std::string_view text,
                                                    const StopRelations &stop) {
  std::string n = normalize(text);
  if (n.empty() || n == kNoneRelation || stop.contains(n)) return std::nullopt;
  return RelationPhrase(std::string(text));
}

std::string_view to_string(TypingCase c) {
  switch (c) {
    case TypingCase::kPageMatch:
      return "PAGE_MATCH";
    case TypingCase::kContextTyped:
      return "CONTEXT_TYPED";
    case TypingCase::kRetrieved:
      return "RETRIEVED";
    case TypingCase::kIrrelevant:
      return "IRRELEVANT";
  }
  return "IRRELEVANT";
}

TypingCase typing_case_from_string(std::string_view s) {
  if (s == "PAGE_MATCH") return TypingCase::kPageMatch;
  if (s == "CONTEXT_TYPED") return TypingCase::kContextTyped;
  if (s == "RETRIEVED") return TypingCase::kRetrieved;
  if (s == "IRRELEVANT") return TypingCase::kIrrelevant;
  throw ParseError("unknown typing case: " + std::string(s));
}

std::string_view to_string(TripleSource s) {
  return s == TripleSource::kOntologySelected ? "ONTOLOGY_SELECTED"
                                              : "FALLBACK_EXTRACTED";
}

TripleSource triple_source_from_string(std::string_view s) {
  if (s == "ONTOLOGY_SELECTED") return TripleSource::kOntologySelected;
  if (s == "FALLBACK_EXTRACTED") return TripleSource::kFallbackExtracted;
  throw ParseError("unknown triple source: " + std::string(s));
}

void Triple::validate() const {
  std::string h = normalize(head);
  std::string t = normalize(tail);
  if (h.empty() || t.empty()) throw InvalidArgument("triple has empty entity");
  if (h == t) throw InvalidArgument("reflexive triple on " + head);
  if (relation.is_none()) {
    throw InvalidArgument("triple relation is the none sentinel");
  }
}

std::string Triple::render() const {
  return "(" + head + ", " + relation.text() + ", " + tail + ")";
}

std::string Triple::render_flat() const {
  return head + " " + relation.text() + " " + tail;
}

}  // namespace themekg
