#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace themekg {

// The explicit no-relation option offered to the LLM.
inline constexpr std::string_view kNoneRelation = "none";
// Category value of a mention judged irrelevant to the theme.
inline constexpr std::string_view kIrrelevant = "IRRELEVANT";

struct Theme {
  std::string name;
  // Embedding target for theme coherence.
  std::string description;
  std::vector<std::string> root_categories;

  // Throws InvalidArgument on empty name/description, empty or duplicate
  // root categories.
  void validate() const;
};

// Half-open byte range [begin, end).
struct Span {
  size_t begin = 0;
  size_t end = 0;

  size_t size() const { return end - begin; }
  bool contains(const Span &other) const {
    return begin <= other.begin && other.end <= end;
  }
  auto operator<=>(const Span &) const = default;
};

struct Document {
  std::string doc_id;
  std::string text;
  std::vector<Span> sentences;

  std::string_view slice(Span span) const;
  std::string_view sentence_text(size_t index) const;
  // Index of the sentence containing offset, or the last sentence starting
  // before it.
  size_t sentence_of(size_t offset) const;
  // Span covering sentences [first, last].
  Span covering(size_t first, size_t last) const;
  void validate() const;
};

// Rule-based sentence segmentation: a sentence ends at '.', '!' or '?'
// followed by whitespace and an uppercase letter, digit or quote, or at a
// blank line. Common abbreviations do not end sentences.
std::vector<Span> split_sentences(std::string_view text);
Document make_document(std::string doc_id, std::string text);

// Configured list of relation phrases too vague to keep on their own.
class StopRelations {
 public:
  StopRelations();  // is, are, was, were, be, been, being, has, have, had
  explicit StopRelations(const std::vector<std::string> &phrases);

  bool contains(std::string_view phrase) const;
  const std::set<std::string> &phrases() const { return phrases_; }

 private:
  std::set<std::string> phrases_;
};

class RelationPhrase {
 public:
  // Throws InvalidArgument when the normalized form is empty.
  explicit RelationPhrase(std::string text);

  // Returns nullopt for empty, sentinel or stop-listed phrases.
  static std::optional<RelationPhrase> parse(std::string_view text,
                                             const StopRelations &stop);

  const std::string &text() const { return text_; }
  const std::string &normalized() const { return normalized_; }
  bool is_none() const { return normalized_ == kNoneRelation; }

  bool operator==(const RelationPhrase &other) const {
    return normalized_ == other.normalized_;
  }

 private:
  std::string text_;
  std::string normalized_;
};

enum class TypingCase { kPageMatch, kContextTyped, kRetrieved, kIrrelevant };

std::string_view to_string(TypingCase c);
TypingCase typing_case_from_string(std::string_view s);

struct TypedMention {
  std::string surface;
  std::string doc_id;
  Span span;
  size_t sentence = 0;
  std::string entity_name;
  // Category name, or kIrrelevant.
  std::string category;
  TypingCase typing_case = TypingCase::kIrrelevant;
  std::optional<double> self_coherence;
  std::optional<double> theme_coherence;

  bool irrelevant() const { return typing_case == TypingCase::kIrrelevant; }
};

enum class TripleSource { kOntologySelected, kFallbackExtracted };

std::string_view to_string(TripleSource s);
TripleSource triple_source_from_string(std::string_view s);

struct Provenance {
  std::string doc_id;
  Span context;
  auto operator<=>(const Provenance &) const = default;
};

struct Triple {
  std::string head;
  RelationPhrase relation;
  std::string tail;
  std::string head_category;
  std::string tail_category;
  Provenance provenance;
  TripleSource source = TripleSource::kOntologySelected;

  // Throws InvalidArgument when head and tail normalize equal, either is
  // empty, or the relation is the none sentinel.
  void validate() const;
  // "(head, relation, tail)"
  std::string render() const;
  // "head relation tail", the text embedded for soft matching.
  std::string render_flat() const;
};

}  // namespace themekg
