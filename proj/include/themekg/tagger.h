#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "themekg/providers.h"

namespace themekg {

bool is_noun_tag(std::string_view tag);
bool is_pronoun_tag(std::string_view tag);

// Offline part-of-speech tagger. Tags come from, in order: a lexicon
// (lowercase word -> Penn tag), a built-in closed-class word list, then
// suffix and capitalization heuristics with NN as the fallback.
//
// Noun chunks are maximal runs of nominal modifiers (adjectives, numbers,
// participles, nouns) ending in a noun. Leading determiners and possessives
// are left out of the span. A personal pronoun forms a chunk on its own.
class LexiconTagger : public PosTagger {
 public:
  explicit LexiconTagger(std::map<std::string, std::string> lexicon = {});
  // Tab separated "word<TAB>TAG" lines; '#' starts a comment.
  static LexiconTagger from_file(const std::string &path);

  std::string id() const override { return "lexicon-tagger"; }
  std::vector<TaggedToken> tag(std::string_view sentence) override;
  std::vector<Span> noun_chunks(std::string_view sentence) override;

  std::string tag_word(std::string_view word, bool sentence_initial) const;

 private:
  std::map<std::string, std::string> lexicon_;
};

// Word and punctuation tokens of a sentence. Words are runs of letters,
// digits, non-ASCII bytes, and inner hyphens or apostrophes.
std::vector<Span> tokenize(std::string_view sentence);

}  // namespace themekg
