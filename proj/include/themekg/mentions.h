#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "themekg/model.h"
#include "themekg/providers.h"

namespace themekg {

struct Mention {
  std::string doc_id;
  size_t sentence = 0;
  // Byte span in the document.
  Span span;
  std::string text;
  // Tokens of the mention, spans in document offsets.
  std::vector<TaggedToken> tokens;

  bool operator==(const Mention &other) const {
    return doc_id == other.doc_id && span == other.span && text == other.text;
  }
};

// General-corpus frequency ranks (1 = most frequent) plus theme co-occurrence
// counts filled by a pre-pass over the corpus.
class FrequencyTable {
 public:
  static constexpr size_t kUnknownRank = SIZE_MAX;

  FrequencyTable() = default;
  // Ranks by descending count, ties broken by the token.
  static FrequencyTable from_counts(
      const std::vector<std::pair<std::string, uint64_t>> &counts);
  // "token<TAB>count" lines, '#' comments allowed.
  static FrequencyTable from_tsv(std::string_view text);
  static FrequencyTable from_file(const std::string &path);

  // Rank of a single token or listed phrase, trying the plural-folded form
  // second; kUnknownRank when absent.
  size_t rank(std::string_view token) const;
  // Listed phrase rank, otherwise the rarest (largest) token rank.
  size_t phrase_rank(std::string_view phrase) const;

  void add_cooccurrence(std::string_view modifier, std::string_view next,
                        size_t count = 1);
  // How often modifier directly preceded next (plural folded) inside a
  // theme mention.
  size_t cooccurrence(std::string_view modifier, std::string_view next) const;
  void clear_cooccurrence() { cooc_.clear(); }

  size_t size() const { return ranks_.size(); }

 private:
  std::unordered_map<std::string, size_t> ranks_;
  std::map<std::pair<std::string, std::string>, size_t> cooc_;
};

struct MentionOptions {
  // Ranks at or below this count as high frequency.
  size_t high_frequency_rank = 5000;
  // Theme coherence below this marks a high-frequency chunk as noise.
  double coherence_cutoff = 0.30;
  // A modifier needs this many co-occurrences to survive stripping.
  size_t min_cooccurrence = 2;
};

std::set<std::string> load_stopwords(const std::string &path);
// The list shipped under data/.
const std::set<std::string> &default_stopwords();

// Noun chunks of every sentence, in document order.
std::vector<Mention> extract_chunks(const Document &doc, PosTagger &tagger);

// Rule 1 and rule 2 of mention filtering. A chunk is dropped when it has no
// noun or contains a pronoun or stopword, or when it is high frequency and
// its cosine with the theme description falls below the cutoff.
std::vector<Mention> filter_mentions(const std::vector<Mention> &chunks,
                                     const FrequencyTable &freq,
                                     const std::set<std::string> &stopwords,
                                     EmbeddingProvider &embedder,
                                     const Theme &theme,
                                     const MentionOptions &options = {});

// Counts modifier -> noun adjacencies inside the given mentions.
void count_cooccurrence(const std::vector<Mention> &mentions,
                        FrequencyTable &freq);

// Rule 3: drops leading non-noun tokens that are high frequency and seldom
// precede the next token in theme mentions. Never removes the last noun.
// Idempotent.
Mention strip_modifiers(const Mention &mention, const FrequencyTable &freq,
                        const MentionOptions &options = {});

// Full mining over a corpus: chunking per document (parallel), rules 1-2,
// the co-occurrence pre-pass over the survivors, then rule 3.
std::vector<Mention> mine_corpus(const std::vector<Document> &docs,
                                 PosTagger &tagger, FrequencyTable &freq,
                                 const std::set<std::string> &stopwords,
                                 EmbeddingProvider &embedder,
                                 const Theme &theme,
                                 const MentionOptions &options = {},
                                 size_t workers = 1);

// TSV with header: doc_id, sentence, begin, end, text, tags.
std::string mentions_to_tsv(const std::vector<Mention> &mentions);
// Tokens are rebuilt by re-tokenizing the text and pairing with the tags.
std::vector<Mention> mentions_from_tsv(std::string_view text);

// Loads every *.txt file of a directory, doc_id = file stem, sorted by id.
std::vector<Document> load_corpus(const std::string &directory);

}  // namespace themekg
