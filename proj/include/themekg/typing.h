#pragma once

#include <optional>
#include <string>
#include <vector>

#include "themekg/entity_ontology.h"
#include "themekg/mentions.h"
#include "themekg/model.h"
#include "themekg/providers.h"

namespace themekg {

struct TypingOptions {
  // Candidates with theme coherence below this are discarded.
  double theme_threshold = 0.25;
  // Best ontology consistency must reach this for context typing.
  double context_threshold = 0.5;
  size_t retriever_k = 10;
  // Sentences on each side of the mention's sentence used as context.
  size_t context_window = 1;
  size_t workers = 4;
};

struct TypingProviders {
  EmbeddingProvider &embedder;
  WikiCategoryProvider &wiki;
  ContextTypingProvider &context_typing;
  CandidateCategoryRetriever &retriever;
};

struct ScoredCategory {
  std::string category;
  double self_coherence = 0.0;
  double theme_coherence = 0.0;
};

// Keeps candidates whose theme coherence reaches the threshold and returns
// the one with the largest self x theme product, ties to the smaller name.
std::optional<ScoredCategory> best_category(
    const std::vector<std::string> &candidates, const std::string &entity,
    const Theme &theme, EmbeddingProvider &embedder, double theme_threshold);

// Surface form cleaned for use as an entity name: whitespace collapsed and,
// for a sentence-initial mention not tagged as a proper noun, the first
// letter lowercased.
std::string clean_entity_name(const Mention &mention, const Document &doc);

// Context text for a mention: its sentence plus the window on each side.
std::string mention_context(const Mention &mention, const Document &doc,
                            size_t window);

// Case 1. nullopt when no page matches the entity name.
std::optional<TypedMention> type_by_page(const Mention &mention,
                                         const Document &doc,
                                         const Theme &theme,
                                         TypingProviders providers,
                                         const TypingOptions &options = {});

// Case 2: ontology context typing, then candidate retrieval.
TypedMention type_by_context(const Mention &mention, const Document &doc,
                             const EntityOntology &eo, const Theme &theme,
                             TypingProviders providers,
                             const TypingOptions &options = {});

// Attaches a category missing from the ontology under its most similar
// category that still has room below max_depth. No-op when present.
void attach_category(EntityOntology &eo, const std::string &category,
                     EmbeddingProvider &embedder);

// Case 1 falling back to Case 2. A chosen category missing from the ontology
// is attached to it, so every typed mention's category is in eo afterwards.
TypedMention type_mention(const Mention &mention, const Document &doc,
                          EntityOntology &eo, const Theme &theme,
                          TypingProviders providers,
                          const TypingOptions &options = {});

// Types every mention. Page lookups run in parallel; context typing and
// ontology growth proceed in mention order so results are deterministic.
std::vector<TypedMention> type_corpus(const std::vector<Document> &docs,
                                      const std::vector<Mention> &mentions,
                                      EntityOntology &eo, const Theme &theme,
                                      TypingProviders providers,
                                      const TypingOptions &options = {});

// TSV with header: doc_id, begin, end, surface, entity_name, category, case,
// c_self, c_theme, sentence. Missing scores are empty fields.
std::string typed_mentions_to_tsv(const std::vector<TypedMention> &mentions);
std::vector<TypedMention> typed_mentions_from_tsv(std::string_view text);

}  // namespace themekg
