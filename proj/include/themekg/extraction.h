#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "themekg/entity_ontology.h"
#include "themekg/model.h"
#include "themekg/providers.h"
#include "themekg/relation_ontology.h"

namespace themekg {

struct PairContext {
  TypedMention head;
  TypedMention tail;
  // Sentences covering both mentions.
  Span context;
};

// Ordered pairs of typed mentions of doc whose sentences lie within window
// of each other. Irrelevant mentions and pairs naming the same entity are
// skipped; repeated (head, tail, context) triples collapse to one.
std::vector<PairContext> pair_contexts(const Document &doc,
                                       const std::vector<TypedMention> &mentions,
                                       size_t window);

std::string selection_prompt(std::string_view e1, std::string_view e2,
                             std::string_view context,
                             const std::vector<RelationPhrase> &candidates);
std::string fallback_prompt(std::string_view e1, std::string_view e2,
                            std::string_view context);

struct ParsedReply {
  enum class Kind { kRelation, kNone, kUnparseable };
  Kind kind = Kind::kUnparseable;
  // Middle field, verbatim, when kind is kRelation.
  std::string relation;
};

// Looks for "(e1, relation, e2)" in an LLM reply. A bare "none" answer, a
// none middle field or a reply with the entities swapped is kNone.
ParsedReply parse_triple_reply(std::string_view reply, std::string_view e1,
                               std::string_view e2);

// Chooses among candidates (the none sentinel last). Returns nullopt for
// none, for a reply naming a phrase outside the candidates, and for a reply
// still unparseable after one re-prompt. Candidates holding only the
// sentinel short-circuit to nullopt without a query.
std::optional<RelationPhrase> select_relation(
    std::string_view e1, std::string_view e2, std::string_view context,
    const std::vector<RelationPhrase> &candidates, LlmProvider &llm,
    const Decoding &decoding = {});

// Free-form extraction used after a none selection.
std::optional<RelationPhrase> fallback_extract(std::string_view e1,
                                               std::string_view e2,
                                               std::string_view context,
                                               LlmProvider &llm,
                                               const StopRelations &stop = {},
                                               const Decoding &decoding = {});

struct ExtractionOptions {
  size_t window = 1;
  size_t parent_levels = 1;
  size_t workers = 4;
  bool fallback = true;
  Decoding decoding;
  StopRelations stop;
};

struct ExtractionStats {
  size_t pairs = 0;
  size_t selected = 0;
  size_t fallback_attempts = 0;
  size_t fallback_extracted = 0;
  size_t errors = 0;

  ExtractionStats &operator+=(const ExtractionStats &other);
};

struct ExtractionResult {
  std::vector<Triple> triples;
  ExtractionStats stats;
};

// Candidate retrieval and selection run for all pairs in parallel, then the
// fallback for pairs that got none; enrichment of ro is applied afterwards
// in pair order. Failures of a single pair are logged and counted.
ExtractionResult extract_document(const Document &doc,
                                  const std::vector<TypedMention> &mentions,
                                  RelationOntology &ro,
                                  const EntityOntology &eo, LlmProvider &llm,
                                  RelationGenerator *generator,
                                  const ExtractionOptions &options = {});

}  // namespace themekg
