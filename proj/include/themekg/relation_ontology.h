#pragma once

#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "themekg/entity_ontology.h"
#include "themekg/model.h"
#include "themekg/parallel.h"
#include "themekg/providers.h"

namespace themekg {

enum class PhraseProvenance { kGenerated, kEnriched };

std::string_view to_string(PhraseProvenance p);
PhraseProvenance phrase_provenance_from_string(std::string_view s);

struct RelationEntry {
  RelationPhrase phrase;
  PhraseProvenance provenance = PhraseProvenance::kGenerated;
};

// Candidate relation phrases per ordered category pair. A pair whose
// generation produced nothing is still recorded, with no phrases, so it is
// never queried again; lookups then fall through to parent pairs.
// Thread safe: reads share a lock, writes take it exclusively.
class RelationOntology {
 public:
  RelationOntology() = default;
  RelationOntology(const RelationOntology &other);
  RelationOntology &operator=(const RelationOntology &other);

  bool has_entry(std::string_view c1, std::string_view c2) const;
  // Phrases of the pair in insertion order; empty when absent or empty.
  std::vector<RelationEntry> entry(std::string_view c1,
                                   std::string_view c2) const;
  // Records the pair (possibly with no phrases) and adds the phrases as
  // generated. Existing phrases keep their provenance.
  void record_generated(std::string_view c1, std::string_view c2,
                        const std::vector<RelationPhrase> &phrases);
  // Adds one phrase; false when the pair already holds it. Throws
  // InvalidArgument for the none sentinel.
  bool add(std::string_view c1, std::string_view c2,
           const RelationPhrase &phrase, PhraseProvenance provenance);

  // Ordered pairs as first recorded (verbatim names), sorted.
  std::vector<std::pair<std::string, std::string>> pairs() const;
  size_t size() const;

  bool operator==(const RelationOntology &other) const;

 private:
  struct Slot {
    std::string c1;
    std::string c2;
    std::vector<RelationEntry> phrases;
  };
  static std::string key(std::string_view c1, std::string_view c2);

  mutable std::shared_mutex mu_;
  std::map<std::string, Slot> slots_;
};

// The relation candidate prompt, with the theme and categories substituted.
std::string relation_generation_prompt(std::string_view theme,
                                       std::string_view c1,
                                       std::string_view c2);

// Middle fields of "(c1, relation, c2)" groups in raw LLM output whose outer
// fields name the queried categories (case and trailing plural tolerated).
// Groups for other pairs and lines without a group are skipped. Each phrase
// is a verbatim substring of raw; duplicates (by normalized form), the none
// sentinel and stop relations are dropped.
std::vector<RelationPhrase> parse_relation_lines(std::string_view raw,
                                                 std::string_view c1,
                                                 std::string_view c2,
                                                 const StopRelations &stop = {});

// Queries the LLM for relation candidates between categories.
class RelationGenerator {
 public:
  RelationGenerator(LlmProvider &llm, Theme theme, StopRelations stop = {},
                    Decoding decoding = {});

  // Asks for both directions and records both pairs in ro. Returns the
  // phrases for (c1, c2).
  std::vector<RelationPhrase> generate(RelationOntology &ro,
                                       const std::string &c1,
                                       const std::string &c2);
  // Ensures (c1, c2) is recorded, generating when missing.
  void ensure(RelationOntology &ro, const std::string &c1,
              const std::string &c2);

  const StopRelations &stop() const { return stop_; }

 private:
  LlmProvider &llm_;
  Theme theme_;
  StopRelations stop_;
  Decoding decoding_;
  SingleFlight<bool> flight_;
};

// Generates entries for every ordered category pair of the ontology,
// including a category paired with itself. Pairs already recorded are
// skipped.
void generate_all_pairs(RelationOntology &ro, const EntityOntology &eo,
                        RelationGenerator &generator, size_t workers);

// Union of the phrases for (c1, c2) and every combination of c1 or its
// ancestors up to parent_levels with c2 or its ancestors, own pair first,
// deduplicated by normalized form, with the none sentinel appended last.
// Pairs missing from ro are generated on demand when generator is given.
std::vector<RelationPhrase> retrieve_candidates(RelationOntology &ro,
                                                const EntityOntology &eo,
                                                const std::string &c1,
                                                const std::string &c2,
                                                RelationGenerator *generator,
                                                size_t parent_levels = 1);

// Adds a newly extracted phrase as enriched; idempotent. Returns true when
// the phrase was new. Throws InvalidArgument for the none sentinel.
bool enrich(RelationOntology &ro, std::string_view c1, std::string_view c2,
            const RelationPhrase &phrase);

// {"c1||c2": [{"phrase", "provenance"}], ...}
std::string relation_ontology_to_json(const RelationOntology &ro);
RelationOntology relation_ontology_from_json(std::string_view text);

}  // namespace themekg
