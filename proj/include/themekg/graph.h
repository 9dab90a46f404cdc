#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "themekg/model.h"

namespace themekg {

// Deduplication key: normalized head, relation and tail.
struct TripleKey {
  std::string head;
  std::string relation;
  std::string tail;

  static TripleKey of(const Triple &t);
  auto operator<=>(const TripleKey &) const = default;
};

struct EntityInfo {
  std::string name;
  // Most frequent category over all occurrences; ties go to the
  // lexicographically smallest name.
  std::string category;
  size_t occurrences = 0;
};

// The deduplicated graph of accepted triples. Every insertion is kept as an
// occurrence (one per provenance) under its TripleKey; entity categories and
// display names derive from occurrences, so the graph state is independent
// of insertion order. Single writer.
class ThemeGraph {
 public:
  // Returns true when the key is new. Head and tail are routed through the
  // alias map first; a triple that becomes reflexive is dropped (false).
  // Throws InvalidArgument on the none sentinel or an invalid triple.
  bool add_triple(Triple t);

  // Routes a and b to canonical (which must name one of them), rewrites
  // triples and collapses duplicates. Triples joining the two become
  // reflexive and are dropped. Throws NotFound for unknown entities.
  void merge_aliases(std::string_view a, std::string_view b,
                     std::string_view canonical);

  // Registers an alias directly; used when importing.
  void add_alias(std::string_view alias, std::string_view canonical);

  // One representative per key (its smallest occurrence), in key order.
  std::vector<Triple> triples() const;
  // Every occurrence, in key then occurrence order.
  std::vector<Triple> occurrences() const;
  const std::vector<Triple> &occurrences_of(const TripleKey &key) const;
  size_t size() const { return triples_.size(); }
  bool contains(const TripleKey &key) const { return triples_.count(key) > 0; }

  // Keyed by normalized entity name.
  std::map<std::string, EntityInfo> entities() const;
  bool has_entity(std::string_view name) const;
  // Canonical display name for name, or name itself when not aliased.
  std::string resolve(std::string_view name) const;
  // Alias display name -> canonical display name.
  std::map<std::string, std::string> aliases() const;

  // Throws Error describing the first broken invariant.
  void validate() const;

  bool operator==(const ThemeGraph &other) const;

 private:
  struct Alias {
    std::string display;
    std::string canonical;  // normalized key of the canonical entity
  };

  std::string resolve_key(const std::string &key) const;
  std::string display_of(const std::string &key) const;

  std::map<TripleKey, std::vector<Triple>> triples_;
  std::map<std::string, Alias> aliases_;
};

bool occurrence_less(const Triple &a, const Triple &b);
bool occurrence_equal(const Triple &a, const Triple &b);

// JSON-lines encoding: one object per occurrence with head, relation, tail,
// head_category, tail_category, doc_id, source and span, followed by one
// {"alias", "canonical"} object per alias.
std::string graph_to_jsonl(const ThemeGraph &graph);

struct GraphImport {
  ThemeGraph graph;
  size_t duplicate_lines = 0;
};

// Throws ParseError carrying the 1-based line number of malformed input.
GraphImport graph_from_jsonl(std::string_view text);

// One triple record in the graph line format.
std::string triple_to_json_line(const Triple &t);
Triple triple_from_json_line(std::string_view line, size_t line_number = 0);

}  // namespace themekg
