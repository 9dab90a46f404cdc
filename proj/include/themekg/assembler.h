#pragma once

#include <string>
#include <vector>

#include "themekg/entity_ontology.h"
#include "themekg/graph.h"
#include "themekg/providers.h"

namespace themekg {

struct AssemblyOptions {
  // Entity names embedding at least this similar may be merged.
  double coref_threshold = 0.85;
};

// Inserts every triple, then merges coreferent entities: single-link
// clusters over name cosine >= threshold, restricted to pairs whose
// categories are identical or ancestor-related in eo. Each cluster takes
// the name seen in most occurrences (then shorter, then lexicographically
// smaller). The result does not depend on triple order.
ThemeGraph assemble(const std::vector<Triple> &triples,
                    EmbeddingProvider &embedder, const EntityOntology &eo,
                    const AssemblyOptions &options = {});

void export_graph(const ThemeGraph &graph, const std::string &path);
// Warns when duplicate lines were collapsed.
ThemeGraph import_graph(const std::string &path);

// "(head, relation, tail)" lines, most theme-coherent triple first, cut at
// the first line that would exceed budget characters (newlines included).
// Throws InvalidArgument for a zero budget.
std::string export_prompt_context(const ThemeGraph &graph,
                                  EmbeddingProvider &embedder,
                                  const Theme &theme, size_t budget);

}  // namespace themekg
