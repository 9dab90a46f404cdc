#pragma once

#include <string>

#include "themekg/entity_ontology.h"
#include "themekg/model.h"
#include "themekg/providers.h"

namespace themekg {

struct OntologyOptions {
  size_t max_depth = 4;
  double edge_threshold = 0.35;
  size_t workers = 4;
};

// Breadth-first crawl of the category tree below the theme's roots. A child
// edge is kept when the parent and child names embed with cosine at least
// edge_threshold. Only edges into the next BFS layer survive, so cross edges
// to categories seen at the same or a shallower level are dropped and the
// result is acyclic by construction.
EntityOntology build_entity_ontology(const Theme &theme,
                                     WikiCategoryProvider &wiki,
                                     EmbeddingProvider &embedder,
                                     const OntologyOptions &options = {});

// Removes edges whose endpoints embed below threshold, then anything no
// longer reachable from a root, and recomputes depths.
EntityOntology filter_edges(const EntityOntology &ontology,
                            EmbeddingProvider &embedder, double threshold);

// Attaches category under parent. Throws NotFound for an unknown parent and
// OntologyError when the new depth would exceed max_depth or the edge would
// close a cycle.
EntityOntology expand_with_category(const EntityOntology &ontology,
                                    const std::string &category,
                                    const std::string &parent);

}  // namespace themekg
