#include "themekg/ontology_builder.h"

#include <set>

#include <spdlog/spdlog.h>

#include "themekg/errors.h"
#include "themekg/parallel.h"
#include "themekg/text.h"

namespace themekg {

EntityOntology build_entity_ontology(const Theme &theme,
                                     WikiCategoryProvider &wiki,
                                     EmbeddingProvider &embedder,
                                     const OntologyOptions &options) {
  theme.validate();
  if (options.max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
  EntityOntology ontology(options.max_depth);
  std::vector<std::string> frontier;
  for (const auto &root : theme.root_categories) {
    if (!wiki.category_exists(root)) {
      throw NotFound("unknown root category: " + root);
    }
    if (!ontology.contains(root)) {
      ontology.add_root(root);
      frontier.push_back(root);
    }
  }

  struct Expansion {
    std::vector<std::string> kept;
  };
  for (size_t level = 0; level < options.max_depth && !frontier.empty();
       ++level) {
    // Provider calls fan out; the ontology itself is only touched below.
    auto expansions = parallel_map<Expansion>(
        frontier.size(), options.workers, [&](size_t i) {
          Expansion e;
          const std::string &parent = frontier[i];
          Vector pv = embedder.embed(parent);
          for (const auto &child : wiki.children(parent)) {
            if (normalize(child) == normalize(parent)) continue;
            double sim = cosine(pv, embedder.embed(child));
            if (sim >= options.edge_threshold) {
              e.kept.push_back(child);
            } else {
              spdlog::debug("ontology: drop {} -> {} (cos {:.3f})", parent,
                            child, sim);
            }
          }
          return e;
        });
    std::vector<std::string> next;
    std::set<std::string> next_keys;
    for (size_t i = 0; i < frontier.size(); ++i) {
      for (const auto &child : expansions[i].kept) {
        std::string key = normalize(child);
        bool seen = ontology.contains(child);
        if (seen && !next_keys.count(key)) continue;  // not in the next layer
        ontology.add_edge(frontier[i], child);
        if (next_keys.insert(key).second) next.push_back(child);
      }
    }
    frontier = std::move(next);
  }
  ontology.validate();
  return ontology;
}

EntityOntology filter_edges(const EntityOntology &ontology,
                            EmbeddingProvider &embedder, double threshold) {
  EntityOntology out = ontology;
  for (const auto &[parent, child] : ontology.edges()) {
    if (cosine(embedder.embed(parent), embedder.embed(child)) < threshold) {
      out.remove_edge(parent, child);
    }
  }
  out.prune_and_recompute();
  out.validate();
  return out;
}

EntityOntology expand_with_category(const EntityOntology &ontology,
                                    const std::string &category,
                                    const std::string &parent) {
  if (!ontology.contains(parent)) {
    throw NotFound("unknown parent category: " + parent);
  }
  EntityOntology out = ontology;
  size_t depth = ontology.depth(parent) + 1;
  if (!ontology.contains(category) && depth > ontology.max_depth()) {
    throw OntologyError("depth overflow attaching " + category + " under " +
                        parent);
  }
  if (!out.add_edge(*ontology.find(parent), category)) {
    throw OntologyError("cannot attach " + category + " under " + parent +
                        ": edge would close a cycle");
  }
  out.validate();
  return out;
}

}  // namespace themekg
