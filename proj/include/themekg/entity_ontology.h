#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace themekg {

struct Category {
  std::string name;
  size_t depth = 0;

  bool operator==(const Category &) const = default;
};

// Rooted DAG of categories. Names are stored verbatim and looked up by
// normalized form. Invariants: edges join known categories, the graph is
// acyclic, every category is reachable from a root, and a category's depth
// is the minimum over its parents of parent depth + 1 (roots: 0), never
// exceeding max_depth.
class EntityOntology {
 public:
  explicit EntityOntology(size_t max_depth = 4);

  size_t max_depth() const { return max_depth_; }

  void add_root(const std::string &name);
  // Adds parent -> child, creating child when absent. Returns false, leaving
  // the ontology untouched, when the edge would close a cycle or place a new
  // child deeper than max_depth. Throws NotFound for an unknown parent.
  bool add_edge(const std::string &parent, const std::string &child);
  void remove_edge(std::string_view parent, std::string_view child);

  bool contains(std::string_view name) const;
  // Verbatim stored name for any spelling with the same normalized form.
  std::optional<std::string> find(std::string_view name) const;
  size_t depth(std::string_view name) const;
  bool is_root(std::string_view name) const;

  std::vector<std::string> parents(std::string_view name) const;
  std::vector<std::string> children(std::string_view name) const;
  // Strict ancestors up to `levels` edges away, nearest level first, names
  // sorted within a level.
  std::vector<std::string> ancestors(std::string_view name,
                                     size_t levels) const;
  // True when ancestor != descendant and a directed path links them.
  bool is_ancestor(std::string_view ancestor,
                   std::string_view descendant) const;
  // Identical, or one is an ancestor of the other.
  bool related(std::string_view a, std::string_view b) const;

  // Sorted by normalized name.
  std::vector<Category> categories() const;
  std::vector<std::pair<std::string, std::string>> edges() const;
  std::vector<std::string> roots() const;
  size_t size() const { return nodes_.size(); }

  // Drops categories unreachable from the roots within max_depth and
  // recomputes every depth.
  void prune_and_recompute();

  // Throws OntologyError describing the first broken invariant.
  void validate() const;

  bool operator==(const EntityOntology &other) const;

 private:
  struct Node {
    std::string name;
    size_t depth = 0;
    bool root = false;
    std::set<std::string> parents;   // normalized keys
    std::set<std::string> children;  // normalized keys
  };

  const Node &node(std::string_view name) const;
  bool reachable(const std::string &from, const std::string &to) const;

  size_t max_depth_;
  std::map<std::string, Node> nodes_;  // normalized name -> node
};

// {"max_depth", "categories": [{name, depth}], "edges": [[parent, child]],
//  "roots": [...]}
std::string ontology_to_json(const EntityOntology &ontology);
// Validates every invariant; throws ParseError or OntologyError.
EntityOntology ontology_from_json(std::string_view text);

}  // namespace themekg
