#include "themekg/entity_ontology.h"

#include <algorithm>
#include <deque>

#include "json.hpp"
#include "themekg/errors.h"
#include "themekg/text.h"

namespace themekg {

using nlohmann::json;

EntityOntology::EntityOntology(size_t max_depth) : max_depth_(max_depth) {}

const EntityOntology::Node &EntityOntology::node(std::string_view name) const {
  auto it = nodes_.find(normalize(name));
  if (it == nodes_.end()) {
    throw NotFound("unknown category: " + std::string(name));
  }
  return it->second;
}

void EntityOntology::add_root(const std::string &name) {
  std::string key = normalize(name);
  if (key.empty()) throw InvalidArgument("empty category name");
  auto &n = nodes_[key];
  if (n.name.empty()) n.name = name;
  n.root = true;
  n.depth = 0;
  if (!n.parents.empty()) prune_and_recompute();
}

bool EntityOntology::reachable(const std::string &from,
                               const std::string &to) const {
  std::deque<std::string> queue{from};
  std::set<std::string> seen{from};
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    if (cur == to) return true;
    for (const auto &c : nodes_.at(cur).children) {
      if (seen.insert(c).second) queue.push_back(c);
    }
  }
  return false;
}

bool EntityOntology::add_edge(const std::string &parent,
                              const std::string &child) {
  std::string pk = normalize(parent);
  std::string ck = normalize(child);
  if (ck.empty()) throw InvalidArgument("empty category name");
  auto pit = nodes_.find(pk);
  if (pit == nodes_.end()) throw NotFound("unknown parent: " + parent);
  if (pk == ck) return false;
  size_t child_depth = pit->second.depth + 1;
  auto cit = nodes_.find(ck);
  if (cit == nodes_.end()) {
    if (child_depth > max_depth_) return false;
    Node n;
    n.name = child;
    n.depth = child_depth;
    n.parents.insert(pk);
    nodes_.emplace(ck, std::move(n));
    nodes_.at(pk).children.insert(ck);
    return true;
  }
  if (cit->second.parents.count(pk)) return true;
  if (reachable(ck, pk)) return false;
  cit->second.parents.insert(pk);
  pit->second.children.insert(ck);
  if (child_depth < cit->second.depth) prune_and_recompute();
  return true;
}

void EntityOntology::remove_edge(std::string_view parent,
                                 std::string_view child) {
  std::string pk = normalize(parent);
  std::string ck = normalize(child);
  if (auto it = nodes_.find(pk); it != nodes_.end()) it->second.children.erase(ck);
  if (auto it = nodes_.find(ck); it != nodes_.end()) it->second.parents.erase(pk);
}

bool EntityOntology::contains(std::string_view name) const {
  return nodes_.count(normalize(name)) > 0;
}

std::optional<std::string> EntityOntology::find(std::string_view name) const {
  auto it = nodes_.find(normalize(name));
  if (it == nodes_.end()) return std::nullopt;
  return it->second.name;
}

size_t EntityOntology::depth(std::string_view name) const {
  return node(name).depth;
}

bool EntityOntology::is_root(std::string_view name) const {
  return node(name).root;
}

std::vector<std::string> EntityOntology::parents(std::string_view name) const {
  std::vector<std::string> out;
  for (const auto &p : node(name).parents) out.push_back(nodes_.at(p).name);
  return out;
}

std::vector<std::string> EntityOntology::children(std::string_view name) const {
  std::vector<std::string> out;
  for (const auto &c : node(name).children) out.push_back(nodes_.at(c).name);
  return out;
}

std::vector<std::string> EntityOntology::ancestors(std::string_view name,
                                                   size_t levels) const {
  std::vector<std::string> out;
  std::set<std::string> seen{normalize(name)};
  std::set<std::string> level{normalize(name)};
  for (size_t i = 0; i < levels && !level.empty(); ++i) {
    std::set<std::string> next;
    for (const auto &k : level) {
      for (const auto &p : nodes_.at(k).parents) {
        if (seen.insert(p).second) next.insert(p);
      }
    }
    for (const auto &k : next) out.push_back(nodes_.at(k).name);
    level = std::move(next);
  }
  return out;
}

bool EntityOntology::is_ancestor(std::string_view ancestor,
                                 std::string_view descendant) const {
  std::string a = normalize(ancestor);
  std::string d = normalize(descendant);
  if (a == d || !nodes_.count(a) || !nodes_.count(d)) return false;
  return reachable(a, d);
}

bool EntityOntology::related(std::string_view a, std::string_view b) const {
  if (normalize(a) == normalize(b)) return true;
  return is_ancestor(a, b) || is_ancestor(b, a);
}

std::vector<Category> EntityOntology::categories() const {
  std::vector<Category> out;
  out.reserve(nodes_.size());
  for (const auto &[key, n] : nodes_) out.push_back(Category{n.name, n.depth});
  return out;
}

std::vector<std::pair<std::string, std::string>> EntityOntology::edges() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto &[key, n] : nodes_) {
    for (const auto &c : n.children) {
      out.emplace_back(n.name, nodes_.at(c).name);
    }
  }
  return out;
}

std::vector<std::string> EntityOntology::roots() const {
  std::vector<std::string> out;
  for (const auto &[key, n] : nodes_) {
    if (n.root) out.push_back(n.name);
  }
  return out;
}

void EntityOntology::prune_and_recompute() {
  std::map<std::string, size_t> depth;
  std::deque<std::string> queue;
  for (const auto &[key, n] : nodes_) {
    if (n.root) {
      depth[key] = 0;
      queue.push_back(key);
    }
  }
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    size_t d = depth[cur];
    if (d >= max_depth_) continue;
    for (const auto &c : nodes_.at(cur).children) {
      if (!depth.count(c)) {
        depth[c] = d + 1;
        queue.push_back(c);
      }
    }
  }
  for (auto it = nodes_.begin(); it != nodes_.end();) {
    if (!depth.count(it->first)) {
      it = nodes_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto &[key, n] : nodes_) {
    n.depth = depth[key];
    std::erase_if(n.parents, [&](const std::string &p) { return !nodes_.count(p); });
    std::erase_if(n.children, [&](const std::string &c) { return !nodes_.count(c); });
  }
}

void EntityOntology::validate() const {
  for (const auto &[key, n] : nodes_) {
    if (key.empty() || normalize(n.name) != key) {
      throw OntologyError("category stored under the wrong key: " + n.name);
    }
    if (n.depth > max_depth_) {
      throw OntologyError("category deeper than max depth: " + n.name);
    }
    for (const auto &p : n.parents) {
      auto it = nodes_.find(p);
      if (it == nodes_.end() || !it->second.children.count(key)) {
        throw OntologyError("dangling parent edge at " + n.name);
      }
    }
    for (const auto &c : n.children) {
      auto it = nodes_.find(c);
      if (it == nodes_.end() || !it->second.parents.count(key)) {
        throw OntologyError("dangling child edge at " + n.name);
      }
    }
    if (n.root) {
      if (n.depth != 0) throw OntologyError("root with nonzero depth: " + n.name);
      continue;
    }
    if (n.parents.empty()) {
      throw OntologyError("non-root category without parent: " + n.name);
    }
    size_t best = SIZE_MAX;
    for (const auto &p : n.parents) best = std::min(best, nodes_.at(p).depth + 1);
    if (n.depth != best) throw OntologyError("inconsistent depth at " + n.name);
  }
  // Acyclicity: Kahn's algorithm must consume every node.
  std::map<std::string, size_t> indegree;
  for (const auto &[key, n] : nodes_) indegree[key] = n.parents.size();
  std::deque<std::string> queue;
  for (const auto &[key, d] : indegree) {
    if (d == 0) queue.push_back(key);
  }
  size_t visited = 0;
  while (!queue.empty()) {
    std::string cur = queue.front();
    queue.pop_front();
    ++visited;
    for (const auto &c : nodes_.at(cur).children) {
      if (--indegree[c] == 0) queue.push_back(c);
    }
  }
  if (visited != nodes_.size()) throw OntologyError("ontology has a cycle");
  // Reachability follows from depth consistency plus acyclicity: every
  // non-root has a parent of strictly smaller depth, down to a root.
}

bool EntityOntology::operator==(const EntityOntology &other) const {
  return max_depth_ == other.max_depth_ && categories() == other.categories() &&
         edges() == other.edges() && roots() == other.roots();
}

std::string ontology_to_json(const EntityOntology &ontology) {
  json j;
  j["max_depth"] = ontology.max_depth();
  j["categories"] = json::array();
  for (const auto &c : ontology.categories()) {
    j["categories"].push_back({{"name", c.name}, {"depth", c.depth}});
  }
  j["edges"] = json::array();
  for (const auto &[p, c] : ontology.edges()) {
    j["edges"].push_back({p, c});
  }
  j["roots"] = ontology.roots();
  return j.dump(2) + "\n";
}

EntityOntology ontology_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("ontology: ") + e.what());
  }
  try {
    EntityOntology ontology(j.value("max_depth", size_t{4}));
    std::map<std::string, size_t> declared;
    for (const auto &c : j.at("categories")) {
      declared[normalize(c.at("name").get<std::string>())] =
          c.at("depth").get<size_t>();
    }
    std::map<std::string, std::string> names;
    for (const auto &c : j.at("categories")) {
      std::string name = c.at("name").get<std::string>();
      names[normalize(name)] = name;
    }
    for (const auto &r : j.at("roots")) {
      std::string name = r.get<std::string>();
      if (!declared.count(normalize(name))) {
        throw OntologyError("root not among categories: " + name);
      }
      ontology.add_root(names[normalize(name)]);
    }
    // Insert edges parent-depth-first so every parent exists before use.
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto &e : j.at("edges")) {
      std::string p = e.at(0).get<std::string>();
      std::string c = e.at(1).get<std::string>();
      if (!declared.count(normalize(p)) || !declared.count(normalize(c))) {
        throw OntologyError("edge endpoint not among categories: " + p +
                            " -> " + c);
      }
      edges.emplace_back(names[normalize(p)], names[normalize(c)]);
    }
    std::stable_sort(edges.begin(), edges.end(), [&](const auto &a, const auto &b) {
      return declared[normalize(a.first)] < declared[normalize(b.first)];
    });
    for (const auto &[p, c] : edges) {
      if (!ontology.contains(p)) {
        throw OntologyError("category unreachable from roots: " + p);
      }
      if (!ontology.add_edge(p, c)) {
        throw OntologyError("edge closes a cycle or exceeds max depth: " + p +
                            " -> " + c);
      }
    }
    for (const auto &[key, d] : declared) {
      if (!ontology.contains(key)) {
        throw OntologyError("category unreachable from roots: " + names[key]);
      }
      if (ontology.depth(key) != d) {
        throw OntologyError("declared depth disagrees for " + names[key]);
      }
    }
    ontology.validate();
    return ontology;
  } catch (const json::exception &e) {
    throw ParseError(std::string("ontology: ") + e.what());
  }
}

}  // namespace themekg
