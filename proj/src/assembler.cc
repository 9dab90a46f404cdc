#include "themekg/assembler.h"

#include <algorithm>
#include <map>
#include <numeric>

#include <spdlog/spdlog.h>

#include "themekg/errors.h"
#include "themekg/text.h"

namespace themekg {

namespace {

struct UnionFind {
  std::vector<size_t> parent;
  explicit UnionFind(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  size_t find(size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(size_t a, size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

bool categories_compatible(const EntityOntology &eo, const std::string &a,
                           const std::string &b) {
  if (normalize(a) == normalize(b)) return true;
  if (!eo.contains(a) || !eo.contains(b)) return false;
  return eo.related(a, b);
}

}  // namespace

ThemeGraph assemble(const std::vector<Triple> &triples,
                    EmbeddingProvider &embedder, const EntityOntology &eo,
                    const AssemblyOptions &options) {
  ThemeGraph graph;
  for (const auto &t : triples) graph.add_triple(t);

  auto entities = graph.entities();
  std::vector<EntityInfo> infos;
  for (auto &[key, info] : entities) infos.push_back(info);
  std::vector<Vector> vecs;
  vecs.reserve(infos.size());
  for (const auto &info : infos) vecs.push_back(embedder.embed(info.name));

  UnionFind uf(infos.size());
  for (size_t i = 0; i < infos.size(); ++i) {
    for (size_t j = i + 1; j < infos.size(); ++j) {
      if (cosine(vecs[i], vecs[j]) < options.coref_threshold) continue;
      if (!categories_compatible(eo, infos[i].category, infos[j].category)) {
        spdlog::debug("assemble: keep '{}' and '{}' apart (categories differ)",
                      infos[i].name, infos[j].name);
        continue;
      }
      uf.unite(i, j);
    }
  }

  std::map<size_t, std::vector<size_t>> clusters;
  for (size_t i = 0; i < infos.size(); ++i) clusters[uf.find(i)].push_back(i);
  for (const auto &[root, members] : clusters) {
    if (members.size() < 2) continue;
    size_t best = members.front();
    for (size_t m : members) {
      const auto &a = infos[m];
      const auto &b = infos[best];
      bool better = a.occurrences > b.occurrences ||
                    (a.occurrences == b.occurrences &&
                     (a.name.size() < b.name.size() ||
                      (a.name.size() == b.name.size() && a.name < b.name)));
      if (better) best = m;
    }
    const std::string &canonical = infos[best].name;
    for (size_t m : members) {
      if (m == best) continue;
      spdlog::info("assemble: merge '{}' into '{}'", infos[m].name, canonical);
      if (graph.has_entity(infos[m].name) && graph.has_entity(canonical)) {
        graph.merge_aliases(infos[m].name, canonical, canonical);
      } else {
        graph.add_alias(infos[m].name, canonical);
      }
    }
  }
  graph.validate();
  return graph;
}

void export_graph(const ThemeGraph &graph, const std::string &path) {
  write_file(path, graph_to_jsonl(graph));
}

ThemeGraph import_graph(const std::string &path) {
  GraphImport imported = graph_from_jsonl(read_file(path));
  if (imported.duplicate_lines > 0) {
    spdlog::warn("{}: collapsed {} duplicate line(s)", path,
                 imported.duplicate_lines);
  }
  return std::move(imported.graph);
}

std::string export_prompt_context(const ThemeGraph &graph,
                                  EmbeddingProvider &embedder,
                                  const Theme &theme, size_t budget) {
  if (budget == 0) throw InvalidArgument("prompt budget must be positive");
  struct Line {
    double coherence;
    std::string text;
  };
  std::vector<Line> lines;
  for (const auto &t : graph.triples()) {
    lines.push_back({theme_coherence(embedder, t.render_flat(), theme),
                     t.render()});
  }
  std::sort(lines.begin(), lines.end(), [](const Line &a, const Line &b) {
    if (a.coherence != b.coherence) return a.coherence > b.coherence;
    return a.text < b.text;
  });
  std::string out;
  for (const auto &l : lines) {
    if (out.size() + l.text.size() + 1 > budget) break;
    out += l.text;
    out += '\n';
  }
  if (out.empty() && !lines.empty()) {
    spdlog::warn("prompt budget {} is smaller than the first triple line", budget);
  }
  return out;
}

}  // namespace themekg
