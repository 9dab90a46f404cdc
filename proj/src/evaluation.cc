#include "themekg/evaluation.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "themekg/errors.h"
#include "themekg/text.h"

namespace themekg {

using nlohmann::json;

void GoldSet::validate() const {
  std::map<std::string, size_t> owner;
  for (size_t g = 0; g < entities.size(); ++g) {
    if (entities[g].empty()) throw InvalidArgument("empty alias group in gold");
    for (const auto &alias : entities[g]) {
      std::string key = normalize(alias);
      if (key.empty()) throw InvalidArgument("empty alias in gold");
      auto [it, fresh] = owner.emplace(key, g);
      if (!fresh && it->second != g) {
        throw InvalidArgument("alias '" + alias + "' appears in two groups");
      }
    }
  }
  for (const auto &t : triples) {
    for (size_t k : {size_t{0}, size_t{2}}) {
      if (!owner.count(normalize(t[k]))) {
        throw InvalidArgument("gold triple names unlisted entity '" + t[k] + "'");
      }
    }
    if (normalize(t[1]).empty()) throw InvalidArgument("gold triple without relation");
  }
}

GoldSet gold_from_json(std::string_view text) {
  GoldSet gold;
  try {
    json j = json::parse(text);
    for (const auto &group : j.at("entities")) {
      if (group.is_string()) {
        gold.entities.push_back({group.get<std::string>()});
      } else {
        gold.entities.push_back(group.get<std::vector<std::string>>());
      }
    }
    for (const auto &t : j.at("triples")) {
      auto v = t.get<std::vector<std::string>>();
      if (v.size() != 3) throw ParseError("gold triple must have 3 fields");
      gold.triples.push_back({v[0], v[1], v[2]});
    }
    gold.theme_description = j.value("theme_description", "");
  } catch (const json::exception &e) {
    throw ParseError(std::string("gold: ") + e.what());
  }
  gold.validate();
  return gold;
}

std::set<std::string> load_allowlist(const std::string &path) {
  std::set<std::string> out;
  for (const auto &raw : split_lines(read_file(path))) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    out.insert(normalize(line));
  }
  return out;
}

double f1_score(double precision, double recall) {
  if (precision <= 0.0 || recall <= 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::vector<Match> greedy_match(const std::vector<std::vector<double>> &sim,
                                const std::vector<std::vector<bool>> &eligible,
                                const std::vector<std::string> &pred_labels,
                                const std::vector<std::string> &gold_labels) {
  std::vector<Match> edges;
  for (size_t p = 0; p < sim.size(); ++p) {
    for (size_t g = 0; g < sim[p].size(); ++g) {
      if (eligible[p][g]) edges.push_back({p, g, sim[p][g]});
    }
  }
  std::sort(edges.begin(), edges.end(), [&](const Match &a, const Match &b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return std::tie(pred_labels[a.pred], gold_labels[a.gold], a.pred, a.gold) <
           std::tie(pred_labels[b.pred], gold_labels[b.gold], b.pred, b.gold);
  });
  std::vector<bool> pred_used(sim.size(), false);
  std::vector<bool> gold_used(gold_labels.size(), false);
  std::vector<Match> out;
  for (const auto &e : edges) {
    if (pred_used[e.pred] || gold_used[e.gold]) continue;
    pred_used[e.pred] = gold_used[e.gold] = true;
    out.push_back(e);
  }
  return out;
}

Scores scores_from_counts(size_t matched, size_t predicted, size_t gold,
                          size_t excused) {
  Scores s;
  s.matched = matched;
  s.predicted = predicted;
  s.gold = gold;
  s.excused = excused;
  size_t denom = predicted - excused;
  s.precision = denom == 0 ? 0.0 : static_cast<double>(matched) / denom;
  s.recall = gold == 0 ? 0.0 : static_cast<double>(matched) / gold;
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

EntityMatching entity_matching(const std::vector<std::string> &pred,
                               const GoldSet &gold, EmbeddingProvider &embedder,
                               double threshold) {
  EntityMatching m;
  m.sim.assign(pred.size(), std::vector<double>(gold.entities.size(), -1.0));
  m.eligible.assign(pred.size(), std::vector<bool>(gold.entities.size(), false));
  for (size_t p = 0; p < pred.size(); ++p) {
    std::string pk = normalize(pred[p]);
    Vector pv = embedder.embed(pred[p]);
    for (size_t g = 0; g < gold.entities.size(); ++g) {
      double best = -1.0;
      bool exact = false;
      for (const auto &alias : gold.entities[g]) {
        if (normalize(alias) == pk) {
          exact = true;
          best = 1.0;
          break;
        }
        best = std::max(best, cosine(pv, embedder.embed(alias)));
      }
      m.sim[p][g] = best;
      m.eligible[p][g] = exact || best >= threshold;
    }
  }
  return m;
}

namespace {

std::vector<std::string> unique_normalized(const std::vector<std::string> &items) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto &s : items) {
    if (normalize(s).empty()) continue;
    if (seen.insert(normalize(s)).second) out.push_back(s);
  }
  return out;
}

}  // namespace

Scores entity_metrics(const std::vector<std::string> &pred_in,
                      const GoldSet &gold, EmbeddingProvider &embedder,
                      double threshold, const std::set<std::string> &allowlist) {
  auto pred = unique_normalized(pred_in);
  auto m = entity_matching(pred, gold, embedder, threshold);
  std::vector<std::string> pred_labels;
  for (const auto &p : pred) pred_labels.push_back(normalize(p));
  std::vector<std::string> gold_labels;
  for (const auto &g : gold.entities) {
    std::vector<std::string> names;
    for (const auto &a : g) names.push_back(normalize(a));
    std::sort(names.begin(), names.end());
    gold_labels.push_back(join(names, "|"));
  }
  auto matches = greedy_match(m.sim, m.eligible, pred_labels, gold_labels);
  std::vector<bool> matched(pred.size(), false);
  for (const auto &x : matches) matched[x.pred] = true;
  size_t excused = 0;
  for (size_t p = 0; p < pred.size(); ++p) {
    if (!matched[p] && allowlist.count(pred_labels[p])) ++excused;
  }
  return scores_from_counts(matches.size(), pred.size(), gold.entities.size(),
                            excused);
}

std::string render_flat(const std::array<std::string, 3> &t) {
  return t[0] + " " + t[1] + " " + t[2];
}

TripleMatching triple_matching(const std::vector<std::string> &pred,
                               const std::vector<std::string> &gold,
                               EmbeddingProvider &embedder, double threshold) {
  TripleMatching m;
  m.sim.assign(pred.size(), std::vector<double>(gold.size(), -1.0));
  m.eligible.assign(pred.size(), std::vector<bool>(gold.size(), false));
  std::vector<Vector> gv;
  for (const auto &g : gold) gv.push_back(embedder.embed(g));
  for (size_t p = 0; p < pred.size(); ++p) {
    Vector pv = embedder.embed(pred[p]);
    for (size_t g = 0; g < gold.size(); ++g) {
      bool exact = normalize(pred[p]) == normalize(gold[g]);
      m.sim[p][g] = exact ? 1.0 : cosine(pv, gv[g]);
      m.eligible[p][g] = exact || m.sim[p][g] >= threshold;
    }
  }
  return m;
}

Scores triple_metrics(const std::vector<std::string> &pred_in,
                      const std::vector<std::string> &gold_in,
                      EmbeddingProvider &embedder, double threshold) {
  auto pred = unique_normalized(pred_in);
  auto gold = unique_normalized(gold_in);
  auto m = triple_matching(pred, gold, embedder, threshold);
  std::vector<std::string> pl;
  std::vector<std::string> gl;
  for (const auto &p : pred) pl.push_back(normalize(p));
  for (const auto &g : gold) gl.push_back(normalize(g));
  auto matches = greedy_match(m.sim, m.eligible, pl, gl);
  return scores_from_counts(matches.size(), pred.size(), gold.size());
}

double theme_coherence_metric(const std::vector<std::string> &pred,
                              EmbeddingProvider &embedder, const Theme &theme,
                              double threshold) {
  if (pred.empty()) {
    spdlog::warn("theme coherence of an empty prediction is reported as 0");
    return 0.0;
  }
  size_t hits = 0;
  for (const auto &t : pred) {
    if (theme_coherence(embedder, t, theme) >= threshold) ++hits;
  }
  return static_cast<double>(hits) / pred.size();
}

EvalReport evaluate_graph(const ThemeGraph &graph, const GoldSet &gold,
                          EmbeddingProvider &embedder, const Theme &theme,
                          const EvalOptions &options,
                          const std::set<std::string> &allowlist) {
  EvalReport r;
  r.options = options;
  std::vector<std::string> entities;
  for (const auto &[key, info] : graph.entities()) entities.push_back(info.name);
  std::vector<std::string> pred;
  for (const auto &t : graph.triples()) pred.push_back(t.render_flat());
  std::vector<std::string> gold_triples;
  for (const auto &t : gold.triples) gold_triples.push_back(render_flat(t));
  r.entities = entity_metrics(entities, gold, embedder, options.entity_threshold,
                              allowlist);
  r.triples = triple_metrics(pred, gold_triples, embedder, options.triple_threshold);
  r.theme_coherence =
      theme_coherence_metric(pred, embedder, theme, options.coherence_threshold);
  r.predicted_triples = pred.size();
  return r;
}

namespace {

json scores_json(const Scores &s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
          {"matched", s.matched},     {"predicted", s.predicted},
          {"gold", s.gold},           {"excused", s.excused}};
}

}  // namespace

std::string report_to_json(const EvalReport &report) {
  json j;
  j["entities"] = scores_json(report.entities);
  j["triples"] = scores_json(report.triples);
  j["theme_coherence"] = report.theme_coherence;
  j["predicted_triples"] = report.predicted_triples;
  j["thresholds"] = {{"entity", report.options.entity_threshold},
                     {"triple", report.options.triple_threshold},
                     {"coherence", report.options.coherence_threshold}};
  return j.dump(2) + "\n";
}

std::string report_to_table(const EvalReport &report) {
  char buf[512];
  std::string out = "metric      precision  recall  f1      matched/pred/gold\n";
  auto row = [&](const char *name, const Scores &s) {
    std::snprintf(buf, sizeof buf, "%-10s  %9.4f  %6.4f  %6.4f  %zu/%zu/%zu\n",
                  name, s.precision, s.recall, s.f1, s.matched, s.predicted,
                  s.gold);
    out += buf;
  };
  row("entities", report.entities);
  row("triples", report.triples);
  std::snprintf(buf, sizeof buf, "theme coherence %.4f over %zu triples\n",
                report.theme_coherence, report.predicted_triples);
  out += buf;
  return out;
}

}  // namespace themekg
