#pragma once

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "themekg/graph.h"
#include "themekg/model.h"
#include "themekg/providers.h"

namespace themekg {

struct GoldSet {
  // Alias groups; every group names one entity.
  std::vector<std::vector<std::string>> entities;
  std::vector<std::array<std::string, 3>> triples;
  std::string theme_description;

  // Throws InvalidArgument when alias groups overlap or are empty, or a
  // triple names an entity missing from every group.
  void validate() const;
};

// {"entities": [[alias, ...], ...], "triples": [[h, r, t], ...],
//  "theme_description": "..."} (the last field optional).
GoldSet gold_from_json(std::string_view text);

// One entity per line, '#' comments; stored normalized.
std::set<std::string> load_allowlist(const std::string &path);

struct Scores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  size_t matched = 0;
  size_t predicted = 0;
  size_t gold = 0;
  // Unmatched predictions left out of the precision denominator.
  size_t excused = 0;
};

// Harmonic mean; 0 when either input is 0.
double f1_score(double precision, double recall);

struct Match {
  size_t pred = 0;
  size_t gold = 0;
  double similarity = 0.0;
};

// One-to-one assignment taking the most similar eligible pair first.
// sim[p][g] is the similarity, eligible[p][g] whether the pair may match.
// Equal similarities are ordered by the item labels, so the matched count
// does not depend on input order.
std::vector<Match> greedy_match(const std::vector<std::vector<double>> &sim,
                                const std::vector<std::vector<bool>> &eligible,
                                const std::vector<std::string> &pred_labels,
                                const std::vector<std::string> &gold_labels);

// P/R/F1 from counts. Precision is matched / (predicted - excused), 0 for an
// empty denominator; recall is matched / gold, 0 for no gold.
Scores scores_from_counts(size_t matched, size_t predicted, size_t gold,
                          size_t excused = 0);

// Similarity matrix behind entity matching: 1.0 for a normalized exact match
// with any alias, else the best alias cosine.
struct EntityMatching {
  std::vector<std::vector<double>> sim;
  std::vector<std::vector<bool>> eligible;
};
EntityMatching entity_matching(const std::vector<std::string> &pred,
                               const GoldSet &gold, EmbeddingProvider &embedder,
                               double threshold);

Scores entity_metrics(const std::vector<std::string> &pred, const GoldSet &gold,
                      EmbeddingProvider &embedder, double threshold,
                      const std::set<std::string> &allowlist = {});

// "head relation tail" of a gold triple.
std::string render_flat(const std::array<std::string, 3> &t);

struct TripleMatching {
  std::vector<std::vector<double>> sim;
  std::vector<std::vector<bool>> eligible;
};
TripleMatching triple_matching(const std::vector<std::string> &pred,
                               const std::vector<std::string> &gold,
                               EmbeddingProvider &embedder, double threshold);

// Inputs are rendered "head relation tail" strings.
Scores triple_metrics(const std::vector<std::string> &pred,
                      const std::vector<std::string> &gold,
                      EmbeddingProvider &embedder, double threshold);

// Share of rendered triples whose cosine with the theme description reaches
// threshold; 0 (with a warning) for no triples.
double theme_coherence_metric(const std::vector<std::string> &pred,
                              EmbeddingProvider &embedder, const Theme &theme,
                              double threshold);

struct EvalOptions {
  double entity_threshold = 0.85;
  double triple_threshold = 0.85;
  double coherence_threshold = 0.30;
};

struct EvalReport {
  Scores entities;
  Scores triples;
  double theme_coherence = 0.0;
  size_t predicted_triples = 0;
  EvalOptions options;
};

EvalReport evaluate_graph(const ThemeGraph &graph, const GoldSet &gold,
                          EmbeddingProvider &embedder, const Theme &theme,
                          const EvalOptions &options = {},
                          const std::set<std::string> &allowlist = {});

std::string report_to_json(const EvalReport &report);
std::string report_to_table(const EvalReport &report);

}  // namespace themekg
