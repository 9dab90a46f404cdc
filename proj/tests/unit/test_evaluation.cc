#include "doctest.h"

#include <algorithm>
#include <random>

#include "support/evb_fixture.h"
#include "support/matching.h"
#include "themekg/errors.h"
#include "themekg/evaluation.h"
#include "themekg/text.h"

using namespace themekg;
using namespace themekg::testing;

namespace {

const std::vector<std::string> kWords = {
    "battery", "cell",   "charger", "forklift", "cart",  "motor", "grid",
    "solar",   "anode",  "cathode", "inverter", "fuse",  "relay", "pack",
    "module",  "sensor", "cable",   "plug",     "panel", "rotor"};

std::vector<std::string> sample(std::mt19937_64 &rng, size_t n) {
  std::vector<std::string> out;
  std::uniform_int_distribution<size_t> pick(0, kWords.size() - 1);
  for (size_t i = 0; i < n; ++i) out.push_back(kWords[pick(rng)] + " unit");
  return out;
}

}  // namespace

TEST_CASE("f1 and count-based scores") {
  CHECK(f1_score(0.0, 1.0) == 0.0);
  CHECK(f1_score(1.0, 1.0) == 1.0);
  CHECK(f1_score(0.5, 1.0) == doctest::Approx(2.0 / 3.0));
  auto s = scores_from_counts(3, 5, 4);
  CHECK(s.precision == doctest::Approx(0.6));
  CHECK(s.recall == doctest::Approx(0.75));
  CHECK(s.f1 == doctest::Approx(2 * 0.6 * 0.75 / 1.35));
  auto e = scores_from_counts(0, 0, 0);
  CHECK(e.precision == 0.0);
  CHECK(e.recall == 0.0);
  CHECK(scores_from_counts(2, 4, 2, 2).precision == 1.0);
}

TEST_CASE("triple metrics agree with a set formula on 200 exact-match instances") {
  // With threshold above 1 only exact matches count, so greedy matching
  // reduces to intersecting the normalized sets.
  MockEmbedding embedder;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<size_t> size(0, 12);
  for (int i = 0; i < 200; ++i) {
    auto pred = sample(rng, size(rng));
    auto gold = sample(rng, size(rng));
    std::set<std::string> ps(pred.begin(), pred.end());
    std::set<std::string> gs(gold.begin(), gold.end());
    size_t both = 0;
    for (const auto &p : ps) both += gs.count(p);
    double P = ps.empty() ? 0.0 : double(both) / ps.size();
    double R = gs.empty() ? 0.0 : double(both) / gs.size();
    double F = (P == 0 || R == 0) ? 0.0 : 2 * P * R / (P + R);

    auto s = triple_metrics(pred, gold, embedder, 1.01);
    CHECK(s.matched == both);
    CHECK(s.precision == doctest::Approx(P).epsilon(1e-12));
    CHECK(s.recall == doctest::Approx(R).epsilon(1e-12));
    CHECK(s.f1 == doctest::Approx(F).epsilon(1e-12));
  }
}

TEST_CASE("greedy matching against exhaustive assignment") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<size_t> dim(0, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  size_t total_gap = 0;
  for (int i = 0; i < 300; ++i) {
    size_t np = dim(rng);
    size_t ng = dim(rng);
    std::vector<std::vector<double>> sim(np, std::vector<double>(ng));
    std::vector<std::vector<bool>> ok(np, std::vector<bool>(ng));
    std::vector<std::string> pl;
    std::vector<std::string> gl;
    for (size_t p = 0; p < np; ++p) pl.push_back("p" + std::to_string(p));
    for (size_t g = 0; g < ng; ++g) gl.push_back("g" + std::to_string(g));
    for (size_t p = 0; p < np; ++p) {
      for (size_t g = 0; g < ng; ++g) {
        sim[p][g] = std::round(u(rng) * 10) / 10;  // plenty of ties
        ok[p][g] = sim[p][g] >= 0.5;
      }
    }
    auto greedy = greedy_match(sim, ok, pl, gl);
    size_t exact = brute_force_matching(ok, ng);
    CHECK(max_matching(ok, ng) == exact);
    CHECK(greedy.size() <= exact);
    // A greedy matching is maximal, so at least half the optimum.
    CHECK(2 * greedy.size() >= exact);
    std::vector<bool> pu(np), gu(ng);
    for (const auto &m : greedy) {
      CHECK(ok[m.pred][m.gold]);
      CHECK_FALSE(pu[m.pred]);
      CHECK_FALSE(gu[m.gold]);
      pu[m.pred] = gu[m.gold] = true;
    }
    for (size_t p = 0; p < np; ++p) {
      for (size_t g = 0; g < ng; ++g) CHECK_FALSE((ok[p][g] && !pu[p] && !gu[g]));
    }
    total_gap += exact - greedy.size();
  }
  MESSAGE("greedy vs optimal cardinality gap over 300 instances: " << total_gap);
}

TEST_CASE("greedy matching count ignores input order") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    size_t n = 5;
    std::vector<std::vector<double>> sim(n, std::vector<double>(n));
    std::vector<std::vector<bool>> ok(n, std::vector<bool>(n));
    std::vector<std::string> pl{"a", "b", "c", "d", "e"};
    std::vector<std::string> gl{"v", "w", "x", "y", "z"};
    for (size_t p = 0; p < n; ++p) {
      for (size_t g = 0; g < n; ++g) {
        sim[p][g] = std::round(u(rng) * 4) / 4;
        ok[p][g] = sim[p][g] >= 0.5;
      }
    }
    size_t base = greedy_match(sim, ok, pl, gl).size();
    std::vector<size_t> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::vector<double>> sim2(n);
    std::vector<std::vector<bool>> ok2(n);
    std::vector<std::string> pl2;
    for (size_t p : perm) {
      sim2[pl2.size()] = sim[p];
      ok2[pl2.size()] = ok[p];
      pl2.push_back(pl[p]);
    }
    CHECK(greedy_match(sim2, ok2, pl2, gl).size() == base);
  }
}

TEST_CASE("entity matching: exact alias is 1.0, soft matches need the threshold") {
  MockEmbedding embedder;
  GoldSet gold;
  gold.entities = {{"electric vehicles", "EVs"}, {"golf carts"}};
  auto m = entity_matching({"EVs", "golf cart", "warm weather"}, gold, embedder, 0.85);
  CHECK(m.sim[0][0] == 1.0);
  CHECK(m.eligible[0][0]);
  CHECK(m.sim[1][1] == doctest::Approx(1.0));  // plural folding makes them equal
  CHECK(m.eligible[1][1]);
  CHECK_FALSE(m.eligible[2][0]);
  CHECK_FALSE(m.eligible[2][1]);
}

TEST_CASE("allowlisted unmatched entities leave the precision denominator") {
  MockEmbedding embedder;
  GoldSet gold;
  gold.entities = {{"golf carts"}, {"forklifts"}};
  std::vector<std::string> pred = {"golf carts", "vehicle batteries", "summer"};
  auto plain = entity_metrics(pred, gold, embedder, 0.85);
  CHECK(plain.precision == doctest::Approx(1.0 / 3.0));
  auto excused = entity_metrics(pred, gold, embedder, 0.85, {"vehicle batteries"});
  CHECK(excused.excused == 1);
  CHECK(excused.precision == doctest::Approx(0.5));
  CHECK(excused.recall == doctest::Approx(0.5));
  // A matched entity on the allowlist is still just a match.
  auto matched = entity_metrics(pred, gold, embedder, 0.85, {"golf carts"});
  CHECK(matched.excused == 0);
}

TEST_CASE("gold validation") {
  GoldSet ok;
  ok.entities = {{"a", "A1"}, {"b"}};
  ok.triples = {{"a", "r", "b"}};
  CHECK_NOTHROW(ok.validate());
  GoldSet overlap = ok;
  overlap.entities.push_back({"a"});
  CHECK_THROWS_AS(overlap.validate(), InvalidArgument);
  GoldSet empty_group = ok;
  empty_group.entities.push_back({});
  CHECK_THROWS_AS(empty_group.validate(), InvalidArgument);
  GoldSet dangling = ok;
  dangling.triples.push_back({"a", "r", "c"});
  CHECK_THROWS_AS(dangling.validate(), InvalidArgument);
  CHECK_THROWS_AS(gold_from_json("{\"entities\": 3}"), ParseError);
}

TEST_CASE("the EVB-mini gold set loads and the greedy gap is zero on it") {
  EvbFixture fx;
  auto gold = gold_from_json(read_file((evb_dir() / "gold.json").string()));
  CHECK(gold.entities.size() == 11);
  CHECK(gold.triples.size() == 8);
  auto allow = load_allowlist((evb_dir() / "allowlist.txt").string());
  CHECK(allow == std::set<std::string>{"vehicle batteries"});

  auto golden = graph_from_jsonl(read_file((evb_dir() / "golden" / "graph.jsonl").string()));
  std::vector<std::string> names;
  for (const auto &[k, info] : golden.graph.entities()) names.push_back(info.name);
  auto em = entity_matching(names, gold, *fx.embedder, 0.85);
  std::vector<std::string> pl;
  for (const auto &n : names) pl.push_back(normalize(n));
  std::vector<std::string> gl(gold.entities.size());
  for (size_t g = 0; g < gl.size(); ++g) gl[g] = normalize(gold.entities[g][0]);
  CHECK(greedy_match(em.sim, em.eligible, pl, gl).size() ==
        max_matching(em.eligible, gold.entities.size()));

  auto report = evaluate_graph(golden.graph, gold, *fx.embedder, fx.config.theme,
                               fx.config.evaluation, allow);
  CHECK(report.triples.precision == 1.0);
  CHECK(report.triples.matched == 7);
  CHECK(report.entities.matched == 9);
  CHECK(report.predicted_triples == 7);
  auto table = report_to_table(report);
  CHECK(table.find("triples        1.0000  0.8750  0.9333  7/7/8") != std::string::npos);
  auto j = nlohmann::json::parse(report_to_json(report));
  CHECK(j.contains("entities"));
}

TEST_CASE("theme coherence metric") {
  MockEmbedding embedder;
  Theme theme{"EV", "electric vehicle battery", {"Batteries"}};
  CHECK(theme_coherence_metric({}, embedder, theme, 0.3) == 0.0);
  CHECK(theme_coherence_metric({"electric vehicles use battery packs", "summer brings warm weather"},
                               embedder, theme, 0.3) == doctest::Approx(0.5));
}
