#include "doctest.h"

#include "support/evb_fixture.h"
#include "support/random_graphs.h"
#include "themekg/errors.h"
#include "themekg/ontology_builder.h"

using namespace themekg;
using namespace themekg::testing;

TEST_CASE("EVB-mini ontology keeps relevant subcategories and drops noise") {
  EvbFixture fx;
  auto eo = build_entity_ontology(fx.config.theme, *fx.wiki, *fx.embedder,
                                  fx.config.ontology);
  CHECK(eo.contains("Rechargeable batteries"));
  CHECK(eo.contains("Lead-acid batteries"));
  CHECK(eo.depth("Lead-acid batteries") == 2);
  // cos(Batteries, Military units) is negative under the mock embedding.
  CHECK_FALSE(eo.contains("Military units"));
  for (const auto &[p, c] : eo.edges()) {
    CHECK(cosine(fx.embedder->embed(p), fx.embedder->embed(c)) >=
          fx.config.ontology.edge_threshold);
  }
  CHECK(is_acyclic(eo));
  CHECK(all_reachable_from_roots(eo));
}

TEST_CASE("unknown root category is NotFound") {
  EvbFixture fx;
  Theme t = fx.config.theme;
  t.root_categories = {"Nonexistent things"};
  CHECK_THROWS_AS(build_entity_ontology(t, *fx.wiki, *fx.embedder), NotFound);
}

TEST_CASE("threshold above every similarity leaves only the roots") {
  EvbFixture fx;
  OntologyOptions o;
  o.edge_threshold = 1.01;
  auto eo = build_entity_ontology(fx.config.theme, *fx.wiki, *fx.embedder, o);
  CHECK(eo.size() == fx.config.theme.root_categories.size());
  CHECK(eo.edges().empty());
}

TEST_CASE("randomized graphs with injected cycles build acyclic, rooted, monotone ontologies") {
  MockEmbedding embedder;
  for (uint64_t seed = 1; seed <= 100; ++seed) {
    auto g = random_category_graph(seed);
    CAPTURE(seed);
    REQUIRE(g.injected_cycles > 0);
    std::set<std::string> previous;
    bool first = true;
    for (double t : {-1.0, 0.0, 0.2, 0.35, 0.5, 0.7, 0.9}) {
      OntologyOptions o;
      o.edge_threshold = t;
      o.workers = 2;
      auto eo = build_entity_ontology(g.theme, *g.wiki, embedder, o);
      CHECK(is_acyclic(eo));
      CHECK(all_reachable_from_roots(eo));
      CHECK_NOTHROW(eo.validate());
      for (const auto &[p, c] : eo.edges()) {
        CHECK(cosine(embedder.embed(p), embedder.embed(c)) >= t);
      }
      auto keys = category_keys(eo);
      if (!first) {
        // Raising the threshold never adds a category.
        CHECK(std::includes(previous.begin(), previous.end(), keys.begin(), keys.end()));
      }
      previous = keys;
      first = false;
    }
  }
}

TEST_CASE("builds are deterministic regardless of worker count") {
  MockEmbedding embedder;
  for (uint64_t seed = 200; seed < 220; ++seed) {
    auto g = random_category_graph(seed);
    OntologyOptions one;
    one.workers = 1;
    OntologyOptions many;
    many.workers = 8;
    CHECK(build_entity_ontology(g.theme, *g.wiki, embedder, one) ==
          build_entity_ontology(g.theme, *g.wiki, embedder, many));
  }
}

TEST_CASE("filter_edges drops weak edges and unreachable nodes") {
  MockEmbedding embedder;
  EntityOntology eo(4);
  eo.add_root("Batteries");
  eo.add_edge("Batteries", "Rechargeable batteries");
  eo.add_edge("Batteries", "Military units");
  eo.add_edge("Military units", "Artillery regiments");
  auto out = filter_edges(eo, embedder, 0.35);
  CHECK(out.contains("Rechargeable batteries"));
  CHECK_FALSE(out.contains("Military units"));
  CHECK_FALSE(out.contains("Artillery regiments"));
}

TEST_CASE("expand_with_category attaches below a parent") {
  EntityOntology eo(2);
  eo.add_root("Vehicles");
  eo.add_edge("Vehicles", "Electric vehicles");
  auto out = expand_with_category(eo, "Golf carts", "Electric vehicles");
  CHECK(out.contains("Golf carts"));
  CHECK(out.depth("Golf carts") == 2);
  CHECK_FALSE(eo.contains("Golf carts"));  // input untouched
  CHECK_THROWS_AS(expand_with_category(out, "Too deep", "Golf carts"), OntologyError);
  CHECK_THROWS_AS(expand_with_category(out, "x", "Unknown"), NotFound);
  CHECK_THROWS_AS(expand_with_category(out, "Vehicles", "Golf carts"), OntologyError);
}
