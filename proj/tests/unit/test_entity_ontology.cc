#include "doctest.h"

#include "themekg/entity_ontology.h"
#include "themekg/errors.h"
#include "themekg/text.h"

using namespace themekg;

namespace {

EntityOntology sample() {
  EntityOntology eo(4);
  eo.add_root("Batteries");
  eo.add_root("Electric vehicles");
  eo.add_edge("Batteries", "Rechargeable batteries");
  eo.add_edge("Rechargeable batteries", "Lead-acid batteries");
  eo.add_edge("Batteries", "Battery chargers");
  eo.add_edge("Electric vehicles", "Electric cars");
  return eo;
}

}  // namespace

TEST_CASE("depths follow the shortest root path") {
  auto eo = sample();
  CHECK(eo.depth("Batteries") == 0);
  CHECK(eo.depth("rechargeable batteries") == 1);
  CHECK(eo.depth("Lead-acid batteries") == 2);
  // A shortcut edge lowers the depth.
  CHECK(eo.add_edge("Batteries", "Lead-acid batteries"));
  CHECK(eo.depth("Lead-acid batteries") == 1);
  CHECK_NOTHROW(eo.validate());
}

TEST_CASE("edges that would close a cycle are refused") {
  auto eo = sample();
  CHECK_FALSE(eo.add_edge("Lead-acid batteries", "Batteries"));
  CHECK_FALSE(eo.add_edge("Lead-acid batteries", "Rechargeable batteries"));
  CHECK_FALSE(eo.add_edge("Batteries", "Batteries"));
  CHECK_NOTHROW(eo.validate());
}

TEST_CASE("depth limit is enforced on insertion") {
  EntityOntology eo(2);
  eo.add_root("a");
  CHECK(eo.add_edge("a", "b"));
  CHECK(eo.add_edge("b", "c"));
  CHECK_FALSE(eo.add_edge("c", "d"));
  CHECK_FALSE(eo.contains("d"));
}

TEST_CASE("unknown parent is NotFound") {
  auto eo = sample();
  CHECK_THROWS_AS(eo.add_edge("Nope", "x"), NotFound);
}

TEST_CASE("lookups are case and whitespace insensitive") {
  auto eo = sample();
  CHECK(eo.contains("  battery   CHARGERS "));
  CHECK(eo.find("battery chargers") == std::optional<std::string>("Battery chargers"));
  CHECK_FALSE(eo.find("chargers"));
}

TEST_CASE("ancestors, related and is_ancestor") {
  auto eo = sample();
  CHECK(eo.ancestors("Lead-acid batteries", 1) ==
        std::vector<std::string>{"Rechargeable batteries"});
  auto two = eo.ancestors("Lead-acid batteries", 2);
  CHECK(two.size() == 2);
  CHECK(eo.is_ancestor("Batteries", "Lead-acid batteries"));
  CHECK_FALSE(eo.is_ancestor("Lead-acid batteries", "Batteries"));
  CHECK(eo.related("Lead-acid batteries", "Batteries"));
  CHECK(eo.related("Batteries", "Lead-acid batteries"));
  CHECK_FALSE(eo.related("Battery chargers", "Electric cars"));
}

TEST_CASE("removing an edge prunes what becomes unreachable") {
  auto eo = sample();
  eo.remove_edge("Batteries", "Rechargeable batteries");
  eo.prune_and_recompute();
  CHECK_FALSE(eo.contains("Rechargeable batteries"));
  CHECK_FALSE(eo.contains("Lead-acid batteries"));
  CHECK(eo.contains("Battery chargers"));
  CHECK_NOTHROW(eo.validate());
}

TEST_CASE("json export and import are inverse") {
  auto eo = sample();
  eo.add_edge("Electric vehicles", "Lead-acid batteries");
  std::string text = ontology_to_json(eo);
  EntityOntology back = ontology_from_json(text);
  CHECK(back == eo);
  CHECK(ontology_to_json(back) == text);
}

TEST_CASE("import rejects malformed or cyclic documents") {
  CHECK_THROWS_AS(ontology_from_json("{"), ParseError);
  CHECK_THROWS(ontology_from_json(
      R"({"max_depth":4,"categories":[{"name":"a","depth":0},{"name":"b","depth":1}],
          "edges":[["a","b"],["b","a"]],"roots":["a"]})"));
  CHECK_THROWS(ontology_from_json(
      R"({"max_depth":4,"categories":[{"name":"a","depth":0}],
          "edges":[["a","zzz"]],"roots":["a"]})"));
}

TEST_CASE("categories are listed in normalized name order") {
  auto eo = sample();
  auto cats = eo.categories();
  for (size_t i = 1; i < cats.size(); ++i) {
    CHECK(normalize(cats[i - 1].name) < normalize(cats[i].name));
  }
}
