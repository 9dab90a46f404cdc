#include "doctest.h"

#include "themekg/errors.h"
#include "themekg/mock_providers.h"
#include "themekg/relation_ontology.h"

using namespace themekg;

namespace {

const Theme kTheme{"EV-battery", "electric vehicle battery", {"Batteries"}};

std::vector<std::string> texts(const std::vector<RelationPhrase> &v) {
  std::vector<std::string> out;
  for (const auto &p : v) out.push_back(p.normalized());
  return out;
}

EntityOntology small_ontology() {
  EntityOntology eo(4);
  eo.add_root("Batteries");
  eo.add_root("Vehicles");
  eo.add_edge("Batteries", "Lead-acid batteries");
  eo.add_edge("Vehicles", "Electric vehicles");
  return eo;
}

}  // namespace

TEST_CASE("generation prompt matches the template exactly") {
  CHECK(relation_generation_prompt("EV-battery", "Lead-acid batteries", "Electric vehicles") ==
        "Given the theme EV-battery, what are the possible relations from "
        "Lead-acid batteries to Electric vehicles? List Answers in the format: "
        "(Lead-acid batteries, ___ , Electric vehicles)");
}

TEST_CASE("reply parsing keeps well-formed lines for the asked pair") {
  std::string reply =
      "Here are some options:\n"
      "1. (Lead-acid batteries, be power source of, Electric vehicles)\n"
      "2. (lead-acid battery, be recycled from, electric vehicles)\n"
      "3. (Lead-acid batteries, is, Electric vehicles)\n"
      "4. (Lead-acid batteries, none, Electric vehicles)\n"
      "5. (Forklifts, include, Electric vehicles)\n"
      "6. (Lead-acid batteries, be power source of, Electric vehicles)\n"
      "7. Lead-acid batteries power electric vehicles\n";
  auto phrases = parse_relation_lines(reply, "Lead-acid batteries", "Electric vehicles");
  CHECK(texts(phrases) ==
        std::vector<std::string>{"be power source of", "be recycled from"});
}

TEST_CASE("custom stop relations are honoured") {
  StopRelations stop({"relate to"});
  auto phrases = parse_relation_lines("(a, relate to, b)\n(a, is, b)", "a", "b", stop);
  CHECK(texts(phrases) == std::vector<std::string>{"is"});
}

TEST_CASE("generator asks both directions and records empty answers") {
  ScriptedLlm llm;
  llm.add_contains({"from Lead-acid batteries to Electric vehicles?"},
                   "(Lead-acid batteries, be power source of, Electric vehicles)");
  llm.add_pattern("[\\s\\S]*", "none");
  RelationOntology ro;
  RelationGenerator gen(llm, kTheme);
  auto forward = gen.generate(ro, "Lead-acid batteries", "Electric vehicles");
  CHECK(texts(forward) == std::vector<std::string>{"be power source of"});
  CHECK(ro.has_entry("Electric vehicles", "Lead-acid batteries"));
  CHECK(ro.entry("Electric vehicles", "Lead-acid batteries").empty());
  CHECK(llm.calls() == 2);
  gen.ensure(ro, "lead-acid batteries", "electric vehicles");
  CHECK(llm.calls() == 2);  // cached entry, no new query
}

TEST_CASE("self pairs are asked once") {
  ScriptedLlm llm;
  llm.add_pattern("[\\s\\S]*", "(Electric vehicles, include, Electric vehicles)");
  RelationOntology ro;
  RelationGenerator gen(llm, kTheme);
  gen.generate(ro, "Electric vehicles", "Electric vehicles");
  CHECK(llm.calls() == 1);
  CHECK(ro.entry("Electric vehicles", "Electric vehicles").size() == 1);
}

TEST_CASE("generate_all_pairs covers every ordered pair") {
  ScriptedLlm llm;
  llm.add_pattern("[\\s\\S]*", "none");
  auto eo = small_ontology();
  RelationOntology ro;
  RelationGenerator gen(llm, kTheme);
  generate_all_pairs(ro, eo, gen, 3);
  size_t n = eo.size();
  CHECK(ro.size() == n * n);
  for (const auto &a : eo.categories()) {
    for (const auto &b : eo.categories()) CHECK(ro.has_entry(a.name, b.name));
  }
}

TEST_CASE("candidates merge parent pairs, dedupe, and end with none") {
  auto eo = small_ontology();
  RelationOntology ro;
  ro.record_generated("Lead-acid batteries", "Electric vehicles",
                      {RelationPhrase("be power source of")});
  ro.record_generated("Batteries", "Electric vehicles",
                      {RelationPhrase("be installed in"), RelationPhrase("be power source of")});
  ro.record_generated("Lead-acid batteries", "Vehicles", {RelationPhrase("be used in")});
  ro.record_generated("Batteries", "Vehicles", {RelationPhrase("power")});
  enrich(ro, "Lead-acid batteries", "Electric vehicles", RelationPhrase("drive"));

  auto c = retrieve_candidates(ro, eo, "Lead-acid batteries", "Electric vehicles", nullptr, 1);
  CHECK(texts(c) == std::vector<std::string>{"be power source of", "be used in",
                                             "be installed in", "power", "drive", "none"});
  auto own = retrieve_candidates(ro, eo, "Lead-acid batteries", "Electric vehicles", nullptr, 0);
  CHECK(texts(own) == std::vector<std::string>{"be power source of", "drive", "none"});
}

TEST_CASE("candidates for a pair with no entries are just none") {
  auto eo = small_ontology();
  RelationOntology ro;
  auto c = retrieve_candidates(ro, eo, "Batteries", "Vehicles", nullptr);
  REQUIRE(c.size() == 1);
  CHECK(c[0].is_none());
  CHECK_THROWS_AS(retrieve_candidates(ro, eo, "Nope", "Vehicles", nullptr), NotFound);
}

TEST_CASE("candidate retrieval generates missing pairs on demand") {
  ScriptedLlm llm;
  llm.add_contains({"from Batteries to Vehicles?"}, "(Batteries, power, Vehicles)");
  llm.add_pattern("[\\s\\S]*", "none");
  auto eo = small_ontology();
  RelationOntology ro;
  RelationGenerator gen(llm, kTheme);
  auto c = retrieve_candidates(ro, eo, "Lead-acid batteries", "Electric vehicles", &gen, 1);
  CHECK(texts(c) == std::vector<std::string>{"power", "none"});
}

TEST_CASE("enrichment is idempotent and refuses none") {
  RelationOntology ro;
  CHECK(enrich(ro, "a", "b", RelationPhrase("be equipped with")));
  CHECK_FALSE(enrich(ro, "A", "B", RelationPhrase("Be equipped with")));
  CHECK(ro.entry("a", "b").size() == 1);
  CHECK(ro.entry("a", "b")[0].provenance == PhraseProvenance::kEnriched);
  CHECK_THROWS_AS(enrich(ro, "a", "b", RelationPhrase("none")), InvalidArgument);
}

TEST_CASE("relation ontology json round-trips with provenance") {
  RelationOntology ro;
  ro.record_generated("Batteries", "Vehicles", {RelationPhrase("power")});
  ro.record_generated("Vehicles", "Batteries", {});
  enrich(ro, "Batteries", "Vehicles", RelationPhrase("be mounted in"));
  std::string text = relation_ontology_to_json(ro);
  RelationOntology back = relation_ontology_from_json(text);
  CHECK(back == ro);
  CHECK(back.has_entry("Vehicles", "Batteries"));
  CHECK(relation_ontology_to_json(back) == text);
  CHECK_THROWS_AS(relation_ontology_from_json(R"({"nokey": []})"), ParseError);
}
