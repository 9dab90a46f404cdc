#include "doctest.h"

#include "themekg/errors.h"
#include "themekg/model.h"
#include "themekg/text.h"

using namespace themekg;

TEST_CASE("normalize lowercases, trims punctuation and collapses spaces") {
  CHECK(normalize("  Deep   Cycle Batteries. ") == "deep cycle batteries");
  CHECK(normalize("\"be power source of\"") == "be power source of");
  CHECK(normalize("...") == "");
}

TEST_CASE("content tokens fold simple plurals") {
  CHECK(content_tokens("Lead-acid Batteries") ==
        std::vector<std::string>{"lead", "acid", "battery"});
  CHECK(content_tokens("glass bus buses") ==
        std::vector<std::string>{"glass", "bus", "buse"});
  CHECK(content_tokens("cars") == std::vector<std::string>{"car"});
}

TEST_CASE("category names match across a trailing plural") {
  CHECK(category_names_match("Electric vehicles", "electric vehicle"));
  CHECK(category_names_match("Batteries", "battery"));
  CHECK_FALSE(category_names_match("Batteries", "battery chargers"));
}

TEST_CASE("paren groups take outermost balanced groups") {
  auto g = paren_groups("x (a, (b), c) y (d) (unclosed");
  REQUIRE(g.size() == 2);
  CHECK(g[0] == "a, (b), c");
  CHECK(g[1] == "d");
}

TEST_CASE("triple fields split at the first and last top-level comma") {
  auto f = split_triple_fields("deep cycle batteries, be power source of, forklifts");
  REQUIRE(f);
  CHECK(f->first == "deep cycle batteries");
  CHECK(trim(f->middle) == "be power source of");
  CHECK(trim(f->last) == "forklifts");

  auto nested = split_triple_fields("a, [b, c], d");
  REQUIRE(nested);
  CHECK(trim(nested->middle) == "[b, c]");

  CHECK_FALSE(split_triple_fields("only one, comma"));
}

TEST_CASE("tsv escaping round-trips tabs, newlines and backslashes") {
  std::string raw = "a\tb\nc\\d";
  std::string esc = tsv_escape(raw);
  CHECK(esc.find('\t') == std::string::npos);
  CHECK(esc.find('\n') == std::string::npos);
  CHECK(tsv_unescape(esc) == raw);
  CHECK(split_tabs("x\t\ty").size() == 3);
}

TEST_CASE("sentences split on terminal punctuation with spans into the text") {
  Document d = make_document("d", "One battery. Two cells! Three? Four");
  REQUIRE(d.sentences.size() == 4);
  CHECK(d.sentence_text(0) == "One battery.");
  CHECK(d.sentence_text(3) == "Four");
  CHECK(d.sentence_of(d.text.find("cells")) == 1);
  Span c = d.covering(1, 2);
  CHECK(d.slice(c) == "Two cells! Three?");
}

TEST_CASE("empty document has no sentences") {
  CHECK(make_document("e", "").sentences.empty());
  CHECK(make_document("e", "   \n ").sentences.empty());
}

TEST_CASE("relation phrases reject none and stop relations") {
  StopRelations stop;
  CHECK_FALSE(RelationPhrase::parse("none", stop));
  CHECK_FALSE(RelationPhrase::parse("  is ", stop));
  CHECK_FALSE(RelationPhrase::parse("", stop));
  auto p = RelationPhrase::parse(" Be Power Source Of ", stop);
  REQUIRE(p);
  CHECK(p->normalized() == "be power source of");
  CHECK(*p == RelationPhrase("be power source of"));
  CHECK_THROWS_AS(RelationPhrase("  "), InvalidArgument);
}

TEST_CASE("theme validation needs a name, description and a root") {
  Theme t{"EV-battery", "electric vehicle battery", {"Batteries"}};
  CHECK_NOTHROW(t.validate());
  t.root_categories.clear();
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
}

TEST_CASE("triples render as tuples and reject none") {
  Triple t{"deep cycle batteries", RelationPhrase("provide"), "continuous electricity",
           "Rechargeable batteries", "Electric power", {"d01", {0, 10}},
           TripleSource::kOntologySelected};
  CHECK(t.render() == "(deep cycle batteries, provide, continuous electricity)");
  CHECK(t.render_flat() == "deep cycle batteries provide continuous electricity");
  CHECK_NOTHROW(t.validate());
  Triple n = t;
  n.relation = RelationPhrase("none");
  CHECK_THROWS(n.validate());
}

TEST_CASE("enum string forms round-trip") {
  for (auto c : {TypingCase::kPageMatch, TypingCase::kContextTyped,
                 TypingCase::kRetrieved, TypingCase::kIrrelevant}) {
    CHECK(typing_case_from_string(to_string(c)) == c);
  }
  for (auto s : {TripleSource::kOntologySelected, TripleSource::kFallbackExtracted}) {
    CHECK(triple_source_from_string(to_string(s)) == s);
  }
  CHECK(to_string(TripleSource::kFallbackExtracted) == "FALLBACK_EXTRACTED");
}
