#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "themekg/config.h"
#include "themekg/errors.h"
#include "themekg/extraction.h"
#include "themekg/ontology_builder.h"
#include "themekg/relation_ontology.h"
#include "themekg/mentions.h"
#include "themekg/mock_providers.h"
#include "themekg/tagger.h"
#include "themekg/typing.h"

namespace themekg::testing {

inline std::filesystem::path data_dir() { return THEMEKG_DATA_DIR; }

inline std::filesystem::path evb_dir() { return data_dir() / "evb_mini"; }

// Mock providers wired exactly as the pipeline wires them for EVB-mini,
// minus the on-disk cache.
struct EvbFixture {
  Config config;
  std::unique_ptr<MockEmbedding> embedder;
  std::unique_ptr<ScriptedLlm> llm;
  std::unique_ptr<FixtureWiki> wiki;
  std::unique_ptr<FixtureRetriever> retriever;
  OverlapContextTyping context_typing;
  LexiconTagger tagger;
  FrequencyTable freq;
  std::set<std::string> stopwords;

  EvbFixture()
      : config(Config::from_file(evb_dir() / "config.json")),
        embedder(std::make_unique<MockEmbedding>(config.mock.dimension,
                                                 config.mock.synonyms)),
        llm(ScriptedLlm::from_file(config.mock.llm_script.string())),
        wiki(FixtureWiki::from_file(config.mock.wiki.string())),
        retriever(FixtureRetriever::from_file(config.mock.retriever.string())),
        tagger(LexiconTagger::from_file(config.lexicon.string())),
        freq(FrequencyTable::from_file(config.frequency_list.string())),
        stopwords(load_stopwords(config.stopwords.string())) {}

  TypingProviders typing() {
    return TypingProviders{*embedder, *wiki, context_typing, *retriever};
  }
};

// Everything the extract stage reads, computed in memory the way the
// pipeline computes it.
struct EvbState {
  std::vector<Document> docs;
  EntityOntology eo;
  std::vector<Mention> mentions;
  std::vector<TypedMention> typed;
  RelationOntology ro;
};

inline EvbState prepare_evb(EvbFixture &fx) {
  EvbState s;
  s.docs = load_corpus((evb_dir() / "corpus").string());
  s.eo = build_entity_ontology(fx.config.theme, *fx.wiki, *fx.embedder,
                               fx.config.ontology);
  RelationGenerator generator(*fx.llm, fx.config.theme, fx.config.stop_relations,
                              fx.config.decoding);
  generate_all_pairs(s.ro, s.eo, generator, 1);
  s.mentions = mine_corpus(s.docs, fx.tagger, fx.freq, fx.stopwords, *fx.embedder,
                           fx.config.theme, fx.config.mentions, 1);
  s.typed = type_corpus(s.docs, s.mentions, s.eo, fx.config.theme, fx.typing(),
                        fx.config.typing);
  return s;
}

inline const Document &doc_named(const EvbState &s, const std::string &id) {
  for (const auto &d : s.docs) {
    if (d.doc_id == id) return d;
  }
  throw NotFound("no document " + id);
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string &name) {
  auto p = std::filesystem::temp_directory_path() / ("themekg_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace themekg::testing
