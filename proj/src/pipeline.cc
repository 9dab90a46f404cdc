#include "themekg/pipeline.h"

#include <chrono>
#include <map>

#include <spdlog/spdlog.h>

#include "themekg/hashing.h"
#include "themekg/mock_providers.h"
#include "themekg/relation_ontology.h"
#include "themekg/tagger.h"
#include "themekg/text.h"

namespace themekg {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kOntology: return "ontology";
    case Stage::kRelations: return "relations";
    case Stage::kMine: return "mine";
    case Stage::kType: return "type";
    case Stage::kExtract: return "extract";
    case Stage::kAssemble: return "assemble";
    case Stage::kEvaluate: return "evaluate";
    case Stage::kExportPrompt: return "export-prompt";
    case Stage::kAll: return "all";
  }
  return "?";
}

Stage stage_from_string(std::string_view s) {
  for (Stage st : {Stage::kOntology, Stage::kRelations, Stage::kMine, Stage::kType,
                   Stage::kExtract, Stage::kAssemble, Stage::kEvaluate,
                   Stage::kExportPrompt, Stage::kAll}) {
    if (to_string(st) == s) return st;
  }
  throw InvalidArgument("unknown stage: " + std::string(s));
}

const std::vector<Stage> &all_stages() {
  static const std::vector<Stage> order = {
      Stage::kOntology, Stage::kRelations, Stage::kMine,     Stage::kType,
      Stage::kExtract,  Stage::kAssemble,  Stage::kEvaluate, Stage::kExportPrompt};
  return order;
}

// Providers are created on first use so that a stage only needs the
// configuration of the capabilities it calls.
struct Pipeline::Providers {
  const Config &config;
  bool mock;
  ProviderCache cache;

  std::unique_ptr<EmbeddingProvider> embed_base;
  std::unique_ptr<CachedEmbedding> embed;
  std::unique_ptr<LlmProvider> llm_base;
  std::unique_ptr<CachedLlm> llm_cached;
  std::unique_ptr<WikiCategoryProvider> wiki_base;
  std::unique_ptr<CachedWiki> wiki_cached;
  std::unique_ptr<PosTagger> tagger_base;
  std::unique_ptr<CachedTagger> tagger_cached;
  std::unique_ptr<ContextTypingProvider> typing_base;
  std::unique_ptr<CachedContextTyping> typing_cached;
  std::unique_ptr<CandidateCategoryRetriever> retriever_base;
  std::unique_ptr<CachedRetriever> retriever_cached;

  Providers(const Config &c, bool use_mock, fs::path cache_dir)
      : config(c), mock(use_mock), cache(std::move(cache_dir), c.providers.cache_mode) {}

  static std::string key_from(const HttpEndpoint &e) {
    if (e.api_key_env.empty()) return "";
    std::string key = env_or_empty(e.api_key_env.c_str());
    if (key.empty()) {
      throw InvalidArgument("environment variable " + e.api_key_env + " is not set");
    }
    return key;
  }

  static void need(const fs::path &p, const char *what) {
    if (p.empty()) {
      throw InvalidArgument(std::string("mock providers need mock.") + what +
                            " in the config");
    }
  }

  EmbeddingProvider &embedder() {
    if (!embed) {
      if (mock) {
        embed_base = std::make_unique<MockEmbedding>(config.mock.dimension,
                                                     config.mock.synonyms);
      } else {
        const auto &e = config.providers.embedding;
        embed_base = std::make_unique<HttpEmbedding>(
            e.base_url, e.path, e.model, key_from(e),
            config.providers.embedding_dimension, config.providers.http);
      }
      embed = std::make_unique<CachedEmbedding>(*embed_base, cache);
    }
    return *embed;
  }

  LlmProvider &llm() {
    if (!llm_cached) {
      if (mock) {
        need(config.mock.llm_script, "llm_script");
        llm_base = ScriptedLlm::from_file(config.mock.llm_script.string());
      } else {
        const auto &e = config.providers.llm;
        llm_base = std::make_unique<ChatCompletionLlm>(
            e.base_url, e.path, e.model, key_from(e), config.providers.http);
      }
      llm_cached = std::make_unique<CachedLlm>(*llm_base, cache);
    }
    return *llm_cached;
  }

  MediaWikiCategories &mediawiki() {
    if (!wiki_base) {
      wiki_base = std::make_unique<MediaWikiCategories>(
          config.providers.wiki_url, config.providers.wiki_api_path,
          config.providers.http);
    }
    return static_cast<MediaWikiCategories &>(*wiki_base);
  }

  WikiCategoryProvider &wiki() {
    if (!wiki_cached) {
      if (mock) {
        need(config.mock.wiki, "wiki");
        wiki_base = FixtureWiki::from_file(config.mock.wiki.string());
      } else {
        mediawiki();
      }
      wiki_cached = std::make_unique<CachedWiki>(*wiki_base, cache);
    }
    return *wiki_cached;
  }

  PosTagger &tagger() {
    if (!tagger_cached) {
      const auto &e = config.providers.tagger;
      if (mock || e.base_url.empty()) {
        tagger_base = std::make_unique<LexiconTagger>(
            fs::exists(config.lexicon)
                ? LexiconTagger::from_file(config.lexicon.string())
                : LexiconTagger());
      } else {
        tagger_base = std::make_unique<HttpPosTagger>(e.base_url, e.path,
                                                      config.providers.http);
      }
      tagger_cached = std::make_unique<CachedTagger>(*tagger_base, cache);
    }
    return *tagger_cached;
  }

  ContextTypingProvider &context_typing() {
    if (!typing_cached) {
      const auto &e = config.providers.typing;
      if (mock || e.base_url.empty()) {
        typing_base = std::make_unique<OverlapContextTyping>();
      } else {
        typing_base = std::make_unique<HttpContextTyping>(e.base_url, e.path,
                                                          config.providers.http);
      }
      typing_cached = std::make_unique<CachedContextTyping>(*typing_base, cache);
    }
    return *typing_cached;
  }

  CandidateCategoryRetriever &retriever() {
    if (!retriever_cached) {
      if (mock) {
        need(config.mock.retriever, "retriever");
        retriever_base = FixtureRetriever::from_file(config.mock.retriever.string());
      } else {
        wiki();
        retriever_base = std::make_unique<MediaWikiSearchRetriever>(mediawiki());
      }
      retriever_cached = std::make_unique<CachedRetriever>(*retriever_base, cache);
    }
    return *retriever_cached;
  }

  TypingProviders typing_set() {
    return TypingProviders{embedder(), wiki(), context_typing(), retriever()};
  }
};

namespace {

constexpr const char *kOntologyFile = "ontology.json";
constexpr const char *kExpandedFile = "ontology.expanded.json";
constexpr const char *kRelationsFile = "relations.json";
constexpr const char *kEnrichedFile = "relations.enriched.json";
constexpr const char *kMentionsFile = "mentions.tsv";
constexpr const char *kTypedFile = "typed.tsv";
constexpr const char *kTriplesFile = "triples.jsonl";
constexpr const char *kGraphFile = "graph.jsonl";
constexpr const char *kReportFile = "report.json";
constexpr const char *kReportTableFile = "report.txt";
constexpr const char *kPromptFile = "prompt.txt";
constexpr const char *kManifestFile = "manifest.json";

json cache_delta(const std::map<std::string, CacheStats> &before,
                 const std::map<std::string, CacheStats> &after) {
  json out = json::object();
  for (const auto &[provider, s] : after) {
    CacheStats b;
    if (auto it = before.find(provider); it != before.end()) b = it->second;
    size_t hits = s.hits - b.hits;
    size_t misses = s.misses - b.misses;
    if (hits + misses == 0) continue;
    out[provider] = {{"hits", hits}, {"misses", misses}};
  }
  return out;
}

std::string file_checksum(const fs::path &p) {
  return fs::exists(p) ? sha256_hex(read_file(p.string())) : std::string("absent");
}

}  // namespace

Pipeline::Pipeline(Config config, fs::path run_dir, PipelineOptions options)
    : config_(std::move(config)), run_dir_(std::move(run_dir)), options_(options) {
  fs::create_directories(run_dir_);
  fs::path manifest = run_dir_ / kManifestFile;
  if (fs::exists(manifest)) {
    try {
      manifest_ = json::parse(read_file(manifest.string()));
    } catch (const json::exception &e) {
      throw ParseError("corrupt manifest " + manifest.string() + ": " + e.what());
    }
  } else {
    manifest_ = {{"stages", json::object()}};
  }
}

Pipeline::~Pipeline() = default;

Pipeline::Providers &Pipeline::providers() {
  if (!providers_) {
    fs::path cache_dir = config_.providers.cache_dir.empty()
                             ? run_dir_ / "cache"
                             : config_.providers.cache_dir;
    providers_ = std::make_unique<Providers>(config_, options_.mock, cache_dir);
  }
  return *providers_;
}

fs::path Pipeline::artifact(std::string_view name) const {
  return run_dir_ / std::string(name);
}

std::string Pipeline::require(Stage stage, std::string_view name) const {
  fs::path p = artifact(name);
  if (!fs::exists(p)) {
    throw StageError(stage, "missing input " + std::string(name) +
                                "; run the upstream stage first");
  }
  return read_file(p.string());
}

void Pipeline::write_artifact(std::string_view name, std::string_view contents) {
  fs::path p = artifact(name);
  fs::path tmp = p;
  tmp += ".tmp";
  write_file(tmp.string(), contents);
  fs::rename(tmp, p);
}

const std::vector<Document> &Pipeline::documents() {
  if (!documents_) documents_ = load_corpus(config_.corpus_dir.string());
  return *documents_;
}

std::vector<std::string> Pipeline::inputs_of(Stage stage) const {
  switch (stage) {
    case Stage::kOntology: return {};
    case Stage::kRelations: return {kOntologyFile};
    case Stage::kMine: return {};
    case Stage::kType: return {kMentionsFile, kOntologyFile};
    case Stage::kExtract: return {kTypedFile, kExpandedFile, kRelationsFile};
    case Stage::kAssemble: return {kTriplesFile, kExpandedFile};
    case Stage::kEvaluate: return {kGraphFile};
    case Stage::kExportPrompt: return {kGraphFile};
    case Stage::kAll: return {};
  }
  return {};
}

std::vector<std::string> Pipeline::outputs_of(Stage stage) const {
  switch (stage) {
    case Stage::kOntology: return {kOntologyFile};
    case Stage::kRelations: return {kRelationsFile};
    case Stage::kMine: return {kMentionsFile};
    case Stage::kType: return {kTypedFile, kExpandedFile};
    case Stage::kExtract: return {kTriplesFile, kEnrichedFile};
    case Stage::kAssemble: return {kGraphFile};
    case Stage::kEvaluate: return {kReportFile, kReportTableFile};
    case Stage::kExportPrompt: return {kPromptFile};
    case Stage::kAll: return {};
  }
  return {};
}

std::string Pipeline::stage_hash(Stage stage) {
  const json &raw = config_.raw;
  std::vector<std::string> sections;
  switch (stage) {
    case Stage::kOntology: sections = {"theme", "ontology"}; break;
    case Stage::kRelations: sections = {"theme", "relations", "llm"}; break;
    case Stage::kMine: sections = {"theme", "mentions", "corpus_dir"}; break;
    case Stage::kType: sections = {"theme", "typing"}; break;
    case Stage::kExtract: sections = {"theme", "relations", "extraction", "llm"}; break;
    case Stage::kAssemble: sections = {"assembly"}; break;
    case Stage::kEvaluate: sections = {"theme", "evaluation"}; break;
    case Stage::kExportPrompt: sections = {"theme", "assembly"}; break;
    case Stage::kAll: break;
  }
  json material;
  material["stage"] = std::string(to_string(stage));
  material["mock"] = options_.mock;
  for (const auto &s : sections) material["config"][s] = raw.at(s);
  // Provider identity matters; cache location and worker counts do not.
  json prov = raw.at("providers");
  prov.erase("cache_dir");
  prov.erase("cache_mode");
  material["providers"] = options_.mock ? raw.at("mock") : prov;
  if (options_.mock) {
    for (const auto &[name, path] :
         {std::pair{"wiki", config_.mock.wiki},
          std::pair{"llm_script", config_.mock.llm_script},
          std::pair{"retriever", config_.mock.retriever}}) {
      material["fixtures"][name] = path.empty() ? "" : file_checksum(path);
    }
  }
  for (const auto &in : inputs_of(stage)) {
    material["inputs"][in] = file_checksum(artifact(in));
  }
  if (stage == Stage::kMine || stage == Stage::kType || stage == Stage::kExtract) {
    std::string corpus;
    for (const auto &d : documents()) {
      corpus += d.doc_id;
      corpus.push_back('\0');
      corpus += d.text;
      corpus.push_back('\0');
    }
    material["inputs"]["corpus"] = sha256_hex(corpus);
  }
  if (stage == Stage::kMine) {
    material["inputs"]["frequency_list"] = file_checksum(config_.frequency_list);
    material["inputs"]["stopwords"] = file_checksum(config_.stopwords);
    material["inputs"]["lexicon"] = file_checksum(config_.lexicon);
  }
  if (stage == Stage::kEvaluate) {
    if (!config_.gold.empty()) material["inputs"]["gold"] = file_checksum(config_.gold);
    if (!config_.allowlist.empty()) {
      material["inputs"]["allowlist"] = file_checksum(config_.allowlist);
    }
  }
  return sha256_hex(material.dump());
}

void Pipeline::run(Stage stage) {
  if (stage == Stage::kAll) {
    for (Stage s : all_stages()) {
      if (s == Stage::kEvaluate && config_.gold.empty()) {
        spdlog::info("stage evaluate: skipped, no gold file configured");
        continue;
      }
      run_one(s);
    }
    return;
  }
  run_one(stage);
}

void Pipeline::run_one(Stage stage) {
  current_ = stage;
  std::string name(to_string(stage));
  for (const auto &in : inputs_of(stage)) require(stage, in);
  std::string hash;
  try {
    hash = stage_hash(stage);
  } catch (const StageError &) {
    throw;
  } catch (const Error &e) {
    throw StageError(stage, e.what());
  }
  json &stages = manifest_["stages"];
  if (stages.contains(name)) {
    const json &prev = stages[name];
    bool same = prev.value("config_hash", "") == hash;
    bool intact = true;
    json recorded = prev.value("artifacts", json::object());
    for (const auto &[file, sum] : recorded.items()) {
      if (file_checksum(artifact(file)) != sum.get<std::string>()) intact = false;
    }
    if (same && intact && !options_.force) {
      spdlog::info("stage {}: up to date", name);
      return;
    }
    if (!same && !options_.force) {
      throw StageError(stage,
                       "run directory already holds this stage under a different "
                       "configuration or inputs; use --force or a fresh run directory");
    }
  }

  spdlog::info("stage {}: running", name);
  auto started = std::chrono::steady_clock::now();
  std::map<std::string, CacheStats> before;
  if (providers_) before = providers_->cache.stats();
  json stats;
  try {
    stats = execute(stage);
  } catch (const StageError &) {
    throw;
  } catch (const Error &e) {
    throw StageError(stage, e.what());
  }
  std::map<std::string, CacheStats> after;
  if (providers_) after = providers_->cache.stats();

  json entry;
  entry["config_hash"] = hash;
  entry["stats"] = stats;
  entry["cache"] = cache_delta(before, after);
  json artifacts = json::object();
  for (const auto &out : outputs_of(stage)) {
    artifacts[out] = file_checksum(artifact(out));
  }
  entry["artifacts"] = artifacts;
  stages[name] = entry;
  write_artifact(kManifestFile, manifest_.dump(2) + "\n");
  executed_.push_back(stage);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              started)
                    .count();
  spdlog::info("stage {}: done in {:.2f}s", name, secs);
}

json Pipeline::execute(Stage stage) {
  switch (stage) {
    case Stage::kOntology: return stage_ontology();
    case Stage::kRelations: return stage_relations();
    case Stage::kMine: return stage_mine();
    case Stage::kType: return stage_type();
    case Stage::kExtract: return stage_extract();
    case Stage::kAssemble: return stage_assemble();
    case Stage::kEvaluate: return stage_evaluate();
    case Stage::kExportPrompt: return stage_export_prompt();
    case Stage::kAll: break;
  }
  throw StageError(stage, "not a single stage");
}

json Pipeline::stage_ontology() {
  auto &p = providers();
  EntityOntology eo =
      build_entity_ontology(config_.theme, p.wiki(), p.embedder(), config_.ontology);
  write_artifact(kOntologyFile, ontology_to_json(eo));
  return {{"categories", eo.size()}, {"edges", eo.edges().size()}};
}

json Pipeline::stage_relations() {
  EntityOntology eo = ontology_from_json(require(Stage::kRelations, kOntologyFile));
  RelationOntology ro;
  if (config_.generation == GenerationMode::kAllPairs) {
    RelationGenerator generator(providers().llm(), config_.theme,
                                config_.stop_relations, config_.decoding);
    generate_all_pairs(ro, eo, generator, config_.workers);
  }
  write_artifact(kRelationsFile, relation_ontology_to_json(ro));
  size_t phrases = 0;
  size_t empty = 0;
  for (const auto &[a, b] : ro.pairs()) {
    size_t n = ro.entry(a, b).size();
    phrases += n;
    if (n == 0) ++empty;
  }
  return {{"pairs", ro.size()}, {"phrases", phrases}, {"empty_pairs", empty}};
}

json Pipeline::stage_mine() {
  auto &p = providers();
  FrequencyTable freq = FrequencyTable::from_file(config_.frequency_list.string());
  auto stopwords = load_stopwords(config_.stopwords.string());
  const auto &docs = documents();
  auto mentions = mine_corpus(docs, p.tagger(), freq, stopwords, p.embedder(),
                              config_.theme, config_.mentions, config_.workers);
  write_artifact(kMentionsFile, mentions_to_tsv(mentions));
  return {{"documents", docs.size()}, {"mentions", mentions.size()}};
}

json Pipeline::stage_type() {
  auto mentions = mentions_from_tsv(require(Stage::kType, kMentionsFile));
  EntityOntology eo = ontology_from_json(require(Stage::kType, kOntologyFile));
  size_t before = eo.size();
  auto &p = providers();
  auto typed = type_corpus(documents(), mentions, eo, config_.theme, p.typing_set(),
                           config_.typing);
  write_artifact(kTypedFile, typed_mentions_to_tsv(typed));
  write_artifact(kExpandedFile, ontology_to_json(eo));
  std::map<std::string, size_t> cases;
  for (const auto &t : typed) ++cases[std::string(to_string(t.typing_case))];
  return {{"mentions", typed.size()},
          {"cases", cases},
          {"attached_categories", eo.size() - before}};
}

json Pipeline::stage_extract() {
  auto typed = typed_mentions_from_tsv(require(Stage::kExtract, kTypedFile));
  EntityOntology eo = ontology_from_json(require(Stage::kExtract, kExpandedFile));
  RelationOntology ro =
      relation_ontology_from_json(require(Stage::kExtract, kRelationsFile));
  auto &p = providers();
  RelationGenerator generator(p.llm(), config_.theme, config_.stop_relations,
                              config_.decoding);
  ExtractionStats stats;
  std::string lines;
  std::vector<Triple> all;
  for (const auto &doc : documents()) {
    auto result = extract_document(doc, typed, ro, eo, p.llm(), &generator,
                                   config_.extraction);
    stats += result.stats;
    for (auto &t : result.triples) {
      lines += triple_to_json_line(t);
      lines += '\n';
      all.push_back(std::move(t));
    }
  }
  // Post-hoc check: every selected relation is still a candidate of its pair.
  size_t violations = 0;
  for (const auto &t : all) {
    if (t.source != TripleSource::kOntologySelected) continue;
    auto candidates = retrieve_candidates(ro, eo, t.head_category, t.tail_category,
                                          &generator, config_.parent_levels);
    bool member = false;
    for (const auto &c : candidates) member = member || c == t.relation;
    if (!member) ++violations;
  }
  if (violations > 0) {
    spdlog::error("{} selected triple(s) fall outside their candidate sets",
                  violations);
  }
  write_artifact(kTriplesFile, lines);
  write_artifact(kEnrichedFile, relation_ontology_to_json(ro));
  double fallback_rate =
      stats.pairs == 0 ? 0.0
                       : static_cast<double>(stats.fallback_extracted) / stats.pairs;
  return {{"pairs", stats.pairs},
          {"selected", stats.selected},
          {"fallback_attempts", stats.fallback_attempts},
          {"fallback_extracted", stats.fallback_extracted},
          {"fallback_rate", fallback_rate},
          {"errors", stats.errors},
          {"triples", all.size()},
          {"candidate_violations", violations}};
}

json Pipeline::stage_assemble() {
  std::vector<Triple> triples;
  size_t n = 0;
  for (const auto &line : split_lines(require(Stage::kAssemble, kTriplesFile))) {
    ++n;
    if (trim(line).empty()) continue;
    triples.push_back(triple_from_json_line(line, n));
  }
  EntityOntology eo = ontology_from_json(require(Stage::kAssemble, kExpandedFile));
  ThemeGraph graph = assemble(triples, providers().embedder(), eo, config_.assembly);
  export_graph(graph, artifact(kGraphFile).string());
  return {{"triples", graph.size()},
          {"occurrences", graph.occurrences().size()},
          {"entities", graph.entities().size()},
          {"aliases", graph.aliases().size()}};
}

json Pipeline::stage_evaluate() {
  if (config_.gold.empty()) {
    throw StageError(Stage::kEvaluate, "no gold file configured (evaluation.gold)");
  }
  require(Stage::kEvaluate, kGraphFile);
  ThemeGraph graph = import_graph(artifact(kGraphFile).string());
  GoldSet gold = gold_from_json(read_file(config_.gold.string()));
  std::set<std::string> allowlist;
  if (!config_.allowlist.empty()) allowlist = load_allowlist(config_.allowlist.string());
  EvalReport report = evaluate_graph(graph, gold, providers().embedder(),
                                     config_.theme, config_.evaluation, allowlist);
  write_artifact(kReportFile, report_to_json(report));
  write_artifact(kReportTableFile, report_to_table(report));
  return {{"entity_f1", report.entities.f1},
          {"triple_f1", report.triples.f1},
          {"theme_coherence", report.theme_coherence}};
}

json Pipeline::stage_export_prompt() {
  require(Stage::kExportPrompt, kGraphFile);
  ThemeGraph graph = import_graph(artifact(kGraphFile).string());
  std::string text = export_prompt_context(graph, providers().embedder(),
                                           config_.theme, config_.prompt_budget);
  write_artifact(kPromptFile, text);
  return {{"lines", split_lines(text).size()}};
}

}  // namespace themekg
