#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "json.hpp"
#include "themekg/assembler.h"
#include "themekg/evaluation.h"
#include "themekg/extraction.h"
#include "themekg/http_providers.h"
#include "themekg/mentions.h"
#include "themekg/model.h"
#include "themekg/ontology_builder.h"
#include "themekg/provider_cache.h"
#include "themekg/typing.h"

namespace themekg {

struct HttpEndpoint {
  std::string base_url;
  std::string path;
  std::string model;
  // Name of the environment variable holding the key; never the key.
  std::string api_key_env;
};

struct ProviderConfig {
  std::filesystem::path cache_dir;  // empty: <run dir>/cache
  CacheMode cache_mode = CacheMode::kReadWrite;
  HttpOptions http;
  HttpEndpoint llm;
  HttpEndpoint embedding;
  size_t embedding_dimension = 1536;
  std::string wiki_url = "https://en.wikipedia.org";
  std::string wiki_api_path = "/w/api.php";
  HttpEndpoint tagger;   // empty base_url: built-in lexicon tagger
  HttpEndpoint typing;   // empty base_url: token-overlap typing
};

struct MockConfig {
  std::filesystem::path wiki;
  std::filesystem::path llm_script;
  std::filesystem::path retriever;
  std::map<std::string, std::string> synonyms;
  size_t dimension = 64;
};

enum class GenerationMode { kAllPairs, kLazy };

// Parsed run configuration. Relative paths resolve against the directory of
// the config file.
struct Config {
  Theme theme;
  std::filesystem::path corpus_dir;
  OntologyOptions ontology;
  GenerationMode generation = GenerationMode::kAllPairs;
  size_t parent_levels = 1;
  StopRelations stop_relations;
  MentionOptions mentions;
  std::filesystem::path frequency_list;
  std::filesystem::path stopwords;
  std::filesystem::path lexicon;
  TypingOptions typing;
  ExtractionOptions extraction;
  AssemblyOptions assembly;
  size_t prompt_budget = 4000;
  EvalOptions evaluation;
  std::filesystem::path gold;
  std::filesystem::path allowlist;
  Decoding decoding;
  ProviderConfig providers;
  MockConfig mock;
  size_t workers = 4;

  // The parsed document, kept for stage hashing.
  nlohmann::json raw;

  static Config from_json(std::string_view text,
                          const std::filesystem::path &base_dir);
  static Config from_file(const std::filesystem::path &path);
};

// Config document holding every default, as shipped in config/example.json.
nlohmann::json default_config_json();

}  // namespace themekg
