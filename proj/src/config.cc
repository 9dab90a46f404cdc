#include "themekg/config.h"

#include "themekg/errors.h"
#include "themekg/text.h"

namespace themekg {

namespace fs = std::filesystem;
using nlohmann::json;

json default_config_json() {
  return json::parse(R"({
  "theme": {"name": "", "description": "", "root_categories": []},
  "corpus_dir": "corpus",
  "workers": 4,
  "ontology": {"max_depth": 4, "edge_threshold": 0.35},
  "relations": {
    "generation": "all",
    "parent_levels": 1,
    "stop_relations": ["is", "are", "was", "were", "be", "been", "being",
                       "has", "have", "had"]
  },
  "mentions": {
    "high_frequency_rank": 5000,
    "coherence_cutoff": 0.30,
    "min_cooccurrence": 2,
    "frequency_list": "",
    "stopwords": "",
    "lexicon": ""
  },
  "typing": {
    "theme_threshold": 0.25,
    "context_threshold": 0.5,
    "retriever_k": 10,
    "context_window": 1
  },
  "extraction": {"window": 1, "fallback": true},
  "assembly": {"coref_threshold": 0.85, "prompt_budget": 4000},
  "evaluation": {
    "gold": "",
    "allowlist": "",
    "entity_threshold": 0.85,
    "triple_threshold": 0.85,
    "coherence_threshold": 0.30
  },
  "llm": {"temperature": 0.0, "max_tokens": 512},
  "providers": {
    "cache_dir": "",
    "cache_mode": "read_write",
    "timeout_s": 30,
    "max_attempts": 4,
    "initial_backoff_ms": 500,
    "max_backoff_ms": 8000,
    "min_interval_ms": 0,
    "llm": {
      "base_url": "https://api.openai.com",
      "path": "/v1/chat/completions",
      "model": "gpt-4",
      "api_key_env": "THEMEKG_LLM_API_KEY"
    },
    "embedding": {
      "base_url": "https://api.openai.com",
      "path": "/v1/embeddings",
      "model": "text-embedding-3-small",
      "api_key_env": "THEMEKG_EMBEDDING_API_KEY",
      "dimension": 1536
    },
    "wiki": {"base_url": "https://en.wikipedia.org", "api_path": "/w/api.php"},
    "tagger": {"base_url": "", "path": "/tag"},
    "typing": {"base_url": "", "path": "/consistency"}
  },
  "mock": {
    "wiki": "",
    "llm_script": "",
    "retriever": "",
    "synonyms": {},
    "dimension": 64
  }
})");
}

namespace {

// Rejects keys the defaults do not know, so typos fail loudly.
void check_keys(const json &user, const json &defaults, const std::string &where) {
  for (const auto &[key, value] : user.items()) {
    std::string path = where.empty() ? key : where + "." + key;
    if (!defaults.contains(key)) throw ParseError("config: unknown key '" + path + "'");
    const json &d = defaults.at(key);
    if (d.is_object() && key != "synonyms") {
      if (!value.is_object()) throw ParseError("config: '" + path + "' must be an object");
      check_keys(value, d, path);
    }
  }
}

fs::path resolve(const fs::path &base, const std::string &value,
                 const char *builtin = nullptr) {
  if (value.empty()) {
    if (!builtin) return {};
    return fs::path(THEMEKG_DATA_DIR) / builtin;
  }
  fs::path p(value);
  return p.is_absolute() ? p : base / p;
}

HttpEndpoint endpoint(const json &j) {
  HttpEndpoint e;
  e.base_url = j.value("base_url", "");
  e.path = j.value("path", "");
  e.model = j.value("model", "");
  e.api_key_env = j.value("api_key_env", "");
  return e;
}

}  // namespace

Config Config::from_json(std::string_view text, const fs::path &base_dir) {
  json user;
  try {
    user = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!user.is_object()) throw ParseError("config: top level must be an object");
  json defaults = default_config_json();
  check_keys(user, defaults, "");
  json j = defaults;
  j.merge_patch(user);

  Config c;
  c.raw = j;
  try {
    const json &t = j.at("theme");
    c.theme.name = t.at("name").get<std::string>();
    c.theme.description = t.at("description").get<std::string>();
    c.theme.root_categories = t.at("root_categories").get<std::vector<std::string>>();
    c.theme.validate();

    c.corpus_dir = resolve(base_dir, j.at("corpus_dir").get<std::string>());
    c.workers = std::max<size_t>(1, j.at("workers").get<size_t>());

    const json &o = j.at("ontology");
    c.ontology.max_depth = o.at("max_depth").get<size_t>();
    c.ontology.edge_threshold = o.at("edge_threshold").get<double>();
    c.ontology.workers = c.workers;

    const json &r = j.at("relations");
    std::string gen = r.at("generation").get<std::string>();
    if (gen == "all") {
      c.generation = GenerationMode::kAllPairs;
    } else if (gen == "lazy") {
      c.generation = GenerationMode::kLazy;
    } else {
      throw ParseError("config: relations.generation must be 'all' or 'lazy'");
    }
    c.parent_levels = r.at("parent_levels").get<size_t>();
    c.stop_relations =
        StopRelations(r.at("stop_relations").get<std::vector<std::string>>());

    const json &m = j.at("mentions");
    c.mentions.high_frequency_rank = m.at("high_frequency_rank").get<size_t>();
    c.mentions.coherence_cutoff = m.at("coherence_cutoff").get<double>();
    c.mentions.min_cooccurrence = m.at("min_cooccurrence").get<size_t>();
    c.frequency_list =
        resolve(base_dir, m.at("frequency_list").get<std::string>(), "freq_en.tsv");
    c.stopwords =
        resolve(base_dir, m.at("stopwords").get<std::string>(), "stopwords.txt");
    c.lexicon = resolve(base_dir, m.at("lexicon").get<std::string>(), "lexicon_en.tsv");

    const json &ty = j.at("typing");
    c.typing.theme_threshold = ty.at("theme_threshold").get<double>();
    c.typing.context_threshold = ty.at("context_threshold").get<double>();
    c.typing.retriever_k = ty.at("retriever_k").get<size_t>();
    c.typing.context_window = ty.at("context_window").get<size_t>();
    c.typing.workers = c.workers;

    const json &d = j.at("llm");
    c.decoding.temperature = d.at("temperature").get<double>();
    c.decoding.max_tokens = d.at("max_tokens").get<int>();

    const json &x = j.at("extraction");
    c.extraction.window = x.at("window").get<size_t>();
    c.extraction.fallback = x.at("fallback").get<bool>();
    c.extraction.parent_levels = c.parent_levels;
    c.extraction.workers = c.workers;
    c.extraction.decoding = c.decoding;
    c.extraction.stop = c.stop_relations;

    const json &a = j.at("assembly");
    c.assembly.coref_threshold = a.at("coref_threshold").get<double>();
    c.prompt_budget = a.at("prompt_budget").get<size_t>();

    const json &e = j.at("evaluation");
    c.gold = resolve(base_dir, e.at("gold").get<std::string>());
    c.allowlist = resolve(base_dir, e.at("allowlist").get<std::string>());
    c.evaluation.entity_threshold = e.at("entity_threshold").get<double>();
    c.evaluation.triple_threshold = e.at("triple_threshold").get<double>();
    c.evaluation.coherence_threshold = e.at("coherence_threshold").get<double>();

    const json &p = j.at("providers");
    c.providers.cache_dir = resolve(base_dir, p.at("cache_dir").get<std::string>());
    c.providers.cache_mode =
        cache_mode_from_string(p.at("cache_mode").get<std::string>());
    c.providers.http.timeout = std::chrono::seconds(p.at("timeout_s").get<int>());
    c.providers.http.retry.max_attempts = p.at("max_attempts").get<int>();
    c.providers.http.retry.initial_backoff =
        std::chrono::milliseconds(p.at("initial_backoff_ms").get<int>());
    c.providers.http.retry.max_backoff =
        std::chrono::milliseconds(p.at("max_backoff_ms").get<int>());
    c.providers.http.min_interval =
        std::chrono::milliseconds(p.at("min_interval_ms").get<int>());
    c.providers.llm = endpoint(p.at("llm"));
    c.providers.embedding = endpoint(p.at("embedding"));
    c.providers.embedding_dimension = p.at("embedding").at("dimension").get<size_t>();
    c.providers.wiki_url = p.at("wiki").at("base_url").get<std::string>();
    c.providers.wiki_api_path = p.at("wiki").at("api_path").get<std::string>();
    c.providers.tagger = endpoint(p.at("tagger"));
    c.providers.typing = endpoint(p.at("typing"));

    const json &mk = j.at("mock");
    c.mock.wiki = resolve(base_dir, mk.at("wiki").get<std::string>());
    c.mock.llm_script = resolve(base_dir, mk.at("llm_script").get<std::string>());
    c.mock.retriever = resolve(base_dir, mk.at("retriever").get<std::string>());
    c.mock.synonyms = mk.at("synonyms").get<std::map<std::string, std::string>>();
    c.mock.dimension = mk.at("dimension").get<size_t>();
  } catch (const json::exception &e) {
    throw ParseError(std::string("config: ") + e.what());
  } catch (const InvalidArgument &e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return c;
}

Config Config::from_file(const fs::path &path) {
  fs::path base = path.parent_path();
  if (base.empty()) base = ".";
  return from_json(read_file(path.string()), base);
}

}  // namespace themekg
