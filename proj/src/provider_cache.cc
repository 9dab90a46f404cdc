#include "themekg/provider_cache.h"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "themekg/errors.h"
#include "themekg/hashing.h"
#include "themekg/text.h"

namespace themekg {

using nlohmann::json;
namespace fs = std::filesystem;

CacheMode cache_mode_from_string(std::string_view s) {
  if (s == "read_write") return CacheMode::kReadWrite;
  if (s == "replay") return CacheMode::kReplay;
  throw InvalidArgument("unknown cache mode: " + std::string(s));
}

ProviderCache::ProviderCache(fs::path directory, CacheMode mode)
    : directory_(std::move(directory)), mode_(mode) {
  if (!directory_.empty()) fs::create_directories(directory_);
}

std::string ProviderCache::key(std::string_view provider,
                               std::string_view payload) {
  std::string material(provider);
  material.push_back('\0');
  material.append(payload);
  return sha256_hex(material);
}

fs::path ProviderCache::path_for(const std::string &key) const {
  return directory_ / key.substr(0, 2) / (key + ".json");
}

std::optional<std::string> ProviderCache::get(std::string_view provider,
                                              std::string_view payload) {
  std::string k = key(provider, payload);
  std::optional<std::string> found;
  {
    std::shared_lock lock(mu_);
    if (auto it = memory_.find(k); it != memory_.end()) found = it->second;
  }
  if (!found && !directory_.empty()) {
    fs::path path = path_for(k);
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::ostringstream buffer;
      buffer << in.rdbuf();
      try {
        json entry = json::parse(buffer.str());
        found = entry.at("value").get<std::string>();
      } catch (const json::exception &e) {
        throw ParseError("corrupt cache entry " + path.string() + ": " +
                         e.what());
      }
      std::unique_lock lock(mu_);
      memory_.emplace(k, *found);
    }
  }
  std::lock_guard lock(stats_mu_);
  auto &s = stats_[std::string(provider)];
  if (found) {
    ++s.hits;
  } else {
    ++s.misses;
  }
  return found;
}

void ProviderCache::put(std::string_view provider, std::string_view payload,
                        std::string_view value) {
  std::string k = key(provider, payload);
  std::unique_lock lock(mu_);
  memory_[k] = std::string(value);
  if (directory_.empty()) return;
  fs::path path = path_for(k);
  fs::create_directories(path.parent_path());
  json entry;
  entry["provider"] = std::string(provider);
  entry["payload"] = std::string(payload);
  entry["value"] = std::string(value);
  fs::path tmp = path;
  tmp += ".tmp";
  write_file(tmp.string(), entry.dump());
  fs::rename(tmp, path);
}

void ProviderCache::replay_miss(std::string_view provider,
                                std::string_view payload) {
  throw ProviderError(std::string(provider),
                      "cache miss in replay mode for request " +
                          key(provider, payload).substr(0, 12));
}

std::map<std::string, CacheStats> ProviderCache::stats() const {
  std::lock_guard lock(stats_mu_);
  return stats_;
}

// ---------------------------------------------------------------------------

Vector CachedEmbedding::embed(std::string_view text) {
  std::string key(text);
  auto memo = [&]() -> std::optional<Vector> {
    std::shared_lock lock(mu_);
    if (auto it = decoded_.find(key); it != decoded_.end()) return it->second;
    return std::nullopt;
  };
  if (auto v = memo()) return *v;
  // One cache lookup per distinct text keeps hit counts schedule independent.
  return flight_.run(key, [&] {
    if (auto v = memo()) return *v;
    std::string value = cache_.get_or_compute(
        "embed:" + inner_.id(), text, [&] { return json(inner_.embed(text)).dump(); });
    Vector v = json::parse(value).get<Vector>();
    std::unique_lock lock(mu_);
    return decoded_.try_emplace(key, std::move(v)).first->second;
  });
}

std::string CachedLlm::complete(std::string_view prompt,
                                const Decoding &decoding) {
  json payload;
  payload["prompt"] = std::string(prompt);
  payload["temperature"] = decoding.temperature;
  payload["max_tokens"] = decoding.max_tokens;
  return cache_.get_or_compute("llm:" + inner_.id(), payload.dump(),
                               [&] { return inner_.complete(prompt, decoding); });
}

namespace {

std::string wiki_payload(std::string_view method, std::string_view arg) {
  std::string p(method);
  p.push_back('\n');
  p.append(arg);
  return p;
}

}  // namespace

std::vector<std::string> CachedWiki::children(std::string_view category) {
  std::string v = cache_.get_or_compute(
      "wiki:" + inner_.id(), wiki_payload("children", category),
      [&] { return json(inner_.children(category)).dump(); });
  return json::parse(v).get<std::vector<std::string>>();
}

std::vector<std::string> CachedWiki::page_categories(std::string_view title) {
  std::string v = cache_.get_or_compute(
      "wiki:" + inner_.id(), wiki_payload("page_categories", title),
      [&] { return json(inner_.page_categories(title)).dump(); });
  return json::parse(v).get<std::vector<std::string>>();
}

bool CachedWiki::page_exists(std::string_view title) {
  std::string v = cache_.get_or_compute(
      "wiki:" + inner_.id(), wiki_payload("page_exists", title),
      [&] { return std::string(inner_.page_exists(title) ? "true" : "false"); });
  return v == "true";
}

bool CachedWiki::category_exists(std::string_view category) {
  std::string v = cache_.get_or_compute(
      "wiki:" + inner_.id(), wiki_payload("category_exists", category), [&] {
        return std::string(inner_.category_exists(category) ? "true" : "false");
      });
  return v == "true";
}

std::vector<TaggedToken> CachedTagger::tag(std::string_view sentence) {
  std::string v = cache_.get_or_compute(
      "tagger:" + inner_.id(), wiki_payload("tag", sentence), [&] {
        json out = json::array();
        for (const auto &t : inner_.tag(sentence)) {
          out.push_back({t.text, t.tag, t.span.begin, t.span.end});
        }
        return out.dump();
      });
  std::vector<TaggedToken> tokens;
  for (const auto &row : json::parse(v)) {
    tokens.push_back(TaggedToken{row[0].get<std::string>(),
                                 row[1].get<std::string>(),
                                 Span{row[2].get<size_t>(), row[3].get<size_t>()}});
  }
  return tokens;
}

std::vector<Span> CachedTagger::noun_chunks(std::string_view sentence) {
  std::string v = cache_.get_or_compute(
      "tagger:" + inner_.id(), wiki_payload("noun_chunks", sentence), [&] {
        json out = json::array();
        for (const auto &s : inner_.noun_chunks(sentence)) {
          out.push_back({s.begin, s.end});
        }
        return out.dump();
      });
  std::vector<Span> spans;
  for (const auto &row : json::parse(v)) {
    spans.push_back(Span{row[0].get<size_t>(), row[1].get<size_t>()});
  }
  return spans;
}

double CachedContextTyping::consistency(std::string_view entity,
                                        std::string_view context,
                                        std::string_view category) {
  json payload = {std::string(entity), std::string(context),
                  std::string(category)};
  std::string v = cache_.get_or_compute(
      "typing:" + inner_.id(), payload.dump(), [&] {
        return json(inner_.consistency(entity, context, category)).dump();
      });
  return json::parse(v).get<double>();
}

std::vector<std::string> CachedRetriever::retrieve(std::string_view mention,
                                                   std::string_view context,
                                                   size_t k) {
  json payload = {std::string(mention), std::string(context), k};
  std::string v = cache_.get_or_compute(
      "retriever:" + inner_.id(), payload.dump(),
      [&] { return json(inner_.retrieve(mention, context, k)).dump(); });
  return json::parse(v).get<std::vector<std::string>>();
}

}  // namespace themekg
