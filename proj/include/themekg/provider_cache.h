#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

#include "themekg/parallel.h"
#include "themekg/providers.h"

namespace themekg {

enum class CacheMode {
  kReadWrite,  // serve hits, record misses
  kReplay,     // serve hits, a miss is a ProviderError
};

CacheMode cache_mode_from_string(std::string_view s);

struct CacheStats {
  size_t hits = 0;
  size_t misses = 0;
};

// Memoizes provider calls in memory and, when a directory is set, on disk
// under sha256(provider id, request payload). The on-disk entries double as
// the run's call log: replaying against them reproduces every response.
class ProviderCache {
 public:
  // An empty directory keeps the cache in memory only.
  explicit ProviderCache(std::filesystem::path directory = {},
                         CacheMode mode = CacheMode::kReadWrite);

  static std::string key(std::string_view provider, std::string_view payload);

  std::optional<std::string> get(std::string_view provider,
                                 std::string_view payload);
  void put(std::string_view provider, std::string_view payload,
           std::string_view value);

  template <typename Compute>
  std::string get_or_compute(std::string_view provider,
                             std::string_view payload, Compute &&compute) {
    if (auto hit = get(provider, payload)) return *hit;
    if (mode_ == CacheMode::kReplay) replay_miss(provider, payload);
    std::string value = compute();
    put(provider, payload, value);
    return value;
  }

  CacheMode mode() const { return mode_; }
  const std::filesystem::path &directory() const { return directory_; }
  std::map<std::string, CacheStats> stats() const;

 private:
  [[noreturn]] void replay_miss(std::string_view provider,
                                std::string_view payload);
  std::filesystem::path path_for(const std::string &key) const;

  std::filesystem::path directory_;
  CacheMode mode_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, std::string> memory_;
  mutable std::mutex stats_mu_;
  std::map<std::string, CacheStats> stats_;
};

// Caching decorators. Each forwards misses to the wrapped provider and
// reports the wrapped provider's id.

class CachedEmbedding : public EmbeddingProvider {
 public:
  CachedEmbedding(EmbeddingProvider &inner, ProviderCache &cache)
      : inner_(inner), cache_(cache) {}
  std::string id() const override { return inner_.id(); }
  size_t dimension() const override { return inner_.dimension(); }
  Vector embed(std::string_view text) override;

 private:
  EmbeddingProvider &inner_;
  ProviderCache &cache_;
  std::shared_mutex mu_;
  std::unordered_map<std::string, Vector> decoded_;
  SingleFlight<Vector> flight_;
};

class CachedLlm : public LlmProvider {
 public:
  CachedLlm(LlmProvider &inner, ProviderCache &cache)
      : inner_(inner), cache_(cache) {}
  std::string id() const override { return inner_.id(); }
  std::string complete(std::string_view prompt,
                       const Decoding &decoding = {}) override;

 private:
  LlmProvider &inner_;
  ProviderCache &cache_;
};

class CachedWiki : public WikiCategoryProvider {
 public:
  CachedWiki(WikiCategoryProvider &inner, ProviderCache &cache)
      : inner_(inner), cache_(cache) {}
  std::string id() const override { return inner_.id(); }
  std::vector<std::string> children(std::string_view category) override;
  std::vector<std::string> page_categories(std::string_view title) override;
  bool page_exists(std::string_view title) override;
  bool category_exists(std::string_view category) override;

 private:
  WikiCategoryProvider &inner_;
  ProviderCache &cache_;
};

class CachedTagger : public PosTagger {
 public:
  CachedTagger(PosTagger &inner, ProviderCache &cache)
      : inner_(inner), cache_(cache) {}
  std::string id() const override { return inner_.id(); }
  std::vector<TaggedToken> tag(std::string_view sentence) override;
  std::vector<Span> noun_chunks(std::string_view sentence) override;

 private:
  PosTagger &inner_;
  ProviderCache &cache_;
};

class CachedContextTyping : public ContextTypingProvider {
 public:
  CachedContextTyping(ContextTypingProvider &inner, ProviderCache &cache)
      : inner_(inner), cache_(cache) {}
  std::string id() const override { return inner_.id(); }
  double consistency(std::string_view entity, std::string_view context,
                     std::string_view category) override;

 private:
  ContextTypingProvider &inner_;
  ProviderCache &cache_;
};

class CachedRetriever : public CandidateCategoryRetriever {
 public:
  CachedRetriever(CandidateCategoryRetriever &inner, ProviderCache &cache)
      : inner_(inner), cache_(cache) {}
  std::string id() const override { return inner_.id(); }
  std::vector<std::string> retrieve(std::string_view mention,
                                    std::string_view context,
                                    size_t k) override;

 private:
  CandidateCategoryRetriever &inner_;
  ProviderCache &cache_;
};

}  // namespace themekg
