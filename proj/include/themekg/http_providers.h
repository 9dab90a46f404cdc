#pragma once

// Network-backed providers. Credentials come from environment variables;
// endpoints come from the run configuration.

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "themekg/providers.h"

namespace themekg {

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};

  // Delay before attempt number `attempt` (1-based retries).
  std::chrono::milliseconds backoff(int attempt) const;
};

struct HttpOptions {
  std::chrono::seconds timeout{30};
  RetryPolicy retry;
  // Minimum spacing between two requests from one client.
  std::chrono::milliseconds min_interval{0};
  std::map<std::string, std::string> headers;
};

// Blocking JSON-over-HTTP client shared by the providers below. Transport
// failures, 429 and 5xx responses are retried with exponential backoff;
// other 4xx responses fail immediately. Failures surface as ProviderError
// naming the provider.
class HttpClient {
 public:
  HttpClient(std::string provider, std::string base_url, HttpOptions options);

  std::string get(const std::string &path,
                  const std::vector<std::pair<std::string, std::string>> &params);
  std::string post_json(const std::string &path, const std::string &body);

  const std::string &provider() const { return provider_; }
  size_t requests() const { return requests_; }

 private:
  template <typename Send>
  std::string with_retries(const std::string &what, Send &&send);
  void pace();

  std::string provider_;
  std::string base_url_;
  HttpOptions options_;
  std::mutex pace_mu_;
  std::chrono::steady_clock::time_point last_request_{};
  std::atomic<size_t> requests_{0};
};

// Reads an environment variable; empty when unset.
std::string env_or_empty(const char *name);

// Chat-completion style API: POST {model, messages, temperature,
// max_tokens}, reply text at choices[0].message.content.
class ChatCompletionLlm : public LlmProvider {
 public:
  ChatCompletionLlm(std::string base_url, std::string path, std::string model,
                    std::string api_key, HttpOptions options = {});
  std::string id() const override { return "chat:" + model_; }
  std::string complete(std::string_view prompt,
                       const Decoding &decoding = {}) override;

 private:
  HttpClient http_;
  std::string path_;
  std::string model_;
};

// Embedding API: POST {model, input}, vector at data[0].embedding.
class HttpEmbedding : public EmbeddingProvider {
 public:
  HttpEmbedding(std::string base_url, std::string path, std::string model,
                std::string api_key, size_t dimension,
                HttpOptions options = {});
  std::string id() const override { return "http-embed:" + model_; }
  size_t dimension() const override { return dimension_; }
  Vector embed(std::string_view text) override;

 private:
  HttpClient http_;
  std::string path_;
  std::string model_;
  size_t dimension_;
  std::shared_mutex mu_;
  std::unordered_map<std::string, Vector> memo_;
};

// MediaWiki action API (categorymembers, categories, categoryinfo) with
// continuation handling.
class MediaWikiCategories : public WikiCategoryProvider {
 public:
  MediaWikiCategories(std::string base_url, std::string api_path = "/w/api.php",
                      HttpOptions options = {});
  std::string id() const override { return "mediawiki"; }
  std::vector<std::string> children(std::string_view category) override;
  std::vector<std::string> page_categories(std::string_view title) override;
  bool page_exists(std::string_view title) override;
  bool category_exists(std::string_view category) override;

  // Full-text search over page titles, best first.
  std::vector<std::string> search(std::string_view query, size_t limit);

 private:
  HttpClient http_;
  std::string api_path_;
};

// Candidate categories from the categories of the top search hits for the
// mention; a lightweight stand-in for explicit semantic analysis.
class MediaWikiSearchRetriever : public CandidateCategoryRetriever {
 public:
  explicit MediaWikiSearchRetriever(MediaWikiCategories &wiki,
                                    size_t pages_per_query = 3)
      : wiki_(wiki), pages_per_query_(pages_per_query) {}
  std::string id() const override { return "mediawiki-search"; }
  std::vector<std::string> retrieve(std::string_view mention,
                                    std::string_view context,
                                    size_t k) override;

 private:
  MediaWikiCategories &wiki_;
  size_t pages_per_query_;
};

// Tagging service: POST {"text"} -> {"tokens": [{text, tag, start, end}],
// "noun_chunks": [[start, end], ...]}.
class HttpPosTagger : public PosTagger {
 public:
  HttpPosTagger(std::string base_url, std::string path,
                HttpOptions options = {});
  std::string id() const override { return "http-tagger"; }
  std::vector<TaggedToken> tag(std::string_view sentence) override;
  std::vector<Span> noun_chunks(std::string_view sentence) override;

 private:
  HttpClient http_;
  std::string path_;
};

// Typing service: POST {entity, context, category} -> {"score"}.
class HttpContextTyping : public ContextTypingProvider {
 public:
  HttpContextTyping(std::string base_url, std::string path,
                    HttpOptions options = {});
  std::string id() const override { return "http-typing"; }
  double consistency(std::string_view entity, std::string_view context,
                     std::string_view category) override;

 private:
  HttpClient http_;
  std::string path_;
};

}  // namespace themekg
