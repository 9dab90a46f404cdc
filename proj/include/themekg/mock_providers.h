#pragma once

// Deterministic offline providers. Every test and the bundled fixture run
// use these; none of them reach the network.

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <regex>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "themekg/providers.h"

namespace themekg {

// Bag-of-tokens embedding: each content token hashes (FNV-1a 64 seeding
// SplitMix64) to a uniform direction in [-1, 1)^d, normalized; the text
// vector is the L2-normalized sum over its token multiset. An optional
// synonym table rewrites tokens before hashing.
class MockEmbedding : public EmbeddingProvider {
 public:
  static constexpr size_t kDefaultDimension = 64;

  explicit MockEmbedding(size_t dimension = kDefaultDimension,
                         std::map<std::string, std::string> synonyms = {});

  std::string id() const override { return "mock-embedding"; }
  size_t dimension() const override { return dimension_; }
  // Throws InvalidArgument for text without any token.
  Vector embed(std::string_view text) override;

  static Vector token_direction(std::string_view token, size_t dimension);
  std::vector<std::string> tokens(std::string_view text) const;

 private:
  size_t dimension_;
  std::map<std::string, std::string> synonyms_;
  std::shared_mutex mu_;
  std::unordered_map<std::string, Vector> memo_;
};

// Closed-world LLM: answers only prompts its script covers, otherwise throws
// ProviderError. Rules are tried as exact prompt (by SHA-256 fingerprint),
// then "contains" / "pattern" rules in script order. Pattern rules are
// ECMAScript regexes matched against the whole prompt; $1..$9 in the
// response expand to capture groups.
class ScriptedLlm : public LlmProvider {
 public:
  ScriptedLlm() = default;
  static std::unique_ptr<ScriptedLlm> from_json_text(std::string_view text);
  static std::unique_ptr<ScriptedLlm> from_file(const std::string &path);

  void add_exact(std::string prompt, std::string response);
  void add_contains(std::vector<std::string> needles, std::string response);
  void add_pattern(const std::string &pattern, std::string response);

  std::string id() const override { return "scripted-llm"; }
  std::string complete(std::string_view prompt,
                       const Decoding &decoding = {}) override;

  size_t calls() const;

 private:
  struct Rule {
    std::vector<std::string> contains;
    std::optional<std::regex> pattern;
    std::string response;
  };

  std::unordered_map<std::string, std::string> exact_;  // fingerprint -> reply
  std::vector<Rule> rules_;
  mutable std::mutex mu_;
  size_t calls_ = 0;
};

// Category graph and page table loaded from a fixture. Lookups ignore case.
class FixtureWiki : public WikiCategoryProvider {
 public:
  FixtureWiki() = default;
  // {"categories": {name: [children...]}, "pages": {title: [categories...]}}
  static std::unique_ptr<FixtureWiki> from_json_text(std::string_view text);
  static std::unique_ptr<FixtureWiki> from_file(const std::string &path);

  void add_children(const std::string &category,
                    const std::vector<std::string> &children);
  void add_page(const std::string &title,
                const std::vector<std::string> &categories);

  std::string id() const override { return "fixture-wiki"; }
  std::vector<std::string> children(std::string_view category) override;
  std::vector<std::string> page_categories(std::string_view title) override;
  bool page_exists(std::string_view title) override;
  bool category_exists(std::string_view category) override;

  size_t calls() const { return calls_; }

 private:
  std::map<std::string, std::pair<std::string, std::vector<std::string>>>
      categories_;  // normalized -> (name, children)
  std::map<std::string, std::vector<std::string>> pages_;
  std::set<std::string> known_;
  std::atomic<size_t> calls_{0};
};

// Token-overlap stand-in for a zero-shot typing model: the share of the
// category's tokens found in the entity (weight 0.7) and in the context
// (weight 0.3).
class OverlapContextTyping : public ContextTypingProvider {
 public:
  std::string id() const override { return "overlap-typing"; }
  double consistency(std::string_view entity, std::string_view context,
                     std::string_view category) override;
};

// Explicit mention -> categories table, falling back to ranking an index of
// category names by token overlap with the mention.
class FixtureRetriever : public CandidateCategoryRetriever {
 public:
  FixtureRetriever() = default;
  // {"mentions": {mention: [categories...]}, "index": [categories...]}
  static std::unique_ptr<FixtureRetriever> from_json_text(
      std::string_view text);
  static std::unique_ptr<FixtureRetriever> from_file(const std::string &path);

  void add_mention(const std::string &mention,
                   const std::vector<std::string> &categories);
  void add_index(const std::string &category);

  std::string id() const override { return "fixture-retriever"; }
  std::vector<std::string> retrieve(std::string_view mention,
                                    std::string_view context,
                                    size_t k) override;

  size_t calls() const { return calls_; }

 private:
  std::map<std::string, std::vector<std::string>> mentions_;
  std::vector<std::string> index_;
  std::atomic<size_t> calls_{0};
};

}  // namespace themekg
