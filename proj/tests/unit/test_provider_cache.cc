#include "doctest.h"

#include <filesystem>
#include <thread>

#include "support/evb_fixture.h"
#include "themekg/errors.h"
#include "themekg/provider_cache.h"
#include "themekg/text.h"

using namespace themekg;
using namespace themekg::testing;

namespace {

struct CountingLlm : LlmProvider {
  size_t calls = 0;
  std::string id() const override { return "counting"; }
  std::string complete(std::string_view prompt, const Decoding &) override {
    ++calls;
    return "reply to " + std::string(prompt);
  }
};

size_t files_under(const std::filesystem::path &dir) {
  size_t n = 0;
  for (const auto &e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("keys depend on provider and payload") {
  CHECK(ProviderCache::key("a", "x") == ProviderCache::key("a", "x"));
  CHECK(ProviderCache::key("a", "x") != ProviderCache::key("b", "x"));
  CHECK(ProviderCache::key("a", "x") != ProviderCache::key("a", "y"));
  // The separator keeps ("ab", "c") and ("a", "bc") apart.
  CHECK(ProviderCache::key("ab", "c") != ProviderCache::key("a", "bc"));
  CHECK(ProviderCache::key("a", "x").size() == 64);
}

TEST_CASE("memory cache counts hits and misses per provider") {
  ProviderCache cache;
  CountingLlm inner;
  CachedLlm llm(inner, cache);
  CHECK(llm.complete("p") == "reply to p");
  CHECK(llm.complete("p") == "reply to p");
  CHECK(llm.complete("q") == "reply to q");
  CHECK(inner.calls == 2);
  auto s = cache.stats().at("llm:counting");
  CHECK(s.hits == 1);
  CHECK(s.misses == 2);
  CHECK(llm.id() == "counting");
}

TEST_CASE("decoding settings are part of the llm request") {
  ProviderCache cache;
  CountingLlm inner;
  CachedLlm llm(inner, cache);
  llm.complete("p", Decoding{0.0, 512});
  llm.complete("p", Decoding{0.7, 512});
  CHECK(inner.calls == 2);
}

TEST_CASE("disk cache survives a new instance and replays exactly") {
  auto dir = scratch_dir("cache_disk");
  MockEmbedding embedder;
  Vector fresh;
  {
    ProviderCache cache(dir);
    CountingLlm inner;
    CachedLlm llm(inner, cache);
    llm.complete("hello");
    CachedEmbedding emb(embedder, cache);
    fresh = emb.embed("deep cycle batteries");
    CHECK(fresh == embedder.embed("deep cycle batteries"));
  }
  CHECK(files_under(dir) == 2);

  ProviderCache replay(dir, CacheMode::kReplay);
  CountingLlm inner;
  CachedLlm llm(inner, replay);
  CHECK(llm.complete("hello") == "reply to hello");
  CHECK(inner.calls == 0);
  CachedEmbedding emb(embedder, replay);
  CHECK(emb.embed("deep cycle batteries") == fresh);  // bit-identical

  CHECK_THROWS_AS(llm.complete("unseen"), ProviderError);
  CHECK(inner.calls == 0);
  CHECK(replay.stats().at("llm:counting").misses == 1);
}

TEST_CASE("every cached provider round-trips its values") {
  EvbFixture fx;
  auto dir = scratch_dir("cache_all");
  auto check = [&](ProviderCache &cache) {
    CachedWiki wiki(*fx.wiki, cache);
    CHECK(wiki.children("Batteries") == fx.wiki->children("Batteries"));
    CHECK(wiki.page_categories("golf carts") == fx.wiki->page_categories("golf carts"));
    CHECK(wiki.page_exists("forklifts"));
    CHECK_FALSE(wiki.page_exists("no such page"));
    CHECK(wiki.category_exists("Electric power"));

    CachedTagger tagger(fx.tagger, cache);
    std::string s = "Golf carts are powered by deep cycle batteries.";
    auto a = tagger.tag(s);
    auto b = fx.tagger.tag(s);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].text == b[i].text);
      CHECK(a[i].tag == b[i].tag);
      CHECK(a[i].span == b[i].span);
    }
    CHECK(tagger.noun_chunks(s) == fx.tagger.noun_chunks(s));

    CachedContextTyping typing(fx.context_typing, cache);
    CHECK(typing.consistency("golf carts", "ctx", "Electric vehicles") ==
          fx.context_typing.consistency("golf carts", "ctx", "Electric vehicles"));

    CachedRetriever retriever(*fx.retriever, cache);
    CHECK(retriever.retrieve("continuous electricity", "ctx", 5) ==
          fx.retriever->retrieve("continuous electricity", "ctx", 5));
  };
  {
    ProviderCache cache(dir);
    check(cache);
  }
  ProviderCache replay(dir, CacheMode::kReplay);
  check(replay);
  for (const auto &[provider, s] : replay.stats()) {
    INFO(provider);
    CHECK(s.misses == 0);
  }
}

TEST_CASE("corrupt entries and bad modes are reported") {
  auto dir = scratch_dir("cache_corrupt");
  {
    ProviderCache cache(dir);
    cache.put("p", "x", "v");
  }
  for (const auto &e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) write_file(e.path().string(), "{not json");
  }
  ProviderCache cache(dir);
  CHECK_THROWS_AS(cache.get("p", "x"), ParseError);
  CHECK(cache_mode_from_string("replay") == CacheMode::kReplay);
  CHECK_THROWS_AS(cache_mode_from_string("sometimes"), InvalidArgument);
}

TEST_CASE("concurrent embeds of one text make a single cache lookup") {
  ProviderCache cache;
  MockEmbedding embedder;
  for (int round = 0; round < 20; ++round) {
    CachedEmbedding emb(embedder, cache);
    std::string text = "text " + std::to_string(round);
    std::vector<std::jthread> pool;
    for (int t = 0; t < 8; ++t) pool.emplace_back([&] { emb.embed(text); });
  }
  auto s = cache.stats().at("embed:mock-embedding");
  CHECK(s.misses == 20);
  CHECK(s.hits == 0);
}
