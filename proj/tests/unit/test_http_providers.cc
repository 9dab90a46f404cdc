#include "doctest.h"

#include <atomic>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "themekg/errors.h"
#include "themekg/http_providers.h"

using namespace themekg;
using nlohmann::json;

namespace {

// Local server on an ephemeral port, stopped on scope exit.
struct LocalServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
  ~LocalServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

HttpOptions fast() {
  HttpOptions o;
  o.timeout = std::chrono::seconds(5);
  o.retry.initial_backoff = std::chrono::milliseconds(1);
  o.retry.max_backoff = std::chrono::milliseconds(5);
  return o;
}

}  // namespace

TEST_CASE("backoff grows geometrically up to the cap") {
  RetryPolicy r;
  CHECK(r.backoff(1).count() == 500);
  CHECK(r.backoff(2).count() == 1000);
  CHECK(r.backoff(3).count() == 2000);
  CHECK(r.backoff(10).count() == 8000);
}

TEST_CASE("chat completion sends model, prompt, decoding and the bearer key") {
  LocalServer s;
  json seen;
  std::string auth;
  s.server.Post("/v1/chat", [&](const httplib::Request &req, httplib::Response &res) {
    seen = json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"j({"choices":[{"message":{"role":"assistant","content":"(a, use, b)"}}]})j",
                    "application/json");
  });
  s.start();
  ChatCompletionLlm llm(s.url(), "/v1/chat", "m1", "sekret", fast());
  CHECK(llm.complete("hi", Decoding{0.0, 64}) == "(a, use, b)");
  CHECK(seen["model"] == "m1");
  CHECK(seen["messages"][0]["content"] == "hi");
  CHECK(seen["temperature"] == 0.0);
  CHECK(seen["max_tokens"] == 64);
  CHECK(auth == "Bearer sekret");
  CHECK(llm.id() == "chat:m1");
}

TEST_CASE("429 and 5xx are retried, other 4xx fail at once") {
  LocalServer s;
  std::atomic<int> flaky{0};
  std::atomic<int> bad{0};
  s.server.Post("/flaky", [&](const httplib::Request &, httplib::Response &res) {
    int n = ++flaky;
    if (n == 1) {
      res.status = 503;
    } else if (n == 2) {
      res.status = 429;
    } else {
      res.set_content(R"j({"choices":[{"message":{"content":"ok"}}]})j", "application/json");
    }
  });
  s.server.Post("/bad", [&](const httplib::Request &, httplib::Response &res) {
    ++bad;
    res.status = 400;
    res.set_content("nope", "text/plain");
  });
  s.server.Post("/down", [&](const httplib::Request &, httplib::Response &res) {
    res.status = 500;
  });
  s.start();
  ChatCompletionLlm ok(s.url(), "/flaky", "m", "", fast());
  CHECK(ok.complete("x") == "ok");
  CHECK(flaky == 3);

  ChatCompletionLlm four(s.url(), "/bad", "m", "", fast());
  CHECK_THROWS_AS(four.complete("x"), ProviderError);
  CHECK(bad == 1);

  ChatCompletionLlm down(s.url(), "/down", "m", "", fast());
  try {
    down.complete("x");
    FAIL("expected ProviderError");
  } catch (const ProviderError &e) {
    CHECK(std::string(e.what()).find("4 attempts") != std::string::npos);
  }
}

TEST_CASE("unreachable endpoints and malformed replies are provider errors") {
  LocalServer s;
  s.server.Post("/junk", [](const httplib::Request &, httplib::Response &res) {
    res.set_content("<html>", "text/html");
  });
  s.server.Post("/shape", [](const httplib::Request &, httplib::Response &res) {
    res.set_content(R"j({"choices":[]})j", "application/json");
  });
  s.start();
  CHECK_THROWS_AS(ChatCompletionLlm(s.url(), "/junk", "m", "", fast()).complete("x"),
                  ProviderError);
  CHECK_THROWS_AS(ChatCompletionLlm(s.url(), "/shape", "m", "", fast()).complete("x"),
                  ProviderError);
  auto o = fast();
  o.retry.max_attempts = 1;
  o.timeout = std::chrono::seconds(1);
  CHECK_THROWS_AS(ChatCompletionLlm("http://127.0.0.1:1", "/v", "m", "", o).complete("x"),
                  ProviderError);
  CHECK_THROWS_AS(ChatCompletionLlm("", "/v", "m", "", o), ProviderError);
}

TEST_CASE("http embedding normalizes, memoizes and checks the dimension") {
  LocalServer s;
  std::atomic<int> calls{0};
  s.server.Post("/emb", [&](const httplib::Request &req, httplib::Response &res) {
    ++calls;
    auto in = json::parse(req.body)["input"].get<std::string>();
    json v = in == "zero" ? json::array({0.0, 0.0}) : json::array({3.0, 4.0});
    res.set_content(json{{"data", {{{"embedding", v}}}}}.dump(), "application/json");
  });
  s.start();
  HttpEmbedding emb(s.url(), "/emb", "e", "", 2, fast());
  auto v = emb.embed("a");
  CHECK(v[0] == doctest::Approx(0.6));
  CHECK(v[1] == doctest::Approx(0.8));
  emb.embed("a");
  CHECK(calls == 1);
  CHECK_THROWS_AS(emb.embed("zero"), ProviderError);
  HttpEmbedding wrong(s.url(), "/emb", "e", "", 3, fast());
  CHECK_THROWS_AS(wrong.embed("a"), ProviderError);
}

TEST_CASE("mediawiki children follow continuation and drop the category itself") {
  LocalServer s;
  std::atomic<int> calls{0};
  s.server.Get("/w/api.php", [&](const httplib::Request &req, httplib::Response &res) {
    ++calls;
    CHECK(req.get_param_value("action") == "query");
    CHECK_FALSE(req.get_header_value("User-Agent").empty());
    if (req.get_param_value("list") == "categorymembers") {
      CHECK(req.get_param_value("cmtitle") == "Category:Batteries");
      if (!req.has_param("cmcontinue")) {
        res.set_content(R"j({"continue":{"cmcontinue":"page2","continue":"-||"},
          "query":{"categorymembers":[{"title":"Category:Rechargeable batteries"},
                                       {"title":"Category:Batteries"}]}})j",
                        "application/json");
      } else {
        CHECK(req.get_param_value("cmcontinue") == "page2");
        res.set_content(R"j({"query":{"categorymembers":[{"title":"Category:Battery chargers"}]}})j",
                        "application/json");
      }
      return;
    }
    if (req.get_param_value("prop") == "categories") {
      if (!req.has_param("clcontinue")) {
        res.set_content(R"j({"continue":{"clcontinue":"x|y","continue":"||"},
          "query":{"pages":[{"title":"Golf cart","categories":[{"title":"Category:Electric vehicles"}]}]}})j",
                        "application/json");
      } else {
        res.set_content(R"j({"query":{"pages":[{"title":"Golf cart","categories":[{"title":"Category:Golf equipment"}]}]}})j",
                        "application/json");
      }
      return;
    }
    if (req.get_param_value("prop") == "categoryinfo") {
      res.set_content(R"j({"query":{"pages":[{"title":"Category:X","categoryinfo":{"size":3}}]}})j",
                      "application/json");
      return;
    }
    if (req.get_param_value("list") == "search") {
      res.set_content(R"j({"query":{"search":[{"title":"Golf cart"}]}})j", "application/json");
      return;
    }
    if (req.get_param_value("titles") == "Nowhere") {
      res.set_content(R"j({"query":{"pages":[{"title":"Nowhere","missing":true}]}})j",
                      "application/json");
    } else {
      res.set_content(R"j({"query":{"pages":[{"title":"Golf cart","pageid":7}]}})j",
                      "application/json");
    }
  });
  s.start();
  MediaWikiCategories wiki(s.url(), "/w/api.php", fast());
  CHECK(wiki.children("Batteries") ==
        std::vector<std::string>{"Rechargeable batteries", "Battery chargers"});
  CHECK(wiki.page_categories("Golf cart") ==
        std::vector<std::string>{"Electric vehicles", "Golf equipment"});
  CHECK(wiki.page_exists("Golf cart"));
  CHECK_FALSE(wiki.page_exists("Nowhere"));
  CHECK(wiki.category_exists("X"));
  MediaWikiSearchRetriever retriever(wiki);
  CHECK(retriever.retrieve("golf carts", "", 1) == std::vector<std::string>{"Electric vehicles"});
  CHECK(retriever.retrieve("golf carts", "", 10).size() == 2);
}

TEST_CASE("tagger and typing services") {
  LocalServer s;
  s.server.Post("/tag", [](const httplib::Request &, httplib::Response &res) {
    res.set_content(R"j({"tokens":[{"text":"golf","tag":"NN","start":0,"end":4},
                                   {"text":"carts","tag":"NNS","start":5,"end":10}],
                        "noun_chunks":[[0,10]]})j",
                    "application/json");
  });
  s.server.Post("/badtag", [](const httplib::Request &, httplib::Response &res) {
    res.set_content(R"j({"tokens":[],"noun_chunks":[[0,99]]})j", "application/json");
  });
  s.server.Post("/type", [](const httplib::Request &req, httplib::Response &res) {
    auto j = json::parse(req.body);
    CHECK(j["category"] == "Electric vehicles");
    res.set_content(R"j({"score": 1.7})j", "application/json");
  });
  s.start();
  HttpPosTagger tagger(s.url(), "/tag", fast());
  auto toks = tagger.tag("golf carts");
  REQUIRE(toks.size() == 2);
  CHECK(toks[1].tag == "NNS");
  CHECK(tagger.noun_chunks("golf carts") == std::vector<Span>{{0, 10}});
  HttpPosTagger bad(s.url(), "/badtag", fast());
  CHECK_THROWS_AS(bad.noun_chunks("golf carts"), ProviderError);
  HttpContextTyping typing(s.url(), "/type", fast());
  CHECK(typing.consistency("golf carts", "ctx", "Electric vehicles") == 1.0);
}

TEST_CASE("min_interval spaces out requests") {
  LocalServer s;
  s.server.Post("/c", [](const httplib::Request &, httplib::Response &res) {
    res.set_content(R"j({"choices":[{"message":{"content":"ok"}}]})j", "application/json");
  });
  s.start();
  auto o = fast();
  o.min_interval = std::chrono::milliseconds(40);
  ChatCompletionLlm llm(s.url(), "/c", "m", "", o);
  auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 3; ++i) llm.complete("x");
  CHECK(std::chrono::steady_clock::now() - t0 >= std::chrono::milliseconds(80));
}
