#include "themekg/http_providers.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "json.hpp"
#include "themekg/errors.h"
#include "themekg/text.h"

namespace themekg {

using nlohmann::json;

std::chrono::milliseconds RetryPolicy::backoff(int attempt) const {
  double ms = static_cast<double>(initial_backoff.count()) *
              std::pow(multiplier, std::max(0, attempt - 1));
  ms = std::min(ms, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

std::string env_or_empty(const char *name) {
  const char *value = std::getenv(name);
  return value == nullptr ? std::string() : std::string(value);
}

HttpClient::HttpClient(std::string provider, std::string base_url,
                       HttpOptions options)
    : provider_(std::move(provider)),
      base_url_(std::move(base_url)),
      options_(std::move(options)) {
  if (base_url_.empty()) {
    throw ProviderError(provider_, "no endpoint configured");
  }
  if (options_.retry.max_attempts < 1) options_.retry.max_attempts = 1;
}

void HttpClient::pace() {
  if (options_.min_interval.count() <= 0) return;
  std::lock_guard lock(pace_mu_);
  auto now = std::chrono::steady_clock::now();
  auto ready = last_request_ + options_.min_interval;
  if (now < ready) std::this_thread::sleep_for(ready - now);
  last_request_ = std::chrono::steady_clock::now();
}

template <typename Send>
std::string HttpClient::with_retries(const std::string &what, Send &&send) {
  std::string last_error;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    if (attempt > 1) {
      auto delay = options_.retry.backoff(attempt - 1);
      spdlog::debug("{}: retrying {} in {} ms", provider_, what, delay.count());
      std::this_thread::sleep_for(delay);
    }
    pace();
    ++requests_;
    httplib::Client client(base_url_);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    client.set_write_timeout(options_.timeout);
    client.set_follow_location(true);
    httplib::Headers headers;
    for (const auto &[k, v] : options_.headers) headers.emplace(k, v);
    httplib::Result res = send(client, headers);
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    int status = res->status;
    if (status >= 200 && status < 300) return res->body;
    last_error = "HTTP " + std::to_string(status);
    if (status == 429 || status >= 500) continue;
    throw ProviderError(provider_, what + " failed: " + last_error + ": " +
                                       res->body.substr(0, 200));
  }
  throw ProviderError(provider_,
                      what + " failed after " +
                          std::to_string(options_.retry.max_attempts) +
                          " attempts: " + last_error);
}

std::string HttpClient::get(
    const std::string &path,
    const std::vector<std::pair<std::string, std::string>> &params) {
  httplib::Params query;
  for (const auto &[k, v] : params) query.emplace(k, v);
  return with_retries("GET " + path,
                      [&](httplib::Client &client, const httplib::Headers &h) {
                        return client.Get(path, query, h);
                      });
}

std::string HttpClient::post_json(const std::string &path,
                                  const std::string &body) {
  return with_retries("POST " + path,
                      [&](httplib::Client &client, const httplib::Headers &h) {
                        return client.Post(path, h, body, "application/json");
                      });
}

namespace {

HttpOptions with_bearer(HttpOptions options, const std::string &api_key) {
  if (!api_key.empty()) {
    options.headers["Authorization"] = "Bearer " + api_key;
  }
  return options;
}

json parse_reply(const std::string &provider, const std::string &body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error &e) {
    throw ProviderError(provider, std::string("malformed JSON reply: ") +
                                      e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------

ChatCompletionLlm::ChatCompletionLlm(std::string base_url, std::string path,
                                     std::string model, std::string api_key,
                                     HttpOptions options)
    : http_("llm", std::move(base_url), with_bearer(std::move(options), api_key)),
      path_(std::move(path)),
      model_(std::move(model)) {}

std::string ChatCompletionLlm::complete(std::string_view prompt,
                                        const Decoding &decoding) {
  json request;
  request["model"] = model_;
  request["messages"] = json::array(
      {json{{"role", "user"}, {"content", std::string(prompt)}}});
  request["temperature"] = decoding.temperature;
  request["max_tokens"] = decoding.max_tokens;
  json reply = parse_reply(http_.provider(),
                           http_.post_json(path_, request.dump()));
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception &e) {
    throw ProviderError(http_.provider(),
                        std::string("unexpected reply shape: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

HttpEmbedding::HttpEmbedding(std::string base_url, std::string path,
                             std::string model, std::string api_key,
                             size_t dimension, HttpOptions options)
    : http_("embedding", std::move(base_url),
            with_bearer(std::move(options), api_key)),
      path_(std::move(path)),
      model_(std::move(model)),
      dimension_(dimension) {}

Vector HttpEmbedding::embed(std::string_view text) {
  std::string key(text);
  {
    std::shared_lock lock(mu_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  json request;
  request["model"] = model_;
  request["input"] = key;
  json reply = parse_reply(http_.provider(),
                           http_.post_json(path_, request.dump()));
  Vector v;
  try {
    v = reply.at("data").at(0).at("embedding").get<Vector>();
  } catch (const json::exception &e) {
    throw ProviderError(http_.provider(),
                        std::string("unexpected reply shape: ") + e.what());
  }
  if (dimension_ != 0 && v.size() != dimension_) {
    throw ProviderError(http_.provider(),
                        "expected dimension " + std::to_string(dimension_) +
                            ", got " + std::to_string(v.size()));
  }
  try {
    l2_normalize(v);
  } catch (const InvalidArgument &) {
    throw ProviderError(http_.provider(), "zero embedding vector");
  }
  std::unique_lock lock(mu_);
  return memo_.try_emplace(std::move(key), std::move(v)).first->second;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kCategoryPrefix = "Category:";

std::string strip_category_prefix(const std::string &title) {
  if (title.starts_with(kCategoryPrefix)) {
    return title.substr(kCategoryPrefix.size());
  }
  return title;
}

HttpOptions wiki_options(HttpOptions options) {
  if (!options.headers.count("User-Agent")) {
    options.headers["User-Agent"] = "themekg/0.1 (knowledge graph builder)";
  }
  return options;
}

}  // namespace

MediaWikiCategories::MediaWikiCategories(std::string base_url,
                                         std::string api_path,
                                         HttpOptions options)
    : http_("wiki", std::move(base_url), wiki_options(std::move(options))),
      api_path_(std::move(api_path)) {}

std::vector<std::string> MediaWikiCategories::children(
    std::string_view category) {
  std::vector<std::string> out;
  std::string self = normalize(category);
  std::vector<std::pair<std::string, std::string>> params = {
      {"action", "query"},
      {"list", "categorymembers"},
      {"cmtitle", std::string(kCategoryPrefix) + std::string(category)},
      {"cmtype", "subcat"},
      {"cmlimit", "max"},
      {"format", "json"},
      {"formatversion", "2"}};
  std::string cont;
  do {
    auto request = params;
    if (!cont.empty()) {
      request.emplace_back("cmcontinue", cont);
      request.emplace_back("continue", "-||");
    }
    json reply = parse_reply(http_.provider(), http_.get(api_path_, request));
    if (reply.contains("error")) {
      throw ProviderError(http_.provider(), reply["error"].dump());
    }
    for (const auto &member : reply["query"]["categorymembers"]) {
      std::string name = strip_category_prefix(member.value("title", ""));
      if (!name.empty() && normalize(name) != self) out.push_back(name);
    }
    cont = reply.contains("continue")
               ? reply["continue"].value("cmcontinue", "")
               : "";
  } while (!cont.empty());
  return out;
}

std::vector<std::string> MediaWikiCategories::page_categories(
    std::string_view title) {
  std::vector<std::string> out;
  std::vector<std::pair<std::string, std::string>> params = {
      {"action", "query"},         {"prop", "categories"},
      {"titles", std::string(title)}, {"clshow", "!hidden"},
      {"cllimit", "max"},          {"redirects", "1"},
      {"format", "json"},          {"formatversion", "2"}};
  std::string cont;
  do {
    auto request = params;
    if (!cont.empty()) {
      request.emplace_back("clcontinue", cont);
      request.emplace_back("continue", "||");
    }
    json reply = parse_reply(http_.provider(), http_.get(api_path_, request));
    for (const auto &page : reply["query"]["pages"]) {
      if (!page.contains("categories")) continue;
      for (const auto &c : page["categories"]) {
        out.push_back(strip_category_prefix(c.value("title", "")));
      }
    }
    cont = reply.contains("continue")
               ? reply["continue"].value("clcontinue", "")
               : "";
  } while (!cont.empty());
  return out;
}

bool MediaWikiCategories::page_exists(std::string_view title) {
  json reply = parse_reply(
      http_.provider(),
      http_.get(api_path_, {{"action", "query"},
                            {"titles", std::string(title)},
                            {"redirects", "1"},
                            {"format", "json"},
                            {"formatversion", "2"}}));
  const json &pages = reply["query"]["pages"];
  if (!pages.is_array() || pages.empty()) return false;
  const json &page = pages[0];
  return !page.contains("missing") && !page.contains("invalid");
}

bool MediaWikiCategories::category_exists(std::string_view category) {
  json reply = parse_reply(
      http_.provider(),
      http_.get(api_path_,
                {{"action", "query"},
                 {"prop", "categoryinfo"},
                 {"titles", std::string(kCategoryPrefix) + std::string(category)},
                 {"format", "json"},
                 {"formatversion", "2"}}));
  const json &pages = reply["query"]["pages"];
  if (!pages.is_array() || pages.empty()) return false;
  const json &page = pages[0];
  return page.contains("categoryinfo") || !page.contains("missing");
}

std::vector<std::string> MediaWikiCategories::search(std::string_view query,
                                                     size_t limit) {
  json reply = parse_reply(
      http_.provider(),
      http_.get(api_path_, {{"action", "query"},
                            {"list", "search"},
                            {"srsearch", std::string(query)},
                            {"srlimit", std::to_string(limit)},
                            {"format", "json"},
                            {"formatversion", "2"}}));
  std::vector<std::string> titles;
  for (const auto &hit : reply["query"]["search"]) {
    titles.push_back(hit.value("title", ""));
  }
  return titles;
}

std::vector<std::string> MediaWikiSearchRetriever::retrieve(
    std::string_view mention, std::string_view, size_t k) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto &title : wiki_.search(mention, pages_per_query_)) {
    for (const auto &category : wiki_.page_categories(title)) {
      if (out.size() >= k) return out;
      if (seen.insert(normalize(category)).second) out.push_back(category);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

HttpPosTagger::HttpPosTagger(std::string base_url, std::string path,
                             HttpOptions options)
    : http_("tagger", std::move(base_url), std::move(options)),
      path_(std::move(path)) {}

std::vector<TaggedToken> HttpPosTagger::tag(std::string_view sentence) {
  json request = {{"text", std::string(sentence)}};
  json reply = parse_reply(http_.provider(), http_.post_json(path_, request.dump()));
  std::vector<TaggedToken> out;
  try {
    for (const auto &t : reply.at("tokens")) {
      Span span{t.at("start").get<size_t>(), t.at("end").get<size_t>()};
      if (span.end > sentence.size() || span.begin > span.end) {
        throw ProviderError(http_.provider(), "token span out of bounds");
      }
      out.push_back(TaggedToken{t.at("text").get<std::string>(),
                                t.at("tag").get<std::string>(), span});
    }
  } catch (const json::exception &e) {
    throw ProviderError(http_.provider(),
                        std::string("unexpected reply shape: ") + e.what());
  }
  return out;
}

std::vector<Span> HttpPosTagger::noun_chunks(std::string_view sentence) {
  json request = {{"text", std::string(sentence)}};
  json reply = parse_reply(http_.provider(), http_.post_json(path_, request.dump()));
  std::vector<Span> out;
  try {
    for (const auto &c : reply.at("noun_chunks")) {
      Span span{c.at(0).get<size_t>(), c.at(1).get<size_t>()};
      if (span.end > sentence.size() || span.begin >= span.end ||
          (!out.empty() && span.begin < out.back().end)) {
        throw ProviderError(http_.provider(), "invalid noun chunk span");
      }
      out.push_back(span);
    }
  } catch (const json::exception &e) {
    throw ProviderError(http_.provider(),
                        std::string("unexpected reply shape: ") + e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------

HttpContextTyping::HttpContextTyping(std::string base_url, std::string path,
                                     HttpOptions options)
    : http_("typing", std::move(base_url), std::move(options)),
      path_(std::move(path)) {}

double HttpContextTyping::consistency(std::string_view entity,
                                      std::string_view context,
                                      std::string_view category) {
  json request = {{"entity", std::string(entity)},
                  {"context", std::string(context)},
                  {"category", std::string(category)}};
  json reply = parse_reply(http_.provider(), http_.post_json(path_, request.dump()));
  double score;
  try {
    score = reply.at("score").get<double>();
  } catch (const json::exception &e) {
    throw ProviderError(http_.provider(),
                        std::string("unexpected reply shape: ") + e.what());
  }
  return std::clamp(score, 0.0, 1.0);
}

}  // namespace themekg
