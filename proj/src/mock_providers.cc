#include "themekg/mock_providers.h"

#include <algorithm>
#include <cmath>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "themekg/errors.h"
#include "themekg/hashing.h"
#include "themekg/text.h"

namespace themekg {

using nlohmann::json;

MockEmbedding::MockEmbedding(size_t dimension,
                             std::map<std::string, std::string> synonyms)
    : dimension_(dimension) {
  if (dimension == 0) throw InvalidArgument("embedding dimension must be > 0");
  for (auto &[from, to] : synonyms) {
    for (const auto &token : content_tokens(from)) synonyms_[token] = to;
  }
}

Vector MockEmbedding::token_direction(std::string_view token,
                                      size_t dimension) {
  uint64_t state = fnv1a64(token);
  Vector v(dimension);
  for (size_t i = 0; i < dimension; ++i) {
    uint64_t bits = splitmix64(state) >> 11;
    v[i] = static_cast<double>(bits) * 0x1.0p-53 * 2.0 - 1.0;
  }
  l2_normalize(v);
  return v;
}

std::vector<std::string> MockEmbedding::tokens(std::string_view text) const {
  std::vector<std::string> out;
  for (auto &token : content_tokens(text)) {
    auto it = synonyms_.find(token);
    if (it == synonyms_.end()) {
      out.push_back(std::move(token));
      continue;
    }
    for (auto &replacement : content_tokens(it->second)) {
      out.push_back(std::move(replacement));
    }
  }
  return out;
}

Vector MockEmbedding::embed(std::string_view text) {
  std::string key(text);
  {
    std::shared_lock lock(mu_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  std::vector<std::string> toks = tokens(text);
  if (toks.empty()) {
    throw InvalidArgument("cannot embed text without tokens: '" + key + "'");
  }
  Vector sum(dimension_, 0.0);
  for (const auto &token : toks) {
    Vector d = token_direction(token, dimension_);
    for (size_t i = 0; i < dimension_; ++i) sum[i] += d[i];
  }
  l2_normalize(sum);
  std::unique_lock lock(mu_);
  return memo_.try_emplace(std::move(key), std::move(sum)).first->second;
}

// ---------------------------------------------------------------------------

std::unique_ptr<ScriptedLlm> ScriptedLlm::from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("LLM script: ") + e.what());
  }
  auto llm = std::make_unique<ScriptedLlm>();
  const json &entries = j.is_array() ? j : j.at("responses");
  for (const auto &entry : entries) {
    std::string response = entry.at("response").get<std::string>();
    if (entry.contains("prompt")) {
      llm->add_exact(entry["prompt"].get<std::string>(), std::move(response));
    } else if (entry.contains("contains")) {
      const json &c = entry["contains"];
      std::vector<std::string> needles;
      if (c.is_string()) {
        needles.push_back(c.get<std::string>());
      } else {
        needles = c.get<std::vector<std::string>>();
      }
      llm->add_contains(std::move(needles), std::move(response));
    } else if (entry.contains("pattern")) {
      llm->add_pattern(entry["pattern"].get<std::string>(), std::move(response));
    } else {
      throw ParseError("LLM script entry needs prompt, contains or pattern");
    }
  }
  return llm;
}

std::unique_ptr<ScriptedLlm> ScriptedLlm::from_file(const std::string &path) {
  return from_json_text(read_file(path));
}

void ScriptedLlm::add_exact(std::string prompt, std::string response) {
  std::lock_guard lock(mu_);
  exact_[sha256_hex(prompt)] = std::move(response);
}

void ScriptedLlm::add_contains(std::vector<std::string> needles,
                               std::string response) {
  std::lock_guard lock(mu_);
  rules_.push_back(Rule{std::move(needles), std::nullopt, std::move(response)});
}

void ScriptedLlm::add_pattern(const std::string &pattern,
                              std::string response) {
  std::lock_guard lock(mu_);
  rules_.push_back(Rule{{}, std::regex(pattern, std::regex::ECMAScript),
                        std::move(response)});
}

std::string ScriptedLlm::complete(std::string_view prompt, const Decoding &) {
  std::lock_guard lock(mu_);
  ++calls_;
  std::string fingerprint = sha256_hex(prompt);
  if (auto it = exact_.find(fingerprint); it != exact_.end()) {
    return it->second;
  }
  std::string p(prompt);
  for (const auto &rule : rules_) {
    if (rule.pattern) {
      std::smatch m;
      if (std::regex_match(p, m, *rule.pattern)) {
        return m.format(rule.response);
      }
      continue;
    }
    bool all = std::all_of(
        rule.contains.begin(), rule.contains.end(),
        [&](const std::string &needle) { return p.find(needle) != p.npos; });
    if (all) return rule.response;
  }
  throw ProviderError(id(), "no scripted response for prompt " +
                                fingerprint.substr(0, 12) + ": " +
                                p.substr(0, 160));
}

size_t ScriptedLlm::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

// ---------------------------------------------------------------------------

std::unique_ptr<FixtureWiki> FixtureWiki::from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("wiki fixture: ") + e.what());
  }
  auto wiki = std::make_unique<FixtureWiki>();
  if (j.contains("categories")) {
    for (const auto &[name, children] : j["categories"].items()) {
      wiki->add_children(name, children.get<std::vector<std::string>>());
    }
  }
  if (j.contains("pages")) {
    for (const auto &[title, categories] : j["pages"].items()) {
      wiki->add_page(title, categories.get<std::vector<std::string>>());
    }
  }
  return wiki;
}

std::unique_ptr<FixtureWiki> FixtureWiki::from_file(const std::string &path) {
  return from_json_text(read_file(path));
}

void FixtureWiki::add_children(const std::string &category,
                               const std::vector<std::string> &children) {
  auto &entry = categories_[normalize(category)];
  entry.first = category;
  for (const auto &child : children) {
    entry.second.push_back(child);
    known_.insert(normalize(child));
  }
  known_.insert(normalize(category));
}

void FixtureWiki::add_page(const std::string &title,
                           const std::vector<std::string> &categories) {
  pages_[normalize(title)] = categories;
}

std::vector<std::string> FixtureWiki::children(std::string_view category) {
  ++calls_;
  std::string key = normalize(category);
  if (!known_.count(key)) {
    throw NotFound("unknown category: " + std::string(category));
  }
  std::vector<std::string> out;
  auto it = categories_.find(key);
  if (it == categories_.end()) return out;
  for (const auto &child : it->second.second) {
    if (normalize(child) != key) out.push_back(child);
  }
  return out;
}

std::vector<std::string> FixtureWiki::page_categories(std::string_view title) {
  ++calls_;
  auto it = pages_.find(normalize(title));
  if (it == pages_.end()) return {};
  return it->second;
}

bool FixtureWiki::page_exists(std::string_view title) {
  ++calls_;
  return pages_.count(normalize(title)) > 0;
}

bool FixtureWiki::category_exists(std::string_view category) {
  ++calls_;
  return known_.count(normalize(category)) > 0;
}

// ---------------------------------------------------------------------------

double OverlapContextTyping::consistency(std::string_view entity,
                                         std::string_view context,
                                         std::string_view category) {
  std::vector<std::string> cat = content_tokens(category);
  if (cat.empty()) return 0.0;
  std::vector<std::string> ent = content_tokens(entity);
  std::vector<std::string> ctx = content_tokens(context);
  std::set<std::string> ent_set(ent.begin(), ent.end());
  std::set<std::string> ctx_set(ctx.begin(), ctx.end());
  double in_entity = 0.0;
  double in_context = 0.0;
  for (const auto &t : cat) {
    if (ent_set.count(t)) in_entity += 1.0;
    if (ctx_set.count(t)) in_context += 1.0;
  }
  double n = static_cast<double>(cat.size());
  return 0.7 * (in_entity / n) + 0.3 * (in_context / n);
}

// ---------------------------------------------------------------------------

std::unique_ptr<FixtureRetriever> FixtureRetriever::from_json_text(
    std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("retriever fixture: ") + e.what());
  }
  auto retriever = std::make_unique<FixtureRetriever>();
  if (j.contains("mentions")) {
    for (const auto &[mention, categories] : j["mentions"].items()) {
      retriever->add_mention(mention,
                             categories.get<std::vector<std::string>>());
    }
  }
  if (j.contains("index")) {
    for (const auto &category : j["index"]) {
      retriever->add_index(category.get<std::string>());
    }
  }
  return retriever;
}

std::unique_ptr<FixtureRetriever> FixtureRetriever::from_file(
    const std::string &path) {
  return from_json_text(read_file(path));
}

void FixtureRetriever::add_mention(const std::string &mention,
                                   const std::vector<std::string> &categories) {
  mentions_[normalize(mention)] = categories;
}

void FixtureRetriever::add_index(const std::string &category) {
  index_.push_back(category);
}

std::vector<std::string> FixtureRetriever::retrieve(std::string_view mention,
                                                    std::string_view,
                                                    size_t k) {
  ++calls_;
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto push = [&](const std::string &category) {
    if (out.size() < k && seen.insert(normalize(category)).second) {
      out.push_back(category);
    }
  };
  if (auto it = mentions_.find(normalize(mention)); it != mentions_.end()) {
    for (const auto &c : it->second) push(c);
    return out;
  }
  std::vector<std::string> m = content_tokens(mention);
  std::set<std::string> mention_tokens(m.begin(), m.end());
  std::vector<std::pair<size_t, std::string>> scored;
  for (const auto &category : index_) {
    size_t overlap = 0;
    for (const auto &t : content_tokens(category)) {
      overlap += mention_tokens.count(t);
    }
    if (overlap > 0) scored.emplace_back(overlap, category);
  }
  std::stable_sort(scored.begin(), scored.end(), [](const auto &a, const auto &b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (const auto &[score, category] : scored) push(category);
  return out;
}

}  // namespace themekg
