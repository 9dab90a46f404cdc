#include "themekg/relation_ontology.h"

#include <algorithm>
#include <mutex>
#include <set>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "themekg/errors.h"
#include "themekg/parallel.h"
#include "themekg/text.h"

namespace themekg {

using nlohmann::json;

std::string_view to_string(PhraseProvenance p) {
  return p == PhraseProvenance::kGenerated ? "generated" : "enriched";
}

PhraseProvenance phrase_provenance_from_string(std::string_view s) {
  if (s == "generated") return PhraseProvenance::kGenerated;
  if (s == "enriched") return PhraseProvenance::kEnriched;
  throw InvalidArgument("unknown phrase provenance: " + std::string(s));
}

RelationOntology::RelationOntology(const RelationOntology &other) {
  std::shared_lock lock(other.mu_);
  slots_ = other.slots_;
}

RelationOntology &RelationOntology::operator=(const RelationOntology &other) {
  if (this == &other) return *this;
  std::map<std::string, Slot> copy;
  {
    std::shared_lock lock(other.mu_);
    copy = other.slots_;
  }
  std::unique_lock lock(mu_);
  slots_ = std::move(copy);
  return *this;
}

std::string RelationOntology::key(std::string_view c1, std::string_view c2) {
  return normalize(c1) + "||" + normalize(c2);
}

bool RelationOntology::has_entry(std::string_view c1,
                                 std::string_view c2) const {
  std::shared_lock lock(mu_);
  return slots_.count(key(c1, c2)) > 0;
}

std::vector<RelationEntry> RelationOntology::entry(std::string_view c1,
                                                   std::string_view c2) const {
  std::shared_lock lock(mu_);
  auto it = slots_.find(key(c1, c2));
  if (it == slots_.end()) return {};
  return it->second.phrases;
}

namespace {

bool holds(const std::vector<RelationEntry> &entries,
           const RelationPhrase &phrase) {
  return std::any_of(entries.begin(), entries.end(),
                     [&](const RelationEntry &e) { return e.phrase == phrase; });
}

}  // namespace

void RelationOntology::record_generated(
    std::string_view c1, std::string_view c2,
    const std::vector<RelationPhrase> &phrases) {
  std::unique_lock lock(mu_);
  auto [it, fresh] = slots_.try_emplace(key(c1, c2));
  if (fresh) {
    it->second.c1 = std::string(c1);
    it->second.c2 = std::string(c2);
  }
  for (const auto &p : phrases) {
    if (p.is_none()) continue;
    if (!holds(it->second.phrases, p)) {
      it->second.phrases.push_back({p, PhraseProvenance::kGenerated});
    }
  }
}

bool RelationOntology::add(std::string_view c1, std::string_view c2,
                           const RelationPhrase &phrase,
                           PhraseProvenance provenance) {
  if (phrase.is_none()) {
    throw InvalidArgument("the none sentinel cannot be stored as a relation");
  }
  std::unique_lock lock(mu_);
  auto [it, fresh] = slots_.try_emplace(key(c1, c2));
  if (fresh) {
    it->second.c1 = std::string(c1);
    it->second.c2 = std::string(c2);
  }
  if (holds(it->second.phrases, phrase)) return false;
  it->second.phrases.push_back({phrase, provenance});
  return true;
}

std::vector<std::pair<std::string, std::string>> RelationOntology::pairs()
    const {
  std::shared_lock lock(mu_);
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto &[k, slot] : slots_) out.emplace_back(slot.c1, slot.c2);
  return out;
}

size_t RelationOntology::size() const {
  std::shared_lock lock(mu_);
  return slots_.size();
}

bool RelationOntology::operator==(const RelationOntology &other) const {
  if (this == &other) return true;
  std::shared_lock a(mu_);
  std::shared_lock b(other.mu_);
  if (slots_.size() != other.slots_.size()) return false;
  for (auto i = slots_.begin(), j = other.slots_.begin(); i != slots_.end();
       ++i, ++j) {
    if (i->first != j->first) return false;
    const auto &x = i->second.phrases;
    const auto &y = j->second.phrases;
    if (x.size() != y.size()) return false;
    for (size_t n = 0; n < x.size(); ++n) {
      if (!(x[n].phrase == y[n].phrase) || x[n].provenance != y[n].provenance) {
        return false;
      }
    }
  }
  return true;
}

std::string relation_generation_prompt(std::string_view theme,
                                       std::string_view c1,
                                       std::string_view c2) {
  std::string p = "Given the theme ";
  p += theme;
  p += ", what are the possible relations from ";
  p += c1;
  p += " to ";
  p += c2;
  p += "? List Answers in the format: (";
  p += c1;
  p += ", ___ , ";
  p += c2;
  p += ")";
  return p;
}

std::vector<RelationPhrase> parse_relation_lines(std::string_view raw,
                                                 std::string_view c1,
                                                 std::string_view c2,
                                                 const StopRelations &stop) {
  std::vector<RelationPhrase> out;
  std::set<std::string> seen;
  for (const auto &line : split_lines(raw)) {
    auto groups = paren_groups(line);
    if (groups.empty()) {
      if (!trim(line).empty()) spdlog::debug("relation parser: skip '{}'", line);
      continue;
    }
    for (auto inner : groups) {
      auto fields = split_triple_fields(inner);
      if (!fields) continue;
      if (!category_names_match(fields->first, c1) ||
          !category_names_match(fields->last, c2)) {
        continue;
      }
      auto phrase = RelationPhrase::parse(fields->middle, stop);
      if (!phrase) continue;
      if (seen.insert(phrase->normalized()).second) out.push_back(*phrase);
    }
  }
  return out;
}

RelationGenerator::RelationGenerator(LlmProvider &llm, Theme theme,
                                     StopRelations stop, Decoding decoding)
    : llm_(llm),
      theme_(std::move(theme)),
      stop_(std::move(stop)),
      decoding_(decoding) {}

std::vector<RelationPhrase> RelationGenerator::generate(RelationOntology &ro,
                                                        const std::string &c1,
                                                        const std::string &c2) {
  auto ask = [&](const std::string &a, const std::string &b) {
    std::string reply =
        llm_.complete(relation_generation_prompt(theme_.name, a, b), decoding_);
    auto phrases = parse_relation_lines(reply, a, b, stop_);
    if (phrases.empty()) {
      spdlog::debug("relation ontology: no candidates for ({}, {})", a, b);
    }
    ro.record_generated(a, b, phrases);
    return phrases;
  };
  auto forward = ask(c1, c2);
  if (normalize(c1) != normalize(c2)) ask(c2, c1);
  return forward;
}

void RelationGenerator::ensure(RelationOntology &ro, const std::string &c1,
                               const std::string &c2) {
  if (ro.has_entry(c1, c2)) return;
  // Both directions are generated together, so they share one key.
  std::string a = normalize(c1);
  std::string b = normalize(c2);
  if (b < a) std::swap(a, b);
  flight_.run(a + "||" + b, [&] {
    if (!ro.has_entry(c1, c2)) generate(ro, c1, c2);
    return true;
  });
}

void generate_all_pairs(RelationOntology &ro, const EntityOntology &eo,
                        RelationGenerator &generator, size_t workers) {
  auto cats = eo.categories();
  std::vector<std::pair<std::string, std::string>> todo;
  for (size_t i = 0; i < cats.size(); ++i) {
    for (size_t j = i; j < cats.size(); ++j) {
      const auto &a = cats[i].name;
      const auto &b = cats[j].name;
      if (!ro.has_entry(a, b) || !ro.has_entry(b, a)) todo.emplace_back(a, b);
    }
  }
  spdlog::info("relation ontology: generating {} category pairs", todo.size());
  parallel_map<int>(todo.size(), workers, [&](size_t i) {
    generator.generate(ro, todo[i].first, todo[i].second);
    return 0;
  });
}

std::vector<RelationPhrase> retrieve_candidates(RelationOntology &ro,
                                                const EntityOntology &eo,
                                                const std::string &c1,
                                                const std::string &c2,
                                                RelationGenerator *generator,
                                                size_t parent_levels) {
  auto e1 = eo.find(c1);
  auto e2 = eo.find(c2);
  if (!e1) throw NotFound("category not in ontology: " + c1);
  if (!e2) throw NotFound("category not in ontology: " + c2);
  std::vector<std::string> left{*e1};
  std::vector<std::string> right{*e2};
  for (auto &a : eo.ancestors(*e1, parent_levels)) left.push_back(a);
  for (auto &a : eo.ancestors(*e2, parent_levels)) right.push_back(a);

  std::vector<std::vector<RelationEntry>> entries;
  for (const auto &a : left) {
    for (const auto &b : right) {
      if (generator) generator->ensure(ro, a, b);
      entries.push_back(ro.entry(a, b));
    }
  }
  // Generated phrases first, enriched ones after, none last.
  std::vector<RelationPhrase> out;
  std::set<std::string> seen;
  for (auto wanted : {PhraseProvenance::kGenerated, PhraseProvenance::kEnriched}) {
    for (const auto &list : entries) {
      for (const auto &e : list) {
        if (e.provenance != wanted) continue;
        if (seen.insert(e.phrase.normalized()).second) out.push_back(e.phrase);
      }
    }
  }
  out.emplace_back(std::string(kNoneRelation));
  return out;
}

bool enrich(RelationOntology &ro, std::string_view c1, std::string_view c2,
            const RelationPhrase &phrase) {
  return ro.add(c1, c2, phrase, PhraseProvenance::kEnriched);
}

std::string relation_ontology_to_json(const RelationOntology &ro) {
  json j = json::object();
  for (const auto &[c1, c2] : ro.pairs()) {
    json list = json::array();
    for (const auto &e : ro.entry(c1, c2)) {
      list.push_back({{"phrase", e.phrase.text()},
                      {"provenance", std::string(to_string(e.provenance))}});
    }
    j[c1 + "||" + c2] = std::move(list);
  }
  return j.dump(2) + "\n";
}

RelationOntology relation_ontology_from_json(std::string_view text) {
  RelationOntology ro;
  try {
    json j = json::parse(text);
    for (const auto &[k, list] : j.items()) {
      auto sep = k.find("||");
      if (sep == std::string::npos) {
        throw ParseError("relation ontology key without '||': " + k);
      }
      std::string c1 = k.substr(0, sep);
      std::string c2 = k.substr(sep + 2);
      ro.record_generated(c1, c2, {});
      for (const auto &item : list) {
        ro.add(c1, c2, RelationPhrase(item.at("phrase").get<std::string>()),
               phrase_provenance_from_string(
                   item.at("provenance").get<std::string>()));
      }
    }
  } catch (const json::exception &e) {
    throw ParseError(std::string("relation ontology: ") + e.what());
  }
  return ro;
}

}  // namespace themekg
