#include "themekg/graph.h"

#include <algorithm>
#include <set>
#include <tuple>

#include "json.hpp"
#include <spdlog/spdlog.h>

#include "themekg/errors.h"
#include "themekg/text.h"

namespace themekg {

using nlohmann::json;

TripleKey TripleKey::of(const Triple &t) {
  return TripleKey{normalize(t.head), t.relation.normalized(),
                   normalize(t.tail)};
}

namespace {

auto occurrence_tie(const Triple &t) {
  return std::tie(t.provenance, t.head, t.relation.text(), t.tail,
                  t.head_category, t.tail_category, t.source);
}

void insert_occurrence(std::vector<Triple> &list, Triple t) {
  auto it = std::lower_bound(list.begin(), list.end(), t, occurrence_less);
  if (it != list.end() && occurrence_equal(*it, t)) return;
  list.insert(it, std::move(t));
}

}  // namespace

bool occurrence_less(const Triple &a, const Triple &b) {
  return occurrence_tie(a) < occurrence_tie(b);
}

bool occurrence_equal(const Triple &a, const Triple &b) {
  return occurrence_tie(a) == occurrence_tie(b);
}

std::string ThemeGraph::resolve_key(const std::string &key) const {
  auto it = aliases_.find(key);
  return it == aliases_.end() ? key : it->second.canonical;
}

std::string ThemeGraph::display_of(const std::string &key) const {
  std::string best;
  bool found = false;
  for (const auto &[k, list] : triples_) {
    if (k.head != key && k.tail != key) continue;
    for (const auto &t : list) {
      const std::string &name = k.head == key ? t.head : t.tail;
      if (!found || name < best) best = name;
      found = true;
    }
  }
  return found ? best : std::string();
}

bool ThemeGraph::add_triple(Triple t) {
  t.validate();
  std::string head_key = normalize(t.head);
  std::string tail_key = normalize(t.tail);
  if (auto it = aliases_.find(head_key); it != aliases_.end()) {
    t.head = display_of(it->second.canonical);
    if (t.head.empty()) t.head = it->second.canonical;
  }
  if (auto it = aliases_.find(tail_key); it != aliases_.end()) {
    t.tail = display_of(it->second.canonical);
    if (t.tail.empty()) t.tail = it->second.canonical;
  }
  if (normalize(t.head) == normalize(t.tail)) return false;
  TripleKey key = TripleKey::of(t);
  auto [it, inserted] = triples_.try_emplace(key);
  insert_occurrence(it->second, std::move(t));
  return inserted;
}

void ThemeGraph::merge_aliases(std::string_view a, std::string_view b,
                               std::string_view canonical) {
  std::string ka = resolve_key(normalize(a));
  std::string kb = resolve_key(normalize(b));
  if (!has_entity(ka)) throw NotFound("unknown entity: " + std::string(a));
  if (!has_entity(kb)) throw NotFound("unknown entity: " + std::string(b));
  std::string kc = normalize(canonical);
  if (kc != normalize(a) && kc != normalize(b)) {
    throw InvalidArgument("canonical name must be one of the merged names");
  }
  kc = resolve_key(kc);
  if (ka == kb) return;
  std::string other = kc == ka ? kb : ka;
  std::string display(collapse_whitespace(canonical));

  std::string other_display = display_of(other);
  aliases_[other] = Alias{other_display, kc};
  for (auto &[key, alias] : aliases_) {
    if (alias.canonical == other) alias.canonical = kc;
  }

  std::map<TripleKey, std::vector<Triple>> rewritten;
  for (auto &[key, list] : triples_) {
    for (auto &t : list) {
      std::string h = normalize(t.head);
      std::string tl = normalize(t.tail);
      if (h == other || h == kc) t.head = display;
      if (tl == other || tl == kc) t.tail = display;
      if (normalize(t.head) == normalize(t.tail)) continue;
      auto &slot = rewritten[TripleKey::of(t)];  // before t is moved from
      insert_occurrence(slot, std::move(t));
    }
  }
  triples_ = std::move(rewritten);
}

void ThemeGraph::add_alias(std::string_view alias, std::string_view canonical) {
  std::string ka = normalize(alias);
  std::string kc = resolve_key(normalize(canonical));
  if (ka.empty() || kc.empty()) throw InvalidArgument("empty alias");
  if (ka == kc) return;
  aliases_[ka] = Alias{collapse_whitespace(alias), kc};
  for (auto &[key, entry] : aliases_) {
    if (entry.canonical == ka) entry.canonical = kc;
  }
}

std::vector<Triple> ThemeGraph::triples() const {
  std::vector<Triple> out;
  out.reserve(triples_.size());
  for (const auto &[key, list] : triples_) out.push_back(list.front());
  return out;
}

std::vector<Triple> ThemeGraph::occurrences() const {
  std::vector<Triple> out;
  for (const auto &[key, list] : triples_) {
    out.insert(out.end(), list.begin(), list.end());
  }
  return out;
}

const std::vector<Triple> &ThemeGraph::occurrences_of(
    const TripleKey &key) const {
  auto it = triples_.find(key);
  if (it == triples_.end()) throw NotFound("no such triple");
  return it->second;
}

std::map<std::string, EntityInfo> ThemeGraph::entities() const {
  std::map<std::string, std::map<std::string, size_t>> votes;
  std::map<std::string, std::string> names;
  auto note = [&](const std::string &key, const std::string &name,
                  const std::string &category) {
    votes[key][category]++;
    auto [it, fresh] = names.try_emplace(key, name);
    if (!fresh && name < it->second) it->second = name;
  };
  for (const auto &[key, list] : triples_) {
    for (const auto &t : list) {
      note(key.head, t.head, t.head_category);
      note(key.tail, t.tail, t.tail_category);
    }
  }
  std::map<std::string, EntityInfo> out;
  for (const auto &[key, tally] : votes) {
    EntityInfo info;
    info.name = names[key];
    size_t best = 0;
    for (const auto &[category, count] : tally) {
      info.occurrences += count;
      if (count > best) {  // map order makes ties resolve to the smallest name
        best = count;
        info.category = category;
      }
    }
    out.emplace(key, std::move(info));
  }
  return out;
}

bool ThemeGraph::has_entity(std::string_view name) const {
  std::string key = resolve_key(normalize(name));
  for (const auto &[k, list] : triples_) {
    if (k.head == key || k.tail == key) return true;
  }
  return false;
}

std::string ThemeGraph::resolve(std::string_view name) const {
  std::string key = normalize(name);
  auto it = aliases_.find(key);
  if (it == aliases_.end()) return std::string(name);
  std::string display = display_of(it->second.canonical);
  return display.empty() ? it->second.canonical : display;
}

std::map<std::string, std::string> ThemeGraph::aliases() const {
  std::map<std::string, std::string> out;
  for (const auto &[key, alias] : aliases_) {
    std::string display = display_of(alias.canonical);
    out[alias.display] = display.empty() ? alias.canonical : display;
  }
  return out;
}

void ThemeGraph::validate() const {
  for (const auto &[key, list] : triples_) {
    if (list.empty()) throw Error("triple key without occurrences");
    if (aliases_.count(key.head) || aliases_.count(key.tail)) {
      throw Error("triple mentions an unresolved alias: " + key.head + " / " +
                  key.tail);
    }
    for (size_t i = 0; i < list.size(); ++i) {
      list[i].validate();
      if (!(TripleKey::of(list[i]) == key)) {
        throw Error("occurrence filed under the wrong key");
      }
      if (i > 0 && !occurrence_less(list[i - 1], list[i])) {
        throw Error("occurrences unsorted or duplicated");
      }
    }
  }
  for (const auto &[key, alias] : aliases_) {
    if (aliases_.count(alias.canonical)) {
      throw Error("alias chain through " + alias.canonical);
    }
    if (key == alias.canonical) throw Error("self alias " + key);
  }
}

bool ThemeGraph::operator==(const ThemeGraph &other) const {
  if (triples_.size() != other.triples_.size()) return false;
  if (occurrences().size() != other.occurrences().size()) return false;
  auto a = occurrences();
  auto b = other.occurrences();
  for (size_t i = 0; i < a.size(); ++i) {
    if (!occurrence_equal(a[i], b[i])) return false;
  }
  return aliases() == other.aliases();
}

std::string triple_to_json_line(const Triple &t) {
  json j;
  j["head"] = t.head;
  j["relation"] = t.relation.text();
  j["tail"] = t.tail;
  j["head_category"] = t.head_category;
  j["tail_category"] = t.tail_category;
  j["doc_id"] = t.provenance.doc_id;
  j["source"] = std::string(to_string(t.source));
  j["span"] = json::array({t.provenance.context.begin,
                           t.provenance.context.end});
  return j.dump();
}

namespace {

std::string required_string(const json &j, const char *field, size_t line) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string()) {
    throw ParseError(std::string("missing string field '") + field + "'",
                     line);
  }
  return it->get<std::string>();
}

}  // namespace

Triple triple_from_json_line(std::string_view line, size_t line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error &e) {
    throw ParseError(e.what(), line_number);
  }
  if (!j.is_object()) throw ParseError("expected a JSON object", line_number);
  try {
    Span span;
    if (auto it = j.find("span"); it != j.end()) {
      if (!it->is_array() || it->size() != 2) {
        throw ParseError("span must be [begin, end]", line_number);
      }
      span = Span{(*it)[0].get<size_t>(), (*it)[1].get<size_t>()};
    }
    Triple t{required_string(j, "head", line_number),
             RelationPhrase(required_string(j, "relation", line_number)),
             required_string(j, "tail", line_number),
             required_string(j, "head_category", line_number),
             required_string(j, "tail_category", line_number),
             Provenance{required_string(j, "doc_id", line_number), span},
             triple_source_from_string(
                 required_string(j, "source", line_number))};
    t.validate();
    return t;
  } catch (const ParseError &e) {
    if (e.line() != 0 || line_number == 0) throw;
    throw ParseError(e.what(), line_number);
  } catch (const json::exception &e) {
    throw ParseError(e.what(), line_number);
  } catch (const InvalidArgument &e) {
    throw ParseError(e.what(), line_number);
  }
}

std::string graph_to_jsonl(const ThemeGraph &graph) {
  std::string out;
  for (const auto &t : graph.occurrences()) {
    out += triple_to_json_line(t);
    out += '\n';
  }
  for (const auto &[alias, canonical] : graph.aliases()) {
    json j;
    j["alias"] = alias;
    j["canonical"] = canonical;
    out += j.dump();
    out += '\n';
  }
  return out;
}

GraphImport graph_from_jsonl(std::string_view text) {
  GraphImport result;
  std::vector<std::pair<std::string, std::string>> aliases;
  std::set<std::string> seen;
  size_t line_number = 0;
  for (const auto &raw : split_lines(text)) {
    ++line_number;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (!seen.insert(std::string(line)).second) {
      ++result.duplicate_lines;
      spdlog::warn("graph import: duplicate line {} ignored", line_number);
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error &e) {
      throw ParseError(e.what(), line_number);
    }
    if (j.is_object() && j.contains("alias")) {
      aliases.emplace_back(required_string(j, "alias", line_number),
                           required_string(j, "canonical", line_number));
      continue;
    }
    Triple t = triple_from_json_line(line, line_number);
    TripleKey key = TripleKey::of(t);
    size_t count = result.graph.contains(key)
                       ? result.graph.occurrences_of(key).size()
                       : 0;
    result.graph.add_triple(std::move(t));
    if (result.graph.occurrences_of(key).size() == count) {
      ++result.duplicate_lines;
      spdlog::warn("graph import: duplicate triple on line {} ignored",
                   line_number);
    }
  }
  for (const auto &[alias, canonical] : aliases) {
    result.graph.add_alias(alias, canonical);
  }
  return result;
}

}  // namespace themekg
