#include "themekg/typing.h"

#include <cctype>
#include <charconv>
#include <sstream>

#include <spdlog/spdlog.h>

#include "themekg/errors.h"
#include "themekg/ontology_builder.h"
#include "themekg/parallel.h"
#include "themekg/tagger.h"
#include "themekg/text.h"

namespace themekg {

std::optional<ScoredCategory> best_category(
    const std::vector<std::string> &candidates, const std::string &entity,
    const Theme &theme, EmbeddingProvider &embedder, double theme_threshold) {
  std::optional<ScoredCategory> best;
  double best_product = 0.0;
  for (const auto &c : candidates) {
    double ct = theme_coherence(embedder, c, theme);
    if (ct < theme_threshold) continue;
    double cs = self_coherence(embedder, c, entity);
    double product = cs * ct;
    bool better = !best || product > best_product ||
                  (product == best_product && c < best->category);
    if (better) {
      best = ScoredCategory{c, cs, ct};
      best_product = product;
    }
  }
  return best;
}

std::string clean_entity_name(const Mention &mention, const Document &doc) {
  std::string name = collapse_whitespace(mention.text);
  if (name.empty() || mention.tokens.empty()) return name;
  const auto &first = mention.tokens.front();
  bool initial = mention.sentence < doc.sentences.size() &&
                 first.span.begin == doc.sentences[mention.sentence].begin;
  bool proper = first.tag == "NNP" || first.tag == "NNPS";
  // Acronyms keep their case.
  bool acronym = first.text.size() > 1 &&
                 std::isupper(static_cast<unsigned char>(first.text[1]));
  if (initial && !proper && !acronym) {
    name[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(name[0])));
  }
  return name;
}

std::string mention_context(const Mention &mention, const Document &doc,
                            size_t window) {
  if (doc.sentences.empty()) return std::string(doc.slice(mention.span));
  size_t first = mention.sentence > window ? mention.sentence - window : 0;
  size_t last = std::min(mention.sentence + window, doc.sentences.size() - 1);
  return collapse_whitespace(doc.slice(doc.covering(first, last)));
}

namespace {

TypedMention base_typed(const Mention &mention, const Document &doc) {
  TypedMention t;
  t.surface = mention.text;
  t.doc_id = mention.doc_id;
  t.span = mention.span;
  t.sentence = mention.sentence;
  t.entity_name = clean_entity_name(mention, doc);
  t.category = std::string(kIrrelevant);
  t.typing_case = TypingCase::kIrrelevant;
  return t;
}

void set_scored(TypedMention &t, const ScoredCategory &s, TypingCase c) {
  t.category = s.category;
  t.typing_case = c;
  t.self_coherence = s.self_coherence;
  t.theme_coherence = s.theme_coherence;
}

}  // namespace

std::optional<TypedMention> type_by_page(const Mention &mention,
                                         const Document &doc,
                                         const Theme &theme,
                                         TypingProviders providers,
                                         const TypingOptions &options) {
  TypedMention t = base_typed(mention, doc);
  if (!providers.wiki.page_exists(t.entity_name)) return std::nullopt;
  auto candidates = providers.wiki.page_categories(t.entity_name);
  auto best = best_category(candidates, t.entity_name, theme,
                            providers.embedder, options.theme_threshold);
  if (best) set_scored(t, *best, TypingCase::kPageMatch);
  return t;
}

TypedMention type_by_context(const Mention &mention, const Document &doc,
                             const EntityOntology &eo, const Theme &theme,
                             TypingProviders providers,
                             const TypingOptions &options) {
  TypedMention t = base_typed(mention, doc);
  std::string context = mention_context(mention, doc, options.context_window);
  auto categories = eo.categories();
  auto scores = parallel_map<double>(
      categories.size(), options.workers, [&](size_t i) {
        return providers.context_typing.consistency(t.entity_name, context,
                                                    categories[i].name);
      });
  size_t best = SIZE_MAX;
  for (size_t i = 0; i < categories.size(); ++i) {
    // categories() is sorted by normalized name, so the first maximum wins
    // ties lexicographically.
    if (best == SIZE_MAX || scores[i] > scores[best]) best = i;
  }
  if (best != SIZE_MAX && scores[best] >= options.context_threshold) {
    const std::string &c = categories[best].name;
    set_scored(t,
               ScoredCategory{c,
                              self_coherence(providers.embedder, c, t.entity_name),
                              theme_coherence(providers.embedder, c, theme)},
               TypingCase::kContextTyped);
    return t;
  }
  auto candidates =
      providers.retriever.retrieve(t.entity_name, context, options.retriever_k);
  auto chosen = best_category(candidates, t.entity_name, theme,
                              providers.embedder, options.theme_threshold);
  if (chosen) set_scored(t, *chosen, TypingCase::kRetrieved);
  return t;
}

void attach_category(EntityOntology &eo, const std::string &category,
                     EmbeddingProvider &embedder) {
  if (eo.contains(category)) return;
  Vector cv = embedder.embed(category);
  std::optional<std::string> parent;
  double best = 0.0;
  for (const auto &c : eo.categories()) {
    if (c.depth >= eo.max_depth()) continue;
    double sim = cosine(cv, embedder.embed(c.name));
    if (!parent || sim > best) {
      parent = c.name;
      best = sim;
    }
  }
  if (!parent) {
    throw OntologyError("no category with room to attach " + category);
  }
  spdlog::debug("typing: attach '{}' under '{}' (cos {:.3f})", category,
                *parent, best);
  eo = expand_with_category(eo, category, *parent);
}

TypedMention type_mention(const Mention &mention, const Document &doc,
                          EntityOntology &eo, const Theme &theme,
                          TypingProviders providers,
                          const TypingOptions &options) {
  auto typed = type_by_page(mention, doc, theme, providers, options);
  if (!typed) typed = type_by_context(mention, doc, eo, theme, providers, options);
  if (!typed->irrelevant()) {
    attach_category(eo, typed->category, providers.embedder);
    typed->category = *eo.find(typed->category);
  }
  return *typed;
}

std::vector<TypedMention> type_corpus(const std::vector<Document> &docs,
                                      const std::vector<Mention> &mentions,
                                      EntityOntology &eo, const Theme &theme,
                                      TypingProviders providers,
                                      const TypingOptions &options) {
  std::map<std::string, const Document *> by_id;
  for (const auto &d : docs) by_id[d.doc_id] = &d;
  auto doc_of = [&](const Mention &m) -> const Document & {
    auto it = by_id.find(m.doc_id);
    if (it == by_id.end()) throw NotFound("mention from unknown document " + m.doc_id);
    return *it->second;
  };
  auto paged = parallel_map<std::optional<TypedMention>>(
      mentions.size(), options.workers, [&](size_t i) {
        return type_by_page(mentions[i], doc_of(mentions[i]), theme, providers,
                            options);
      });
  std::vector<TypedMention> out;
  out.reserve(mentions.size());
  for (size_t i = 0; i < mentions.size(); ++i) {
    auto typed = std::move(paged[i]);
    if (!typed) {
      typed = type_by_context(mentions[i], doc_of(mentions[i]), eo, theme,
                              providers, options);
    }
    if (!typed->irrelevant()) {
      attach_category(eo, typed->category, providers.embedder);
      typed->category = *eo.find(typed->category);
    }
    out.push_back(std::move(*typed));
  }
  return out;
}

namespace {

std::string score_field(const std::optional<double> &v) {
  if (!v) return "";
  std::ostringstream s;
  s.precision(6);
  s << std::fixed << *v;
  return s.str();
}

std::optional<double> parse_score(const std::string &s, size_t line) {
  if (s.empty()) return std::nullopt;
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception &) {
    throw ParseError("bad score '" + s + "'", line);
  }
}

size_t parse_index(const std::string &s, size_t line) {
  size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError("bad integer '" + s + "'", line);
  }
  return v;
}

}  // namespace

std::string typed_mentions_to_tsv(const std::vector<TypedMention> &mentions) {
  std::ostringstream out;
  out << "doc_id\tbegin\tend\tsurface\tentity_name\tcategory\tcase\tc_self\t"
         "c_theme\tsentence\n";
  for (const auto &m : mentions) {
    out << tsv_escape(m.doc_id) << '\t' << m.span.begin << '\t' << m.span.end
        << '\t' << tsv_escape(m.surface) << '\t' << tsv_escape(m.entity_name)
        << '\t' << tsv_escape(m.category) << '\t' << to_string(m.typing_case)
        << '\t' << score_field(m.self_coherence) << '\t'
        << score_field(m.theme_coherence) << '\t' << m.sentence << '\n';
  }
  return out.str();
}

std::vector<TypedMention> typed_mentions_from_tsv(std::string_view text) {
  std::vector<TypedMention> out;
  auto lines = split_lines(text);
  for (size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    auto f = split_tabs(lines[n]);
    if (f.size() != 10) {
      throw ParseError("typed mentions: expected 10 fields", n + 1);
    }
    TypedMention m;
    m.doc_id = tsv_unescape(f[0]);
    m.span = {parse_index(f[1], n + 1), parse_index(f[2], n + 1)};
    m.surface = tsv_unescape(f[3]);
    m.entity_name = tsv_unescape(f[4]);
    m.category = tsv_unescape(f[5]);
    try {
      m.typing_case = typing_case_from_string(f[6]);
    } catch (const Error &e) {
      throw ParseError(e.what(), n + 1);
    }
    m.self_coherence = parse_score(f[7], n + 1);
    m.theme_coherence = parse_score(f[8], n + 1);
    m.sentence = parse_index(f[9], n + 1);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace themekg
