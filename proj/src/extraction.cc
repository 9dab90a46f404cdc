#include "themekg/extraction.h"

#include <set>
#include <tuple>

#include <spdlog/spdlog.h>

#include "themekg/errors.h"
#include "themekg/parallel.h"
#include "themekg/text.h"

namespace themekg {

std::vector<PairContext> pair_contexts(const Document &doc,
                                       const std::vector<TypedMention> &mentions,
                                       size_t window) {
  std::vector<const TypedMention *> own;
  for (const auto &m : mentions) {
    if (m.doc_id == doc.doc_id && !m.irrelevant()) own.push_back(&m);
  }
  std::vector<PairContext> out;
  std::set<std::tuple<std::string, std::string, Span>> seen;
  for (const auto *a : own) {
    for (const auto *b : own) {
      if (a == b) continue;
      size_t lo = std::min(a->sentence, b->sentence);
      size_t hi = std::max(a->sentence, b->sentence);
      if (hi - lo > window) continue;
      std::string ha = normalize(a->entity_name);
      std::string hb = normalize(b->entity_name);
      if (ha == hb) continue;
      Span context = doc.covering(lo, hi);
      if (!seen.emplace(ha, hb, context).second) continue;
      out.push_back(PairContext{*a, *b, context});
    }
  }
  return out;
}

namespace {

std::string context_text(std::string_view context) {
  std::string c = collapse_whitespace(context);
  while (!c.empty() && c.back() == '.') c.pop_back();
  return c;
}

}  // namespace

std::string selection_prompt(std::string_view e1, std::string_view e2,
                             std::string_view context,
                             const std::vector<RelationPhrase> &candidates) {
  std::vector<std::string> names;
  for (const auto &c : candidates) names.push_back(c.text());
  std::string p = "Please choose the most proper relation in the candidate set for ";
  p += e1;
  p += " to ";
  p += e2;
  p += " according to the context. If all the relations in the candidate set "
       "are not suitable, please choose none. The output format should be "
       "(entity1, relation, entity2). Context: ";
  p += context_text(context);
  p += ". Relation candidates: [";
  p += join(names, ", ");
  p += "]";
  return p;
}

std::string fallback_prompt(std::string_view e1, std::string_view e2,
                            std::string_view context) {
  std::string p = "Extract the relation from ";
  p += e1;
  p += " to ";
  p += e2;
  p += " in the following passage: ";
  p += context_text(context);
  p += ". Please output in the format of (";
  p += e1;
  p += ", [relation], ";
  p += e2;
  p += "). If no relation from ";
  p += e1;
  p += " to ";
  p += e2;
  p += " is identified based on the context, then output none.";
  return p;
}

ParsedReply parse_triple_reply(std::string_view reply, std::string_view e1,
                               std::string_view e2) {
  bool reversed = false;
  for (auto inner : paren_groups(reply)) {
    auto f = split_triple_fields(inner);
    if (!f) continue;
    if (category_names_match(f->first, e1) && category_names_match(f->last, e2)) {
      std::string middle(strip_punctuation(f->middle));
      if (normalize(middle) == kNoneRelation) return {ParsedReply::Kind::kNone, ""};
      if (normalize(middle).empty()) continue;
      return {ParsedReply::Kind::kRelation, collapse_whitespace(middle)};
    }
    if (category_names_match(f->first, e2) && category_names_match(f->last, e1)) {
      reversed = true;
    }
  }
  if (reversed) {
    spdlog::warn("reply names ({}, {}) in reverse order; treated as none", e1, e2);
    return {ParsedReply::Kind::kNone, ""};
  }
  for (const auto &tok : content_tokens(reply)) {
    if (tok == kNoneRelation) return {ParsedReply::Kind::kNone, ""};
  }
  return {};
}

namespace {

ParsedReply ask_with_retry(LlmProvider &llm, const std::string &prompt,
                           std::string_view e1, std::string_view e2,
                           const Decoding &decoding) {
  ParsedReply parsed = parse_triple_reply(llm.complete(prompt, decoding), e1, e2);
  if (parsed.kind != ParsedReply::Kind::kUnparseable) return parsed;
  std::string again = prompt + "\nAnswer only in the format (" + std::string(e1) +
                      ", relation, " + std::string(e2) + ") or none.";
  parsed = parse_triple_reply(llm.complete(again, decoding), e1, e2);
  if (parsed.kind == ParsedReply::Kind::kUnparseable) {
    spdlog::warn("unparseable reply for ({}, {}) after re-prompt", e1, e2);
  }
  return parsed;
}

}  // namespace

std::optional<RelationPhrase> select_relation(
    std::string_view e1, std::string_view e2, std::string_view context,
    const std::vector<RelationPhrase> &candidates, LlmProvider &llm,
    const Decoding &decoding) {
  bool any_real = false;
  for (const auto &c : candidates) any_real = any_real || !c.is_none();
  if (!any_real) return std::nullopt;
  ParsedReply parsed = ask_with_retry(
      llm, selection_prompt(e1, e2, context, candidates), e1, e2, decoding);
  if (parsed.kind != ParsedReply::Kind::kRelation) return std::nullopt;
  std::string chosen = normalize(parsed.relation);
  for (const auto &c : candidates) {
    if (c.normalized() == chosen) {
      if (c.is_none()) return std::nullopt;
      return c;
    }
  }
  spdlog::warn("selected relation '{}' for ({}, {}) is not a candidate; "
               "treated as none",
               parsed.relation, e1, e2);
  return std::nullopt;
}

std::optional<RelationPhrase> fallback_extract(std::string_view e1,
                                               std::string_view e2,
                                               std::string_view context,
                                               LlmProvider &llm,
                                               const StopRelations &stop,
                                               const Decoding &decoding) {
  ParsedReply parsed =
      ask_with_retry(llm, fallback_prompt(e1, e2, context), e1, e2, decoding);
  if (parsed.kind != ParsedReply::Kind::kRelation) return std::nullopt;
  return RelationPhrase::parse(parsed.relation, stop);
}

ExtractionStats &ExtractionStats::operator+=(const ExtractionStats &other) {
  pairs += other.pairs;
  selected += other.selected;
  fallback_attempts += other.fallback_attempts;
  fallback_extracted += other.fallback_extracted;
  errors += other.errors;
  return *this;
}

namespace {

struct PairOutcome {
  std::optional<RelationPhrase> relation;
  TripleSource source = TripleSource::kOntologySelected;
  bool attempted_fallback = false;
  bool failed = false;
};

}  // namespace

ExtractionResult extract_document(const Document &doc,
                                  const std::vector<TypedMention> &mentions,
                                  RelationOntology &ro,
                                  const EntityOntology &eo, LlmProvider &llm,
                                  RelationGenerator *generator,
                                  const ExtractionOptions &options) {
  ExtractionResult result;
  auto pairs = pair_contexts(doc, mentions, options.window);
  result.stats.pairs = pairs.size();

  auto outcomes = parallel_map<PairOutcome>(
      pairs.size(), options.workers, [&](size_t i) {
        const auto &p = pairs[i];
        PairOutcome o;
        std::string_view context = doc.slice(p.context);
        try {
          auto candidates =
              retrieve_candidates(ro, eo, p.head.category, p.tail.category,
                                  generator, options.parent_levels);
          o.relation = select_relation(p.head.entity_name, p.tail.entity_name,
                                       context, candidates, llm,
                                       options.decoding);
          if (!o.relation && options.fallback) {
            o.attempted_fallback = true;
            o.relation = fallback_extract(p.head.entity_name, p.tail.entity_name,
                                          context, llm, options.stop,
                                          options.decoding);
            o.source = TripleSource::kFallbackExtracted;
          }
        } catch (const Error &e) {
          spdlog::error("extraction failed for ({}, {}) in {}: {}",
                        p.head.entity_name, p.tail.entity_name, doc.doc_id,
                        e.what());
          o.relation.reset();
          o.failed = true;
        }
        return o;
      });

  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto &p = pairs[i];
    const auto &o = outcomes[i];
    if (o.failed) ++result.stats.errors;
    if (o.attempted_fallback) ++result.stats.fallback_attempts;
    if (!o.relation) continue;
    if (o.source == TripleSource::kFallbackExtracted) {
      ++result.stats.fallback_extracted;
      enrich(ro, p.head.category, p.tail.category, *o.relation);
    } else {
      ++result.stats.selected;
    }
    Triple t{p.head.entity_name, *o.relation,  p.tail.entity_name,
             p.head.category,    p.tail.category,
             Provenance{doc.doc_id, p.context}, o.source};
    result.triples.push_back(std::move(t));
  }
  return result;
}

}  // namespace themekg
