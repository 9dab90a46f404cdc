#include "themekg/mentions.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <sstream>

#include <spdlog/spdlog.h>

#include "themekg/errors.h"
#include "themekg/parallel.h"
#include "themekg/tagger.h"
#include "themekg/text.h"

namespace themekg {

namespace fs = std::filesystem;

namespace {

size_t parse_size(std::string_view s, size_t line, const char *what) {
  size_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ParseError(std::string("bad ") + what + ": '" + std::string(s) + "'",
                     line);
  }
  return v;
}

std::string lower_token(std::string_view t) { return unicode_lower(t); }

}  // namespace

FrequencyTable FrequencyTable::from_counts(
    const std::vector<std::pair<std::string, uint64_t>> &counts) {
  std::map<std::string, uint64_t> merged;
  for (const auto &[token, count] : counts) {
    std::string key = collapse_whitespace(unicode_lower(token));
    if (key.empty()) continue;
    merged[key] = std::max(merged[key], count);
  }
  std::vector<std::pair<std::string, uint64_t>> sorted(merged.begin(),
                                                        merged.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto &a, const auto &b) { return a.second > b.second; });
  FrequencyTable table;
  for (size_t i = 0; i < sorted.size(); ++i) {
    table.ranks_[sorted[i].first] = i + 1;
  }
  return table;
}

FrequencyTable FrequencyTable::from_tsv(std::string_view text) {
  std::vector<std::pair<std::string, uint64_t>> counts;
  size_t n = 0;
  for (const auto &raw : split_lines(text)) {
    ++n;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split_tabs(line);
    if (fields.size() < 2) {
      throw ParseError("frequency list: expected token<TAB>count", n);
    }
    counts.emplace_back(fields[0], parse_size(trim(fields[1]), n, "count"));
  }
  return from_counts(counts);
}

FrequencyTable FrequencyTable::from_file(const std::string &path) {
  return from_tsv(read_file(path));
}

size_t FrequencyTable::rank(std::string_view token) const {
  std::string key = collapse_whitespace(unicode_lower(token));
  if (auto it = ranks_.find(key); it != ranks_.end()) return it->second;
  if (key.find(' ') == std::string::npos) {
    if (auto it = ranks_.find(fold_plural(key)); it != ranks_.end()) {
      return it->second;
    }
  }
  return kUnknownRank;
}

size_t FrequencyTable::phrase_rank(std::string_view phrase) const {
  std::string key = collapse_whitespace(unicode_lower(phrase));
  if (auto it = ranks_.find(key); it != ranks_.end()) return it->second;
  size_t worst = 0;
  bool any = false;
  for (const Span &s : tokenize(key)) {
    std::string_view tok = std::string_view(key).substr(s.begin, s.size());
    if (tok.size() == 1 && is_ascii_punct(tok[0])) continue;
    any = true;
    worst = std::max(worst, rank(tok));
  }
  return any ? worst : kUnknownRank;
}

void FrequencyTable::add_cooccurrence(std::string_view modifier,
                                      std::string_view next, size_t count) {
  cooc_[{lower_token(modifier), fold_plural(lower_token(next))}] += count;
}

size_t FrequencyTable::cooccurrence(std::string_view modifier,
                                    std::string_view next) const {
  auto it = cooc_.find({lower_token(modifier), fold_plural(lower_token(next))});
  return it == cooc_.end() ? 0 : it->second;
}

std::set<std::string> load_stopwords(const std::string &path) {
  std::set<std::string> out;
  for (const auto &raw : split_lines(read_file(path))) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    out.insert(unicode_lower(line));
  }
  return out;
}

const std::set<std::string> &default_stopwords() {
  static const std::set<std::string> words =
      load_stopwords(std::string(THEMEKG_DATA_DIR) + "/stopwords.txt");
  return words;
}

std::vector<Mention> extract_chunks(const Document &doc, PosTagger &tagger) {
  std::vector<Mention> out;
  for (size_t si = 0; si < doc.sentences.size(); ++si) {
    const Span sent = doc.sentences[si];
    std::string_view text = doc.sentence_text(si);
    auto tokens = tagger.tag(text);
    auto chunks = tagger.noun_chunks(text);
    size_t prev_end = 0;
    for (const Span &c : chunks) {
      if (c.end > text.size() || c.begin >= c.end || c.begin < prev_end) {
        throw ProviderError(tagger.id(), "noun chunk out of order or bounds");
      }
      prev_end = c.end;
      Mention m;
      m.doc_id = doc.doc_id;
      m.sentence = si;
      m.span = {sent.begin + c.begin, sent.begin + c.end};
      m.text = std::string(doc.slice(m.span));
      for (const auto &t : tokens) {
        if (c.contains(t.span)) {
          TaggedToken shifted = t;
          shifted.span = {sent.begin + t.span.begin, sent.begin + t.span.end};
          m.tokens.push_back(std::move(shifted));
        }
      }
      out.push_back(std::move(m));
    }
  }
  return out;
}

namespace {

bool passes_rule1(const Mention &m, const std::set<std::string> &stopwords) {
  bool noun = false;
  for (const auto &t : m.tokens) {
    if (is_pronoun_tag(t.tag)) return false;
    if (stopwords.count(unicode_lower(t.text))) return false;
    if (is_noun_tag(t.tag)) noun = true;
  }
  return noun;
}

}  // namespace

std::vector<Mention> filter_mentions(const std::vector<Mention> &chunks,
                                     const FrequencyTable &freq,
                                     const std::set<std::string> &stopwords,
                                     EmbeddingProvider &embedder,
                                     const Theme &theme,
                                     const MentionOptions &options) {
  std::vector<Mention> out;
  for (const auto &m : chunks) {
    if (!passes_rule1(m, stopwords)) {
      spdlog::debug("mentions: rule 1 drops '{}'", m.text);
      continue;
    }
    if (freq.phrase_rank(m.text) <= options.high_frequency_rank) {
      double coherence = theme_coherence(embedder, m.text, theme);
      if (coherence < options.coherence_cutoff) {
        spdlog::debug("mentions: rule 2 drops '{}' (coherence {:.3f})", m.text,
                      coherence);
        continue;
      }
    }
    out.push_back(m);
  }
  return out;
}

void count_cooccurrence(const std::vector<Mention> &mentions,
                        FrequencyTable &freq) {
  for (const auto &m : mentions) {
    for (size_t i = 0; i + 1 < m.tokens.size(); ++i) {
      if (is_noun_tag(m.tokens[i + 1].tag)) {
        freq.add_cooccurrence(m.tokens[i].text, m.tokens[i + 1].text);
      }
    }
  }
}

Mention strip_modifiers(const Mention &mention, const FrequencyTable &freq,
                        const MentionOptions &options) {
  size_t last_noun = SIZE_MAX;
  for (size_t i = 0; i < mention.tokens.size(); ++i) {
    if (is_noun_tag(mention.tokens[i].tag)) last_noun = i;
  }
  if (last_noun == SIZE_MAX) return mention;
  size_t cut = 0;
  while (cut < last_noun) {
    const auto &t = mention.tokens[cut];
    if (is_noun_tag(t.tag)) break;
    bool high = freq.rank(t.text) <= options.high_frequency_rank;
    bool low_cooc = freq.cooccurrence(t.text, mention.tokens[cut + 1].text) <
                    options.min_cooccurrence;
    if (!(high && low_cooc)) break;
    ++cut;
  }
  if (cut == 0) return mention;
  Mention out = mention;
  out.tokens.erase(out.tokens.begin(), out.tokens.begin() + cut);
  size_t begin = out.tokens.front().span.begin;
  out.text = mention.text.substr(begin - mention.span.begin,
                                 mention.span.end - begin);
  out.span.begin = begin;
  return out;
}

std::vector<Mention> mine_corpus(const std::vector<Document> &docs,
                                 PosTagger &tagger, FrequencyTable &freq,
                                 const std::set<std::string> &stopwords,
                                 EmbeddingProvider &embedder,
                                 const Theme &theme,
                                 const MentionOptions &options,
                                 size_t workers) {
  auto per_doc = parallel_map<std::vector<Mention>>(
      docs.size(), workers, [&](size_t i) {
        return filter_mentions(extract_chunks(docs[i], tagger), freq, stopwords,
                               embedder, theme, options);
      });
  std::vector<Mention> survivors;
  for (auto &v : per_doc) {
    for (auto &m : v) survivors.push_back(std::move(m));
  }
  freq.clear_cooccurrence();
  count_cooccurrence(survivors, freq);
  std::vector<Mention> out;
  out.reserve(survivors.size());
  for (const auto &m : survivors) out.push_back(strip_modifiers(m, freq, options));
  return out;
}

std::string mentions_to_tsv(const std::vector<Mention> &mentions) {
  std::ostringstream out;
  out << "doc_id\tsentence\tbegin\tend\ttext\ttags\n";
  for (const auto &m : mentions) {
    std::vector<std::string> tags;
    for (const auto &t : m.tokens) tags.push_back(t.tag);
    out << tsv_escape(m.doc_id) << '\t' << m.sentence << '\t' << m.span.begin
        << '\t' << m.span.end << '\t' << tsv_escape(m.text) << '\t'
        << join(tags, " ") << '\n';
  }
  return out.str();
}

std::vector<Mention> mentions_from_tsv(std::string_view text) {
  std::vector<Mention> out;
  auto lines = split_lines(text);
  for (size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    auto f = split_tabs(lines[n]);
    if (f.size() != 6) throw ParseError("mentions: expected 6 fields", n + 1);
    Mention m;
    m.doc_id = tsv_unescape(f[0]);
    m.sentence = parse_size(f[1], n + 1, "sentence");
    m.span = {parse_size(f[2], n + 1, "begin"), parse_size(f[3], n + 1, "end")};
    m.text = tsv_unescape(f[4]);
    std::vector<std::string> tags;
    std::istringstream ts(f[5]);
    for (std::string t; ts >> t;) tags.push_back(t);
    auto spans = tokenize(m.text);
    if (spans.size() == tags.size()) {
      for (size_t i = 0; i < spans.size(); ++i) {
        m.tokens.push_back(TaggedToken{
            m.text.substr(spans[i].begin, spans[i].size()), tags[i],
            Span{m.span.begin + spans[i].begin, m.span.begin + spans[i].end}});
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Document> load_corpus(const std::string &directory) {
  if (!fs::is_directory(directory)) {
    throw NotFound("corpus directory not found: " + directory);
  }
  std::vector<fs::path> files;
  for (const auto &entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Document> docs;
  for (const auto &f : files) {
    docs.push_back(make_document(f.stem().string(), read_file(f.string())));
  }
  return docs;
}

}  // namespace themekg
