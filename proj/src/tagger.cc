#include "themekg/tagger.h"

#include <cctype>
#include <unordered_map>

#include "themekg/errors.h"
#include "themekg/text.h"

namespace themekg {

namespace {

const std::unordered_map<std::string, std::string> &closed_class() {
  static const auto *table = [] {
    auto *t = new std::unordered_map<std::string, std::string>;
    auto put = [&](const char *tag, std::initializer_list<const char *> words) {
      for (const char *w : words) t->emplace(w, tag);
    };
    put("DT", {"the", "a", "an", "this", "that", "these", "those", "every",
               "each", "some", "any", "no", "another", "either", "neither",
               "all", "both"});
    put("PRP$", {"my", "your", "his", "its", "our", "their"});
    put("PRP", {"i", "you", "he", "she", "it", "we", "they", "me", "him",
                "her", "us", "them", "itself", "themselves", "himself",
                "herself", "myself", "ourselves", "yourself", "yourselves"});
    put("IN", {"of", "in", "on", "at", "by", "for", "with", "from", "into",
               "like", "than", "as", "about", "over", "under", "between",
               "through", "during", "without", "within", "per", "via",
               "among", "across", "after", "before", "against", "along",
               "around", "behind", "beyond", "despite", "inside", "near",
               "off", "onto", "outside", "since", "toward", "towards", "upon",
               "whether", "because", "although", "though", "while", "if",
               "unless", "until"});
    put("TO", {"to"});
    put("CC", {"and", "or", "but", "nor"});
    put("MD", {"can", "could", "will", "would", "shall", "should", "may",
               "might", "must"});
    put("VBZ", {"is", "has", "does"});
    put("VBP", {"are", "have", "do"});
    put("VBD", {"was", "were", "had", "did"});
    put("VB", {"be"});
    put("VBN", {"been"});
    put("VBG", {"being"});
    put("WDT", {"which"});
    put("WP", {"who", "whom", "what"});
    put("WP$", {"whose"});
    put("WRB", {"when", "where", "why", "how"});
    put("EX", {"there"});
    put("RB", {"not", "very", "also", "too", "often", "usually", "only",
               "just", "even", "still", "already", "always", "never",
               "however", "then", "so", "now", "here", "thus"});
    put("RBS", {"most", "least"});
    put("JJR", {"more", "less", "fewer"});
    put("JJ", {"many", "few", "other", "such", "same", "own", "several",
               "various", "much"});
    put("CD", {"one", "two", "three", "four", "five", "six", "seven",
               "eight", "nine", "ten", "hundred", "thousand", "million",
               "billion"});
    return t;
  }();
  return *table;
}

bool is_word_byte(char c) {
  auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u);
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

bool is_modifier_tag(std::string_view tag) {
  return is_noun_tag(tag) || tag == "JJ" || tag == "JJR" || tag == "JJS" ||
         tag == "RBS" || tag == "CD" || tag == "VBN" || tag == "VBG";
}

}  // namespace

bool is_noun_tag(std::string_view tag) {
  return tag == "NN" || tag == "NNS" || tag == "NNP" || tag == "NNPS";
}

bool is_pronoun_tag(std::string_view tag) {
  return tag == "PRP" || tag == "PRP$" || tag == "WP" || tag == "WP$";
}

std::vector<Span> tokenize(std::string_view s) {
  std::vector<Span> out;
  size_t i = 0;
  while (i < s.size()) {
    if (is_space(s[i])) {
      ++i;
      continue;
    }
    if (!is_word_byte(s[i])) {
      out.push_back({i, i + 1});
      ++i;
      continue;
    }
    size_t j = i;
    while (j < s.size()) {
      if (is_word_byte(s[j])) {
        ++j;
      } else if ((s[j] == '-' || s[j] == '\'') && j + 1 < s.size() &&
                 is_word_byte(s[j + 1])) {
        ++j;
      } else {
        break;
      }
    }
    out.push_back({i, j});
    i = j;
  }
  return out;
}

LexiconTagger::LexiconTagger(std::map<std::string, std::string> lexicon) {
  for (auto &[word, tag] : lexicon) lexicon_[unicode_lower(word)] = tag;
}

LexiconTagger LexiconTagger::from_file(const std::string &path) {
  std::map<std::string, std::string> lexicon;
  size_t n = 0;
  for (const auto &raw : split_lines(read_file(path))) {
    ++n;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError("lexicon: expected word<TAB>tag", n);
    }
    std::string word(trim(line.substr(0, tab)));
    std::string tag(trim(line.substr(tab + 1)));
    if (word.empty() || tag.empty()) {
      throw ParseError("lexicon: empty word or tag", n);
    }
    lexicon[word] = tag;
  }
  return LexiconTagger(std::move(lexicon));
}

std::string LexiconTagger::tag_word(std::string_view word,
                                    bool sentence_initial) const {
  if (word.size() == 1 && !is_word_byte(word[0])) {
    return std::string(word);  // punctuation tags as itself
  }
  std::string w = unicode_lower(word);
  if (auto it = lexicon_.find(w); it != lexicon_.end()) return it->second;
  const auto &cc = closed_class();
  if (auto it = cc.find(w); it != cc.end()) return it->second;
  bool numeric = !w.empty();
  for (char c : w) {
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '.' && c != ',' &&
        c != '-') {
      numeric = false;
    }
  }
  if (numeric) return "CD";
  if (!sentence_initial && std::isupper(static_cast<unsigned char>(word[0]))) {
    return ends_with(w, "s") && !ends_with(w, "ss") && w.size() > 3 ? "NNPS"
                                                                     : "NNP";
  }
  if (w.size() > 4 && ends_with(w, "ly")) return "RB";
  if (w.size() > 5 && ends_with(w, "ing")) return "VBG";
  if (w.size() > 4 && ends_with(w, "ed")) return "VBN";
  for (std::string_view suffix :
       {"ous", "ful", "ive", "able", "ible", "less", "ical", "ary", "ic", "al"}) {
    if (w.size() > suffix.size() + 2 && ends_with(w, suffix)) return "JJ";
  }
  if (w.size() > 3 && ends_with(w, "s") && !ends_with(w, "ss")) return "NNS";
  return "NN";
}

std::vector<TaggedToken> LexiconTagger::tag(std::string_view sentence) {
  std::vector<TaggedToken> out;
  bool initial = true;
  for (const Span &s : tokenize(sentence)) {
    std::string_view word = sentence.substr(s.begin, s.size());
    std::string t = tag_word(word, initial);
    // Opening quotes and brackets keep the next word sentence-initial.
    if (!(word.size() == 1 && (word[0] == '"' || word[0] == '(' ||
                               word[0] == '\'' || word[0] == '['))) {
      initial = false;
    }
    out.push_back(TaggedToken{std::string(word), std::move(t), s});
  }
  return out;
}

std::vector<Span> LexiconTagger::noun_chunks(std::string_view sentence) {
  auto tokens = tag(sentence);
  std::vector<Span> out;
  size_t i = 0;
  while (i < tokens.size()) {
    const std::string &t = tokens[i].tag;
    if (t == "PRP") {
      out.push_back(tokens[i].span);
      ++i;
      continue;
    }
    if (!is_modifier_tag(t)) {
      ++i;
      continue;
    }
    size_t j = i;
    size_t last_noun = SIZE_MAX;
    while (j < tokens.size() && is_modifier_tag(tokens[j].tag)) {
      if (is_noun_tag(tokens[j].tag)) last_noun = j;
      ++j;
    }
    if (last_noun != SIZE_MAX) {
      out.push_back({tokens[i].span.begin, tokens[last_noun].span.end});
      i = last_noun + 1;
    } else {
      i = j;
    }
  }
  return out;
}

}  // namespace themekg
