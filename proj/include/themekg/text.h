#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace themekg {

// Lowercases ASCII plus the Latin-1, Latin Extended-A, Greek and Cyrillic
// capital ranges of UTF-8 input. Other bytes pass through unchanged.
std::string unicode_lower(std::string_view text);

// Canonical identity form for entity names and relation phrases:
// lowercase, whitespace runs collapsed to one space, leading and trailing
// punctuation stripped.
std::string normalize(std::string_view text);

std::string collapse_whitespace(std::string_view text);
std::string_view trim(std::string_view text);
std::string_view strip_punctuation(std::string_view text);

bool is_ascii_punct(char c);
bool is_space(char c);

// Light plural folding on a single lowercase word: "batteries" -> "battery",
// "vehicles" -> "vehicle". Words of three letters or fewer are untouched.
std::string fold_plural(std::string_view word);

// Lowercase, plural-folded word tokens. Separators are any ASCII character
// that is not alphanumeric; non-ASCII bytes are kept inside tokens.
std::vector<std::string> content_tokens(std::string_view text);

// Category names compare equal when their normalized forms match, allowing a
// trailing plural on the last word of either side.
bool category_names_match(std::string_view a, std::string_view b);

std::vector<std::string> split_lines(std::string_view text);
std::string join(const std::vector<std::string> &parts, std::string_view sep);

// Inner text of the outermost balanced "( ... )" groups, left to right.
std::vector<std::string_view> paren_groups(std::string_view text);

struct TripleFields {
  std::string_view first;
  std::string_view middle;
  std::string_view last;
};
// Splits "a, b, c" at the first and last comma outside nested brackets;
// each field is trimmed. nullopt with fewer than two such commas.
std::optional<TripleFields> split_triple_fields(std::string_view inner);

// Escapes backslash, tab, newline and carriage return for one TSV field.
std::string tsv_escape(std::string_view field);
std::string tsv_unescape(std::string_view field);
std::vector<std::string> split_tabs(std::string_view line);

std::string read_file(const std::string &path);
void write_file(const std::string &path, std::string_view contents);

}  // namespace themekg
