#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kropforge/errors.hpp"

namespace kropforge {

enum class MatchMode { kExactSubstring, kCaseInsensitiveSubstring, kWordBoundary };

std::string_view to_string(MatchMode mode);  // "exact" | "ci" | "word"
MatchMode parse_match_mode(std::string_view name);

struct ForbiddenPattern {
  std::string pattern;
  MatchMode mode = MatchMode::kCaseInsensitiveSubstring;
  bool operator==(const ForbiddenPattern&) const = default;
};

struct FilterLexicon {
  std::string name;
  std::vector<ForbiddenPattern> patterns;
  /// Also scan the separator-stripped view and the joined quoted-literal view.
  bool normalize_reassembly = false;
};

/// Which text a match offset indexes.
enum class MatchView {
  kRaw,         // the input text itself
  kNormalized,  // normalize_reassembled(text)
  kLiteralJoin  // normalize_reassembled(join_quoted_literals(text))
};

std::string_view to_string(MatchView view);

struct FilterMatch {
  std::string pattern;
  MatchMode mode = MatchMode::kCaseInsensitiveSubstring;
  MatchView view = MatchView::kRaw;
  std::size_t start = 0;  // byte offsets into the view named by `view`
  std::size_t end = 0;
  std::size_t origin_start = 0;  // the same match mapped back onto the input text
  std::size_t origin_end = 0;
  bool operator==(const FilterMatch&) const = default;
};

struct Verdict {
  bool blocked = false;
  std::vector<FilterMatch> matches;
  std::optional<std::string> normalized_view;
  std::optional<std::string> literal_view;
  bool operator==(const Verdict&) const = default;
};

struct NamedVerdict {
  std::string lexicon;
  Verdict verdict;
};

/// Text plus, for every output byte, the input byte it came from.
struct MappedText {
  std::string text;
  std::vector<std::size_t> origin;
};

/// Throws ValidationError for empty patterns or word patterns with
/// surrounding whitespace.
void validate_pattern(const ForbiddenPattern& pattern);
void validate_lexicon(const FilterLexicon& lexicon);

/// ASCII case fold plus removal of the separator class: space, comma,
/// [ ] ( ) { }, ASCII and typographic quotes, CR/LF, '+' and '='.
std::string normalize_reassembled(std::string_view text);
MappedText normalize_reassembled_mapped(std::string_view text);

/// Contents of every double-quoted literal ("..." or “...”) concatenated in
/// order, with \" \\ \n escapes decoded. Catches payload-assembly prompts
/// whose variable names interleave with the string fragments.
MappedText join_quoted_literals(std::string_view text);

Verdict filter_check(std::string_view text, const FilterLexicon& lexicon);

std::vector<NamedVerdict> run_filter_suite(std::string_view text,
                                           const std::vector<FilterLexicon>& suite);

/// One lexicon holding every pattern of `suite`; reassembly is enabled when
/// any member enables it.
FilterLexicon merge_lexicons(const std::vector<FilterLexicon>& suite, std::string name);

const FilterLexicon* find_lexicon(const std::vector<FilterLexicon>& suite, std::string_view name);

std::vector<FilterLexicon> load_filter_suite(std::string_view json_text);
std::vector<FilterLexicon> load_filter_suite_file(const std::filesystem::path& path);
std::string filter_suite_to_json(const std::vector<FilterLexicon>& suite);

}  // namespace kropforge
