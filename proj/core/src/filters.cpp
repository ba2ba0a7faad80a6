#include "kropforge/filters.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kropforge/text.hpp"

namespace kropforge {

using json = nlohmann::json;

namespace {

constexpr std::uint32_t kLeftSingleQuote = 0x2018;
constexpr std::uint32_t kRightSingleQuote = 0x2019;
constexpr std::uint32_t kLeftDoubleQuote = 0x201C;
constexpr std::uint32_t kRightDoubleQuote = 0x201D;

bool is_separator(std::uint32_t cp) {
  switch (cp) {
    case ' ':
    case '\t':
    case ',':
    case '[':
    case ']':
    case '(':
    case ')':
    case '{':
    case '}':
    case '"':
    case '\'':
    case '\n':
    case '\r':
    case '+':
    case '=':
    case kLeftSingleQuote:
    case kRightSingleQuote:
    case kLeftDoubleQuote:
    case kRightDoubleQuote:
      return true;
    default:
      return false;
  }
}

bool is_double_quote(std::uint32_t cp) {
  return cp == '"' || cp == kLeftDoubleQuote || cp == kRightDoubleQuote;
}

bool word_char_before(std::string_view text, std::size_t offset) {
  if (offset == 0) {
    return false;
  }
  const auto start = text::previous_codepoint_start(text, offset);
  return text::is_word_codepoint(text::decode_at(text, start).value);
}

bool word_char_at(std::string_view text, std::size_t offset) {
  if (offset >= text.size()) {
    return false;
  }
  return text::is_word_codepoint(text::decode_at(text, offset).value);
}

bool word_boundary_ok(std::string_view text, std::size_t start, std::size_t end,
                      std::string_view pattern) {
  const bool pattern_starts_word = word_char_at(pattern, 0);
  const bool pattern_ends_word =
      !pattern.empty() && word_char_before(pattern, pattern.size());
  if (pattern_starts_word && word_char_before(text, start)) {
    return false;
  }
  if (pattern_ends_word && word_char_at(text, end)) {
    return false;
  }
  return true;
}

// All (possibly overlapping) occurrences of `needle` in `hay`.
std::vector<std::size_t> occurrences(std::string_view hay, std::string_view needle,
                                     bool case_insensitive) {
  std::vector<std::size_t> out;
  if (needle.empty()) {
    return out;
  }
  std::size_t pos = 0;
  while (true) {
    const auto hit = case_insensitive ? text::ifind_ascii(hay, needle, pos) : hay.find(needle, pos);
    if (hit == std::string_view::npos) {
      break;
    }
    out.push_back(hit);
    pos = hit + 1;
  }
  return out;
}

void scan_raw(std::string_view text, const ForbiddenPattern& p, std::vector<FilterMatch>& out) {
  const bool ci = p.mode != MatchMode::kExactSubstring;
  for (const auto start : occurrences(text, p.pattern, ci)) {
    const auto end = start + p.pattern.size();
    if (p.mode == MatchMode::kWordBoundary && !word_boundary_ok(text, start, end, p.pattern)) {
      continue;
    }
    out.push_back({p.pattern, p.mode, MatchView::kRaw, start, end, start, end});
  }
}

// Normalized views are folded and have lost word boundaries, so every mode
// degrades to a substring search for the normalized pattern there.
void scan_mapped(const MappedText& view, MatchView kind, const ForbiddenPattern& p,
                 std::vector<FilterMatch>& out) {
  const auto needle = normalize_reassembled(p.pattern);
  for (const auto start : occurrences(view.text, needle, false)) {
    const auto end = start + needle.size();
    const auto origin_start = view.origin[start];
    const auto origin_end = view.origin[end - 1] + 1;
    out.push_back({p.pattern, p.mode, kind, start, end, origin_start, origin_end});
  }
}

MappedText compose(const MappedText& outer, const MappedText& inner) {
  MappedText result{outer.text, {}};
  result.origin.reserve(outer.origin.size());
  for (const auto o : outer.origin) {
    result.origin.push_back(inner.origin[o]);
  }
  return result;
}

}  // namespace

std::string_view to_string(MatchMode mode) {
  switch (mode) {
    case MatchMode::kExactSubstring:
      return "exact";
    case MatchMode::kCaseInsensitiveSubstring:
      return "ci";
    case MatchMode::kWordBoundary:
      return "word";
  }
  return "ci";
}

MatchMode parse_match_mode(std::string_view name) {
  if (name == "exact") return MatchMode::kExactSubstring;
  if (name == "ci") return MatchMode::kCaseInsensitiveSubstring;
  if (name == "word") return MatchMode::kWordBoundary;
  throw ParseError("unknown match mode '" + std::string(name) + "'");
}

std::string_view to_string(MatchView view) {
  switch (view) {
    case MatchView::kRaw:
      return "raw";
    case MatchView::kNormalized:
      return "normalized";
    case MatchView::kLiteralJoin:
      return "literal-join";
  }
  return "raw";
}

void validate_pattern(const ForbiddenPattern& pattern) {
  if (pattern.pattern.empty()) {
    throw ValidationError("forbidden pattern must be nonempty");
  }
  if (pattern.mode == MatchMode::kWordBoundary &&
      (text::is_space_ascii(pattern.pattern.front()) ||
       text::is_space_ascii(pattern.pattern.back()))) {
    throw ValidationError("word pattern '" + pattern.pattern +
                          "' has leading or trailing whitespace");
  }
}

void validate_lexicon(const FilterLexicon& lexicon) {
  for (const auto& p : lexicon.patterns) {
    validate_pattern(p);
  }
}

MappedText normalize_reassembled_mapped(std::string_view text) {
  MappedText out;
  out.text.reserve(text.size());
  out.origin.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto cp = text::decode_at(text, i);
    if (!is_separator(cp.value)) {
      for (std::size_t k = 0; k < cp.length; ++k) {
        char c = text[i + k];
        if (c >= 'A' && c <= 'Z') {
          c = static_cast<char>(c - 'A' + 'a');
        }
        out.text.push_back(c);
        out.origin.push_back(i + k);
      }
    }
    i += cp.length;
  }
  return out;
}

std::string normalize_reassembled(std::string_view text) {
  return normalize_reassembled_mapped(text).text;
}

MappedText join_quoted_literals(std::string_view text) {
  MappedText out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto open = text::decode_at(text, i);
    if (!is_double_quote(open.value)) {
      i += open.length;
      continue;
    }
    MappedText literal;
    std::size_t j = i + open.length;
    bool closed = false;
    while (j < text.size()) {
      const auto cp = text::decode_at(text, j);
      if (is_double_quote(cp.value)) {
        closed = true;
        j += cp.length;
        break;
      }
      if (cp.value == '\\' && j + 1 < text.size()) {
        const char escaped = text[j + 1];
        const char decoded = escaped == 'n' ? '\n' : escaped == 't' ? '\t' : escaped;
        literal.text.push_back(decoded);
        literal.origin.push_back(j);
        j += 2;
        continue;
      }
      for (std::size_t k = 0; k < cp.length; ++k) {
        literal.text.push_back(text[j + k]);
        literal.origin.push_back(j + k);
      }
      j += cp.length;
    }
    if (!closed) {
      break;
    }
    out.text += literal.text;
    out.origin.insert(out.origin.end(), literal.origin.begin(), literal.origin.end());
    i = j;
  }
  return out;
}

Verdict filter_check(std::string_view text, const FilterLexicon& lexicon) {
  Verdict verdict;
  for (const auto& p : lexicon.patterns) {
    scan_raw(text, p, verdict.matches);
  }
  if (lexicon.normalize_reassembly) {
    const auto normalized = normalize_reassembled_mapped(text);
    const auto joined = join_quoted_literals(text);
    const auto literal = compose(normalize_reassembled_mapped(joined.text), joined);
    for (const auto& p : lexicon.patterns) {
      scan_mapped(normalized, MatchView::kNormalized, p, verdict.matches);
      scan_mapped(literal, MatchView::kLiteralJoin, p, verdict.matches);
    }
    verdict.normalized_view = normalized.text;
    verdict.literal_view = literal.text;
  }
  verdict.blocked = !verdict.matches.empty();
  return verdict;
}

std::vector<NamedVerdict> run_filter_suite(std::string_view text,
                                           const std::vector<FilterLexicon>& suite) {
  std::vector<NamedVerdict> out;
  out.reserve(suite.size());
  for (const auto& lexicon : suite) {
    out.push_back({lexicon.name, filter_check(text, lexicon)});
  }
  return out;
}

FilterLexicon merge_lexicons(const std::vector<FilterLexicon>& suite, std::string name) {
  FilterLexicon merged{std::move(name), {}, false};
  for (const auto& lexicon : suite) {
    merged.patterns.insert(merged.patterns.end(), lexicon.patterns.begin(),
                           lexicon.patterns.end());
    merged.normalize_reassembly = merged.normalize_reassembly || lexicon.normalize_reassembly;
  }
  return merged;
}

const FilterLexicon* find_lexicon(const std::vector<FilterLexicon>& suite,
                                  std::string_view name) {
  for (const auto& lexicon : suite) {
    if (lexicon.name == name) {
      return &lexicon;
    }
  }
  return nullptr;
}

std::vector<FilterLexicon> load_filter_suite(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("filter suite is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) {
    throw ParseError("filter suite must be a JSON array");
  }
  std::vector<FilterLexicon> suite;
  std::set<std::string> names;
  for (const auto& node : doc) {
    if (!node.is_object() || !node.contains("name") || !node.at("name").is_string()) {
      throw ParseError("every lexicon needs a string 'name'");
    }
    FilterLexicon lexicon;
    lexicon.name = node.at("name").get<std::string>();
    if (!names.insert(lexicon.name).second) {
      throw ValidationError("duplicate lexicon name '" + lexicon.name + "'");
    }
    if (node.contains("normalize_reassembly")) {
      if (!node.at("normalize_reassembly").is_boolean()) {
        throw ParseError("normalize_reassembly must be a boolean");
      }
      lexicon.normalize_reassembly = node.at("normalize_reassembly").get<bool>();
    }
    if (!node.contains("patterns") || !node.at("patterns").is_array()) {
      throw ParseError("lexicon '" + lexicon.name + "' needs a 'patterns' array");
    }
    for (const auto& p : node.at("patterns")) {
      if (!p.is_object() || !p.contains("pattern") || !p.at("pattern").is_string() ||
          !p.contains("mode") || !p.at("mode").is_string()) {
        throw ParseError("lexicon '" + lexicon.name + "' has a malformed pattern entry");
      }
      ForbiddenPattern pattern{p.at("pattern").get<std::string>(),
                               parse_match_mode(p.at("mode").get<std::string>())};
      validate_pattern(pattern);
      lexicon.patterns.push_back(std::move(pattern));
    }
    suite.push_back(std::move(lexicon));
  }
  return suite;
}

std::vector<FilterLexicon> load_filter_suite_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open filter suite file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_filter_suite(buffer.str());
}

std::string filter_suite_to_json(const std::vector<FilterLexicon>& suite) {
  json doc = json::array();
  for (const auto& lexicon : suite) {
    json patterns = json::array();
    for (const auto& p : lexicon.patterns) {
      patterns.push_back({{"pattern", p.pattern}, {"mode", std::string(to_string(p.mode))}});
    }
    doc.push_back({{"name", lexicon.name},
                   {"normalize_reassembly", lexicon.normalize_reassembly},
                   {"patterns", std::move(patterns)}});
  }
  return doc.dump(2);
}

}  // namespace kropforge
