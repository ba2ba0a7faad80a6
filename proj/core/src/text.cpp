#include "kropforge/text.hpp"

#include <array>

namespace kropforge::text {

DecodedCodepoint decode_at(std::string_view text, std::size_t offset) {
  if (offset >= text.size()) {
    return {};
  }
  const auto lead = static_cast<unsigned char>(text[offset]);
  std::size_t extra = 0;
  std::uint32_t value = 0;
  if (lead < 0x80U) {
    return {lead, 1};
  } else if ((lead & 0xE0U) == 0xC0U) {
    extra = 1;
    value = lead & 0x1FU;
  } else if ((lead & 0xF0U) == 0xE0U) {
    extra = 2;
    value = lead & 0x0FU;
  } else if ((lead & 0xF8U) == 0xF0U) {
    extra = 3;
    value = lead & 0x07U;
  } else {
    return {lead, 1};
  }
  if (offset + extra >= text.size()) {
    return {lead, 1};
  }
  for (std::size_t i = 1; i <= extra; ++i) {
    const auto byte = static_cast<unsigned char>(text[offset + i]);
    if ((byte & 0xC0U) != 0x80U) {
      return {lead, 1};
    }
    value = (value << 6U) | (byte & 0x3FU);
  }
  return {value, extra + 1};
}

std::size_t previous_codepoint_start(std::string_view text, std::size_t offset) {
  if (offset == 0) {
    return 0;
  }
  std::size_t start = offset - 1;
  std::size_t steps = 0;
  while (start > 0 && steps < 3 &&
         (static_cast<unsigned char>(text[start]) & 0xC0U) == 0x80U) {
    --start;
    ++steps;
  }
  // Reject a lead byte whose sequence does not end exactly at offset.
  if (decode_at(text, start).length + start != offset) {
    return offset - 1;
  }
  return start;
}

std::size_t codepoint_count(std::string_view text) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < text.size(); i += decode_at(text, i).length) {
    ++count;
  }
  return count;
}

namespace {
constexpr char fold_char(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}
}  // namespace

std::string fold_ascii(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    c = fold_char(c);
  }
  return out;
}

bool iequals_ascii(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (fold_char(a[i]) != fold_char(b[i])) {
      return false;
    }
  }
  return true;
}

std::size_t ifind_ascii(std::string_view haystack, std::string_view needle,
                        std::size_t from) {
  if (needle.empty()) {
    return from <= haystack.size() ? from : std::string_view::npos;
  }
  if (needle.size() > haystack.size()) {
    return std::string_view::npos;
  }
  for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
    if (iequals_ascii(haystack.substr(i, needle.size()), needle)) {
      return i;
    }
  }
  return std::string_view::npos;
}

bool is_word_codepoint(std::uint32_t cp) {
  if (cp < 0x80U) {
    return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  }
  struct Range {
    std::uint32_t lo;
    std::uint32_t hi;
  };
  // Non-word blocks: Latin-1 punctuation, general punctuation, symbol and
  // arrow blocks, CJK punctuation, fullwidth ASCII punctuation, specials.
  static constexpr std::array<Range, 16> kNonWord{{
      {0x0080, 0x00BF},
      {0x00D7, 0x00D7},
      {0x00F7, 0x00F7},
      {0x2000, 0x206F},
      {0x20A0, 0x20CF},
      {0x2100, 0x214F},
      {0x2190, 0x23FF},
      {0x2500, 0x27BF},
      {0x2E00, 0x2E7F},
      {0x3000, 0x303F},
      {0xFE30, 0xFE4F},
      {0xFF00, 0xFF0F},
      {0xFF1A, 0xFF20},
      {0xFF3B, 0xFF40},
      {0xFF5B, 0xFF65},
      {0xFFF0, 0xFFFF},
  }};
  for (const auto& r : kNonWord) {
    if (cp >= r.lo && cp <= r.hi) {
      return false;
    }
  }
  // Emoji and pictographs.
  if (cp >= 0x1F000 && cp <= 0x1FAFF) {
    return false;
  }
  return true;
}

bool is_space_ascii(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xFU];
    value >>= 4U;
  }
  return out;
}

}  // namespace kropforge::text
