#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

// Small UTF-8 and ASCII helpers shared by the filter, segmentation and
// resolver code. Invalid UTF-8 bytes decode as single-byte code points so
// no input is ever rejected.
namespace kropforge::text {

struct DecodedCodepoint {
  std::uint32_t value = 0;
  std::size_t length = 0;
};

DecodedCodepoint decode_at(std::string_view text, std::size_t offset);

/// Offset of the code point that ends immediately before `offset`.
std::size_t previous_codepoint_start(std::string_view text, std::size_t offset);

std::size_t codepoint_count(std::string_view text);

/// ASCII-only case fold; byte length is preserved.
std::string fold_ascii(std::string_view text);

bool iequals_ascii(std::string_view a, std::string_view b);

std::size_t ifind_ascii(std::string_view haystack, std::string_view needle,
                        std::size_t from = 0);

/// Letters and digits, ASCII plus the non-ASCII ranges that are not
/// punctuation, symbols or spaces.
bool is_word_codepoint(std::uint32_t cp);

bool is_space_ascii(char c);

/// 64-bit FNV-1a, stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view bytes);

std::string hex64(std::uint64_t value);

}  // namespace kropforge::text
