#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kropforge/errors.hpp"
#include "kropforge/filters.hpp"

namespace kropforge {

/// The exact attack string a chain has to reconstruct.
struct Payload {
  std::string id;
  std::string text;
};

enum class SegmentKind { kLiteral, kBlank };

struct Segment {
  std::size_t start = 0;  // byte offsets into the payload text
  std::size_t end = 0;
  SegmentKind kind = SegmentKind::kLiteral;
  std::size_t blank_index = 0;  // ordinal among blanks; meaningful for kBlank only
  bool operator==(const Segment&) const = default;
};

/// A payload split into literal text and blanks. The template renders each
/// blank as one underscore per hidden code point; whitespace around a blank
/// always belongs to the neighbouring literal.
struct SegmentedPayload {
  std::string payload_id;
  std::vector<Segment> segments;
  std::string template_text;

  std::size_t blank_count() const;
};

class SegmentationError : public Error {
 public:
  enum class Kind {
    kEmptyPayload,
    kDegenerateBlank,     // no literal context left to anchor a template
    kAmbiguousTemplate,   // a literal contains '_' next to real blanks
    kTemplateUnsafe,      // template still trips the lexicon after blanking
    kMismatchedPayload,
    kBlankCountMismatch,
  };
  SegmentationError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Blanks every maximal span that the lexicon matches (in any view) and
/// re-checks the template until it passes the same lexicon.
SegmentedPayload segment_payload(const Payload& payload, const FilterLexicon& lexicon);

/// The substrings hidden behind each blank, in blank order.
std::vector<std::string> hidden_words(const SegmentedPayload& seg, const Payload& payload);

/// Replaces the k-th run of underscores in `template_text` with words[k].
std::string fill_template(std::string_view template_text, const std::vector<std::string>& words);

/// Number of maximal underscore runs.
std::size_t count_blanks(std::string_view template_text);

/// Code point length of each underscore run, in order.
std::vector<std::size_t> blank_widths(std::string_view template_text);

}  // namespace kropforge
