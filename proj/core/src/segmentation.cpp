#include "kropforge/segmentation.hpp"

#include <algorithm>

#include "kropforge/text.hpp"

namespace kropforge {

namespace {

using Cover = std::vector<bool>;

void mark(Cover& cover, std::size_t start, std::size_t end) {
  for (std::size_t i = start; i < end && i < cover.size(); ++i) {
    cover[i] = true;
  }
}

// Snaps runs to code point boundaries and hands edge whitespace back to
// the literals.
Cover canonicalize(std::string_view payload, Cover cover) {
  std::size_t i = 0;
  while (i < payload.size()) {
    const auto len = text::decode_at(payload, i).length;
    bool any = false;
    for (std::size_t k = 0; k < len; ++k) {
      any = any || cover[i + k];
    }
    for (std::size_t k = 0; k < len; ++k) {
      cover[i + k] = any;
    }
    i += len;
  }
  std::size_t pos = 0;
  while (pos < payload.size()) {
    if (!cover[pos]) {
      ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < payload.size() && cover[end]) {
      ++end;
    }
    std::size_t lo = pos;
    std::size_t hi = end;
    while (lo < hi && text::is_space_ascii(payload[lo])) {
      cover[lo++] = false;
    }
    while (hi > lo && text::is_space_ascii(payload[hi - 1])) {
      cover[--hi] = false;
    }
    pos = end;
  }
  return cover;
}

struct Built {
  SegmentedPayload seg;
  // For each template byte, the payload span it stands for.
  std::vector<std::pair<std::size_t, std::size_t>> template_origin;
};

Built build(const Payload& payload, const Cover& cover) {
  Built out;
  out.seg.payload_id = payload.id;
  const std::string_view textv = payload.text;
  std::size_t pos = 0;
  std::size_t blanks = 0;
  while (pos < textv.size()) {
    const bool blank = cover[pos];
    std::size_t end = pos;
    while (end < textv.size() && cover[end] == blank) {
      ++end;
    }
    Segment segment{pos, end, blank ? SegmentKind::kBlank : SegmentKind::kLiteral,
                    blank ? blanks++ : 0};
    out.seg.segments.push_back(segment);
    if (blank) {
      const auto width = text::codepoint_count(textv.substr(pos, end - pos));
      out.seg.template_text.append(width, '_');
      out.template_origin.insert(out.template_origin.end(), width, {pos, end});
    } else {
      out.seg.template_text.append(textv.substr(pos, end - pos));
      for (std::size_t i = pos; i < end; ++i) {
        out.template_origin.push_back({i, i + 1});
      }
    }
    pos = end;
  }
  return out;
}

}  // namespace

std::size_t SegmentedPayload::blank_count() const {
  return static_cast<std::size_t>(std::count_if(
      segments.begin(), segments.end(),
      [](const Segment& s) { return s.kind == SegmentKind::kBlank; }));
}

SegmentedPayload segment_payload(const Payload& payload, const FilterLexicon& lexicon) {
  if (payload.text.empty()) {
    throw SegmentationError(SegmentationError::Kind::kEmptyPayload, "payload text is empty");
  }
  Cover cover(payload.text.size(), false);
  for (const auto& m : filter_check(payload.text, lexicon).matches) {
    mark(cover, m.origin_start, m.origin_end);
  }
  cover = canonicalize(payload.text, std::move(cover));

  while (true) {
    Built built = build(payload, cover);
    const auto& seg = built.seg;
    const std::size_t blanks = seg.blank_count();

    if (blanks > 0) {
      bool anchored = false;
      for (const auto& s : seg.segments) {
        if (s.kind != SegmentKind::kLiteral) {
          continue;
        }
        const auto literal = std::string_view(payload.text).substr(s.start, s.end - s.start);
        if (literal.find('_') != std::string_view::npos) {
          throw SegmentationError(SegmentationError::Kind::kAmbiguousTemplate,
                                  "literal text contains '_' which would read as a blank");
        }
        anchored = anchored || std::any_of(literal.begin(), literal.end(),
                                           [](char c) { return !text::is_space_ascii(c); });
      }
      if (!anchored) {
        throw SegmentationError(SegmentationError::Kind::kDegenerateBlank,
                                "payload '" + payload.id +
                                    "' would be blanked entirely; no literal context remains");
      }
    }

    const auto verdict = filter_check(seg.template_text, lexicon);
    if (!verdict.blocked) {
      return std::move(built.seg);
    }
    Cover next = cover;
    for (const auto& m : verdict.matches) {
      const auto first = built.template_origin[m.origin_start];
      const auto last = built.template_origin[m.origin_end - 1];
      mark(next, first.first, last.second);
    }
    next = canonicalize(payload.text, std::move(next));
    if (next == cover) {
      const auto& m = verdict.matches.front();
      throw SegmentationError(SegmentationError::Kind::kTemplateUnsafe,
                              "template still matches pattern '" + m.pattern +
                                  "' after blanking every matched span");
    }
    cover = std::move(next);
  }
}

std::vector<std::string> hidden_words(const SegmentedPayload& seg, const Payload& payload) {
  if (seg.payload_id != payload.id) {
    throw SegmentationError(SegmentationError::Kind::kMismatchedPayload,
                            "segmentation of '" + seg.payload_id +
                                "' does not belong to payload '" + payload.id + "'");
  }
  std::size_t expected_start = 0;
  for (const auto& s : seg.segments) {
    if (s.start != expected_start || s.end < s.start || s.end > payload.text.size()) {
      throw SegmentationError(SegmentationError::Kind::kMismatchedPayload,
                              "segments do not tile payload '" + payload.id + "'");
    }
    expected_start = s.end;
  }
  if (expected_start != payload.text.size()) {
    throw SegmentationError(SegmentationError::Kind::kMismatchedPayload,
                            "segments do not cover payload '" + payload.id + "'");
  }
  std::vector<std::string> words;
  for (const auto& s : seg.segments) {
    if (s.kind == SegmentKind::kBlank) {
      words.push_back(payload.text.substr(s.start, s.end - s.start));
    }
  }
  return words;
}

std::size_t count_blanks(std::string_view template_text) {
  return blank_widths(template_text).size();
}

std::vector<std::size_t> blank_widths(std::string_view template_text) {
  std::vector<std::size_t> widths;
  std::size_t i = 0;
  while (i < template_text.size()) {
    if (template_text[i] != '_') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < template_text.size() && template_text[j] == '_') {
      ++j;
    }
    widths.push_back(j - i);
    i = j;
  }
  return widths;
}

std::string fill_template(std::string_view template_text, const std::vector<std::string>& words) {
  std::string out;
  out.reserve(template_text.size());
  std::size_t next = 0;
  std::size_t i = 0;
  while (i < template_text.size()) {
    if (template_text[i] != '_') {
      out.push_back(template_text[i++]);
      continue;
    }
    while (i < template_text.size() && template_text[i] == '_') {
      ++i;
    }
    if (next >= words.size()) {
      throw SegmentationError(SegmentationError::Kind::kBlankCountMismatch,
                              "template has more blanks than fill words");
    }
    out += words[next++];
  }
  if (next != words.size()) {
    throw SegmentationError(SegmentationError::Kind::kBlankCountMismatch,
                            "template has " + std::to_string(next) + " blanks but " +
                                std::to_string(words.size()) + " fill words were given");
  }
  return out;
}

}  // namespace kropforge
