#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kropforge/errors.hpp"

namespace kropforge {

enum class GadgetCategory { kCulturalReference, kAnecdote, kQuoteLocation, kHint };

std::string_view to_string(GadgetCategory category);
GadgetCategory parse_gadget_category(std::string_view name);

/// Leaf resolution: the exact surface string the clue stands for.
struct DirectResolution {
  std::string value;
  bool operator==(const DirectResolution&) const = default;
};

/// One indirection: the clue points at another gadget.
struct ChainedResolution {
  std::string next;
  std::string hop_text;
  bool operator==(const ChainedResolution&) const = default;
};

using Resolution = std::variant<DirectResolution, ChainedResolution>;

/// A cultural-reference clue with a deterministic resolution.
struct Gadget {
  std::string id;
  std::string clue;
  Resolution resolution;
  GadgetCategory category = GadgetCategory::kCulturalReference;
  std::vector<std::string> tags;
  /// Documentation only ("capitalized", "plural", ...). Never interpreted.
  std::vector<std::string> modifiers;
};

struct OracleHop {
  std::string gadget_id;
  std::string hop_text;  // empty for the Direct leaf
  bool operator==(const OracleHop&) const = default;
};

struct OracleAnswer {
  std::string resolution;
  std::vector<OracleHop> trace;
  bool operator==(const OracleAnswer&) const = default;
};

struct GadgetMatches {
  std::vector<std::string> ids;
  /// True when no exact match existed and `ids` holds substring matches.
  bool partial = false;
};

/// Thrown by oracle_resolve for ids that are absent or chains that are too deep.
class OracleError : public Error {
 public:
  enum class Kind { kUnknownId, kDepthExceeded };
  OracleError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::size_t kDefaultMaxChainDepth = 4;

/// Immutable, validated gadget store. Instances only come out of
/// KnowledgeBase::build (or the load helpers), so every instance satisfies
/// the acyclicity, depth and obfuscation invariants.
class KnowledgeBase {
 public:
  KnowledgeBase() = default;

  /// Validates and indexes `gadgets`. Throws ValidationError on duplicate
  /// ids, dangling next-ids, cycles, chains deeper than `max_chain_depth`,
  /// empty Direct values, or a clue that spells out its own resolution.
  static KnowledgeBase build(std::vector<Gadget> gadgets,
                             std::size_t max_chain_depth = kDefaultMaxChainDepth);

  const Gadget* find(std::string_view id) const;
  const std::map<std::string, Gadget, std::less<>>& gadgets() const { return gadgets_; }
  const std::map<std::string, std::vector<std::string>, std::less<>>& resolution_index() const {
    return resolution_index_;
  }
  std::size_t max_chain_depth() const { return max_chain_depth_; }
  std::size_t size() const { return gadgets_.size(); }

  /// True when some other gadget hops into `id`.
  bool is_hop_target(std::string_view id) const;

 private:
  std::map<std::string, Gadget, std::less<>> gadgets_;
  std::map<std::string, std::vector<std::string>, std::less<>> resolution_index_;
  std::map<std::string, bool, std::less<>> hop_targets_;
  std::size_t max_chain_depth_ = kDefaultMaxChainDepth;
};

/// Parses the JSON knowledge-base document. ParseError for malformed
/// documents, ValidationError for invariant violations.
KnowledgeBase load_kb(std::string_view json_text);
KnowledgeBase load_kb_file(const std::filesystem::path& path);

std::string kb_to_json(const KnowledgeBase& kb);

/// Walks Chained hops down to the Direct leaf.
OracleAnswer oracle_resolve(const KnowledgeBase& kb, std::string_view id);

/// Entry-point gadgets whose final resolution equals `target`; falls back to
/// substring matches (flagged partial) when nothing matches exactly.
/// Gadgets that only serve as an intermediate hop of another chain are not
/// returned. Ids come back in lexicographic order.
GadgetMatches find_gadgets(const KnowledgeBase& kb, std::string_view target);

}  // namespace kropforge
