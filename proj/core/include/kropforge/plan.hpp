#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kropforge/errors.hpp"

namespace kropforge {

// ---------------------------------------------------------------------------
// Transforms. Each one is a pure function of its ordered string inputs.
// ---------------------------------------------------------------------------

/// Replace every occurrence of `find` with `replace`.
struct Substitute {
  std::string find;
  std::string replace;
  bool operator==(const Substitute&) const = default;
};

/// Keep everything from the first occurrence of `marker` to the end.
struct ExtractStartingAt {
  std::string marker;
  bool case_insensitive = true;
  bool operator==(const ExtractStartingAt&) const = default;
};

/// Insert `count` copies of `pad_char` right after the first `anchor`.
struct PadAfter {
  std::string anchor;
  std::size_t count = 0;
  char pad_char = ' ';
  bool operator==(const PadAfter&) const = default;
};

struct Concat {
  std::string separator;
  bool operator==(const Concat&) const = default;
};

/// Joins a subject and an action through a template with SUBJECT and
/// ACTION slots, e.g. "SUBJECT ACTION" -> "Mickey Mouse smoking".
struct Combine {
  std::size_t subject_step = 0;
  std::size_t action_step = 0;
  std::string joiner_template = "SUBJECT ACTION";
  bool operator==(const Combine&) const = default;
};

/// Fills the underscore runs of a template. The template is either inline
/// or the value of `template_step`; assignments[k] is the step whose value
/// goes into blank k.
struct FillTemplate {
  std::string inline_template;
  std::optional<std::size_t> template_step;
  std::vector<std::size_t> assignments;
  bool operator==(const FillTemplate&) const = default;
};

using Transform = std::variant<Substitute, ExtractStartingAt, PadAfter, Concat, Combine, FillTemplate>;

std::string_view transform_name(const Transform& transform);

class TransformError : public Error {
 public:
  enum class Kind { kMarkerAbsent, kAnchorAbsent, kBadArity, kTemplate, kInvalid };
  TransformError(Kind kind, const std::string& message) : Error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Applies `transform` to its inputs (in the order given by step_inputs).
std::string apply_transform(const Transform& transform, std::span<const std::string> inputs);

// ---------------------------------------------------------------------------
// Steps and plans.
// ---------------------------------------------------------------------------

struct ResolveGadget {
  std::string gadget_id;
  bool operator==(const ResolveGadget&) const = default;
};

struct ApplyTransform {
  Transform transform;
  std::vector<std::size_t> inputs;
  bool operator==(const ApplyTransform&) const = default;
};

struct LiteralText {
  std::string text;
  bool operator==(const LiteralText&) const = default;
};

using StepAction = std::variant<ResolveGadget, ApplyTransform, LiteralText>;

struct ChainStep {
  std::size_t index = 0;  // 1-based
  StepAction action;
  bool operator==(const ChainStep&) const = default;
};

enum class Directive { kOnlyOutputFinal, kQuietFill, kNoTrademarkNames };

std::string_view to_string(Directive directive);
Directive parse_directive(std::string_view name);

enum class ReconstructionPolicy { kStrict, kTrailingLenient };

std::string_view to_string(ReconstructionPolicy policy);
ReconstructionPolicy parse_reconstruction_policy(std::string_view name);

struct ChainPlan {
  std::string payload_id;
  std::vector<ChainStep> steps;
  std::size_t output_step = 0;
  std::set<Directive> directives;
  std::vector<std::string> target_filters;
  ReconstructionPolicy reconstruction_policy = ReconstructionPolicy::kStrict;
  /// The payload the plan was compiled for, when known. Carried in plan
  /// files so `verify` can check reconstruction without a second input.
  std::optional<std::string> payload_text;

  const ChainStep* step(std::size_t index) const;
  bool operator==(const ChainPlan&) const = default;
};

/// The steps whose values feed `step`, in the order apply_transform expects.
/// Combine and FillTemplate derive them from their own fields.
std::vector<std::size_t> step_inputs(const ChainStep& step);

/// Steps reachable from the output step, ascending. Ignores references to
/// steps that do not exist.
std::vector<std::size_t> reachable_steps(const ChainPlan& plan);

/// Stable hash of the canonical plan JSON; renderings and resolutions carry
/// it so they can be matched to the exact plan they came from.
std::string plan_hash(const ChainPlan& plan);

std::string plan_to_json(const ChainPlan& plan);
ChainPlan plan_from_json(std::string_view json_text);

// Step builders used by the compiler and the fixtures.
ChainStep make_gadget_step(std::size_t index, std::string gadget_id);
ChainStep make_literal_step(std::size_t index, std::string text);
ChainStep make_transform_step(std::size_t index, Transform transform,
                              std::vector<std::size_t> inputs);
/// Combine and FillTemplate steps with inputs derived from the transform.
ChainStep make_derived_step(std::size_t index, Transform transform);

}  // namespace kropforge
