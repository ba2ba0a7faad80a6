#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kropforge/errors.hpp"
#include "kropforge/filters.hpp"
#include "kropforge/knowledge_base.hpp"
#include "kropforge/plan.hpp"
#include "kropforge/segmentation.hpp"

namespace kropforge {

enum class Strategy { kNumberedSteps, kMadlibs };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view name);

enum class FindingKind {
  kEmptyPlan,
  kIndexMismatch,      // steps[i].index != i + 1
  kMissingOutputStep,
  kForwardReference,   // reads a step with index >= its own
  kMissingStep,        // reads a step that does not exist
  kDeadStep,           // unreachable from the output step
  kUnknownGadget,
  kInvalidTransform,
  kInputMismatch,      // ApplyTransform.inputs disagrees with Combine/FillTemplate fields
  kUncoveredBlank,     // FillTemplate assignments do not cover the blanks exactly once
  kUnknownFilter,
  kEvasionFailure,
  kRenderFailure,
};

std::string_view to_string(FindingKind kind);

struct Finding {
  FindingKind kind;
  std::size_t step = 0;  // 0 when the finding is plan-wide
  std::string message;
};

/// Re-checks structure, gadget existence, and that every LiteralText step and
/// every style the plan can be rendered in pass the lexicons named in
/// plan.target_filters. An empty result means the plan is valid.
std::vector<Finding> validate_plan(const ChainPlan& plan, const KnowledgeBase& kb,
                                   const std::vector<FilterLexicon>& suite);

class CompileError : public Error {
 public:
  enum class Kind { kNoGadgetFound, kEvasionFailure, kValidation, kReconstruction };
  CompileError(Kind kind, const std::string& message, std::string subject = {})
      : Error(message), kind_(kind), subject_(std::move(subject)) {}
  Kind kind() const noexcept { return kind_; }
  /// The unresolvable segment, blocked span or failing step, when there is one.
  const std::string& subject() const noexcept { return subject_; }

 private:
  Kind kind_;
  std::string subject_;
};

/// Builds a plan whose resolution equals payload.text and whose renderings
/// pass every lexicon in `suite`. Gadget ties break on the lowest id.
///
/// numbered-steps: one whole-payload gadget if the KB has it; otherwise the
/// payload is segmented against the merged suite, blanks become gadget
/// steps, literals become LiteralText steps, and a Concat joins them.
///
/// madlibs: every word the KB has a hint gadget for is blanked; the template
/// must then pass the suite, and each blank gets its hint gadget.
ChainPlan compile_chain(const Payload& payload, const KnowledgeBase& kb,
                        const std::vector<FilterLexicon>& suite, Strategy strategy);

}  // namespace kropforge
