#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kropforge/errors.hpp"
#include "kropforge/knowledge_base.hpp"
#include "kropforge/plan.hpp"
#include "kropforge/segmentation.hpp"

namespace kropforge {

struct TraceEntry {
  std::size_t step = 0;
  std::string value;
  std::vector<OracleHop> hops;  // oracle trace for ResolveGadget steps
  bool operator==(const TraceEntry&) const = default;
};

enum class ResolutionStatus { kOk, kFailed };

struct ResolutionResult {
  std::string plan_id;
  std::string plan_hash;
  std::string final_text;
  std::vector<TraceEntry> trace;
  ResolutionStatus status = ResolutionStatus::kOk;
  std::size_t failed_step = 0;
  std::string failure_reason;

  bool ok() const { return status == ResolutionStatus::kOk; }
  bool operator==(const ResolutionResult&) const = default;
};

/// Executes the steps reachable from the output step in index order. The
/// first failing step aborts the run: the result carries the failing step
/// and reason and an empty final_text.
ResolutionResult resolve(const ChainPlan& plan, const KnowledgeBase& kb);

class ResolveError : public Error {
 public:
  ResolveError(std::size_t step, const std::string& message) : Error(message), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Strict: unchanged. Trailing-lenient: strips trailing whitespace, then a
/// trailing `--` SQL comment, then whitespace again.
std::string apply_reconstruction_policy(std::string_view text, ReconstructionPolicy policy);

struct ReconstructionResult {
  bool matched = false;
  ReconstructionPolicy policy = ReconstructionPolicy::kStrict;
  std::string final_text;
  /// First differing byte offset of the policy-normalized strings.
  std::optional<std::size_t> first_divergence;
};

/// Compares the resolved text with the payload under `policy` (defaults to
/// the plan's declared policy). Throws ResolveError when resolution fails.
ReconstructionResult reconstruction_check(const ChainPlan& plan, const KnowledgeBase& kb,
                                          const Payload& payload,
                                          std::optional<ReconstructionPolicy> policy = {});

}  // namespace kropforge
