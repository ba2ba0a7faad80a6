#include "kropforge/resolver.hpp"

#include <map>

#include "kropforge/text.hpp"

namespace kropforge {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ResolutionResult failed(ResolutionResult result, std::size_t step, std::string reason) {
  result.status = ResolutionStatus::kFailed;
  result.failed_step = step;
  result.failure_reason = std::move(reason);
  result.final_text.clear();
  return result;
}

std::string_view rstrip_space(std::string_view s) {
  while (!s.empty() && text::is_space_ascii(s.back())) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

ResolutionResult resolve(const ChainPlan& plan, const KnowledgeBase& kb) {
  ResolutionResult result;
  result.plan_id = plan.payload_id;
  result.plan_hash = plan_hash(plan);

  if (plan.step(plan.output_step) == nullptr) {
    return failed(std::move(result), plan.output_step, "output step does not exist");
  }

  std::map<std::size_t, std::string> values;
  for (const auto index : reachable_steps(plan)) {
    const auto* step = plan.step(index);
    TraceEntry entry{index, {}, {}};
    try {
      std::visit(overloaded{
                     [&](const ResolveGadget& a) {
                       auto answer = oracle_resolve(kb, a.gadget_id);
                       entry.value = std::move(answer.resolution);
                       entry.hops = std::move(answer.trace);
                     },
                     [&](const LiteralText& a) { entry.value = a.text; },
                     [&](const ApplyTransform& a) {
                       std::vector<std::string> inputs;
                       for (const auto in : step_inputs(*step)) {
                         auto it = values.find(in);
                         if (in >= index || it == values.end()) {
                           throw ResolveError(index, "step " + std::to_string(index) +
                                                         " reads step " + std::to_string(in) +
                                                         " which is not available");
                         }
                         inputs.push_back(it->second);
                       }
                       entry.value = apply_transform(a.transform, inputs);
                     },
                 },
                 step->action);
    } catch (const Error& e) {
      return failed(std::move(result), index, e.what());
    }
    values[index] = entry.value;
    result.trace.push_back(std::move(entry));
  }
  result.final_text = values.at(plan.output_step);
  return result;
}

std::string apply_reconstruction_policy(std::string_view text, ReconstructionPolicy policy) {
  if (policy == ReconstructionPolicy::kStrict) {
    return std::string(text);
  }
  auto view = rstrip_space(text);
  const auto last_newline = view.rfind('\n');
  const auto search_from = last_newline == std::string_view::npos ? 0 : last_newline + 1;
  const auto comment = view.find("--", search_from);
  if (comment != std::string_view::npos) {
    view = rstrip_space(view.substr(0, comment));
  }
  return std::string(view);
}

ReconstructionResult reconstruction_check(const ChainPlan& plan, const KnowledgeBase& kb,
                                          const Payload& payload,
                                          std::optional<ReconstructionPolicy> policy) {
  const auto resolution = resolve(plan, kb);
  if (!resolution.ok()) {
    throw ResolveError(resolution.failed_step, resolution.failure_reason);
  }
  ReconstructionResult out;
  out.policy = policy.value_or(plan.reconstruction_policy);
  out.final_text = resolution.final_text;
  const auto got = apply_reconstruction_policy(resolution.final_text, out.policy);
  const auto want = apply_reconstruction_policy(payload.text, out.policy);
  out.matched = got == want;
  if (!out.matched) {
    std::size_t i = 0;
    while (i < got.size() && i < want.size() && got[i] == want[i]) {
      ++i;
    }
    out.first_divergence = i;
  }
  return out;
}

}  // namespace kropforge
