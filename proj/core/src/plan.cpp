#include "kropforge/plan.hpp"

#include <algorithm>

#include "kropforge/segmentation.hpp"
#include "kropforge/text.hpp"

namespace kropforge {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_arity(std::span<const std::string> inputs, std::size_t n, std::string_view name) {
  if (inputs.size() != n) {
    throw TransformError(TransformError::Kind::kBadArity,
                         std::string(name) + " expects " + std::to_string(n) + " input(s), got " +
                             std::to_string(inputs.size()));
  }
}

std::string substitute_all(std::string_view input, const Substitute& t) {
  if (t.find.empty()) {
    throw TransformError(TransformError::Kind::kInvalid, "substitute needs a nonempty find string");
  }
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto hit = input.find(t.find, pos);
    if (hit == std::string_view::npos) {
      out.append(input.substr(pos));
      return out;
    }
    out.append(input.substr(pos, hit - pos));
    out += t.replace;
    pos = hit + t.find.size();
  }
}

std::string combine(const Combine& t, std::string_view subject, std::string_view action) {
  static constexpr std::string_view kSubject = "SUBJECT";
  static constexpr std::string_view kAction = "ACTION";
  std::string out;
  std::string_view tmpl = t.joiner_template;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl.substr(i, kSubject.size()) == kSubject) {
      out += subject;
      i += kSubject.size();
    } else if (tmpl.substr(i, kAction.size()) == kAction) {
      out += action;
      i += kAction.size();
    } else {
      out.push_back(tmpl[i++]);
    }
  }
  return out;
}

}  // namespace

std::string_view transform_name(const Transform& transform) {
  return std::visit(overloaded{
                        [](const Substitute&) { return std::string_view("substitute"); },
                        [](const ExtractStartingAt&) { return std::string_view("extract_starting_at"); },
                        [](const PadAfter&) { return std::string_view("pad_after"); },
                        [](const Concat&) { return std::string_view("concat"); },
                        [](const Combine&) { return std::string_view("combine"); },
                        [](const FillTemplate&) { return std::string_view("fill_template"); },
                    },
                    transform);
}

std::string apply_transform(const Transform& transform, std::span<const std::string> inputs) {
  return std::visit(
      overloaded{
          [&](const Substitute& t) {
            require_arity(inputs, 1, "substitute");
            return substitute_all(inputs[0], t);
          },
          [&](const ExtractStartingAt& t) {
            require_arity(inputs, 1, "extract_starting_at");
            if (t.marker.empty()) {
              throw TransformError(TransformError::Kind::kInvalid,
                                   "extract_starting_at needs a nonempty marker");
            }
            const auto& in = inputs[0];
            const auto hit = t.case_insensitive ? text::ifind_ascii(in, t.marker) : in.find(t.marker);
            if (hit == std::string::npos) {
              throw TransformError(TransformError::Kind::kMarkerAbsent,
                                   "marker '" + t.marker + "' not found");
            }
            return in.substr(hit);
          },
          [&](const PadAfter& t) {
            require_arity(inputs, 1, "pad_after");
            if (t.anchor.empty()) {
              throw TransformError(TransformError::Kind::kInvalid, "pad_after needs a nonempty anchor");
            }
            auto out = inputs[0];
            const auto hit = out.find(t.anchor);
            if (hit == std::string::npos) {
              throw TransformError(TransformError::Kind::kAnchorAbsent,
                                   "anchor '" + t.anchor + "' not found");
            }
            out.insert(hit + t.anchor.size(), t.count, t.pad_char);
            return out;
          },
          [&](const Concat& t) {
            if (inputs.empty()) {
              throw TransformError(TransformError::Kind::kBadArity, "concat needs at least one input");
            }
            std::string out = inputs[0];
            for (std::size_t i = 1; i < inputs.size(); ++i) {
              out += t.separator;
              out += inputs[i];
            }
            return out;
          },
          [&](const Combine& t) {
            require_arity(inputs, 2, "combine");
            return combine(t, inputs[0], inputs[1]);
          },
          [&](const FillTemplate& t) {
            std::string_view tmpl = t.inline_template;
            auto words = inputs;
            if (t.template_step) {
              if (inputs.empty()) {
                throw TransformError(TransformError::Kind::kBadArity, "fill_template is missing its template input");
              }
              tmpl = inputs[0];
              words = inputs.subspan(1);
            }
            if (words.size() != t.assignments.size()) {
              throw TransformError(TransformError::Kind::kBadArity,
                                   "fill_template got " + std::to_string(words.size()) +
                                       " values for " + std::to_string(t.assignments.size()) +
                                       " assignments");
            }
            try {
              return fill_template(tmpl, std::vector<std::string>(words.begin(), words.end()));
            } catch (const SegmentationError& e) {
              throw TransformError(TransformError::Kind::kTemplate, e.what());
            }
          },
      },
      transform);
}

std::string_view to_string(Directive directive) {
  switch (directive) {
    case Directive::kOnlyOutputFinal:
      return "only-output-final";
    case Directive::kQuietFill:
      return "quiet-fill";
    case Directive::kNoTrademarkNames:
      return "no-trademark-names";
  }
  return "only-output-final";
}

Directive parse_directive(std::string_view name) {
  if (name == "only-output-final") return Directive::kOnlyOutputFinal;
  if (name == "quiet-fill") return Directive::kQuietFill;
  if (name == "no-trademark-names") return Directive::kNoTrademarkNames;
  throw ParseError("unknown directive '" + std::string(name) + "'");
}

std::string_view to_string(ReconstructionPolicy policy) {
  return policy == ReconstructionPolicy::kStrict ? "strict" : "trailing-lenient";
}

ReconstructionPolicy parse_reconstruction_policy(std::string_view name) {
  if (name == "strict") return ReconstructionPolicy::kStrict;
  if (name == "trailing-lenient") return ReconstructionPolicy::kTrailingLenient;
  throw ParseError("unknown reconstruction policy '" + std::string(name) + "'");
}

const ChainStep* ChainPlan::step(std::size_t index) const {
  for (const auto& s : steps) {
    if (s.index == index) {
      return &s;
    }
  }
  return nullptr;
}

std::vector<std::size_t> step_inputs(const ChainStep& step) {
  const auto* apply = std::get_if<ApplyTransform>(&step.action);
  if (apply == nullptr) {
    return {};
  }
  if (const auto* c = std::get_if<Combine>(&apply->transform)) {
    return {c->subject_step, c->action_step};
  }
  if (const auto* f = std::get_if<FillTemplate>(&apply->transform)) {
    std::vector<std::size_t> out;
    if (f->template_step) {
      out.push_back(*f->template_step);
    }
    out.insert(out.end(), f->assignments.begin(), f->assignments.end());
    return out;
  }
  return apply->inputs;
}

std::vector<std::size_t> reachable_steps(const ChainPlan& plan) {
  std::set<std::size_t> seen;
  std::vector<std::size_t> stack{plan.output_step};
  while (!stack.empty()) {
    const auto index = stack.back();
    stack.pop_back();
    const auto* s = plan.step(index);
    if (s == nullptr || !seen.insert(index).second) {
      continue;
    }
    for (const auto in : step_inputs(*s)) {
      stack.push_back(in);
    }
  }
  return {seen.begin(), seen.end()};
}

std::string plan_hash(const ChainPlan& plan) {
  return text::hex64(text::fnv1a64(plan_to_json(plan)));
}

ChainStep make_gadget_step(std::size_t index, std::string gadget_id) {
  return {index, ResolveGadget{std::move(gadget_id)}};
}

ChainStep make_literal_step(std::size_t index, std::string text) {
  return {index, LiteralText{std::move(text)}};
}

ChainStep make_transform_step(std::size_t index, Transform transform,
                              std::vector<std::size_t> inputs) {
  return {index, ApplyTransform{std::move(transform), std::move(inputs)}};
}

ChainStep make_derived_step(std::size_t index, Transform transform) {
  ChainStep step{index, ApplyTransform{std::move(transform), {}}};
  std::get<ApplyTransform>(step.action).inputs = step_inputs(step);
  return step;
}

}  // namespace kropforge
