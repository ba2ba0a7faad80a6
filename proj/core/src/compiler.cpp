#include "kropforge/compiler.hpp"

#include <algorithm>
#include <set>

#include "kropforge/renderers.hpp"
#include "kropforge/resolver.hpp"

namespace kropforge {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string step_label(std::size_t index) { return "step " + std::to_string(index); }

void check_transform(const ChainStep& step, const ApplyTransform& apply, const ChainPlan& plan,
                     std::vector<Finding>& out) {
  const auto idx = step.index;
  auto invalid = [&](std::string msg) {
    out.push_back({FindingKind::kInvalidTransform, idx, step_label(idx) + ": " + std::move(msg)});
  };
  const auto derived = step_inputs(step);
  std::visit(overloaded{
                 [&](const Substitute& t) {
                   if (t.find.empty()) invalid("substitute needs a nonempty find string");
                 },
                 [&](const ExtractStartingAt& t) {
                   if (t.marker.empty()) invalid("extract_starting_at needs a nonempty marker");
                 },
                 [&](const PadAfter& t) {
                   if (t.anchor.empty()) invalid("pad_after needs a nonempty anchor");
                 },
                 [&](const Concat&) {
                   if (apply.inputs.empty()) invalid("concat needs at least one input");
                 },
                 [&](const Combine&) {
                   if (apply.inputs != derived) {
                     out.push_back({FindingKind::kInputMismatch, idx,
                                    step_label(idx) + ": inputs must be [subject_step, action_step]"});
                   }
                 },
                 [&](const FillTemplate& t) {
                   if (apply.inputs != derived) {
                     out.push_back({FindingKind::kInputMismatch, idx,
                                    step_label(idx) + ": inputs must list the template step and assignments"});
                   }
                   std::optional<std::string> tmpl;
                   if (!t.template_step) {
                     tmpl = t.inline_template;
                   } else if (const auto* src = plan.step(*t.template_step)) {
                     if (const auto* lit = std::get_if<LiteralText>(&src->action)) {
                       tmpl = lit->text;
                     }
                   }
                   if (tmpl && count_blanks(*tmpl) != t.assignments.size()) {
                     out.push_back({FindingKind::kUncoveredBlank, idx,
                                    step_label(idx) + ": template has " +
                                        std::to_string(count_blanks(*tmpl)) + " blanks but " +
                                        std::to_string(t.assignments.size()) + " assignments"});
                   }
                 },
             },
             apply.transform);
  const bool single = std::holds_alternative<Substitute>(apply.transform) ||
                      std::holds_alternative<ExtractStartingAt>(apply.transform) ||
                      std::holds_alternative<PadAfter>(apply.transform);
  if (single && apply.inputs.size() != 1) {
    invalid(std::string(transform_name(apply.transform)) + " takes exactly one input");
  }
}

std::vector<const FilterLexicon*> target_lexicons(const ChainPlan& plan,
                                                  const std::vector<FilterLexicon>& suite) {
  std::vector<const FilterLexicon*> out;
  for (const auto& name : plan.target_filters) {
    if (const auto* lex = find_lexicon(suite, name)) {
      out.push_back(lex);
    }
  }
  return out;
}

void check_text(std::string_view text, std::string_view what, std::size_t step,
                const std::vector<const FilterLexicon*>& lexicons, std::vector<Finding>& out) {
  for (const auto* lex : lexicons) {
    const auto verdict = filter_check(text, *lex);
    if (!verdict.blocked) {
      continue;
    }
    const auto& m = verdict.matches.front();
    out.push_back({FindingKind::kEvasionFailure, step,
                   std::string(what) + " is blocked by lexicon '" + lex->name + "': pattern '" +
                       m.pattern + "' at [" + std::to_string(m.origin_start) + ", " +
                       std::to_string(m.origin_end) + ") \"" +
                       std::string(text.substr(m.origin_start, m.origin_end - m.origin_start)) +
                       "\""});
  }
}

CompileError::Kind error_kind_for(const std::vector<Finding>& findings) {
  const bool evasion = std::any_of(findings.begin(), findings.end(), [](const Finding& f) {
    return f.kind == FindingKind::kEvasionFailure;
  });
  return evasion ? CompileError::Kind::kEvasionFailure : CompileError::Kind::kValidation;
}

std::string summarize(const std::vector<Finding>& findings) {
  std::string out;
  for (const auto& f : findings) {
    if (!out.empty()) {
      out += "; ";
    }
    out += f.message;
  }
  return out;
}

std::vector<std::string> suite_names(const std::vector<FilterLexicon>& suite) {
  std::vector<std::string> names;
  for (const auto& lex : suite) {
    names.push_back(lex.name);
  }
  return names;
}

const std::string* first_gadget(const KnowledgeBase& kb, std::string_view target,
                                std::optional<GadgetCategory> category,
                                std::vector<std::string>& storage) {
  const auto matches = find_gadgets(kb, target);
  if (matches.partial) {
    return nullptr;
  }
  storage.clear();
  for (const auto& id : matches.ids) {
    if (!category || kb.find(id)->category == *category) {
      storage.push_back(id);
    }
  }
  return storage.empty() ? nullptr : &storage.front();
}

ChainPlan compile_numbered(const Payload& payload, const KnowledgeBase& kb,
                           const std::vector<FilterLexicon>& suite) {
  ChainPlan plan;
  plan.payload_id = payload.id;
  plan.payload_text = payload.text;
  plan.target_filters = suite_names(suite);
  plan.directives = {Directive::kOnlyOutputFinal};

  std::vector<std::string> storage;
  if (const auto* whole = first_gadget(kb, payload.text, std::nullopt, storage)) {
    plan.steps.push_back(make_gadget_step(1, *whole));
    plan.output_step = 1;
    return plan;
  }

  SegmentedPayload seg;
  try {
    seg = segment_payload(payload, merge_lexicons(suite, "suite"));
  } catch (const SegmentationError& e) {
    if (e.kind() == SegmentationError::Kind::kDegenerateBlank) {
      throw CompileError(CompileError::Kind::kNoGadgetFound,
                         "no gadget resolves to the whole payload '" + payload.text + "'",
                         payload.text);
    }
    throw CompileError(CompileError::Kind::kEvasionFailure, e.what());
  }

  for (const auto& s : seg.segments) {
    const auto piece = payload.text.substr(s.start, s.end - s.start);
    const auto index = plan.steps.size() + 1;
    if (s.kind == SegmentKind::kLiteral) {
      plan.steps.push_back(make_literal_step(index, piece));
      continue;
    }
    const auto* id = first_gadget(kb, piece, std::nullopt, storage);
    if (id == nullptr) {
      throw CompileError(CompileError::Kind::kNoGadgetFound,
                         "no gadget resolves to segment '" + piece + "'", piece);
    }
    plan.steps.push_back(make_gadget_step(index, *id));
  }
  if (plan.steps.size() == 1) {
    plan.output_step = 1;
    return plan;
  }
  std::vector<std::size_t> inputs;
  for (const auto& s : plan.steps) {
    inputs.push_back(s.index);
  }
  const auto concat_index = plan.steps.size() + 1;
  plan.steps.push_back(make_transform_step(concat_index, Concat{""}, std::move(inputs)));
  plan.output_step = concat_index;
  return plan;
}

ChainPlan compile_madlibs(const Payload& payload, const KnowledgeBase& kb,
                          const std::vector<FilterLexicon>& suite) {
  ChainPlan plan;
  plan.payload_id = payload.id;
  plan.payload_text = payload.text;
  plan.target_filters = suite_names(suite);
  plan.directives = {Directive::kQuietFill};

  FilterLexicon vocabulary{"hint-vocabulary", {}, false};
  for (const auto& [resolution, ids] : kb.resolution_index()) {
    const bool has_hint = std::any_of(ids.begin(), ids.end(), [&](const std::string& id) {
      return !kb.is_hop_target(id) && kb.find(id)->category == GadgetCategory::kHint;
    });
    ForbiddenPattern pattern{resolution, MatchMode::kWordBoundary};
    try {
      validate_pattern(pattern);
    } catch (const ValidationError&) {
      continue;
    }
    if (has_hint) {
      vocabulary.patterns.push_back(std::move(pattern));
    }
  }

  SegmentedPayload seg;
  try {
    seg = segment_payload(payload, vocabulary);
  } catch (const SegmentationError& e) {
    throw CompileError(CompileError::Kind::kEvasionFailure, e.what());
  }

  const auto merged = merge_lexicons(suite, "suite");
  const auto verdict = filter_check(seg.template_text, merged);
  if (verdict.blocked) {
    const auto& m = verdict.matches.front();
    const auto span = seg.template_text.substr(m.origin_start, m.origin_end - m.origin_start);
    throw CompileError(CompileError::Kind::kNoGadgetFound,
                       "no hint gadget covers '" + span + "' (pattern '" + m.pattern + "')", span);
  }

  if (seg.blank_count() == 0) {
    plan.steps.push_back(make_literal_step(1, payload.text));
    plan.output_step = 1;
    return plan;
  }

  std::vector<std::string> storage;
  FillTemplate fill{seg.template_text, std::nullopt, {}};
  for (const auto& word : hidden_words(seg, payload)) {
    const auto* id = first_gadget(kb, word, GadgetCategory::kHint, storage);
    if (id == nullptr) {
      throw CompileError(CompileError::Kind::kNoGadgetFound,
                         "no hint gadget resolves to '" + word + "'", word);
    }
    const auto index = plan.steps.size() + 1;
    plan.steps.push_back(make_gadget_step(index, *id));
    fill.assignments.push_back(index);
  }
  const auto fill_index = plan.steps.size() + 1;
  plan.steps.push_back(make_derived_step(fill_index, std::move(fill)));
  plan.output_step = fill_index;
  return plan;
}

}  // namespace

std::string_view to_string(Strategy strategy) {
  return strategy == Strategy::kMadlibs ? "madlibs" : "numbered-steps";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "numbered-steps" || name == "numbered" || name == "inline") return Strategy::kNumberedSteps;
  if (name == "madlibs") return Strategy::kMadlibs;
  throw ParseError("unknown strategy '" + std::string(name) + "'");
}

std::string_view to_string(FindingKind kind) {
  switch (kind) {
    case FindingKind::kEmptyPlan: return "empty-plan";
    case FindingKind::kIndexMismatch: return "index-mismatch";
    case FindingKind::kMissingOutputStep: return "missing-output-step";
    case FindingKind::kForwardReference: return "forward-reference";
    case FindingKind::kMissingStep: return "missing-step";
    case FindingKind::kDeadStep: return "dead-step";
    case FindingKind::kUnknownGadget: return "unknown-gadget";
    case FindingKind::kInvalidTransform: return "invalid-transform";
    case FindingKind::kInputMismatch: return "input-mismatch";
    case FindingKind::kUncoveredBlank: return "uncovered-blank";
    case FindingKind::kUnknownFilter: return "unknown-filter";
    case FindingKind::kEvasionFailure: return "evasion-failure";
    case FindingKind::kRenderFailure: return "render-failure";
  }
  return "unknown";
}

std::vector<Finding> validate_plan(const ChainPlan& plan, const KnowledgeBase& kb,
                                   const std::vector<FilterLexicon>& suite) {
  std::vector<Finding> out;
  if (plan.steps.empty()) {
    out.push_back({FindingKind::kEmptyPlan, 0, "plan has no steps"});
    return out;
  }
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (plan.steps[i].index != i + 1) {
      out.push_back({FindingKind::kIndexMismatch, plan.steps[i].index,
                     "step at position " + std::to_string(i + 1) + " has index " +
                         std::to_string(plan.steps[i].index)});
    }
  }
  if (plan.step(plan.output_step) == nullptr) {
    out.push_back({FindingKind::kMissingOutputStep, plan.output_step,
                   "output step " + std::to_string(plan.output_step) + " does not exist"});
  }
  for (const auto& name : plan.target_filters) {
    if (find_lexicon(suite, name) == nullptr) {
      out.push_back({FindingKind::kUnknownFilter, 0, "target filter '" + name + "' is not in the suite"});
    }
  }
  const auto targets = target_lexicons(plan, suite);

  for (const auto& step : plan.steps) {
    for (const auto in : step_inputs(step)) {
      if (in >= step.index) {
        out.push_back({FindingKind::kForwardReference, step.index,
                       step_label(step.index) + " references step " + std::to_string(in)});
      } else if (plan.step(in) == nullptr) {
        out.push_back({FindingKind::kMissingStep, step.index,
                       step_label(step.index) + " references missing step " + std::to_string(in)});
      }
    }
    std::visit(overloaded{
                   [&](const ResolveGadget& a) {
                     if (kb.find(a.gadget_id) == nullptr) {
                       out.push_back({FindingKind::kUnknownGadget, step.index,
                                      step_label(step.index) + " resolves unknown gadget '" +
                                          a.gadget_id + "'"});
                     }
                   },
                   [&](const LiteralText& a) {
                     check_text(a.text, step_label(step.index) + " literal text", step.index,
                                targets, out);
                   },
                   [&](const ApplyTransform& a) { check_transform(step, a, plan, out); },
               },
               step.action);
  }

  if (plan.step(plan.output_step) != nullptr) {
    const auto reachable = reachable_steps(plan);
    const std::set<std::size_t> live(reachable.begin(), reachable.end());
    for (const auto& step : plan.steps) {
      if (live.count(step.index) == 0) {
        out.push_back({FindingKind::kDeadStep, step.index,
                       step_label(step.index) + " is unreachable from the output step"});
      }
    }
  }

  if (!out.empty()) {
    return out;
  }
  for (const auto style : supported_styles(plan, kb)) {
    try {
      const auto text = render_text(plan, kb, style);
      check_text(text, std::string(to_string(style)) + " rendering", 0, targets, out);
    } catch (const Error& e) {
      out.push_back({FindingKind::kRenderFailure, 0, e.what()});
    }
  }
  return out;
}

ChainPlan compile_chain(const Payload& payload, const KnowledgeBase& kb,
                        const std::vector<FilterLexicon>& suite, Strategy strategy) {
  if (payload.text.empty()) {
    throw CompileError(CompileError::Kind::kValidation, "payload text is empty");
  }
  if (suite.empty()) {
    throw CompileError(CompileError::Kind::kValidation, "filter suite is empty");
  }
  auto plan = strategy == Strategy::kMadlibs ? compile_madlibs(payload, kb, suite)
                                             : compile_numbered(payload, kb, suite);

  const auto findings = validate_plan(plan, kb, suite);
  if (!findings.empty()) {
    throw CompileError(error_kind_for(findings), summarize(findings));
  }
  const auto resolution = resolve(plan, kb);
  if (!resolution.ok() || resolution.final_text != payload.text) {
    throw CompileError(CompileError::Kind::kReconstruction,
                       "compiled plan does not reconstruct payload '" + payload.id + "'");
  }
  return plan;
}

}  // namespace kropforge
