#include "json.hpp"
#include "kropforge/plan.hpp"

namespace kropforge {

using json = nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json transform_json(const Transform& transform) {
  json node = std::visit(
      overloaded{
          [](const Substitute& t) -> json {
            return {{"find", t.find}, {"replace", t.replace}, {"scope", "all-occurrences"}};
          },
          [](const ExtractStartingAt& t) -> json {
            return {{"marker", t.marker}, {"case_insensitive", t.case_insensitive}};
          },
          [](const PadAfter& t) -> json {
            return {{"anchor", t.anchor}, {"count", t.count}, {"pad_char", std::string(1, t.pad_char)}};
          },
          [](const Concat& t) -> json { return {{"separator", t.separator}}; },
          [](const Combine& t) -> json {
            return {{"subject_step", t.subject_step},
                    {"action_step", t.action_step},
                    {"joiner_template", t.joiner_template}};
          },
          [](const FillTemplate& t) -> json {
            json n = {{"template", t.inline_template}, {"assignments", t.assignments}};
            n["template_step"] = t.template_step ? json(*t.template_step) : json(nullptr);
            return n;
          },
      },
      transform);
  node["type"] = std::string(transform_name(transform));
  return node;
}

const json& field(const json& node, const char* name, const std::string& where) {
  if (!node.is_object() || !node.contains(name)) {
    throw ParseError(where + ": missing field '" + name + "'");
  }
  return node.at(name);
}

std::string str_field(const json& node, const char* name, const std::string& where) {
  const auto& f = field(node, name, where);
  if (!f.is_string()) {
    throw ParseError(where + ": field '" + name + "' must be a string");
  }
  return f.get<std::string>();
}

std::size_t index_value(const json& f, const std::string& where) {
  if (!f.is_number_integer() || f.get<long long>() < 0) {
    throw ParseError(where + ": expected a non-negative integer");
  }
  return f.get<std::size_t>();
}

std::size_t index_field(const json& node, const char* name, const std::string& where) {
  return index_value(field(node, name, where), where + "." + name);
}

std::vector<std::size_t> index_list(const json& node, const char* name, const std::string& where) {
  const auto& f = field(node, name, where);
  if (!f.is_array()) {
    throw ParseError(where + ": field '" + name + "' must be an array");
  }
  std::vector<std::size_t> out;
  for (const auto& item : f) {
    out.push_back(index_value(item, where + "." + name));
  }
  return out;
}

Transform parse_transform(const json& node, const std::string& where) {
  const auto type = str_field(node, "type", where);
  if (type == "substitute") {
    if (node.contains("scope") && node.at("scope") != "all-occurrences") {
      throw ParseError(where + ": substitute only supports scope 'all-occurrences'");
    }
    return Substitute{str_field(node, "find", where), str_field(node, "replace", where)};
  }
  if (type == "extract_starting_at") {
    ExtractStartingAt t{str_field(node, "marker", where), true};
    if (node.contains("case_insensitive")) {
      const auto& ci = node.at("case_insensitive");
      if (!ci.is_boolean()) {
        throw ParseError(where + ": case_insensitive must be a boolean");
      }
      t.case_insensitive = ci.get<bool>();
    }
    return t;
  }
  if (type == "pad_after") {
    const auto pad = node.contains("pad_char") ? str_field(node, "pad_char", where) : std::string(" ");
    if (pad.size() != 1) {
      throw ParseError(where + ": pad_char must be a single character");
    }
    return PadAfter{str_field(node, "anchor", where), index_field(node, "count", where), pad[0]};
  }
  if (type == "concat") {
    return Concat{str_field(node, "separator", where)};
  }
  if (type == "combine") {
    return Combine{index_field(node, "subject_step", where), index_field(node, "action_step", where),
                   node.contains("joiner_template") ? str_field(node, "joiner_template", where)
                                                    : Combine{}.joiner_template};
  }
  if (type == "fill_template") {
    FillTemplate t;
    if (node.contains("template")) {
      t.inline_template = str_field(node, "template", where);
    }
    if (node.contains("template_step") && !node.at("template_step").is_null()) {
      t.template_step = index_field(node, "template_step", where);
    }
    t.assignments = index_list(node, "assignments", where);
    return t;
  }
  throw ParseError(where + ": unknown transform type '" + type + "'");
}

}  // namespace

std::string plan_to_json(const ChainPlan& plan) {
  json doc;
  doc["payload_id"] = plan.payload_id;
  if (plan.payload_text) {
    doc["payload_text"] = *plan.payload_text;
  }
  doc["output_step"] = plan.output_step;
  doc["directives"] = json::array();
  for (const auto d : plan.directives) {
    doc["directives"].push_back(std::string(to_string(d)));
  }
  doc["target_filters"] = plan.target_filters;
  doc["reconstruction_policy"] = std::string(to_string(plan.reconstruction_policy));
  doc["steps"] = json::array();
  for (const auto& step : plan.steps) {
    json node;
    node["index"] = step.index;
    std::visit(overloaded{
                   [&](const ResolveGadget& a) {
                     node["action"] = "resolve_gadget";
                     node["gadget"] = a.gadget_id;
                   },
                   [&](const ApplyTransform& a) {
                     node["action"] = "apply_transform";
                     node["inputs"] = a.inputs;
                     node["transform"] = transform_json(a.transform);
                   },
                   [&](const LiteralText& a) {
                     node["action"] = "literal_text";
                     node["text"] = a.text;
                   },
               },
               step.action);
    doc["steps"].push_back(std::move(node));
  }
  return doc.dump(2);
}

ChainPlan plan_from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("plan is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError("plan must be a JSON object");
  }
  ChainPlan plan;
  plan.payload_id = str_field(doc, "payload_id", "plan");
  if (doc.contains("payload_text")) {
    plan.payload_text = str_field(doc, "payload_text", "plan");
  }
  plan.output_step = index_field(doc, "output_step", "plan");
  if (doc.contains("directives")) {
    for (const auto& d : field(doc, "directives", "plan")) {
      if (!d.is_string()) {
        throw ParseError("plan: directives must be strings");
      }
      plan.directives.insert(parse_directive(d.get<std::string>()));
    }
  }
  if (doc.contains("target_filters")) {
    for (const auto& f : field(doc, "target_filters", "plan")) {
      if (!f.is_string()) {
        throw ParseError("plan: target_filters must be strings");
      }
      plan.target_filters.push_back(f.get<std::string>());
    }
  }
  if (doc.contains("reconstruction_policy")) {
    plan.reconstruction_policy =
        parse_reconstruction_policy(str_field(doc, "reconstruction_policy", "plan"));
  }
  const auto& steps = field(doc, "steps", "plan");
  if (!steps.is_array()) {
    throw ParseError("plan: steps must be an array");
  }
  for (const auto& node : steps) {
    const auto where = "plan step #" + std::to_string(plan.steps.size() + 1);
    ChainStep step;
    step.index = index_field(node, "index", where);
    const auto action = str_field(node, "action", where);
    if (action == "resolve_gadget") {
      step.action = ResolveGadget{str_field(node, "gadget", where)};
    } else if (action == "literal_text") {
      step.action = LiteralText{str_field(node, "text", where)};
    } else if (action == "apply_transform") {
      ApplyTransform apply{parse_transform(field(node, "transform", where), where), {}};
      const bool derived = std::holds_alternative<Combine>(apply.transform) ||
                           std::holds_alternative<FillTemplate>(apply.transform);
      if (node.contains("inputs")) {
        apply.inputs = index_list(node, "inputs", where);
      } else if (!derived) {
        throw ParseError(where + ": missing field 'inputs'");
      }
      step.action = std::move(apply);
      if (derived && !node.contains("inputs")) {
        std::get<ApplyTransform>(step.action).inputs = step_inputs(step);
      }
    } else {
      throw ParseError(where + ": unknown action '" + action + "'");
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

}  // namespace kropforge
