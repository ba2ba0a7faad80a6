#include "kropforge/knowledge_base.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kropforge/text.hpp"

namespace kropforge {

using json = nlohmann::json;

namespace {

struct CategoryName {
  GadgetCategory category;
  std::string_view name;
};

constexpr CategoryName kCategoryNames[] = {
    {GadgetCategory::kCulturalReference, "cultural-reference"},
    {GadgetCategory::kAnecdote, "anecdote"},
    {GadgetCategory::kQuoteLocation, "quote-location"},
    {GadgetCategory::kHint, "hint"},
};

// Follows hops from `start`; returns the leaf id and the hop count
// (number of gadgets visited). Throws ValidationError on cycles or
// dangling references.
std::pair<std::string, std::size_t> walk_to_leaf(
    const std::map<std::string, Gadget, std::less<>>& gadgets, const std::string& start) {
  std::set<std::string> seen;
  std::string current = start;
  std::size_t visited = 0;
  while (true) {
    auto it = gadgets.find(current);
    if (it == gadgets.end()) {
      throw ValidationError("gadget '" + start + "' chains to unknown gadget '" + current + "'");
    }
    if (!seen.insert(current).second) {
      throw ValidationError("gadget '" + start + "' is part of a resolution cycle through '" +
                            current + "'");
    }
    ++visited;
    if (const auto* chained = std::get_if<ChainedResolution>(&it->second.resolution)) {
      current = chained->next;
      continue;
    }
    return {current, visited};
  }
}

std::vector<std::string> string_list(const json& node, const char* field) {
  std::vector<std::string> out;
  if (!node.contains(field)) {
    return out;
  }
  const auto& arr = node.at(field);
  if (!arr.is_array()) {
    throw ParseError(std::string("field '") + field + "' must be an array of strings");
  }
  for (const auto& item : arr) {
    if (!item.is_string()) {
      throw ParseError(std::string("field '") + field + "' must be an array of strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::string required_string(const json& node, const char* field, const std::string& where) {
  if (!node.contains(field) || !node.at(field).is_string()) {
    throw ParseError(where + ": missing string field '" + field + "'");
  }
  return node.at(field).get<std::string>();
}

}  // namespace

std::string_view to_string(GadgetCategory category) {
  for (const auto& entry : kCategoryNames) {
    if (entry.category == category) {
      return entry.name;
    }
  }
  return "cultural-reference";
}

GadgetCategory parse_gadget_category(std::string_view name) {
  for (const auto& entry : kCategoryNames) {
    if (entry.name == name) {
      return entry.category;
    }
  }
  throw ParseError("unknown gadget category '" + std::string(name) + "'");
}

KnowledgeBase KnowledgeBase::build(std::vector<Gadget> gadgets, std::size_t max_chain_depth) {
  if (max_chain_depth == 0) {
    throw ValidationError("max_chain_depth must be positive");
  }
  KnowledgeBase kb;
  kb.max_chain_depth_ = max_chain_depth;
  for (auto& gadget : gadgets) {
    if (gadget.id.empty()) {
      throw ValidationError("gadget id must be nonempty");
    }
    if (const auto* direct = std::get_if<DirectResolution>(&gadget.resolution)) {
      if (direct->value.empty()) {
        throw ValidationError("gadget '" + gadget.id + "' has an empty direct resolution");
      }
    }
    const std::string id = gadget.id;
    if (!kb.gadgets_.emplace(id, std::move(gadget)).second) {
      throw ValidationError("duplicate gadget id '" + id + "'");
    }
  }

  for (const auto& [id, gadget] : kb.gadgets_) {
    if (const auto* chained = std::get_if<ChainedResolution>(&gadget.resolution)) {
      kb.hop_targets_[chained->next] = true;
    }
  }

  for (const auto& [id, gadget] : kb.gadgets_) {
    const auto [leaf, depth] = walk_to_leaf(kb.gadgets_, id);
    if (depth > max_chain_depth) {
      throw ValidationError("gadget '" + id + "' needs " + std::to_string(depth) +
                            " hops, exceeding max_chain_depth " +
                            std::to_string(max_chain_depth));
    }
    const auto& value = std::get<DirectResolution>(kb.gadgets_.at(leaf).resolution).value;
    if (text::ifind_ascii(gadget.clue, value) != std::string_view::npos) {
      throw ValidationError("gadget '" + id + "' clue contains its own resolution '" + value +
                            "'");
    }
    kb.resolution_index_[value].push_back(id);
  }
  return kb;
}

const Gadget* KnowledgeBase::find(std::string_view id) const {
  auto it = gadgets_.find(id);
  return it == gadgets_.end() ? nullptr : &it->second;
}

bool KnowledgeBase::is_hop_target(std::string_view id) const {
  return hop_targets_.find(id) != hop_targets_.end();
}

KnowledgeBase load_kb(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("knowledge base is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ParseError("knowledge base must be a JSON object");
  }
  std::size_t depth = kDefaultMaxChainDepth;
  if (doc.contains("max_chain_depth")) {
    const auto& node = doc.at("max_chain_depth");
    if (!node.is_number_integer()) {
      throw ParseError("max_chain_depth must be an integer");
    }
    const auto value = node.get<long long>();
    if (value <= 0) {
      throw ValidationError("max_chain_depth must be positive");
    }
    depth = static_cast<std::size_t>(value);
  }
  if (!doc.contains("gadgets") || !doc.at("gadgets").is_array()) {
    throw ParseError("knowledge base needs a 'gadgets' array");
  }

  std::vector<Gadget> gadgets;
  std::size_t position = 0;
  for (const auto& node : doc.at("gadgets")) {
    const std::string where = "gadget #" + std::to_string(position++);
    if (!node.is_object()) {
      throw ParseError(where + " must be an object");
    }
    Gadget g;
    g.id = required_string(node, "id", where);
    g.clue = required_string(node, "clue", where);
    g.category = parse_gadget_category(required_string(node, "category", where));
    g.tags = string_list(node, "tags");
    g.modifiers = string_list(node, "modifiers");
    if (!node.contains("resolution") || !node.at("resolution").is_object()) {
      throw ParseError(where + ": missing 'resolution' object");
    }
    const auto& res = node.at("resolution");
    const auto type = required_string(res, "type", where + " resolution");
    if (type == "direct") {
      g.resolution = DirectResolution{required_string(res, "value", where + " resolution")};
    } else if (type == "chained") {
      g.resolution = ChainedResolution{required_string(res, "next", where + " resolution"),
                                       required_string(res, "hop_text", where + " resolution")};
    } else {
      throw ParseError(where + ": unknown resolution type '" + type + "'");
    }
    gadgets.push_back(std::move(g));
  }
  return KnowledgeBase::build(std::move(gadgets), depth);
}

KnowledgeBase load_kb_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open knowledge base file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_kb(buffer.str());
}

std::string kb_to_json(const KnowledgeBase& kb) {
  json doc;
  doc["max_chain_depth"] = kb.max_chain_depth();
  doc["gadgets"] = json::array();
  for (const auto& [id, g] : kb.gadgets()) {
    json node;
    node["id"] = g.id;
    node["clue"] = g.clue;
    node["category"] = std::string(to_string(g.category));
    node["tags"] = g.tags;
    node["modifiers"] = g.modifiers;
    if (const auto* direct = std::get_if<DirectResolution>(&g.resolution)) {
      node["resolution"] = {{"type", "direct"}, {"value", direct->value}};
    } else {
      const auto& chained = std::get<ChainedResolution>(g.resolution);
      node["resolution"] = {
          {"type", "chained"}, {"next", chained.next}, {"hop_text", chained.hop_text}};
    }
    doc["gadgets"].push_back(std::move(node));
  }
  return doc.dump(2);
}

OracleAnswer oracle_resolve(const KnowledgeBase& kb, std::string_view id) {
  OracleAnswer answer;
  std::string current(id);
  while (true) {
    const Gadget* gadget = kb.find(current);
    if (gadget == nullptr) {
      throw OracleError(OracleError::Kind::kUnknownId, "unknown gadget id '" + current + "'");
    }
    if (answer.trace.size() >= kb.max_chain_depth()) {
      throw OracleError(OracleError::Kind::kDepthExceeded,
                        "resolving '" + std::string(id) + "' exceeds max_chain_depth " +
                            std::to_string(kb.max_chain_depth()));
    }
    if (const auto* chained = std::get_if<ChainedResolution>(&gadget->resolution)) {
      answer.trace.push_back({gadget->id, chained->hop_text});
      current = chained->next;
      continue;
    }
    answer.trace.push_back({gadget->id, ""});
    answer.resolution = std::get<DirectResolution>(gadget->resolution).value;
    return answer;
  }
}

GadgetMatches find_gadgets(const KnowledgeBase& kb, std::string_view target) {
  GadgetMatches result;
  if (target.empty()) {
    return result;
  }
  // resolution_index_ lists ids in map (lexicographic) order already.
  if (auto it = kb.resolution_index().find(target); it != kb.resolution_index().end()) {
    for (const auto& id : it->second) {
      if (!kb.is_hop_target(id)) {
        result.ids.push_back(id);
      }
    }
  }
  if (!result.ids.empty()) {
    return result;
  }
  for (const auto& [resolution, ids] : kb.resolution_index()) {
    if (resolution.find(target) == std::string::npos) {
      continue;
    }
    for (const auto& id : ids) {
      if (!kb.is_hop_target(id)) {
        result.ids.push_back(id);
      }
    }
  }
  std::sort(result.ids.begin(), result.ids.end());
  result.partial = !result.ids.empty();
  return result;
}

}  // namespace kropforge
