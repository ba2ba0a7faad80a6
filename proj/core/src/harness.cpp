#include "kropforge/harness.hpp"

#include <chrono>
#include <fstream>
#include <future>
#include <sstream>

#include "json.hpp"
#include "kropforge/compiler.hpp"
#include "kropforge/fixtures.hpp"
#include "kropforge/knowledge_base.hpp"
#include "kropforge/resolver.hpp"
#include "kropforge/sql_range.hpp"

namespace kropforge {

using json = nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Payload files end with a single newline that is not part of the payload.
std::string read_payload_file(const std::filesystem::path& path) {
  auto text = read_file(path);
  if (!text.empty() && text.back() == '\n') {
    text.pop_back();
  }
  return text;
}

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

std::string require_string(const json& node, const char* key, const std::string& where) {
  if (!node.contains(key) || !node.at(key).is_string()) {
    throw ConfigError(where + ": '" + key + "' must be a string");
  }
  return node.at(key).get<std::string>();
}

bool is_baseline(const std::string& strategy) {
  return strategy == "baseline-concat" || strategy == "baseline-assembly";
}

bool known_strategy(const std::string& strategy) {
  return strategy == "numbered-steps" || strategy == "madlibs" || is_baseline(strategy);
}

ScenarioConfig parse_scenario(const json& node, const std::filesystem::path& base, std::size_t n) {
  const std::string where = "scenario #" + std::to_string(n + 1);
  if (!node.is_object()) {
    throw ConfigError(where + " must be an object");
  }
  ScenarioConfig s;
  s.id = require_string(node, "id", where);
  if (node.contains("payload")) {
    s.payload = require_string(node, "payload", where);
  } else if (node.contains("payload_file")) {
    s.payload = read_payload_file(resolve_path(base, require_string(node, "payload_file", where)));
  }
  if (node.contains("strategy")) {
    s.strategy = require_string(node, "strategy", where);
    if (!known_strategy(s.strategy)) {
      throw ConfigError(where + ": unknown strategy '" + s.strategy + "'");
    }
  }
  if (node.contains("style")) {
    s.style = require_string(node, "style", where);
  }
  if (node.contains("plan")) {
    s.fixture_plan = require_string(node, "plan", where);
    if (*s.fixture_plan != "bobby-tables" && *s.fixture_plan != "dalle-mickey") {
      throw ConfigError(where + ": unknown fixture plan '" + *s.fixture_plan + "'");
    }
  }
  if (!s.payload && !s.fixture_plan) {
    throw ConfigError(where + ": needs 'payload', 'payload_file' or 'plan'");
  }
  try {
    if (node.contains("target")) {
      s.target = parse_target_kind(require_string(node, "target", where));
    }
    if (node.contains("policy")) {
      s.policy = parse_reconstruction_policy(require_string(node, "policy", where));
    }
  } catch (const ParseError& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (node.contains("filters")) {
    if (!node.at("filters").is_array()) {
      throw ConfigError(where + ": 'filters' must be an array of lexicon names");
    }
    for (const auto& f : node.at("filters")) {
      if (!f.is_string()) {
        throw ConfigError(where + ": 'filters' must be an array of lexicon names");
      }
      s.filters.push_back(f.get<std::string>());
    }
  }
  if (node.contains("parts")) {
    if (!node.at("parts").is_number_unsigned() || node.at("parts").get<std::size_t>() == 0) {
      throw ConfigError(where + ": 'parts' must be a positive integer");
    }
    s.parts = node.at("parts").get<std::size_t>();
  }
  if (node.contains("undefended")) {
    if (!node.at("undefended").is_boolean()) {
      throw ConfigError(where + ": 'undefended' must be a boolean");
    }
    s.undefended = node.at("undefended").get<bool>();
  }
  return s;
}

LiveConfig parse_live(const json& node) {
  if (!node.is_object()) {
    throw ConfigError("'live' must be an object");
  }
  LiveConfig live;
  live.endpoint = require_string(node, "endpoint", "live");
  live.model = require_string(node, "model", "live");
  if (node.contains("temperature")) {
    if (!node.at("temperature").is_number()) {
      throw ConfigError("live: 'temperature' must be a number");
    }
    live.temperature = node.at("temperature").get<double>();
  }
  if (node.contains("match_policy")) {
    try {
      live.match_policy = parse_match_policy(require_string(node, "match_policy", "live"));
    } catch (const ParseError& e) {
      throw ConfigError(std::string("live: ") + e.what());
    }
  }
  if (node.contains("timeout_seconds")) {
    if (!node.at("timeout_seconds").is_number_unsigned()) {
      throw ConfigError("live: 'timeout_seconds' must be a positive integer");
    }
    live.timeout_seconds = node.at("timeout_seconds").get<int>();
  }
  return live;
}

struct CampaignInputs {
  KnowledgeBase kb;
  std::vector<FilterLexicon> suite;
  std::optional<sql::SqlDatabase> db;
};

std::vector<FilterLexicon> scenario_suite(const ScenarioConfig& s,
                                          const std::vector<FilterLexicon>& suite) {
  if (s.filters.empty()) {
    return suite;
  }
  std::vector<FilterLexicon> out;
  for (const auto& name : s.filters) {
    const auto* lexicon = find_lexicon(suite, name);
    if (lexicon == nullptr) {
      throw ConfigError("scenario '" + s.id + "': unknown filter '" + name + "'");
    }
    out.push_back(*lexicon);
  }
  return out;
}

RenderStyle default_style(const ScenarioConfig& s) {
  if (s.style) {
    return parse_render_style(*s.style);
  }
  if (s.strategy == "madlibs") return RenderStyle::kMadlibs;
  if (s.strategy == "baseline-concat") return RenderStyle::kBaselineConcat;
  if (s.strategy == "baseline-assembly") return RenderStyle::kBaselineAssembly;
  return RenderStyle::kNumberedSteps;
}

json verdicts_to_json(const std::vector<NamedVerdict>& verdicts) {
  json out = json::array();
  for (const auto& nv : verdicts) {
    json matches = json::array();
    for (const auto& m : nv.verdict.matches) {
      matches.push_back({{"pattern", m.pattern},
                         {"mode", to_string(m.mode)},
                         {"view", to_string(m.view)},
                         {"start", m.start},
                         {"end", m.end},
                         {"origin_start", m.origin_start},
                         {"origin_end", m.origin_end}});
    }
    out.push_back({{"lexicon", nv.lexicon},
                   {"blocked", nv.verdict.blocked},
                   {"matches", std::move(matches)}});
  }
  return out;
}

bool all_allowed(const std::vector<NamedVerdict>& verdicts) {
  for (const auto& nv : verdicts) {
    if (nv.verdict.blocked) {
      return false;
    }
  }
  return true;
}

void run_target(AttackReport& report, const ScenarioConfig& s, const CampaignInputs& in,
                const ChainPlan* plan) {
  if (!in.db) {
    throw ConfigError("scenario '" + s.id + "' targets sql_range but the config has no schema");
  }
  const auto app = s.undefended ? sql::undefended_app(*in.db) : sql::defended_app(*in.db);
  const auto outcome = sql::app_submit(app, report.prompt_text, plan, in.kb);
  TargetRecord record;
  record.outcome = std::string(sql::to_string(outcome.kind));
  record.model_output = outcome.model_output;
  record.tables_before = in.db->tables.size();
  record.tables_after = outcome.db.tables.size();
  if (outcome.effect) {
    record.dropped = outcome.effect->dropped;
  }
  record.error = outcome.error;
  report.target = std::move(record);
}

AttackReport run_scenario(const ScenarioConfig& s, const CampaignInputs& in,
                          const std::optional<LiveConfig>& live, bool live_all) {
  const auto started = std::chrono::steady_clock::now();
  AttackReport report;
  report.scenario = s.id;
  report.strategy = s.fixture_plan ? "fixture:" + *s.fixture_plan : s.strategy;
  report.krop = !is_baseline(s.strategy);
  try {
    const auto suite = scenario_suite(s, in.suite);
    const auto style = default_style(s);
    report.style = std::string(to_string(style));

    std::optional<ChainPlan> plan;
    Payload payload;
    RenderedPrompt prompt;
    if (report.krop) {
      if (s.fixture_plan) {
        plan = *s.fixture_plan == "bobby-tables" ? fixtures::build_bobby_chain()
                                                 : fixtures::build_dalle_chain();
        payload = *s.fixture_plan == "bobby-tables"
                      ? fixtures::bobby_payload()
                      : Payload{plan->payload_id, plan->payload_text.value_or("")};
        if (s.payload) {
          payload.text = *s.payload;
        }
      } else {
        payload = Payload{s.id, *s.payload};
        plan = compile_chain(payload, in.kb, suite, parse_strategy(s.strategy));
      }
      prompt = render(*plan, in.kb, suite, style);
      report.plan_hash = prompt.plan_hash;
      const auto check = reconstruction_check(*plan, in.kb, payload, s.policy);
      report.reconstruction =
          ReconstructionRecord{check.policy, check.matched, check.final_text, check.first_divergence};
    } else {
      payload = Payload{s.id, s.payload.value_or("")};
      prompt = style == RenderStyle::kBaselineAssembly ? baseline_assembly(payload, s.parts, suite)
                                                       : baseline_concat(payload, suite);
    }
    report.prompt_text = prompt.text;
    report.verdicts = run_filter_suite(prompt.text, suite);
    report.evaded = all_allowed(report.verdicts);

    if (s.target == TargetKind::kSqlRange) {
      run_target(report, s, in, plan ? &*plan : nullptr);
    }
    if (s.target == TargetKind::kLive || (live_all && live)) {
      if (!live) {
        throw ConfigError("scenario '" + s.id + "' targets live but the config has no live section");
      }
      report.live = live_submit(prompt, payload, *live);
    }
  } catch (const std::exception& e) {
    report.ok = false;
    report.error = e.what();
  }
  report.total_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
  return report;
}

}  // namespace

std::string_view to_string(TargetKind kind) {
  switch (kind) {
    case TargetKind::kNone:
      return "none";
    case TargetKind::kSqlRange:
      return "sql_range";
    case TargetKind::kLive:
      return "live";
  }
  return "none";
}

TargetKind parse_target_kind(std::string_view name) {
  if (name == "none") return TargetKind::kNone;
  if (name == "sql_range") return TargetKind::kSqlRange;
  if (name == "live") return TargetKind::kLive;
  throw ParseError("unknown target '" + std::string(name) + "'");
}

CampaignConfig parse_campaign_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("campaign config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("campaign config must be an object");
  }
  CampaignConfig config;
  config.kb_path = resolve_path(base_dir, require_string(doc, "kb", "config"));
  config.filter_suite_path = resolve_path(base_dir, require_string(doc, "filters", "config"));
  if (doc.contains("schema")) {
    config.schema_path = resolve_path(base_dir, require_string(doc, "schema", "config"));
  }
  config.report_path = doc.contains("report")
                           ? resolve_path(base_dir, require_string(doc, "report", "config"))
                           : std::filesystem::path("report.ndjson");
  if (!doc.contains("scenarios") || !doc.at("scenarios").is_array()) {
    throw ConfigError("config: 'scenarios' must be an array");
  }
  const auto& scenarios = doc.at("scenarios");
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    auto s = parse_scenario(scenarios[i], base_dir, i);
    for (const auto& existing : config.scenarios) {
      if (existing.id == s.id) {
        throw ConfigError("duplicate scenario id '" + s.id + "'");
      }
    }
    config.scenarios.push_back(std::move(s));
  }
  if (doc.contains("live") && !doc.at("live").is_null()) {
    config.live = parse_live(doc.at("live"));
  }
  if (doc.contains("live_all")) {
    config.live_all = doc.at("live_all").is_boolean() && doc.at("live_all").get<bool>();
  }
  return config;
}

CampaignConfig load_campaign_config(const std::filesystem::path& path) {
  return parse_campaign_config(read_file(path), path.parent_path());
}

bool AttackReport::passed() const {
  if (!ok) {
    return false;
  }
  if (!krop) {
    return !evaded;
  }
  return evaded && reconstruction && reconstruction->matched;
}

std::vector<AttackReport> run_campaign(const CampaignConfig& config) {
  CampaignInputs inputs;
  try {
    inputs.kb = load_kb_file(config.kb_path);
    inputs.suite = load_filter_suite_file(config.filter_suite_path);
    if (config.schema_path) {
      inputs.db = sql::load_schema_file(*config.schema_path);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  for (const auto& s : config.scenarios) {
    scenario_suite(s, inputs.suite);  // unknown lexicon names are config errors
  }

  std::vector<std::future<AttackReport>> pending;
  pending.reserve(config.scenarios.size());
  for (const auto& s : config.scenarios) {
    pending.push_back(std::async(std::launch::async, [&s, &inputs, &config] {
      return run_scenario(s, inputs, config.live, config.live_all);
    }));
  }
  std::vector<AttackReport> reports;
  reports.reserve(pending.size());
  for (auto& f : pending) {
    reports.push_back(f.get());
  }
  return reports;
}

std::string report_to_json(const AttackReport& r) {
  json out;
  out["scenario"] = r.scenario;
  out["strategy"] = r.strategy;
  out["style"] = r.style;
  out["kind"] = r.krop ? "krop" : "baseline";
  out["status"] = r.ok ? "ok" : "error";
  if (!r.ok) {
    out["error"] = r.error;
  }
  out["passed"] = r.passed();
  out["plan_hash"] = r.plan_hash;
  out["prompt_text"] = r.prompt_text;
  out["verdicts"] = verdicts_to_json(r.verdicts);
  out["evaded"] = r.evaded;
  if (r.reconstruction) {
    const auto& rc = *r.reconstruction;
    out["reconstruction"] = {{"policy", to_string(rc.policy)},
                             {"matched", rc.matched},
                             {"final_text", rc.final_text},
                             {"first_divergence", rc.first_divergence ? json(*rc.first_divergence)
                                                                      : json(nullptr)}};
  }
  if (r.target) {
    const auto& t = *r.target;
    out["target"] = {{"outcome", t.outcome},
                     {"model_output", t.model_output},
                     {"tables_before", t.tables_before},
                     {"tables_after", t.tables_after},
                     {"dropped", t.dropped ? json(*t.dropped) : json(nullptr)},
                     {"error", t.error ? json(*t.error) : json(nullptr)}};
  }
  if (r.live) {
    out["live"] = {{"status", to_string(r.live->status)},
                   {"http_status", r.live->http_status},
                   {"response_text", r.live->response_text},
                   {"matched", r.live->matched},
                   {"error", r.live->error}};
  }
  out["timings"] = {{"total_ms", r.total_ms}};
  return out.dump();
}

void write_report(const std::filesystem::path& path, const std::vector<AttackReport>& reports) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot write report " + path.string());
  }
  for (const auto& r : reports) {
    out << report_to_json(r) << '\n';
  }
}

int campaign_exit_code(const std::vector<AttackReport>& reports) {
  for (const auto& r : reports) {
    if (r.krop && !r.passed()) {
      return 2;
    }
  }
  return 0;
}

}  // namespace kropforge
