// kropforge command-line front end.
//   compile | verify | range | campaign
// Exit codes: 0 ok, 1 config error, 2 evasion or reconstruction failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kropforge/compiler.hpp"
#include "kropforge/fixtures.hpp"
#include "kropforge/harness.hpp"
#include "kropforge/knowledge_base.hpp"
#include "kropforge/resolver.hpp"
#include "kropforge/sql_range.hpp"

namespace fs = std::filesystem;
using namespace kropforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCheck = 2;

fs::path data_file(const char* name) { return fs::path(KROPFORGE_DEFAULT_DATA_DIR) / name; }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string read_payload(const fs::path& path) {
  auto text = read_text(path);
  if (!text.empty() && text.back() == '\n') {
    text.pop_back();
  }
  return text;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot write " + path.string());
  }
  out << text;
}

struct CompileArgs {
  std::string payload, kb, filters, style = "numbered", out = ".";
};

int run_compile(const CompileArgs& a) {
  KnowledgeBase kb;
  std::vector<FilterLexicon> suite;
  Payload payload;
  RenderStyle style;
  try {
    kb = load_kb_file(a.kb);
    suite = load_filter_suite_file(a.filters);
    payload = Payload{fs::path(a.payload).stem().string(), read_payload(a.payload)};
    style = parse_render_style(a.style);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (!is_krop_style(style)) {
    std::cerr << "config error: --style must be numbered, madlibs or inline\n";
    return kExitConfig;
  }
  try {
    const auto strategy = style == RenderStyle::kMadlibs ? Strategy::kMadlibs : Strategy::kNumberedSteps;
    const auto plan = compile_chain(payload, kb, suite, strategy);
    const auto prompt = render(plan, kb, suite, style);
    fs::create_directories(a.out);
    const auto plan_path = fs::path(a.out) / (plan.payload_id + ".plan.json");
    const auto prompt_path = fs::path(a.out) / prompt_file_name(prompt);
    write_text(plan_path, plan_to_json(plan) + "\n");
    write_text(prompt_path, prompt.text + "\n");
    std::cout << plan_path.string() << '\n' << prompt_path.string() << '\n';
    std::cout << "plan_hash " << prompt.plan_hash << '\n';
    return kExitOk;
  } catch (const CompileError& e) {
    std::cerr << "compile failed: " << e.what() << '\n';
    return kExitCheck;
  } catch (const RenderError& e) {
    std::cerr << "render failed: " << e.what() << '\n';
    return kExitCheck;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

struct VerifyArgs {
  std::string plan, kb, filters, policy, payload;
};

int run_verify(const VerifyArgs& a) {
  KnowledgeBase kb;
  std::vector<FilterLexicon> suite;
  ChainPlan plan;
  std::optional<ReconstructionPolicy> policy;
  Payload payload;
  try {
    kb = load_kb_file(a.kb);
    suite = load_filter_suite_file(a.filters);
    plan = plan_from_json(read_text(a.plan));
    if (!a.policy.empty()) {
      policy = parse_reconstruction_policy(a.policy);
    }
    if (!a.payload.empty()) {
      payload = Payload{plan.payload_id, read_payload(a.payload)};
    } else if (plan.payload_text) {
      payload = Payload{plan.payload_id, *plan.payload_text};
    } else {
      throw ConfigError("plan has no payload_text; pass --payload");
    }
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  int code = kExitOk;
  for (const auto& f : validate_plan(plan, kb, suite)) {
    std::cout << "finding " << to_string(f.kind) << " step " << f.step << ": " << f.message << '\n';
    code = kExitCheck;
  }
  try {
    const auto check = reconstruction_check(plan, kb, payload, policy);
    std::cout << "plan_hash " << plan_hash(plan) << '\n';
    std::cout << "policy " << to_string(check.policy) << '\n';
    std::cout << "reconstruction " << (check.matched ? "matched" : "mismatch") << '\n';
    if (check.first_divergence) {
      std::cout << "first_divergence " << *check.first_divergence << '\n';
    }
    if (!check.matched) {
      code = kExitCheck;
    }
  } catch (const ResolveError& e) {
    std::cout << "resolution failed at step " << e.step() << ": " << e.what() << '\n';
    code = kExitCheck;
  }
  return code;
}

struct RangeArgs {
  std::string scenario = "bobby-tables";
  std::string kb = data_file("kb.json").string();
  std::string schema = data_file("chinook_schema.json").string();
  bool undefended = false;
};

int run_range(const RangeArgs& a) {
  KnowledgeBase kb;
  sql::SqlDatabase db;
  try {
    kb = load_kb_file(a.kb);
    db = sql::load_schema_file(a.schema);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  const auto app = a.undefended ? sql::undefended_app(db) : sql::defended_app(db);
  std::string prompt;
  std::optional<ChainPlan> plan;
  if (a.scenario == "bobby-tables") {
    plan = fixtures::build_bobby_chain();
    prompt = render_text(*plan, kb, RenderStyle::kNumberedSteps);
  } else if (a.scenario == "literal-drop") {
    prompt = std::string(fixtures::kLiteralDropPrompt);
  } else {
    std::cerr << "config error: unknown scenario '" << a.scenario
              << "' (bobby-tables or literal-drop)\n";
    return kExitConfig;
  }
  const auto outcome = sql::app_submit(app, prompt, plan ? &*plan : nullptr, kb);
  std::cout << "prompt:\n" << prompt << "\n\n";
  std::cout << "outcome " << sql::to_string(outcome.kind) << '\n';
  std::cout << "model_output " << outcome.model_output << '\n';
  std::cout << "tables " << db.tables.size() << " -> " << outcome.db.tables.size() << '\n';
  if (outcome.effect && outcome.effect->dropped) {
    std::cout << "dropped " << *outcome.effect->dropped << '\n';
  }
  if (outcome.error) {
    std::cout << "error " << *outcome.error << '\n';
  }
  return kExitOk;
}

struct CampaignArgs {
  std::string config = data_file("campaign.json").string();
  std::string report;
  bool live = false;
  std::string endpoint, model;
};

int run_campaign_cmd(const CampaignArgs& a) {
  CampaignConfig config;
  try {
    config = load_campaign_config(a.config);
    if (!a.report.empty()) {
      config.report_path = a.report;
    }
    if (a.live) {
      if (a.endpoint.empty() || a.model.empty()) {
        throw ConfigError("--live needs --endpoint and --model");
      }
      LiveConfig live = config.live.value_or(LiveConfig{});
      live.endpoint = a.endpoint;
      live.model = a.model;
      config.live = live;
      config.live_all = true;
    } else {
      config.live.reset();
      config.live_all = false;
    }
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    const auto reports = run_campaign(config);
    write_report(config.report_path, reports);
    for (const auto& r : reports) {
      std::cout << (r.passed() ? "PASS " : "FAIL ") << r.scenario << " (" << r.style << ")";
      if (!r.ok) {
        std::cout << ": " << r.error;
      }
      std::cout << '\n';
    }
    std::cout << "report " << config.report_path.string() << '\n';
    return campaign_exit_code(reports);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-return-oriented prompt chain compiler and range"};
  app.require_subcommand(1);

  CompileArgs compile_args;
  auto* compile = app.add_subcommand("compile", "Compile a payload into a plan and prompt");
  compile->add_option("--payload", compile_args.payload, "Payload text file")->required()->check(CLI::ExistingFile);
  compile->add_option("--kb", compile_args.kb, "Knowledge base JSON")->required();
  compile->add_option("--filters", compile_args.filters, "Filter suite JSON")->required();
  compile->add_option("--style", compile_args.style, "numbered, madlibs or inline")->capture_default_str();
  compile->add_option("--out", compile_args.out, "Output directory")->capture_default_str();

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Validate a plan and check its reconstruction");
  verify->add_option("--plan", verify_args.plan, "Plan JSON")->required();
  verify->add_option("--kb", verify_args.kb, "Knowledge base JSON")->required();
  verify->add_option("--filters", verify_args.filters, "Filter suite JSON")->required();
  verify->add_option("--policy", verify_args.policy, "strict or trailing-lenient");
  verify->add_option("--payload", verify_args.payload, "Payload file (default: the plan's payload_text)");

  RangeArgs range_args;
  auto* range = app.add_subcommand("range", "Submit a fixture attack to the SQL range");
  range->add_option("--scenario", range_args.scenario, "bobby-tables or literal-drop")->capture_default_str();
  range->add_option("--kb", range_args.kb, "Knowledge base JSON")->capture_default_str();
  range->add_option("--schema", range_args.schema, "Schema JSON")->capture_default_str();
  range->add_flag("--undefended", range_args.undefended, "Drop the guard rule");

  CampaignArgs campaign_args;
  auto* campaign = app.add_subcommand("campaign", "Run a scenario campaign and write an NDJSON report");
  campaign->add_option("--config", campaign_args.config, "Campaign JSON")->capture_default_str();
  campaign->add_option("--report", campaign_args.report, "Report path (overrides the config)");
  campaign->add_flag("--live", campaign_args.live, "Replay prompts against a live endpoint");
  campaign->add_option("--endpoint", campaign_args.endpoint, "OpenAI-compatible base URL");
  campaign->add_option("--model", campaign_args.model, "Model name");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (*compile) return run_compile(compile_args);
  if (*verify) return run_verify(verify_args);
  if (*range) return run_range(range_args);
  if (*campaign) return run_campaign_cmd(campaign_args);
  return kExitConfig;
}
