#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kropforge/errors.hpp"
#include "kropforge/filters.hpp"
#include "kropforge/live_client.hpp"
#include "kropforge/plan.hpp"
#include "kropforge/renderers.hpp"
#include "kropforge/segmentation.hpp"

namespace kropforge {

/// Missing or malformed campaign inputs. Aborts the whole campaign.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class TargetKind { kNone, kSqlRange, kLive };

std::string_view to_string(TargetKind kind);
TargetKind parse_target_kind(std::string_view name);

struct ScenarioConfig {
  std::string id;
  std::optional<std::string> payload;  // payload text; the id doubles as payload id
  /// "numbered-steps", "madlibs", "baseline-concat" or "baseline-assembly".
  std::string strategy = "numbered-steps";
  std::optional<std::string> style;    // render style; defaults from the strategy
  std::optional<std::string> fixture_plan;  // "bobby-tables" or "dalle-mickey"
  TargetKind target = TargetKind::kNone;
  std::vector<std::string> filters;    // lexicon names; empty means the whole suite
  std::optional<ReconstructionPolicy> policy;
  std::size_t parts = 4;               // baseline-assembly chunk count
  bool undefended = false;             // sql_range without the guard rule
};

struct CampaignConfig {
  std::filesystem::path kb_path;
  std::filesystem::path filter_suite_path;
  std::optional<std::filesystem::path> schema_path;
  std::filesystem::path report_path;
  std::vector<ScenarioConfig> scenarios;
  std::optional<LiveConfig> live;
  /// Replay every scenario's prompt live, not only target == live ones.
  bool live_all = false;
};

/// Paths inside the document resolve relative to the config file's folder.
CampaignConfig load_campaign_config(const std::filesystem::path& path);
CampaignConfig parse_campaign_config(std::string_view json_text,
                                     const std::filesystem::path& base_dir);

struct ReconstructionRecord {
  ReconstructionPolicy policy = ReconstructionPolicy::kStrict;
  bool matched = false;
  std::string final_text;
  std::optional<std::size_t> first_divergence;
};

struct TargetRecord {
  std::string outcome;  // refused | executed | inert
  std::string model_output;
  std::size_t tables_before = 0;
  std::size_t tables_after = 0;
  std::optional<std::string> dropped;
  std::optional<std::string> error;
};

struct AttackReport {
  std::string scenario;
  std::string strategy;
  std::string style;
  bool krop = true;  // false for baseline scenarios
  bool ok = true;    // false when the scenario errored
  std::string error;
  std::string plan_hash;
  std::string prompt_text;
  std::vector<NamedVerdict> verdicts;
  bool evaded = false;  // every verdict allowed
  std::optional<ReconstructionRecord> reconstruction;
  std::optional<TargetRecord> target;
  std::optional<LiveOutcome> live;
  double total_ms = 0.0;

  /// KROP: ran, evaded every filter and reconstructed the payload.
  /// Baseline: blocked by at least one filter.
  bool passed() const;
};

/// One report per scenario, in config order. Scenario failures are recorded
/// in their report; only config-level problems throw (ConfigError).
std::vector<AttackReport> run_campaign(const CampaignConfig& config);

/// Single-line JSON object. The "timings" member is the only
/// non-deterministic field.
std::string report_to_json(const AttackReport& report);
void write_report(const std::filesystem::path& path, const std::vector<AttackReport>& reports);

/// 0 when every KROP scenario passed, 2 otherwise.
int campaign_exit_code(const std::vector<AttackReport>& reports);

}  // namespace kropforge
