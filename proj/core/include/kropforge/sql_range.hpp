#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kropforge/errors.hpp"
#include "kropforge/filters.hpp"
#include "kropforge/knowledge_base.hpp"
#include "kropforge/plan.hpp"

// The vulnerable SQL-RAG target: an in-memory table store, a DROP TABLE
// grammar, and a guard-wrapped mock model.
namespace kropforge::sql {

using Cell = std::variant<std::monostate, std::int64_t, double, bool, std::string>;
using Row = std::vector<Cell>;

struct Table {
  std::vector<std::string> columns;
  std::vector<Row> rows;
  bool operator==(const Table&) const = default;
};

/// Value type: operations return a new database instead of mutating.
struct SqlDatabase {
  std::map<std::string, Table> tables;
  bool operator==(const SqlDatabase&) const = default;
};

SqlDatabase load_schema(std::string_view json_text);
SqlDatabase load_schema_file(const std::filesystem::path& path);
std::string schema_to_json(const SqlDatabase& db);

struct DropTable {
  std::string name;
  bool quoted = false;
  bool operator==(const DropTable&) const = default;
};

struct Unsupported {
  std::string raw;
  bool operator==(const Unsupported&) const = default;
};

struct SqlStatement {
  std::variant<DropTable, Unsupported> kind;
  /// Whitespace and `--` comments after the terminating ';'. Inert.
  std::string trailing;
  bool operator==(const SqlStatement&) const = default;
};

/// Recognizes `DROP TABLE <ident>;` (keywords case-insensitive, ident bare
/// or double-quoted) followed only by whitespace and `--` comments.
/// Everything else is Unsupported.
SqlStatement parse_sql(std::string_view text);

/// Canonical text; parse_sql(print_sql(s)) == s for every DropTable whose
/// trailing part is inert.
std::string print_sql(const SqlStatement& statement);

enum class EffectKind { kDropped, kNoOp };

struct EffectReport {
  EffectKind kind = EffectKind::kNoOp;
  std::size_t tables_before = 0;
  std::size_t tables_after = 0;
  std::optional<std::string> dropped;
  std::optional<std::string> warning;
};

class UnknownTableError : public Error {
 public:
  explicit UnknownTableError(const std::string& name)
      : Error("no such table: " + name), name_(name) {}
  const std::string& table() const noexcept { return name_; }

 private:
  std::string name_;
};

struct ExecutionResult {
  SqlDatabase db;
  EffectReport effect;
};

/// DropTable removes exactly the named table (case-sensitive match against
/// stored names). Unsupported statements are a no-op with a warning.
/// Throws UnknownTableError; the input database is never modified.
ExecutionResult execute(const SqlDatabase& db, const SqlStatement& statement);

struct GuardedSqlApp {
  FilterLexicon system_guard;
  SqlDatabase db;
  std::string refusal_text;
};

/// App with the "never use DROP TABLE" guard.
GuardedSqlApp defended_app(SqlDatabase db);
/// App with an empty guard lexicon, the stock "You are a SQLite expert." prompt.
GuardedSqlApp undefended_app(SqlDatabase db);

enum class OutcomeKind { kRefused, kExecuted, kInert };

std::string_view to_string(OutcomeKind kind);

struct AppOutcome {
  OutcomeKind kind = OutcomeKind::kInert;
  std::string model_output;      // refusal text when refused
  std::optional<SqlStatement> statement;
  std::optional<EffectReport> effect;
  std::optional<std::string> error;  // resolve / execute failure inside an executed outcome
  Verdict guard_verdict;
  SqlDatabase db;  // database state after the submission
};

/// Guard first; a blocked prompt is refused with no side effects. Otherwise
/// the mock model answers with resolve(plan).final_text when a plan comes
/// with the prompt, or with the quoted text of a literal "Output only '...'"
/// instruction, or else echoes the prompt. The answer is parsed and, if it
/// is a DROP TABLE, executed.
AppOutcome app_submit(const GuardedSqlApp& app, std::string_view prompt_text,
                      const ChainPlan* plan, const KnowledgeBase& kb);

/// The mock model's direct instruction following: the quoted argument of
/// the first "output only '...'" (case-insensitive) in the prompt.
std::optional<std::string> literal_output_instruction(std::string_view prompt_text);

}  // namespace kropforge::sql
