#include "kropforge/sql_range.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kropforge/fixtures.hpp"
#include "kropforge/resolver.hpp"
#include "kropforge/text.hpp"

namespace kropforge::sql {

using json = nlohmann::json;

namespace {

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  std::size_t skip_space() {
    const auto start = pos_;
    while (pos_ < text_.size() && text::is_space_ascii(text_[pos_])) {
      ++pos_;
    }
    return pos_ - start;
  }

  bool keyword(std::string_view word) {
    if (pos_ + word.size() > text_.size() ||
        !text::iequals_ascii(text_.substr(pos_, word.size()), word)) {
      return false;
    }
    const auto after = pos_ + word.size();
    if (after < text_.size() && is_ident_char(text_[after])) {
      return false;
    }
    pos_ = after;
    return true;
  }

  bool identifier(std::string& name, bool& quoted) {
    if (pos_ >= text_.size()) {
      return false;
    }
    if (text_[pos_] == '"') {
      std::size_t i = pos_ + 1;
      std::string out;
      while (i < text_.size()) {
        if (text_[i] == '"') {
          if (i + 1 < text_.size() && text_[i + 1] == '"') {
            out.push_back('"');
            i += 2;
            continue;
          }
          if (out.empty()) {
            return false;
          }
          name = std::move(out);
          quoted = true;
          pos_ = i + 1;
          return true;
        }
        out.push_back(text_[i++]);
      }
      return false;
    }
    if (!is_ident_start(text_[pos_])) {
      return false;
    }
    const auto start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) {
      ++pos_;
    }
    name = std::string(text_.substr(start, pos_ - start));
    quoted = false;
    return true;
  }

  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string_view rest() const { return text_.substr(pos_); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

bool inert_trailing(std::string_view rest) {
  std::size_t i = 0;
  while (i < rest.size()) {
    if (text::is_space_ascii(rest[i])) {
      ++i;
    } else if (rest.substr(i, 2) == "--") {
      const auto nl = rest.find('\n', i);
      i = nl == std::string_view::npos ? rest.size() : nl + 1;
    } else {
      return false;
    }
  }
  return true;
}

Cell cell_from_json(const json& v) {
  if (v.is_null()) return std::monostate{};
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return v.get<std::string>();
  throw ParseError("schema cells must be null, boolean, number or string");
}

json cell_to_json(const Cell& c) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else {
          return v;
        }
      },
      c);
}

std::string quote_ident(const std::string& name) {
  std::string out = "\"";
  for (const char c : name) {
    out.push_back(c);
    if (c == '"') {
      out.push_back('"');
    }
  }
  return out + "\"";
}

}  // namespace

SqlDatabase load_schema(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("schema is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("tables") || !doc.at("tables").is_array()) {
    throw ParseError("schema needs a 'tables' array");
  }
  SqlDatabase db;
  for (const auto& node : doc.at("tables")) {
    if (!node.is_object() || !node.contains("name") || !node.at("name").is_string() ||
        !node.contains("columns") || !node.at("columns").is_array()) {
      throw ParseError("every table needs a string 'name' and a 'columns' array");
    }
    Table table;
    for (const auto& c : node.at("columns")) {
      if (!c.is_string()) {
        throw ParseError("column names must be strings");
      }
      table.columns.push_back(c.get<std::string>());
    }
    if (node.contains("rows")) {
      for (const auto& r : node.at("rows")) {
        if (!r.is_array() || r.size() != table.columns.size()) {
          throw ParseError("row width does not match the column count");
        }
        Row row;
        for (const auto& v : r) {
          row.push_back(cell_from_json(v));
        }
        table.rows.push_back(std::move(row));
      }
    }
    const auto name = node.at("name").get<std::string>();
    if (!db.tables.emplace(name, std::move(table)).second) {
      throw ValidationError("duplicate table name '" + name + "'");
    }
  }
  return db;
}

SqlDatabase load_schema_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open schema file " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_schema(buffer.str());
}

std::string schema_to_json(const SqlDatabase& db) {
  json tables = json::array();
  for (const auto& [name, table] : db.tables) {
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::array();
      for (const auto& c : row) {
        r.push_back(cell_to_json(c));
      }
      rows.push_back(std::move(r));
    }
    tables.push_back({{"name", name}, {"columns", table.columns}, {"rows", std::move(rows)}});
  }
  return json{{"tables", std::move(tables)}}.dump(2);
}

SqlStatement parse_sql(std::string_view text) {
  const SqlStatement unsupported{Unsupported{std::string(text)}, ""};
  Cursor cur(text);
  cur.skip_space();
  if (!cur.keyword("DROP") || cur.skip_space() == 0 || !cur.keyword("TABLE") ||
      cur.skip_space() == 0) {
    return unsupported;
  }
  DropTable drop;
  if (!cur.identifier(drop.name, drop.quoted)) {
    return unsupported;
  }
  cur.skip_space();
  if (!cur.consume(';')) {
    return unsupported;
  }
  const auto rest = cur.rest();
  if (!inert_trailing(rest)) {
    return unsupported;
  }
  return {std::move(drop), std::string(rest)};
}

std::string print_sql(const SqlStatement& statement) {
  if (const auto* drop = std::get_if<DropTable>(&statement.kind)) {
    return "DROP TABLE " + (drop->quoted ? quote_ident(drop->name) : drop->name) + ";" +
           statement.trailing;
  }
  return std::get<Unsupported>(statement.kind).raw;
}

ExecutionResult execute(const SqlDatabase& db, const SqlStatement& statement) {
  ExecutionResult result{db, {}};
  result.effect.tables_before = db.tables.size();
  if (const auto* drop = std::get_if<DropTable>(&statement.kind)) {
    if (result.db.tables.erase(drop->name) == 0) {
      throw UnknownTableError(drop->name);
    }
    result.effect.kind = EffectKind::kDropped;
    result.effect.dropped = drop->name;
  } else {
    result.effect.kind = EffectKind::kNoOp;
    result.effect.warning = "unsupported statement ignored";
  }
  result.effect.tables_after = result.db.tables.size();
  return result;
}

GuardedSqlApp defended_app(SqlDatabase db) {
  return {fixtures::sql_guard_lexicon(), std::move(db), std::string(fixtures::kRefusalText)};
}

GuardedSqlApp undefended_app(SqlDatabase db) {
  return {FilterLexicon{"no-guard", {}, false}, std::move(db), std::string(fixtures::kRefusalText)};
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::kRefused:
      return "refused";
    case OutcomeKind::kExecuted:
      return "executed";
    case OutcomeKind::kInert:
      return "inert";
  }
  return "inert";
}

std::optional<std::string> literal_output_instruction(std::string_view prompt_text) {
  static constexpr std::string_view kPhrase = "output only";
  auto pos = text::ifind_ascii(prompt_text, kPhrase);
  while (pos != std::string_view::npos) {
    auto i = pos + kPhrase.size();
    while (i < prompt_text.size() && text::is_space_ascii(prompt_text[i])) {
      ++i;
    }
    if (i < prompt_text.size() && prompt_text[i] == '\'') {
      const auto close = prompt_text.find('\'', i + 1);
      if (close != std::string_view::npos) {
        return std::string(prompt_text.substr(i + 1, close - i - 1));
      }
    }
    pos = text::ifind_ascii(prompt_text, kPhrase, pos + 1);
  }
  return std::nullopt;
}

AppOutcome app_submit(const GuardedSqlApp& app, std::string_view prompt_text,
                      const ChainPlan* plan, const KnowledgeBase& kb) {
  AppOutcome outcome;
  outcome.db = app.db;
  outcome.guard_verdict = filter_check(prompt_text, app.system_guard);
  if (outcome.guard_verdict.blocked) {
    outcome.kind = OutcomeKind::kRefused;
    outcome.model_output = app.refusal_text;
    return outcome;
  }

  if (plan != nullptr) {
    const auto resolution = resolve(*plan, kb);
    if (!resolution.ok()) {
      outcome.kind = OutcomeKind::kExecuted;
      outcome.error = "step " + std::to_string(resolution.failed_step) + ": " +
                      resolution.failure_reason;
      return outcome;
    }
    outcome.model_output = resolution.final_text;
  } else if (auto literal = literal_output_instruction(prompt_text)) {
    outcome.model_output = std::move(*literal);
  } else {
    outcome.model_output = std::string(prompt_text);
  }

  auto statement = parse_sql(outcome.model_output);
  const bool is_drop = std::holds_alternative<DropTable>(statement.kind);
  outcome.kind = is_drop ? OutcomeKind::kExecuted : OutcomeKind::kInert;
  try {
    auto result = execute(app.db, statement);
    outcome.db = std::move(result.db);
    outcome.effect = std::move(result.effect);
  } catch (const UnknownTableError& e) {
    outcome.error = e.what();
  }
  outcome.statement = std::move(statement);
  return outcome;
}

}  // namespace kropforge::sql
