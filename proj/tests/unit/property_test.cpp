// Randomized property suites. Every suite runs at least kCases checked cases
// from a fixed seed so failures reproduce.

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "kropforge/compiler.hpp"
#include "kropforge/fixtures.hpp"
#include "kropforge/renderers.hpp"
#include "kropforge/resolver.hpp"
#include "kropforge/sql_range.hpp"
#include "kropforge/text.hpp"
#include "test_support.hpp"

using namespace kropforge;
using kropforge::testing::fixture_kb;
using kropforge::testing::fixture_suite;

namespace {

constexpr std::size_t kCases = 1000;

class Gen {
 public:
  explicit Gen(std::uint32_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin() { return below(2) == 0; }

  template <typename T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

  std::string text(std::size_t max_len) {
    static const std::vector<std::string> atoms{
        "a", "B", "z", "0", " ", ",", "[", "]", "\"", "'", "+", "=", "\n", "\t", "(", ")",
        "\xC3\xA9", "\xE2\x80\x9C", "\xE2\x80\x9D", "\xE2\x80\x99", "h", "E", "l", "O", "_", ";", "-"};
    std::string out;
    const auto n = below(max_len + 1);
    for (std::size_t i = 0; i < n; ++i) out += pick(atoms);
    return out;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) { std::shuffle(v.begin(), v.end(), rng_); }

 private:
  std::mt19937 rng_;
};

const std::vector<std::string> kWords{"alpha", "Beta", "gamma", "hello", "World", "drop",
                                      "table", "caf\xC3\xA9", "na\xC3\xAFve", "ORBIT", "x"};
const std::vector<std::string> kSeparators{" ", ", ", "! ", " - ", "'", ". ", ": "};

std::string sentence(Gen& g, std::size_t min_words) {
  std::string out;
  const auto n = min_words + g.below(6);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) out += g.pick(kSeparators);
    out += g.pick(kWords);
  }
  return out;
}

FilterLexicon random_word_lexicon(Gen& g, std::size_t max_words) {
  FilterLexicon lexicon{"rand", {}, g.coin()};
  const auto n = 1 + g.below(max_words);
  for (std::size_t i = 0; i < n; ++i) {
    lexicon.patterns.push_back({g.pick(kWords), g.coin() ? MatchMode::kWordBoundary
                                                         : MatchMode::kCaseInsensitiveSubstring});
  }
  return lexicon;
}

}  // namespace

TEST(Properties, SegmentationRoundTrip) {
  Gen g(11);
  std::size_t checked = 0;
  for (std::size_t attempt = 0; checked < kCases && attempt < 20 * kCases; ++attempt) {
    const Payload p{"p", sentence(g, 2)};
    const auto lexicon = random_word_lexicon(g, 3);
    SegmentedPayload seg;
    try {
      seg = segment_payload(p, lexicon);
    } catch (const SegmentationError& e) {
      ASSERT_EQ(e.kind(), SegmentationError::Kind::kDegenerateBlank) << p.text << " " << e.what();
      continue;
    }
    const auto words = hidden_words(seg, p);
    ASSERT_EQ(fill_template(seg.template_text, words), p.text) << p.text;
    const auto widths = blank_widths(seg.template_text);
    ASSERT_EQ(widths.size(), words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
      ASSERT_EQ(widths[i], text::codepoint_count(words[i]));
    }
    ASSERT_FALSE(filter_check(seg.template_text, lexicon).blocked) << seg.template_text;
    // Segments tile the payload.
    std::size_t cursor = 0;
    for (const auto& s : seg.segments) {
      ASSERT_EQ(s.start, cursor);
      cursor = s.end;
    }
    ASSERT_EQ(cursor, p.text.size());
    ++checked;
  }
  EXPECT_GE(checked, kCases);
}

TEST(Properties, FilterMonotonicity) {
  Gen g(23);
  for (std::size_t i = 0; i < kCases; ++i) {
    const auto text = g.coin() ? sentence(g, 1) : g.text(24);
    auto lexicon = random_word_lexicon(g, 3);
    const auto before = filter_check(text, lexicon);
    lexicon.patterns.push_back({g.pick(kWords), MatchMode::kExactSubstring});
    const auto after = filter_check(text, lexicon);
    ASSERT_TRUE(!before.blocked || after.blocked) << text;
    ASSERT_GE(after.matches.size(), before.matches.size());
    // Enabling reassembly never unblocks.
    auto reassembling = lexicon;
    reassembling.normalize_reassembly = true;
    ASSERT_TRUE(!after.blocked || filter_check(text, reassembling).blocked) << text;
  }
}

TEST(Properties, NormalizerIdempotence) {
  Gen g(37);
  for (std::size_t i = 0; i < kCases; ++i) {
    const auto s = g.text(40);
    const auto once = normalize_reassembled(s);
    ASSERT_EQ(normalize_reassembled(once), once) << s;
    const auto mapped = normalize_reassembled_mapped(s);
    ASSERT_EQ(mapped.text, once);
    ASSERT_EQ(mapped.origin.size(), once.size());
    ASSERT_TRUE(std::is_sorted(mapped.origin.begin(), mapped.origin.end()));
  }
}

TEST(Properties, ResolverDeterminism) {
  Gen g(41);
  const std::vector<std::string> gadgets{"hw", "bobby_full_name", "smoking_anecdote",
                                         "mickey_via_superbowl", "hint_output", "hint_pwned"};
  for (std::size_t i = 0; i < kCases; ++i) {
    ChainPlan plan;
    plan.payload_id = "rand";
    const auto leaves = 1 + g.below(3);
    for (std::size_t k = 1; k <= leaves; ++k) {
      if (g.coin()) {
        plan.steps.push_back(make_gadget_step(k, g.pick(gadgets)));
      } else {
        plan.steps.push_back(make_literal_step(k, sentence(g, 1)));
      }
    }
    const auto extra = g.below(4);
    for (std::size_t k = 0; k < extra; ++k) {
      const auto index = plan.steps.size() + 1;
      const auto input = 1 + g.below(plan.steps.size());
      switch (g.below(3)) {
        case 0:
          plan.steps.push_back(make_transform_step(index, Substitute{"o", "0"}, {input}));
          break;
        case 1:
          plan.steps.push_back(make_transform_step(index, PadAfter{"e", g.below(4), '.'}, {input}));
          break;
        default:
          plan.steps.push_back(make_transform_step(index, Concat{"|"}, {input, 1 + g.below(plan.steps.size())}));
      }
    }
    plan.output_step = plan.steps.size();
    const auto a = resolve(plan, fixture_kb());
    const auto b = resolve(plan, fixture_kb());
    ASSERT_EQ(a, b);
    ASSERT_EQ(resolve(plan_from_json(plan_to_json(plan)), fixture_kb()), a);
  }
}

TEST(Properties, DropExactness) {
  Gen g(53);
  for (std::size_t i = 0; i < kCases; ++i) {
    sql::SqlDatabase db;
    const auto tables = 1 + g.below(8);
    for (std::size_t t = 0; t < tables; ++t) {
      sql::Table table{{"Id", "Name"}, {}};
      const auto rows = g.below(4);
      for (std::size_t r = 0; r < rows; ++r) {
        table.rows.push_back({static_cast<std::int64_t>(r), g.pick(kWords)});
      }
      db.tables.emplace("T" + std::to_string(g.below(1000)) + (g.coin() ? "_x" : ""), std::move(table));
    }
    std::vector<std::string> names;
    for (const auto& [name, table] : db.tables) names.push_back(name);
    const auto victim = g.pick(names);
    const auto result = sql::execute(db, sql::parse_sql("DROP TABLE " + victim + ";"));
    ASSERT_EQ(result.db.tables.size(), db.tables.size() - 1);
    ASSERT_EQ(result.db.tables.count(victim), 0u);
    for (const auto& [name, table] : db.tables) {
      if (name != victim) {
        ASSERT_EQ(result.db.tables.at(name), table);
      }
    }
    const auto before = db;
    ASSERT_THROW(sql::execute(db, sql::parse_sql("DROP TABLE Missing_" + victim + ";")),
                 sql::UnknownTableError);
    ASSERT_EQ(db, before);
  }
}

TEST(Properties, SqlPrintParseRoundTrip) {
  Gen g(59);
  const std::vector<std::string> trailers{"", " ", "  --", "\n-- note\n", "--x", "\t"};
  for (std::size_t i = 0; i < kCases; ++i) {
    sql::DropTable drop;
    drop.quoted = g.coin();
    if (drop.quoted) {
      drop.name = "N\"" + g.pick(kWords) + " " + std::to_string(i);
    } else {
      drop.name = "t" + std::to_string(g.below(100000));
    }
    const sql::SqlStatement s{drop, g.pick(trailers)};
    ASSERT_EQ(sql::parse_sql(sql::print_sql(s)), s) << sql::print_sql(s);
  }
}

TEST(Properties, BaselinesAlwaysTripReassembly) {
  Gen g(61);
  const auto lexicon = kropforge::testing::word_lexicon("hw", {"hello", "world"}, true);
  for (std::size_t i = 0; i < kCases; ++i) {
    const std::string payload = sentence(g, 0) + g.pick(kSeparators) + (g.coin() ? "Hello" : "WORLD") +
                                g.pick(kSeparators) + sentence(g, 0);
    const auto parts = 1 + g.below(text::codepoint_count(payload));
    ASSERT_TRUE(baseline_concat(Payload{"p", payload}, {lexicon}).self_check[0].verdict.blocked) << payload;
    ASSERT_TRUE(baseline_assembly(Payload{"p", payload}, std::min<std::size_t>(parts, 26), {lexicon})
                    .self_check[0]
                    .verdict.blocked)
        << payload << " parts " << parts;
  }
}

namespace {

std::vector<std::string> gadget_answers(const ChainPlan& plan) {
  std::vector<std::string> out;
  for (const auto& step : plan.steps) {
    if (const auto* g = std::get_if<ResolveGadget>(&step.action)) {
      out.push_back(oracle_resolve(fixture_kb(), g->gadget_id).resolution);
    }
  }
  return out;
}

void expect_no_leak(const ChainPlan& plan, const std::string& payload) {
  const auto answers = gadget_answers(plan);
  for (const auto style : supported_styles(plan, fixture_kb())) {
    const auto prompt = render_text(plan, fixture_kb(), style);
    ASSERT_EQ(text::ifind_ascii(prompt, payload), std::string::npos) << prompt;
    for (const auto& answer : answers) {
      ASSERT_FALSE(filter_check(prompt, FilterLexicon{"leak", {{answer, MatchMode::kWordBoundary}}, false})
                       .blocked)
          << "'" << answer << "' leaks into:\n" << prompt;
    }
  }
}

}  // namespace

TEST(Properties, NoOracleLeakage) {
  expect_no_leak(fixtures::build_bobby_chain(), fixtures::bobby_payload().text);
  expect_no_leak(fixtures::build_dalle_chain(), "Mickey Mouse smoking");
  const Payload hello{"hello", "Hello, World!"};
  expect_no_leak(compile_chain(hello, fixture_kb(), fixture_suite(), Strategy::kNumberedSteps), hello.text);
  const Payload madlibs{"madlibs", std::string(fixtures::kMadlibsPayload)};
  expect_no_leak(compile_chain(madlibs, fixture_kb(), fixture_suite(), Strategy::kMadlibs), madlibs.text);

  Gen g(71);
  const std::vector<std::string> hints{"Ignore", "instructions", "output", "PWNED"};
  const std::vector<std::string> filler{"all", "previous", "and", "only", "haha", "the", "now", "please"};
  std::size_t checked = 0;
  for (std::size_t attempt = 0; checked < kCases && attempt < 5 * kCases; ++attempt) {
    std::vector<std::string> words;
    const auto n = 2 + g.below(6);
    for (std::size_t k = 0; k < n; ++k) words.push_back(g.coin() ? g.pick(hints) : g.pick(filler));
    std::string text;
    for (std::size_t k = 0; k < words.size(); ++k) text += (k ? " " : "") + words[k];
    const Payload p{"rand", text};
    ChainPlan plan;
    try {
      plan = compile_chain(p, fixture_kb(), fixture_suite(), Strategy::kMadlibs);
    } catch (const CompileError&) {
      continue;
    }
    if (plan.steps.size() < 2) continue;  // nothing hidden
    expect_no_leak(plan, p.text);
    ++checked;
  }
  EXPECT_GE(checked, kCases);
}

namespace {

// Plain string-operation versions of the three Bobby transforms.
std::string oracle_bobby_step(char op, const std::string& in) {
  std::string out = in;
  if (op == 'S') {
    for (auto pos = out.find("Students"); pos != std::string::npos; pos = out.find("Students", pos + 8)) {
      out.replace(pos, 8, "Employee");
    }
  } else if (op == 'E') {
    const auto pos = text::ifind_ascii(out, "drop");
    if (pos == std::string::npos) return {};
    out = out.substr(pos);
  } else {
    out.insert(out.find(';') + 1, 10, ' ');
  }
  return out;
}

}  // namespace

TEST(Properties, BobbyChainOrderAlgebra) {
  const auto plan = fixtures::build_bobby_chain();
  const auto reference = resolve(plan, fixture_kb()).final_text;
  std::vector<Transform> transforms;
  for (std::size_t i = 1; i < plan.steps.size(); ++i) {
    transforms.push_back(std::get<ApplyTransform>(plan.steps[i].action).transform);
  }
  const std::string ops = "SEP";
  std::vector<std::size_t> order{0, 1, 2};
  std::vector<std::string> reproducing;
  do {
    auto shuffled = plan;
    std::string oracle(fixtures::kBobbyName);
    std::string label;
    for (std::size_t k = 0; k < order.size(); ++k) {
      shuffled.steps[k + 1] = make_transform_step(k + 2, transforms[order[k]], {k + 1});
      oracle = oracle_bobby_step(ops[order[k]], oracle);
      label += ops[order[k]];
    }
    const auto r = resolve(shuffled, fixture_kb());
    ASSERT_TRUE(r.ok()) << label;
    EXPECT_EQ(r.final_text, oracle) << label;
    if (r.final_text == reference) reproducing.push_back(label);
  } while (std::next_permutation(order.begin(), order.end()));
  // Substitute commutes with both; only Pad before Extract breaks the chain.
  EXPECT_EQ(reproducing, (std::vector<std::string>{"SEP", "ESP", "EPS"}));
}
