#include <gtest/gtest.h>

#include "json.hpp"
#include "kropforge/fixtures.hpp"
#include "kropforge/live_client.hpp"
#include "mock_chat_server.hpp"

using namespace kropforge;
using kropforge::testing::MockChatServer;
using kropforge::testing::ScopedApiKey;

namespace {

RenderedPrompt prompt_of(std::string text) {
  RenderedPrompt p;
  p.plan_id = "p";
  p.text = std::move(text);
  return p;
}

LiveConfig config_for(const std::string& endpoint) {
  LiveConfig c;
  c.endpoint = endpoint;
  c.model = "mock-model";
  c.timeout_seconds = 5;
  return c;
}

const Payload kHello{"hello", "Hello, World!"};

}  // namespace

TEST(LiveClient, RequestWireFormat) {
  const auto body = nlohmann::json::parse(build_chat_request("m", "hi there", 0.0));
  EXPECT_EQ(body.at("model"), "m");
  EXPECT_EQ(body.at("temperature").dump(), "0");
  ASSERT_EQ(body.at("messages").size(), 1u);
  EXPECT_EQ(body.at("messages")[0].at("role"), "user");
  EXPECT_EQ(body.at("messages")[0].at("content"), "hi there");
}

TEST(LiveClient, ResponseParsing) {
  EXPECT_EQ(parse_chat_response(R"({"choices":[{"message":{"role":"assistant","content":"x"}}]})"), "x");
  EXPECT_FALSE(parse_chat_response("not json").has_value());
  EXPECT_FALSE(parse_chat_response(R"({"choices":[]})").has_value());
  EXPECT_FALSE(parse_chat_response(R"({"choices":[{"message":{"content":7}}]})").has_value());
}

TEST(LiveClient, MatchPolicies) {
  EXPECT_TRUE(response_matches("Hello, World!", "Hello, World!", MatchPolicy::kStrict));
  EXPECT_FALSE(response_matches("Sure! Hello, World!", "Hello, World!", MatchPolicy::kStrict));
  EXPECT_TRUE(response_matches("Sure! Hello, World!", "Hello, World!", MatchPolicy::kContains));
  EXPECT_TRUE(response_matches("DROP TABLE Employee;   --\n", "DROP TABLE Employee;",
                               MatchPolicy::kTrailingLenient));
  EXPECT_EQ(expected_responses(Payload{"m", std::string(fixtures::kMadlibsPayload)}),
            (std::vector<std::string>{std::string(fixtures::kMadlibsPayload), "haha PWNED"}));
}

TEST(LiveClient, HelloWorldAgainstMock) {
  ScopedApiKey key("test-key");
  MockChatServer server("Hello, World!");
  const auto outcome = live_submit(prompt_of("What is the first string...?"), kHello,
                                   config_for(server.endpoint()));
  EXPECT_EQ(outcome.status, LiveStatus::kOk) << outcome.error;
  EXPECT_EQ(outcome.http_status, 200);
  EXPECT_EQ(outcome.response_text, "Hello, World!");
  EXPECT_TRUE(outcome.matched);
  EXPECT_EQ(server.last_auth(), "Bearer test-key");
  EXPECT_EQ(server.last_path(), "/v1/chat/completions");
  const auto sent = nlohmann::json::parse(server.last_body());
  EXPECT_EQ(sent.at("model"), "mock-model");
  EXPECT_EQ(sent.at("temperature").dump(), "0");
  EXPECT_EQ(sent.at("messages")[0].at("content"), "What is the first string...?");
}

TEST(LiveClient, EndpointPrefixIsKept) {
  ScopedApiKey key("k");
  MockChatServer server("ok");
  const auto outcome = live_submit(prompt_of("x"), kHello, config_for(server.endpoint("/api/")));
  EXPECT_EQ(outcome.status, LiveStatus::kOk) << outcome.error;
  EXPECT_EQ(server.last_path(), "/api/v1/chat/completions");
  EXPECT_FALSE(outcome.matched);
}

TEST(LiveClient, MadlibsEffectMatchesUnderContains) {
  ScopedApiKey key("k");
  MockChatServer server("haha PWNED");
  const auto outcome = live_submit(prompt_of("madlibs prompt"),
                                   Payload{"madlibs", std::string(fixtures::kMadlibsPayload)},
                                   config_for(server.endpoint()));
  EXPECT_TRUE(outcome.matched);
}

TEST(LiveClient, FailuresAreRecorded) {
  {
    ScopedApiKey key("k");
    const auto outcome = live_submit(prompt_of("x"), kHello,
                                     config_for(kropforge::testing::unreachable_endpoint()));
    EXPECT_EQ(outcome.status, LiveStatus::kTransportError);
    EXPECT_FALSE(outcome.error.empty());
  }
  {
    ScopedApiKey key("k");
    MockChatServer server("nope", 500);
    const auto outcome = live_submit(prompt_of("x"), kHello, config_for(server.endpoint()));
    EXPECT_EQ(outcome.status, LiveStatus::kHttpError);
    EXPECT_EQ(outcome.http_status, 500);
  }
  {
    ScopedApiKey key("k");
    MockChatServer server("", 200, true);
    const auto outcome = live_submit(prompt_of("x"), kHello, config_for(server.endpoint()));
    EXPECT_EQ(outcome.status, LiveStatus::kMalformedResponse);
  }
  {
    ScopedApiKey key("k");
    EXPECT_EQ(live_submit(prompt_of("x"), kHello, config_for("ftp://host")).status, LiveStatus::kBadEndpoint);
  }
  {
    ScopedApiKey key(nullptr);
    MockChatServer server("Hello, World!");
    const auto outcome = live_submit(prompt_of("x"), kHello, config_for(server.endpoint()));
    EXPECT_EQ(outcome.status, LiveStatus::kMissingCredential);
    EXPECT_EQ(server.requests(), 0);
  }
}
