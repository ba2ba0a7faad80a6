#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kropforge/renderers.hpp"
#include "kropforge/segmentation.hpp"

namespace kropforge {

inline constexpr const char* kApiKeyEnv = "KROPFORGE_API_KEY";

enum class MatchPolicy { kStrict, kTrailingLenient, kContains };

std::string_view to_string(MatchPolicy policy);
MatchPolicy parse_match_policy(std::string_view name);

/// True when `response` reproduces `payload` under `policy`.
bool response_matches(std::string_view response, std::string_view payload, MatchPolicy policy);

/// Texts a live reply may reproduce: the payload itself and, when the payload
/// is an "output only '...'" instruction, the quoted text it asks for.
std::vector<std::string> expected_responses(const Payload& payload);

struct LiveConfig {
  std::string endpoint;  // scheme://host[:port][/prefix]
  std::string model;
  double temperature = 0.0;
  MatchPolicy match_policy = MatchPolicy::kContains;
  int timeout_seconds = 30;
};

enum class LiveStatus { kOk, kTransportError, kHttpError, kMalformedResponse, kMissingCredential, kBadEndpoint };

std::string_view to_string(LiveStatus status);

struct LiveOutcome {
  LiveStatus status = LiveStatus::kOk;
  int http_status = 0;
  std::string response_text;
  bool matched = false;
  std::string error;
};

/// JSON body for POST <endpoint>/v1/chat/completions.
std::string build_chat_request(std::string_view model, std::string_view prompt, double temperature);

/// choices[0].message.content, or nullopt if the body does not have one.
std::optional<std::string> parse_chat_response(std::string_view body);

/// Sends one chat-completion request with the credential from
/// KROPFORGE_API_KEY. Every failure is reported in the outcome; nothing
/// throws. Calls are serialized so at most one request is in flight.
LiveOutcome live_submit(const RenderedPrompt& prompt, const Payload& payload, const LiveConfig& config);

}  // namespace kropforge
