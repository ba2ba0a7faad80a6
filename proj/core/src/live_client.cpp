#include "kropforge/live_client.hpp"

#include <cstdlib>
#include <mutex>

#include "httplib.h"
#include "json.hpp"
#include "kropforge/resolver.hpp"
#include "kropforge/sql_range.hpp"

namespace kropforge {

using json = nlohmann::json;

namespace {

std::mutex& in_flight() {
  static std::mutex m;
  return m;
}

struct SplitEndpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing '/'
};

std::optional<SplitEndpoint> split_endpoint(std::string_view endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string_view::npos) {
    return std::nullopt;
  }
  const auto scheme = endpoint.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    return std::nullopt;
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  SplitEndpoint out;
  out.origin = std::string(endpoint.substr(0, path_start));
  if (path_start != std::string_view::npos) {
    out.prefix = std::string(endpoint.substr(path_start));
    while (!out.prefix.empty() && out.prefix.back() == '/') {
      out.prefix.pop_back();
    }
  }
  if (out.origin.size() <= scheme_end + 3) {
    return std::nullopt;
  }
  return out;
}

}  // namespace

std::string_view to_string(MatchPolicy policy) {
  switch (policy) {
    case MatchPolicy::kStrict:
      return "strict";
    case MatchPolicy::kTrailingLenient:
      return "trailing-lenient";
    case MatchPolicy::kContains:
      return "contains";
  }
  return "contains";
}

MatchPolicy parse_match_policy(std::string_view name) {
  if (name == "strict") return MatchPolicy::kStrict;
  if (name == "trailing-lenient") return MatchPolicy::kTrailingLenient;
  if (name == "contains") return MatchPolicy::kContains;
  throw ParseError("unknown match policy '" + std::string(name) + "'");
}

bool response_matches(std::string_view response, std::string_view payload, MatchPolicy policy) {
  switch (policy) {
    case MatchPolicy::kStrict:
      return response == payload;
    case MatchPolicy::kTrailingLenient:
      return apply_reconstruction_policy(response, ReconstructionPolicy::kTrailingLenient) ==
             apply_reconstruction_policy(payload, ReconstructionPolicy::kTrailingLenient);
    case MatchPolicy::kContains:
      return response.find(payload) != std::string_view::npos;
  }
  return false;
}

std::vector<std::string> expected_responses(const Payload& payload) {
  std::vector<std::string> out{payload.text};
  if (auto effect = sql::literal_output_instruction(payload.text)) {
    out.push_back(std::move(*effect));
  }
  return out;
}

std::string_view to_string(LiveStatus status) {
  switch (status) {
    case LiveStatus::kOk:
      return "ok";
    case LiveStatus::kTransportError:
      return "transport-error";
    case LiveStatus::kHttpError:
      return "http-error";
    case LiveStatus::kMalformedResponse:
      return "malformed-response";
    case LiveStatus::kMissingCredential:
      return "missing-credential";
    case LiveStatus::kBadEndpoint:
      return "bad-endpoint";
  }
  return "transport-error";
}

std::string build_chat_request(std::string_view model, std::string_view prompt, double temperature) {
  json body;
  body["model"] = std::string(model);
  body["temperature"] = temperature == 0.0 ? json(0) : json(temperature);
  body["messages"] = json::array({{{"role", "user"}, {"content", std::string(prompt)}}});
  return body.dump();
}

std::optional<std::string> parse_chat_response(std::string_view body) {
  const auto doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return std::nullopt;
  }
  const auto choices = doc.find("choices");
  if (choices == doc.end() || !choices->is_array() || choices->empty()) {
    return std::nullopt;
  }
  const auto& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message") || !first.at("message").is_object()) {
    return std::nullopt;
  }
  const auto& message = first.at("message");
  if (!message.contains("content") || !message.at("content").is_string()) {
    return std::nullopt;
  }
  return message.at("content").get<std::string>();
}

LiveOutcome live_submit(const RenderedPrompt& prompt, const Payload& payload, const LiveConfig& config) {
  LiveOutcome outcome;
  const char* key = std::getenv(kApiKeyEnv);
  if (key == nullptr || *key == '\0') {
    outcome.status = LiveStatus::kMissingCredential;
    outcome.error = std::string(kApiKeyEnv) + " is not set";
    return outcome;
  }
  const auto endpoint = split_endpoint(config.endpoint);
  if (!endpoint) {
    outcome.status = LiveStatus::kBadEndpoint;
    outcome.error = "endpoint must look like http(s)://host[:port][/prefix]: '" + config.endpoint + "'";
    return outcome;
  }

  std::lock_guard<std::mutex> lock(in_flight());
  try {
    httplib::Client client(endpoint->origin);
    client.set_connection_timeout(config.timeout_seconds, 0);
    client.set_read_timeout(config.timeout_seconds, 0);
    client.set_write_timeout(config.timeout_seconds, 0);
    const httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
    const auto result =
        client.Post(endpoint->prefix + "/v1/chat/completions", headers,
                    build_chat_request(config.model, prompt.text, config.temperature),
                    "application/json");
    if (!result) {
      outcome.status = LiveStatus::kTransportError;
      outcome.error = httplib::to_string(result.error());
      return outcome;
    }
    outcome.http_status = result->status;
    if (result->status < 200 || result->status >= 300) {
      outcome.status = LiveStatus::kHttpError;
      outcome.error = "HTTP " + std::to_string(result->status);
      outcome.response_text = result->body;
      return outcome;
    }
    auto content = parse_chat_response(result->body);
    if (!content) {
      outcome.status = LiveStatus::kMalformedResponse;
      outcome.error = "response has no choices[0].message.content";
      outcome.response_text = result->body;
      return outcome;
    }
    outcome.response_text = std::move(*content);
    for (const auto& expected : expected_responses(payload)) {
      outcome.matched = outcome.matched ||
                        response_matches(outcome.response_text, expected, config.match_policy);
    }
  } catch (const std::exception& e) {
    outcome.status = LiveStatus::kTransportError;
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace kropforge
