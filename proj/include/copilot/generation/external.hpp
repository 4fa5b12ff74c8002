#pragma once

// Client side of the generation wire protocol:
//   POST /api/generate {"name","input","prefix","params":{"numReturnSequences","temperature"}}
//     -> {"outputs":[{"text","score"}, ...]}
//   POST /api/encode   {"name","input"} -> {"outputs":[number, ...]}
// 400/404 map to ProtocolError; connection failures, timeouts and 5xx map to
// ExternalUnavailable after the retry budget is spent.

#include <chrono>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "copilot/generation/encoder.hpp"
#include "copilot/generation/generator.hpp"
#include "httplib.h"
#include "json.hpp"

namespace copilot {

struct Endpoint {
  std::string host;
  int port = 0;
};

inline constexpr double kMinScoreFloor = 1e-6;

struct RetryPolicy {
  int retries = 2;
  std::chrono::milliseconds timeout{2000};
};

namespace detail {

inline nlohmann::json postJson(const Endpoint& ep, const std::string& path,
                               const nlohmann::json& body, const RetryPolicy& policy) {
  const std::string payload = body.dump();
  std::string lastFailure = "no attempt made";
  for (int attempt = 0; attempt <= policy.retries; ++attempt) {
    httplib::Client cli(ep.host, ep.port);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(policy.timeout);
    const auto usecs =
        std::chrono::duration_cast<std::chrono::microseconds>(policy.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    auto res = cli.Post(path, payload, "application/json");
    if (!res) {
      lastFailure = ep.host + ":" + std::to_string(ep.port) + path + ": " +
                    httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      lastFailure = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw ProtocolError("status " + std::to_string(res->status) + ": " + res->body);
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError(std::string("malformed reply: ") + e.what());
    }
  }
  throw ExternalUnavailable(lastFailure + " (after " + std::to_string(policy.retries + 1) +
                            " attempts)");
}

}  // namespace detail

// One request per call; no session state is shared between calls.
inline std::vector<ScoredText> externalGenerate(const std::string& name, const Endpoint& ep,
                                                std::string_view input, std::string_view prefix,
                                                const GeneratorParams& params,
                                                const RetryPolicy& policy = {}) {
  if (input.empty()) throw EmptyInput();
  nlohmann::json body = {
      {"name", name},
      {"input", std::string(input)},
      {"prefix", std::string(prefix)},
      {"params",
       {{"numReturnSequences", params.numReturnSequences}, {"temperature", params.temperature}}}};
  const nlohmann::json reply = detail::postJson(ep, "/api/generate", body, policy);
  if (!reply.is_object() || !reply.contains("outputs") || !reply["outputs"].is_array())
    throw ProtocolError("reply lacks an \"outputs\" array");
  std::vector<ScoredText> raw;
  for (const auto& item : reply["outputs"]) {
    if (!item.is_object() || !item.contains("text") || !item["text"].is_string() ||
        !item.contains("score") || !item["score"].is_number())
      throw ProtocolError("output entries must be {\"text\": string, \"score\": number}");
    const double score = item["score"].get<double>();
    if (!std::isfinite(score)) throw ProtocolError("non-finite score");
    raw.push_back({item["text"].get<std::string>(), std::min(1.0, std::max(kMinScoreFloor, score))});
  }
  return finalizeOutputs(std::move(raw), params, prefix);
}

inline Vector externalEncode(const std::string& name, const Endpoint& ep, std::string_view input,
                             const RetryPolicy& policy = {}) {
  if (input.empty()) throw EmptyInput();
  nlohmann::json body = {{"name", name}, {"input", std::string(input)}};
  const nlohmann::json reply = detail::postJson(ep, "/api/encode", body, policy);
  if (!reply.is_object() || !reply.contains("outputs") || !reply["outputs"].is_array())
    throw ProtocolError("reply lacks an \"outputs\" array");
  std::vector<float> values;
  for (const auto& x : reply["outputs"]) {
    if (!x.is_number()) throw ProtocolError("encoding entries must be numbers");
    const double d = x.get<double>();
    if (!std::isfinite(d)) throw ProtocolError("non-finite encoding entry");
    values.push_back(static_cast<float>(d));
  }
  if (values.empty()) throw ProtocolError("empty encoding");
  return Vector(std::move(values));
}

class ExternalGenerator final : public Generator {
 public:
  ExternalGenerator(std::string name, Endpoint ep, GeneratorParams params = {},
                    RetryPolicy policy = {})
      : name_(std::move(name)), ep_(std::move(ep)), params_(params), policy_(policy) {
    validate(params_);
  }

  std::vector<ScoredText> generate(std::string_view input,
                                   std::string_view prefix = {}) const override {
    return externalGenerate(name_, ep_, input, prefix, params_, policy_);
  }
  const GeneratorParams& params() const noexcept override { return params_; }

 private:
  std::string name_;
  Endpoint ep_;
  GeneratorParams params_;
  RetryPolicy policy_;
};

class ExternalEncoder final : public Encoder {
 public:
  ExternalEncoder(std::string name, Endpoint ep, RetryPolicy policy = {})
      : name_(std::move(name)), ep_(std::move(ep)), policy_(policy) {}

  Vector encode(std::string_view input) const override {
    return externalEncode(name_, ep_, input, policy_);
  }
  std::size_t dim() const noexcept override { return 0; }

 private:
  std::string name_;
  Endpoint ep_;
  RetryPolicy policy_;
};

}  // namespace copilot
