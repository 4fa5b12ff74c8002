#pragma once

// Where a pull-request payload goes. The dry-run client is the default; the
// REST client only runs when explicitly configured.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "copilot/bot/bot.hpp"
#include "httplib.h"

namespace copilot {

class HostError : public Error {
 public:
  enum class Kind { Auth, Network, Rejected };

  HostError(Kind kind, int status, const std::string& message)
      : Error("host error: " + message), kind_(kind), status_(status) {}
  Kind kind() const noexcept { return kind_; }
  int status() const noexcept { return status_; }

 private:
  Kind kind_;
  int status_;
};

struct SubmitResult {
  std::string location;                 // URL or directory
  std::vector<std::string> writtenFiles;
};

class HostClient {
 public:
  virtual ~HostClient() = default;
  virtual SubmitResult submit(const PrPayload& payload, const std::string& diff) = 0;
};

class DryRunClient final : public HostClient {
 public:
  explicit DryRunClient(std::string outDir) : dir_(std::move(outDir)) {}

  SubmitResult submit(const PrPayload& payload, const std::string& diff) override {
    std::filesystem::create_directories(dir_);
    SubmitResult r{dir_, {}};
    auto write = [&](const std::string& name, const std::string& text) {
      const std::string path = (std::filesystem::path(dir_) / name).string();
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + path);
      out << text;
      r.writtenFiles.push_back(path);
    };
    write("pr_payload.json", toJson(payload));
    write("changes.diff", diff);
    return r;
  }

 private:
  std::string dir_;
};

struct GitHostConfig {
  std::string host;
  int port = 80;
  std::string repo;   // owner/name
  std::string token;
};

// Posts the payload to `POST /repos/<repo>/pulls` on a GitHub-compatible API
// over plain HTTP.
class GitHostClient final : public HostClient {
 public:
  explicit GitHostClient(GitHostConfig config) : config_(std::move(config)) {}

  SubmitResult submit(const PrPayload& payload, const std::string& diff) override {
    if (config_.token.empty()) throw HostError(HostError::Kind::Auth, 0, "no access token configured");
    if (config_.host.empty() || config_.repo.empty())
      throw HostError(HostError::Kind::Rejected, 0, "host and repository must be configured");
    nlohmann::ordered_json body = nlohmann::ordered_json::parse(toJson(payload));
    body["head"] = payload.branchName;
    body["base"] = payload.baseBranch;
    body["diff"] = diff;

    httplib::Client client(config_.host, config_.port);
    client.set_connection_timeout(5);
    const httplib::Headers headers{{"Authorization", "Bearer " + config_.token},
                                   {"Accept", "application/json"}};
    const auto res = client.Post("/repos/" + config_.repo + "/pulls", headers, body.dump(),
                                 "application/json");
    if (!res) throw HostError(HostError::Kind::Network, 0, httplib::to_string(res.error()));
    if (res->status == 401 || res->status == 403)
      throw HostError(HostError::Kind::Auth, res->status, "credentials rejected");
    if (res->status < 200 || res->status >= 300)
      throw HostError(HostError::Kind::Rejected, res->status, "status " + std::to_string(res->status));
    SubmitResult r;
    const auto reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_object() && reply.contains("html_url") && reply["html_url"].is_string())
      r.location = reply["html_url"].get<std::string>();
    return r;
  }

 private:
  GitHostConfig config_;
};

}  // namespace copilot
