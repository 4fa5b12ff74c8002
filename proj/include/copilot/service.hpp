#pragma once

// HTTP front end: interactive proof sessions plus the generate/encode wire
// protocol backed by the builtin generator and the hashing encoder.
//
// Tool failures come back as 200 with an "error" object so a client can show
// them; 400 means the request body was malformed and 404 an unknown session,
// theorem route or model name.

#include <atomic>
#include <chrono>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "copilot/corpus.hpp"
#include "copilot/generation/spec.hpp"
#include "copilot/premises/index.hpp"
#include "copilot/search.hpp"
#include "copilot/suggest.hpp"
#include "httplib.h"
#include "json.hpp"

namespace copilot {

using Json = nlohmann::ordered_json;

// Transport-level failure carrying the HTTP status to send.
class HttpError : public Error {
 public:
  HttpError(int status, const std::string& message) : Error(message), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

struct ServiceConfig {
  using Clock = std::chrono::steady_clock;

  GeneratorSpec generator = GeneratorSpec::builtin();
  EncoderSpec encoder = EncoderSpec::hashTrigram();
  SearchLimits limits;
  std::size_t premiseCount = kDefaultPremiseCount;
  std::chrono::milliseconds sessionTtl = std::chrono::minutes(30);
  std::string sessionLog;       // append-only JSONL when set
  std::string modelName = "builtin";
  bool debugEndpoints = false;  // enables the consistency check route
  std::function<Clock::time_point()> now = [] { return Clock::now(); };
};

namespace detail {

inline Json errorJson(std::string_view kind, std::string_view message) {
  return Json{{"error", {{"kind", kind}, {"message", message}}}};
}

inline Json goalsJson(const std::vector<Sequent>& goals) {
  Json out = Json::array();
  for (const auto& g : goals) out.push_back(prettyGoal(g));
  return out;
}

inline const Json& field(const Json& body, const char* name) {
  static const Json null;
  return body.is_object() && body.contains(name) ? body[name] : null;
}

inline std::string requireString(const Json& body, const char* name) {
  const Json& v = field(body, name);
  if (!v.is_string()) throw HttpError(400, std::string("\"") + name + "\" must be a string");
  return v.get<std::string>();
}

inline std::optional<std::string> optionalString(const Json& body, const char* name) {
  const Json& v = field(body, name);
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) throw HttpError(400, std::string("\"") + name + "\" must be a string");
  return v.get<std::string>();
}

inline std::optional<std::int64_t> optionalInt(const Json& body, const char* name, std::int64_t min) {
  const Json& v = field(body, name);
  if (v.is_null()) return std::nullopt;
  if (!v.is_number_integer() || v.get<std::int64_t>() < min)
    throw HttpError(400, std::string("\"") + name + "\" must be an integer >= " + std::to_string(min));
  return v.get<std::int64_t>();
}

}  // namespace detail

class ProofService {
 public:
  ProofService(Library library, ServiceConfig config)
      : lib_(std::move(library)), config_(std::move(config)) {
    validate(config_.generator);
    index_ = buildIndex(lib_.records, config_.encoder);
    for (const auto& f : lib_.files) allModules_.insert(f.module);
  }

  const ServiceConfig& config() const noexcept { return config_; }
  const Library& library() const noexcept { return lib_; }

  // {"goal": "<formula or sequent>"} or {"theorem": "<name>"}.
  Json createSession(const Json& body) {
    const auto goalText = detail::optionalString(body, "goal");
    const auto theorem = detail::optionalString(body, "theorem");
    if (goalText.has_value() == theorem.has_value())
      throw HttpError(400, "give exactly one of \"goal\" or \"theorem\"");
    auto s = std::make_shared<Session>();
    if (theorem) {
      const auto [file, entry] = lib_.findTheorem(*theorem);
      if (!entry) return detail::errorJson("UnknownTheorem", "no theorem named " + *theorem);
      s->theorem = *theorem;
      s->initial = entry->goal();
      s->lemmas = lib_.lemmasFor(*file);
      s->modules = lib_.importedModules(*file);
    } else {
      try {
        s->initial = goalText->find("\xE2\x8A\xA2") == std::string::npos
                         ? Sequent(parseFormula(*goalText))
                         : parseSequent(*goalText);
      } catch (const SyntaxError& e) {
        return detail::errorJson("SyntaxError", e.what());
      }
      s->lemmas = lib_.lemmas;
      s->modules = allModules_;
    }
    s->state = ProofState(s->initial, scopeNames(s->lemmas));
    s->lastUsed = config_.now();
    {
      std::lock_guard lock(mu_);
      expireLocked();
      s->id = freshId();
      sessions_.emplace(s->id, s);
    }
    log(Json{{"session", s->id}, {"op", "create"}, {"goal", prettyGoal(s->initial)}});
    std::lock_guard lock(s->mu);
    return view(*s);
  }

  Json getSession(const std::string& id) {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    return view(*s);
  }

  Json applyTactic(const std::string& id, const Json& body) {
    const std::string text = detail::requireString(body, "tactic");
    auto s = find(id);
    std::lock_guard lock(s->mu);
    Json out;
    Tactic tactic;
    try {
      tactic = parseTactic(text);
    } catch (const SyntaxError& e) {
      out = detail::errorJson("SyntaxError", e.what());
      out["session"] = view(*s);
      return out;
    }
    StepResult r = copilot::applyTactic(s->state, tactic, s->lemmas);
    if (!r) {
      out = detail::errorJson(errorKindName(r.error().kind), r.error().message);
    } else {
      s->undo.push_back(s->state);
      s->state = std::move(r).value();
      s->history.push_back(tactic);
      log(Json{{"session", id}, {"op", "tactic"}, {"tactic", toString(tactic)}});
    }
    out["session"] = view(*s);
    return out;
  }

  Json undo(const std::string& id) {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    Json out;
    if (s->history.empty()) {
      out = detail::errorJson("NothingToUndo", "no tactic to undo");
    } else {
      s->state = std::move(s->undo.back());
      s->undo.pop_back();
      s->history.pop_back();
      log(Json{{"session", id}, {"op", "undo"}});
    }
    out["session"] = view(*s);
    return out;
  }

  Json suggest(const std::string& id) {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    if (s->state.goals.empty()) return detail::errorJson("NoGoals", "no goals");
    Json out;
    Json list = Json::array();
    try {
      for (const auto& sg : suggestTactics(s->state, generatorFor(*s), s->lemmas).suggestions) {
        list.push_back({{"text", sg.tacticText},
                        {"category", sg.category ? Json(categoryName(*sg.category)) : Json()},
                        {"remainingGoals", detail::goalsJson(sg.remainingGoals)},
                        {"score", sg.score}});
      }
    } catch (const Error& e) {
      // Generator unavailable: report it and return no suggestions.
      out = detail::errorJson("GeneratorError", e.what());
    }
    out["suggestions"] = std::move(list);
    return out;
  }

  // Proves the first goal. Runs without holding the session lock; a second
  // search on the same session while one is running answers Busy.
  Json search(const std::string& id, const Json& body) {
    SearchLimits limits = config_.limits;
    if (auto v = detail::optionalInt(body, "maxExpansions", 0)) limits.maxExpansions = *v;
    if (auto v = detail::optionalInt(body, "maxDepth", 1)) limits.maxDepth = *v;
    if (auto v = detail::optionalInt(body, "timeoutMillis", 0)) limits.timeoutMillis = *v;
    auto s = find(id);
    bool expected = false;
    if (!s->searching.compare_exchange_strong(expected, true))
      return detail::errorJson("Busy", "a search is already running for this session");
    struct Release {
      std::atomic<bool>& flag;
      ~Release() { flag = false; }
    } release{s->searching};

    Sequent goal;
    LemmaTable lemmas;
    const Generator* gen = nullptr;
    RuleSet rules = defaultRuleSet();
    {
      std::lock_guard lock(s->mu);
      if (s->state.goals.empty()) return detail::errorJson("NoGoals", "no goals");
      goal = s->state.goals.front();
      lemmas = s->lemmas;
      gen = &generatorFor(*s);
    }
    rules.useGenerator = true;
    const SearchResult r = bestFirstSearch(goal, rules, gen, lemmas, limits);
    Json out{{"status", statusName(r.status)},
             {"expansions", r.expansions},
             {"warnings", r.warnings}};
    if (r.found()) {
      out["script"] = toString(r.script);
      Json steps = Json::array();
      for (const auto& t : r.script.steps) steps.push_back(toString(t));
      out["steps"] = std::move(steps);
    }
    std::lock_guard lock(s->mu);
    s->lastSearch = out;
    return out;
  }

  Json premises(const std::string& id, const Json& body) {
    const std::size_t k = static_cast<std::size_t>(
        detail::optionalInt(body, "k", 1).value_or(static_cast<std::int64_t>(config_.premiseCount)));
    auto s = find(id);
    std::lock_guard lock(s->mu);
    if (s->state.goals.empty()) return detail::errorJson("NoGoals", "no goals");
    Json list = Json::array();
    if (!index_.records.empty()) {
      for (const auto& p : selectPremises(index_, s->state, s->modules, k)) {
        Json j{{"name", p.record.name}, {"module", p.record.module}, {"score", p.score},
               {"inScope", p.inScope}};
        if (p.inScope) {
          j["signature"] = p.signatureText;
          j["docstring"] = p.docstring ? Json(*p.docstring) : Json();
        } else {
          j["requiredImport"] = p.requiredImport;
          j["definitionSource"] = p.definitionSource;
        }
        list.push_back(std::move(j));
      }
    }
    return Json{{"premises", std::move(list)}};
  }

  // Replays the history from scratch and compares with the live state.
  Json consistency(const std::string& id) {
    auto s = find(id);
    std::lock_guard lock(s->mu);
    ProofState replay(s->initial, scopeNames(s->lemmas));
    bool ok = true;
    for (const auto& t : s->history) {
      StepResult r = copilot::applyTactic(replay, t, s->lemmas);
      if (!r) {
        ok = false;
        break;
      }
      replay = std::move(r).value();
    }
    ok = ok && replay == s->state && s->undo.size() == s->history.size();
    return Json{{"consistent", ok}, {"historyLength", s->history.size()}};
  }

  // Wire protocol: {"name","input","prefix","params":{...}} -> {"outputs":[...]}.
  Json generate(const Json& body) const {
    if (!body.is_object()) throw HttpError(400, "body must be a JSON object");
    const std::string name = detail::requireString(body, "name");
    const std::string input = detail::requireString(body, "input");
    const std::string prefix = detail::optionalString(body, "prefix").value_or("");
    PartialParams over;
    const Json& params = detail::field(body, "params");
    if (!params.is_null()) {
      if (!params.is_object()) throw HttpError(400, "\"params\" must be an object");
      if (auto n = detail::optionalInt(params, "numReturnSequences", 1))
        over.numReturnSequences = static_cast<std::size_t>(*n);
      const Json& t = detail::field(params, "temperature");
      if (!t.is_null()) {
        if (!t.is_number()) throw HttpError(400, "\"temperature\" must be a number");
        over.temperature = t.get<double>();
      }
    }
    if (name != config_.modelName) throw HttpError(404, "unknown model '" + name + "'");
    if (input.empty()) throw HttpError(400, "\"input\" must be non-empty");
    std::vector<ScoredText> outputs;
    try {
      outputs = BuiltinGenerator(mergeParams({}, over), lib_.lemmas).generate(input, prefix);
    } catch (const InvalidParam& e) {
      throw HttpError(400, e.what());
    }
    Json list = Json::array();
    for (const auto& o : outputs) list.push_back({{"text", o.text}, {"score", o.score}});
    return Json{{"outputs", std::move(list)}};
  }

  // {"name","input"} -> {"outputs":[float, ...]}.
  Json encode(const Json& body) const {
    if (!body.is_object()) throw HttpError(400, "body must be a JSON object");
    const std::string name = detail::requireString(body, "name");
    const std::string input = detail::requireString(body, "input");
    if (name != config_.modelName) throw HttpError(404, "unknown model '" + name + "'");
    if (input.empty()) throw HttpError(400, "\"input\" must be non-empty");
    const Vector v = copilot::encode(config_.encoder, input);
    Json list = Json::array();
    for (float x : v.values) list.push_back(static_cast<double>(x));
    return Json{{"outputs", std::move(list)}};
  }

  std::size_t sessionCount() {
    std::lock_guard lock(mu_);
    expireLocked();
    return sessions_.size();
  }

 private:
  struct Session {
    std::string id;
    std::optional<std::string> theorem;
    Sequent initial;
    LemmaTable lemmas;
    std::set<std::string> modules;
    ProofState state;
    std::vector<Tactic> history;
    std::vector<ProofState> undo;
    Json lastSearch;
    GeneratorPtr generator;
    ServiceConfig::Clock::time_point lastUsed;
    std::mutex mu;
    std::atomic<bool> searching{false};
  };

  Json view(const Session& s) const {
    Json history = Json::array();
    for (const auto& t : s.history) history.push_back(toString(t));
    return Json{{"id", s.id},
                {"theorem", s.theorem ? Json(*s.theorem) : Json()},
                {"goals", detail::goalsJson(s.state.goals)},
                {"usedSorry", s.state.usedSorry},
                {"complete", s.state.complete()},
                {"history", std::move(history)}};
  }

  // Caller holds s.mu.
  const Generator& generatorFor(Session& s) {
    if (!s.generator) s.generator = makeGenerator(config_.generator, s.lemmas);
    return *s.generator;
  }

  std::shared_ptr<Session> find(const std::string& id) {
    std::lock_guard lock(mu_);
    expireLocked();
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw HttpError(404, "unknown session '" + id + "'");
    it->second->lastUsed = config_.now();
    return it->second;
  }

  void expireLocked() {
    const auto now = config_.now();
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      if (!it->second->searching && now - it->second->lastUsed > config_.sessionTtl)
        it = sessions_.erase(it);
      else
        ++it;
    }
  }

  std::string freshId() {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id;
    do {
      id.clear();
      for (int i = 0; i < 32; ++i) id += kHex[rng_() % 16];
    } while (sessions_.count(id));
    return id;
  }

  void log(const Json& event) {
    if (config_.sessionLog.empty()) return;
    std::lock_guard lock(logMu_);
    std::ofstream(config_.sessionLog, std::ios::app) << event.dump() << "\n";
  }

  Library lib_;
  ServiceConfig config_;
  PremiseIndex index_;
  std::set<std::string> allModules_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mt19937_64 rng_{std::random_device{}()};
  std::mutex logMu_;
};

namespace detail {

inline Json parseBody(const httplib::Request& req, bool allowEmpty) {
  if (req.body.empty() && allowEmpty) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const nlohmann::json::exception& e) {
    throw HttpError(400, std::string("malformed JSON: ") + e.what());
  }
}

inline void reply(httplib::Response& res, const std::function<Json()>& handler) {
  try {
    res.set_content(handler().dump(), "application/json");
  } catch (const HttpError& e) {
    res.status = e.status();
    res.set_content(Json{{"error", {{"kind", "HttpError"}, {"message", e.what()}}}}.dump(),
                    "application/json");
  }
}

}  // namespace detail

// Registers every route on `server`. The UI bundle, when given, is served
// under /ui.
inline void installRoutes(httplib::Server& server, ProofService& svc, const std::string& uiDir = {}) {
  using httplib::Request;
  using httplib::Response;
  using detail::parseBody;
  using detail::reply;
  const std::string sid = "/api/session/([0-9a-zA-Z]+)";

  server.Post("/api/session", [&svc](const Request& req, Response& res) {
    reply(res, [&] { return svc.createSession(parseBody(req, false)); });
  });
  server.Get(sid, [&svc](const Request& req, Response& res) {
    reply(res, [&] { return svc.getSession(req.matches[1]); });
  });
  server.Post(sid + "/tactic", [&svc](const Request& req, Response& res) {
    reply(res, [&] { return svc.applyTactic(req.matches[1], parseBody(req, false)); });
  });
  server.Post(sid + "/undo", [&svc](const Request& req, Response& res) {
    reply(res, [&] { return svc.undo(req.matches[1]); });
  });
  server.Post(sid + "/suggest", [&svc](const Request& req, Response& res) {
    reply(res, [&] { return svc.suggest(req.matches[1]); });
  });
  server.Post(sid + "/search", [&svc](const Request& req, Response& res) {
    reply(res, [&] { return svc.search(req.matches[1], parseBody(req, true)); });
  });
  server.Post(sid + "/premises", [&svc](const Request& req, Response& res) {
    reply(res, [&] { return svc.premises(req.matches[1], parseBody(req, true)); });
  });
  if (svc.config().debugEndpoints) {
    server.Get(sid + "/debug/consistency", [&svc](const Request& req, Response& res) {
      reply(res, [&] { return svc.consistency(req.matches[1]); });
    });
  }
  server.Post("/api/generate", [&svc](const Request& req, Response& res) {
    reply(res, [&] { return svc.generate(parseBody(req, false)); });
  });
  server.Post("/api/encode", [&svc](const Request& req, Response& res) {
    reply(res, [&] { return svc.encode(parseBody(req, false)); });
  });
  server.set_exception_handler([](const Request&, Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(detail::errorJson("Internal", what).dump(), "application/json");
  });
  if (!uiDir.empty() && !server.set_mount_point("/ui", uiDir))
    throw Error("cannot serve UI from " + uiDir);
}

}  // namespace copilot
