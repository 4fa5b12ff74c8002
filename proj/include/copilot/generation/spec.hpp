#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "copilot/generation/builtin.hpp"
#include "copilot/generation/encoder.hpp"
#include "copilot/generation/external.hpp"
#include "copilot/generation/scripted.hpp"

namespace copilot {

struct GeneratorSpec {
  enum class Kind { Builtin, Scripted, External };

  Kind kind = Kind::Builtin;
  std::string path;  // Scripted
  std::string name;  // External
  Endpoint endpoint; // External
  GeneratorParams params;

  static GeneratorSpec builtin(GeneratorParams p = {}) { return {Kind::Builtin, {}, {}, {}, p}; }
  static GeneratorSpec scripted(std::string path, GeneratorParams p = {}) {
    return {Kind::Scripted, std::move(path), {}, {}, p};
  }
  static GeneratorSpec external(std::string name, std::string host, int port,
                                GeneratorParams p = {}) {
    return {Kind::External, {}, std::move(name), Endpoint{std::move(host), port}, p};
  }
};

struct EncoderSpec {
  enum class Kind { HashTrigram, External };

  Kind kind = Kind::HashTrigram;
  std::size_t dim = kDefaultEncoderDim;
  std::string name;
  Endpoint endpoint;

  static EncoderSpec hashTrigram(std::size_t dim = kDefaultEncoderDim) {
    return {Kind::HashTrigram, dim, {}, {}};
  }
  static EncoderSpec external(std::string name, std::string host, int port) {
    return {Kind::External, 0, std::move(name), Endpoint{std::move(host), port}};
  }
};

inline void validate(const GeneratorSpec& spec) {
  validate(spec.params);
  if (spec.kind == GeneratorSpec::Kind::External) {
    if (spec.name.empty()) throw InvalidParam("external generator needs a model name");
    if (spec.endpoint.host.empty()) throw InvalidParam("external generator needs a host");
    if (spec.endpoint.port < 1 || spec.endpoint.port > 65535)
      throw InvalidParam("port must be in [1, 65535]");
  }
  if (spec.kind == GeneratorSpec::Kind::Scripted && spec.path.empty())
    throw InvalidParam("scripted generator needs a fixture path");
}

// Lemmas are only consulted by the builtin generator.
inline GeneratorPtr makeGenerator(const GeneratorSpec& spec, const LemmaTable& lemmas = {}) {
  validate(spec);
  switch (spec.kind) {
    case GeneratorSpec::Kind::Builtin:
      return std::make_shared<BuiltinGenerator>(spec.params, lemmas);
    case GeneratorSpec::Kind::Scripted:
      return std::make_shared<ScriptedGenerator>(ScriptedGenerator::fromFile(spec.path, spec.params));
    case GeneratorSpec::Kind::External:
      return std::make_shared<ExternalGenerator>(spec.name, spec.endpoint, spec.params);
  }
  return nullptr;
}

inline EncoderPtr makeEncoder(const EncoderSpec& spec) {
  switch (spec.kind) {
    case EncoderSpec::Kind::HashTrigram:
      return std::make_shared<HashTrigramEncoder>(spec.dim);
    case EncoderSpec::Kind::External:
      if (spec.endpoint.port < 1 || spec.endpoint.port > 65535)
        throw InvalidParam("port must be in [1, 65535]");
      return std::make_shared<ExternalEncoder>(spec.name, spec.endpoint);
  }
  return nullptr;
}

inline std::vector<ScoredText> generate(const GeneratorSpec& spec, std::string_view input,
                                        std::string_view prefix = {},
                                        const LemmaTable& lemmas = {}) {
  if (input.empty()) throw EmptyInput();
  return makeGenerator(spec, lemmas)->generate(input, prefix);
}

inline Vector encode(const EncoderSpec& spec, std::string_view input) {
  return makeEncoder(spec)->encode(input);
}

// `builtin`, `scripted:<path>`, `external:<host>:<port>[:<model>]`.
inline GeneratorSpec parseGeneratorSpec(std::string_view text, GeneratorParams params = {}) {
  if (text == "builtin") return GeneratorSpec::builtin(params);
  if (text.rfind("scripted:", 0) == 0) {
    return GeneratorSpec::scripted(std::string(text.substr(9)), params);
  }
  if (text.rfind("external:", 0) == 0) {
    std::string_view rest = text.substr(9);
    const auto c1 = rest.find(':');
    if (c1 == std::string_view::npos) throw InvalidParam("expected external:<host>:<port>");
    const std::string host(rest.substr(0, c1));
    std::string_view portAndName = rest.substr(c1 + 1);
    std::string name = "builtin";
    if (const auto c2 = portAndName.find(':'); c2 != std::string_view::npos) {
      name = std::string(portAndName.substr(c2 + 1));
      portAndName = portAndName.substr(0, c2);
    }
    int port = 0;
    try {
      port = std::stoi(std::string(portAndName));
    } catch (const std::exception&) {
      throw InvalidParam("bad port '" + std::string(portAndName) + "'");
    }
    GeneratorSpec spec = GeneratorSpec::external(std::move(name), host, port, params);
    validate(spec);
    return spec;
  }
  throw InvalidParam("unknown generator '" + std::string(text) + "'");
}

}  // namespace copilot
