// Command-line front end for the proof copilot library.

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "copilot/bot/host.hpp"
#include "copilot/harness.hpp"
#include "copilot/service.hpp"

namespace {

using namespace copilot;
namespace fs = std::filesystem;

// Accepts a bare formula or a full `hyps ⊢ target` sequent.
Sequent parseGoalText(const std::string& text) {
  return text.find("\xE2\x8A\xA2") == std::string::npos ? Sequent(parseFormula(text))
                                                         : parseSequent(text);
}

struct GeneratorOptions {
  std::string spec = "builtin";
  std::size_t k = GeneratorParams{}.numReturnSequences;
  double temperature = 1.0;

  void add(CLI::App* cmd) {
    cmd->add_option("--generator", spec, "builtin | scripted:<path> | external:<host>:<port>[:<model>]");
    cmd->add_option("-k,--num", k, "number of candidates")->check(CLI::PositiveNumber);
    cmd->add_option("--temperature", temperature, "sampling temperature");
  }
  GeneratorSpec build() const {
    GeneratorParams p;
    p.numReturnSequences = k;
    p.temperature = temperature;
    return parseGeneratorSpec(spec, p);
  }
};

struct LimitOptions {
  SearchLimits limits;

  void add(CLI::App* cmd) {
    cmd->add_option("--max-expansions", limits.maxExpansions, "goal expansions before giving up");
    cmd->add_option("--max-depth", limits.maxDepth, "deepest goal chain explored");
    cmd->add_option("--timeout-ms", limits.timeoutMillis, "wall-clock budget in milliseconds");
  }
};

Library loadOptional(const std::string& dir) { return dir.empty() ? Library{} : loadLibraryDir(dir); }

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

int runCheck(const std::string& dir, bool allowSorry) {
  const Library lib = loadLibraryDir(dir);
  const auto issues = validateLibrary(lib, allowSorry);
  for (const auto& i : issues) std::cout << i.path << ": " << i.theorem << ": " << i.message << "\n";
  std::cout << lib.files.size() << " files, " << lib.records.size() << " lemmas, "
            << lib.theoremCount() << " theorems, " << issues.size() << " issues\n";
  return issues.empty() ? 0 : 1;
}

int runSuggest(const std::string& goal, const std::string& corpus, const GeneratorOptions& g) {
  const Library lib = loadOptional(corpus);
  const GeneratorPtr gen = makeGenerator(g.build(), lib.lemmas);
  const ProofState state(parseGoalText(goal), scopeNames(lib.lemmas));
  for (const auto& s : suggestTactics(state, *gen, lib.lemmas).suggestions) {
    std::cout << categoryName(*s.category) << "\t" << s.score << "\t" << s.tacticText;
    for (const auto& r : s.remainingGoals) std::cout << "\t" << prettyGoal(r);
    std::cout << "\n";
  }
  return 0;
}

int runSearch(const std::string& goal, const std::string& corpus, const GeneratorOptions& g,
              const LimitOptions& l, bool rulesOnly) {
  const Library lib = loadOptional(corpus);
  RuleSet rules = defaultRuleSet();
  rules.useGenerator = !rulesOnly;
  const GeneratorPtr gen = rulesOnly ? nullptr : makeGenerator(g.build(), lib.lemmas);
  const SearchResult r = bestFirstSearch(parseGoalText(goal), rules, gen.get(), lib.lemmas, l.limits);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << statusName(r.status) << " after " << r.expansions << " expansions\n";
  if (r.found()) std::cout << toString(r.script, "\n") << "\n";
  return r.found() ? 0 : 1;
}

int runIndexBuild(const std::string& corpus, const std::string& out, std::size_t dim) {
  const Library lib = loadLibraryDir(corpus);
  fs::create_directories(out);
  const PremiseIndex index = buildIndex(lib.records, EncoderSpec::hashTrigram(dim));
  saveIndex(index, (fs::path(out) / "embeddings.npy").string(), (fs::path(out) / "premises.jsonl").string());
  std::cout << index.records.size() << " premises, dim " << dim << ", written to " << out << "\n";
  return 0;
}

int runPremises(const std::string& goal, const std::string& corpus, const std::string& indexDir,
                std::size_t k, std::size_t dim) {
  const Library lib = loadLibraryDir(corpus);
  const PremiseIndex index =
      indexDir.empty() ? buildIndex(lib.records, EncoderSpec::hashTrigram(dim))
                       : loadIndex((fs::path(indexDir) / "embeddings.npy").string(),
                                   (fs::path(indexDir) / "premises.jsonl").string(),
                                   EncoderSpec::hashTrigram(dim));
  // Without a theorem context every corpus module counts as imported.
  std::set<std::string> modules;
  for (const auto& f : lib.files) modules.insert(f.module);
  for (const auto& p : selectPremises(index, ProofState(parseGoalText(goal)), modules, k)) {
    std::cout << p.score << "\t" << p.record.name << "\t";
    if (p.inScope) {
      std::cout << p.signatureText;
      if (p.docstring) std::cout << "\t-- " << *p.docstring;
    } else {
      std::cout << "(import " << p.requiredImport << ")\t" << p.definitionSource;
    }
    std::cout << "\n";
  }
  return 0;
}

int runBench(const std::string& corpus, const std::string& out, const GeneratorOptions& g,
             const LimitOptions& l) {
  const Library lib = loadLibraryDir(corpus);
  const GeneratorSpec gen = g.build();
  const BenchReport report = runBenchmark(
      lib, {ToolSpec::rulesOnly(l.limits), ToolSpec::suggestOnly(gen), ToolSpec::searchWithGenerator(gen, l.limits)});
  writeFile(out, toJson(report));
  std::cout << lib.theoremCount() << " theorems\n" << renderTable(report);
  return 0;
}

struct BotArgs {
  std::string root;
  bool apply = false;
  std::string dryRunDir = "copilot-pr";
  std::string date;
  bool submit = false;
  std::string host;
  int port = 80;
  std::string repo;
};

int runBotScan(const BotArgs& a, const GeneratorOptions& g, const LimitOptions& l) {
  BotOptions options;
  options.generator = g.build();
  options.limits = l.limits;
  options.date = a.date;
  const BotReport report = runBot(a.root, options);
  for (const auto& i : report.issues) std::cerr << "skipped " << i.path << ": " << i.message << "\n";
  for (const auto& p : report.patches)
    std::cout << "fixed  " << relativePath(p.path, a.root) << " " << p.theoremName << ": "
              << p.replacementText << "\n";
  for (const auto& f : report.failures)
    std::cout << "open   " << relativePath(f.site.path, a.root) << " " << f.site.theoremName << ": "
              << f.reason << "\n";
  std::cout << report.sites.size() << " sorries, " << report.patches.size() << " repaired\n";
  if (!report.payload) return 0;

  const SubmitResult dry = DryRunClient(a.dryRunDir).submit(*report.payload, report.diff);
  for (const auto& f : dry.writtenFiles) std::cout << "wrote " << f << "\n";
  if (a.apply) {
    writePatchedFiles(report);
    std::cout << "applied to " << report.patched.size() << " files\n";
  }
  if (a.submit) {
    const char* token = std::getenv("COPILOT_HOST_TOKEN");
    GitHostClient client({a.host, a.port, a.repo, token ? token : ""});
    const SubmitResult r = client.submit(*report.payload, report.diff);
    std::cout << "opened " << r.location << "\n";
  }
  return 0;
}

httplib::Server* gServer = nullptr;

int runServe(int port, const std::string& corpus, const std::string& generator, const std::string& uiDir,
             bool debug, const std::string& sessionLog, const LimitOptions& l) {
  ServiceConfig config;
  config.generator = parseGeneratorSpec(generator);
  config.limits = l.limits;
  config.debugEndpoints = debug;
  config.sessionLog = sessionLog;
  ProofService svc(loadOptional(corpus), config);
  httplib::Server server;
  installRoutes(server, svc, uiDir);
  gServer = &server;
  std::signal(SIGINT, [](int) {
    if (gServer) gServer->stop();
  });
  std::cout << "listening on http://127.0.0.1:" << port << "\n" << std::flush;
  if (!server.listen("0.0.0.0", port)) throw Error("cannot listen on port " + std::to_string(port));
  return 0;
}

int runGenerate(const std::string& input, const std::string& prefix, const std::string& corpus,
                const GeneratorOptions& g) {
  const Library lib = loadOptional(corpus);
  for (const auto& o : makeGenerator(g.build(), lib.lemmas)->generate(input, prefix))
    std::cout << o.score << "\t" << o.text << "\n";
  return 0;
}

int runEncode(const std::string& input, const std::string& encoder, std::size_t dim) {
  EncoderSpec spec = EncoderSpec::hashTrigram(dim);
  if (encoder.rfind("external:", 0) == 0) {
    const auto rest = encoder.substr(9);
    const auto c = rest.find(':');
    if (c == std::string::npos) throw InvalidParam("expected external:<host>:<port>");
    spec = EncoderSpec::external("builtin", rest.substr(0, c), std::stoi(rest.substr(c + 1)));
  } else if (encoder != "hash") {
    throw InvalidParam("unknown encoder '" + encoder + "'");
  }
  const Vector v = encode(spec, input);
  for (std::size_t i = 0; i < v.dim(); ++i) std::cout << (i ? " " : "") << v[i];
  std::cout << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proof copilot: tactic suggestion, proof search, premise selection and repair"};
  app.require_subcommand(1);

  std::string dir, goal, corpus, out, input, prefix, indexDir;
  bool allowSorry = false, rulesOnly = false, debug = false;
  std::size_t k = kDefaultPremiseCount, dim = kDefaultEncoderDim;
  GeneratorOptions gen;
  LimitOptions limits;
  int status = 0;

  auto* check = app.add_subcommand("check", "validate every theorem in a corpus directory");
  check->add_option("dir", dir, "corpus directory")->required();
  check->add_flag("--allow-sorry", allowSorry, "accept proofs closed with sorry");
  check->callback([&] { status = runCheck(dir, allowSorry); });

  auto* suggest = app.add_subcommand("suggest", "checked tactic suggestions for a goal");
  suggest->add_option("goal", goal, "formula or sequent")->required();
  suggest->add_option("--corpus", corpus, "library whose lemmas are in scope");
  gen.add(suggest);
  suggest->callback([&] { status = runSuggest(goal, corpus, gen); });

  auto* search = app.add_subcommand("search", "best-first proof search");
  search->add_option("goal", goal, "formula or sequent")->required();
  search->add_option("--corpus", corpus, "library whose lemmas are in scope");
  search->add_flag("--rules-only", rulesOnly, "do not consult the generator");
  gen.add(search);
  limits.add(search);
  search->callback([&] { status = runSearch(goal, corpus, gen, limits, rulesOnly); });

  auto* premises = app.add_subcommand("premises", "rank library lemmas for a goal");
  premises->add_option("goal", goal, "formula or sequent")->required();
  premises->add_option("--corpus", corpus, "library directory")->required();
  premises->add_option("--index-dir", indexDir, "prebuilt index (embeddings.npy, premises.jsonl)");
  premises->add_option("-k", k, "number of premises")->check(CLI::PositiveNumber);
  premises->add_option("--dim", dim, "encoder dimension");
  premises->callback([&] { status = runPremises(goal, corpus, indexDir, k, dim); });

  auto* index = app.add_subcommand("index", "premise index maintenance");
  auto* build = index->add_subcommand("build", "embed every lemma of a corpus");
  build->add_option("--corpus", corpus, "library directory")->required();
  build->add_option("--out", out, "output directory")->required();
  build->add_option("--dim", dim, "encoder dimension");
  build->callback([&] { status = runIndexBuild(corpus, out, dim); });
  index->require_subcommand(1);

  auto* bench = app.add_subcommand("bench", "human-collaboration benchmark over a corpus");
  bench->add_option("--corpus", corpus, "benchmark corpus")->required();
  bench->add_option("--out", out, "report path")->default_val("bench_report.json");
  gen.add(bench);
  limits.add(bench);
  bench->callback([&] { status = runBench(corpus, out, gen, limits); });

  BotArgs botArgs;
  auto* bot = app.add_subcommand("bot", "sorry-repair bot");
  auto* scan = bot->add_subcommand("scan", "find sorries, repair them and prepare a pull request");
  scan->add_option("--root", botArgs.root, "repository root")->required();
  scan->add_flag("--apply", botArgs.apply, "rewrite the repaired files in place");
  scan->add_option("--dry-run-dir", botArgs.dryRunDir, "where pr_payload.json and changes.diff go");
  scan->add_option("--date", botArgs.date, "UTC date for the branch name (YYYY-MM-DD)");
  scan->add_flag("--submit", botArgs.submit, "also open a pull request (token from COPILOT_HOST_TOKEN)");
  scan->add_option("--host", botArgs.host, "git host API address");
  scan->add_option("--port", botArgs.port, "git host API port");
  scan->add_option("--repo", botArgs.repo, "owner/name");
  gen.add(scan);
  limits.add(scan);
  scan->callback([&] { status = runBotScan(botArgs, gen, limits); });
  bot->require_subcommand(1);

  int port = 8080;
  std::string generator = "builtin", uiDir, sessionLog;
  auto* serve = app.add_subcommand("serve", "HTTP service for sessions and the wire protocol");
  serve->add_option("--port", port, "listen port");
  serve->add_option("--corpus", corpus, "library directory");
  serve->add_option("--generator", generator, "builtin | external:<host>:<port>[:<model>]");
  serve->add_option("--ui-dir", uiDir, "static UI bundle served under /ui");
  serve->add_option("--session-log", sessionLog, "append-only session event log");
  serve->add_flag("--debug", debug, "enable the session consistency route");
  limits.add(serve);
  serve->callback([&] { status = runServe(port, corpus, generator, uiDir, debug, sessionLog, limits); });

  auto* generate = app.add_subcommand("generate", "raw generator output for an input string");
  generate->add_option("input", input, "encoder-side text, usually a rendered goal")->required();
  generate->add_option("--prefix", prefix, "required output prefix");
  generate->add_option("--corpus", corpus, "library whose lemmas the builtin generator knows");
  gen.add(generate);
  generate->callback([&] { status = runGenerate(input, prefix, corpus, gen); });

  std::string encoder = "hash";
  auto* enc = app.add_subcommand("encode", "embed a string");
  enc->add_option("input", input, "text")->required();
  enc->add_option("--encoder", encoder, "hash | external:<host>:<port>");
  enc->add_option("--dim", dim, "hash encoder dimension");
  enc->callback([&] { status = runEncode(input, encoder, dim); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const copilot::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return status;
}
