// syntagm: compile and solve PyOPL models, run the generate-compile-assess-
// revise loop against an LLM backend, index exemplar knowledge bases, and
// evaluate benchmark suites.
//
// Exit codes (total mapping, also shown in --help):
//   0  success / aligned / optimal
//   1  compilation errors
//   2  input, file, or usage errors (missing paths, empty suite)
//   3  solver finished without an optimal solution
//   4  loop budget exhausted without an aligned artifact
//   5  backend authentication or transport failure

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include "pyopl/compile.hpp"
#include "pyopl/diagnostic_json.hpp"
#include "syntagm/eval.hpp"
#include "syntagm/grammar.hpp"
#include "syntagm/http_backend.hpp"
#include "syntagm/loop.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitCompileError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNotOptimal = 3;
constexpr int kExitBudget = 4;
constexpr int kExitBackend = 5;

struct ToolConfig {
    bool verbose = false;
    syntagm::CompletionParams decoding;
    std::string backend = "http";  // "http" or "scripted:<responses.jsonl>"
    std::string model = "gpt-4.1";
    std::string baseUrl = "https://api.openai.com";
    std::string completionsPath = "/v1/chat/completions";
    std::string apiKeyEnv = "OPENAI_API_KEY";
    std::string kbPath = "kb";
    std::string grammarPath;  // empty -> embedded copy
    std::string outputDir = "out";
    int budget = 5;
    int k = 3;
    int repetitions = 1;
    int parallelism = 1;
    syntagm::RateTable rates;
};

// The config file overrides command-line flags.
void applyConfigFile(ToolConfig& cfg, const std::string& path) {
    if (path.empty()) return;
    nlohmann::json j = nlohmann::json::parse(pyopl::readFileOrThrow(path));
    cfg.backend = j.value("backend", cfg.backend);
    cfg.model = j.value("model", cfg.model);
    cfg.baseUrl = j.value("base_url", cfg.baseUrl);
    cfg.completionsPath = j.value("completions_path", cfg.completionsPath);
    cfg.apiKeyEnv = j.value("api_key_env", cfg.apiKeyEnv);
    cfg.kbPath = j.value("kb", cfg.kbPath);
    cfg.grammarPath = j.value("grammar", cfg.grammarPath);
    cfg.outputDir = j.value("output", cfg.outputDir);
    cfg.budget = j.value("budget", cfg.budget);
    cfg.k = j.value("k", cfg.k);
    cfg.repetitions = j.value("repetitions", cfg.repetitions);
    cfg.parallelism = j.value("parallelism", cfg.parallelism);
    if (j.contains("rates")) cfg.rates = syntagm::RateTable::fromJson(j["rates"]);
    if (j.contains("decoding")) {
        const auto& d = j["decoding"];
        cfg.decoding.temperature = d.value("temperature", cfg.decoding.temperature);
        cfg.decoding.topP = d.value("top_p", cfg.decoding.topP);
        cfg.decoding.frequencyPenalty =
            d.value("frequency_penalty", cfg.decoding.frequencyPenalty);
        cfg.decoding.presencePenalty =
            d.value("presence_penalty", cfg.decoding.presencePenalty);
    }
}

std::string loadGrammar(const ToolConfig& cfg) {
    if (cfg.grammarPath.empty()) return syntagm::grammarReferenceMarkdown();
    return pyopl::readFileOrThrow(cfg.grammarPath);
}

std::unique_ptr<syntagm::Backend> makeBackend(const ToolConfig& cfg) {
    if (cfg.backend.rfind("scripted:", 0) == 0) {
        std::string path = cfg.backend.substr(9);
        std::vector<syntagm::ScriptedResponse> responses;
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot read scripted responses: " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            nlohmann::json j = nlohmann::json::parse(line);
            syntagm::ScriptedResponse r;
            r.text = j.value("text", "");
            r.promptTokens = j.value("prompt_tokens", 0L);
            r.completionTokens = j.value("completion_tokens", 0L);
            r.latencySeconds = j.value("latency", 0.0);
            responses.push_back(std::move(r));
        }
        return std::make_unique<syntagm::ScriptedBackend>(std::move(responses), cfg.model);
    }
    syntagm::HttpBackendConfig http;
    http.baseUrl = cfg.baseUrl;
    http.completionsPath = cfg.completionsPath;
    http.model = cfg.model;
    http.apiKeyEnv = cfg.apiKeyEnv;
    return std::make_unique<syntagm::HttpChatBackend>(http);
}

int requireFiles(std::initializer_list<std::string> paths) {
    for (const auto& p : paths) {
        if (!fs::exists(p)) {
            std::cerr << "error: no such file: " << p << "\n";
            return kExitUsage;
        }
    }
    return kExitOk;
}

int cmdCompile(const std::string& modelPath, const std::string& dataPath,
               bool jsonDiagnostics) {
    if (int rc = requireFiles({modelPath, dataPath}); rc != kExitOk) return rc;
    pyopl::CompileResult result = pyopl::compileFiles(modelPath, dataPath);
    for (const auto& d : result.diagnostics) {
        if (jsonDiagnostics) {
            std::cerr << pyopl::diagnosticToJson(d).dump() << "\n";
        } else {
            std::cerr << d.render() << "\n";
        }
    }
    if (!result.ok()) return kExitCompileError;
    std::cout << "compiled: " << result.flat->variables.size() << " variables, "
              << result.flat->rows.size() << " constraints\n";
    return kExitOk;
}

int cmdSolve(const std::string& modelPath, const std::string& dataPath, bool emitLp,
             const pyopl::SolveOptions& opts) {
    if (int rc = requireFiles({modelPath, dataPath}); rc != kExitOk) return rc;
    pyopl::CompileResult result = pyopl::compileFiles(modelPath, dataPath);
    for (const auto& d : result.diagnostics) std::cerr << d.render() << "\n";
    if (!result.ok()) return kExitCompileError;
    if (emitLp) {
        std::cout << pyopl::exportLpFormat(*result.flat);
        return kExitOk;
    }
    pyopl::Solution sol = pyopl::solve(*result.flat, opts);
    std::cout << pyopl::to_string(sol.status);
    if (sol.objectiveValue) {
        std::cout << " " << pyopl::formatValue(*sol.objectiveValue);
    } else if (sol.incumbentObjective) {
        std::cout << " incumbent " << pyopl::formatValue(*sol.incumbentObjective);
    }
    std::cout << "\n";
    return sol.status == pyopl::Solution::Status::Optimal ? kExitOk : kExitNotOptimal;
}

int cmdRun(const std::string& problemPath, const ToolConfig& cfg) {
    if (int rc = requireFiles({problemPath}); rc != kExitOk) return rc;
    std::string problem = pyopl::readFileOrThrow(problemPath);
    syntagm::HashingEmbedding provider;
    syntagm::KnowledgeBase kb = syntagm::indexKnowledgeBase(cfg.kbPath, provider);
    for (const auto& w : kb.warnings) std::cerr << "warning: " << w << "\n";

    std::unique_ptr<syntagm::Backend> backend = makeBackend(cfg);

    fs::create_directories(cfg.outputDir);
    syntagm::LoopConfig loop;
    loop.grammarText = loadGrammar(cfg);
    loop.k = static_cast<std::size_t>(cfg.k);
    loop.budget = cfg.budget;
    loop.decoding = cfg.decoding;
    loop.rates = cfg.rates;
    loop.modelPath = (fs::path(cfg.outputDir) / "model.mod").string();
    loop.dataPath = (fs::path(cfg.outputDir) / "data.dat").string();
    loop.exchangeLogPath = (fs::path(cfg.outputDir) / "exchange.jsonl").string();

    if (cfg.verbose) {
        std::cerr << "kb: " << kb.exemplars.size() << " exemplars; backend: "
                  << backend->modelId() << "; budget " << cfg.budget << ", k " << cfg.k
                  << "\n";
    }
    syntagm::LoopResult result =
        syntagm::runSyntagm(problem, kb, provider, *backend, loop);

    std::ofstream assess(fs::path(cfg.outputDir) / "assessment.txt");
    assess << result.finalAssessment << "\n";
    std::ofstream telem(fs::path(cfg.outputDir) / "telemetry.json");
    telem << result.telemetry.toJson().dump(2) << "\n";

    std::cout << (result.outcome == syntagm::LoopOutcome::Aligned ? "aligned"
                                                                  : "budget-exhausted")
              << " after " << result.telemetry.iterations << " iterations; tokens "
              << result.telemetry.promptTokens << "/" << result.telemetry.completionTokens
              << "; cost $" << result.telemetry.costDollars << "\n";
    return result.outcome == syntagm::LoopOutcome::Aligned ? kExitOk : kExitBudget;
}

int cmdEval(const std::string& suitePath, const ToolConfig& cfg) {
    if (int rc = requireFiles({suitePath}); rc != kExitOk) return rc;
    std::vector<syntagm::BenchmarkInstance> instances = syntagm::loadSuite(suitePath);
    if (instances.empty()) {
        std::cerr << "error: benchmark suite is empty: " << suitePath << "\n";
        return kExitUsage;
    }
    syntagm::HashingEmbedding provider;
    syntagm::KnowledgeBase kb = syntagm::indexKnowledgeBase(cfg.kbPath, provider);
    std::unique_ptr<syntagm::Backend> backend = makeBackend(cfg);

    syntagm::SuiteConfig suite;
    suite.loop.grammarText = loadGrammar(cfg);
    suite.loop.k = static_cast<std::size_t>(cfg.k);
    suite.loop.budget = cfg.budget;
    suite.loop.decoding = cfg.decoding;
    suite.loop.rates = cfg.rates;
    suite.repetitions = cfg.repetitions;
    suite.parallelism = cfg.parallelism;
    suite.outputDirectory = cfg.outputDir;

    if (cfg.verbose) {
        std::cerr << "suite: " << instances.size() << " instances x " << cfg.repetitions
                  << " repetitions\n";
    }
    syntagm::SuiteResult result =
        syntagm::runSuite(instances, kb, provider, *backend, suite);
    if (cfg.verbose) {
        for (const auto& rec : result.records) {
            std::cerr << rec.instanceId << "/" << rec.repetition << ": "
                      << syntagm::to_string(rec.outcome) << "\n";
        }
    }
    std::cout << result.report.table();
    std::cout << "records written to " << cfg.outputDir << "/runrecords.jsonl\n";
    return kExitOk;
}

int cmdKbIndex(const std::string& dir) {
    syntagm::HashingEmbedding provider;
    syntagm::KnowledgeBase kb = syntagm::indexKnowledgeBase(dir, provider);
    for (const auto& w : kb.warnings) std::cerr << "warning: " << w << "\n";
    syntagm::writeManifest(dir, kb);
    std::cout << "indexed " << kb.exemplars.size() << " exemplars ("
              << kb.providerId << ", dimension " << kb.dimension << ")\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "PyOPL compiler/solver toolkit with the SyntAGM generate-compile-assess-revise "
        "loop.\nExit codes: 0 ok, 1 compile errors, 2 input/usage errors, 3 not optimal, "
        "4 budget exhausted, 5 backend failure."};
    app.require_subcommand(1);

    ToolConfig cfg;
    std::string configPath;

    // compile
    std::string modelPath, dataPath;
    bool jsonDiagnostics = false;
    auto* compileCmd = app.add_subcommand("compile", "Compile a model/data pair");
    compileCmd->add_option("model", modelPath, "model file (.mod)")->required();
    compileCmd->add_option("data", dataPath, "data file (.dat)")->required();
    compileCmd->add_flag("--json", jsonDiagnostics,
                         "emit diagnostics as JSONL records instead of text");

    // solve
    bool emitLp = false;
    pyopl::SolveOptions solveOpts;
    auto* solveCmd = app.add_subcommand("solve", "Compile and solve a model/data pair");
    solveCmd->add_option("model", modelPath, "model file (.mod)")->required();
    solveCmd->add_option("data", dataPath, "data file (.dat)")->required();
    solveCmd->add_flag("--emit-lp", emitLp, "print LP-format text instead of solving");
    solveCmd->add_option("--time-limit", solveOpts.timeLimitSeconds, "seconds");
    solveCmd->add_option("--node-limit", solveOpts.nodeLimit, "branch-and-bound nodes");

    auto addBackendFlags = [&](CLI::App* cmd) {
        cmd->add_option("--config", configPath, "JSON config file (overrides flags)");
        cmd->add_option("--backend", cfg.backend, "http | scripted:<responses.jsonl>");
        cmd->add_option("--model", cfg.model, "backend model id");
        cmd->add_option("--base-url", cfg.baseUrl, "backend base URL");
        cmd->add_option("--api-key-env", cfg.apiKeyEnv, "env var holding the API key");
        cmd->add_option("--kb", cfg.kbPath, "knowledge base directory");
        cmd->add_option("--grammar", cfg.grammarPath, "grammar reference markdown");
        cmd->add_option("--out", cfg.outputDir, "output directory");
        cmd->add_option("--budget", cfg.budget, "maximum loop iterations")
            ->check(CLI::PositiveNumber);
        cmd->add_option("-k,--top-k", cfg.k, "few-shot exemplars to retrieve")
            ->check(CLI::PositiveNumber);
        cmd->add_flag("-v,--verbose", cfg.verbose, "report per-step progress");
    };

    // run
    std::string problemPath;
    auto* runCmd = app.add_subcommand("run", "Run the loop on one problem description");
    runCmd->add_option("problem", problemPath, "problem description (.txt)")->required();
    addBackendFlags(runCmd);

    // eval
    std::string suitePath;
    auto* evalCmd = app.add_subcommand("eval", "Evaluate a benchmark suite");
    evalCmd->add_option("suite", suitePath, "suite file (JSONL or JSON array)")->required();
    addBackendFlags(evalCmd);
    evalCmd->add_option("--reps", cfg.repetitions, "repetitions per instance")
        ->check(CLI::PositiveNumber);
    evalCmd->add_option("--parallel", cfg.parallelism, "concurrent instances")
        ->check(CLI::PositiveNumber);

    // kb index
    auto* kbCmd = app.add_subcommand("kb", "Knowledge base maintenance");
    kbCmd->require_subcommand(1);
    std::string kbDir = "kb";
    auto* kbIndexCmd = kbCmd->add_subcommand("index", "Index a directory of triplets");
    kbIndexCmd->add_option("directory", kbDir, "knowledge base directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (compileCmd->parsed()) return cmdCompile(modelPath, dataPath, jsonDiagnostics);
        if (solveCmd->parsed()) return cmdSolve(modelPath, dataPath, emitLp, solveOpts);
        applyConfigFile(cfg, configPath);
        if (runCmd->parsed()) return cmdRun(problemPath, cfg);
        if (evalCmd->parsed()) return cmdEval(suitePath, cfg);
        if (kbIndexCmd->parsed()) return cmdKbIndex(kbDir);
    } catch (const syntagm::BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const syntagm::KbError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
