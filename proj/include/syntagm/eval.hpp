#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pyopl/solver.hpp"
#include "syntagm/loop.hpp"

namespace syntagm {

struct BenchmarkInstance {
    std::string id;
    std::string problemText;
    std::optional<double> expectedObjective;
};

enum class Outcome { AC, CE, RE, WA };

inline const char* to_string(Outcome o) {
    switch (o) {
        case Outcome::AC: return "AC";
        case Outcome::CE: return "CE";
        case Outcome::RE: return "RE";
        case Outcome::WA: return "WA";
    }
    return "?";
}

struct RunRecord {
    std::string instanceId;
    int repetition = 1;
    Outcome outcome = Outcome::CE;
    std::optional<double> observedObjective;
    Telemetry telemetry;
    std::string note;  // harness-level failure detail, if any

    nlohmann::json toJson() const {
        nlohmann::json j = {{"instance", instanceId},
                            {"repetition", repetition},
                            {"outcome", to_string(outcome)},
                            {"telemetry", telemetry.toJson()}};
        j["observed_objective"] =
            observedObjective ? nlohmann::json(*observedObjective) : nlohmann::json(nullptr);
        if (!note.empty()) j["note"] = note;
        return j;
    }
};

struct Report {
    std::size_t records = 0;
    double accuracy = 0, ceRate = 0, reRate = 0, waRate = 0;
    double avgPromptTokens = 0, avgCompletionTokens = 0;
    double avgLatencySeconds = 0, avgCostDollars = 0, avgIterations = 0;

    nlohmann::json toJson() const {
        return {{"records", records},
                {"accuracy", accuracy},
                {"ce_rate", ceRate},
                {"re_rate", reRate},
                {"wa_rate", waRate},
                {"avg_prompt_tokens", avgPromptTokens},
                {"avg_completion_tokens", avgCompletionTokens},
                {"avg_latency_seconds", avgLatencySeconds},
                {"avg_cost_dollars", avgCostDollars},
                {"avg_iterations", avgIterations}};
    }

    std::string table() const {
        std::ostringstream os;
        auto pct = [](double v) {
            std::ostringstream p;
            p.precision(1);
            p << std::fixed << v * 100 << "%";
            return p.str();
        };
        os << "records: " << records << "\n";
        os << "accuracy: " << pct(accuracy) << "  CE: " << pct(ceRate)
           << "  RE: " << pct(reRate) << "  WA: " << pct(waRate) << "\n";
        os << "avg tokens (prompt/completion): " << avgPromptTokens << "/"
           << avgCompletionTokens << "\n";
        os << "avg latency: " << avgLatencySeconds << "s  avg cost: $" << avgCostDollars
           << "  avg iterations: " << avgIterations << "\n";
        return os.str();
    }
};

// Outcome classification with the benchmark tolerances: relative 1e-6 with an
// absolute floor of 1e-9. Rule order: CE, then RE, then AC/WA.
inline Outcome classifyOutcome(std::optional<double> observed, std::optional<double> expected,
                               bool compiled, pyopl::Solution::Status solveStatus) {
    if (!compiled) return Outcome::CE;
    const bool solveProducedObjective =
        solveStatus == pyopl::Solution::Status::Optimal && observed.has_value();
    if (!solveProducedObjective && expected.has_value()) return Outcome::RE;
    if (!observed.has_value() && !expected.has_value()) return Outcome::AC;
    if (!observed.has_value() || !expected.has_value()) return Outcome::WA;
    double tol = std::max(1e-9, 1e-6 * std::abs(*expected));
    return std::abs(*observed - *expected) <= tol ? Outcome::AC : Outcome::WA;
}

// ---------------------------------------------------------------------------
// Suite loading: native JSONL records plus a converter for the cleaned public
// benchmark layouts (a JSON array with question/answer style keys).

namespace detail {

inline std::optional<double> numericField(const nlohmann::json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        try {
            return std::stod(j.get<std::string>());
        } catch (...) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

inline BenchmarkInstance instanceFromJson(const nlohmann::json& j, std::size_t ordinal) {
    BenchmarkInstance inst;
    for (const char* key : {"id", "name", "problem_id"}) {
        if (j.contains(key)) {
            inst.id = j[key].is_string() ? j[key].get<std::string>() : j[key].dump();
            break;
        }
    }
    if (inst.id.empty()) inst.id = "instance-" + std::to_string(ordinal);
    for (const char* key : {"description", "question", "problem", "text"}) {
        if (j.contains(key) && j[key].is_string()) {
            inst.problemText = j[key].get<std::string>();
            break;
        }
    }
    for (const char* key :
         {"expected_objective", "answer", "objective", "ground_truth", "expected"}) {
        if (j.contains(key)) {
            inst.expectedObjective = numericField(j[key]);
            break;
        }
    }
    return inst;
}

}  // namespace detail

inline std::vector<BenchmarkInstance> loadSuite(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read suite file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();

    std::vector<BenchmarkInstance> out;
    std::size_t firstMeaningful = text.find_first_not_of(" \t\r\n");
    if (firstMeaningful != std::string::npos && text[firstMeaningful] == '[') {
        nlohmann::json arr = nlohmann::json::parse(text, nullptr, false);
        if (arr.is_discarded() || !arr.is_array()) {
            throw std::runtime_error("suite file is not a JSON array or JSONL: " + path);
        }
        for (std::size_t i = 0; i < arr.size(); ++i) {
            out.push_back(detail::instanceFromJson(arr[i], i + 1));
        }
        return out;
    }
    std::istringstream lines(text);
    std::string line;
    std::size_t ordinal = 0;
    while (std::getline(lines, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw std::runtime_error("suite file has a malformed JSONL record: " + path);
        }
        out.push_back(detail::instanceFromJson(j, ++ordinal));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Suite runner

struct SuiteConfig {
    LoopConfig loop;
    int repetitions = 1;
    int parallelism = 1;
    std::string outputDirectory;  // per-run artifacts land in <out>/<id>/<rep>/
    pyopl::SolveOptions solve;
};

struct SuiteResult {
    Report report;
    std::vector<RunRecord> records;
};

namespace detail {

inline RunRecord runOne(const BenchmarkInstance& inst, int rep, const KnowledgeBase& kb,
                        const EmbeddingProvider& provider, Backend& backend,
                        const SuiteConfig& config) {
    namespace fs = std::filesystem;
    RunRecord rec;
    rec.instanceId = inst.id;
    rec.repetition = rep;

    LoopConfig loopConfig = config.loop;
    fs::path runDir;
    if (!config.outputDirectory.empty()) {
        runDir = fs::path(config.outputDirectory) / inst.id / std::to_string(rep);
        fs::create_directories(runDir);
        loopConfig.modelPath = (runDir / "model.mod").string();
        loopConfig.dataPath = (runDir / "data.dat").string();
        loopConfig.exchangeLogPath = (runDir / "exchange.jsonl").string();
    }

    try {
        LoopResult loop = runSyntagm(inst.problemText, kb, provider, backend, loopConfig);
        rec.telemetry = loop.telemetry;

        pyopl::CompileResult compiled =
            pyopl::compileStrings(loop.modelText, loop.dataText);
        pyopl::Solution::Status status = pyopl::Solution::Status::NumericalFailure;
        if (compiled.ok()) {
            pyopl::Solution sol = pyopl::solve(*compiled.flat, config.solve);
            status = sol.status;
            rec.observedObjective = sol.objectiveValue;
        }
        rec.outcome = classifyOutcome(rec.observedObjective, inst.expectedObjective,
                                      compiled.ok(), status);

        if (!runDir.empty()) {
            std::ofstream assess(runDir / "assessment.txt");
            assess << loop.finalAssessment << "\n";
            std::ofstream telem(runDir / "telemetry.json");
            telem << loop.telemetry.toJson().dump(2) << "\n";
        }
    } catch (const std::exception& e) {
        // A harness-level failure produced no compiling artifacts.
        rec.outcome = Outcome::CE;
        rec.note = e.what();
    }
    return rec;
}

}  // namespace detail

inline Report summarize(const std::vector<RunRecord>& records) {
    Report r;
    r.records = records.size();
    if (records.empty()) return r;
    double n = static_cast<double>(records.size());
    for (const auto& rec : records) {
        switch (rec.outcome) {
            case Outcome::AC: r.accuracy += 1; break;
            case Outcome::CE: r.ceRate += 1; break;
            case Outcome::RE: r.reRate += 1; break;
            case Outcome::WA: r.waRate += 1; break;
        }
        r.avgPromptTokens += rec.telemetry.promptTokens;
        r.avgCompletionTokens += rec.telemetry.completionTokens;
        r.avgLatencySeconds += rec.telemetry.latencySeconds;
        r.avgCostDollars += rec.telemetry.costDollars;
        r.avgIterations += rec.telemetry.iterations;
    }
    r.accuracy /= n;
    r.ceRate /= n;
    r.reRate /= n;
    r.waRate /= n;
    r.avgPromptTokens /= n;
    r.avgCompletionTokens /= n;
    r.avgLatencySeconds /= n;
    r.avgCostDollars /= n;
    r.avgIterations /= n;
    return r;
}

// Runs every instance x repetition, classifies outcomes, and persists records.
// Per-instance failures are recorded, never abort the suite.
inline SuiteResult runSuite(const std::vector<BenchmarkInstance>& instances,
                            const KnowledgeBase& kb, const EmbeddingProvider& provider,
                            Backend& backend, const SuiteConfig& config) {
    if (instances.empty()) throw std::runtime_error("benchmark suite is empty");

    struct Job {
        const BenchmarkInstance* inst;
        int rep;
    };
    std::vector<Job> jobs;
    for (const auto& inst : instances) {
        for (int rep = 1; rep <= std::max(1, config.repetitions); ++rep) {
            jobs.push_back({&inst, rep});
        }
    }

    std::vector<RunRecord> records(jobs.size());
    int workers = std::max(1, config.parallelism);
    if (workers == 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            records[i] = detail::runOne(*jobs[i].inst, jobs[i].rep, kb, provider, backend,
                                        config);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto work = [&]() {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                records[i] = detail::runOne(*jobs[i].inst, jobs[i].rep, kb, provider,
                                            backend, config);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < std::min<int>(workers, static_cast<int>(jobs.size())); ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) t.join();
    }

    SuiteResult result;
    result.records = std::move(records);
    result.report = summarize(result.records);

    if (!config.outputDirectory.empty()) {
        namespace fs = std::filesystem;
        fs::create_directories(config.outputDirectory);
        std::ofstream recOut(fs::path(config.outputDirectory) / "runrecords.jsonl");
        for (const auto& rec : result.records) recOut << rec.toJson().dump() << "\n";
        std::ofstream repOut(fs::path(config.outputDirectory) / "report.json");
        repOut << result.report.toJson().dump(2) << "\n";
    }
    return result;
}

}  // namespace syntagm
