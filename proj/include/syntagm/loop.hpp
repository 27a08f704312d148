#pragma once

#include <chrono>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "pyopl/compile.hpp"
#include "syntagm/backend.hpp"
#include "syntagm/json_extract.hpp"
#include "syntagm/knowledge_base.hpp"
#include "syntagm/prompts.hpp"
#include "syntagm/telemetry.hpp"

namespace syntagm {

struct LoopConfig {
    std::string grammarText;  // G, injected verbatim into every prompt
    std::size_t k = 3;        // few-shot exemplars retrieved per task
    int budget = 5;           // maximum iterations
    CompletionParams decoding;
    std::string modelPath;        // artifacts persisted every iteration; "" skips
    std::string dataPath;
    std::string exchangeLogPath;  // JSONL audit log; "" skips
    RateTable rates;
};

enum class LoopOutcome { Aligned, BudgetExhausted };

struct ExchangeRecord {
    enum class Phase { Generation, Alignment, FinalAssessment };
    Phase phase = Phase::Generation;
    int iteration = 0;
    long promptTokens = 0;
    long completionTokens = 0;
    double latencySeconds = 0;
};

inline const char* to_string(ExchangeRecord::Phase p) {
    switch (p) {
        case ExchangeRecord::Phase::Generation: return "generation";
        case ExchangeRecord::Phase::Alignment: return "alignment";
        case ExchangeRecord::Phase::FinalAssessment: return "final_assessment";
    }
    return "?";
}

// Audit trail of one loop iteration; the gate and curriculum properties are
// assertable from these records.
struct IterationRecord {
    int iteration = 0;
    bool parsed = false;
    std::string modelText, dataText;
    bool compiled = false;
    std::vector<pyopl::Diagnostic> diagnostics;
    bool alignmentRequested = false;
    bool aligned = false;
    std::string assessment;
};

struct LoopResult {
    LoopOutcome outcome = LoopOutcome::BudgetExhausted;
    std::string modelText, dataText;
    std::string finalAssessment;
    Telemetry telemetry;
    std::vector<ExchangeRecord> exchanges;
    std::vector<IterationRecord> iterations;
};

namespace detail {

inline void writeFileIfSet(const std::string& path, const std::string& content) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::vector<pyopl::Diagnostic> errorsOnly(const std::vector<pyopl::Diagnostic>& all) {
    std::vector<pyopl::Diagnostic> out;
    for (const auto& d : all) {
        if (d.severity == pyopl::Severity::Error) out.push_back(d);
    }
    return out;
}

}  // namespace detail

// The generate-compile-assess-revise loop. Terminates at the first iteration
// whose candidate both compiles cleanly and is judged aligned; otherwise runs
// until the budget is exhausted and then requests one final assessment when
// errors remain.
inline LoopResult runSyntagm(const std::string& problem, const KnowledgeBase& kb,
                             const EmbeddingProvider& provider, Backend& backend,
                             const LoopConfig& config) {
    if (config.grammarText.empty()) {
        throw std::invalid_argument("the grammar reference G must not be empty");
    }
    if (config.budget < 1) {
        throw std::invalid_argument("the iteration budget must be at least 1");
    }
    const auto start = std::chrono::steady_clock::now();
    LoopResult result;

    TaskContext ctx;
    ctx.problemText = problem;
    ctx.grammarReference = config.grammarText;
    ctx.fewShotBlock = formatFewShotBlock(topK(kb, provider, problem, config.k));

    auto callBackend = [&](ExchangeRecord::Phase phase, int iteration,
                           const std::string& prompt) {
        BackendResult r = backend.complete("", prompt, config.decoding);
        ExchangeRecord rec;
        rec.phase = phase;
        rec.iteration = iteration;
        rec.promptTokens = r.usage.promptTokens;
        rec.completionTokens = r.usage.completionTokens;
        rec.latencySeconds = r.latencySeconds;
        result.exchanges.push_back(rec);
        result.telemetry.promptTokens += r.usage.promptTokens;
        result.telemetry.completionTokens += r.usage.completionTokens;
        return r;
    };

    std::string prompt = buildGenerationPrompt(ctx);
    bool aligned = false;
    bool errorsRemain = true;

    for (int t = 1; t <= config.budget; ++t) {
        result.telemetry.iterations = t;
        BackendResult gen = callBackend(ExchangeRecord::Phase::Generation, t, prompt);

        IterationRecord iter;
        iter.iteration = t;

        Extraction extracted = extractJsonObject(gen.text);
        std::optional<GenerationPayload> payload;
        if (extracted.ok()) payload = parseGenerationPayload(*extracted.value);

        if (!payload) {
            // An unparseable response consumes the iteration and feeds a
            // synthetic diagnostic into a syntax-kind revision.
            iter.diagnostics.push_back(pyopl::makeDiagnostic(
                pyopl::codes::OrcBadResponse, std::nullopt,
                "Response did not contain a valid model/data object."));
            ctx.compilerErrors = iter.diagnostics;
            ctx.assessment.reset();
            errorsRemain = true;
            result.iterations.push_back(std::move(iter));
            prompt = buildRevisionPrompt(ctx, RevisionKind::Syntax);
            continue;
        }

        iter.parsed = true;
        iter.modelText = payload->model;
        iter.dataText = payload->data;
        result.modelText = payload->model;
        result.dataText = payload->data;

        pyopl::CompileResult compiled = pyopl::compileStrings(payload->model, payload->data);
        detail::writeFileIfSet(config.modelPath, payload->model);
        detail::writeFileIfSet(config.dataPath, payload->data);
        ctx.lastAttempt = {payload->model, payload->data};
        iter.compiled = compiled.ok();
        iter.diagnostics = compiled.diagnostics;

        if (compiled.ok()) {
            errorsRemain = false;
            iter.alignmentRequested = true;
            std::string alignPrompt = buildAlignmentPrompt(ctx, payload->model, payload->data);
            BackendResult ar = callBackend(ExchangeRecord::Phase::Alignment, t, alignPrompt);
            Extraction verdictJson = extractJsonObject(ar.text);
            std::optional<AlignmentPayload> verdict;
            if (verdictJson.ok()) verdict = parseAlignmentPayload(*verdictJson.value);
            if (verdict) {
                iter.aligned = verdict->aligned;
                iter.assessment = verdict->assessment;
            } else {
                iter.aligned = false;
                iter.assessment =
                    "The alignment response could not be parsed into the required "
                    "{\"aligned\", \"assessment\"} object; treating the attempt as not "
                    "aligned.";
            }
            if (iter.aligned) {
                result.finalAssessment = iter.assessment;
                aligned = true;
                result.iterations.push_back(std::move(iter));
                break;
            }
            ctx.assessment = iter.assessment;
            ctx.compilerErrors.clear();
            result.finalAssessment = iter.assessment;
            result.iterations.push_back(std::move(iter));
            prompt = buildRevisionPrompt(ctx, RevisionKind::Alignment);
        } else {
            errorsRemain = true;
            ctx.compilerErrors = detail::errorsOnly(compiled.diagnostics);
            ctx.assessment.reset();
            result.iterations.push_back(std::move(iter));
            prompt = buildRevisionPrompt(ctx, RevisionKind::Syntax);
        }
    }

    result.outcome = aligned ? LoopOutcome::Aligned : LoopOutcome::BudgetExhausted;

    if (!aligned && errorsRemain) {
        // Budget exhausted with errors: one final assessment for the report.
        int t = result.telemetry.iterations;
        std::string finalPrompt = buildAlignmentPrompt(
            ctx, ctx.lastAttempt ? ctx.lastAttempt->first : "",
            ctx.lastAttempt ? ctx.lastAttempt->second : "");
        BackendResult fr = callBackend(ExchangeRecord::Phase::FinalAssessment, t, finalPrompt);
        Extraction verdictJson = extractJsonObject(fr.text);
        std::optional<AlignmentPayload> verdict;
        if (verdictJson.ok()) verdict = parseAlignmentPayload(*verdictJson.value);
        result.finalAssessment =
            verdict ? verdict->assessment
                    : "No final assessment could be parsed from the backend response.";
    }

    result.telemetry.latencySeconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.telemetry.costDollars = config.rates.cost(
        backend.modelId(), result.telemetry.promptTokens, result.telemetry.completionTokens);

    if (!config.exchangeLogPath.empty()) {
        std::ofstream log(config.exchangeLogPath, std::ios::binary);
        for (const auto& e : result.exchanges) {
            nlohmann::json line = {{"phase", to_string(e.phase)},
                                   {"iteration", e.iteration},
                                   {"model", backend.modelId()},
                                   {"prompt_tokens", e.promptTokens},
                                   {"completion_tokens", e.completionTokens},
                                   {"latency_seconds", e.latencySeconds}};
            log << line.dump() << "\n";
        }
    }
    return result;
}

}  // namespace syntagm
