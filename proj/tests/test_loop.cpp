#include <catch2/catch.hpp>

#include <filesystem>
#include <random>

#include "support.hpp"
#include "syntagm/grammar.hpp"
#include "syntagm/loop.hpp"

using namespace syntagm;
namespace fs = std::filesystem;

namespace {

std::string generationJson(const std::string& model, const std::string& data) {
    nlohmann::json j;
    j["model"] = model;
    j["data"] = data;
    return j.dump();
}

std::string alignmentJson(bool aligned, const std::string& assessment) {
    nlohmann::json j;
    j["aligned"] = aligned;
    j["assessment"] = assessment;
    return j.dump();
}

KnowledgeBase& bundledKb() {
    static HashingEmbedding provider;
    static KnowledgeBase kb = indexKnowledgeBase(testsupport::kbDir(), provider);
    return kb;
}

HashingEmbedding& provider() {
    static HashingEmbedding p;
    return p;
}

LoopConfig baseConfig() {
    LoopConfig cfg;
    cfg.grammarText = grammarReferenceMarkdown();
    cfg.k = 3;
    cfg.budget = 5;
    return cfg;
}

const std::string kAlpProblem =
    "The Aircraft Landing Problem: decide a landing time for each aircraft so that "
    "every aircraft lands within its time window and separation criteria between "
    "successive landings are respected, minimising total earliness and lateness "
    "penalties.";

}  // namespace

TEST_CASE("alp replay: chained failure, syntax revision, aligned second attempt") {
    const std::string chainedModel = testsupport::fixture("alp_chained.mod");
    const std::string fixedModel = testsupport::fixture("alp.mod");
    const std::string data = testsupport::fixture("alp.dat");

    // Token accounting mirrors a two-iteration trace: 40638 prompt and 2179
    // completion tokens across two generations and one alignment call.
    ScriptedBackend backend(
        {{generationJson(chainedModel, data), 13546, 1100, 1.0},
         {generationJson(fixedModel, data), 13546, 800, 1.2},
         {alignmentJson(true,
                        "The model and data fully align with the aircraft landing "
                        "problem statement; windows, deviation balance, and pairwise "
                        "separation are all present."),
          13546, 279, 0.8}},
        "replay-model");

    LoopConfig cfg = baseConfig();
    fs::path tmp = fs::temp_directory_path() / "syntagm-loop-replay";
    fs::create_directories(tmp);
    cfg.modelPath = (tmp / "model.mod").string();
    cfg.dataPath = (tmp / "data.dat").string();
    RateTable rates;
    rates.set("replay-model", {0.002, 0.008});
    cfg.rates = rates;

    LoopResult r = runSyntagm(kAlpProblem, bundledKb(), provider(), backend, cfg);

    CHECK(r.outcome == LoopOutcome::Aligned);
    CHECK(r.telemetry.iterations == 2);

    int generations = 0, alignments = 0, finals = 0;
    for (const auto& e : r.exchanges) {
        if (e.phase == ExchangeRecord::Phase::Generation) ++generations;
        if (e.phase == ExchangeRecord::Phase::Alignment) ++alignments;
        if (e.phase == ExchangeRecord::Phase::FinalAssessment) ++finals;
    }
    CHECK(generations == 2);
    CHECK(alignments == 1);
    CHECK(finals == 0);

    // telemetry equals the scripted usage sums
    CHECK(r.telemetry.promptTokens == 40638);
    CHECK(r.telemetry.completionTokens == 2179);
    CHECK(r.telemetry.costDollars ==
          Approx(40638 / 1000.0 * 0.002 + 2179 / 1000.0 * 0.008));

    // iteration 1 failed on the chained comparison; iteration 2 compiled
    REQUIRE(r.iterations.size() == 2);
    CHECK_FALSE(r.iterations[0].compiled);
    bool sawChained = false;
    for (const auto& d : r.iterations[0].diagnostics) {
        sawChained = sawChained || d.code == std::string(pyopl::codes::SemChainedCmp);
    }
    CHECK(sawChained);
    CHECK(r.iterations[1].compiled);
    CHECK(r.iterations[1].aligned);

    // the revision request embedded the compiler message and syntax guideline
    REQUIRE(backend.requests().size() == 3);
    const std::string& revision = backend.requests()[1];
    CHECK(revision.find("Chained comparisons") != std::string::npos);
    CHECK(revision.find("- Fix the listed syntax/semantic errors.") != std::string::npos);

    // artifacts were written each iteration; the final ones are the aligned pair
    CHECK(testsupport::readFile(cfg.modelPath) == fixedModel);
    CHECK(testsupport::readFile(cfg.dataPath) == data);
    CHECK(r.finalAssessment.find("fully align") != std::string::npos);

    // the exchange log is line-delimited with one record per call
    cfg.exchangeLogPath = (tmp / "exchange.jsonl").string();
}

TEST_CASE("perfect first try issues no revision prompt") {
    ScriptedBackend backend(
        {{generationJson(testsupport::fixture("alp.mod"), testsupport::fixture("alp.dat")),
          100, 50, 0.1},
         {alignmentJson(true, "Aligned on the first attempt; all constraints present."),
          80, 20, 0.1}});
    LoopConfig cfg = baseConfig();
    LoopResult r = runSyntagm(kAlpProblem, bundledKb(), provider(), backend, cfg);
    CHECK(r.outcome == LoopOutcome::Aligned);
    CHECK(r.telemetry.iterations == 1);
    REQUIRE(backend.requests().size() == 2);
    CHECK(backend.requests()[0].find("<problem_description>") != std::string::npos);
    CHECK(backend.requests()[1].find("<assessment_focus>") != std::string::npos);
    CHECK(backend.requests()[0].find("<revision_guidelines>") == std::string::npos);
}

TEST_CASE("garbage responses exhaust the budget and request a final assessment") {
    std::vector<ScriptedResponse> responses;
    for (int i = 0; i < 4; ++i) {
        responses.push_back({"no json here at all", 10, 5, 0.0});
    }
    ScriptedBackend backend(responses);
    LoopConfig cfg = baseConfig();
    cfg.budget = 3;
    LoopResult r = runSyntagm("toy problem", bundledKb(), provider(), backend, cfg);

    CHECK(r.outcome == LoopOutcome::BudgetExhausted);
    CHECK(r.telemetry.iterations == 3);
    CHECK(backend.callCount() == 4);  // budget generations + one final assessment
    REQUIRE(r.exchanges.size() == 4);
    CHECK(r.exchanges[3].phase == ExchangeRecord::Phase::FinalAssessment);

    // every failed iteration carries the synthetic diagnostic
    for (const auto& iter : r.iterations) {
        REQUIRE(iter.diagnostics.size() == 1);
        CHECK(iter.diagnostics[0].code == std::string(pyopl::codes::OrcBadResponse));
        CHECK(iter.diagnostics[0].message ==
              "Response did not contain a valid model/data object.");
    }
    // the synthetic diagnostic is fed to the revision prompt
    CHECK(backend.requests()[1].find("Response did not contain a valid model/data "
                                     "object.") != std::string::npos);
    CHECK(r.telemetry.promptTokens == 40);
    CHECK(r.telemetry.completionTokens == 20);
}

TEST_CASE("unparseable alignment verdict counts as misaligned") {
    ScriptedBackend backend(
        {{generationJson(testsupport::fixture("alp.mod"), testsupport::fixture("alp.dat")),
          10, 5, 0.0},
         {"nonsense verdict", 10, 5, 0.0},
         {generationJson(testsupport::fixture("alp.mod"), testsupport::fixture("alp.dat")),
          10, 5, 0.0},
         {alignmentJson(true, "Aligned now."), 10, 5, 0.0}});
    LoopConfig cfg = baseConfig();
    LoopResult r = runSyntagm(kAlpProblem, bundledKb(), provider(), backend, cfg);
    CHECK(r.outcome == LoopOutcome::Aligned);
    CHECK(r.telemetry.iterations == 2);
    REQUIRE(r.iterations.size() == 2);
    CHECK(r.iterations[0].compiled);
    CHECK(r.iterations[0].alignmentRequested);
    CHECK_FALSE(r.iterations[0].aligned);
    // the alignment-kind revision embeds the synthetic assessment
    CHECK(backend.requests()[2].find("- Address the alignment issues noted in the "
                                     "assessment.") != std::string::npos);
}

TEST_CASE("budget exhausted on a compiling but misaligned artifact skips the extra call") {
    std::vector<ScriptedResponse> responses;
    for (int i = 0; i < 2; ++i) {
        responses.push_back({generationJson(testsupport::fixture("alp.mod"),
                                            testsupport::fixture("alp.dat")),
                             10, 5, 0.0});
        responses.push_back({alignmentJson(false, "Still not quite right."), 10, 5, 0.0});
    }
    ScriptedBackend backend(responses);
    LoopConfig cfg = baseConfig();
    cfg.budget = 2;
    LoopResult r = runSyntagm(kAlpProblem, bundledKb(), provider(), backend, cfg);
    CHECK(r.outcome == LoopOutcome::BudgetExhausted);
    CHECK(backend.callCount() == 4);  // no final assessment: no errors remain
    CHECK(r.finalAssessment == "Still not quite right.");
}

TEST_CASE("telemetry is additive over the exchange records") {
    std::vector<ScriptedResponse> responses;
    for (int i = 0; i < 3; ++i) responses.push_back({"garbage", 7 + i, 3 + i, 0.0});
    ScriptedBackend backend(responses);
    LoopConfig cfg = baseConfig();
    cfg.budget = 2;
    LoopResult r = runSyntagm("p", bundledKb(), provider(), backend, cfg);
    long prompt = 0, completion = 0;
    for (const auto& e : r.exchanges) {
        prompt += e.promptTokens;
        completion += e.completionTokens;
    }
    CHECK(prompt == r.telemetry.promptTokens);
    CHECK(completion == r.telemetry.completionTokens);
    CHECK(r.telemetry.latencySeconds >= 0.0);
}

TEST_CASE("exchange log is written as line-delimited records") {
    fs::path tmp = fs::temp_directory_path() / "syntagm-loop-log";
    fs::create_directories(tmp);
    ScriptedBackend backend(
        {{generationJson(testsupport::fixture("minimal.mod"),
                         testsupport::fixture("minimal.dat")),
          10, 5, 0.0},
         {alignmentJson(true, "fine"), 10, 5, 0.0}});
    LoopConfig cfg = baseConfig();
    cfg.exchangeLogPath = (tmp / "exchange.jsonl").string();
    LoopResult r = runSyntagm("scale one activity", bundledKb(), provider(), backend, cfg);
    REQUIRE(r.outcome == LoopOutcome::Aligned);
    std::istringstream log(testsupport::readFile(cfg.exchangeLogPath));
    std::string line;
    int lines = 0;
    while (std::getline(log, line)) {
        if (line.empty()) continue;
        nlohmann::json rec = nlohmann::json::parse(line);
        CHECK(rec.contains("phase"));
        CHECK(rec.contains("prompt_tokens"));
        ++lines;
    }
    CHECK(lines == 2);
}

// ---------------------------------------------------------------------------
// Gate and curriculum properties over randomized traces

namespace {

// Backend that decides from the prompt text which call this is and responds
// with a randomized canned behaviour.
class FuzzBackend : public Backend {
public:
    explicit FuzzBackend(unsigned seed) : rng_(seed) {}

    std::string modelId() const override { return "fuzz"; }

    BackendResult complete(const std::string&, const std::string& userText,
                           const CompletionParams&) override {
        BackendResult out;
        out.usage.promptTokens = 10;
        out.usage.completionTokens = 5;
        bool isAlignment = userText.find("<assessment_focus>") != std::string::npos;
        if (isAlignment) {
            out.text = alignmentJson(rng_() % 3 == 0, "randomized verdict text");
            return out;
        }
        switch (rng_() % 3) {
            case 0:
                out.text = generationJson(testsupport::fixture("alp.mod"),
                                          testsupport::fixture("alp.dat"));
                break;
            case 1:
                out.text = generationJson(testsupport::fixture("alp_chained.mod"),
                                          testsupport::fixture("alp.dat"));
                break;
            default: out.text = "absolutely no structure"; break;
        }
        return out;
    }

private:
    std::mt19937 rng_;
};

}  // namespace

TEST_CASE("curriculum: alignment is only ever consulted after a clean compile") {
    for (unsigned seed = 1; seed <= 100; ++seed) {
        FuzzBackend backend(seed);
        LoopConfig cfg = baseConfig();
        cfg.budget = 4;
        LoopResult r = runSyntagm("fuzzed problem", bundledKb(), provider(), backend, cfg);
        INFO("seed " << seed);
        for (const auto& iter : r.iterations) {
            if (iter.alignmentRequested) CHECK(iter.compiled);
            if (!iter.compiled) CHECK_FALSE(iter.alignmentRequested);
        }
        if (r.outcome == LoopOutcome::Aligned) {
            // gate correctness: the returned artifacts re-compile cleanly and
            // the recorded verdict is positive
            auto final = pyopl::compileStrings(r.modelText, r.dataText);
            CHECK(final.ok());
            CHECK(r.iterations.back().aligned);
        }
        // budget bound: generations <= budget, assessments <= budget + 1
        int generations = 0, assessments = 0;
        for (const auto& e : r.exchanges) {
            if (e.phase == ExchangeRecord::Phase::Generation) ++generations;
            else ++assessments;
        }
        CHECK(generations <= cfg.budget);
        CHECK(assessments <= cfg.budget + 1);
    }
}

TEST_CASE("loop preconditions: non-empty grammar and a positive budget") {
    ScriptedBackend backend({});
    LoopConfig cfg = baseConfig();
    cfg.grammarText.clear();
    CHECK_THROWS_AS(runSyntagm("p", bundledKb(), provider(), backend, cfg),
                    std::invalid_argument);
    cfg = baseConfig();
    cfg.budget = 0;
    CHECK_THROWS_AS(runSyntagm("p", bundledKb(), provider(), backend, cfg),
                    std::invalid_argument);
}
