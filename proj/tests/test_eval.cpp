#include <catch2/catch.hpp>

#include <filesystem>

#include "support.hpp"
#include "syntagm/eval.hpp"
#include "syntagm/grammar.hpp"

using namespace syntagm;
namespace fs = std::filesystem;

namespace {

using Status = pyopl::Solution::Status;

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

HashingEmbedding& provider() {
    static HashingEmbedding p;
    return p;
}

KnowledgeBase& bundledKb() {
    static KnowledgeBase kb = indexKnowledgeBase(testsupport::kbDir(), provider());
    return kb;
}

SuiteConfig scriptedSuiteConfig(const std::string& outDir) {
    SuiteConfig cfg;
    cfg.loop.grammarText = grammarReferenceMarkdown();
    cfg.loop.budget = 1;
    cfg.loop.k = 3;
    cfg.outputDirectory = outDir;
    return cfg;
}

}  // namespace

TEST_CASE("classification follows the CE, RE, AC, WA rule order") {
    CHECK(classifyOutcome(100.00005, 100.0, true, Status::Optimal) == Outcome::AC);
    CHECK(classifyOutcome(std::nullopt, std::nullopt, true, Status::Infeasible) ==
          Outcome::AC);
    CHECK(classifyOutcome(0.0, 0.0, true, Status::Optimal) == Outcome::AC);
    CHECK(classifyOutcome(5.0, 5.0, false, Status::Optimal) == Outcome::CE);
    CHECK(classifyOutcome(std::nullopt, 5.0, false, Status::Infeasible) == Outcome::CE);
    CHECK(classifyOutcome(std::nullopt, 5.0, true, Status::Infeasible) == Outcome::RE);
    CHECK(classifyOutcome(std::nullopt, 5.0, true, Status::Unbounded) == Outcome::RE);
    CHECK(classifyOutcome(std::nullopt, 5.0, true, Status::NodeLimit) == Outcome::RE);
    CHECK(classifyOutcome(std::nullopt, 5.0, true, Status::NumericalFailure) == Outcome::RE);
    CHECK(classifyOutcome(7.0, std::nullopt, true, Status::Optimal) == Outcome::WA);
    CHECK(classifyOutcome(7.0, 5.0, true, Status::Optimal) == Outcome::WA);
}

TEST_CASE("tolerance boundary sits exactly at rtol 1e-6 with atol floor 1e-9") {
    CHECK(classifyOutcome(1.0 + 1e-6, 1.0, true, Status::Optimal) == Outcome::AC);
    CHECK(classifyOutcome(1.0 + 2e-6, 1.0, true, Status::Optimal) == Outcome::WA);
    // the absolute floor takes over near zero
    CHECK(classifyOutcome(5e-10, 0.0, true, Status::Optimal) == Outcome::AC);
    CHECK(classifyOutcome(2e-9, 0.0, true, Status::Optimal) == Outcome::WA);
    CHECK(classifyOutcome(-1e6 - 1.0, -1e6, true, Status::Optimal) == Outcome::AC);
}

TEST_CASE("suite loader reads JSONL and converts array layouts") {
    fs::path tmp = fs::temp_directory_path() / "syntagm-suites";
    fs::create_directories(tmp);
    {
        std::ofstream out(tmp / "native.jsonl");
        out << R"({"id": "a", "description": "first", "expected_objective": 3.5})" << "\n";
        out << "\n";
        out << R"({"id": "b", "description": "second", "expected_objective": null})" << "\n";
    }
    auto native = loadSuite((tmp / "native.jsonl").string());
    REQUIRE(native.size() == 2);
    CHECK(native[0].id == "a");
    CHECK(native[0].expectedObjective == 3.5);
    CHECK_FALSE(native[1].expectedObjective.has_value());

    {
        std::ofstream out(tmp / "legacy.json");
        out << R"([{"question": "converted text", "answer": "42"},)"
            << R"( {"problem": "another", "ground_truth": 7}])";
    }
    auto legacy = loadSuite((tmp / "legacy.json").string());
    REQUIRE(legacy.size() == 2);
    CHECK(legacy[0].id == "instance-1");
    CHECK(legacy[0].problemText == "converted text");
    CHECK(legacy[0].expectedObjective == 42.0);
    CHECK(legacy[1].expectedObjective == 7.0);
}

TEST_CASE("mixed scripted outcomes produce the 50/25/0/25 report") {
    const std::string knapsackModel =
        testsupport::readFile(testsupport::kbDir() + "/knapsack.mod");
    const std::string knapsackData =
        testsupport::readFile(testsupport::kbDir() + "/knapsack.dat");
    const std::string alpModel = testsupport::fixture("alp.mod");
    const std::string alpData = testsupport::fixture("alp.dat");

    std::vector<BenchmarkInstance> instances = {
        {"knapsack-ok", "pack a knapsack", 22.0},
        {"alp-ok", "land aircraft", 0.0},
        {"broken", "unanswerable", 1.0},
        {"knapsack-wrong", "pack a knapsack again", 100.0},
    };
    // budget 1: each instance consumes generation (+ alignment | + final assessment)
    ScriptedBackend backend({
        {generationJson(knapsackModel, knapsackData), 10, 5, 0.0},
        {alignmentJson(true, "good"), 10, 5, 0.0},
        {generationJson(alpModel, alpData), 10, 5, 0.0},
        {alignmentJson(true, "good"), 10, 5, 0.0},
        {"garbage", 10, 5, 0.0},
        {"garbage final", 10, 5, 0.0},
        {generationJson(knapsackModel, knapsackData), 10, 5, 0.0},
        {alignmentJson(true, "good"), 10, 5, 0.0},
    });

    fs::path out = fs::temp_directory_path() / "syntagm-eval-mixed";
    fs::remove_all(out);
    SuiteConfig cfg = scriptedSuiteConfig(out.string());
    SuiteResult result = runSuite(instances, bundledKb(), provider(), backend, cfg);

    REQUIRE(result.records.size() == 4);
    CHECK(result.records[0].outcome == Outcome::AC);
    CHECK(result.records[1].outcome == Outcome::AC);
    CHECK(result.records[2].outcome == Outcome::CE);
    CHECK(result.records[3].outcome == Outcome::WA);
    CHECK(result.report.accuracy == Approx(0.5));
    CHECK(result.report.ceRate == Approx(0.25));
    CHECK(result.report.reRate == Approx(0.0));
    CHECK(result.report.waRate == Approx(0.25));
    CHECK(result.report.accuracy + result.report.ceRate + result.report.reRate +
              result.report.waRate ==
          Approx(1.0));

    // per-run artifact directories and persisted records exist
    CHECK(fs::exists(out / "knapsack-ok" / "1" / "model.mod"));
    CHECK(fs::exists(out / "knapsack-ok" / "1" / "telemetry.json"));
    CHECK(fs::exists(out / "runrecords.jsonl"));
    CHECK(fs::exists(out / "report.json"));
}

TEST_CASE("a compiled but unsolvable instance classifies as RE") {
    std::vector<BenchmarkInstance> instances = {{"inf", "impossible", 5.0}};
    ScriptedBackend backend({
        {generationJson(testsupport::fixture("infeasible.mod"), ""), 10, 5, 0.0},
        {alignmentJson(true, "compiles at least"), 10, 5, 0.0},
    });
    SuiteConfig cfg = scriptedSuiteConfig("");
    SuiteResult result = runSuite(instances, bundledKb(), provider(), backend, cfg);
    REQUIRE(result.records.size() == 1);
    CHECK(result.records[0].outcome == Outcome::RE);
}

TEST_CASE("ten instances with three repetitions yield thirty records") {
    const std::string model = testsupport::fixture("minimal.mod");
    const std::string data = testsupport::fixture("minimal.dat");
    std::vector<BenchmarkInstance> instances;
    for (int i = 0; i < 10; ++i) {
        instances.push_back({"inst-" + std::to_string(i), "scale activity", 0.0});
    }
    std::vector<ScriptedResponse> responses;
    for (int i = 0; i < 30; ++i) {
        responses.push_back({generationJson(model, data), 10, 5, 0.0});
        responses.push_back({alignmentJson(true, "fine"), 10, 5, 0.0});
    }
    ScriptedBackend backend(responses);
    SuiteConfig cfg = scriptedSuiteConfig("");
    cfg.repetitions = 3;
    SuiteResult result = runSuite(instances, bundledKb(), provider(), backend, cfg);
    CHECK(result.records.size() == 30);
    CHECK(result.report.records == 30);
    CHECK(result.report.accuracy == Approx(1.0));
    int reps[4] = {0, 0, 0, 0};
    for (const auto& rec : result.records) {
        REQUIRE(rec.repetition >= 1);
        REQUIRE(rec.repetition <= 3);
        ++reps[rec.repetition];
    }
    CHECK(reps[1] == 10);
    CHECK(reps[2] == 10);
    CHECK(reps[3] == 10);
}

TEST_CASE("report averages recompute from the persisted records") {
    const std::string model = testsupport::fixture("minimal.mod");
    const std::string data = testsupport::fixture("minimal.dat");
    std::vector<BenchmarkInstance> instances = {
        {"one", "p", 0.0},
        {"two", "p", 3.0},
    };
    ScriptedBackend backend({
        {generationJson(model, data), 11, 7, 0.0},
        {alignmentJson(true, "fine"), 13, 3, 0.0},
        {generationJson(model, data), 17, 9, 0.0},
        {alignmentJson(true, "fine"), 19, 1, 0.0},
    });
    SuiteConfig cfg = scriptedSuiteConfig("");
    SuiteResult result = runSuite(instances, bundledKb(), provider(), backend, cfg);
    Report recomputed = summarize(result.records);
    CHECK(recomputed.accuracy == result.report.accuracy);
    CHECK(recomputed.ceRate == result.report.ceRate);
    CHECK(recomputed.avgPromptTokens == result.report.avgPromptTokens);
    CHECK(recomputed.avgCompletionTokens == result.report.avgCompletionTokens);
    CHECK(recomputed.avgIterations == result.report.avgIterations);
    CHECK(result.report.avgPromptTokens == Approx((11 + 13 + 17 + 19) / 2.0));
}

TEST_CASE("an empty suite is rejected") {
    ScriptedBackend backend({});
    SuiteConfig cfg = scriptedSuiteConfig("");
    CHECK_THROWS(runSuite({}, bundledKb(), provider(), backend, cfg));
}
