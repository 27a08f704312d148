#include <catch2/catch.hpp>

#include "support.hpp"
#include "syntagm/grammar.hpp"
#include "syntagm/prompts.hpp"

using namespace syntagm;

namespace {

TaskContext makeContext() {
    TaskContext ctx;
    ctx.problemText = "Pack a knapsack of capacity 5.";
    ctx.grammarReference = grammarReferenceMarkdown();
    return ctx;
}

std::size_t countOccurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size())) {
        ++count;
    }
    return count;
}

}  // namespace

TEST_CASE("the shipped grammar markdown matches the embedded copy") {
    std::string shipped = testsupport::readFile(testsupport::sourceDir() +
                                                "/grammar/pyopl_grammar.md");
    CHECK(shipped == grammarReferenceMarkdown());
}

TEST_CASE("generation prompt wraps the grammar between the literal markers") {
    std::string p = buildGenerationPrompt(makeContext());
    CHECK(p.find("--- BEGIN PYOPL SYNTAX IMPLEMENTATION ---") != std::string::npos);
    CHECK(p.find("--- END PYOPL SYNTAX IMPLEMENTATION ---") != std::string::npos);
    CHECK(p.find("# PyOPL Grammar and Semantics Reference") != std::string::npos);
    CHECK(p.find("<problem_description>") != std::string::npos);
    CHECK(p.find("Pack a knapsack of capacity 5.") != std::string::npos);
    CHECK(p.find("Return ONLY a JSON object with keys") != std::string::npos);
    CHECK(p.find("<json_schema>") != std::string::npos);
    CHECK(p.find("<example_output>") != std::string::npos);
    CHECK(p.find("Think step by step") != std::string::npos);
}

TEST_CASE("no placeholder residue survives substitution") {
    TaskContext ctx = makeContext();
    CHECK(buildGenerationPrompt(ctx).find("{{") == std::string::npos);
    ctx.lastAttempt = {{"model text"}, {"data text"}};
    CHECK(buildRevisionPrompt(ctx, RevisionKind::Syntax).find("{{") == std::string::npos);
    CHECK(buildRevisionPrompt(ctx, RevisionKind::Alignment).find("{{") == std::string::npos);
    CHECK(buildAlignmentPrompt(ctx, "m", "d").find("{{") == std::string::npos);
}

TEST_CASE("empty few-shot context leaves no few_shot_examples block") {
    TaskContext ctx = makeContext();
    std::string without = buildGenerationPrompt(ctx);
    CHECK(without.find("<few_shot_examples>") == std::string::npos);

    ctx.fewShotBlock = "<few_shot_examples>\nstuff\n</few_shot_examples>\n";
    std::string with = buildGenerationPrompt(ctx);
    CHECK(with.find("<few_shot_examples>") != std::string::npos);
}

TEST_CASE("revision guideline switches on the revision kind") {
    TaskContext ctx = makeContext();
    ctx.lastAttempt = {{"old model"}, {"old data"}};
    ctx.compilerErrors.push_back(pyopl::makeDiagnostic(
        pyopl::codes::SemChainedCmp, 34,
        "Chained comparisons (e.g., a <= b <= c) are not supported."));
    ctx.assessment = "The objective sign looks wrong.";

    std::string syntax = buildRevisionPrompt(ctx, RevisionKind::Syntax);
    CHECK(syntax.find("- Fix the listed syntax/semantic errors.") != std::string::npos);
    CHECK(syntax.find("- Address the alignment issues noted in the assessment.") ==
          std::string::npos);
    // the rendered compiler message is embedded for the reviser
    CHECK(syntax.find("Semantic Error (Line 34): Chained comparisons") != std::string::npos);
    CHECK(syntax.find("old model") != std::string::npos);
    CHECK(syntax.find("old data") != std::string::npos);

    std::string alignment = buildRevisionPrompt(ctx, RevisionKind::Alignment);
    CHECK(alignment.find("- Address the alignment issues noted in the assessment.") !=
          std::string::npos);
    CHECK(alignment.find("- Fix the listed syntax/semantic errors.") == std::string::npos);
    CHECK(alignment.find("The objective sign looks wrong.") != std::string::npos);
}

TEST_CASE("alignment prompt carries the focus list and the verdict schema") {
    TaskContext ctx = makeContext();
    std::string p = buildAlignmentPrompt(ctx, "the model body", "the data body");
    CHECK(p.find("<assessment_focus>") != std::string::npos);
    CHECK(p.find("\"aligned\"") != std::string::npos);
    CHECK(p.find("\"assessment\"") != std::string::npos);
    CHECK(p.find("the model body") != std::string::npos);
    CHECK(p.find("the data body") != std::string::npos);
    CHECK(p.find("<inputs>") != std::string::npos);
    // the grammar reference is embedded exactly once
    CHECK(countOccurrences(p, "--- BEGIN PYOPL SYNTAX IMPLEMENTATION ---") == 1);
}
