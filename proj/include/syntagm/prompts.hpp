#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pyopl/diagnostic.hpp"

namespace syntagm {

// Loop state s_t: problem text, grammar reference G, few-shot block F_k, the
// latest attempt, and the evaluator feedback (E_t, S_t), refreshed every
// iteration.
struct TaskContext {
    std::string problemText;
    std::string grammarReference;
    std::string fewShotBlock;  // may be empty
    std::optional<std::pair<std::string, std::string>> lastAttempt;  // model, data
    std::vector<pyopl::Diagnostic> compilerErrors;
    std::optional<std::string> assessment;
};

enum class RevisionKind { Syntax, Alignment };

namespace detail {

inline void replaceAll(std::string& text, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        text.replace(pos, key.size(), value);
        pos += value.size();
    }
}

inline constexpr const char* kGenerationTemplate = R"(<role>
You are an expert in mathematical optimisation and PyOPL.
</role>

<task>
Think step by step to produce a syntactically valid PyOPL model (.mod) and matching data (.dat) that faithfully implement the problem.
First, reason in a private scratchpad to identify sets, parameters, decision variables, objective, and constraints.
Ensure indices, domains (binary/integer/float), and data are correct and consistent with the problem description.
Choose correct domains (binary/integer/float) from context. Add clear labels and explanatory comments.
Label the objective and each constraint.
Add concise comments explaining variables, parameters, and constraints, aligned to the problem (literate style).
If any data are missing, create a small, plausible mock instance consistent with the model.
</task>

<grammar_reference>
--- BEGIN PYOPL SYNTAX IMPLEMENTATION ---
{{GRAMMAR_IMPLEMENTATION}}
--- END PYOPL SYNTAX IMPLEMENTATION ---
</grammar_reference>

{{FEW_SHOT_EXAMPLES_SECTION}}
<problem_description>
{{PROMPT}}
</problem_description>

<output_requirements>
- Output ONLY the final JSON with the model and data; do not include your scratchpad in the output.
- Return ONLY a JSON object with keys "model" and "data". Values are single strings; escape quotes and backslashes; encode newlines as \n. No extra keys.
- You MAY wrap the JSON in a ```json fence containing only the JSON.
</output_requirements>

<json_schema>
{ "type": "object", "additionalProperties": false, "required": ["model","data"],
  "properties": { "model":{"type":"string"}, "data":{"type":"string"} } }
</json_schema>

<example_output>
{ "model": "// minimal example\nfloat a;\nfloat b;\ndvar float x;\nminimize z: a*x;\nsubject to {\n  c1: b*x >= 0;\n}\n", "data":  "a = 10;\n b = 5;" }
</example_output>
)";

inline constexpr const char* kRevisionTemplate = R"(<role>
You are an expert in mathematical optimisation and PyOPL.
</role>

<task>
Revise the model/data to resolve the specified issues while preserving the intended formulation.
Change only what is necessary; keep syntax valid.
Label the objective and each constraint.
Add concise comments explaining variables, parameters, and constraints, aligned to the problem (literate style).
Use the PyOPL reference strictly for syntax.
</task>

<revision_guidelines>
{{REVISION_GUIDELINE}}
- Make the minimal set of changes necessary to correct syntax/semantic errors.
- Preserve the original modeling structure when possible.
- Ensure the objective, constraints, indices, and variable domains reflect the problem description.
- Keep syntax strictly valid.
- Return complete model and data strings; do not return diffs.
</revision_guidelines>

<grammar_reference>
--- BEGIN PYOPL SYNTAX IMPLEMENTATION ---
{{GRAMMAR_IMPLEMENTATION}}
--- END PYOPL SYNTAX IMPLEMENTATION ---
</grammar_reference>

{{FEW_SHOT_EXAMPLES_SECTION}}
<problem_description>
{{PROMPT}}
</problem_description>

<previous_attempt>
<model>
{{MODEL_CODE}}
</model>

<data>
{{DATA_CODE}}
</data>
</previous_attempt>

<compiler_errors>
{{COMPILER_ERRORS}}
</compiler_errors>

<alignment_assessment>
{{ASSESSMENT}}
</alignment_assessment>

<output_requirements>
- Return ONLY a JSON object with keys "model" and "data". Values are single strings; escape quotes/backslashes; encode newlines as \n. No extra keys.
- You MAY wrap the JSON in a ```json fence containing only the JSON.
</output_requirements>

<json_schema>
{ "type":"object", "additionalProperties": false, "required":["model","data"],
  "properties": { "model":{"type":"string"}, "data":{"type":"string"} } }
</json_schema>

<example_output>
{
  "model": "// minimal example\nfloat a;\nfloat b;\ndvar float x;\nminimize z: a*x;\nsubject to {\n  c1: b*x >= 0;\n}\n",
  "data":  "a = 10;\n b = 5;"
}
</example_output>
)";

inline constexpr const char* kAlignmentTemplate = R"(<role>
You are an expert in mathematical optimization and PyOPL.
</role>

<task>
Judge if model/data fully align with the problem (objective, constraints, variables, indices, and data consistency).
Be specific and critical.
</task>

<grammar_reference>
--- BEGIN PYOPL SYNTAX IMPLEMENTATION ---
{{GRAMMAR_IMPLEMENTATION}}
--- END PYOPL SYNTAX IMPLEMENTATION ---
</grammar_reference>

<inputs>
<problem_description>
{{PROMPT}}
</problem_description>

<model>
{{MODEL_CODE}}
</model>

<data>
{{DATA_CODE}}
</data>
</inputs>

<assessment_focus>
- Objective and constraints reflect the prompt intent.
- Decision variables have correct domains and indices.
- Data is consistent with sets/parameters used by the model.
- Signs, units, and indexing are correct; no missing links.
- Any critical omissions or extraneous constraints.
- Most impactful improvements if misaligned.
</assessment_focus>

<output_requirements>
- Return ONLY a JSON object with keys "aligned" (boolean) and "assessment" (string, 3--6 sentences). No extra keys.
- You MAY wrap the JSON in a ```json fence containing only the JSON.
</output_requirements>

<json_schema>
{ "type":"object", "additionalProperties": false, "required":["aligned","assessment"],
  "properties": { "aligned":{"type":"boolean"}, "assessment":{"type":"string"} } }
</json_schema>
)";

inline std::string renderErrors(const std::vector<pyopl::Diagnostic>& errors) {
    if (errors.empty()) return "(none)";
    std::string out;
    for (const auto& d : errors) {
        if (!out.empty()) out += "\n";
        out += d.render();
    }
    return out;
}

}  // namespace detail

inline std::string buildGenerationPrompt(const TaskContext& ctx) {
    std::string out = detail::kGenerationTemplate;
    detail::replaceAll(out, "{{GRAMMAR_IMPLEMENTATION}}", ctx.grammarReference);
    detail::replaceAll(out, "{{FEW_SHOT_EXAMPLES_SECTION}}", ctx.fewShotBlock);
    detail::replaceAll(out, "{{PROMPT}}", ctx.problemText);
    return out;
}

inline std::string buildRevisionPrompt(const TaskContext& ctx, RevisionKind kind) {
    std::string out = detail::kRevisionTemplate;
    detail::replaceAll(out, "{{REVISION_GUIDELINE}}",
                       kind == RevisionKind::Syntax
                           ? "- Fix the listed syntax/semantic errors."
                           : "- Address the alignment issues noted in the assessment.");
    detail::replaceAll(out, "{{GRAMMAR_IMPLEMENTATION}}", ctx.grammarReference);
    detail::replaceAll(out, "{{FEW_SHOT_EXAMPLES_SECTION}}", ctx.fewShotBlock);
    detail::replaceAll(out, "{{PROMPT}}", ctx.problemText);
    detail::replaceAll(out, "{{MODEL_CODE}}", ctx.lastAttempt ? ctx.lastAttempt->first : "");
    detail::replaceAll(out, "{{DATA_CODE}}", ctx.lastAttempt ? ctx.lastAttempt->second : "");
    detail::replaceAll(out, "{{COMPILER_ERRORS}}", detail::renderErrors(ctx.compilerErrors));
    detail::replaceAll(out, "{{ASSESSMENT}}", ctx.assessment.value_or("(none)"));
    return out;
}

inline std::string buildAlignmentPrompt(const TaskContext& ctx, const std::string& modelText,
                                        const std::string& dataText) {
    std::string out = detail::kAlignmentTemplate;
    detail::replaceAll(out, "{{GRAMMAR_IMPLEMENTATION}}", ctx.grammarReference);
    detail::replaceAll(out, "{{PROMPT}}", ctx.problemText);
    detail::replaceAll(out, "{{MODEL_CODE}}", modelText);
    detail::replaceAll(out, "{{DATA_CODE}}", dataText);
    return out;
}

}  // namespace syntagm
