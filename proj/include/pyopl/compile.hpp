#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pyopl/lexer.hpp"
#include "pyopl/lp_format.hpp"
#include "pyopl/parser.hpp"
#include "pyopl/semantics.hpp"
#include "pyopl/solver.hpp"

namespace pyopl {

// Full pipeline result: parse -> analyze -> bind -> expand. `ok()` is the
// compile gate: true iff no error-severity diagnostics were produced anywhere.
struct CompileResult {
    std::optional<ModelAst> model;
    std::optional<DataAst> data;
    std::optional<TypedModel> typed;
    std::optional<DataEnvironment> env;
    std::optional<FlatModel> flat;
    NameMap names;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return flat.has_value() && !hasErrors(diagnostics); }

    std::string renderDiagnostics() const {
        std::string out;
        for (const auto& d : diagnostics) out += d.render() + "\n";
        return out;
    }
};

inline CompileResult compileStrings(const std::string& modelText,
                                    const std::string& dataText) {
    CompileResult result;

    auto parsedModel = parseModelText(modelText);
    if (!parsedModel.ok()) {
        result.diagnostics.push_back(*parsedModel.error);
        return result;
    }
    result.model = std::move(parsedModel.value);

    auto parsedData = parseDataText(dataText);
    if (!parsedData.ok()) {
        result.diagnostics.push_back(*parsedData.error);
        return result;
    }
    result.data = std::move(parsedData.value);

    AnalyzeResult analyzed = analyze(*result.model, *result.data);
    result.diagnostics.insert(result.diagnostics.end(), analyzed.diagnostics.begin(),
                              analyzed.diagnostics.end());
    if (!analyzed.ok()) return result;
    result.typed = std::move(analyzed.typed);

    BindResult bound = bindData(*result.typed, *result.data);
    result.diagnostics.insert(result.diagnostics.end(), bound.diagnostics.begin(),
                              bound.diagnostics.end());
    if (!bound.ok()) return result;
    result.env = std::move(bound.env);

    ExpandResult expanded = expand(*result.typed, *result.env);
    result.diagnostics.insert(result.diagnostics.end(), expanded.diagnostics.begin(),
                              expanded.diagnostics.end());
    if (!expanded.ok()) return result;
    result.flat = std::move(expanded.flat);
    result.names = std::move(expanded.names);
    return result;
}

inline std::string readFileOrThrow(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline CompileResult compileFiles(const std::string& modelPath, const std::string& dataPath) {
    return compileStrings(readFileOrThrow(modelPath), readFileOrThrow(dataPath));
}

}  // namespace pyopl
