#pragma once

#include <json.hpp>

#include "pyopl/diagnostic.hpp"

namespace pyopl {

// Structured record form of a diagnostic, consumed by the orchestrator and by
// scripting around the CLI.
inline nlohmann::json diagnosticToJson(const Diagnostic& d) {
    nlohmann::json j;
    j["code"] = d.code;
    j["severity"] = d.severity == Severity::Error ? "error" : "warning";
    j["line"] = d.line ? nlohmann::json(*d.line) : nlohmann::json(nullptr);
    j["message"] = d.message;
    j["remedy"] = d.remedy;
    return j;
}

}  // namespace pyopl
