#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace syntagm {

using json = nlohmann::json;

struct Extraction {
    std::optional<json> value;
    std::string error;

    bool ok() const { return value.has_value(); }
};

namespace detail {

// Scans from `start` (which must point at '{') for the matching '}' with a
// string-aware state machine: braces inside string literals do not count, and
// escape sequences inside strings are skipped.
inline std::optional<std::string> balancedObjectAt(const std::string& text,
                                                   std::size_t start) {
    int depth = 0;
    bool inString = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        char c = text[i];
        if (inString) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                inString = false;
            }
            continue;
        }
        if (c == '"') {
            inString = true;
        } else if (c == '{') {
            ++depth;
        } else if (c == '}') {
            if (--depth == 0) return text.substr(start, i - start + 1);
        }
    }
    return std::nullopt;
}

// First balanced {...} region that parses as JSON; leading/trailing prose is
// discarded.
inline std::optional<json> firstJsonObject(const std::string& text) {
    for (std::size_t pos = text.find('{'); pos != std::string::npos;
         pos = text.find('{', pos + 1)) {
        auto candidate = balancedObjectAt(text, pos);
        if (!candidate) continue;
        json parsed = json::parse(*candidate, nullptr, /*allow_exceptions=*/false);
        if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    }
    return std::nullopt;
}

// Contents of ``` fenced blocks, in order of appearance. An optional language
// tag after the opening fence is skipped.
inline std::vector<std::string> fencedBlocks(const std::string& text) {
    std::vector<std::string> blocks;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = text.find("```", pos);
        if (open == std::string::npos) break;
        std::size_t bodyStart = open + 3;
        std::size_t newline = text.find('\n', bodyStart);
        std::size_t close = text.find("```", bodyStart);
        if (close == std::string::npos) break;
        if (newline != std::string::npos && newline < close) bodyStart = newline + 1;
        blocks.push_back(text.substr(bodyStart, close - bodyStart));
        pos = close + 3;
    }
    return blocks;
}

}  // namespace detail

// Relaxed extraction of the JSON object from a model response: a fenced block
// is preferred when present; otherwise the first balanced {...} object found
// in the raw text wins.
inline Extraction extractJsonObject(const std::string& responseText) {
    Extraction out;
    for (const std::string& block : detail::fencedBlocks(responseText)) {
        if (auto obj = detail::firstJsonObject(block)) {
            out.value = std::move(obj);
            return out;
        }
    }
    if (auto obj = detail::firstJsonObject(responseText)) {
        out.value = std::move(obj);
        return out;
    }
    out.error = "no balanced JSON object found in response";
    return out;
}

struct GenerationPayload {
    std::string model;
    std::string data;
};

struct AlignmentPayload {
    bool aligned = false;
    std::string assessment;
};

namespace detail {

inline std::string keySetError(const json& obj, std::initializer_list<const char*> required) {
    std::string missing, extra;
    for (const char* k : required) {
        if (!obj.contains(k)) missing += std::string(missing.empty() ? "" : ", ") + k;
    }
    for (const auto& [k, v] : obj.items()) {
        (void)v;
        bool known = false;
        for (const char* r : required) known = known || k == r;
        if (!known) extra += std::string(extra.empty() ? "" : ", ") + k;
    }
    std::string err;
    if (!missing.empty()) err += "missing keys: " + missing;
    if (!extra.empty()) err += (err.empty() ? "" : "; ") + std::string("extra keys: ") + extra;
    return err;
}

}  // namespace detail

// Generation responses must be exactly {"model": string, "data": string}.
inline std::optional<GenerationPayload> parseGenerationPayload(const json& obj,
                                                               std::string* error = nullptr) {
    std::string keyErr = detail::keySetError(obj, {"model", "data"});
    if (!keyErr.empty()) {
        if (error) *error = keyErr;
        return std::nullopt;
    }
    if (!obj["model"].is_string() || !obj["data"].is_string()) {
        if (error) *error = "keys \"model\" and \"data\" must both be strings";
        return std::nullopt;
    }
    return GenerationPayload{obj["model"].get<std::string>(), obj["data"].get<std::string>()};
}

// Alignment responses must be exactly {"aligned": boolean, "assessment": string}.
inline std::optional<AlignmentPayload> parseAlignmentPayload(const json& obj,
                                                             std::string* error = nullptr) {
    std::string keyErr = detail::keySetError(obj, {"aligned", "assessment"});
    if (!keyErr.empty()) {
        if (error) *error = keyErr;
        return std::nullopt;
    }
    if (!obj["aligned"].is_boolean() || !obj["assessment"].is_string()) {
        if (error) *error = "key \"aligned\" must be a boolean and \"assessment\" a string";
        return std::nullopt;
    }
    return AlignmentPayload{obj["aligned"].get<bool>(), obj["assessment"].get<std::string>()};
}

}  // namespace syntagm
