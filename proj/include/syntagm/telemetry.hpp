#pragma once

#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

namespace syntagm {

struct Rates {
    double promptPer1k = 0;
    double completionPer1k = 0;
};

// Per-model dollar rates per 1k tokens. Rates move with provider pricing, so
// they live in user-editable config rather than in code; unknown models cost 0.
class RateTable {
public:
    RateTable() = default;

    void set(const std::string& modelId, Rates rates) { rates_[modelId] = rates; }

    Rates ratesFor(const std::string& modelId) const {
        auto it = rates_.find(modelId);
        return it == rates_.end() ? Rates{} : it->second;
    }

    double cost(const std::string& modelId, long promptTokens, long completionTokens) const {
        Rates r = ratesFor(modelId);
        return promptTokens / 1000.0 * r.promptPer1k +
               completionTokens / 1000.0 * r.completionPer1k;
    }

    static RateTable fromJson(const nlohmann::json& obj) {
        RateTable table;
        for (const auto& [model, entry] : obj.items()) {
            Rates r;
            r.promptPer1k = entry.value("prompt_per_1k", 0.0);
            r.completionPer1k = entry.value("completion_per_1k", 0.0);
            table.set(model, r);
        }
        return table;
    }

private:
    std::map<std::string, Rates> rates_;
};

struct Telemetry {
    int iterations = 0;
    long promptTokens = 0;
    long completionTokens = 0;
    double latencySeconds = 0;  // end-to-end wall clock
    double costDollars = 0;

    nlohmann::json toJson() const {
        return {{"iterations", iterations},
                {"prompt_tokens", promptTokens},
                {"completion_tokens", completionTokens},
                {"latency_seconds", latencySeconds},
                {"cost_dollars", costDollars}};
    }
};

}  // namespace syntagm
