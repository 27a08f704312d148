#pragma once

#include <chrono>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace syntagm {

// Decoding defaults: provider defaults, no stop sequences, no output cap, one
// completion per request.
struct CompletionParams {
    double temperature = 1.0;
    double topP = 1.0;
    double frequencyPenalty = 0.0;
    double presencePenalty = 0.0;
};

struct Usage {
    long promptTokens = 0;
    long completionTokens = 0;
    bool estimated = false;  // true when the backend supplied no counts
};

struct BackendResult {
    std::string text;
    Usage usage;
    double latencySeconds = 0;
};

class BackendError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One operation: complete(system, user, params). Adapters exist for an HTTP
// chat-completions service and for deterministic scripted replay.
class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string modelId() const = 0;
    virtual BackendResult complete(const std::string& systemText, const std::string& userText,
                                   const CompletionParams& params) = 0;
};

// Deterministic fallback when a backend reports no token counts.
inline long estimateTokens(const std::string& text) {
    return static_cast<long>((text.size() + 3) / 4);
}

struct ScriptedResponse {
    std::string text;
    long promptTokens = 0;      // 0 -> estimated from the prompt
    long completionTokens = 0;  // 0 -> estimated from the text
    double latencySeconds = 0;
};

// Replays an ordered list of canned responses; safe for concurrent callers.
class ScriptedBackend : public Backend {
public:
    explicit ScriptedBackend(std::vector<ScriptedResponse> responses,
                             std::string modelId = "scripted")
        : responses_(std::move(responses)), modelId_(std::move(modelId)) {}

    std::string modelId() const override { return modelId_; }

    BackendResult complete(const std::string& systemText, const std::string& userText,
                           const CompletionParams&) override {
        std::lock_guard<std::mutex> lock(mutex_);
        if (next_ >= responses_.size()) {
            throw BackendError("scripted backend exhausted after " +
                               std::to_string(responses_.size()) + " responses");
        }
        const ScriptedResponse& r = responses_[next_++];
        BackendResult out;
        out.text = r.text;
        out.usage.promptTokens =
            r.promptTokens > 0 ? r.promptTokens : estimateTokens(systemText + userText);
        out.usage.completionTokens =
            r.completionTokens > 0 ? r.completionTokens : estimateTokens(r.text);
        out.usage.estimated = r.promptTokens == 0 || r.completionTokens == 0;
        out.latencySeconds = r.latencySeconds;
        requests_.push_back(userText);
        return out;
    }

    std::size_t callCount() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return next_;
    }

    const std::vector<std::string>& requests() const { return requests_; }

private:
    std::vector<ScriptedResponse> responses_;
    std::string modelId_;
    std::size_t next_ = 0;
    std::vector<std::string> requests_;
    mutable std::mutex mutex_;
};

}  // namespace syntagm
