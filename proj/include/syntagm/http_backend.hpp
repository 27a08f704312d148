#pragma once

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "syntagm/backend.hpp"
#include "syntagm/embedding.hpp"

namespace syntagm {

struct HttpBackendConfig {
    std::string baseUrl = "http://localhost:11434";  // scheme://host[:port]
    std::string completionsPath = "/v1/chat/completions";
    std::string model = "gpt-oss-20b";
    std::string apiKeyEnv = "OPENAI_API_KEY";  // name of the env var holding the key
    bool requireApiKey = true;
    int maxRetries = 3;
    double retryBackoffSeconds = 0.5;
    double timeoutSeconds = 300;
};

// Chat-completions adapter. Transport failures are retried with bounded
// backoff, then surfaced as BackendError.
class HttpChatBackend : public Backend {
public:
    explicit HttpChatBackend(HttpBackendConfig config) : config_(std::move(config)) {
        if (config_.requireApiKey) {
            const char* key = std::getenv(config_.apiKeyEnv.c_str());
            if (key == nullptr || *key == '\0') {
                throw BackendError("API key environment variable " + config_.apiKeyEnv +
                                   " is not set");
            }
            apiKey_ = key;
        }
    }

    std::string modelId() const override { return config_.model; }

    BackendResult complete(const std::string& systemText, const std::string& userText,
                           const CompletionParams& params) override {
        nlohmann::json body;
        body["model"] = config_.model;
        nlohmann::json messages = nlohmann::json::array();
        if (!systemText.empty()) {
            messages.push_back({{"role", "system"}, {"content", systemText}});
        }
        messages.push_back({{"role", "user"}, {"content", userText}});
        body["messages"] = std::move(messages);
        body["temperature"] = params.temperature;
        body["top_p"] = params.topP;
        body["frequency_penalty"] = params.frequencyPenalty;
        body["presence_penalty"] = params.presencePenalty;
        body["n"] = 1;

        const std::string payload = body.dump();
        std::string lastError;
        for (int attempt = 0; attempt < config_.maxRetries; ++attempt) {
            if (attempt > 0) {
                auto delay = std::chrono::duration<double>(config_.retryBackoffSeconds * attempt);
                std::this_thread::sleep_for(
                    std::chrono::duration_cast<std::chrono::milliseconds>(delay));
            }
            auto start = std::chrono::steady_clock::now();
            httplib::Client client(config_.baseUrl);
            client.set_read_timeout(static_cast<time_t>(config_.timeoutSeconds), 0);
            client.set_connection_timeout(static_cast<time_t>(config_.timeoutSeconds), 0);
            httplib::Headers headers;
            if (!apiKey_.empty()) headers.emplace("Authorization", "Bearer " + apiKey_);
            auto res = client.Post(config_.completionsPath, headers, payload,
                                   "application/json");
            double latency =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (!res) {
                lastError = "transport error: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status < 200 || res->status >= 300) {
                lastError = "HTTP " + std::to_string(res->status) + ": " + res->body;
                if (res->status == 429 || res->status >= 500) continue;  // retryable
                break;
            }
            nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
            if (reply.is_discarded()) {
                lastError = "backend returned unparseable JSON";
                continue;
            }
            BackendResult out;
            out.latencySeconds = latency;
            try {
                out.text = reply.at("choices").at(0).at("message").at("content")
                               .get<std::string>();
            } catch (const nlohmann::json::exception& e) {
                lastError = std::string("unexpected response shape: ") + e.what();
                continue;
            }
            if (reply.contains("usage")) {
                out.usage.promptTokens = reply["usage"].value("prompt_tokens", 0L);
                out.usage.completionTokens = reply["usage"].value("completion_tokens", 0L);
            }
            if (out.usage.promptTokens == 0 && out.usage.completionTokens == 0) {
                out.usage.promptTokens = estimateTokens(systemText + userText);
                out.usage.completionTokens = estimateTokens(out.text);
                out.usage.estimated = true;
            }
            return out;
        }
        throw BackendError("chat completion failed after " +
                           std::to_string(config_.maxRetries) + " attempts: " + lastError);
    }

private:
    HttpBackendConfig config_;
    std::string apiKey_;
};

struct HttpEmbeddingConfig {
    std::string baseUrl = "http://localhost:11434";
    std::string embeddingsPath = "/v1/embeddings";
    std::string model = "sentence-transformers/all-MiniLM-L6-v2";
    std::string apiKeyEnv = "OPENAI_API_KEY";
    bool requireApiKey = false;
    std::size_t dimension = 384;
};

// Remote sentence-encoder adapter behind the same text->vector contract as the
// offline hashing provider.
class HttpEmbeddingProvider : public EmbeddingProvider {
public:
    explicit HttpEmbeddingProvider(HttpEmbeddingConfig config) : config_(std::move(config)) {
        if (config_.requireApiKey) {
            const char* key = std::getenv(config_.apiKeyEnv.c_str());
            if (key == nullptr || *key == '\0') {
                throw BackendError("API key environment variable " + config_.apiKeyEnv +
                                   " is not set");
            }
            apiKey_ = key;
        }
    }

    std::string id() const override { return "remote:" + config_.model; }
    std::size_t dimension() const override { return config_.dimension; }

    std::vector<double> embed(const std::string& text) const override {
        nlohmann::json body = {{"model", config_.model}, {"input", text}};
        httplib::Client client(config_.baseUrl);
        httplib::Headers headers;
        if (!apiKey_.empty()) headers.emplace("Authorization", "Bearer " + apiKey_);
        auto res = client.Post(config_.embeddingsPath, headers, body.dump(),
                               "application/json");
        if (!res || res->status < 200 || res->status >= 300) {
            throw BackendError("embedding request failed");
        }
        nlohmann::json reply = nlohmann::json::parse(res->body);
        std::vector<double> v =
            reply.at("data").at(0).at("embedding").get<std::vector<double>>();
        l2Normalize(v);
        return v;
    }

private:
    HttpEmbeddingConfig config_;
    std::string apiKey_;
};

}  // namespace syntagm
