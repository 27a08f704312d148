#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace syntagm {

// text -> L2-normalized vector
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    virtual std::string id() const = 0;
    virtual std::size_t dimension() const = 0;
    virtual std::vector<double> embed(const std::string& text) const = 0;
};

inline void l2Normalize(std::vector<double>& v) {
    double norm = 0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0) {
        for (double& x : v) x /= norm;
    }
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

// Deterministic offline embedding: signed feature hashing of lowercase word
// tokens into a fixed-dimension vector, then L2 normalization. Retrieval tests
// run without model weights or network access.
class HashingEmbedding : public EmbeddingProvider {
public:
    explicit HashingEmbedding(std::size_t dim = 256) : dim_(dim) {}

    std::string id() const override { return "hashing-" + std::to_string(dim_); }
    std::size_t dimension() const override { return dim_; }

    std::vector<double> embed(const std::string& text) const override {
        std::vector<double> v(dim_, 0.0);
        std::string token;
        auto flush = [&]() {
            if (token.empty()) return;
            std::uint64_t h = fnv1a(token);
            double sign = (h >> 63) ? -1.0 : 1.0;
            v[h % dim_] += sign;
            token.clear();
        };
        for (char c : text) {
            if (std::isalnum(static_cast<unsigned char>(c))) {
                token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            } else {
                flush();
            }
        }
        flush();
        l2Normalize(v);
        return v;
    }

private:
    std::size_t dim_;

    static std::uint64_t fnv1a(const std::string& s) {
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace syntagm
