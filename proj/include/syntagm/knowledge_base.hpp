#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "syntagm/embedding.hpp"

namespace syntagm {

namespace fs = std::filesystem;

struct Exemplar {
    std::string id;  // relative path without extension; unique across nested dirs
    std::string descriptionText;
    std::string modelText;
    std::string dataText;
    std::string descriptionPath, modelPath, dataPath;
};

struct KnowledgeBase {
    std::string providerId;
    std::size_t dimension = 0;
    std::vector<Exemplar> exemplars;
    std::vector<std::vector<double>> vectors;  // one unit vector per exemplar
    std::vector<std::string> warnings;         // incomplete triplets etc.
};

struct ScoredExemplar {
    const Exemplar* exemplar;
    double score;
};

class KbError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string readFile(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw KbError("cannot read file: " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

inline constexpr const char* kManifestName = "kb_manifest.json";

// Scans rootDirectory recursively for <name>.txt with sibling <name>.mod and
// <name>.dat. Complete triplets are embedded from the description text;
// incomplete ones are skipped with a warning. An optional kb_manifest.json
// pins the provider id and vector dimension for cache validation.
inline KnowledgeBase indexKnowledgeBase(const std::string& rootDirectory,
                                        const EmbeddingProvider& provider) {
    if (!fs::exists(rootDirectory) || !fs::is_directory(rootDirectory)) {
        throw KbError("knowledge base directory not found: " + rootDirectory);
    }

    fs::path manifestPath = fs::path(rootDirectory) / kManifestName;
    if (fs::exists(manifestPath)) {
        nlohmann::json manifest =
            nlohmann::json::parse(detail::readFile(manifestPath), nullptr, false);
        if (!manifest.is_discarded()) {
            std::string wantProvider = manifest.value("provider", "");
            std::size_t wantDim = manifest.value("dimension", std::size_t{0});
            if (!wantProvider.empty() && wantProvider != provider.id()) {
                throw KbError("knowledge base manifest expects provider '" + wantProvider +
                              "' but got '" + provider.id() + "'");
            }
            if (wantDim != 0 && wantDim != provider.dimension()) {
                throw KbError("knowledge base manifest expects dimension " +
                              std::to_string(wantDim) + " but got " +
                              std::to_string(provider.dimension()));
            }
        }
    }

    KnowledgeBase kb;
    kb.providerId = provider.id();
    kb.dimension = provider.dimension();

    std::vector<fs::path> descriptions;
    for (const auto& entry : fs::recursive_directory_iterator(rootDirectory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            descriptions.push_back(entry.path());
        }
    }
    std::sort(descriptions.begin(), descriptions.end());
    if (descriptions.empty()) {
        throw KbError("knowledge base directory holds no problem descriptions: " +
                      rootDirectory);
    }

    for (const fs::path& txt : descriptions) {
        fs::path mod = txt;
        mod.replace_extension(".mod");
        fs::path dat = txt;
        dat.replace_extension(".dat");
        if (!fs::exists(mod) || !fs::exists(dat)) {
            kb.warnings.push_back("skipping incomplete triplet: " + txt.string() +
                                  " (missing sibling .mod or .dat)");
            continue;
        }
        Exemplar ex;
        fs::path rel = fs::relative(txt, rootDirectory);
        rel.replace_extension();
        ex.id = rel.generic_string();
        ex.descriptionPath = txt.string();
        ex.modelPath = mod.string();
        ex.dataPath = dat.string();
        ex.descriptionText = detail::readFile(txt);
        ex.modelText = detail::readFile(mod);
        ex.dataText = detail::readFile(dat);
        if (ex.descriptionText.find_first_not_of(" \t\r\n") == std::string::npos ||
            ex.modelText.find_first_not_of(" \t\r\n") == std::string::npos ||
            ex.dataText.find_first_not_of(" \t\r\n") == std::string::npos) {
            kb.warnings.push_back("skipping triplet with an empty file: " + txt.string());
            continue;
        }
        kb.vectors.push_back(provider.embed(ex.descriptionText));
        kb.exemplars.push_back(std::move(ex));
    }

    // dirs whose descriptions all lack siblings index as empty, with warnings
    return kb;
}

inline void writeManifest(const std::string& rootDirectory, const KnowledgeBase& kb) {
    nlohmann::json manifest = {{"provider", kb.providerId}, {"dimension", kb.dimension}};
    std::ofstream out(fs::path(rootDirectory) / kManifestName);
    out << manifest.dump(2) << "\n";
}

// Cosine similarity over normalized vectors is a plain dot product. Results
// are sorted by score descending with ties broken by exemplar id.
inline std::vector<ScoredExemplar> topK(const KnowledgeBase& kb,
                                        const EmbeddingProvider& provider,
                                        const std::string& query, std::size_t k) {
    std::vector<double> q = provider.embed(query);
    std::vector<ScoredExemplar> scored;
    scored.reserve(kb.exemplars.size());
    for (std::size_t i = 0; i < kb.exemplars.size(); ++i) {
        scored.push_back({&kb.exemplars[i], dot(kb.vectors[i], q)});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredExemplar& a, const ScoredExemplar& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.exemplar->id < b.exemplar->id;
    });
    if (scored.size() > k) scored.resize(k);
    return scored;
}

// Renders retrieved triplets verbatim for prompt injection. Empty input
// yields an empty string (the prompt then carries no few-shot section).
inline std::string formatFewShotBlock(const std::vector<ScoredExemplar>& results) {
    if (results.empty()) return "";
    std::string out = "<few_shot_examples>\n";
    out +=
        "Treat the following exemplars as guidance rather than templates; do not copy "
        "variable names or data blindly.\n";
    for (const auto& r : results) {
        out += "\n<example id=\"" + r.exemplar->id + "\">\n";
        out += "<description>\n" + r.exemplar->descriptionText + "\n</description>\n";
        out += "<model>\n" + r.exemplar->modelText + "\n</model>\n";
        out += "<data>\n" + r.exemplar->dataText + "\n</data>\n";
        out += "</example>\n";
    }
    out += "</few_shot_examples>\n";
    return out;
}

}  // namespace syntagm
