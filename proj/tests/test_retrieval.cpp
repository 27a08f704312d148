#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>

#include "support.hpp"
#include "syntagm/knowledge_base.hpp"

using namespace syntagm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("kbtest-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    void write(const std::string& rel, const std::string& content) const {
        fs::path p = path / rel;
        fs::create_directories(p.parent_path());
        std::ofstream out(p);
        out << content;
    }
};

}  // namespace

TEST_CASE("bundled corpus indexes all 22 exemplar triplets") {
    HashingEmbedding provider;
    KnowledgeBase kb = indexKnowledgeBase(testsupport::kbDir(), provider);
    CHECK(kb.exemplars.size() >= 22);
    CHECK(kb.vectors.size() == kb.exemplars.size());
    CHECK(kb.dimension == 256);
    for (const auto& ex : kb.exemplars) {
        CHECK_FALSE(ex.descriptionText.empty());
        CHECK_FALSE(ex.modelText.empty());
        CHECK_FALSE(ex.dataText.empty());
    }
    bool hasJobshop = false, hasCrewPairing = false, hasStochasticScheduling = false;
    for (const auto& ex : kb.exemplars) {
        hasJobshop = hasJobshop || ex.id == "jobshop";
        hasCrewPairing = hasCrewPairing || ex.id == "crew_pairing";
        hasStochasticScheduling = hasStochasticScheduling || ex.id == "stochastic_scheduling";
    }
    CHECK(hasJobshop);
    CHECK(hasCrewPairing);
    CHECK(hasStochasticScheduling);
}

TEST_CASE("descriptions without a sibling model are skipped with a warning") {
    TempDir dir;
    dir.write("orphan.txt", "a description with no model");
    dir.write("whole.txt", "a complete triplet");
    dir.write("whole.mod", "dvar float x; minimize z: x; subject to { c: x >= 0; }");
    dir.write("whole.dat", "// empty\n");
    HashingEmbedding provider;
    KnowledgeBase kb = indexKnowledgeBase(dir.path.string(), provider);
    CHECK(kb.exemplars.size() == 1);
    REQUIRE(kb.warnings.size() == 1);
    CHECK(kb.warnings[0].find("orphan.txt") != std::string::npos);
}

TEST_CASE("a directory with only orphan descriptions indexes empty with warnings") {
    TempDir dir;
    dir.write("lonely.txt", "no model or data next to this");
    HashingEmbedding provider;
    KnowledgeBase kb = indexKnowledgeBase(dir.path.string(), provider);
    CHECK(kb.exemplars.empty());
    REQUIRE(kb.warnings.size() == 1);
    CHECK(kb.warnings[0].find("lonely.txt") != std::string::npos);
}

TEST_CASE("an empty directory is an error") {
    TempDir dir;
    HashingEmbedding provider;
    CHECK_THROWS_AS(indexKnowledgeBase(dir.path.string(), provider), KbError);
    CHECK_THROWS_AS(indexKnowledgeBase((dir.path / "missing").string(), provider), KbError);
}

TEST_CASE("duplicate basenames in nested directories get distinct ids") {
    TempDir dir;
    for (const char* sub : {"batch1", "batch2"}) {
        std::string base = std::string(sub) + "/prob";
        dir.write(base + ".txt", std::string("problem inside ") + sub);
        dir.write(base + ".mod", "dvar float x; minimize z: x; subject to { c: x >= 0; }");
        dir.write(base + ".dat", "// no data\n");
    }
    HashingEmbedding provider;
    KnowledgeBase kb = indexKnowledgeBase(dir.path.string(), provider);
    REQUIRE(kb.exemplars.size() == 2);
    CHECK(kb.exemplars[0].id == "batch1/prob");
    CHECK(kb.exemplars[1].id == "batch2/prob");
}

TEST_CASE("manifest provider mismatch is rejected") {
    TempDir dir;
    dir.write("p.txt", "text");
    dir.write("p.mod", "dvar float x; minimize z: x; subject to { c: x >= 0; }");
    dir.write("p.dat", "// none\n");
    dir.write(kManifestName, "{\"provider\": \"remote:some-encoder\", \"dimension\": 384}");
    HashingEmbedding provider;
    CHECK_THROWS_AS(indexKnowledgeBase(dir.path.string(), provider), KbError);
}

TEST_CASE("stored vectors are unit length within 1e-9") {
    HashingEmbedding provider;
    KnowledgeBase kb = indexKnowledgeBase(testsupport::kbDir(), provider);
    for (const auto& v : kb.vectors) {
        CHECK(std::abs(dot(v, v) - 1.0) <= 1e-9);
    }
}

TEST_CASE("self-query returns the exemplar first with score one") {
    HashingEmbedding provider;
    KnowledgeBase kb = indexKnowledgeBase(testsupport::kbDir(), provider);
    const Exemplar& probe = kb.exemplars[4];
    auto results = topK(kb, provider, probe.descriptionText, 3);
    REQUIRE(results.size() == 3);
    CHECK(results[0].exemplar->id == probe.id);
    CHECK(results[0].score == Approx(1.0).margin(1e-6));
    CHECK(results[0].score >= results[1].score);
    CHECK(results[1].score >= results[2].score);
}

TEST_CASE("score is symmetric across exemplar pairs") {
    HashingEmbedding provider;
    KnowledgeBase kb = indexKnowledgeBase(testsupport::kbDir(), provider);
    for (std::size_t a = 0; a < 5; ++a) {
        for (std::size_t b = a + 1; b < 5; ++b) {
            double ab = dot(kb.vectors[a], kb.vectors[b]);
            double ba = dot(kb.vectors[b], kb.vectors[a]);
            CHECK(ab == ba);
            CHECK(ab >= -1.0 - 1e-9);
            CHECK(ab <= 1.0 + 1e-9);
        }
    }
}

TEST_CASE("topK clamps k and truncation is monotone") {
    HashingEmbedding provider;
    KnowledgeBase kb = indexKnowledgeBase(testsupport::kbDir(), provider);
    const std::string query =
        "Aircraft must land within time windows while respecting separation times "
        "between successive landings, minimising earliness and lateness penalties.";
    auto all = topK(kb, provider, query, 1000);
    CHECK(all.size() == kb.exemplars.size());
    for (std::size_t k = 1; k <= 5; ++k) {
        auto prefix = topK(kb, provider, query, k);
        REQUIRE(prefix.size() == k);
        auto longer = topK(kb, provider, query, k + 1);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(prefix[i].exemplar->id == longer[i].exemplar->id);
            CHECK(prefix[i].score == longer[i].score);
        }
    }
}

TEST_CASE("few-shot block renders triplets verbatim in score order") {
    HashingEmbedding provider;
    KnowledgeBase kb = indexKnowledgeBase(testsupport::kbDir(), provider);
    auto results = topK(kb, provider, kb.exemplars[0].descriptionText, 3);
    std::string block = formatFewShotBlock(results);
    CHECK(block.rfind("<few_shot_examples>", 0) == 0);
    CHECK(block.find("guidance rather than templates") != std::string::npos);
    std::size_t last = 0;
    for (const auto& r : results) {
        std::size_t at = block.find("<example id=\"" + r.exemplar->id + "\">");
        REQUIRE(at != std::string::npos);
        CHECK(at > last);
        last = at;
        CHECK(block.find(r.exemplar->descriptionText) != std::string::npos);
        CHECK(block.find(r.exemplar->modelText) != std::string::npos);
        CHECK(block.find(r.exemplar->dataText) != std::string::npos);
    }
    CHECK(formatFewShotBlock({}).empty());
}

TEST_CASE("triplets with an empty member file are skipped") {
    TempDir dir;
    dir.write("hollow.txt", "   \n");
    dir.write("hollow.mod", "dvar float x; minimize z: x; subject to { c: x >= 0; }");
    dir.write("hollow.dat", "// none\n");
    HashingEmbedding provider;
    KnowledgeBase kb = indexKnowledgeBase(dir.path.string(), provider);
    CHECK(kb.exemplars.empty());
    REQUIRE(kb.warnings.size() == 1);
    CHECK(kb.warnings[0].find("empty file") != std::string::npos);
}
