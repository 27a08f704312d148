#include <catch2/catch.hpp>

#include <filesystem>
#include <map>

#include "pyopl/parser.hpp"
#include "pyopl/printer.hpp"
#include "support.hpp"

using namespace pyopl;

namespace {

ModelAst parseOk(const std::string& text) {
    auto r = parseModelText(text);
    INFO((r.error ? r.error->render() : std::string()));
    REQUIRE(r.ok());
    return *r.value;
}

std::multiset<std::string> commentTexts(const ModelAst& m) {
    std::multiset<std::string> out;
    for (const auto& c : m.comments) out.insert(c.text);
    return out;
}

}  // namespace

TEST_CASE("smallest complete model parses") {
    ModelAst m = parseOk(
        "float a; dvar float x; minimize z: a*x; subject to { c1: x >= 0; }");
    CHECK(m.declarations.size() == 2);
    CHECK(m.objective.label == "z");
    CHECK(m.objective.sense == Sense::Minimize);
    CHECK(m.constraints.size() == 1);
}

TEST_CASE("the aircraft landing model parses without error") {
    auto r = parseModelText(testsupport::fixture("alp.mod"));
    INFO((r.error ? r.error->render() : std::string()));
    CHECK(r.ok());
}

TEST_CASE("chained comparison parses into a 3-element chain node") {
    ModelAst m = parseOk(
        "float E; float L; dvar float t;"
        "minimize z: t; subject to { w: t >= E <= L; }");
    const auto& lc = std::get<LabelledConstraint>(m.constraints[0].node);
    REQUIRE(lc.constraint->kind == Expression::Kind::Compare);
    CHECK(lc.constraint->children.size() == 3);
    CHECK(lc.constraint->relations ==
          std::vector<RelOp>{RelOp::Ge, RelOp::Le});
    CHECK(dumpExpr(lc.constraint) == "(chain t >= E <= L)");
}

TEST_CASE("sum without parentheses binds the next multiplicative term only") {
    ModelAst m = parseOk(
        "float a; float b; dvar float x; dvar float y;"
        "minimize z: sum (i in 1..2) a*x + b*y;"
        "subject to { c: x >= 0; }");
    const ExprPtr& obj = m.objective.expr;
    REQUIRE(obj->kind == Expression::Kind::Binary);
    CHECK(obj->op == '+');
    CHECK(obj->children[0]->kind == Expression::Kind::Sum);
}

TEST_CASE("syntax errors name the offending token") {
    auto r = parseModelText("float a; dvar float x; minimize z: a*x; 42");
    REQUIRE_FALSE(r.ok());
    CHECK(r.error->code == std::string(codes::SynUnexpectedToken));
    CHECK(r.error->message.find("NUMBER") != std::string::npos);
    CHECK(r.error->message.find("'42'") != std::string::npos);
}

TEST_CASE("missing semicolon is reported on the statement's line") {
    auto r = parseModelText("float a\ndvar float x;\nminimize z: a*x;");
    REQUIRE_FALSE(r.ok());
    CHECK(r.error->code == std::string(codes::SynMissingSemicolon));
    CHECK(r.error->line == 1);
}

TEST_CASE("objective count is enforced at parse time") {
    auto none = parseModelText("float a;");
    REQUIRE_FALSE(none.ok());
    CHECK(none.error->code == std::string(codes::SemNoObjective));

    auto two = parseModelText(
        "dvar float x; minimize z: x; maximize w: x; subject to { c: x >= 0; }");
    REQUIRE_FALSE(two.ok());
    CHECK(two.error->code == std::string(codes::SemMultipleObjective));
}

// ---------------------------------------------------------------------------
// Data files

TEST_CASE("two scalar assignments") {
    auto r = parseDataText("a = 10;\n b = 5;");
    REQUIRE(r.ok());
    REQUIRE(r.value->assignments.size() == 2);
    CHECK(r.value->assignments[0].name == "a");
    CHECK(r.value->assignments[1].value.numberValue == 5);
}

TEST_CASE("bare identifier in data reproduces the token-naming message") {
    auto r = parseDataText("a = 1;\ndemand");
    REQUIRE_FALSE(r.ok());
    CHECK(r.error->code == std::string(codes::SynDatSyntax));
    CHECK(r.error->message ==
          "Syntax error in .dat file at or near token NAME, value 'demand'.");
    CHECK(r.error->line == 2);
}

TEST_CASE("3x3 separation matrix parses as one assignment") {
    auto r = parseDataText("sep = [[0,2,3],[2,0,4],[3,4,0]];");
    REQUIRE(r.ok());
    REQUIRE(r.value->assignments.size() == 1);
    const DataLiteral& lit = r.value->assignments[0].value;
    REQUIRE(lit.kind == DataLiteral::Kind::Array);
    REQUIRE(lit.elements.size() == 3);
    for (const auto& row : lit.elements) CHECK(row.elements.size() == 3);
}

TEST_CASE("ragged arrays are rejected") {
    auto r = parseDataText("m = [[1,2,3],[4,5],[6,7,8]];");
    REQUIRE_FALSE(r.ok());
    CHECK(r.error->code == std::string(codes::DatRaggedArray));
    CHECK(r.error->message.find("row 2") != std::string::npos);
}

TEST_CASE("duplicate assignment is rejected") {
    auto r = parseDataText("a = 1;\na = 2;");
    REQUIRE_FALSE(r.ok());
    CHECK(r.error->code == std::string(codes::DatDuplicateAssign));
}

TEST_CASE("expressions are not allowed in data files") {
    auto r = parseDataText("a = 1 + 2;");
    REQUIRE_FALSE(r.ok());
    CHECK(r.error->code == std::string(codes::DatExprInDat));
}

TEST_CASE("tuple lists, sets, ranges and negatives parse as literals") {
    auto r = parseDataText(
        "Arcs = { <\"A\", \"B\">, <\"B\", \"C\"> };\n"
        "pairsList = [ <1, 2>, <3, 4> ];\n"
        "T = 1..5;\n"
        "low = -3.5;");
    REQUIRE(r.ok());
    CHECK(r.value->assignments[0].value.kind == DataLiteral::Kind::Set);
    CHECK(r.value->assignments[1].value.elements[0].kind == DataLiteral::Kind::Tuple);
    CHECK(r.value->assignments[2].value.kind == DataLiteral::Kind::Range);
    CHECK(r.value->assignments[3].value.numberValue == -3.5);
}

// ---------------------------------------------------------------------------
// Round-trip and span properties

TEST_CASE("pretty-printed models re-parse structurally equal (kb corpus)") {
    namespace fs = std::filesystem;
    int count = 0;
    for (const auto& entry : fs::directory_iterator(testsupport::kbDir())) {
        if (entry.path().extension() != ".mod") continue;
        ++count;
        INFO(entry.path().string());
        ModelAst first = parseOk(testsupport::readFile(entry.path().string()));
        std::string printed = prettyPrint(first);
        INFO(printed);
        ModelAst second = parseOk(printed);
        CHECK(structurallyEqual(first, second));
        CHECK(commentTexts(first) == commentTexts(second));
    }
    CHECK(count >= 22);
}

TEST_CASE("fixture models round-trip too") {
    for (const char* name : {"alp.mod", "alp_chained.mod", "minimal.mod"}) {
        INFO(name);
        ModelAst first = parseOk(testsupport::fixture(name));
        ModelAst second = parseOk(prettyPrint(first));
        CHECK(structurallyEqual(first, second));
        CHECK(commentTexts(first) == commentTexts(second));
    }
}

TEST_CASE("span fidelity: corruption at line L is reported at line L") {
    const std::string model = testsupport::fixture("alp.mod");
    std::vector<std::string> lines;
    {
        std::istringstream in(model);
        std::string line;
        while (std::getline(in, line)) lines.push_back(line);
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].find_first_not_of(" \t") == std::string::npos) continue;
        if (lines[i].find("//") != std::string::npos) continue;  // inert inside comments
        std::string corrupted;
        for (std::size_t k = 0; k < lines.size(); ++k) {
            corrupted += (k == i) ? "@" + lines[k] : lines[k];
            corrupted += "\n";
        }
        auto r = parseModelText(corrupted);
        REQUIRE_FALSE(r.ok());
        INFO("corrupted line " << i + 1);
        CHECK(r.error->line == static_cast<int>(i + 1));
    }
}
