#include <catch2/catch.hpp>

#include <random>

#include "pyopl/compile.hpp"
#include "support.hpp"

using namespace pyopl;

namespace {

FlatVar makeVar(const std::string& name, VarDomain dom, double lb, double ub) {
    FlatVar v;
    v.display = name;
    v.base = name;
    v.domain = dom;
    v.lb = lb;
    v.ub = ub;
    return v;
}

FlatRow makeRow(const std::string& name, std::map<int, double> coefs, RowRel rel,
                double rhs) {
    FlatRow r;
    r.display = name;
    r.base = name;
    r.coefs = std::move(coefs);
    r.rel = rel;
    r.rhs = rhs;
    return r;
}

// Exhaustive 0/1 enumeration; the ground truth for the branch-and-bound tests.
struct BruteForce {
    bool feasible = false;
    double best = 0;
};

BruteForce enumerateBinary(const FlatModel& m) {
    BruteForce out;
    const std::size_t n = m.variables.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        bool ok = true;
        for (const auto& row : m.rows) {
            double activity = 0;
            for (const auto& [j, c] : row.coefs) {
                activity += c * ((mask >> j) & 1);
            }
            if (row.rel == RowRel::Le && activity > row.rhs) ok = false;
            if (row.rel == RowRel::Ge && activity < row.rhs) ok = false;
            if (row.rel == RowRel::Eq && activity != row.rhs) ok = false;
            if (!ok) break;
        }
        if (!ok) continue;
        double value = m.objectiveConstant;
        for (const auto& [j, c] : m.objectiveCoefs) value += c * ((mask >> j) & 1);
        if (!out.feasible) {
            out.feasible = true;
            out.best = value;
        } else if (m.sense == Sense::Minimize ? value < out.best : value > out.best) {
            out.best = value;
        }
    }
    return out;
}

FlatModel randomBinaryMilp(std::mt19937& rng, int maxVars) {
    std::uniform_int_distribution<int> nDist(2, maxVars);
    std::uniform_int_distribution<int> mDist(1, 6);
    std::uniform_int_distribution<int> coefDist(-9, 9);
    std::uniform_int_distribution<int> rhsDist(-15, 15);
    std::uniform_int_distribution<int> relDist(0, 2);

    FlatModel m;
    m.sense = rng() % 2 ? Sense::Minimize : Sense::Maximize;
    int n = nDist(rng);
    for (int j = 0; j < n; ++j) {
        m.variables.push_back(makeVar("b" + std::to_string(j), VarDomain::Binary, 0, 1));
        int c = coefDist(rng);
        if (c != 0) m.objectiveCoefs[j] = c;
    }
    int rows = mDist(rng);
    for (int i = 0; i < rows; ++i) {
        std::map<int, double> coefs;
        for (int j = 0; j < n; ++j) {
            int c = coefDist(rng);
            if (c != 0) coefs[j] = c;
        }
        RowRel rel = relDist(rng) == 0 ? RowRel::Le : relDist(rng) == 1 ? RowRel::Ge
                                                                        : RowRel::Eq;
        m.rows.push_back(makeRow("r" + std::to_string(i), std::move(coefs), rel,
                                 rhsDist(rng)));
    }
    return m;
}

}  // namespace

TEST_CASE("corner LP: max x+y subject to box rows") {
    FlatModel m;
    m.sense = Sense::Maximize;
    m.variables.push_back(makeVar("x", VarDomain::Continuous, 0, kInf));
    m.variables.push_back(makeVar("y", VarDomain::Continuous, 0, kInf));
    m.objectiveCoefs = {{0, 1.0}, {1, 1.0}};
    m.rows.push_back(makeRow("cx", {{0, 1.0}}, RowRel::Le, 1));
    m.rows.push_back(makeRow("cy", {{1, 1.0}}, RowRel::Le, 2));
    Solution sol = solveLp(m);
    REQUIRE(sol.status == Solution::Status::Optimal);
    CHECK(*sol.objectiveValue == Approx(3.0).margin(1e-9));
    CHECK(sol.assignment.at("x") == Approx(1.0).margin(1e-9));
    CHECK(sol.assignment.at("y") == Approx(2.0).margin(1e-9));
}

TEST_CASE("infeasible bounds are detected") {
    CompileResult r =
        compileStrings(testsupport::fixture("infeasible.mod"), "");
    REQUIRE(r.ok());
    Solution sol = solveLp(*r.flat);
    CHECK(sol.status == Solution::Status::Infeasible);
    CHECK_FALSE(sol.objectiveValue.has_value());
}

TEST_CASE("unbounded direction is detected") {
    FlatModel m;
    m.sense = Sense::Maximize;
    m.variables.push_back(makeVar("x", VarDomain::Continuous, 0, kInf));
    m.objectiveCoefs = {{0, 1.0}};
    Solution sol = solveLp(m);
    CHECK(sol.status == Solution::Status::Unbounded);
}

TEST_CASE("knapsack end to end equals the enumerated optimum") {
    CompileResult r = compileStrings(testsupport::readFile(testsupport::kbDir() + "/knapsack.mod"),
                                     testsupport::readFile(testsupport::kbDir() + "/knapsack.dat"));
    REQUIRE(r.ok());
    Solution sol = solveMilp(*r.flat);
    REQUIRE(sol.status == Solution::Status::Optimal);
    // brute force over all 8 subsets gives 22
    BruteForce oracle = enumerateBinary(*r.flat);
    REQUIRE(oracle.feasible);
    CHECK(oracle.best == 22.0);
    CHECK(*sol.objectiveValue == oracle.best);
}

TEST_CASE("unconstrained binary minimization picks zero") {
    FlatModel m;
    m.variables.push_back(makeVar("x", VarDomain::Binary, 0, 1));
    m.objectiveCoefs = {{0, 1.0}};
    Solution sol = solveMilp(m);
    REQUIRE(sol.status == Solution::Status::Optimal);
    CHECK(*sol.objectiveValue == 0.0);
}

TEST_CASE("pure LP through solveMilp delegates to solveLp") {
    FlatModel m;
    m.sense = Sense::Maximize;
    m.variables.push_back(makeVar("x", VarDomain::Continuous, 0, kInf));
    m.variables.push_back(makeVar("y", VarDomain::Continuous, 0, kInf));
    m.objectiveCoefs = {{0, 3.0}, {1, 5.0}};
    m.rows.push_back(makeRow("r1", {{0, 1.0}, {1, 2.0}}, RowRel::Le, 14));
    m.rows.push_back(makeRow("r2", {{0, 2.0}, {1, 1.0}}, RowRel::Le, 10));
    Solution lp = solveLp(m);
    Solution milp = solveMilp(m);
    REQUIRE(lp.status == Solution::Status::Optimal);
    CHECK(milp.status == lp.status);
    CHECK(*milp.objectiveValue == *lp.objectiveValue);
    CHECK(milp.assignment == lp.assignment);
}

TEST_CASE("determinism: identical model and options give identical results") {
    std::mt19937 rng(4242);
    FlatModel m = randomBinaryMilp(rng, 10);
    Solution a = solveMilp(m);
    Solution b = solveMilp(m);
    CHECK(a.status == b.status);
    CHECK(a.objectiveValue == b.objectiveValue);
    CHECK(a.assignment == b.assignment);
}

TEST_CASE("node limit reports the budget exhaustion") {
    FlatModel m;
    // equal ratios force a fractional root relaxation, so branching is needed
    for (int j = 0; j < 3; ++j) {
        m.variables.push_back(makeVar("b" + std::to_string(j), VarDomain::Binary, 0, 1));
        m.objectiveCoefs[j] = -3.0;
    }
    m.rows.push_back(makeRow("cap", {{0, 2.0}, {1, 2.0}, {2, 2.0}}, RowRel::Le, 3));
    SolveOptions opts;
    opts.nodeLimit = 1;
    Solution sol = solveMilp(m, opts);
    CHECK(sol.status == Solution::Status::NodeLimit);
    // the same instance solves to optimality without the budget
    Solution full = solveMilp(m);
    REQUIRE(full.status == Solution::Status::Optimal);
    CHECK(*full.objectiveValue == -3.0);
}

TEST_CASE("oracle equivalence on randomized binary MILPs") {
    std::mt19937 rng(123456);
    int infeasibleSeen = 0;
    for (int trial = 0; trial < 60; ++trial) {
        FlatModel m = randomBinaryMilp(rng, 10);
        BruteForce oracle = enumerateBinary(m);
        Solution sol = solveMilp(m);
        INFO("trial " << trial);
        if (!oracle.feasible) {
            ++infeasibleSeen;
            CHECK(sol.status == Solution::Status::Infeasible);
        } else {
            REQUIRE(sol.status == Solution::Status::Optimal);
            CHECK(*sol.objectiveValue == oracle.best);  // exact: integer data
        }
    }
    CHECK(infeasibleSeen > 0);  // the generator must exercise both outcomes
}

TEST_CASE("LP duality spot check on random feasible bounded primals") {
    std::mt19937 rng(777);
    std::uniform_int_distribution<int> mDist(2, 4);
    std::uniform_int_distribution<int> nDist(2, 5);
    std::uniform_int_distribution<int> aDist(-5, 5);
    std::uniform_int_distribution<int> bDist(1, 10);
    std::uniform_int_distribution<int> cDist(-9, 9);

    for (int trial = 0; trial < 30; ++trial) {
        int rows = mDist(rng), cols = nDist(rng);
        std::vector<std::vector<double>> A(rows, std::vector<double>(cols));
        std::vector<double> b(rows), c(cols);
        for (auto& row : A) {
            for (double& v : row) v = aDist(rng);
        }
        for (double& v : b) v = bDist(rng);
        for (double& v : c) v = cDist(rng);

        // primal: max c.x st A x <= b, x <= 10 (box keeps it bounded), x >= 0
        FlatModel primal;
        primal.sense = Sense::Maximize;
        for (int j = 0; j < cols; ++j) {
            primal.variables.push_back(
                makeVar("x" + std::to_string(j), VarDomain::Continuous, 0, kInf));
            if (c[j] != 0) primal.objectiveCoefs[j] = c[j];
        }
        for (int i = 0; i < rows; ++i) {
            std::map<int, double> coefs;
            for (int j = 0; j < cols; ++j) {
                if (A[i][j] != 0) coefs[j] = A[i][j];
            }
            primal.rows.push_back(makeRow("r" + std::to_string(i), std::move(coefs),
                                          RowRel::Le, b[i]));
        }
        for (int j = 0; j < cols; ++j) {
            primal.rows.push_back(
                makeRow("box" + std::to_string(j), {{j, 1.0}}, RowRel::Le, 10));
        }

        // dual (built by the test): min b.y + 10.w st A'y + w >= c, y, w >= 0
        FlatModel dual;
        dual.sense = Sense::Minimize;
        for (int i = 0; i < rows; ++i) {
            dual.variables.push_back(
                makeVar("y" + std::to_string(i), VarDomain::Continuous, 0, kInf));
            if (b[i] != 0) dual.objectiveCoefs[i] = b[i];
        }
        for (int j = 0; j < cols; ++j) {
            dual.variables.push_back(
                makeVar("w" + std::to_string(j), VarDomain::Continuous, 0, kInf));
            dual.objectiveCoefs[rows + j] = 10.0;
        }
        for (int j = 0; j < cols; ++j) {
            std::map<int, double> coefs;
            for (int i = 0; i < rows; ++i) {
                if (A[i][j] != 0) coefs[i] = A[i][j];
            }
            coefs[rows + j] = 1.0;
            dual.rows.push_back(
                makeRow("d" + std::to_string(j), std::move(coefs), RowRel::Ge, c[j]));
        }

        Solution p = solveLp(primal);
        Solution d = solveLp(dual);
        INFO("trial " << trial);
        REQUIRE(p.status == Solution::Status::Optimal);
        REQUIRE(d.status == Solution::Status::Optimal);
        CHECK(*p.objectiveValue == Approx(*d.objectiveValue).margin(1e-7));
    }
}

// ---------------------------------------------------------------------------
// LP-format export

TEST_CASE("export produces the conventional sections") {
    CompileResult r = compileStrings(
        "dvar float x; minimize z: x; subject to { c: x >= 1; }", "");
    REQUIRE(r.ok());
    std::string lp = exportLpFormat(*r.flat);
    CHECK(lp.find("Minimize") != std::string::npos);
    CHECK(lp.find("Subject To") != std::string::npos);
    CHECK(lp.find("Bounds") != std::string::npos);
    CHECK(lp.rfind("End\n") == lp.size() - 4);
}

TEST_CASE("every alp constraint label appears as a row name") {
    CompileResult r = compileStrings(testsupport::fixture("alp.mod"),
                                     testsupport::fixture("alp.dat"));
    REQUIRE(r.ok());
    std::string lp = exportLpFormat(*r.flat);
    for (const auto& row : r.flat->rows) {
        std::string rowName = row.base + "(";
        CHECK(lp.find(rowName) != std::string::npos);
    }
    CHECK(lp.find("separation(A1,A2):") != std::string::npos);
}

TEST_CASE("binary knapsack lists all variables under Binaries") {
    CompileResult r = compileStrings(testsupport::readFile(testsupport::kbDir() + "/knapsack.mod"),
                                     testsupport::readFile(testsupport::kbDir() + "/knapsack.dat"));
    REQUIRE(r.ok());
    std::string lp = exportLpFormat(*r.flat);
    std::size_t binaries = lp.find("Binaries");
    REQUIRE(binaries != std::string::npos);
    CHECK(lp.find("take(1)", binaries) != std::string::npos);
    CHECK(lp.find("take(2)", binaries) != std::string::npos);
    CHECK(lp.find("take(3)", binaries) != std::string::npos);
}

TEST_CASE("integer variables land in Generals and free variables in Bounds") {
    CompileResult r = compileStrings(
        "dvar int q in 0..3; dvar float f;"
        "minimize z: q + f; subject to { c: q + f >= 1; }",
        "");
    REQUIRE(r.ok());
    std::string lp = exportLpFormat(*r.flat);
    CHECK(lp.find("Generals") != std::string::npos);
    CHECK(lp.find(" f free") != std::string::npos);
    CHECK(lp.find("0 <= q <= 3") != std::string::npos);
}

TEST_CASE("solve options must be strictly positive") {
    FlatModel m;
    m.variables.push_back(makeVar("x", VarDomain::Continuous, 0, 1));
    m.objectiveCoefs = {{0, 1.0}};
    SolveOptions opts;
    opts.timeLimitSeconds = 0;
    CHECK_THROWS_AS(solveLp(m, opts), std::invalid_argument);
    opts.timeLimitSeconds = 60;
    opts.nodeLimit = -1;
    CHECK_THROWS_AS(solveMilp(m, opts), std::invalid_argument);
}

TEST_CASE("oracle equivalence extends to small general-integer domains") {
    std::mt19937 rng(555);
    std::uniform_int_distribution<int> coefDist(-9, 9);
    int feasibleSeen = 0;
    for (int trial = 0; trial < 40; ++trial) {
        FlatModel m;
        m.sense = rng() % 2 ? Sense::Minimize : Sense::Maximize;
        int n = 2 + static_cast<int>(rng() % 5);  // up to 6 vars of domain size 4
        for (int j = 0; j < n; ++j) {
            m.variables.push_back(makeVar("q" + std::to_string(j), VarDomain::Integer, 0, 3));
            int c = coefDist(rng);
            if (c != 0) m.objectiveCoefs[j] = c;
        }
        int rows = 1 + static_cast<int>(rng() % 3);
        std::vector<int> witness(n);
        for (int j = 0; j < n; ++j) witness[j] = static_cast<int>(rng() % 4);
        for (int i = 0; i < rows; ++i) {
            std::map<int, double> coefs;
            for (int j = 0; j < n; ++j) {
                int c = coefDist(rng);
                if (c != 0) coefs[j] = c;
            }
            double w = 0;
            for (const auto& [j, c] : coefs) w += c * witness[j];
            RowRel rel = rng() % 2 ? RowRel::Le : RowRel::Ge;
            double rhs = rel == RowRel::Le ? w + static_cast<double>(rng() % 8)
                                           : w - static_cast<double>(rng() % 8);
            m.rows.push_back(makeRow("r" + std::to_string(i), std::move(coefs), rel, rhs));
        }

        // enumeration over the full 4^n grid
        bool feasible = false;
        double best = 0;
        std::vector<int> point(n, 0);
        while (true) {
            bool ok = true;
            for (const auto& row : m.rows) {
                double activity = 0;
                for (const auto& [j, c] : row.coefs) activity += c * point[j];
                if (row.rel == RowRel::Le && activity > row.rhs) ok = false;
                if (row.rel == RowRel::Ge && activity < row.rhs) ok = false;
                if (!ok) break;
            }
            if (ok) {
                double value = 0;
                for (const auto& [j, c] : m.objectiveCoefs) value += c * point[j];
                if (!feasible ||
                    (m.sense == Sense::Minimize ? value < best : value > best)) {
                    best = value;
                    feasible = true;
                }
            }
            int k = 0;
            while (k < n && ++point[k] == 4) point[k++] = 0;
            if (k == n) break;
        }

        Solution sol = solveMilp(m);
        INFO("trial " << trial);
        REQUIRE(feasible);  // witness construction guarantees it
        ++feasibleSeen;
        REQUIRE(sol.status == Solution::Status::Optimal);
        CHECK(*sol.objectiveValue == best);
    }
    CHECK(feasibleSeen == 40);
}
