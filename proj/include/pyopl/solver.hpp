#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "pyopl/instantiate.hpp"

namespace pyopl {

struct SolveOptions {
    double feasibilityTolerance = 1e-9;
    double integralityTolerance = 1e-6;
    long nodeLimit = 1000000;
    double timeLimitSeconds = 60;

    void validate() const {
        if (feasibilityTolerance <= 0 || integralityTolerance <= 0 || nodeLimit <= 0 ||
            timeLimitSeconds <= 0) {
            throw std::invalid_argument("solve options must all be strictly positive");
        }
    }
};

struct Solution {
    enum class Status { Optimal, Infeasible, Unbounded, NodeLimit, NumericalFailure };

    Status status = Status::NumericalFailure;
    std::optional<double> objectiveValue;      // present iff Optimal
    std::optional<double> incumbentObjective;  // best incumbent on NodeLimit
    std::map<std::string, double> assignment;  // flat variable display -> value
    long nodesExplored = 0;
};

inline std::string to_string(Solution::Status s) {
    switch (s) {
        case Solution::Status::Optimal: return "optimal";
        case Solution::Status::Infeasible: return "infeasible";
        case Solution::Status::Unbounded: return "unbounded";
        case Solution::Status::NodeLimit: return "nodeLimit";
        case Solution::Status::NumericalFailure: return "numericalFailure";
    }
    return "?";
}

namespace detail {

constexpr double kPivotTol = 1e-9;

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

struct LpResult {
    LpStatus status = LpStatus::NumericalFailure;
    double objective = 0;            // in the model's own sense
    std::vector<double> x;           // per original flat variable
};

// Dense two-phase simplex over the standard form min c.y, Ay=b, y>=0.
class SimplexSolver {
public:
    LpResult solve(const FlatModel& model, const std::vector<double>& lb,
                   const std::vector<double>& ub) {
        LpResult out;
        const std::size_t nOrig = model.variables.size();

        // Variable substitutions to nonnegative y.
        struct VarMap {
            enum class Kind { Shift, NegShift, Split } kind;
            int col = -1, col2 = -1;
            double offset = 0;
        };
        std::vector<VarMap> maps(nOrig);
        int nCols = 0;
        for (std::size_t j = 0; j < nOrig; ++j) {
            double l = lb[j], u = ub[j];
            if (l > u) {
                out.status = LpStatus::Infeasible;
                return out;
            }
            if (l > -kInf) {
                maps[j] = {VarMap::Kind::Shift, nCols++, -1, l};
            } else if (u < kInf) {
                maps[j] = {VarMap::Kind::NegShift, nCols++, -1, u};
            } else {
                maps[j] = {VarMap::Kind::Split, nCols, nCols + 1, 0};
                nCols += 2;
            }
        }

        // Substituted objective in minimize convention. Constant terms do not
        // affect the argmin; the reported objective is recomputed from x.
        bool maximize = model.sense == Sense::Maximize;
        std::vector<double> cost(nCols, 0.0);
        for (const auto& [j, c] : model.objectiveCoefs) {
            double cc = maximize ? -c : c;
            const VarMap& vm = maps[j];
            switch (vm.kind) {
                case VarMap::Kind::Shift: cost[vm.col] += cc; break;
                case VarMap::Kind::NegShift: cost[vm.col] -= cc; break;
                case VarMap::Kind::Split:
                    cost[vm.col] += cc;
                    cost[vm.col2] -= cc;
                    break;
            }
        }

        // Rows with substituted coefficients; upper bounds become extra rows.
        struct Row {
            std::vector<double> a;
            double b = 0;
            RowRel rel = RowRel::Le;
        };
        std::vector<Row> rows;
        for (const auto& fr : model.rows) {
            Row row;
            row.a.assign(nCols, 0.0);
            row.b = fr.rhs;
            row.rel = fr.rel;
            for (const auto& [j, c] : fr.coefs) {
                substInto(row.a, row.b, maps[j], c);
            }
            bool empty = true;
            for (double v : row.a) {
                if (v != 0.0) empty = false;
            }
            if (empty) {
                bool okRow = row.rel == RowRel::Le   ? 0.0 <= row.b + 1e-9
                             : row.rel == RowRel::Ge ? 0.0 >= row.b - 1e-9
                                                     : std::abs(row.b) <= 1e-9;
                if (!okRow) {
                    out.status = LpStatus::Infeasible;
                    return out;
                }
                continue;
            }
            rows.push_back(std::move(row));
        }
        for (std::size_t j = 0; j < nOrig; ++j) {
            double l = lb[j], u = ub[j];
            if (l > -kInf && u < kInf) {
                Row row;
                row.a.assign(nCols, 0.0);
                row.a[maps[j].col] = 1.0;
                row.b = u - l;
                row.rel = RowRel::Le;
                rows.push_back(std::move(row));
            } else if (l <= -kInf && u < kInf) {
                // handled by NegShift; nothing to add
            }
        }

        const std::size_t m = rows.size();
        // Normalize b >= 0, add slack/surplus, track artificial needs.
        std::vector<int> slackCol(m, -1);
        int nSlacks = 0;
        for (auto& row : rows) {
            if (row.b < 0) {
                for (double& v : row.a) v = -v;
                row.b = -row.b;
                row.rel = row.rel == RowRel::Le ? RowRel::Ge
                          : row.rel == RowRel::Ge ? RowRel::Le
                                                  : RowRel::Eq;
            }
            if (row.rel != RowRel::Eq) ++nSlacks;
        }
        int totalCols = nCols + nSlacks;
        std::vector<bool> needsArtificial(m, false);
        {
            int s = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (rows[i].rel == RowRel::Le) {
                    slackCol[i] = nCols + s++;
                } else if (rows[i].rel == RowRel::Ge) {
                    slackCol[i] = nCols + s++;
                    needsArtificial[i] = true;
                } else {
                    needsArtificial[i] = true;
                }
            }
        }
        int nArt = 0;
        std::vector<int> artCol(m, -1);
        for (std::size_t i = 0; i < m; ++i) {
            if (needsArtificial[i]) artCol[i] = totalCols + nArt++;
        }
        const int width = totalCols + nArt + 1;  // + rhs

        // Build tableau.
        tableau_.assign(m, std::vector<double>(width, 0.0));
        basis_.assign(m, -1);
        for (std::size_t i = 0; i < m; ++i) {
            for (int j = 0; j < nCols; ++j) tableau_[i][j] = rows[i].a[j];
            if (rows[i].rel == RowRel::Le) {
                tableau_[i][slackCol[i]] = 1.0;
                basis_[i] = slackCol[i];
            } else if (rows[i].rel == RowRel::Ge) {
                tableau_[i][slackCol[i]] = -1.0;
            }
            if (artCol[i] >= 0) {
                tableau_[i][artCol[i]] = 1.0;
                basis_[i] = artCol[i];
            }
            tableau_[i][width - 1] = rows[i].b;
        }
        firstArtificial_ = totalCols;
        width_ = width;

        // Phase 1: minimize the artificial sum.
        if (nArt > 0) {
            std::vector<double> phase1(width, 0.0);
            double obj1 = 0;
            for (std::size_t i = 0; i < m; ++i) {
                if (artCol[i] < 0) continue;
                for (int j = 0; j < width - 1; ++j) phase1[j] -= tableau_[i][j];
                obj1 -= tableau_[i][width - 1];
                phase1[artCol[i]] = 0.0;
            }
            if (!pivotLoop(phase1, obj1, /*phase1=*/true)) {
                out.status = LpStatus::NumericalFailure;
                return out;
            }
            if (obj1 < -1e-7) {
                out.status = LpStatus::Infeasible;
                return out;
            }
            // Drive basic artificials out where possible; all-zero rows are inert.
            for (std::size_t i = 0; i < m; ++i) {
                if (basis_[i] < firstArtificial_) continue;
                int enter = -1;
                for (int j = 0; j < firstArtificial_; ++j) {
                    if (std::abs(tableau_[i][j]) > kPivotTol) {
                        enter = j;
                        break;
                    }
                }
                if (enter >= 0) pivot(i, enter);
            }
        }

        // Phase 2 with the real objective.
        std::vector<double> reduced(width, 0.0);
        for (int j = 0; j < nCols; ++j) reduced[j] = cost[j];
        double obj2 = 0;
        for (std::size_t i = 0; i < m; ++i) {
            int bj = basis_[i];
            if (bj < nCols && cost[bj] != 0.0) {
                double cb = cost[bj];
                for (int j = 0; j < width - 1; ++j) reduced[j] -= cb * tableau_[i][j];
                obj2 -= cb * tableau_[i][width - 1];
            }
        }
        bool unbounded = false;
        if (!pivotLoop(reduced, obj2, /*phase1=*/false, &unbounded)) {
            out.status = LpStatus::NumericalFailure;
            return out;
        }
        if (unbounded) {
            out.status = LpStatus::Unbounded;
            return out;
        }

        // Extract solution.
        std::vector<double> y(totalCols + nArt, 0.0);
        for (std::size_t i = 0; i < m; ++i) y[basis_[i]] = tableau_[i][width - 1];
        out.x.assign(nOrig, 0.0);
        for (std::size_t j = 0; j < nOrig; ++j) {
            const VarMap& vm = maps[j];
            switch (vm.kind) {
                case VarMap::Kind::Shift: out.x[j] = vm.offset + y[vm.col]; break;
                case VarMap::Kind::NegShift: out.x[j] = vm.offset - y[vm.col]; break;
                case VarMap::Kind::Split: out.x[j] = y[vm.col] - y[vm.col2]; break;
            }
        }
        out.objective = model.objectiveConstant;
        for (const auto& [j, c] : model.objectiveCoefs) out.objective += c * out.x[j];
        out.status = LpStatus::Optimal;
        return out;
    }

private:
    std::vector<std::vector<double>> tableau_;
    std::vector<int> basis_;
    int firstArtificial_ = 0;
    int width_ = 0;

    template <typename VarMapT>
    static void substInto(std::vector<double>& a, double& b, const VarMapT& vm, double c) {
        switch (vm.kind) {
            case VarMapT::Kind::Shift:
                a[vm.col] += c;
                b -= c * vm.offset;
                break;
            case VarMapT::Kind::NegShift:
                a[vm.col] -= c;
                b -= c * vm.offset;
                break;
            case VarMapT::Kind::Split:
                a[vm.col] += c;
                a[vm.col2] -= c;
                break;
        }
    }

    void pivot(std::size_t row, int col) {
        double p = tableau_[row][col];
        for (double& v : tableau_[row]) v /= p;
        for (std::size_t i = 0; i < tableau_.size(); ++i) {
            if (i == row) continue;
            double f = tableau_[i][col];
            if (f == 0.0) continue;
            for (int j = 0; j < width_; ++j) tableau_[i][j] -= f * tableau_[row][j];
        }
        basis_[row] = col;
    }

    static void eliminate(std::vector<double>& costRow, double& obj,
                          const std::vector<double>& pivotRow, double f, int width) {
        if (f == 0.0) return;
        for (int j = 0; j < width - 1; ++j) costRow[j] -= f * pivotRow[j];
        obj -= f * pivotRow[width - 1];
    }

    // Dantzig rule with a permanent switch to Bland's rule once the objective
    // stalls, which guarantees termination on degenerate problems.
    bool pivotLoop(std::vector<double>& costRow, double& obj, bool phase1,
                   bool* unbounded = nullptr) {
        const std::size_t m = tableau_.size();
        const long stallLimit = 2 * static_cast<long>(m + width_) + 64;
        const long iterLimit = 200000;
        bool bland = false;
        long stall = 0;
        double lastObj = obj;
        for (long iter = 0; iter < iterLimit; ++iter) {
            (void)phase1;
            int enter = -1;
            const int searchEnd = firstArtificial_;  // artificials never re-enter
            if (bland) {
                for (int j = 0; j < searchEnd; ++j) {
                    if (costRow[j] < -kPivotTol) {
                        enter = j;
                        break;
                    }
                }
            } else {
                double best = -kPivotTol;
                for (int j = 0; j < searchEnd; ++j) {
                    if (costRow[j] < best) {
                        best = costRow[j];
                        enter = j;
                    }
                }
            }
            if (enter < 0) return true;  // optimal for this phase
            // ratio test
            std::size_t leave = m;
            double bestRatio = 0;
            for (std::size_t i = 0; i < m; ++i) {
                double a = tableau_[i][enter];
                if (a > kPivotTol) {
                    double ratio = tableau_[i][width_ - 1] / a;
                    if (leave == m || ratio < bestRatio - 1e-12) {
                        leave = i;
                        bestRatio = ratio;
                    }
                }
            }
            if (leave == m) {
                if (phase1) return false;  // phase-1 objective is bounded below
                if (unbounded) *unbounded = true;
                return true;
            }
            double f = costRow[enter];
            pivot(leave, enter);
            eliminate(costRow, obj, tableau_[leave], f, width_);
            if (obj < lastObj - 1e-12) {
                lastObj = obj;
                stall = 0;
            } else if (++stall > stallLimit) {
                bland = true;
            }
        }
        return false;
    }
};

inline LpResult solveRelaxation(const FlatModel& model, const std::vector<double>& lb,
                                const std::vector<double>& ub) {
    SimplexSolver solver;
    return solver.solve(model, lb, ub);
}

inline bool rowSatisfied(const FlatRow& row, const std::vector<double>& x, double tol) {
    double activity = 0;
    for (const auto& [j, c] : row.coefs) activity += c * x[j];
    double slackTol = tol * (1.0 + std::abs(row.rhs));
    switch (row.rel) {
        case RowRel::Le: return activity <= row.rhs + slackTol;
        case RowRel::Ge: return activity >= row.rhs - slackTol;
        case RowRel::Eq: return std::abs(activity - row.rhs) <= slackTol;
    }
    return false;
}

inline bool pointFeasible(const FlatModel& model, const std::vector<double>& x, double tol) {
    for (std::size_t j = 0; j < model.variables.size(); ++j) {
        const FlatVar& v = model.variables[j];
        if (x[j] < v.lb - tol * (1.0 + std::abs(v.lb))) return false;
        if (x[j] > v.ub + tol * (1.0 + std::abs(v.ub))) return false;
    }
    for (const auto& row : model.rows) {
        if (!rowSatisfied(row, x, tol)) return false;
    }
    return true;
}

inline Solution finishLp(const FlatModel& model, const LpResult& lp, const SolveOptions& opts) {
    Solution sol;
    switch (lp.status) {
        case LpStatus::Infeasible: sol.status = Solution::Status::Infeasible; return sol;
        case LpStatus::Unbounded: sol.status = Solution::Status::Unbounded; return sol;
        case LpStatus::NumericalFailure:
            sol.status = Solution::Status::NumericalFailure;
            return sol;
        case LpStatus::Optimal: break;
    }
    // Tolerate mild tableau roundoff but refuse to report a materially
    // infeasible point as optimal.
    if (!pointFeasible(model, lp.x, std::max(opts.feasibilityTolerance, 1e-7))) {
        sol.status = Solution::Status::NumericalFailure;
        return sol;
    }
    sol.status = Solution::Status::Optimal;
    sol.objectiveValue = lp.objective;
    for (std::size_t j = 0; j < model.variables.size(); ++j) {
        sol.assignment[model.variables[j].display] = lp.x[j];
    }
    return sol;
}

}  // namespace detail

// LP via the embedded two-phase simplex.
inline Solution solveLp(const FlatModel& model, const SolveOptions& opts = {}) {
    opts.validate();
    std::vector<double> lb, ub;
    for (const auto& v : model.variables) {
        lb.push_back(v.lb);
        ub.push_back(v.ub);
    }
    detail::LpResult lp = detail::solveRelaxation(model, lb, ub);
    return detail::finishLp(model, lp, opts);
}

// Best-first branch and bound; branches on the most fractional variable with
// lowest-index tie-breaks for determinism.
inline Solution solveMilp(const FlatModel& model, const SolveOptions& opts = {}) {
    opts.validate();
    std::vector<int> intVars;
    for (std::size_t j = 0; j < model.variables.size(); ++j) {
        if (model.variables[j].domain != VarDomain::Continuous) {
            intVars.push_back(static_cast<int>(j));
        }
    }
    if (intVars.empty()) return solveLp(model, opts);

    const bool maximize = model.sense == Sense::Maximize;
    auto betterThan = [&](double a, double b) { return maximize ? a > b : a < b; };

    struct Node {
        std::vector<double> lb, ub;
        double bound;
        long id;
    };
    auto worse = [&](const Node& a, const Node& b) {
        if (a.bound != b.bound) return maximize ? a.bound < b.bound : a.bound > b.bound;
        return a.id > b.id;
    };
    std::priority_queue<Node, std::vector<Node>, decltype(worse)> queue(worse);

    Node root;
    for (const auto& v : model.variables) {
        root.lb.push_back(v.lb);
        root.ub.push_back(v.ub);
    }
    root.id = 0;

    Solution sol;
    const auto start = std::chrono::steady_clock::now();
    long nodes = 0;
    long nextId = 1;
    bool haveIncumbent = false;
    bool numericalTrouble = false;
    double incumbentValue = 0;
    std::vector<double> incumbentX;
    bool budgetHit = false;

    auto prunedByBound = [&](double bound) {
        if (!haveIncumbent) return false;
        return maximize ? bound <= incumbentValue + 1e-9 : bound >= incumbentValue - 1e-9;
    };

    detail::LpResult rootLp = detail::solveRelaxation(model, root.lb, root.ub);
    if (rootLp.status == detail::LpStatus::Unbounded) {
        sol.status = Solution::Status::Unbounded;
        return sol;
    }
    if (rootLp.status == detail::LpStatus::Infeasible) {
        sol.status = Solution::Status::Infeasible;
        return sol;
    }
    if (rootLp.status == detail::LpStatus::NumericalFailure) {
        sol.status = Solution::Status::NumericalFailure;
        return sol;
    }
    root.bound = rootLp.objective;

    // process(node LP result, node) -> optionally enqueue children
    auto process = [&](const detail::LpResult& lp, const Node& node) {
        if (lp.status == detail::LpStatus::NumericalFailure) {
            numericalTrouble = true;
            return;
        }
        if (lp.status != detail::LpStatus::Optimal) return;
        if (prunedByBound(lp.objective)) return;
        int branchVar = -1;
        double branchFrac = -1;
        double branchValue = 0;
        for (int j : intVars) {
            double v = lp.x[j];
            double frac = std::abs(v - std::llround(v));
            if (frac > opts.integralityTolerance) {
                double score = std::min(v - std::floor(v), std::ceil(v) - v);
                if (score > branchFrac + 1e-12) {
                    branchFrac = score;
                    branchVar = j;
                    branchValue = v;
                }
            }
        }
        if (branchVar < 0) {
            // Integral: round and recompute the objective exactly.
            std::vector<double> x = lp.x;
            for (int j : intVars) x[j] = std::llround(x[j]);
            if (!detail::pointFeasible(model, x, std::max(opts.feasibilityTolerance, 1e-7))) {
                return;
            }
            double value = model.objectiveConstant;
            for (const auto& [j, c] : model.objectiveCoefs) value += c * x[j];
            if (!haveIncumbent || betterThan(value, incumbentValue)) {
                haveIncumbent = true;
                incumbentValue = value;
                incumbentX = std::move(x);
            }
            return;
        }
        Node down = node, up = node;
        down.ub[branchVar] = std::floor(branchValue);
        down.bound = lp.objective;
        down.id = nextId++;
        up.lb[branchVar] = std::ceil(branchValue);
        up.bound = lp.objective;
        up.id = nextId++;
        queue.push(std::move(down));
        queue.push(std::move(up));
    };

    process(rootLp, root);
    ++nodes;

    while (!queue.empty()) {
        if (nodes >= opts.nodeLimit) {
            budgetHit = true;
            break;
        }
        auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
        if (elapsed.count() > opts.timeLimitSeconds) {
            budgetHit = true;
            break;
        }
        Node node = queue.top();
        queue.pop();
        if (prunedByBound(node.bound)) continue;
        detail::LpResult lp = detail::solveRelaxation(model, node.lb, node.ub);
        ++nodes;
        process(lp, node);
    }

    sol.nodesExplored = nodes;
    if (numericalTrouble && !budgetHit) {
        sol.status = Solution::Status::NumericalFailure;
        return sol;
    }
    if (budgetHit) {
        sol.status = Solution::Status::NodeLimit;
        if (haveIncumbent) {
            sol.incumbentObjective = incumbentValue;
            for (std::size_t j = 0; j < model.variables.size(); ++j) {
                sol.assignment[model.variables[j].display] = incumbentX[j];
            }
        }
        return sol;
    }
    if (!haveIncumbent) {
        sol.status = Solution::Status::Infeasible;
        return sol;
    }
    sol.status = Solution::Status::Optimal;
    sol.objectiveValue = incumbentValue;
    for (std::size_t j = 0; j < model.variables.size(); ++j) {
        sol.assignment[model.variables[j].display] = incumbentX[j];
    }
    return sol;
}

// Solves with branch and bound when integer variables are present, plain LP
// otherwise.
inline Solution solve(const FlatModel& model, const SolveOptions& opts = {}) {
    return solveMilp(model, opts);
}

}  // namespace pyopl
