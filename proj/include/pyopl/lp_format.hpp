#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pyopl/instantiate.hpp"
#include "pyopl/printer.hpp"

namespace pyopl {

namespace detail {

// LP-format identifiers: letters, digits, and a safe punctuation subset.
// Source-level names like x[A1][A2] become x(A1,A2).
inline std::string lpSanitize(const std::string& s) {
    std::string out;
    for (char c : s) {
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
                  c == '(' || c == ')' || c == ',';
        out += ok ? c : '_';
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.') {
        out = "n" + out;
    }
    return out;
}

inline std::string lpName(const std::string& base, const std::vector<IndexValue>& indices) {
    std::string out = base;
    if (!indices.empty()) {
        out += "(";
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (i) out += ",";
            std::string part = indexValueText(indices[i]);
            std::string cleaned;
            for (char c : part) {
                cleaned += std::isalnum(static_cast<unsigned char>(c)) || c == '_' ? c : '_';
            }
            out += cleaned;
        }
        out += ")";
    }
    return lpSanitize(out);
}

class LpNamePool {
public:
    std::string add(const std::string& base, const std::vector<IndexValue>& indices) {
        std::string name = lpName(base, indices);
        auto [it, inserted] = used_.emplace(name, 0);
        if (!inserted) {
            name += "_" + std::to_string(++it->second);
        }
        return name;
    }

private:
    std::map<std::string, int> used_;
};

inline std::string lpNum(double v) {
    if (v == static_cast<long long>(v) && std::abs(v) < 9.0e15) {
        return std::to_string(static_cast<long long>(v));
    }
    return formatNumber(v, false);
}

inline void writeTerm(std::ostringstream& os, bool first, double coef, const std::string& name) {
    if (first) {
        os << (coef < 0 ? " - " : " ");
    } else {
        os << (coef < 0 ? " - " : " + ");
    }
    double mag = std::abs(coef);
    if (mag != 1.0) os << lpNum(mag) << " ";
    os << name;
}

}  // namespace detail

// Human-facing numeric rendering: integers without a decimal point.
inline std::string formatValue(double v) { return detail::lpNum(v); }

// CPLEX-style LP text: Minimize/Maximize, Subject To, Bounds, Generals,
// Binaries, End. Row names come from the flat constraint labels.
inline std::string exportLpFormat(const FlatModel& model) {
    detail::LpNamePool pool;
    std::vector<std::string> varNames;
    varNames.reserve(model.variables.size());
    for (const auto& v : model.variables) varNames.push_back(pool.add(v.base, v.indices));

    std::ostringstream os;
    os << (model.sense == Sense::Minimize ? "Minimize" : "Maximize") << "\n";
    os << " obj:";
    {
        bool first = true;
        for (const auto& [j, c] : model.objectiveCoefs) {
            if (c == 0.0) continue;
            detail::writeTerm(os, first, c, varNames[j]);
            first = false;
        }
        double k = model.objectiveConstant;
        if (k != 0.0 || first) {
            if (first) {
                os << " " << detail::lpNum(k);
            } else {
                os << (k < 0 ? " - " : " + ") << detail::lpNum(std::abs(k));
            }
        }
        os << "\n";
    }

    os << "Subject To\n";
    for (const auto& row : model.rows) {
        std::string name = pool.add(row.base, row.indices);
        os << " " << name << ":";
        bool first = true;
        for (const auto& [j, c] : row.coefs) {
            if (c == 0.0) continue;
            detail::writeTerm(os, first, c, varNames[j]);
            first = false;
        }
        if (first) os << " 0 " << (varNames.empty() ? "x" : varNames[0]);
        const char* rel = row.rel == RowRel::Le ? "<=" : row.rel == RowRel::Ge ? ">=" : "=";
        os << " " << rel << " " << detail::lpNum(row.rhs) << "\n";
    }

    os << "Bounds\n";
    for (std::size_t j = 0; j < model.variables.size(); ++j) {
        const FlatVar& v = model.variables[j];
        if (v.domain == VarDomain::Binary) continue;  // implied 0..1
        bool lbInf = v.lb <= -kInf, ubInf = v.ub >= kInf;
        if (lbInf && ubInf) {
            os << " " << varNames[j] << " free\n";
        } else if (lbInf) {
            os << " -infinity <= " << varNames[j] << " <= " << detail::lpNum(v.ub)
               << "\n";
        } else if (ubInf) {
            if (v.lb != 0.0) {
                os << " " << varNames[j] << " >= " << detail::lpNum(v.lb) << "\n";
            }
        } else {
            os << " " << detail::lpNum(v.lb) << " <= " << varNames[j]
               << " <= " << detail::lpNum(v.ub) << "\n";
        }
    }

    std::vector<std::string> generals, binaries;
    for (std::size_t j = 0; j < model.variables.size(); ++j) {
        if (model.variables[j].domain == VarDomain::Integer) generals.push_back(varNames[j]);
        if (model.variables[j].domain == VarDomain::Binary) binaries.push_back(varNames[j]);
    }
    if (!generals.empty()) {
        os << "Generals\n";
        for (const auto& n : generals) os << " " << n << "\n";
    }
    if (!binaries.empty()) {
        os << "Binaries\n";
        for (const auto& n : binaries) os << " " << n << "\n";
    }
    os << "End\n";
    return os.str();
}

}  // namespace pyopl
