#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pyopl/semantics.hpp"

namespace pyopl {

// Concrete index value: a range element or a set element key. Tuple elements
// are carried by their canonical "<a,b>" rendering.
using IndexValue = std::variant<long long, std::string>;

inline std::string indexValueText(const IndexValue& v) {
    if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
    return std::get<std::string>(v);
}

inline bool operator==(const IndexValue& a, const IndexValue& b) {
    return indexValueText(a) == indexValueText(b);
}

struct RealizedDomain {
    bool fromRange = false;
    long long lo = 0, hi = -1;  // valid when fromRange
    std::vector<IndexValue> elements;
};

struct NdArray {
    std::vector<std::size_t> extents;
    std::vector<double> numeric;
    std::vector<std::string> strings;
    bool isString = false;

    std::size_t flatSize() const {
        std::size_t n = 1;
        for (std::size_t e : extents) n *= e;
        return n;
    }
};

// Fully bound instance data: every model parameter has exactly one value and
// every index domain is realized as an ordered element list.
struct DataEnvironment {
    std::map<std::string, double> numericScalars;  // int/float/boolean (0/1)
    std::map<std::string, std::string> stringScalars;
    std::map<std::string, NdArray> arrays;
    std::map<std::string, RealizedDomain> domains;
};

struct BindResult {
    std::optional<DataEnvironment> env;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return env.has_value(); }
};

// ---------------------------------------------------------------------------
// Flat model

enum class VarDomain { Continuous, Integer, Binary };
enum class RowRel { Le, Ge, Eq };

constexpr double kInf = 1e30;

struct FlatVar {
    std::string display;  // x[1][2] or t[A1]
    VarDomain domain = VarDomain::Continuous;
    double lb = -kInf, ub = kInf;
    std::string base;
    std::vector<IndexValue> indices;
    Span span;
};

struct FlatRow {
    std::string display;  // separation[A1][A2]
    std::map<int, double> coefs;
    RowRel rel = RowRel::Le;
    double rhs = 0;
    std::string base;
    std::vector<IndexValue> indices;
    Span span;
};

struct FlatModel {
    Sense sense = Sense::Minimize;
    std::map<int, double> objectiveCoefs;
    double objectiveConstant = 0;
    std::vector<FlatVar> variables;
    std::vector<FlatRow> rows;
};

// Invertible mapping between flat positions and source-level names.
struct NameMap {
    std::map<std::string, int> varByDisplay;
    std::map<std::string, int> rowByDisplay;

    int varIndexOf(const std::string& display) const {
        auto it = varByDisplay.find(display);
        return it == varByDisplay.end() ? -1 : it->second;
    }
    int rowIndexOf(const std::string& display) const {
        auto it = rowByDisplay.find(display);
        return it == rowByDisplay.end() ? -1 : it->second;
    }
};

struct ExpandResult {
    std::optional<FlatModel> flat;
    NameMap names;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return flat.has_value(); }
};

namespace detail {

struct EvalError {
    Diagnostic diag;
};

[[noreturn]] inline void evalFail(std::string_view code, const Span& span, std::string message,
                                  std::string remedy = {}) {
    throw EvalError{makeDiagnostic(code, span, std::move(message), std::move(remedy))};
}

inline std::string flatDisplay(const std::string& base, const std::vector<IndexValue>& idx) {
    std::string out = base;
    for (const auto& v : idx) out += "[" + indexValueText(v) + "]";
    return out;
}

inline IndexValue literalToIndexValue(const DataLiteral& lit) {
    switch (lit.kind) {
        case DataLiteral::Kind::Number:
            return static_cast<long long>(std::llround(lit.numberValue));
        case DataLiteral::Kind::String: return lit.text;
        case DataLiteral::Kind::Bool: return std::string(lit.boolValue ? "true" : "false");
        case DataLiteral::Kind::Tuple: {
            std::string key = "<";
            for (std::size_t i = 0; i < lit.elements.size(); ++i) {
                if (i) key += ",";
                key += indexValueText(literalToIndexValue(lit.elements[i]));
            }
            return key + ">";
        }
        default: return std::string("?");
    }
}

// Shared scalar/linear evaluation used by bindData and expand.
class Evaluator {
public:
    Evaluator(const SymbolTable& symbols, DataEnvironment& env)
        : symbols_(symbols), env_(env) {}

    using Scope = std::map<std::string, IndexValue>;
    using Scalar = std::variant<double, std::string>;

    double evalNumeric(const ExprPtr& e, const Scope& scope) {
        Scalar v = evalScalar(e, scope);
        if (const auto* d = std::get_if<double>(&v)) return *d;
        evalFail(codes::SemTypeMismatch, e->span,
                 "Type mismatch: expected a numeric value, got a string.");
    }

    long long evalInt(const ExprPtr& e, const Scope& scope) {
        double v = evalNumeric(e, scope);
        if (std::abs(v - std::llround(v)) > 1e-9) {
            evalFail(codes::SemRangeNonInt, e->span, "Range bounds must be integer-valued.");
        }
        return std::llround(v);
    }

    Scalar evalScalar(const ExprPtr& e, const Scope& scope) {
        switch (e->kind) {
            case Expression::Kind::NumberLit: return e->numberValue;
            case Expression::Kind::StringLit: return e->text;
            case Expression::Kind::BoolLit: return e->boolValue ? 1.0 : 0.0;
            case Expression::Kind::Paren: return evalScalar(e->children[0], scope);
            case Expression::Kind::Unary: return -evalNumeric(e->children[0], scope);
            case Expression::Kind::Ident: {
                auto it = scope.find(e->text);
                if (it != scope.end()) {
                    if (const auto* i = std::get_if<long long>(&it->second)) {
                        return static_cast<double>(*i);
                    }
                    return std::get<std::string>(it->second);
                }
                if (auto num = env_.numericScalars.find(e->text);
                    num != env_.numericScalars.end()) {
                    return num->second;
                }
                if (auto str = env_.stringScalars.find(e->text);
                    str != env_.stringScalars.end()) {
                    return str->second;
                }
                evalFail(codes::SemTypeMismatch, e->span,
                         "Type mismatch: '" + e->text + "' has no value at this point.",
                         "Define it from data or earlier in the model.");
            }
            case Expression::Kind::Index: {
                const NdArray& arr = lookupArray(e);
                std::size_t offset = flatOffset(e, arr, scope);
                if (arr.isString) return arr.strings[offset];
                return arr.numeric[offset];
            }
            case Expression::Kind::Binary: {
                double l = evalNumeric(e->children[0], scope);
                double r = evalNumeric(e->children[1], scope);
                return applyOp(e, l, r);
            }
            case Expression::Kind::Sum: {
                double total = 0;
                iterate(e->iterators, scope, [&](const Scope& inner) {
                    total += evalNumeric(e->children[0], inner);
                });
                return total;
            }
            default:
                evalFail(codes::SemTypeMismatch, e->span,
                         "Type mismatch: expected a scalar expression.");
        }
    }

    double applyOp(const ExprPtr& e, double l, double r) {
        switch (e->op) {
            case '+': return l + r;
            case '-': return l - r;
            case '*': return l * r;
            default:
                if (r == 0.0) {
                    evalFail(codes::SemDivByZero, e->span, "Division by constant zero.");
                }
                return l / r;
        }
    }

    std::vector<IndexValue> realizeDomainRef(const DomainRef& d, const Scope& scope) {
        if (d.kind == DomainRef::Kind::InlineRange) {
            long long lo = evalInt(d.lo, scope);
            long long hi = evalInt(d.hi, scope);
            std::vector<IndexValue> out;
            for (long long v = lo; v <= hi; ++v) out.emplace_back(v);
            return out;
        }
        auto it = env_.domains.find(d.name);
        if (it == env_.domains.end()) {
            evalFail(codes::SemTypeMismatch, d.span,
                     "Type mismatch: '" + d.name + "' is not a realized index domain.");
        }
        return it->second.elements;
    }

    template <typename Fn>
    void iterate(const IteratorList& list, const Scope& outer, Fn&& fn) {
        iterateFrom(list, 0, outer, fn);
    }

    bool evalCondition(const ExprPtr& cond, const Scope& scope) {
        Scalar l = evalScalar(cond->children[0], scope);
        Scalar r = evalScalar(cond->children[1], scope);
        int cmp;
        if (const auto* ld = std::get_if<double>(&l)) {
            double rd = std::get<double>(r);
            cmp = *ld < rd ? -1 : (*ld > rd ? 1 : 0);
        } else {
            const std::string& ls = std::get<std::string>(l);
            const std::string& rs = std::get<std::string>(r);
            cmp = ls < rs ? -1 : (ls > rs ? 1 : 0);
        }
        switch (cond->relations[0]) {
            case RelOp::Le: return cmp <= 0;
            case RelOp::Ge: return cmp >= 0;
            case RelOp::Eq: return cmp == 0;
            case RelOp::Lt: return cmp < 0;
            case RelOp::Gt: return cmp > 0;
            case RelOp::Ne: return cmp != 0;
        }
        return false;
    }

    const NdArray& lookupArray(const ExprPtr& indexExpr) {
        auto it = env_.arrays.find(indexExpr->text);
        if (it == env_.arrays.end()) {
            evalFail(codes::SemTypeMismatch, indexExpr->span,
                     "Type mismatch: '" + indexExpr->text + "' has no bound array value.");
        }
        return it->second;
    }

    // Maps concrete index values to a row-major offset, enforcing domain
    // membership.
    std::size_t flatOffset(const ExprPtr& indexExpr, const NdArray& arr, const Scope& scope) {
        const SymbolInfo& info = symbols_.at(indexExpr->text);
        std::size_t offset = 0;
        for (std::size_t k = 0; k < info.dims.size(); ++k) {
            std::size_t pos = dimPosition(indexExpr, info.dims[k], indexExpr->children[k],
                                          scope, indexExpr->text);
            offset = offset * arr.extents[k] + pos;
        }
        return offset;
    }

    std::size_t dimPosition(const ExprPtr& owner, const DomainInfo& dim, const ExprPtr& idx,
                            const Scope& scope, const std::string& name) {
        (void)owner;
        if (dim.kind == DomainInfo::Kind::NamedSet) {
            IndexValue want = scalarToIndexValue(evalScalar(idx, scope));
            const RealizedDomain& dom = env_.domains.at(dim.name);
            for (std::size_t i = 0; i < dom.elements.size(); ++i) {
                if (dom.elements[i] == want) return i;
            }
            evalFail(codes::SemSetKeyUnknown, idx->span,
                     "Value " + indexValueText(want) + " is not an element of set '" +
                         dim.name + "'.");
        }
        long long lo, hi;
        if (dim.kind == DomainInfo::Kind::NamedRange) {
            const RealizedDomain& dom = env_.domains.at(dim.name);
            lo = dom.lo;
            hi = dom.hi;
        } else {
            lo = evalInt(dim.lo, scope);
            hi = evalInt(dim.hi, scope);
        }
        double raw = evalNumeric(idx, scope);
        if (std::abs(raw - std::llround(raw)) > 1e-9) {
            evalFail(codes::SemIndexType, idx->span,
                     "Index 1 of '" + name + "' must be int, got float.");
        }
        long long v = std::llround(raw);
        if (v < lo || v > hi) {
            evalFail(codes::SemIndexOutOfRange, idx->span,
                     "Index " + std::to_string(v) + " is outside the declared domain of '" +
                         name + "' (" + std::to_string(lo) + ".." + std::to_string(hi) + ").");
        }
        return static_cast<std::size_t>(v - lo);
    }

    static IndexValue scalarToIndexValue(const Scalar& s) {
        if (const auto* d = std::get_if<double>(&s)) return std::llround(*d);
        return std::get<std::string>(s);
    }

private:
    const SymbolTable& symbols_;
    DataEnvironment& env_;

    template <typename Fn>
    void iterateFrom(const IteratorList& list, std::size_t k, const Scope& scope, Fn& fn) {
        if (k == list.iterators.size()) {
            if (list.filter && !evalCondition(list.filter, scope)) return;
            fn(scope);
            return;
        }
        const Iterator& it = list.iterators[k];
        for (const IndexValue& v : realizeDomainRef(it.domain, scope)) {
            Scope inner = scope;
            inner[it.name] = v;
            iterateFrom(list, k + 1, inner, fn);
        }
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// bindData

inline BindResult bindData(const TypedModel& typed, const DataAst& data) {
    BindResult result;
    DataEnvironment env;
    std::vector<Diagnostic>& diags = result.diagnostics;
    detail::Evaluator eval(typed.symbols, env);
    const detail::Evaluator::Scope empty;

    std::map<std::string, const DataLiteral*> assigned;
    for (const auto& a : data.assignments) assigned[a.name] = &a.value;

    // Scalars straight from data.
    for (const auto& decl : typed.model.declarations) {
        const auto* p = std::get_if<ParamDecl>(&decl);
        if (!p || !p->dims.empty() || p->init) continue;
        auto it = assigned.find(p->name);
        if (it == assigned.end()) continue;  // analyze reported SEM-MISSING-DATA
        const DataLiteral& lit = *it->second;
        if (p->elemType == ScalarType::String) {
            env.stringScalars[p->name] = lit.text;
        } else if (p->elemType == ScalarType::Bool) {
            env.numericScalars[p->name] = lit.boolValue ? 1.0 : 0.0;
        } else {
            env.numericScalars[p->name] = lit.numberValue;
        }
    }

    // Initializers, ranges, and sets in declaration order.
    for (const auto& decl : typed.model.declarations) {
        try {
            if (const auto* p = std::get_if<ParamDecl>(&decl)) {
                if (!p->init || !p->dims.empty()) continue;
                if (p->elemType == ScalarType::String) {
                    auto v = eval.evalScalar(p->init, empty);
                    env.stringScalars[p->name] = std::get<std::string>(v);
                } else {
                    env.numericScalars[p->name] = eval.evalNumeric(p->init, empty);
                }
            } else if (const auto* r = std::get_if<RangeDecl>(&decl)) {
                RealizedDomain dom;
                dom.fromRange = true;
                dom.lo = eval.evalInt(r->lo, empty);
                dom.hi = eval.evalInt(r->hi, empty);
                for (long long v = dom.lo; v <= dom.hi; ++v) dom.elements.emplace_back(v);
                env.domains[r->name] = std::move(dom);
            } else if (const auto* s = std::get_if<SetDecl>(&decl)) {
                const DataLiteral* lit = nullptr;
                if (s->init) {
                    lit = &*s->init;
                } else if (auto it = assigned.find(s->name); it != assigned.end()) {
                    lit = it->second;
                }
                if (!lit || lit->kind != DataLiteral::Kind::Set) continue;
                RealizedDomain dom;
                for (const auto& e : lit->elements) {
                    dom.elements.push_back(detail::literalToIndexValue(e));
                }
                env.domains[s->name] = std::move(dom);
            }
        } catch (const detail::EvalError& e) {
            diags.push_back(e.diag);
        }
    }

    // Arrays: extents come from the realized index domains.
    for (const auto& decl : typed.model.declarations) {
        const auto* p = std::get_if<ParamDecl>(&decl);
        if (!p || p->dims.empty()) continue;
        auto it = assigned.find(p->name);
        if (it == assigned.end()) continue;
        const DataLiteral& lit = *it->second;
        if (lit.kind != DataLiteral::Kind::Array) continue;  // analyze reported it
        const SymbolInfo& info = typed.symbols.at(p->name);
        try {
            NdArray arr;
            arr.isString = p->elemType == ScalarType::String;
            for (const auto& dim : info.dims) {
                if (dim.kind == DomainInfo::Kind::InlineRange) {
                    long long lo = eval.evalInt(dim.lo, empty);
                    long long hi = eval.evalInt(dim.hi, empty);
                    arr.extents.push_back(static_cast<std::size_t>(std::max<long long>(0, hi - lo + 1)));
                } else {
                    auto dom = env.domains.find(dim.name);
                    if (dom == env.domains.end()) {
                        detail::evalFail(codes::SemTypeMismatch, p->span,
                                         "Type mismatch: index domain '" + dim.name +
                                             "' of '" + p->name + "' has no value.");
                    }
                    arr.extents.push_back(dom->second.elements.size());
                }
            }
            // check extents level by level, then flatten row-major
            std::vector<const DataLiteral*> level = {&lit};
            for (std::size_t k = 0; k < arr.extents.size(); ++k) {
                std::vector<const DataLiteral*> next;
                for (const DataLiteral* node : level) {
                    if (node->elements.size() != arr.extents[k]) {
                        detail::evalFail(
                            codes::SemShapeMismatch, node->span,
                            "Array '" + p->name + "' expects extent " +
                                std::to_string(arr.extents[k]) + " along dimension " +
                                std::to_string(k + 1) + ", but data provides " +
                                std::to_string(node->elements.size()) + ".");
                    }
                    for (const auto& child : node->elements) next.push_back(&child);
                }
                level = std::move(next);
            }
            for (const DataLiteral* leaf : level) {
                if (arr.isString) {
                    arr.strings.push_back(leaf->text);
                } else if (leaf->kind == DataLiteral::Kind::Bool) {
                    arr.numeric.push_back(leaf->boolValue ? 1.0 : 0.0);
                } else {
                    arr.numeric.push_back(leaf->numberValue);
                }
            }
            env.arrays[p->name] = std::move(arr);
        } catch (const detail::EvalError& e) {
            diags.push_back(e.diag);
        }
    }

    sortByLine(diags);
    if (!hasErrors(diags)) result.env = std::move(env);
    return result;
}

// ---------------------------------------------------------------------------
// expand

namespace detail {

class Expander {
public:
    Expander(const TypedModel& typed, DataEnvironment& env)
        : typed_(typed), env_(env), eval_(typed.symbols, env) {}

    ExpandResult run() {
        ExpandResult result;
        buildVariables();
        buildObjective();
        buildConstraints();
        sortByLine(diags_);
        result.diagnostics = std::move(diags_);
        if (!hasErrors(result.diagnostics)) {
            result.flat = std::move(flat_);
            result.names = std::move(names_);
        }
        return result;
    }

private:
    const TypedModel& typed_;
    DataEnvironment& env_;
    Evaluator eval_;
    FlatModel flat_;
    NameMap names_;
    std::vector<Diagnostic> diags_;
    std::map<std::string, std::pair<int, std::vector<std::size_t>>> dvarLayout_;

    struct LinExpr {
        double constant = 0;
        std::map<int, double> coefs;
    };

    void buildVariables() {
        const Evaluator::Scope empty;
        for (const auto& decl : typed_.model.declarations) {
            const auto* v = std::get_if<DvarDecl>(&decl);
            if (!v) continue;
            const SymbolInfo& info = typed_.symbols.at(v->name);
            double lb, ub;
            VarDomain dom;
            try {
                defaultBounds(*v, empty, lb, ub, dom);
            } catch (const EvalError& e) {
                diags_.push_back(e.diag);
                continue;
            }
            std::vector<std::vector<IndexValue>> axes;
            bool failed = false;
            for (const auto& dim : info.dims) {
                try {
                    axes.push_back(realizeDomainInfo(dim));
                } catch (const EvalError& e) {
                    diags_.push_back(e.diag);
                    failed = true;
                    break;
                }
            }
            if (failed) continue;
            std::vector<std::size_t> extents;
            for (const auto& a : axes) extents.push_back(a.size());
            dvarLayout_[v->name] = {static_cast<int>(flat_.variables.size()), extents};
            std::vector<IndexValue> idx;
            emitVars(*v, axes, 0, idx, lb, ub, dom);
        }
    }

    void defaultBounds(const DvarDecl& v, const Evaluator::Scope& scope, double& lb,
                       double& ub, VarDomain& dom) {
        switch (v.domainType) {
            case ScalarType::Bool:
                dom = VarDomain::Binary;
                lb = 0;
                ub = 1;
                return;
            case ScalarType::Int: dom = VarDomain::Integer; break;
            default: dom = VarDomain::Continuous; break;
        }
        lb = v.nonNegative ? 0.0 : -kInf;
        ub = kInf;
        if (v.lowerBound) {
            lb = eval_.evalNumeric(v.lowerBound, scope);
            ub = eval_.evalNumeric(v.upperBound, scope);
            if (lb > ub) {
                evalFail(codes::SemBoundOrder, v.span,
                         "Lower bound exceeds upper bound for '" + v.name + "'.");
            }
        }
    }

    std::vector<IndexValue> realizeDomainInfo(const DomainInfo& dim) {
        const Evaluator::Scope empty;
        if (dim.kind == DomainInfo::Kind::InlineRange) {
            long long lo = eval_.evalInt(dim.lo, empty);
            long long hi = eval_.evalInt(dim.hi, empty);
            std::vector<IndexValue> out;
            for (long long v = lo; v <= hi; ++v) out.emplace_back(v);
            return out;
        }
        auto it = env_.domains.find(dim.name);
        if (it == env_.domains.end()) {
            evalFail(codes::SemTypeMismatch, Span{},
                     "Type mismatch: index domain '" + dim.name + "' has no value.");
        }
        return it->second.elements;
    }

    void emitVars(const DvarDecl& v, const std::vector<std::vector<IndexValue>>& axes,
                  std::size_t k, std::vector<IndexValue>& idx, double lb, double ub,
                  VarDomain dom) {
        if (k == axes.size()) {
            FlatVar var;
            var.base = v.name;
            var.indices = idx;
            var.display = flatDisplay(v.name, idx);
            var.domain = dom;
            var.lb = lb;
            var.ub = ub;
            var.span = v.span;
            names_.varByDisplay[var.display] = static_cast<int>(flat_.variables.size());
            flat_.variables.push_back(std::move(var));
            return;
        }
        for (const auto& val : axes[k]) {
            idx.push_back(val);
            emitVars(v, axes, k + 1, idx, lb, ub, dom);
            idx.pop_back();
        }
    }

    int flatVarIndex(const ExprPtr& indexExpr, const Evaluator::Scope& scope) {
        const SymbolInfo& info = typed_.symbols.at(indexExpr->text);
        const auto& [baseIndex, extents] = dvarLayout_.at(indexExpr->text);
        std::size_t offset = 0;
        for (std::size_t k = 0; k < info.dims.size(); ++k) {
            std::size_t pos = eval_.dimPosition(indexExpr, info.dims[k],
                                                indexExpr->children[k], scope,
                                                indexExpr->text);
            offset = offset * extents[k] + pos;
        }
        return baseIndex + static_cast<int>(offset);
    }

    LinExpr evalLinear(const ExprPtr& e, const Evaluator::Scope& scope) {
        switch (e->kind) {
            case Expression::Kind::Paren: return evalLinear(e->children[0], scope);
            case Expression::Kind::Unary: {
                LinExpr inner = evalLinear(e->children[0], scope);
                inner.constant = -inner.constant;
                for (auto& [i, c] : inner.coefs) c = -c;
                return inner;
            }
            case Expression::Kind::Ident: {
                if (isDvar(e->text) && !scope.count(e->text)) {
                    LinExpr out;
                    const auto& [baseIndex, extents] = dvarLayout_.at(e->text);
                    (void)extents;
                    out.coefs[baseIndex] = 1.0;
                    return out;
                }
                LinExpr out;
                out.constant = eval_.evalNumeric(e, scope);
                return out;
            }
            case Expression::Kind::Index: {
                if (isDvar(e->text)) {
                    LinExpr out;
                    out.coefs[flatVarIndex(e, scope)] = 1.0;
                    return out;
                }
                LinExpr out;
                out.constant = eval_.evalNumeric(e, scope);
                return out;
            }
            case Expression::Kind::Binary: {
                if (e->op == '+' || e->op == '-') {
                    LinExpr l = evalLinear(e->children[0], scope);
                    LinExpr r = evalLinear(e->children[1], scope);
                    double sign = e->op == '+' ? 1.0 : -1.0;
                    l.constant += sign * r.constant;
                    for (const auto& [i, c] : r.coefs) l.coefs[i] += sign * c;
                    return l;
                }
                LinExpr l = evalLinear(e->children[0], scope);
                LinExpr r = evalLinear(e->children[1], scope);
                if (e->op == '*') {
                    if (!l.coefs.empty() && !r.coefs.empty()) {
                        evalFail(codes::SemNonlinear, e->span,
                                 "Nonlinear term: product of decision-variable expressions "
                                 "is not supported.");
                    }
                    if (!l.coefs.empty()) std::swap(l, r);
                    // l is constant
                    r.constant *= l.constant;
                    for (auto& [i, c] : r.coefs) c *= l.constant;
                    return r;
                }
                // division
                if (!r.coefs.empty()) {
                    evalFail(codes::SemDvarDivisor, e->span,
                             "Division by a decision-variable expression is not supported.");
                }
                if (r.constant == 0.0) {
                    evalFail(codes::SemDivByZero, e->span, "Division by constant zero.");
                }
                l.constant /= r.constant;
                for (auto& [i, c] : l.coefs) c /= r.constant;
                return l;
            }
            case Expression::Kind::Sum: {
                LinExpr total;
                eval_.iterate(e->iterators, scope, [&](const Evaluator::Scope& inner) {
                    LinExpr body = evalLinear(e->children[0], inner);
                    total.constant += body.constant;
                    for (const auto& [i, c] : body.coefs) total.coefs[i] += c;
                });
                return total;
            }
            default: {
                LinExpr out;
                out.constant = eval_.evalNumeric(e, scope);
                return out;
            }
        }
    }

    bool isDvar(const std::string& name) const {
        auto it = typed_.symbols.find(name);
        return it != typed_.symbols.end() && it->second.kind == SymbolInfo::Kind::Dvar;
    }

    void checkFinite(const LinExpr& lin, const std::string& label, const Span& span) {
        bool bad = !std::isfinite(lin.constant);
        for (const auto& [i, c] : lin.coefs) bad = bad || !std::isfinite(c);
        if (bad) {
            evalFail(codes::SemNonFinite, span,
                     "Non-finite coefficient produced while evaluating '" + label + "'.");
        }
    }

    void buildObjective() {
        flat_.sense = typed_.model.objective.sense;
        const Evaluator::Scope empty;
        try {
            LinExpr lin = evalLinear(typed_.model.objective.expr, empty);
            const std::string label =
                typed_.model.objective.label.empty() ? "obj" : typed_.model.objective.label;
            checkFinite(lin, label, typed_.model.objective.span);
            flat_.objectiveCoefs = std::move(lin.coefs);
            flat_.objectiveConstant = lin.constant;
        } catch (const EvalError& e) {
            diags_.push_back(e.diag);
        }
    }

    void buildConstraints() {
        Evaluator::Scope scope;
        std::vector<IndexValue> indices;
        for (const auto& item : typed_.model.constraints) {
            expandItem(item, scope, indices);
        }
    }

    void expandItem(const ConstraintItem& item, const Evaluator::Scope& scope,
                    std::vector<IndexValue>& indices) {
        if (const auto* lc = std::get_if<LabelledConstraint>(&item.node)) {
            try {
                emitRow(*lc, scope, indices);
            } catch (const EvalError& e) {
                diags_.push_back(e.diag);
            }
            return;
        }
        const auto& fb = std::get<ForallBlock>(item.node);
        try {
            expandForall(fb, 0, scope, indices);
        } catch (const EvalError& e) {
            diags_.push_back(e.diag);
        }
    }

    void expandForall(const ForallBlock& fb, std::size_t k, const Evaluator::Scope& scope,
                      std::vector<IndexValue>& indices) {
        if (k == fb.iterators.iterators.size()) {
            if (fb.iterators.filter && !eval_.evalCondition(fb.iterators.filter, scope)) {
                return;
            }
            for (const auto& sub : fb.items) expandItem(sub, scope, indices);
            return;
        }
        const Iterator& it = fb.iterators.iterators[k];
        for (const IndexValue& v : eval_.realizeDomainRef(it.domain, scope)) {
            Evaluator::Scope inner = scope;
            inner[it.name] = v;
            indices.push_back(v);
            expandForall(fb, k + 1, inner, indices);
            indices.pop_back();
        }
    }

    void emitRow(const LabelledConstraint& lc, const Evaluator::Scope& scope,
                 const std::vector<IndexValue>& indices) {
        const ExprPtr& cmp = lc.constraint;
        LinExpr lhs = evalLinear(cmp->children[0], scope);
        LinExpr rhs = evalLinear(cmp->children[1], scope);
        FlatRow row;
        row.base = lc.label;
        row.indices = indices;
        row.display = flatDisplay(lc.label, indices);
        row.span = lc.span;
        switch (cmp->relations[0]) {
            case RelOp::Le: row.rel = RowRel::Le; break;
            case RelOp::Ge: row.rel = RowRel::Ge; break;
            default: row.rel = RowRel::Eq; break;
        }
        LinExpr diff;
        diff.constant = lhs.constant - rhs.constant;
        diff.coefs = std::move(lhs.coefs);
        for (const auto& [i, c] : rhs.coefs) diff.coefs[i] -= c;
        for (auto it = diff.coefs.begin(); it != diff.coefs.end();) {
            it = it->second == 0.0 ? diff.coefs.erase(it) : std::next(it);
        }
        checkFinite(diff, row.display, lc.span);
        row.coefs = std::move(diff.coefs);
        row.rhs = -diff.constant;
        if (row.rhs == 0.0) row.rhs = 0.0;  // normalize -0
        names_.rowByDisplay[row.display] = static_cast<int>(flat_.rows.size());
        flat_.rows.push_back(std::move(row));
    }
};

}  // namespace detail

inline ExpandResult expand(const TypedModel& typed, DataEnvironment& env) {
    return detail::Expander(typed, env).run();
}

}  // namespace pyopl
