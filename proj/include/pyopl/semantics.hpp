#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pyopl/ast.hpp"
#include "pyopl/diagnostic.hpp"
#include "pyopl/printer.hpp"

namespace pyopl {

struct TypeRef {
    enum class Kind { Int, Float, Bool, String, Tuple };
    Kind kind = Kind::Float;
    std::string tupleName;

    bool numeric() const { return kind == Kind::Int || kind == Kind::Float; }

    std::string str() const {
        switch (kind) {
            case Kind::Int: return "int";
            case Kind::Float: return "float";
            case Kind::Bool: return "boolean";
            case Kind::String: return "string";
            case Kind::Tuple: return "tuple " + tupleName;
        }
        return "?";
    }

    bool operator==(const TypeRef&) const = default;

    static TypeRef ofScalar(ScalarType t) {
        switch (t) {
            case ScalarType::Int: return {Kind::Int, {}};
            case ScalarType::Float: return {Kind::Float, {}};
            case ScalarType::Bool: return {Kind::Bool, {}};
            case ScalarType::String: return {Kind::String, {}};
        }
        return {};
    }
};

// One dimension of an indexed parameter or decision variable.
struct DomainInfo {
    enum class Kind { NamedRange, NamedSet, InlineRange };
    Kind kind = Kind::InlineRange;
    std::string name;  // for named domains
    TypeRef elemType{TypeRef::Kind::Int, {}};
    ExprPtr lo, hi;  // for inline ranges
};

struct SymbolInfo {
    enum class Kind { Parameter, Range, Set, TupleType, Dvar };
    Kind kind = Kind::Parameter;
    ScalarType elemType = ScalarType::Float;
    bool tupleSet = false;
    std::string tupleTypeName;
    std::vector<DomainInfo> dims;
    bool nonNegative = false;
    ExprPtr init;
    ExprPtr lowerBound, upperBound;
    ExprPtr rangeLo, rangeHi;
    std::optional<DataLiteral> setInit;
    std::vector<std::pair<ScalarType, std::string>> tupleFields;
    Span declSpan;

    std::string kindName() const {
        switch (kind) {
            case Kind::Parameter: return "parameter";
            case Kind::Range: return "range";
            case Kind::Set: return "set";
            case Kind::TupleType: return "tuple type";
            case Kind::Dvar: return "decision variable";
        }
        return "?";
    }
};

using SymbolTable = std::map<std::string, SymbolInfo>;

// Exists only when analysis produced zero error diagnostics.
struct TypedModel {
    ModelAst model;
    DataAst data;
    SymbolTable symbols;
    std::map<const Expression*, TypeRef> exprTypes;
    std::map<const Expression*, bool> exprHasDvar;
};

struct AnalyzeResult {
    std::optional<TypedModel> typed;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return typed.has_value(); }
};

namespace detail {

class Analyzer {
public:
    Analyzer(const ModelAst& model, const DataAst& data) : model_(model), data_(data) {}

    AnalyzeResult run() {
        collectSymbols();
        validateDeclarations();
        checkData();
        checkObjective();
        checkConstraints();
        usageWarnings();

        sortByLine(diags_);
        AnalyzeResult result;
        result.diagnostics = std::move(diags_);
        if (!hasErrors(result.diagnostics)) {
            TypedModel typed;
            typed.model = model_;
            typed.data = data_;
            typed.symbols = std::move(symbols_);
            typed.exprTypes = std::move(types_);
            typed.exprHasDvar = std::move(hasDvar_);
            result.typed = std::move(typed);
        }
        return result;
    }

private:
    const ModelAst& model_;
    const DataAst& data_;
    SymbolTable symbols_;
    std::vector<Diagnostic> diags_;
    std::map<const Expression*, TypeRef> types_;
    std::map<const Expression*, bool> hasDvar_;
    std::vector<std::map<std::string, TypeRef>> scopes_;
    std::set<std::string> used_;

    void report(std::string_view code, const Span& span, std::string message,
                std::string remedy = {}) {
        diags_.push_back(makeDiagnostic(code, span, std::move(message), std::move(remedy)));
    }

    // ---- pass 1: symbol table ------------------------------------------

    void collectSymbols() {
        for (const auto& decl : model_.declarations) {
            const std::string& name = declarationName(decl);
            if (symbols_.count(name)) {
                report(codes::SemDuplicateDecl, declarationSpan(decl),
                       "Symbol '" + name + "' is declared more than once (first declaration "
                       "at line " + std::to_string(symbols_[name].declSpan.line) + ").");
                continue;
            }
            SymbolInfo info;
            info.declSpan = declarationSpan(decl);
            if (const auto* p = std::get_if<ParamDecl>(&decl)) {
                info.kind = SymbolInfo::Kind::Parameter;
                info.elemType = p->elemType;
                info.init = p->init;
            } else if (const auto* r = std::get_if<RangeDecl>(&decl)) {
                info.kind = SymbolInfo::Kind::Range;
                info.rangeLo = r->lo;
                info.rangeHi = r->hi;
            } else if (const auto* s = std::get_if<SetDecl>(&decl)) {
                info.kind = SymbolInfo::Kind::Set;
                info.tupleSet = s->tupleElem;
                info.tupleTypeName = s->tupleTypeName;
                info.elemType = s->elemType;
                info.setInit = s->init;
            } else if (const auto* t = std::get_if<TupleDecl>(&decl)) {
                info.kind = SymbolInfo::Kind::TupleType;
                info.tupleFields = t->fields;
            } else {
                const auto& v = std::get<DvarDecl>(decl);
                info.kind = SymbolInfo::Kind::Dvar;
                info.elemType = v.domainType;
                info.nonNegative = v.nonNegative;
                info.lowerBound = v.lowerBound;
                info.upperBound = v.upperBound;
            }
            symbols_.emplace(name, std::move(info));
        }
        // A range literal in the .dat for an undeclared name becomes a phantom
        // range symbol: SEM-RANGE-IN-DAT stays the single actionable error
        // instead of a cascade of undeclared-symbol reports.
        for (const auto& a : data_.assignments) {
            if (a.value.kind != DataLiteral::Kind::Range || symbols_.count(a.name)) continue;
            SymbolInfo info;
            info.kind = SymbolInfo::Kind::Range;
            info.declSpan = a.span;
            info.rangeLo = makeNumber(a.value.rangeLo, true, a.span);
            info.rangeHi = makeNumber(a.value.rangeHi, true, a.span);
            symbols_.emplace(a.name, std::move(info));
        }
    }

    TypeRef setElemTypeRef(const SymbolInfo& s) const {
        if (s.tupleSet) return TypeRef{TypeRef::Kind::Tuple, s.tupleTypeName};
        return TypeRef::ofScalar(s.elemType);
    }

    std::vector<DomainInfo> resolveDims(const std::vector<DomainRef>& dims,
                                        const std::string& owner) {
        std::vector<DomainInfo> out;
        for (const auto& d : dims) {
            DomainInfo info;
            if (d.kind == DomainRef::Kind::Named) {
                used_.insert(d.name);
                auto it = symbols_.find(d.name);
                if (it == symbols_.end()) {
                    report(codes::SemUndeclared, d.span, "Undeclared symbol '" + d.name + "'.",
                           "Declare '" + d.name + "' in the model file before using it.");
                    info.kind = DomainInfo::Kind::InlineRange;
                } else if (it->second.kind == SymbolInfo::Kind::Range) {
                    info.kind = DomainInfo::Kind::NamedRange;
                    info.name = d.name;
                } else if (it->second.kind == SymbolInfo::Kind::Set) {
                    info.kind = DomainInfo::Kind::NamedSet;
                    info.name = d.name;
                    info.elemType = setElemTypeRef(it->second);
                } else {
                    report(codes::SemTypeMismatch, d.span,
                           "Type mismatch: '" + d.name + "' is a " + it->second.kindName() +
                               " and cannot index '" + owner + "'.",
                           "Use a range or set as the index domain.");
                }
            } else {
                info.kind = DomainInfo::Kind::InlineRange;
                info.lo = d.lo;
                info.hi = d.hi;
                checkRangeBound(d.lo);
                checkRangeBound(d.hi);
            }
            out.push_back(std::move(info));
        }
        return out;
    }

    void checkRangeBound(const ExprPtr& bound) {
        auto [type, dvar] = analyzeExpr(bound);
        if (dvar) {
            report(codes::SemTypeMismatch, bound->span,
                   "Type mismatch: range bounds must not reference decision variables.");
            return;
        }
        if (type.kind == TypeRef::Kind::Int) return;
        if (type.kind == TypeRef::Kind::Float) {
            report(codes::SemRangeNonInt, bound->span, "Range bounds must be integer-valued.");
            return;
        }
        std::string name = bound->kind == Expression::Kind::Ident ? bound->text
                                                                  : printExpr(bound);
        report(codes::SemRangeBoundType, bound->span,
               "Range bound references '" + name + "' of type " + type.str() +
                   "; bounds must be integer scalars.");
    }

    // ---- pass 2: declaration internals ----------------------------------

    void validateDeclarations() {
        for (const auto& decl : model_.declarations) {
            if (const auto* p = std::get_if<ParamDecl>(&decl)) {
                auto& info = symbols_[p->name];
                info.dims = resolveDims(p->dims, p->name);
                if (p->init) {
                    if (!p->dims.empty()) {
                        report(codes::SemTypeMismatch, p->span,
                               "Type mismatch: array parameter '" + p->name +
                                   "' cannot take a scalar initializer.",
                               "Provide the array in the .dat file instead.");
                    } else {
                        checkInitializer(*p);
                    }
                }
            } else if (const auto* r = std::get_if<RangeDecl>(&decl)) {
                checkRangeBound(r->lo);
                checkRangeBound(r->hi);
                if (r->lo->kind == Expression::Kind::NumberLit &&
                    r->hi->kind == Expression::Kind::NumberLit &&
                    r->lo->numberValue > r->hi->numberValue) {
                    report(codes::SemRangeEmpty, r->span,
                           "Range '" + r->name + "' is empty (lower bound exceeds upper "
                           "bound).");
                }
            } else if (const auto* s = std::get_if<SetDecl>(&decl)) {
                if (s->tupleElem) {
                    used_.insert(s->tupleTypeName);
                    auto it = symbols_.find(s->tupleTypeName);
                    if (it == symbols_.end()) {
                        report(codes::SemUndeclared, s->span,
                               "Undeclared symbol '" + s->tupleTypeName + "'.",
                               "Declare the tuple type before the set that uses it.");
                    } else if (it->second.kind != SymbolInfo::Kind::TupleType) {
                        report(codes::SemTypeMismatch, s->span,
                               "Type mismatch: '" + s->tupleTypeName + "' is a " +
                                   it->second.kindName() + ", not a tuple type.");
                    }
                }
                if (s->init) validateSetLiteral(s->name, symbols_[s->name], *s->init);
            } else if (const auto* t = std::get_if<TupleDecl>(&decl)) {
                std::set<std::string> fieldNames;
                for (const auto& [ft, fn] : t->fields) {
                    (void)ft;
                    if (!fieldNames.insert(fn).second) {
                        report(codes::SemDuplicateDecl, t->span,
                               "Symbol '" + fn + "' is declared more than once (first "
                               "declaration at line " + std::to_string(t->span.line) + ").");
                    }
                }
            } else {
                const auto& v = std::get<DvarDecl>(decl);
                auto& info = symbols_[v.name];
                info.dims = resolveDims(v.dims, v.name);
                if (v.lowerBound) {
                    if (v.domainType == ScalarType::Bool) {
                        report(codes::SemBoolBounds, v.span,
                               "Bounds are not allowed on boolean decision variables.");
                    } else {
                        checkDvarBound(v.lowerBound);
                        checkDvarBound(v.upperBound);
                        if (v.lowerBound->kind == Expression::Kind::NumberLit &&
                            v.upperBound->kind == Expression::Kind::NumberLit &&
                            v.lowerBound->numberValue > v.upperBound->numberValue) {
                            report(codes::SemBoundOrder, v.span,
                                   "Lower bound exceeds upper bound for '" + v.name + "'.");
                        }
                    }
                }
            }
        }
    }

    void checkInitializer(const ParamDecl& p) {
        auto [type, dvar] = analyzeExpr(p.init);
        if (dvar) {
            report(codes::SemTypeMismatch, p.init->span,
                   "Type mismatch: initializer of '" + p.name +
                       "' must not reference decision variables.");
            return;
        }
        TypeRef expected = TypeRef::ofScalar(p.elemType);
        bool ok = type == expected ||
                  (expected.kind == TypeRef::Kind::Float && type.kind == TypeRef::Kind::Int);
        if (!ok) {
            report(codes::SemTypeMismatch, p.init->span,
                   "Type mismatch: initializer of '" + p.name + "' must be " + expected.str() +
                       ", got " + type.str() + ".");
        }
    }

    void checkDvarBound(const ExprPtr& bound) {
        auto [type, dvar] = analyzeExpr(bound);
        if (dvar) {
            report(codes::SemTypeMismatch, bound->span,
                   "Type mismatch: variable bounds must not reference decision variables.");
        } else if (!type.numeric()) {
            report(codes::SemTypeMismatch, bound->span,
                   "Type mismatch: variable bounds must be numeric, got " + type.str() + ".");
        }
    }

    void validateSetLiteral(const std::string& name, const SymbolInfo& info,
                            const DataLiteral& lit) {
        if (lit.kind != DataLiteral::Kind::Set) {
            report(codes::SemDataTypeMismatch, lit.span,
                   "Parameter '" + name + "' is declared a set, but the data literal is " +
                       lit.describe() + ".");
            return;
        }
        if (lit.elements.empty()) {
            report(codes::SemSetEmpty, lit.span, "Set '" + name + "' is empty.");
        }
        std::set<std::string> seen;
        for (const auto& e : lit.elements) {
            std::string key = printDataLiteral(e);
            if (info.tupleSet) {
                auto it = symbols_.find(info.tupleTypeName);
                if (it != symbols_.end() && it->second.kind == SymbolInfo::Kind::TupleType) {
                    validateTupleLiteral(info.tupleTypeName, it->second.tupleFields, e);
                }
            } else if (!scalarMatches(info.elemType, e)) {
                report(codes::SemSetElemType, e.span,
                       "Element " + key + " is not a valid " + to_string(info.elemType) +
                           " for set '" + name + "'.");
                continue;
            }
            if (!seen.insert(key).second) {
                report(codes::SemSetDuplicateElem, e.span,
                       "Duplicate element " + key + " in set '" + name + "'.");
            }
        }
    }

    void validateTupleLiteral(const std::string& typeName,
                              const std::vector<std::pair<ScalarType, std::string>>& fields,
                              const DataLiteral& lit) {
        if (lit.kind != DataLiteral::Kind::Tuple) {
            report(codes::SemDataTypeMismatch, lit.span,
                   "Parameter of tuple type '" + typeName + "' got " + lit.describe() + ".");
            return;
        }
        if (lit.elements.size() != fields.size()) {
            report(codes::SemTupleArity, lit.span,
                   "Tuple literal for type '" + typeName + "' has " +
                       std::to_string(lit.elements.size()) + " fields, expected " +
                       std::to_string(fields.size()) + ".");
            return;
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!scalarMatches(fields[i].first, lit.elements[i])) {
                report(codes::SemTupleFieldType, lit.elements[i].span,
                       "Field " + std::to_string(i + 1) + " of tuple type '" + typeName +
                           "' must be " + to_string(fields[i].first) + ", got " +
                           lit.elements[i].describe() + ".");
            }
        }
    }

    static bool scalarMatches(ScalarType expected, const DataLiteral& lit) {
        switch (expected) {
            case ScalarType::Int:
                return lit.kind == DataLiteral::Kind::Number && lit.isIntLiteral;
            case ScalarType::Float: return lit.kind == DataLiteral::Kind::Number;
            case ScalarType::Bool: return lit.kind == DataLiteral::Kind::Bool;
            case ScalarType::String: return lit.kind == DataLiteral::Kind::String;
        }
        return false;
    }

    // ---- pass 3: data-side checks ---------------------------------------

    void checkData() {
        std::set<std::string> assigned;
        for (const auto& a : data_.assignments) {
            assigned.insert(a.name);
            auto it = symbols_.find(a.name);
            if (it == symbols_.end()) {
                if (a.value.kind == DataLiteral::Kind::Range) {
                    reportRangeInDat(a);
                } else {
                    report(codes::SemExtraData, a.span,
                           "Data assignment '" + a.name + "' does not correspond to any "
                           "model parameter.");
                }
                continue;
            }
            const SymbolInfo& info = it->second;
            switch (info.kind) {
                case SymbolInfo::Kind::Range: reportRangeInDat(a); break;
                case SymbolInfo::Kind::Dvar:
                    report(codes::SemDataForDvar, a.span,
                           "Data assignment for decision variable '" + a.name +
                               "' is not allowed.");
                    break;
                case SymbolInfo::Kind::TupleType:
                    report(codes::SemExtraData, a.span,
                           "Data assignment '" + a.name + "' does not correspond to any "
                           "model parameter.");
                    break;
                case SymbolInfo::Kind::Set:
                    if (info.setInit) {
                        report(codes::SemParamInitAndData, a.span,
                               "Parameter '" + a.name + "' is initialized in the model and "
                               "assigned in the .dat file.");
                    } else if (a.value.kind == DataLiteral::Kind::Range) {
                        reportRangeInDat(a);
                    } else {
                        validateSetLiteral(a.name, info, a.value);
                    }
                    break;
                case SymbolInfo::Kind::Parameter: checkParamData(a, info); break;
            }
        }
        for (const auto& [name, info] : symbols_) {
            if (assigned.count(name)) continue;
            bool needsData =
                (info.kind == SymbolInfo::Kind::Parameter && !info.init) ||
                (info.kind == SymbolInfo::Kind::Set && !info.setInit);
            if (needsData) {
                report(codes::SemMissingData, info.declSpan,
                       "Parameter '" + name + "' has no assignment in the .dat file.",
                       "Add '" + name + " = ...;' to the data file.");
            }
        }
    }

    void reportRangeInDat(const Assignment& a) {
        report(codes::SemRangeInDat, a.span,
               "Range '" + a.name + "' was supplied in the data file, but ranges used for "
               "indexing must be declared with explicit bounds in the model file.",
               "Declare it in the model (e.g., 'range " + a.name +
                   " = 1..N;') and remove it from the .dat.");
    }

    void checkParamData(const Assignment& a, const SymbolInfo& info) {
        if (info.init) {
            report(codes::SemParamInitAndData, a.span,
                   "Parameter '" + a.name + "' is initialized in the model and assigned in "
                   "the .dat file.");
            return;
        }
        if (info.dims.empty()) {
            checkScalarData(a.name, info.elemType, a.value);
            return;
        }
        if (a.value.kind == DataLiteral::Kind::Tuple) {
            bool rangeIndexed = true;
            for (const auto& d : info.dims) {
                if (d.kind == DomainInfo::Kind::NamedSet) rangeIndexed = false;
            }
            if (rangeIndexed) {
                report(codes::SemListTupleIndex, a.span,
                       "List parameter '" + a.name + "' requires integer indices, got "
                       "tuple: " + renderTupleLiteral(a.value) + ".");
                return;
            }
        }
        if (a.value.kind != DataLiteral::Kind::Array) {
            report(codes::SemDataTypeMismatch, a.span,
                   "Parameter '" + a.name + "' is declared an indexed array, but the data "
                   "literal is " + a.value.describe() + ".");
            return;
        }
        if (checkArrayDepth(a.name, info, a.value)) {
            checkArrayLeaves(a.name, info.elemType, a.value, 0, info.dims.size());
            checkStaticExtents(a.name, info, a.value);
        }
    }

    void checkScalarData(const std::string& name, ScalarType expected, const DataLiteral& lit) {
        if (expected == ScalarType::Int && lit.kind == DataLiteral::Kind::Number &&
            !lit.isIntLiteral) {
            report(codes::SemDataNonInt, lit.span,
                   "Integer parameter '" + name + "' assigned non-integer value " +
                       formatNumber(lit.numberValue, false) + ".");
            return;
        }
        if (!scalarMatches(expected, lit)) {
            report(codes::SemDataTypeMismatch, lit.span,
                   "Parameter '" + name + "' is declared " + to_string(expected) +
                       ", but the data literal is " + lit.describe() + ".");
        }
    }

    // depth of nested arrays must equal the declared dimensionality
    bool checkArrayDepth(const std::string& name, const SymbolInfo& info,
                         const DataLiteral& lit) {
        std::size_t depth = 1;
        const DataLiteral* probe = &lit;
        while (!probe->elements.empty() &&
               probe->elements.front().kind == DataLiteral::Kind::Array) {
            ++depth;
            probe = &probe->elements.front();
        }
        if (depth != info.dims.size()) {
            report(codes::SemDimMismatch, lit.span,
                   "Array '" + name + "' is declared with " + std::to_string(info.dims.size()) +
                       " dimensions, but the data literal has " + std::to_string(depth) + ".");
            return false;
        }
        return true;
    }

    void checkArrayLeaves(const std::string& name, ScalarType expected, const DataLiteral& lit,
                          std::size_t level, std::size_t dims) {
        for (const auto& e : lit.elements) {
            if (level + 1 < dims) {
                if (e.kind == DataLiteral::Kind::Array) {
                    checkArrayLeaves(name, expected, e, level + 1, dims);
                }
                continue;
            }
            if (e.kind == DataLiteral::Kind::Array) continue;  // depth handled above
            if (expected == ScalarType::Int && e.kind == DataLiteral::Kind::Number &&
                !e.isIntLiteral) {
                report(codes::SemDataNonInt, e.span,
                       "Integer parameter '" + name + "' assigned non-integer value " +
                           formatNumber(e.numberValue, false) + ".");
                return;
            }
            if (!scalarMatches(expected, e)) {
                report(codes::SemDataTypeMismatch, e.span,
                       "Parameter '" + name + "' is declared " + to_string(expected) +
                           ", but the data literal is " + e.describe() + ".");
                return;
            }
        }
    }

    // Extent checks possible without data binding: literal range bounds.
    void checkStaticExtents(const std::string& name, const SymbolInfo& info,
                            const DataLiteral& lit) {
        const DataLiteral* level = &lit;
        for (std::size_t k = 0; k < info.dims.size(); ++k) {
            const DomainInfo& dim = info.dims[k];
            ExprPtr lo = dim.lo, hi = dim.hi;
            if (dim.kind == DomainInfo::Kind::NamedRange) {
                const auto& r = symbols_.at(dim.name);
                lo = r.rangeLo;
                hi = r.rangeHi;
            } else if (dim.kind == DomainInfo::Kind::NamedSet) {
                const auto& s = symbols_.at(dim.name);
                if (s.setInit && level->elements.size() != s.setInit->elements.size()) {
                    report(codes::SemShapeMismatch, level->span,
                           "Array '" + name + "' expects extent " +
                               std::to_string(s.setInit->elements.size()) +
                               " along dimension " + std::to_string(k + 1) +
                               ", but data provides " +
                               std::to_string(level->elements.size()) + ".");
                    return;
                }
                lo = hi = nullptr;
            }
            if (lo && hi && lo->kind == Expression::Kind::NumberLit &&
                hi->kind == Expression::Kind::NumberLit) {
                long long extent = static_cast<long long>(hi->numberValue) -
                                   static_cast<long long>(lo->numberValue) + 1;
                if (extent < 0) extent = 0;
                if (static_cast<long long>(level->elements.size()) != extent) {
                    report(codes::SemShapeMismatch, level->span,
                           "Array '" + name + "' expects extent " + std::to_string(extent) +
                               " along dimension " + std::to_string(k + 1) +
                               ", but data provides " +
                               std::to_string(level->elements.size()) + ".");
                    return;
                }
            }
            if (level->elements.empty()) return;
            level = &level->elements.front();
        }
    }

    // ---- passes 4 and 5: objective, constraints, usage -------------------

    void checkObjective() {
        const Objective& o = model_.objective;
        if (!o.expr) return;
        auto [type, dvar] = analyzeExpr(o.expr);
        (void)dvar;
        if (!type.numeric()) {
            report(codes::SemTypeMismatch, o.expr->span,
                   "Type mismatch: the objective must be a numeric expression, got " +
                       type.str() + ".");
        }
    }

    void checkConstraints() {
        std::set<std::string> labels;
        for (const auto& item : model_.constraints) checkItem(item, labels);
    }

    void checkItem(const ConstraintItem& item, std::set<std::string>& labels) {
        if (const auto* lc = std::get_if<LabelledConstraint>(&item.node)) {
            if (lc->label.empty()) {
                report(codes::SemUnlabelledConstraint, lc->span,
                       "Constraint is missing a label.");
            } else if (!labels.insert(lc->label).second) {
                report(codes::SemDuplicateLabel, lc->span,
                       "Constraint label '" + lc->label + "' is used more than once.");
            }
            checkConstraintExpr(*lc);
            return;
        }
        const auto& fb = std::get<ForallBlock>(item.node);
        std::size_t pushed = enterIterators(fb.iterators);
        for (const auto& sub : fb.items) checkItem(sub, labels);
        leaveIterators(pushed);
    }

    std::size_t enterIterators(const IteratorList& list) {
        scopes_.emplace_back();
        std::set<std::string> local;
        for (const auto& it : list.iterators) {
            if (!local.insert(it.name).second) {
                report(codes::SemDuplicateIndex, it.span,
                       "Iterator '" + it.name + "' is bound twice in the same quantifier.");
                continue;
            }
            if (symbols_.count(it.name) || lookupIterator(it.name)) {
                report(codes::SemShadowedIndex, it.span,
                       "Index '" + it.name + "' shadows an existing declaration.");
            }
            scopes_.back()[it.name] = iteratorType(it.domain);
            if (it.domain.kind == DomainRef::Kind::Named) {
                iterDomains_[it.name] = it.domain.name;
            } else {
                iterDomains_.erase(it.name);
            }
        }
        if (list.filter) checkComparison(list.filter, /*constraint=*/false);
        return 1;
    }

    void leaveIterators(std::size_t n) {
        while (n--) scopes_.pop_back();
    }

    const TypeRef* lookupIterator(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto found = it->find(name);
            if (found != it->end()) return &found->second;
        }
        return nullptr;
    }

    TypeRef iteratorType(const DomainRef& d) {
        if (d.kind == DomainRef::Kind::InlineRange) {
            checkRangeBound(d.lo);
            checkRangeBound(d.hi);
            return TypeRef{TypeRef::Kind::Int, {}};
        }
        used_.insert(d.name);
        auto it = symbols_.find(d.name);
        if (it == symbols_.end()) {
            report(codes::SemUndeclared, d.span, "Undeclared symbol '" + d.name + "'.",
                   "Declare '" + d.name + "' in the model file before using it.");
            return TypeRef{TypeRef::Kind::Int, {}};
        }
        if (it->second.kind == SymbolInfo::Kind::Range) return TypeRef{TypeRef::Kind::Int, {}};
        if (it->second.kind == SymbolInfo::Kind::Set) return setElemTypeRef(it->second);
        report(codes::SemTypeMismatch, d.span,
               "Type mismatch: '" + d.name + "' is a " + it->second.kindName() +
                   " and cannot be iterated.",
               "Iterate over a range or set.");
        return TypeRef{TypeRef::Kind::Int, {}};
    }

    void checkConstraintExpr(const LabelledConstraint& lc) {
        const ExprPtr& e = lc.constraint;
        if (e->kind != Expression::Kind::Compare) return;
        if (e->children.size() > 2) {
            report(codes::SemChainedCmp, e->children[1]->span,
                   "Chained comparisons (e.g., a <= b <= c) are not supported.");
            // still analyze the operands so usage tracking stays accurate
            for (const auto& child : e->children) analyzeExpr(child);
            return;
        }
        bool anyDvar = checkComparison(e, /*constraint=*/true);
        if (!anyDvar) {
            report(codes::SemConstraintNoDvar, lc.span,
                   "Constraint '" + (lc.label.empty() ? std::string("?") : lc.label) +
                       "' involves no decision variables.");
        }
    }

    // Returns whether any operand references a decision variable.
    bool checkComparison(const ExprPtr& e, bool constraint) {
        if (e->kind != Expression::Kind::Compare) {
            report(codes::SemTypeMismatch, e->span,
                   "Type mismatch: expected a comparison expression.");
            return false;
        }
        if (!constraint && e->children.size() > 2) {
            report(codes::SemChainedCmp, e->children[1]->span,
                   "Chained comparisons (e.g., a <= b <= c) are not supported.");
            for (const auto& child : e->children) analyzeExpr(child);
            return false;
        }
        bool anyDvar = false;
        std::vector<TypeRef> opTypes;
        for (const auto& child : e->children) {
            auto [type, dvar] = analyzeExpr(child);
            opTypes.push_back(type);
            anyDvar = anyDvar || dvar;
            if (!constraint && dvar) {
                report(codes::SemTypeMismatch, child->span,
                       "Type mismatch: iterator filters must not reference decision "
                       "variables.");
            }
        }
        for (std::size_t i = 0; i + 1 < opTypes.size(); ++i) {
            const TypeRef& a = opTypes[i];
            const TypeRef& b = opTypes[i + 1];
            bool ok = (a.numeric() && b.numeric()) ||
                      (a.kind == b.kind && a.kind != TypeRef::Kind::Tuple &&
                       (!constraint || a.numeric()));
            if (constraint && !(a.numeric() && b.numeric())) ok = false;
            if (!ok) {
                report(codes::SemTypeMismatch, e->children[i + 1]->span,
                       "Type mismatch: cannot compare " + a.str() + " with " + b.str() +
                           (constraint ? " in a constraint." : "."));
            }
        }
        return anyDvar;
    }

    std::pair<TypeRef, bool> analyzeExpr(const ExprPtr& e) {
        auto [type, dvar] = analyzeExprImpl(e);
        types_[e.get()] = type;
        hasDvar_[e.get()] = dvar;
        return {type, dvar};
    }

    std::pair<TypeRef, bool> analyzeExprImpl(const ExprPtr& e) {
        switch (e->kind) {
            case Expression::Kind::NumberLit:
                return {TypeRef{e->isIntLiteral ? TypeRef::Kind::Int : TypeRef::Kind::Float, {}},
                        false};
            case Expression::Kind::StringLit: return {TypeRef{TypeRef::Kind::String, {}}, false};
            case Expression::Kind::BoolLit: return {TypeRef{TypeRef::Kind::Bool, {}}, false};
            case Expression::Kind::Ident: return analyzeIdent(e);
            case Expression::Kind::Index: return analyzeIndex(e);
            case Expression::Kind::Unary: {
                auto [type, dvar] = analyzeExpr(e->children[0]);
                requireNumericOperand(e->children[0], type);
                return {type.kind == TypeRef::Kind::Int ? type : TypeRef{TypeRef::Kind::Float, {}},
                        dvar};
            }
            case Expression::Kind::Paren: return analyzeExpr(e->children[0]);
            case Expression::Kind::Binary: return analyzeBinary(e);
            case Expression::Kind::Sum: {
                std::size_t pushed = enterIterators(e->iterators);
                auto [type, dvar] = analyzeExpr(e->children[0]);
                leaveIterators(pushed);
                requireNumericOperand(e->children[0], type);
                return {type.numeric() ? type : TypeRef{TypeRef::Kind::Float, {}}, dvar};
            }
            case Expression::Kind::Compare:
                // Comparisons are handled by checkComparison; reaching one here
                // means it was nested inside arithmetic, which the grammar forbids.
                return {TypeRef{TypeRef::Kind::Bool, {}}, false};
        }
        return {TypeRef{TypeRef::Kind::Float, {}}, false};
    }

    std::pair<TypeRef, bool> analyzeIdent(const ExprPtr& e) {
        if (const TypeRef* it = lookupIterator(e->text)) return {*it, false};
        used_.insert(e->text);
        auto found = symbols_.find(e->text);
        if (found == symbols_.end()) {
            report(codes::SemUndeclared, e->span, "Undeclared symbol '" + e->text + "'.",
                   "Declare '" + e->text + "' in the model file before using it.");
            return {TypeRef{TypeRef::Kind::Float, {}}, false};
        }
        const SymbolInfo& info = found->second;
        switch (info.kind) {
            case SymbolInfo::Kind::Parameter:
                if (!info.dims.empty()) {
                    report(codes::SemIndexArity, e->span,
                           "'" + e->text + "' expects " + std::to_string(info.dims.size()) +
                               " indices, got 0.");
                }
                return {TypeRef::ofScalar(info.elemType), false};
            case SymbolInfo::Kind::Dvar:
                if (!info.dims.empty()) {
                    report(codes::SemIndexArity, e->span,
                           "'" + e->text + "' expects " + std::to_string(info.dims.size()) +
                               " indices, got 0.");
                }
                // boolean decision variables act as 0/1 integers in expressions
                return {TypeRef{info.elemType == ScalarType::Float ? TypeRef::Kind::Float
                                                                   : TypeRef::Kind::Int,
                                {}},
                        true};
            default:
                report(codes::SemTypeMismatch, e->span,
                       "Type mismatch: '" + e->text + "' is a " + info.kindName() +
                           " and cannot be used as a value.");
                return {TypeRef{TypeRef::Kind::Float, {}}, false};
        }
    }

    std::pair<TypeRef, bool> analyzeIndex(const ExprPtr& e) {
        used_.insert(e->text);
        auto found = symbols_.find(e->text);
        if (found == symbols_.end()) {
            report(codes::SemUndeclared, e->span, "Undeclared symbol '" + e->text + "'.",
                   "Declare '" + e->text + "' in the model file before using it.");
            for (const auto& idx : e->children) analyzeExpr(idx);
            return {TypeRef{TypeRef::Kind::Float, {}}, false};
        }
        const SymbolInfo& info = found->second;
        if (info.kind != SymbolInfo::Kind::Parameter && info.kind != SymbolInfo::Kind::Dvar) {
            report(codes::SemTypeMismatch, e->span,
                   "Type mismatch: '" + e->text + "' is a " + info.kindName() +
                       " and cannot be subscripted.");
            for (const auto& idx : e->children) analyzeExpr(idx);
            return {TypeRef{TypeRef::Kind::Float, {}}, false};
        }
        if (info.dims.empty()) {
            report(codes::SemScalarIndexed, e->span,
                   "Scalar '" + e->text + "' cannot be subscripted.");
            for (const auto& idx : e->children) analyzeExpr(idx);
            return {TypeRef::ofScalar(info.elemType), info.kind == SymbolInfo::Kind::Dvar};
        }
        if (e->children.size() != info.dims.size()) {
            report(codes::SemIndexArity, e->span,
                   "'" + e->text + "' expects " + std::to_string(info.dims.size()) +
                       " indices, got " + std::to_string(e->children.size()) + ".");
        }
        std::size_t n = std::min(e->children.size(), info.dims.size());
        for (std::size_t k = 0; k < n; ++k) {
            const ExprPtr& idx = e->children[k];
            auto [type, dvar] = analyzeExpr(idx);
            if (dvar) {
                report(codes::SemTypeMismatch, idx->span,
                       "Type mismatch: subscripts must not reference decision variables.");
                continue;
            }
            const DomainInfo& dim = info.dims[k];
            if (dim.kind == DomainInfo::Kind::NamedSet) {
                if (type != dim.elemType) {
                    report(codes::SemIndexType, idx->span,
                           "Index " + std::to_string(k + 1) + " of '" + e->text + "' must be " +
                               dim.elemType.str() + ", got " + type.str() + ".");
                } else if (idx->kind == Expression::Kind::Ident) {
                    warnDomainMismatch(e->text, idx, dim);
                }
            } else {
                if (type.kind != TypeRef::Kind::Int) {
                    report(codes::SemIndexType, idx->span,
                           "Index " + std::to_string(k + 1) + " of '" + e->text +
                               "' must be int, got " + type.str() + ".");
                }
            }
        }
        bool isDvar = info.kind == SymbolInfo::Kind::Dvar;
        if (isDvar && info.elemType == ScalarType::Bool) {
            return {TypeRef{TypeRef::Kind::Int, {}}, true};
        }
        return {TypeRef::ofScalar(info.elemType), isDvar};
    }

    // iterator bound to domain A used to index an array declared over domain B
    void warnDomainMismatch(const std::string& arrayName, const ExprPtr& idx,
                            const DomainInfo& dim) {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            if (it->count(idx->text)) {
                // find the iterator's declared domain name in the model text
                const std::string* iterDomain = iteratorDomainName(idx->text);
                if (iterDomain && !dim.name.empty() && *iterDomain != dim.name) {
                    report(codes::SemIndexDomainMismatch, idx->span,
                           "Index '" + idx->text + "' iterates over '" + *iterDomain +
                               "' but '" + arrayName + "' is indexed by '" + dim.name + "'.");
                }
                return;
            }
        }
    }

    const std::string* iteratorDomainName(const std::string& iter) const {
        auto it = iterDomains_.find(iter);
        return it == iterDomains_.end() ? nullptr : &it->second;
    }

    std::map<std::string, std::string> iterDomains_;

    std::pair<TypeRef, bool> analyzeBinary(const ExprPtr& e) {
        auto [lt, ld] = analyzeExpr(e->children[0]);
        auto [rt, rd] = analyzeExpr(e->children[1]);
        requireNumericOperand(e->children[0], lt);
        requireNumericOperand(e->children[1], rt);
        if (e->op == '*' && ld && rd) {
            report(codes::SemNonlinear, e->span,
                   "Nonlinear term: product of decision-variable expressions is not "
                   "supported.");
        }
        if (e->op == '/') {
            if (rd) {
                report(codes::SemDvarDivisor, e->span,
                       "Division by a decision-variable expression is not supported.");
            } else if (e->children[1]->kind == Expression::Kind::NumberLit &&
                       e->children[1]->numberValue == 0.0) {
                report(codes::SemDivByZero, e->span, "Division by constant zero.");
            }
        }
        TypeRef result{TypeRef::Kind::Float, {}};
        if (lt.kind == TypeRef::Kind::Int && rt.kind == TypeRef::Kind::Int && e->op != '/') {
            result.kind = TypeRef::Kind::Int;
        }
        return {result, ld || rd};
    }

    void requireNumericOperand(const ExprPtr& e, const TypeRef& type) {
        if (type.numeric()) return;
        if (type.kind == TypeRef::Kind::String) {
            report(codes::SemStringArith, e->span,
                   "String-valued operand in arithmetic expression.");
        } else if (type.kind == TypeRef::Kind::Bool) {
            report(codes::SemBoolArith, e->span,
                   "Boolean-valued operand in arithmetic expression.");
        } else {
            report(codes::SemTypeMismatch, e->span,
                   "Type mismatch: expected a numeric value, got " + type.str() + ".");
        }
    }

    void usageWarnings() {
        for (const auto& [name, info] : symbols_) {
            if (used_.count(name)) continue;
            if (info.kind == SymbolInfo::Kind::Parameter) {
                report(codes::SemUnusedParam, info.declSpan,
                       "Parameter '" + name + "' is declared but never used.");
            } else if (info.kind == SymbolInfo::Kind::Dvar) {
                report(codes::SemUnusedDvar, info.declSpan,
                       "Decision variable '" + name + "' does not appear in the objective "
                       "or any constraint.");
            }
        }
    }
};

}  // namespace detail

inline AnalyzeResult analyze(const ModelAst& model, const DataAst& data) {
    return detail::Analyzer(model, data).run();
}

}  // namespace pyopl
