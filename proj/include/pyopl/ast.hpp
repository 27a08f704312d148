#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pyopl/span.hpp"
#include "pyopl/token.hpp"

namespace pyopl {

enum class ScalarType { Int, Float, Bool, String };

inline std::string to_string(ScalarType t) {
    switch (t) {
        case ScalarType::Int: return "int";
        case ScalarType::Float: return "float";
        case ScalarType::Bool: return "boolean";
        case ScalarType::String: return "string";
    }
    return "?";
}

enum class RelOp { Le, Ge, Eq, Lt, Gt, Ne };

inline std::string to_string(RelOp op) {
    switch (op) {
        case RelOp::Le: return "<=";
        case RelOp::Ge: return ">=";
        case RelOp::Eq: return "==";
        case RelOp::Lt: return "<";
        case RelOp::Gt: return ">";
        case RelOp::Ne: return "!=";
    }
    return "?";
}

struct Expression;
using ExprPtr = std::shared_ptr<const Expression>;

// Either a named range/set or an inline `lo..hi` range.
struct DomainRef {
    enum class Kind { Named, InlineRange } kind = Kind::Named;
    std::string name;
    ExprPtr lo, hi;
    Span span;
};

struct Iterator {
    std::string name;
    DomainRef domain;
    Span span;
};

// `(i in A, j in B : filter)`
struct IteratorList {
    std::vector<Iterator> iterators;
    ExprPtr filter;  // comparison expression or null
    Span span;
};

struct Expression {
    enum class Kind {
        NumberLit,   // numberValue / isIntLiteral
        StringLit,   // text
        BoolLit,     // boolValue
        Ident,       // text
        Index,       // text = array name, children = index expressions
        Binary,      // op in + - * /, children = {lhs, rhs}
        Unary,       // unary minus, children = {operand}
        Sum,         // iterators + children = {body}
        Compare,     // children = operands (n >= 2), relations (n-1)
        Paren,       // children = {inner}
    };

    Kind kind = Kind::NumberLit;
    Span span;
    double numberValue = 0;
    bool isIntLiteral = false;
    bool boolValue = false;
    std::string text;
    char op = 0;
    std::vector<ExprPtr> children;
    std::vector<RelOp> relations;
    IteratorList iterators;
};

inline ExprPtr makeNumber(double v, bool isInt, Span s) {
    auto e = std::make_shared<Expression>();
    e->kind = Expression::Kind::NumberLit;
    e->numberValue = v;
    e->isIntLiteral = isInt;
    e->span = s;
    return e;
}

// ---------------------------------------------------------------------------
// Data literals (shared between .dat files and model-side set initializers)

struct DataLiteral {
    enum class Kind { Number, String, Bool, Array, Set, Tuple, Range };
    Kind kind = Kind::Number;
    Span span;
    double numberValue = 0;
    bool isIntLiteral = false;
    bool boolValue = false;
    std::string text;
    std::vector<DataLiteral> elements;  // Array / Set / Tuple
    double rangeLo = 0, rangeHi = 0;    // Range

    std::string describe() const {
        switch (kind) {
            case Kind::Number: return isIntLiteral ? "an int literal" : "a float literal";
            case Kind::String: return "a string literal";
            case Kind::Bool: return "a boolean literal";
            case Kind::Array: return "an array literal";
            case Kind::Set: return "a set literal";
            case Kind::Tuple: return "a tuple literal";
            case Kind::Range: return "a range literal";
        }
        return "a literal";
    }
};

// Renders a tuple literal the way diagnostics quote it: (0, 35, 35, 0).
inline std::string renderTupleLiteral(const DataLiteral& lit) {
    std::string out = "(";
    for (std::size_t i = 0; i < lit.elements.size(); ++i) {
        if (i) out += ", ";
        const DataLiteral& e = lit.elements[i];
        if (e.kind == DataLiteral::Kind::Number) {
            double v = e.numberValue;
            if (e.isIntLiteral) {
                out += std::to_string(static_cast<long long>(v));
            } else {
                out += std::to_string(v);
            }
        } else if (e.kind == DataLiteral::Kind::String) {
            out += "\"" + e.text + "\"";
        } else if (e.kind == DataLiteral::Kind::Bool) {
            out += e.boolValue ? "true" : "false";
        }
    }
    out += ")";
    return out;
}

// ---------------------------------------------------------------------------
// Declarations

struct ParamDecl {
    ScalarType elemType = ScalarType::Float;
    std::string name;
    std::vector<DomainRef> dims;  // empty for scalars
    ExprPtr init;                 // optional scalar initializer
    Span span;
};

struct RangeDecl {
    std::string name;
    ExprPtr lo, hi;
    Span span;
};

struct SetDecl {
    bool tupleElem = false;
    ScalarType elemType = ScalarType::String;  // when !tupleElem
    std::string tupleTypeName;                 // when tupleElem
    std::string name;
    std::optional<DataLiteral> init;  // Set literal
    Span span;
};

struct TupleDecl {
    std::string name;
    std::vector<std::pair<ScalarType, std::string>> fields;
    Span span;
};

struct DvarDecl {
    ScalarType domainType = ScalarType::Float;  // Float, Int, or Bool
    bool nonNegative = false;                   // `float+` / `int+`
    std::string name;
    std::vector<DomainRef> dims;
    ExprPtr lowerBound, upperBound;  // from `in lo..hi`
    Span span;
};

using Declaration = std::variant<ParamDecl, RangeDecl, SetDecl, TupleDecl, DvarDecl>;

inline const std::string& declarationName(const Declaration& d) {
    return std::visit([](const auto& v) -> const std::string& { return v.name; }, d);
}

inline Span declarationSpan(const Declaration& d) {
    return std::visit([](const auto& v) { return v.span; }, d);
}

// ---------------------------------------------------------------------------
// Objective and constraints

enum class Sense { Minimize, Maximize };

struct Objective {
    Sense sense = Sense::Minimize;
    std::string label;  // may be empty; semantics warns
    ExprPtr expr;
    Span span;
};

struct ConstraintItem;

struct LabelledConstraint {
    std::string label;  // empty -> SEM-UNLABELLED-CONSTRAINT
    ExprPtr constraint; // Compare expression
    Span span;
};

struct ForallBlock {
    IteratorList iterators;
    std::vector<ConstraintItem> items;
    Span span;
};

struct ConstraintItem {
    std::variant<LabelledConstraint, ForallBlock> node;
};

struct ModelAst {
    std::vector<Declaration> declarations;
    Objective objective;
    std::vector<ConstraintItem> constraints;
    std::vector<Comment> comments;
};

struct Assignment {
    std::string name;
    DataLiteral value;
    Span span;
};

struct DataAst {
    std::vector<Assignment> assignments;
    std::vector<Comment> comments;
};

// ---------------------------------------------------------------------------
// Structural equality (ignores spans and comments) and a debug dump, both used
// by the round-trip tests.

inline bool structurallyEqual(const ExprPtr& a, const ExprPtr& b);

inline bool structurallyEqual(const DomainRef& a, const DomainRef& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == DomainRef::Kind::Named) return a.name == b.name;
    return structurallyEqual(a.lo, b.lo) && structurallyEqual(a.hi, b.hi);
}

inline bool structurallyEqual(const IteratorList& a, const IteratorList& b) {
    if (a.iterators.size() != b.iterators.size()) return false;
    for (std::size_t i = 0; i < a.iterators.size(); ++i) {
        if (a.iterators[i].name != b.iterators[i].name) return false;
        if (!structurallyEqual(a.iterators[i].domain, b.iterators[i].domain)) return false;
    }
    return structurallyEqual(a.filter, b.filter);
}

inline bool structurallyEqual(const ExprPtr& a, const ExprPtr& b) {
    if (!a && !b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Expression::Kind::NumberLit:
            return a->numberValue == b->numberValue && a->isIntLiteral == b->isIntLiteral;
        case Expression::Kind::StringLit:
        case Expression::Kind::Ident:
            return a->text == b->text;
        case Expression::Kind::BoolLit:
            return a->boolValue == b->boolValue;
        case Expression::Kind::Index:
            if (a->text != b->text) return false;
            break;
        case Expression::Kind::Binary:
            if (a->op != b->op) return false;
            break;
        case Expression::Kind::Compare:
            if (a->relations != b->relations) return false;
            break;
        case Expression::Kind::Sum:
            if (!structurallyEqual(a->iterators, b->iterators)) return false;
            break;
        default: break;
    }
    if (a->children.size() != b->children.size()) return false;
    for (std::size_t i = 0; i < a->children.size(); ++i) {
        if (!structurallyEqual(a->children[i], b->children[i])) return false;
    }
    return true;
}

inline bool structurallyEqual(const DataLiteral& a, const DataLiteral& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case DataLiteral::Kind::Number:
            if (a.numberValue != b.numberValue) return false;
            break;
        case DataLiteral::Kind::String:
            if (a.text != b.text) return false;
            break;
        case DataLiteral::Kind::Bool:
            if (a.boolValue != b.boolValue) return false;
            break;
        case DataLiteral::Kind::Range:
            if (a.rangeLo != b.rangeLo || a.rangeHi != b.rangeHi) return false;
            break;
        default: break;
    }
    if (a.elements.size() != b.elements.size()) return false;
    for (std::size_t i = 0; i < a.elements.size(); ++i) {
        if (!structurallyEqual(a.elements[i], b.elements[i])) return false;
    }
    return true;
}

inline bool structurallyEqual(const Declaration& a, const Declaration& b) {
    if (a.index() != b.index()) return false;
    if (const auto* pa = std::get_if<ParamDecl>(&a)) {
        const auto& pb = std::get<ParamDecl>(b);
        if (pa->elemType != pb.elemType || pa->name != pb.name) return false;
        if (pa->dims.size() != pb.dims.size()) return false;
        for (std::size_t i = 0; i < pa->dims.size(); ++i) {
            if (!structurallyEqual(pa->dims[i], pb.dims[i])) return false;
        }
        return structurallyEqual(pa->init, pb.init);
    }
    if (const auto* ra = std::get_if<RangeDecl>(&a)) {
        const auto& rb = std::get<RangeDecl>(b);
        return ra->name == rb.name && structurallyEqual(ra->lo, rb.lo) &&
               structurallyEqual(ra->hi, rb.hi);
    }
    if (const auto* sa = std::get_if<SetDecl>(&a)) {
        const auto& sb = std::get<SetDecl>(b);
        if (sa->tupleElem != sb.tupleElem || sa->name != sb.name) return false;
        if (sa->tupleElem && sa->tupleTypeName != sb.tupleTypeName) return false;
        if (!sa->tupleElem && sa->elemType != sb.elemType) return false;
        if (sa->init.has_value() != sb.init.has_value()) return false;
        return !sa->init || structurallyEqual(*sa->init, *sb.init);
    }
    if (const auto* ta = std::get_if<TupleDecl>(&a)) {
        const auto& tb = std::get<TupleDecl>(b);
        return ta->name == tb.name && ta->fields == tb.fields;
    }
    const auto& da = std::get<DvarDecl>(a);
    const auto& db = std::get<DvarDecl>(b);
    if (da.domainType != db.domainType || da.nonNegative != db.nonNegative ||
        da.name != db.name)
        return false;
    if (da.dims.size() != db.dims.size()) return false;
    for (std::size_t i = 0; i < da.dims.size(); ++i) {
        if (!structurallyEqual(da.dims[i], db.dims[i])) return false;
    }
    return structurallyEqual(da.lowerBound, db.lowerBound) &&
           structurallyEqual(da.upperBound, db.upperBound);
}

inline bool structurallyEqual(const ConstraintItem& a, const ConstraintItem& b);

inline bool structurallyEqual(const std::vector<ConstraintItem>& a,
                              const std::vector<ConstraintItem>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!structurallyEqual(a[i], b[i])) return false;
    }
    return true;
}

inline bool structurallyEqual(const ConstraintItem& a, const ConstraintItem& b) {
    if (a.node.index() != b.node.index()) return false;
    if (const auto* la = std::get_if<LabelledConstraint>(&a.node)) {
        const auto& lb = std::get<LabelledConstraint>(b.node);
        return la->label == lb.label && structurallyEqual(la->constraint, lb.constraint);
    }
    const auto& fa = std::get<ForallBlock>(a.node);
    const auto& fb = std::get<ForallBlock>(b.node);
    return structurallyEqual(fa.iterators, fb.iterators) && structurallyEqual(fa.items, fb.items);
}

inline bool structurallyEqual(const ModelAst& a, const ModelAst& b) {
    if (a.declarations.size() != b.declarations.size()) return false;
    for (std::size_t i = 0; i < a.declarations.size(); ++i) {
        if (!structurallyEqual(a.declarations[i], b.declarations[i])) return false;
    }
    if (a.objective.sense != b.objective.sense || a.objective.label != b.objective.label)
        return false;
    if (!structurallyEqual(a.objective.expr, b.objective.expr)) return false;
    return structurallyEqual(a.constraints, b.constraints);
}

// Compact s-expression dump, handy in tests.
inline std::string dumpExpr(const ExprPtr& e) {
    if (!e) return "nil";
    switch (e->kind) {
        case Expression::Kind::NumberLit: {
            if (e->isIntLiteral) return std::to_string(static_cast<long long>(e->numberValue));
            return std::to_string(e->numberValue);
        }
        case Expression::Kind::StringLit: return "\"" + e->text + "\"";
        case Expression::Kind::BoolLit: return e->boolValue ? "true" : "false";
        case Expression::Kind::Ident: return e->text;
        case Expression::Kind::Index: {
            std::string out = "(index " + e->text;
            for (const auto& c : e->children) out += " " + dumpExpr(c);
            return out + ")";
        }
        case Expression::Kind::Binary:
            return "(" + std::string(1, e->op) + " " + dumpExpr(e->children[0]) + " " +
                   dumpExpr(e->children[1]) + ")";
        case Expression::Kind::Unary: return "(neg " + dumpExpr(e->children[0]) + ")";
        case Expression::Kind::Sum: {
            std::string out = "(sum (";
            for (const auto& it : e->iterators.iterators) out += it.name + " ";
            return out + ") " + dumpExpr(e->children[0]) + ")";
        }
        case Expression::Kind::Compare: {
            std::string out = "(chain";
            for (std::size_t i = 0; i < e->children.size(); ++i) {
                if (i) out += " " + to_string(e->relations[i - 1]);
                out += " " + dumpExpr(e->children[i]);
            }
            return out + ")";
        }
        case Expression::Kind::Paren: return "(paren " + dumpExpr(e->children[0]) + ")";
    }
    return "?";
}

}  // namespace pyopl
