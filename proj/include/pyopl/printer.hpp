#pragma once

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "pyopl/ast.hpp"

namespace pyopl {

// Shortest representation that re-lexes to the same value and literal class.
inline std::string formatNumber(double v, bool isIntLiteral) {
    if (!std::isfinite(v)) return "1e9999";
    if (isIntLiteral && std::abs(v) < 9.0e18) {
        return std::to_string(static_cast<long long>(v));
    }
    for (int prec = 15; prec <= 17; ++prec) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::stod(buf) == v) {
            std::string s(buf);
            // keep float literals visibly float so they re-parse as floats
            if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
                s.find('E') == std::string::npos) {
                s += ".0";
            }
            return s;
        }
    }
    return std::to_string(v);
}

inline std::string escapeString(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c; break;
        }
    }
    out += "\"";
    return out;
}

inline std::string printExpr(const ExprPtr& e);

inline std::string printDomainRef(const DomainRef& d) {
    if (d.kind == DomainRef::Kind::Named) return d.name;
    return printExpr(d.lo) + ".." + printExpr(d.hi);
}

inline std::string printIteratorList(const IteratorList& list) {
    std::string out;
    for (std::size_t i = 0; i < list.iterators.size(); ++i) {
        if (i) out += ", ";
        out += list.iterators[i].name + " in " + printDomainRef(list.iterators[i].domain);
    }
    if (list.filter) out += " : " + printExpr(list.filter);
    return out;
}

inline std::string printExpr(const ExprPtr& e) {
    if (!e) return "";
    switch (e->kind) {
        case Expression::Kind::NumberLit: return formatNumber(e->numberValue, e->isIntLiteral);
        case Expression::Kind::StringLit: return escapeString(e->text);
        case Expression::Kind::BoolLit: return e->boolValue ? "true" : "false";
        case Expression::Kind::Ident: return e->text;
        case Expression::Kind::Index: {
            std::string out = e->text;
            for (const auto& idx : e->children) out += "[" + printExpr(idx) + "]";
            return out;
        }
        case Expression::Kind::Binary:
            return printExpr(e->children[0]) + " " + std::string(1, e->op) + " " +
                   printExpr(e->children[1]);
        case Expression::Kind::Unary: {
            std::string inner = printExpr(e->children[0]);
            bool needSpace = e->children[0]->kind == Expression::Kind::Unary;
            return std::string("-") + (needSpace ? " " : "") + inner;
        }
        case Expression::Kind::Sum:
            return "sum (" + printIteratorList(e->iterators) + ") " + printExpr(e->children[0]);
        case Expression::Kind::Compare: {
            std::string out = printExpr(e->children[0]);
            for (std::size_t i = 1; i < e->children.size(); ++i) {
                out += " " + to_string(e->relations[i - 1]) + " " + printExpr(e->children[i]);
            }
            return out;
        }
        case Expression::Kind::Paren: return "(" + printExpr(e->children[0]) + ")";
    }
    return "";
}

inline std::string printDataLiteral(const DataLiteral& lit) {
    switch (lit.kind) {
        case DataLiteral::Kind::Number: return formatNumber(lit.numberValue, lit.isIntLiteral);
        case DataLiteral::Kind::String: return escapeString(lit.text);
        case DataLiteral::Kind::Bool: return lit.boolValue ? "true" : "false";
        case DataLiteral::Kind::Range:
            return formatNumber(lit.rangeLo, true) + ".." + formatNumber(lit.rangeHi, true);
        case DataLiteral::Kind::Array:
        case DataLiteral::Kind::Set:
        case DataLiteral::Kind::Tuple: {
            const char* open = lit.kind == DataLiteral::Kind::Array   ? "["
                               : lit.kind == DataLiteral::Kind::Set   ? "{"
                                                                      : "<";
            const char* close = lit.kind == DataLiteral::Kind::Array   ? "]"
                                : lit.kind == DataLiteral::Kind::Set   ? "}"
                                                                       : ">";
            std::string out = open;
            for (std::size_t i = 0; i < lit.elements.size(); ++i) {
                if (i) out += ", ";
                out += printDataLiteral(lit.elements[i]);
            }
            return out + close;
        }
    }
    return "";
}

namespace detail {

inline std::string printDeclaration(const Declaration& d) {
    if (const auto* p = std::get_if<ParamDecl>(&d)) {
        std::string out = to_string(p->elemType) + " " + p->name;
        for (const auto& dim : p->dims) out += "[" + printDomainRef(dim) + "]";
        if (p->init) out += " = " + printExpr(p->init);
        return out + ";";
    }
    if (const auto* r = std::get_if<RangeDecl>(&d)) {
        return "range " + r->name + " = " + printExpr(r->lo) + ".." + printExpr(r->hi) + ";";
    }
    if (const auto* s = std::get_if<SetDecl>(&d)) {
        std::string elem = s->tupleElem ? s->tupleTypeName : to_string(s->elemType);
        std::string out = "{" + elem + "} " + s->name;
        if (s->init) out += " = " + printDataLiteral(*s->init);
        return out + ";";
    }
    if (const auto* t = std::get_if<TupleDecl>(&d)) {
        std::string out = "tuple " + t->name + " {";
        for (const auto& [ft, fn] : t->fields) out += " " + to_string(ft) + " " + fn + ";";
        return out + " }";
    }
    const auto& v = std::get<DvarDecl>(d);
    std::string out = "dvar " + to_string(v.domainType) + (v.nonNegative ? "+" : "") + " " +
                      v.name;
    for (const auto& dim : v.dims) out += "[" + printDomainRef(dim) + "]";
    if (v.lowerBound) out += " in " + printExpr(v.lowerBound) + ".." + printExpr(v.upperBound);
    return out + ";";
}

struct PrintUnit {
    int line;
    int indent;
    std::string text;
};

inline void collectConstraintUnits(const ConstraintItem& item, int indent,
                                   std::vector<PrintUnit>& out) {
    if (const auto* lc = std::get_if<LabelledConstraint>(&item.node)) {
        std::string text;
        if (!lc->label.empty()) text += lc->label + ": ";
        text += printExpr(lc->constraint) + ";";
        out.push_back({lc->span.line, indent, text});
        return;
    }
    const auto& fb = std::get<ForallBlock>(item.node);
    if (fb.items.size() == 1) {
        std::vector<PrintUnit> inner;
        collectConstraintUnits(fb.items[0], 0, inner);
        if (inner.size() == 1) {
            out.push_back({fb.span.line, indent,
                           "forall (" + printIteratorList(fb.iterators) + ") " + inner[0].text});
            return;
        }
    }
    out.push_back({fb.span.line, indent, "forall (" + printIteratorList(fb.iterators) + ") {"});
    for (const auto& sub : fb.items) collectConstraintUnits(sub, indent + 1, out);
    int closeLine = out.empty() ? fb.span.line : out.back().line;
    out.push_back({closeLine, indent, "}"});
}

}  // namespace detail

// Canonical text form. Re-parsing the output yields a structurally equal tree,
// and the multiset of comment texts is preserved.
inline std::string prettyPrint(const ModelAst& model) {
    using detail::PrintUnit;
    std::vector<PrintUnit> units;
    for (const auto& d : model.declarations) {
        units.push_back({declarationSpan(d).line, 0, detail::printDeclaration(d)});
    }
    {
        std::string obj = model.objective.sense == Sense::Minimize ? "minimize" : "maximize";
        if (!model.objective.label.empty()) obj += " " + model.objective.label + ":";
        obj += " " + printExpr(model.objective.expr) + ";";
        units.push_back({model.objective.span.line, 0, obj});
    }
    if (!model.constraints.empty()) {
        int firstLine = 0;
        std::vector<PrintUnit> body;
        for (const auto& item : model.constraints) {
            detail::collectConstraintUnits(item, 1, body);
        }
        if (!body.empty()) firstLine = body.front().line;
        units.push_back({firstLine, 0, "subject to {"});
        for (auto& u : body) units.push_back(std::move(u));
        units.push_back({body.empty() ? firstLine : body.back().line, 0, "}"});
    }

    // Interleave the retained comments by original line so literate narration
    // stays next to what it explains.
    std::vector<Comment> comments = model.comments;
    std::stable_sort(comments.begin(), comments.end(),
                     [](const Comment& a, const Comment& b) { return a.span.line < b.span.line; });
    std::size_t ci = 0;
    std::ostringstream os;
    auto emitComment = [&](const Comment& c, int indent) {
        for (int i = 0; i < indent; ++i) os << "  ";
        if (c.block) {
            os << "/* " << c.text << " */\n";
        } else {
            os << "// " << c.text << "\n";
        }
    };
    for (const auto& u : units) {
        while (ci < comments.size() && comments[ci].span.line <= u.line) {
            emitComment(comments[ci++], u.indent);
        }
        for (int i = 0; i < u.indent; ++i) os << "  ";
        os << u.text << "\n";
    }
    while (ci < comments.size()) emitComment(comments[ci++], 0);
    return os.str();
}

}  // namespace pyopl
