#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pyopl/ast.hpp"
#include "pyopl/diagnostic.hpp"
#include "pyopl/lexer.hpp"

namespace pyopl {

template <typename T>
struct ParseResult {
    std::optional<T> value;
    std::optional<Diagnostic> error;

    bool ok() const { return value.has_value(); }
};

namespace detail {

struct ParseError {
    Diagnostic diag;
};

class ParserBase {
public:
    explicit ParserBase(const std::vector<Token>& tokens) : toks_(tokens) {}

protected:
    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;

    const Token& cur() const { return toks_[pos_]; }
    const Token& prev() const { return toks_[pos_ == 0 ? 0 : pos_ - 1]; }
    bool check(TokenKind k) const { return cur().kind == k; }
    bool atEnd() const { return cur().kind == TokenKind::EndOfFile; }

    const Token& advance() {
        const Token& t = cur();
        if (!atEnd()) ++pos_;
        return t;
    }

    bool accept(TokenKind k) {
        if (check(k)) {
            advance();
            return true;
        }
        return false;
    }

    [[noreturn]] void failUnexpected() const {
        throw ParseError{makeDiagnostic(
            codes::SynUnexpectedToken, cur().span,
            "Syntax error at or near token " + tokenKindName(cur().kind) + ", value '" +
                cur().text + "'.")};
    }

    [[noreturn]] void failExpected(const std::string& what) const {
        throw ParseError{makeDiagnostic(
            codes::SynExpectedToken, cur().span,
            "Expected " + what + " before token " + tokenKindName(cur().kind) + ", value '" +
                cur().text + "'.",
            "Insert the missing " + what + ".")};
    }

    Token expect(TokenKind k, const std::string& what) {
        if (!check(k)) failExpected(what);
        return advance();
    }

    void expectSemi(const std::string& context) {
        if (accept(TokenKind::Semi)) return;
        throw ParseError{makeDiagnostic(codes::SynMissingSemicolon, prev().span,
                                        "Missing ';' after " + context + ".")};
    }
};

// ---------------------------------------------------------------------------

class ModelParser : public ParserBase {
public:
    using ParserBase::ParserBase;

    ModelAst parse() {
        ModelAst model;
        std::vector<Objective> objectives;
        while (!atEnd()) {
            switch (cur().kind) {
                case TokenKind::KwInt:
                case TokenKind::KwFloat:
                case TokenKind::KwBoolean:
                case TokenKind::KwString:
                    model.declarations.push_back(parseParamDecl());
                    break;
                case TokenKind::KwRange:
                    model.declarations.push_back(parseRangeDecl());
                    break;
                case TokenKind::LBrace:
                    model.declarations.push_back(parseSetDecl());
                    break;
                case TokenKind::KwTuple:
                    model.declarations.push_back(parseTupleDecl());
                    break;
                case TokenKind::KwDvar:
                    model.declarations.push_back(parseDvarDecl());
                    break;
                case TokenKind::KwMinimize:
                case TokenKind::KwMaximize:
                    objectives.push_back(parseObjective());
                    break;
                case TokenKind::KwSubject:
                    parseSubjectTo(model.constraints);
                    break;
                default:
                    failUnexpected();
            }
        }
        if (objectives.empty()) {
            throw ParseError{makeDiagnostic(codes::SemNoObjective, std::nullopt,
                                            "Model must declare exactly one objective; "
                                            "found none.")};
        }
        if (objectives.size() > 1) {
            throw ParseError{makeDiagnostic(
                codes::SemMultipleObjective, objectives[1].span,
                "Model must declare exactly one objective; found " +
                    std::to_string(objectives.size()) + ".")};
        }
        model.objective = std::move(objectives.front());
        return model;
    }

private:
    static ScalarType scalarTypeOf(TokenKind k) {
        switch (k) {
            case TokenKind::KwInt: return ScalarType::Int;
            case TokenKind::KwFloat: return ScalarType::Float;
            case TokenKind::KwBoolean: return ScalarType::Bool;
            default: return ScalarType::String;
        }
    }

    Declaration parseParamDecl() {
        Span span = cur().span;
        ScalarType t = scalarTypeOf(advance().kind);
        ParamDecl p;
        p.elemType = t;
        p.span = span;
        p.name = expect(TokenKind::Name, "a parameter name").text;
        while (check(TokenKind::LBracket)) p.dims.push_back(parseDim());
        if (accept(TokenKind::Assign)) p.init = parseArithExpr();
        expectSemi("declaration of '" + p.name + "'");
        return p;
    }

    DomainRef parseDim() {
        expect(TokenKind::LBracket, "'['");
        DomainRef d = parseDomainRef();
        expect(TokenKind::RBracket, "']'");
        return d;
    }

    DomainRef parseDomainRef() {
        DomainRef d;
        d.span = cur().span;
        ExprPtr first = parseArithExpr();
        if (accept(TokenKind::DotDot)) {
            d.kind = DomainRef::Kind::InlineRange;
            d.lo = first;
            d.hi = parseArithExpr();
            return d;
        }
        if (first->kind == Expression::Kind::Ident) {
            d.kind = DomainRef::Kind::Named;
            d.name = first->text;
            return d;
        }
        failExpected("an index domain (a range/set name or 'lo..hi')");
    }

    Declaration parseRangeDecl() {
        Span span = advance().span;  // 'range'
        RangeDecl r;
        r.span = span;
        r.name = expect(TokenKind::Name, "a range name").text;
        expect(TokenKind::Assign, "'='");
        r.lo = parseArithExpr();
        expect(TokenKind::DotDot, "'..'");
        r.hi = parseArithExpr();
        expectSemi("declaration of '" + r.name + "'");
        return r;
    }

    Declaration parseSetDecl() {
        Span span = advance().span;  // '{'
        SetDecl s;
        s.span = span;
        if (check(TokenKind::Name)) {
            s.tupleElem = true;
            s.tupleTypeName = advance().text;
        } else if (check(TokenKind::KwInt) || check(TokenKind::KwFloat) ||
                   check(TokenKind::KwBoolean) || check(TokenKind::KwString)) {
            s.elemType = scalarTypeOf(advance().kind);
        } else {
            failExpected("a set element type");
        }
        expect(TokenKind::RBrace, "'}'");
        s.name = expect(TokenKind::Name, "a set name").text;
        if (accept(TokenKind::Assign)) s.init = parseSetLiteral();
        expectSemi("declaration of '" + s.name + "'");
        return s;
    }

    DataLiteral parseSetLiteral() {
        DataLiteral lit;
        lit.kind = DataLiteral::Kind::Set;
        lit.span = cur().span;
        expect(TokenKind::LBrace, "'{'");
        if (!check(TokenKind::RBrace)) {
            do {
                lit.elements.push_back(parseScalarOrTupleLiteral());
            } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RBrace, "'}'");
        return lit;
    }

    DataLiteral parseScalarOrTupleLiteral() {
        DataLiteral e;
        e.span = cur().span;
        if (check(TokenKind::Lt)) {
            advance();
            e.kind = DataLiteral::Kind::Tuple;
            do {
                e.elements.push_back(parseScalarLiteral());
            } while (accept(TokenKind::Comma));
            expect(TokenKind::Gt, "'>'");
            return e;
        }
        return parseScalarLiteral();
    }

    DataLiteral parseScalarLiteral() {
        DataLiteral e;
        e.span = cur().span;
        bool negate = accept(TokenKind::Minus);
        if (check(TokenKind::Number)) {
            const Token& t = advance();
            e.kind = DataLiteral::Kind::Number;
            e.numberValue = negate ? -t.numberValue : t.numberValue;
            e.isIntLiteral = t.isIntLiteral;
            return e;
        }
        if (negate) failExpected("a number");
        if (check(TokenKind::String)) {
            e.kind = DataLiteral::Kind::String;
            e.text = advance().text;
            return e;
        }
        if (check(TokenKind::KwTrue) || check(TokenKind::KwFalse)) {
            e.kind = DataLiteral::Kind::Bool;
            e.boolValue = advance().kind == TokenKind::KwTrue;
            return e;
        }
        failExpected("a scalar literal");
    }

    Declaration parseTupleDecl() {
        Span span = advance().span;  // 'tuple'
        TupleDecl t;
        t.span = span;
        t.name = expect(TokenKind::Name, "a tuple type name").text;
        expect(TokenKind::LBrace, "'{'");
        while (!check(TokenKind::RBrace)) {
            if (!(check(TokenKind::KwInt) || check(TokenKind::KwFloat) ||
                  check(TokenKind::KwBoolean) || check(TokenKind::KwString))) {
                failExpected("a tuple field type");
            }
            ScalarType ft = scalarTypeOf(advance().kind);
            std::string fname = expect(TokenKind::Name, "a tuple field name").text;
            expectSemi("tuple field '" + fname + "'");
            t.fields.emplace_back(ft, fname);
        }
        expect(TokenKind::RBrace, "'}'");
        accept(TokenKind::Semi);  // trailing ';' is optional after a tuple type
        return t;
    }

    Declaration parseDvarDecl() {
        Span span = advance().span;  // 'dvar'
        DvarDecl d;
        d.span = span;
        if (check(TokenKind::KwFloat) || check(TokenKind::KwInt) ||
            check(TokenKind::KwBoolean)) {
            d.domainType = scalarTypeOf(advance().kind);
        } else {
            failExpected("a decision-variable domain (float, int, or boolean)");
        }
        if (accept(TokenKind::Plus)) d.nonNegative = true;
        d.name = expect(TokenKind::Name, "a decision-variable name").text;
        while (check(TokenKind::LBracket)) d.dims.push_back(parseDim());
        if (accept(TokenKind::KwIn)) {
            d.lowerBound = parseArithExpr();
            expect(TokenKind::DotDot, "'..'");
            d.upperBound = parseArithExpr();
        }
        expectSemi("declaration of '" + d.name + "'");
        return d;
    }

    Objective parseObjective() {
        Objective o;
        o.span = cur().span;
        o.sense = advance().kind == TokenKind::KwMinimize ? Sense::Minimize : Sense::Maximize;
        if (check(TokenKind::Name) && toks_[pos_ + 1].kind == TokenKind::Colon) {
            o.label = advance().text;
            advance();  // ':'
        }
        o.expr = parseArithExpr();
        expectSemi("the objective");
        return o;
    }

    void parseSubjectTo(std::vector<ConstraintItem>& out) {
        advance();  // 'subject'
        expect(TokenKind::KwTo, "'to'");
        expect(TokenKind::LBrace, "'{'");
        while (!check(TokenKind::RBrace)) {
            if (atEnd()) failExpected("'}'");
            out.push_back(parseConstraintItem());
        }
        advance();  // '}'
    }

    ConstraintItem parseConstraintItem() {
        if (check(TokenKind::KwForall)) {
            ForallBlock fb;
            fb.span = advance().span;
            expect(TokenKind::LParen, "'('");
            fb.iterators = parseIteratorList();
            expect(TokenKind::RParen, "')'");
            if (accept(TokenKind::LBrace)) {
                while (!check(TokenKind::RBrace)) {
                    if (atEnd()) failExpected("'}'");
                    fb.items.push_back(parseConstraintItem());
                }
                advance();  // '}'
            } else {
                fb.items.push_back(parseConstraintItem());
            }
            ConstraintItem item;
            item.node = std::move(fb);
            return item;
        }
        LabelledConstraint lc;
        lc.span = cur().span;
        if (check(TokenKind::Name) && toks_[pos_ + 1].kind == TokenKind::Colon) {
            lc.label = advance().text;
            advance();  // ':'
        }
        lc.constraint = parseCompareChain(/*constraintOps=*/true);
        expectSemi(lc.label.empty() ? std::string("the constraint")
                                    : "constraint '" + lc.label + "'");
        ConstraintItem item;
        item.node = std::move(lc);
        return item;
    }

    IteratorList parseIteratorList() {
        IteratorList list;
        list.span = cur().span;
        do {
            Iterator it;
            it.span = cur().span;
            it.name = expect(TokenKind::Name, "an iterator name").text;
            expect(TokenKind::KwIn, "'in'");
            it.domain = parseDomainRef();
            list.iterators.push_back(std::move(it));
        } while (accept(TokenKind::Comma));
        if (accept(TokenKind::Colon)) {
            list.filter = parseCompareChain(/*constraintOps=*/false);
        }
        return list;
    }

    static bool isConstraintRelOp(TokenKind k) {
        return k == TokenKind::Le || k == TokenKind::Ge || k == TokenKind::EqEq;
    }
    static bool isAnyRelOp(TokenKind k) {
        return isConstraintRelOp(k) || k == TokenKind::Lt || k == TokenKind::Gt ||
               k == TokenKind::Ne;
    }

    static RelOp relOpOf(TokenKind k) {
        switch (k) {
            case TokenKind::Le: return RelOp::Le;
            case TokenKind::Ge: return RelOp::Ge;
            case TokenKind::EqEq: return RelOp::Eq;
            case TokenKind::Lt: return RelOp::Lt;
            case TokenKind::Gt: return RelOp::Gt;
            default: return RelOp::Ne;
        }
    }

    // Chains of length > 1 are representable; semantics rejects them so the
    // diagnostic can cite the offending line.
    ExprPtr parseCompareChain(bool constraintOps) {
        Span span = cur().span;
        std::vector<ExprPtr> operands;
        std::vector<RelOp> rels;
        operands.push_back(parseArithExpr());
        auto acceptable = [&](TokenKind k) {
            return constraintOps ? isAnyRelOp(k) : isAnyRelOp(k);
        };
        if (!acceptable(cur().kind)) {
            failExpected(constraintOps ? "a comparison operator (<=, >=, ==)"
                                       : "a comparison operator");
        }
        while (acceptable(cur().kind)) {
            if (constraintOps && !isConstraintRelOp(cur().kind)) {
                failExpected("a comparison operator (<=, >=, ==)");
            }
            rels.push_back(relOpOf(advance().kind));
            operands.push_back(parseArithExpr());
        }
        auto e = std::make_shared<Expression>();
        e->kind = Expression::Kind::Compare;
        e->span = span;
        e->children = std::move(operands);
        e->relations = std::move(rels);
        return e;
    }

    ExprPtr parseArithExpr() { return parseAdditive(); }

    ExprPtr parseAdditive() {
        ExprPtr lhs = parseMultiplicative();
        while (check(TokenKind::Plus) || check(TokenKind::Minus)) {
            char op = advance().text[0];
            ExprPtr rhs = parseMultiplicative();
            auto e = std::make_shared<Expression>();
            e->kind = Expression::Kind::Binary;
            e->span = lhs->span;
            e->op = op;
            e->children = {lhs, rhs};
            lhs = e;
        }
        return lhs;
    }

    ExprPtr parseMultiplicative() {
        ExprPtr lhs = parseUnary();
        while (check(TokenKind::Star) || check(TokenKind::Slash)) {
            char op = advance().text[0];
            ExprPtr rhs = parseUnary();
            auto e = std::make_shared<Expression>();
            e->kind = Expression::Kind::Binary;
            e->span = lhs->span;
            e->op = op;
            e->children = {lhs, rhs};
            lhs = e;
        }
        return lhs;
    }

    ExprPtr parseUnary() {
        if (check(TokenKind::Minus)) {
            Span span = advance().span;
            auto e = std::make_shared<Expression>();
            e->kind = Expression::Kind::Unary;
            e->span = span;
            e->children = {parseUnary()};
            return e;
        }
        if (check(TokenKind::KwSum)) {
            Span span = advance().span;
            expect(TokenKind::LParen, "'('");
            IteratorList iters = parseIteratorList();
            expect(TokenKind::RParen, "')'");
            auto e = std::make_shared<Expression>();
            e->kind = Expression::Kind::Sum;
            e->span = span;
            e->iterators = std::move(iters);
            // An unparenthesized body binds only the next multiplicative term:
            // sum (i in S) a[i]*x[i] + c  ==  (sum ... a[i]*x[i]) + c.
            e->children = {parseMultiplicative()};
            return e;
        }
        return parsePrimary();
    }

    ExprPtr parsePrimary() {
        Span span = cur().span;
        if (check(TokenKind::Number)) {
            const Token& t = advance();
            return makeNumber(t.numberValue, t.isIntLiteral, span);
        }
        if (check(TokenKind::String)) {
            auto e = std::make_shared<Expression>();
            e->kind = Expression::Kind::StringLit;
            e->span = span;
            e->text = advance().text;
            return e;
        }
        if (check(TokenKind::KwTrue) || check(TokenKind::KwFalse)) {
            auto e = std::make_shared<Expression>();
            e->kind = Expression::Kind::BoolLit;
            e->span = span;
            e->boolValue = advance().kind == TokenKind::KwTrue;
            return e;
        }
        if (check(TokenKind::LParen)) {
            advance();
            ExprPtr inner = parseArithExpr();
            expect(TokenKind::RParen, "')'");
            auto e = std::make_shared<Expression>();
            e->kind = Expression::Kind::Paren;
            e->span = span;
            e->children = {inner};
            return e;
        }
        if (check(TokenKind::Name)) {
            std::string name = advance().text;
            if (!check(TokenKind::LBracket)) {
                auto e = std::make_shared<Expression>();
                e->kind = Expression::Kind::Ident;
                e->span = span;
                e->text = name;
                return e;
            }
            auto e = std::make_shared<Expression>();
            e->kind = Expression::Kind::Index;
            e->span = span;
            e->text = name;
            while (accept(TokenKind::LBracket)) {
                do {
                    e->children.push_back(parseArithExpr());
                } while (accept(TokenKind::Comma));
                expect(TokenKind::RBracket, "']'");
            }
            return e;
        }
        failUnexpected();
    }
};

// ---------------------------------------------------------------------------

class DataParser : public ParserBase {
public:
    using ParserBase::ParserBase;

    DataAst parse() {
        DataAst data;
        std::set<std::string> seen;
        while (!atEnd()) {
            if (!check(TokenKind::Name)) failDat(cur());
            Token nameTok = advance();
            if (!check(TokenKind::Assign)) failDat(nameTok);
            advance();  // '='
            Assignment a;
            a.name = nameTok.text;
            a.span = nameTok.span;
            a.value = parseLiteral();
            if (isArithOp(cur().kind)) {
                throw ParseError{makeDiagnostic(codes::DatExprInDat, cur().span,
                                                "Expressions are not allowed in .dat files.")};
            }
            if (!check(TokenKind::Semi)) failDat(cur());
            advance();
            if (!seen.insert(a.name).second) {
                throw ParseError{makeDiagnostic(
                    codes::DatDuplicateAssign, a.span,
                    "Parameter '" + a.name + "' is assigned more than once in the .dat file.")};
            }
            checkRectangular(a.name, a.value);
            data.assignments.push_back(std::move(a));
        }
        return data;
    }

private:
    static bool isArithOp(TokenKind k) {
        return k == TokenKind::Plus || k == TokenKind::Minus || k == TokenKind::Star ||
               k == TokenKind::Slash;
    }

    [[noreturn]] void failDat(const Token& at) const {
        throw ParseError{makeDiagnostic(
            codes::SynDatSyntax, at.span,
            "Syntax error in .dat file at or near token " + tokenKindName(at.kind) +
                ", value '" + at.text + "'.")};
    }

    DataLiteral parseLiteral() {
        Span span = cur().span;
        if (check(TokenKind::LBracket)) {
            advance();
            DataLiteral lit;
            lit.kind = DataLiteral::Kind::Array;
            lit.span = span;
            if (!check(TokenKind::RBracket)) {
                do {
                    lit.elements.push_back(parseLiteral());
                } while (accept(TokenKind::Comma));
            }
            if (!check(TokenKind::RBracket)) failDat(cur());
            advance();
            return lit;
        }
        if (check(TokenKind::LBrace)) {
            advance();
            DataLiteral lit;
            lit.kind = DataLiteral::Kind::Set;
            lit.span = span;
            if (!check(TokenKind::RBrace)) {
                do {
                    lit.elements.push_back(parseLiteral());
                } while (accept(TokenKind::Comma));
            }
            if (!check(TokenKind::RBrace)) failDat(cur());
            advance();
            return lit;
        }
        if (check(TokenKind::Lt)) {
            advance();
            DataLiteral lit;
            lit.kind = DataLiteral::Kind::Tuple;
            lit.span = span;
            do {
                lit.elements.push_back(parseLiteral());
            } while (accept(TokenKind::Comma));
            if (!check(TokenKind::Gt)) failDat(cur());
            advance();
            return lit;
        }
        if (check(TokenKind::LParen)) {
            advance();
            DataLiteral lit;
            lit.kind = DataLiteral::Kind::Tuple;
            lit.span = span;
            do {
                lit.elements.push_back(parseLiteral());
            } while (accept(TokenKind::Comma));
            if (!check(TokenKind::RParen)) failDat(cur());
            advance();
            return lit;
        }
        if (check(TokenKind::Minus) || check(TokenKind::Number)) {
            bool negate = accept(TokenKind::Minus);
            if (!check(TokenKind::Number)) failDat(cur());
            Token t = advance();
            DataLiteral lit;
            lit.span = span;
            double v = negate ? -t.numberValue : t.numberValue;
            if (check(TokenKind::DotDot)) {
                advance();
                bool neg2 = accept(TokenKind::Minus);
                if (!check(TokenKind::Number)) failDat(cur());
                Token hi = advance();
                lit.kind = DataLiteral::Kind::Range;
                lit.rangeLo = v;
                lit.rangeHi = neg2 ? -hi.numberValue : hi.numberValue;
                return lit;
            }
            lit.kind = DataLiteral::Kind::Number;
            lit.numberValue = v;
            lit.isIntLiteral = t.isIntLiteral;
            return lit;
        }
        if (check(TokenKind::String)) {
            DataLiteral lit;
            lit.kind = DataLiteral::Kind::String;
            lit.span = span;
            lit.text = advance().text;
            return lit;
        }
        if (check(TokenKind::KwTrue) || check(TokenKind::KwFalse)) {
            DataLiteral lit;
            lit.kind = DataLiteral::Kind::Bool;
            lit.span = span;
            lit.boolValue = advance().kind == TokenKind::KwTrue;
            return lit;
        }
        failDat(cur());
    }

    // Array literals must be rectangular along every dimension.
    void checkRectangular(const std::string& name, const DataLiteral& lit) {
        if (lit.kind != DataLiteral::Kind::Array) return;
        std::size_t expected = 0;
        bool anyNested = false;
        for (std::size_t i = 0; i < lit.elements.size(); ++i) {
            const DataLiteral& row = lit.elements[i];
            if (row.kind == DataLiteral::Kind::Array) {
                anyNested = true;
                if (i == 0) {
                    expected = row.elements.size();
                } else if (row.elements.size() != expected) {
                    throw ParseError{makeDiagnostic(
                        codes::DatRaggedArray, row.span,
                        "Array literal for '" + name + "' is ragged: row " +
                            std::to_string(i + 1) + " has " +
                            std::to_string(row.elements.size()) + " elements, expected " +
                            std::to_string(expected) + ".")};
                }
                checkRectangular(name, row);
            } else if (anyNested) {
                throw ParseError{makeDiagnostic(
                    codes::DatRaggedArray, row.span,
                    "Array literal for '" + name + "' is ragged: row " +
                        std::to_string(i + 1) + " has 1 elements, expected " +
                        std::to_string(expected) + ".")};
            }
        }
    }
};

}  // namespace detail

inline ParseResult<ModelAst> parseModel(const LexResult& lexed) {
    ParseResult<ModelAst> result;
    if (lexed.error) {
        result.error = lexed.error;
        return result;
    }
    try {
        detail::ModelParser parser(lexed.tokens);
        ModelAst model = parser.parse();
        model.comments = lexed.comments;
        result.value = std::move(model);
    } catch (const detail::ParseError& e) {
        result.error = e.diag;
    }
    return result;
}

inline ParseResult<DataAst> parseData(const LexResult& lexed) {
    ParseResult<DataAst> result;
    if (lexed.error) {
        result.error = lexed.error;
        return result;
    }
    try {
        detail::DataParser parser(lexed.tokens);
        DataAst data = parser.parse();
        data.comments = lexed.comments;
        result.value = std::move(data);
    } catch (const detail::ParseError& e) {
        result.error = e.diag;
    }
    return result;
}

inline ParseResult<ModelAst> parseModelText(std::string_view source) {
    return parseModel(tokenize(source, SourceKind::Model));
}

inline ParseResult<DataAst> parseDataText(std::string_view source) {
    return parseData(tokenize(source, SourceKind::Data));
}

}  // namespace pyopl
