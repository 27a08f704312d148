#pragma once

#include <string>
#include <string_view>
#include <unordered_map>

#include "pyopl/span.hpp"

namespace pyopl {

enum class TokenKind {
    Name,
    Number,
    String,
    // keywords
    KwInt,
    KwFloat,
    KwBoolean,
    KwString,
    KwRange,
    KwDvar,
    KwMinimize,
    KwMaximize,
    KwSubject,
    KwTo,
    KwForall,
    KwSum,
    KwIn,
    KwTuple,
    KwTrue,
    KwFalse,
    // punctuation and operators
    Semi,
    Comma,
    Colon,
    Assign,
    DotDot,
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Le,
    Ge,
    EqEq,
    Ne,
    EndOfFile,
};

struct Token {
    TokenKind kind = TokenKind::EndOfFile;
    std::string text;        // spelling as written
    double numberValue = 0;  // for Number tokens
    bool isIntLiteral = false;
    Span span;
};

// Surface name used inside diagnostics ("at or near token NAME, value 'demand'").
inline std::string tokenKindName(TokenKind k) {
    switch (k) {
        case TokenKind::Name: return "NAME";
        case TokenKind::Number: return "NUMBER";
        case TokenKind::String: return "STRING";
        case TokenKind::KwInt: return "INT";
        case TokenKind::KwFloat: return "FLOAT";
        case TokenKind::KwBoolean: return "BOOLEAN";
        case TokenKind::KwString: return "STRING_TYPE";
        case TokenKind::KwRange: return "RANGE";
        case TokenKind::KwDvar: return "DVAR";
        case TokenKind::KwMinimize: return "MINIMIZE";
        case TokenKind::KwMaximize: return "MAXIMIZE";
        case TokenKind::KwSubject: return "SUBJECT";
        case TokenKind::KwTo: return "TO";
        case TokenKind::KwForall: return "FORALL";
        case TokenKind::KwSum: return "SUM";
        case TokenKind::KwIn: return "IN";
        case TokenKind::KwTuple: return "TUPLE";
        case TokenKind::KwTrue: return "TRUE";
        case TokenKind::KwFalse: return "FALSE";
        case TokenKind::Semi: return "';'";
        case TokenKind::Comma: return "','";
        case TokenKind::Colon: return "':'";
        case TokenKind::Assign: return "'='";
        case TokenKind::DotDot: return "'..'";
        case TokenKind::Plus: return "'+'";
        case TokenKind::Minus: return "'-'";
        case TokenKind::Star: return "'*'";
        case TokenKind::Slash: return "'/'";
        case TokenKind::LParen: return "'('";
        case TokenKind::RParen: return "')'";
        case TokenKind::LBrace: return "'{'";
        case TokenKind::RBrace: return "'}'";
        case TokenKind::LBracket: return "'['";
        case TokenKind::RBracket: return "']'";
        case TokenKind::Lt: return "'<'";
        case TokenKind::Gt: return "'>'";
        case TokenKind::Le: return "'<='";
        case TokenKind::Ge: return "'>='";
        case TokenKind::EqEq: return "'=='";
        case TokenKind::Ne: return "'!='";
        case TokenKind::EndOfFile: return "END-OF-FILE";
    }
    return "?";
}

inline const std::unordered_map<std::string_view, TokenKind>& keywordTable() {
    static const std::unordered_map<std::string_view, TokenKind> table = {
        {"int", TokenKind::KwInt},          {"float", TokenKind::KwFloat},
        {"boolean", TokenKind::KwBoolean},  {"string", TokenKind::KwString},
        {"range", TokenKind::KwRange},      {"dvar", TokenKind::KwDvar},
        {"minimize", TokenKind::KwMinimize},{"maximize", TokenKind::KwMaximize},
        {"subject", TokenKind::KwSubject},  {"to", TokenKind::KwTo},
        {"forall", TokenKind::KwForall},    {"sum", TokenKind::KwSum},
        {"in", TokenKind::KwIn},            {"tuple", TokenKind::KwTuple},
        {"true", TokenKind::KwTrue},        {"false", TokenKind::KwFalse},
    };
    return table;
}

struct Comment {
    Span span;
    std::string text;  // without the // or /* */ delimiters
    bool block = false;
};

}  // namespace pyopl
