#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "pyopl/diagnostic.hpp"
#include "pyopl/token.hpp"

namespace pyopl {

enum class SourceKind { Model, Data };

struct LexResult {
    std::vector<Token> tokens;            // ends with EndOfFile on success
    std::vector<Comment> comments;        // preserved out-of-band for literate output
    std::optional<Diagnostic> error;      // first lexical error, if any

    bool ok() const { return !error.has_value(); }
};

namespace detail {

class Lexer {
public:
    Lexer(std::string_view src, SourceKind kind) : src_(src), kind_(kind) {}

    LexResult run() {
        LexResult out;
        while (true) {
            skipWhitespaceAndComments(out);
            if (out.error) return out;
            if (atEnd()) break;
            Span start = here();
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                out.tokens.push_back(lexWord(start));
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                Token t = lexNumber(start, out);
                if (out.error) return out;
                out.tokens.push_back(std::move(t));
            } else if (c == '"') {
                Token t = lexString(start, out);
                if (out.error) return out;
                out.tokens.push_back(std::move(t));
            } else {
                Token t = lexPunct(start, out);
                if (out.error) return out;
                out.tokens.push_back(std::move(t));
            }
        }
        Token eof;
        eof.kind = TokenKind::EndOfFile;
        eof.span = here();
        out.tokens.push_back(eof);
        return out;
    }

private:
    std::string_view src_;
    SourceKind kind_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;

    bool atEnd() const { return pos_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }
    Span here() const { return Span{line_, col_, 1}; }

    char advance() {
        char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skipWhitespaceAndComments(LexResult& out) {
        while (!atEnd()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                Span start = here();
                advance();
                advance();
                std::string text;
                while (!atEnd() && peek() != '\n') text += advance();
                out.comments.push_back(Comment{start, trim(text), false});
            } else if (c == '/' && peek(1) == '*') {
                Span start = here();
                advance();
                advance();
                std::string text;
                bool closed = false;
                while (!atEnd()) {
                    if (peek() == '*' && peek(1) == '/') {
                        advance();
                        advance();
                        closed = true;
                        break;
                    }
                    text += advance();
                }
                if (!closed) {
                    out.error = makeDiagnostic(codes::SynUnterminatedComment, start,
                                               "Unterminated block comment.");
                    return;
                }
                out.comments.push_back(Comment{start, trim(text), true});
            } else {
                return;
            }
        }
    }

    static std::string trim(const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        std::size_t e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    Token lexWord(Span start) {
        std::string text;
        while (!atEnd() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
            text += advance();
        }
        Token t;
        t.span = start;
        t.span.length = text.size();
        t.text = text;
        auto it = keywordTable().find(text);
        t.kind = it != keywordTable().end() ? it->second : TokenKind::Name;
        return t;
    }

    Token lexNumber(Span start, LexResult& out) {
        std::string text;
        while (!atEnd() && std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
        bool isFloat = false;
        // A '.' followed by another '.' is a range operator, not a decimal point.
        if (peek() == '.' && peek(1) != '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            isFloat = true;
            text += advance();
            while (!atEnd() && std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (std::isdigit(static_cast<unsigned char>(peek(1))) ||
             ((peek(1) == '+' || peek(1) == '-') &&
              std::isdigit(static_cast<unsigned char>(peek(2)))))) {
            isFloat = true;
            text += advance();
            if (peek() == '+' || peek() == '-') text += advance();
            while (!atEnd() && std::isdigit(static_cast<unsigned char>(peek()))) text += advance();
        }
        // "1.2.3" or "1.2e" style leftovers
        if (peek() == '.' && peek(1) != '.' && isFloat) {
            out.error = makeDiagnostic(codes::SynNumberMalformed, start,
                                       "Malformed numeric literal '" + text + ".'.");
            return {};
        }
        Token t;
        t.span = start;
        t.span.length = text.size();
        t.kind = TokenKind::Number;
        t.text = text;
        t.numberValue = std::stod(text);
        t.isIntLiteral = !isFloat;
        return t;
    }

    Token lexString(Span start, LexResult& out) {
        advance();  // opening quote
        std::string text;
        while (true) {
            if (atEnd() || peek() == '\n') {
                out.error = makeDiagnostic(codes::SynUnterminatedString, start,
                                           "Unterminated string literal.");
                return {};
            }
            char c = advance();
            if (c == '"') break;
            if (c == '\\' && !atEnd()) {
                char esc = advance();
                switch (esc) {
                    case 'n': text += '\n'; break;
                    case 't': text += '\t'; break;
                    case '\\': text += '\\'; break;
                    case '"': text += '"'; break;
                    default: text += esc; break;
                }
            } else {
                text += c;
            }
        }
        Token t;
        t.span = start;
        t.span.length = text.size() + 2;
        t.kind = TokenKind::String;
        t.text = text;
        return t;
    }

    Token lexPunct(Span start, LexResult& out) {
        char c = advance();
        Token t;
        t.span = start;
        t.text = std::string(1, c);
        switch (c) {
            case ';': t.kind = TokenKind::Semi; return t;
            case ',': t.kind = TokenKind::Comma; return t;
            case ':': t.kind = TokenKind::Colon; return t;
            case '+': t.kind = TokenKind::Plus; return t;
            case '-': t.kind = TokenKind::Minus; return t;
            case '*': t.kind = TokenKind::Star; return t;
            case '/': t.kind = TokenKind::Slash; return t;
            case '(': t.kind = TokenKind::LParen; return t;
            case ')': t.kind = TokenKind::RParen; return t;
            case '{': t.kind = TokenKind::LBrace; return t;
            case '}': t.kind = TokenKind::RBrace; return t;
            case '[': t.kind = TokenKind::LBracket; return t;
            case ']': t.kind = TokenKind::RBracket; return t;
            case '.':
                if (peek() == '.') {
                    advance();
                    t.kind = TokenKind::DotDot;
                    t.text = "..";
                    t.span.length = 2;
                    return t;
                }
                break;
            case '=':
                if (peek() == '=') {
                    advance();
                    t.kind = TokenKind::EqEq;
                    t.text = "==";
                    t.span.length = 2;
                } else {
                    t.kind = TokenKind::Assign;
                }
                return t;
            case '<':
                if (peek() == '=') {
                    advance();
                    t.kind = TokenKind::Le;
                    t.text = "<=";
                    t.span.length = 2;
                } else {
                    t.kind = TokenKind::Lt;
                }
                return t;
            case '>':
                if (peek() == '=') {
                    advance();
                    t.kind = TokenKind::Ge;
                    t.text = ">=";
                    t.span.length = 2;
                } else {
                    t.kind = TokenKind::Gt;
                }
                return t;
            case '!':
                if (peek() == '=') {
                    advance();
                    t.kind = TokenKind::Ne;
                    t.text = "!=";
                    t.span.length = 2;
                    return t;
                }
                break;
            default: break;
        }
        out.error = makeDiagnostic(codes::SynIllegalChar, start,
                                   "Illegal character '" + std::string(1, c) + "'.");
        return {};
    }
};

}  // namespace detail

inline LexResult tokenize(std::string_view source, SourceKind kind) {
    return detail::Lexer(source, kind).run();
}

}  // namespace pyopl
