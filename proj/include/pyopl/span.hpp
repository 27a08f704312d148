#pragma once

#include <cstddef>
#include <string>

namespace pyopl {

// 1-based source position; every token and AST node carries one.
struct Span {
    int line = 1;
    int column = 1;
    std::size_t length = 0;

    bool operator==(const Span&) const = default;
};

inline std::string to_string(const Span& s) {
    return "line " + std::to_string(s.line) + ", col " + std::to_string(s.column);
}

}  // namespace pyopl
