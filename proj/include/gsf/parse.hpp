#pragma once

#include "gsf/error.hpp"
#include "gsf/gennum.hpp"

#include <string>

namespace gsf {

class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t pos)
        : InputError("parse error at position " + std::to_string(pos + 1) + ": " + what), pos_(pos) {}
    // 0-based offset into the input
    std::size_t position() const { return pos_; }

private:
    std::size_t pos_;
};

// Scalar grammar:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | 'drho' | 'eps' | func '(' expr ')' | '(' expr ')'
//   func   := log | exp | sqrt | sin | cos | abs
// A non-constant exponent is read as exp(p log x).
GenNum parse_scalar(const std::string& text, const Ctx& ctx);

} // namespace gsf
