#pragma once

#include <cctype>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mldeg/errors.hpp"
#include "mldeg/poly.hpp"

namespace mldeg {

namespace detail {

// Recursive descent over
//   expr     := term (('+'|'-') term)*
//   term     := factor ('*' factor)*
//   factor   := base ('^' uint)?
//   base     := ident | rational | '(' expr ')'
//   rational := int ('/' uint)?        int := '-'? digits
class PolyParser {
public:
    PolyParser(std::string_view text, const std::vector<std::string>& variables)
        : text_(text), vars_(variables) {}

    Poly parse() {
        Poly p = expr();
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
        return p;
    }

private:
    Poly expr() {
        Poly acc = term();
        for (;;) {
            skip_ws();
            if (pos_ >= text_.size()) break;
            const char op = text_[pos_];
            if (op != '+' && op != '-') break;
            ++pos_;
            Poly rhs = term();
            if (op == '+')
                acc += rhs;
            else
                acc -= rhs;
        }
        return acc;
    }

    Poly term() {
        Poly acc = factor();
        for (;;) {
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != '*') break;
            ++pos_;
            acc *= factor();
        }
        return acc;
    }

    Poly factor() {
        Poly b = base();
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '^') {
            ++pos_;
            skip_ws();
            if (pos_ >= text_.size()) fail("expected exponent");
            if (text_[pos_] == '-') fail("negative exponent");
            if (!std::isdigit(static_cast<unsigned char>(text_[pos_]))) fail("exponent must be a non-negative integer literal");
            const std::size_t start = pos_;
            const auto k = digits();
            if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == '/'))
                fail("non-integer exponent", start);
            if (k > 1'000'000) fail("exponent too large", start);
            return b.pow(static_cast<std::uint32_t>(k));
        }
        return b;
    }

    Poly base() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char ch = text_[pos_];
        if (ch == '(') {
            ++pos_;
            Poly inner = expr();
            skip_ws();
            if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
            ++pos_;
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name(text_.substr(start, pos_ - start));
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                if (vars_[i] == name) return Poly::variable(vars_, i);
            }
            fail("unknown identifier '" + name + "'", start);
        }
        if (ch == '-' || std::isdigit(static_cast<unsigned char>(ch))) return rational();
        fail("unexpected character '" + std::string(1, ch) + "'");
    }

    Poly rational() {
        const std::size_t start = pos_;
        bool negative = false;
        if (text_[pos_] == '-') {
            negative = true;
            ++pos_;
            skip_ws();
        }
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
            fail("expected integer literal", start);
        Integer num(digit_string(), 10);
        Integer den(1);
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == '/') {
            ++pos_;
            skip_ws();
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                fail("expected unsigned denominator");
            const std::size_t den_pos = pos_;
            den = Integer(digit_string(), 10);
            if (den == 0) fail("zero denominator", den_pos);
        }
        if (pos_ < text_.size() && text_[pos_] == '.') fail("decimal literals are not supported");
        if (negative) num = -num;
        Rational q(num, den);
        q.canonicalize();
        return Poly::constant(vars_, q);
    }

    std::string digit_string() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    std::uint64_t digits() {
        const std::size_t start = pos_;
        const auto s = digit_string();
        if (s.size() > 18) fail("integer literal too large", start);
        return std::stoull(s);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    [[noreturn]] void fail(const std::string& what) const { fail(what, pos_); }
    [[noreturn]] void fail(const std::string& what, std::size_t at) const { throw ParseError(what, at); }

    std::string_view text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parses `text` into canonical expanded form over `variables`.
/// Throws ParseError (with byte position) on malformed input, unknown
/// identifiers, and negative or non-integer exponents.
inline Poly parse_poly(std::string_view text, const std::vector<std::string>& variables) {
    return detail::PolyParser(text, variables).parse();
}

} // namespace mldeg
