#pragma once

#include "avlag/expr.hpp"

#include <cctype>
#include <string>

namespace avlag {

struct ParseError : InputError {
    ParseError(const std::string& what, std::size_t pos)
        : InputError(what + " (at offset " + std::to_string(pos) + ")"), position(pos)
    {
    }
    std::size_t position;
};

namespace detail {

// Recursive-descent parser for the expression grammar
//
//   expr   := term (("+" | "-") term)*
//   term   := unary (("*" | "/") unary)*
//   unary  := "-" unary | factor
//   factor := base ("^" unary)?
//   base   := NUMBER | IDENT | "(" expr ")" | FUNC "(" expr ")"
//
// FUNC is one of ln, exp, sin, cos, sqrt; sqrt(u) is represented as u^(1/2).
// Exponents must fold to exact rational constants.
class Parser {
public:
    Parser(const std::string& text, const SymbolTable& table)
        : text_(text), table_(table)
    {
    }

    Expr run()
    {
        skip_ws();
        if (pos_ >= text_.size())
            throw ParseError("empty expression", pos_);
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    Expr parse_expr()
    {
        Expr e = parse_term();
        for (;;) {
            skip_ws();
            if (accept('+'))
                e = add(e, parse_term());
            else if (accept('-'))
                e = sub(e, parse_term());
            else
                return e;
        }
    }

    Expr parse_term()
    {
        Expr e = parse_unary();
        for (;;) {
            skip_ws();
            if (accept('*'))
                e = mul(e, parse_unary());
            else if (accept('/')) {
                std::size_t at = pos_;
                Expr d = parse_unary();
                if (is_zero_num(d))
                    throw ParseError("division by zero", at);
                e = div(e, d);
            } else
                return e;
        }
    }

    Expr parse_unary()
    {
        skip_ws();
        if (accept('-'))
            return neg(parse_unary());
        return parse_factor();
    }

    Expr parse_factor()
    {
        Expr b = parse_base();
        skip_ws();
        if (accept('^')) {
            std::size_t at = pos_;
            Expr e = parse_unary();
            auto r = rational_value(e);
            if (!r)
                throw ParseError("exponent must be a rational constant", at);
            if (is_zero_num(b) && *r < 0)
                throw ParseError("zero raised to a negative power", at);
            return pow(b, *r);
        }
        return b;
    }

    Expr parse_base()
    {
        skip_ws();
        if (pos_ >= text_.size())
            throw ParseError("unexpected end of expression", pos_);
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)))
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return parse_ident();
        if (accept('(')) {
            Expr e = parse_expr();
            expect(')');
            return e;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    Expr parse_number()
    {
        std::size_t start = pos_;
        std::string digits;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
            digits += text_[pos_++];
        std::string frac;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() &&
                   std::isdigit(static_cast<unsigned char>(text_[pos_])))
                frac += text_[pos_++];
            if (frac.empty())
                throw ParseError("malformed decimal literal", start);
        }
        return num(rational_from_decimal(digits, frac));
    }

    Expr parse_ident()
    {
        std::size_t start = pos_;
        std::string name;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                text_[pos_] == '_'))
            name += text_[pos_++];
        if (name == "ln" || name == "exp" || name == "sin" || name == "cos" ||
            name == "sqrt") {
            skip_ws();
            if (!accept('('))
                throw ParseError("expected '(' after function '" + name + "'", pos_);
            Expr arg = parse_expr();
            expect(')');
            if (name == "ln")
                return ln(arg);
            if (name == "exp")
                return exp_of(arg);
            if (name == "sin")
                return sin_of(arg);
            if (name == "cos")
                return cos_of(arg);
            return sqrt_of(arg);
        }
        const Symbol* s = table_.find(name);
        if (!s)
            throw ParseError("unknown symbol '" + name + "'", start);
        return var(s);
    }

    void skip_ws()
    {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c))
            throw ParseError(std::string("expected '") + c + "'", pos_);
    }

    const std::string& text_;
    const SymbolTable& table_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Expr parse_expression(const std::string& text, const SymbolTable& table)
{
    return detail::Parser(text, table).run();
}

} // namespace avlag
