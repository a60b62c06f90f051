#include "gsf/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>

namespace gsf {

namespace {

class Parser {
public:
    Parser(const std::string& s, const Ctx& c) : s_(s), ctx_(c) {}

    GenNum run()
    {
        GenNum v = expr();
        skip();
        if (p_ < s_.size()) throw ParseError(std::string("unexpected '") + s_[p_] + "'", p_);
        return v;
    }

private:
    const std::string& s_;
    Ctx ctx_;
    std::size_t p_ = 0;

    void skip()
    {
        while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
    }

    bool eat(char ch)
    {
        skip();
        if (p_ < s_.size() && s_[p_] == ch) {
            ++p_;
            return true;
        }
        return false;
    }

    void expect(char ch)
    {
        if (!eat(ch)) {
            if (p_ >= s_.size()) throw ParseError(std::string("expected '") + ch + "' before end of input", p_);
            throw ParseError(std::string("expected '") + ch + "'", p_);
        }
    }

    GenNum expr()
    {
        GenNum v = term();
        for (;;) {
            if (eat('+'))
                v = v + term();
            else if (eat('-'))
                v = v - term();
            else
                return v;
        }
    }

    GenNum term()
    {
        GenNum v = unary();
        for (;;) {
            if (eat('*'))
                v = v * unary();
            else if (eat('/'))
                v = v / unary();
            else
                return v;
        }
    }

    GenNum unary()
    {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    GenNum power()
    {
        GenNum base = atom();
        if (!eat('^')) return base;
        GenNum e = unary();
        if (e.is_constant()) return pow(base, e.at(0));
        return exp(e * log(base));
    }

    GenNum atom()
    {
        skip();
        if (p_ >= s_.size()) throw ParseError("unexpected end of input", p_);
        const char ch = s_[p_];
        if (ch == '(') {
            ++p_;
            GenNum v = expr();
            expect(')');
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(ch))) return word();
        throw ParseError(std::string("unexpected '") + ch + "'", p_);
    }

    GenNum number()
    {
        double v = 0.0;
        auto [end, ec] = std::from_chars(s_.data() + p_, s_.data() + s_.size(), v);
        if (ec != std::errc()) throw ParseError("malformed number", p_);
        p_ = std::size_t(end - s_.data());
        return GenNum::constant(ctx_, v);
    }

    GenNum word()
    {
        const std::size_t at = p_;
        while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_')) ++p_;
        const std::string w = s_.substr(at, p_ - at);
        if (w == "drho") return drho(ctx_);
        if (w == "eps") return eps_net(ctx_);
        static const std::map<std::string, std::function<GenNum(const GenNum&)>> fns = {
            {"log", [](const GenNum& x) { return log(x); }},   {"exp", [](const GenNum& x) { return exp(x); }},
            {"sqrt", [](const GenNum& x) { return sqrt(x); }}, {"sin", [](const GenNum& x) { return sin(x); }},
            {"cos", [](const GenNum& x) { return cos(x); }},   {"abs", [](const GenNum& x) { return abs(x); }},
        };
        auto it = fns.find(w);
        if (it == fns.end()) throw ParseError("unknown name '" + w + "'", at);
        expect('(');
        GenNum v = expr();
        expect(')');
        return it->second(v);
    }
};

} // namespace

GenNum parse_scalar(const std::string& text, const Ctx& ctx)
{
    if (!ctx) throw InputError("parse_scalar needs a context");
    return Parser(text, ctx).run();
}

} // namespace gsf
