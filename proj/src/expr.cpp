#include "gsf/expr.hpp"
#include "gsf/error.hpp"
#include "gsf/mollifier.hpp"
#include "gsf/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gsf {

namespace {

std::shared_ptr<Node> mk(Op op, std::vector<Expr> kids = {})
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->kids = std::move(kids);
    return n;
}

Expr wrap(std::shared_ptr<Node> n) { return Expr(std::shared_ptr<const Node>(std::move(n))); }

Expr unary(Op op, const Expr& a)
{
    return wrap(mk(op, {a}));
}

} // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double r)
{
    auto n = mk(Op::real);
    n->real = r;
    n_ = std::move(n);
}

Expr::Expr(const GenNum& c)
{
    if (!c.valid()) throw InputError("empty generalized number in expression");
    if (c.is_constant()) {
        auto n = mk(Op::real);
        n->real = c.at(0);
        n_ = std::move(n);
        return;
    }
    auto n = mk(Op::constant);
    n->gen = c;
    n_ = std::move(n);
}

bool Expr::is_real() const { return n_->op == Op::real; }
bool Expr::is_real(double v) const { return n_->op == Op::real && n_->real == v; }

Expr real(double r) { return Expr(r); }
Expr constant(const GenNum& c) { return Expr(c); }

Expr var(int k)
{
    if (k < 0) throw InputError("variable index must be >= 0");
    auto n = mk(Op::var);
    n->var = k;
    return wrap(n);
}

Expr operator+(const Expr& a, const Expr& b)
{
    if (a.is_real() && b.is_real()) return real(a.node().real + b.node().real);
    if (a.is_real(0.0)) return b;
    if (b.is_real(0.0)) return a;
    return wrap(mk(Op::add, {a, b}));
}

Expr operator-(const Expr& a, const Expr& b)
{
    if (a.is_real() && b.is_real()) return real(a.node().real - b.node().real);
    if (b.is_real(0.0)) return a;
    if (a.is_real(0.0)) return -b;
    return wrap(mk(Op::sub, {a, b}));
}

Expr operator*(const Expr& a, const Expr& b)
{
    if (a.is_real() && b.is_real()) return real(a.node().real * b.node().real);
    if (a.is_real(0.0) || b.is_real(0.0)) return real(0.0);
    if (a.is_real(1.0)) return b;
    if (b.is_real(1.0)) return a;
    return wrap(mk(Op::mul, {a, b}));
}

Expr operator/(const Expr& a, const Expr& b)
{
    if (b.is_real(0.0)) throw InputError("division by the constant 0");
    if (a.is_real(0.0)) return real(0.0);
    if (b.is_real(1.0)) return a;
    if (a.is_real() && b.is_real()) return real(a.node().real / b.node().real);
    return wrap(mk(Op::div, {a, b}));
}

Expr operator-(const Expr& a)
{
    if (a.is_real()) return real(-a.node().real);
    if (a.node().op == Op::neg) return a.node().kids[0];
    return unary(Op::neg, a);
}

Expr sin(const Expr& a) { return a.is_real() ? real(std::sin(a.node().real)) : unary(Op::sin, a); }
Expr cos(const Expr& a) { return a.is_real() ? real(std::cos(a.node().real)) : unary(Op::cos, a); }
Expr exp(const Expr& a) { return a.is_real() ? real(std::exp(a.node().real)) : unary(Op::exp, a); }
Expr log(const Expr& a) { return unary(Op::log, a); }
Expr sqrt(const Expr& a) { return unary(Op::sqrt, a); }
Expr tanh(const Expr& a) { return a.is_real() ? real(std::tanh(a.node().real)) : unary(Op::tanh, a); }
Expr atan(const Expr& a) { return a.is_real() ? real(std::atan(a.node().real)) : unary(Op::atan, a); }
Expr tan(const Expr& a) { return unary(Op::tan, a); }

Expr pow(const Expr& a, double p)
{
    if (p == 0.0) return real(1.0);
    if (p == 1.0) return a;
    auto n = mk(Op::pow, {a});
    n->p = p;
    return wrap(n);
}

Expr mollifier(MollKind kind, const Expr& arg, int order)
{
    if (order < 0 || order > d_max)
        throw InputError("mollifier derivative order " + std::to_string(order) + " exceeds d_max=" +
                         std::to_string(d_max));
    if (kind == MollKind::mu_cum && order > 0) return mollifier(MollKind::mu, arg, order - 1);
    auto n = mk(Op::moll, {arg});
    n->mk = kind;
    n->order = order;
    return wrap(n);
}

Expr compose(const Expr& f, const std::vector<Expr>& args)
{
    if (arity(f) > int(args.size())) throw InputError("compose: too few arguments for the outer function");
    std::vector<Expr> kids{f};
    kids.insert(kids.end(), args.begin(), args.end());
    return wrap(mk(Op::compose, std::move(kids)));
}

Expr antiderivative(const Expr& f, int k, const Expr& base)
{
    if (arity(base) > 0) throw InputError("antiderivative base point must not depend on variables");
    auto n = mk(Op::antideriv, {f, base});
    n->var = k;
    n->order = std::max(arity(f), k + 1);
    return wrap(n);
}

Expr embedded_sample(std::shared_ptr<const Embedded> e, const Expr& arg, int order)
{
    if (order < 0 || order > d_max) throw InputError("embedded sample derivative order exceeds d_max");
    auto n = mk(Op::sample, {arg});
    n->emb = std::move(e);
    n->order = order;
    return wrap(n);
}

Expr derive(const Expr& f, int k)
{
    const Node& n = f.node();
    auto d = [k](const Expr& e) { return derive(e, k); };
    switch (n.op) {
    case Op::real:
    case Op::constant: return real(0.0);
    case Op::var: return real(n.var == k ? 1.0 : 0.0);
    case Op::neg: return -d(n.kids[0]);
    case Op::add: return d(n.kids[0]) + d(n.kids[1]);
    case Op::sub: return d(n.kids[0]) - d(n.kids[1]);
    case Op::mul: return d(n.kids[0]) * n.kids[1] + n.kids[0] * d(n.kids[1]);
    case Op::div: {
        const Expr &a = n.kids[0], &b = n.kids[1];
        Expr da = d(a), db = d(b);
        return da / b - (a * db) / (b * b);
    }
    case Op::sin: return cos(n.kids[0]) * d(n.kids[0]);
    case Op::cos: return -(sin(n.kids[0]) * d(n.kids[0]));
    case Op::exp: return f * d(n.kids[0]);
    case Op::log: return d(n.kids[0]) / n.kids[0];
    case Op::sqrt: return real(0.5) * d(n.kids[0]) / f;
    case Op::tanh: return (real(1.0) - f * f) * d(n.kids[0]);
    case Op::atan: return d(n.kids[0]) / (real(1.0) + n.kids[0] * n.kids[0]);
    case Op::tan: return (real(1.0) + f * f) * d(n.kids[0]);
    case Op::pow: return real(n.p) * pow(n.kids[0], n.p - 1.0) * d(n.kids[0]);
    case Op::moll: {
        Expr da = d(n.kids[0]);
        if (da.is_real(0.0)) return real(0.0);
        if (n.mk == MollKind::mu_cum) return mollifier(MollKind::mu, n.kids[0], 0) * da;
        return mollifier(n.mk, n.kids[0], n.order + 1) * da;
    }
    case Op::compose: {
        const Expr& g = n.kids[0];
        Expr sum = real(0.0);
        for (std::size_t j = 1; j < n.kids.size(); ++j) {
            Expr dj = d(n.kids[j]);
            if (dj.is_real(0.0)) continue;
            std::vector<Expr> args(n.kids.begin() + 1, n.kids.end());
            sum = sum + compose(derive(g, int(j - 1)), args) * dj;
        }
        return sum;
    }
    case Op::antideriv:
        if (n.var == k) return n.kids[0];
        if (!depends_on(n.kids[0], k)) return real(0.0);
        return antiderivative(derive(n.kids[0], k), n.var, n.kids[1]);
    case Op::sample: {
        Expr da = d(n.kids[0]);
        if (da.is_real(0.0)) return real(0.0);
        return embedded_sample(n.emb, n.kids[0], n.order + 1) * da;
    }
    }
    throw Error("derive: unknown node");
}

Expr derive(const Expr& f, const std::vector<int>& alpha)
{
    Expr g = f;
    for (std::size_t k = 0; k < alpha.size(); ++k)
        for (int r = 0; r < alpha[k]; ++r) g = derive(g, int(k));
    return g;
}

int arity(const Expr& f)
{
    const Node& n = f.node();
    switch (n.op) {
    case Op::var: return n.var + 1;
    case Op::compose: {
        int m = 0;
        for (std::size_t j = 1; j < n.kids.size(); ++j) m = std::max(m, arity(n.kids[j]));
        return m;
    }
    case Op::antideriv: return n.order;
    default: {
        int m = 0;
        for (const Expr& c : n.kids) m = std::max(m, arity(c));
        return m;
    }
    }
}

bool depends_on(const Expr& f, int k)
{
    const Node& n = f.node();
    switch (n.op) {
    case Op::var: return n.var == k;
    case Op::compose:
        for (std::size_t j = 1; j < n.kids.size(); ++j)
            if (depends_on(n.kids[j], k)) return true;
        return false;
    case Op::antideriv:
        return n.var == k || depends_on(n.kids[0], k);
    default:
        for (const Expr& c : n.kids)
            if (depends_on(c, k)) return true;
        return false;
    }
}

std::string to_string(const Expr& f)
{
    const Node& n = f.node();
    std::ostringstream os;
    auto s = [](const Expr& e) { return to_string(e); };
    switch (n.op) {
    case Op::real: os << n.real; break;
    case Op::constant: os << "c[" << n.gen.at(n.gen.size() - 1) << "..]"; break;
    case Op::var: os << "x" << n.var; break;
    case Op::neg: os << "-(" << s(n.kids[0]) << ")"; break;
    case Op::add: os << "(" << s(n.kids[0]) << " + " << s(n.kids[1]) << ")"; break;
    case Op::sub: os << "(" << s(n.kids[0]) << " - " << s(n.kids[1]) << ")"; break;
    case Op::mul: os << s(n.kids[0]) << "*" << s(n.kids[1]); break;
    case Op::div: os << s(n.kids[0]) << "/(" << s(n.kids[1]) << ")"; break;
    case Op::sin: os << "sin(" << s(n.kids[0]) << ")"; break;
    case Op::cos: os << "cos(" << s(n.kids[0]) << ")"; break;
    case Op::exp: os << "exp(" << s(n.kids[0]) << ")"; break;
    case Op::log: os << "log(" << s(n.kids[0]) << ")"; break;
    case Op::sqrt: os << "sqrt(" << s(n.kids[0]) << ")"; break;
    case Op::tanh: os << "tanh(" << s(n.kids[0]) << ")"; break;
    case Op::atan: os << "atan(" << s(n.kids[0]) << ")"; break;
    case Op::tan: os << "tan(" << s(n.kids[0]) << ")"; break;
    case Op::pow: os << "(" << s(n.kids[0]) << ")^" << n.p; break;
    case Op::moll: {
        const char* nm[] = {"mu", "chi", "M", "blend", "V"};
        os << nm[int(n.mk)];
        for (int i = 0; i < n.order; ++i) os << "'";
        os << "(" << s(n.kids[0]) << ")";
        break;
    }
    case Op::compose: {
        os << "[" << s(n.kids[0]) << "](";
        for (std::size_t j = 1; j < n.kids.size(); ++j) os << (j > 1 ? ", " : "") << s(n.kids[j]);
        os << ")";
        break;
    }
    case Op::antideriv: os << "int_{" << s(n.kids[1]) << "}^{x" << n.var << "} " << s(n.kids[0]); break;
    case Op::sample: os << "g_b^(" << n.order << ")(" << s(n.kids[0]) << ")"; break;
    }
    return os.str();
}

double moll_radius(MollKind kind)
{
    switch (kind) {
    case MollKind::mu: return standard_mollifier().radius();
    case MollKind::chi: return 2.0;
    case MollKind::mu_cum: return standard_mollifier().radius();
    case MollKind::step_blend: return 1.0;
    case MollKind::vp: return standard_mollifier().vp_far();
    }
    return 0.0;
}

double moll_value(MollKind kind, int order, double u)
{
    const MollifierFn& mu = standard_mollifier();
    switch (kind) {
    case MollKind::mu: return mu.derivative(u, order);
    case MollKind::chi: return build_cutoff().derivative(u, order);
    case MollKind::mu_cum: return order == 0 ? mu.cumulative(u) : mu.derivative(u, order - 1);
    case MollKind::step_blend: return step_blend(u, order);
    case MollKind::vp: return mu.vp_kernel(u, order);
    }
    return 0.0;
}

namespace {

double sample_value(const Embedded& e, int order, double a, std::size_t i)
{
    const double b = e.b.at(i);
    const MollifierFn& mu = standard_mollifier();
    const double R = mu.radius();
    std::vector<double> br;
    for (double k : e.kinks) {
        double s = b * (a - k);
        if (std::abs(s) < R) br.push_back(s);
    }
    auto f = [&](double s) { return e.g(a - s / b) * mu.derivative(s, order); };
    return std::pow(b, order) * integrate_panels(f, -R, R, {}, br);
}

const std::vector<LayerInfo>& antideriv_layers(const Node& n)
{
    std::call_once(n.layers_once, [&] {
        n.layers = std::make_shared<const std::vector<LayerInfo>>(collect_layers(n.kids[0], n.var));
    });
    return *n.layers;
}

} // namespace

double eval(const Expr& f, const double* x, std::size_t i)
{
    const Node& n = f.node();
    auto e = [&](int j) { return eval(n.kids[j], x, i); };
    switch (n.op) {
    case Op::real: return n.real;
    case Op::constant: return n.gen.at(i);
    case Op::var: return x[n.var];
    case Op::neg: return -e(0);
    case Op::add: return e(0) + e(1);
    case Op::sub: return e(0) - e(1);
    case Op::mul: return e(0) * e(1);
    case Op::div: {
        double den = e(1);
        if (den == 0.0) throw EvalError("division by zero");
        return e(0) / den;
    }
    case Op::sin: return std::sin(e(0));
    case Op::cos: return std::cos(e(0));
    case Op::exp: return std::exp(e(0));
    case Op::log: {
        double a = e(0);
        if (!(a > 0.0)) throw EvalError("log of non-positive argument");
        return std::log(a);
    }
    case Op::sqrt: {
        double a = e(0);
        if (a < 0.0) throw EvalError("sqrt of negative argument");
        return std::sqrt(a);
    }
    case Op::tanh: return std::tanh(e(0));
    case Op::atan: return std::atan(e(0));
    case Op::tan: return std::tan(e(0));
    case Op::pow: {
        double a = e(0);
        if (a < 0.0 && n.p != std::floor(n.p)) throw EvalError("non-integer power of negative argument");
        if (a == 0.0 && n.p < 0.0) throw EvalError("negative power of zero");
        return std::pow(a, n.p);
    }
    case Op::moll: return moll_value(n.mk, n.order, e(0));
    case Op::compose: {
        const std::size_t m = n.kids.size() - 1;
        double buf[8];
        std::vector<double> big;
        double* y = buf;
        if (m > 8) {
            big.resize(m);
            y = big.data();
        }
        for (std::size_t j = 0; j < m; ++j) y[j] = eval(n.kids[j + 1], x, i);
        return eval(n.kids[0], y, i);
    }
    case Op::antideriv: {
        const int k = n.var;
        const int nv = n.order;
        std::vector<double> y(x, x + nv);
        double base = eval(n.kids[1], x, i);
        return integrate_along(n.kids[0], k, y.data(), nv, base, x[k], i, antideriv_layers(n));
    }
    case Op::sample: return sample_value(*n.emb, n.order, e(0), i);
    }
    throw Error("eval: unknown node");
}

Ctx find_context(const Expr& f)
{
    const Node& n = f.node();
    if (n.op == Op::constant) return n.gen.ctx();
    if (n.op == Op::sample) return n.emb->b.ctx();
    for (const Expr& c : n.kids)
        if (Ctx c2 = find_context(c)) return c2;
    return nullptr;
}

GenNum eval(const Expr& f, const GPoint& x, const Ctx& ctx)
{
    Ctx c = ctx;
    if (!c && !x.empty()) c = x[0].ctx();
    if (!c) c = find_context(f);
    if (!c) throw InputError("eval: no context (pass one or a generalized point)");
    for (const GenNum& xi : x)
        if (!same_context(xi.ctx(), c)) throw InputError("eval: point lives on a different grid or gauge");
    if (int(x.size()) < arity(f)) throw InputError("eval: point has too few coordinates");
    Ctx cc = c;
    return GenNum::from_index(c, [f, x, cc](std::size_t i) {
        double buf[8];
        std::vector<double> big;
        double* y = buf;
        if (x.size() > 8) {
            big.resize(x.size());
            y = big.data();
        }
        for (std::size_t j = 0; j < x.size(); ++j) y[j] = x[j].at(i);
        try {
            return eval(f, y, i);
        } catch (const EvalError& e) {
            throw EvalError(e.what(), cc->grid[i]);
        }
    });
}

GenNum eval(const Expr& f, const GenNum& x) { return eval(f, GPoint{x}, x.ctx()); }

std::vector<LayerInfo> collect_layers(const Expr& f, int k)
{
    std::vector<LayerInfo> out;
    std::function<void(const Expr&)> walk = [&](const Expr& e) {
        const Node& n = e.node();
        if (n.op == Op::moll && depends_on(n.kids[0], k)) {
            LayerInfo L;
            L.arg = n.kids[0];
            L.radius = moll_radius(n.mk);
            L.darg = derive(L.arg, k);
            L.affine = !depends_on(L.darg, k);
            out.push_back(L);
        }
        if (n.op == Op::sample && depends_on(n.kids[0], k)) {
            for (double kink : n.emb->kinks) {
                LayerInfo L;
                L.arg = constant(n.emb->b) * (n.kids[0] - real(kink));
                L.radius = standard_mollifier().radius();
                L.darg = derive(L.arg, k);
                L.affine = !depends_on(L.darg, k);
                out.push_back(L);
            }
        }
        if (n.op == Op::compose) {
            std::vector<Expr> args(n.kids.begin() + 1, n.kids.end());
            for (std::size_t j = 0; j < args.size(); ++j) {
                if (!depends_on(args[j], k)) continue;
                for (const LayerInfo& inner : collect_layers(n.kids[0], int(j))) {
                    LayerInfo L;
                    L.arg = compose(inner.arg, args);
                    L.radius = inner.radius;
                    L.darg = derive(L.arg, k);
                    L.affine = !depends_on(L.darg, k);
                    out.push_back(L);
                }
            }
            for (std::size_t j = 1; j < n.kids.size(); ++j) walk(n.kids[j]);
            return;
        }
        if (n.op == Op::antideriv) {
            if (n.var == k) {
                for (const LayerInfo& L : collect_layers(n.kids[0], k)) out.push_back(L);
            }
            return;
        }
        for (const Expr& c : n.kids) walk(c);
    };
    walk(f);
    return out;
}

std::vector<Window> layer_windows(const std::vector<LayerInfo>& layers, const double* x, int k,
                                  std::size_t i)
{
    std::vector<Window> w;
    for (const LayerInfo& L : layers) {
        if (!L.affine) continue;
        try {
            double s = eval(L.darg, x, i);
            double a = eval(L.arg, x, i);
            if (!(std::isfinite(s) && std::isfinite(a)) || s == 0.0) continue;
            w.push_back({x[k] - a / s, L.radius / std::abs(s)});
        } catch (const EvalError&) {
        }
    }
    return w;
}

} // namespace gsf
