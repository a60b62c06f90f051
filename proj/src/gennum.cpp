#include "gsf/gennum.hpp"
#include "gsf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace gsf {

struct GenNum::Impl {
    Ctx ctx;
    IndexFn fn;
    bool constant = false;
    mutable std::vector<double> cache;
    mutable std::unique_ptr<std::once_flag[]> flags;
};

namespace {

std::shared_ptr<GenNum::Impl> make_impl(const Ctx& ctx, GenNum::IndexFn fn, bool constant)
{
    if (!ctx) throw InputError("GenNum needs a context");
    auto p = std::make_shared<GenNum::Impl>();
    p->ctx = ctx;
    p->fn = std::move(fn);
    p->constant = constant;
    p->cache.assign(ctx->size(), 0.0);
    p->flags.reset(new std::once_flag[ctx->size()]);
    return p;
}

} // namespace

GenNum GenNum::constant(const Ctx& ctx, double r)
{
    GenNum g;
    g.impl_ = make_impl(ctx, [r](std::size_t) { return r; }, true);
    return g;
}

GenNum GenNum::from_index(const Ctx& ctx, IndexFn fn)
{
    GenNum g;
    g.impl_ = make_impl(ctx, std::move(fn), false);
    return g;
}

GenNum GenNum::from_eps(const Ctx& ctx, std::function<double(double)> fn)
{
    auto c = ctx;
    return from_index(ctx, [c, fn = std::move(fn)](std::size_t i) { return fn(c->grid[i]); });
}

GenNum GenNum::from_values(const Ctx& ctx, std::vector<double> v)
{
    if (v.size() != ctx->size()) throw InputError("value count does not match grid");
    auto shared = std::make_shared<std::vector<double>>(std::move(v));
    return from_index(ctx, [shared](std::size_t i) { return (*shared)[i]; });
}

const Ctx& GenNum::ctx() const
{
    if (!impl_) throw Error("empty GenNum");
    return impl_->ctx;
}

std::size_t GenNum::size() const { return ctx()->size(); }

bool GenNum::is_constant() const { return impl_ && impl_->constant; }

double GenNum::at(std::size_t i) const
{
    if (!impl_) throw Error("empty GenNum");
    Impl& p = *impl_;
    std::call_once(p.flags[i], [&] { p.cache[i] = p.fn(i); });
    return p.cache[i];
}

std::vector<double> GenNum::values() const
{
    std::vector<double> v(size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = at(i);
    return v;
}

void require_same(const GenNum& a, const GenNum& b)
{
    if (!same_context(a.ctx(), b.ctx()))
        throw InputError("generalized numbers live on different grids or gauges");
}

GenNum drho(const Ctx& ctx, double a)
{
    auto c = ctx;
    if (a == 1.0) return GenNum::from_index(ctx, [c](std::size_t i) { return c->rho[i]; });
    return GenNum::from_index(ctx, [c, a](std::size_t i) {
        if (c->gauge.kind() == GaugeKind::identity && a == std::round(a) && std::abs(a) <= 64)
            return std::pow(c->rho[i], a);
        return std::exp(a * c->log_rho[i]);
    });
}

GenNum eps_net(const Ctx& ctx)
{
    auto c = ctx;
    return GenNum::from_index(ctx, [c](std::size_t i) { return c->grid[i]; });
}

GenNum zip(const GenNum& x, const GenNum& y, std::function<double(double, double)> f)
{
    require_same(x, y);
    if (x.is_constant() && y.is_constant()) return GenNum::constant(x.ctx(), f(x.at(0), y.at(0)));
    return GenNum::from_index(x.ctx(), [x, y, f = std::move(f)](std::size_t i) {
        return f(x.at(i), y.at(i));
    });
}

GenNum map(const GenNum& x, std::function<double(double)> f)
{
    if (x.is_constant()) return GenNum::constant(x.ctx(), f(x.at(0)));
    return GenNum::from_index(x.ctx(), [x, f = std::move(f)](std::size_t i) { return f(x.at(i)); });
}

GenNum operator+(const GenNum& a, const GenNum& b) { return zip(a, b, std::plus<double>()); }
GenNum operator-(const GenNum& a, const GenNum& b) { return zip(a, b, std::minus<double>()); }
GenNum operator*(const GenNum& a, const GenNum& b) { return zip(a, b, std::multiplies<double>()); }

GenNum operator/(const GenNum& a, const GenNum& b)
{
    require_same(a, b);
    if (!is_invertible(b, ClassifyOptions{}.n_max).invertible)
        throw EvalError("division by a non-invertible generalized number");
    return zip(a, b, [](double u, double v) { return u * (1.0 / v); });
}

GenNum operator-(const GenNum& a) { return map(a, [](double u) { return -u; }); }
GenNum operator+(const GenNum& a, double b) { return a + GenNum::constant(a.ctx(), b); }
GenNum operator+(double a, const GenNum& b) { return GenNum::constant(b.ctx(), a) + b; }
GenNum operator-(const GenNum& a, double b) { return a - GenNum::constant(a.ctx(), b); }
GenNum operator-(double a, const GenNum& b) { return GenNum::constant(b.ctx(), a) - b; }
GenNum operator*(const GenNum& a, double b) { return a * GenNum::constant(a.ctx(), b); }
GenNum operator*(double a, const GenNum& b) { return GenNum::constant(b.ctx(), a) * b; }
GenNum operator/(const GenNum& a, double b) { return a / GenNum::constant(a.ctx(), b); }
GenNum operator/(double a, const GenNum& b) { return GenNum::constant(b.ctx(), a) / b; }

GenNum abs(const GenNum& x) { return map(x, [](double u) { return std::abs(u); }); }
GenNum inf(const GenNum& x, const GenNum& y) { return zip(x, y, [](double u, double v) { return std::min(u, v); }); }
GenNum sup(const GenNum& x, const GenNum& y) { return zip(x, y, [](double u, double v) { return std::max(u, v); }); }
GenNum pow(const GenNum& x, double p) { return map(x, [p](double u) { return std::pow(u, p); }); }
GenNum exp(const GenNum& x) { return map(x, [](double u) { return std::exp(u); }); }
GenNum log(const GenNum& x) { return map(x, [](double u) { return std::log(u); }); }
GenNum sqrt(const GenNum& x) { return map(x, [](double u) { return std::sqrt(u); }); }
GenNum sin(const GenNum& x) { return map(x, [](double u) { return std::sin(u); }); }
GenNum cos(const GenNum& x) { return map(x, [](double u) { return std::cos(u); }); }

std::string to_string(Label l)
{
    switch (l) {
    case Label::negligible: return "negligible";
    case Label::infinitesimal: return "infinitesimal";
    case Label::finite_nonzero: return "finite_nonzero";
    case Label::near_standard: return "near_standard";
    case Label::infinite: return "infinite";
    case Label::indeterminate: return "indeterminate";
    }
    return "?";
}

std::string to_string(Relation r)
{
    switch (r) {
    case Relation::equal: return "x = y";
    case Relation::less_equal: return "x <= y";
    case Relation::greater_equal: return "x >= y";
    case Relation::mixed: return "mixed";
    }
    return "?";
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    LineFit f;
    const double n = double(x.size());
    if (x.size() < 2) return f;
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.rms = std::sqrt(ss / n);
    return f;
}

std::optional<double> near_standard_part(const GenNum& x, double tol_std)
{
    const Ctx& c = x.ctx();
    std::vector<double> v;
    for (std::size_t i = c->tail_start(); i < c->size(); ++i) v.push_back(x.at(i));
    const std::size_t n = v.size();
    if (n < 4) return std::nullopt;
    for (double u : v)
        if (!std::isfinite(u)) return std::nullopt;
    double scale = 1.0;
    for (double u : v) scale = std::max(scale, std::abs(u));
    const double noise = 1e-13 * scale;
    // tail differences must contract (or sit at roundoff level)
    std::vector<double> d;
    for (std::size_t i = 1; i < n; ++i) d.push_back(v[i] - v[i - 1]);
    for (std::size_t i = 1; i < d.size(); ++i) {
        double a = std::abs(d[i - 1]), b = std::abs(d[i]);
        if (b <= noise) continue;
        if (b > a * 1.0000001 + noise) return std::nullopt;
    }
    double d1 = d[d.size() - 2], d2 = d.back();
    double lim = v.back();
    double den = d2 - d1;
    if (std::abs(d2) > noise && std::abs(den) > noise) lim = v.back() - d2 * d2 / den;
    if (!std::isfinite(lim)) return std::nullopt;
    if (std::abs(lim - v.back()) > tol_std * std::max(1.0, std::abs(lim))) return std::nullopt;
    return lim;
}

AsymptoticClass classify(const GenNum& x, const ClassifyOptions& opt)
{
    AsymptoticClass out;
    const Ctx& c = x.ctx();
    const std::size_t N = c->size(), ts = c->tail_start();
    std::vector<double> v = x.values();
    for (std::size_t i = 0; i < N; ++i) {
        if (std::isnan(v[i])) {
            out.diagnostic = "NaN at eps=" + std::to_string(c->grid[i]);
            return out;
        }
        if (std::isinf(v[i])) {
            out.non_moderate = true;
            out.order = -std::numeric_limits<double>::infinity();
            out.diagnostic = "overflow at eps=" + std::to_string(c->grid[i]) + "; non-moderate suspected";
            return out;
        }
    }
    std::size_t zeros = 0;
    bool below = true;
    for (std::size_t i = ts; i < N; ++i) {
        if (v[i] == 0.0) {
            ++zeros;
            continue;
        }
        if (std::log(std::abs(v[i])) > opt.n_max * c->log_rho[i]) below = false;
    }
    if (zeros == N - ts || below) {
        out.label = Label::negligible;
        out.order = std::numeric_limits<double>::infinity();
        if (zeros != N - ts) {
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t i = ts; i < N; ++i)
                if (v[i] != 0.0) m = std::min(m, std::log(std::abs(v[i])) / c->log_rho[i]);
            out.order = m;
        }
        return out;
    }
    if (zeros > 0) {
        out.diagnostic = "vanishes on a subpoint of the tail only";
        return out;
    }
    std::vector<double> lx, ly, ll;
    for (std::size_t i = ts; i < N; ++i) {
        lx.push_back(c->log_rho[i]);
        ly.push_back(std::log(std::abs(v[i])));
        ll.push_back(std::log(-c->log_rho[i]));
        if (ly.back() > -opt.n_max * c->log_rho[i]) out.non_moderate = true;
    }
    LineFit pf = fit_line(lx, ly);
    LineFit lf = fit_line(ll, ly);
    out.order = pf.slope;
    out.fit_residual = pf.rms;
    if (out.non_moderate) {
        out.diagnostic = "exceeds rho^-n_max; non-moderate suspected";
        return out;
    }
    if (pf.rms > opt.max_residual) {
        out.diagnostic = "no clean power law on the tail";
        return out;
    }
    // sub-polynomial behaviour: a power of |log rho| explains the tail better
    const bool logscale = pf.rms > 1e-3 && lf.rms < 0.5 * pf.rms && std::abs(lf.slope) > 0.2;
    if (pf.slope > opt.order_tol) {
        out.label = Label::infinitesimal;
        out.far_from_zero = logscale && lf.slope < 0;
        return out;
    }
    if (pf.slope < -opt.order_tol) {
        out.label = Label::infinite;
        out.far_from_zero = logscale;
        return out;
    }
    if (auto lim = near_standard_part(x, opt.tol_std)) {
        double scale = 0;
        for (std::size_t i = ts; i < N; ++i) scale = std::max(scale, std::abs(v[i]));
        if (std::abs(*lim) > 1e-9 * scale) {
            out.label = Label::near_standard;
            out.limit = *lim;
            return out;
        }
    }
    if (logscale && lf.slope < 0) {
        out.label = Label::infinitesimal;
        out.far_from_zero = true;
        out.limit = 0.0;
    } else if (logscale && lf.slope > 0) {
        out.label = Label::infinite;
        out.far_from_zero = true;
    } else {
        out.label = Label::finite_nonzero;
    }
    return out;
}

std::string describe(const AsymptoticClass& c)
{
    std::ostringstream os;
    os << "label=" << to_string(c.label) << " order=" << c.order << " residual=" << c.fit_residual;
    if (c.limit) os << " limit=" << *c.limit;
    if (c.non_moderate) os << " non-moderate-suspected";
    if (c.far_from_zero) os << " far-from-zero";
    if (!c.diagnostic.empty()) os << " (" << c.diagnostic << ")";
    return os.str();
}

Invertibility is_invertible(const GenNum& x, int m_max)
{
    Invertibility r;
    const Ctx& c = x.ctx();
    const std::size_t N = c->size(), ts = c->tail_start();
    // smallest integer m with |x| > rho^m on the whole tail
    double need = -std::numeric_limits<double>::infinity();
    bool any_zero = false, any_pass = false;
    for (std::size_t i = ts; i < N; ++i) {
        double a = std::abs(x.at(i));
        if (!(a > 0.0) || std::isnan(a)) {
            any_zero = true;
            continue;
        }
        double e = std::log(a) / c->log_rho[i];
        need = std::max(need, e);
        if (e < m_max) any_pass = true;
    }
    if (any_zero) {
        r.inconclusive = any_pass;
        return r;
    }
    int m = std::max(0, int(std::floor(need)) + 1);
    if (m <= m_max) {
        r.invertible = true;
        r.m = m;
    } else {
        r.inconclusive = any_pass;
    }
    return r;
}

bool leq(const GenNum& x, const GenNum& y, int n_eq)
{
    require_same(x, y);
    const Ctx& c = x.ctx();
    for (std::size_t i = c->tail_start(); i < c->size(); ++i) {
        double tol = std::exp(n_eq * c->log_rho[i]);
        if (!(x.at(i) <= y.at(i) + tol)) return false;
    }
    return true;
}

bool lt(const GenNum& x, const GenNum& y, int n_eq)
{
    return leq(x, y, n_eq) && is_invertible(y - x, n_eq).invertible;
}

Comparison decompose_comparison(const GenNum& x, const GenNum& y, int n_eq)
{
    require_same(x, y);
    const Ctx& c = x.ctx();
    const std::size_t N = c->size();
    Comparison out;
    std::vector<int> sgn(N);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < N; ++i) {
        double d = x.at(i) - y.at(i);
        double tol = std::exp(n_eq * c->log_rho[i]);
        sgn[i] = d > tol ? 1 : (d < -tol ? -1 : 0);
        has_pos |= sgn[i] > 0;
        has_neg |= sgn[i] < 0;
    }
    auto cof = [&](const std::vector<std::size_t>& idx) {
        return std::count_if(idx.begin(), idx.end(),
                             [&](std::size_t i) { return i >= c->tail_start(); }) >= 2;
    };
    if (!(has_pos && has_neg)) {
        out.relation = has_pos ? Relation::greater_equal : (has_neg ? Relation::less_equal : Relation::equal);
        for (std::size_t i = 0; i < N; ++i) out.L.indices.push_back(i);
        out.L.cofinal = true;
        return out;
    }
    out.relation = Relation::mixed;
    for (std::size_t i = 0; i < N; ++i) (sgn[i] >= 0 ? out.L : out.Lc).indices.push_back(i);
    out.L.cofinal = cof(out.L.indices);
    out.Lc.cofinal = cof(out.Lc.indices);
    return out;
}

GenNum nudge_invertible(const GenNum& h, const GenNum& delta)
{
    require_same(h, delta);
    Invertibility inv = is_invertible(delta, ClassifyOptions{}.n_max);
    if (!inv.invertible) throw InputError("nudge_invertible: delta is not invertible");
    const int m = inv.m + 1;
    auto c = h.ctx();
    return GenNum::from_index(c, [h, c, m](std::size_t i) {
        double floor_v = std::exp(m * c->log_rho[i]);
        double v = h.at(i);
        return std::abs(v) >= floor_v ? v : floor_v;
    });
}

bool in_internal_interval(const GenNum& x, const GenNum& a, const GenNum& b, const ClassifyOptions& opt)
{
    require_same(x, a);
    require_same(x, b);
    GenNum d = GenNum::from_index(x.ctx(), [x, a, b](std::size_t i) {
        double xv = x.at(i);
        return std::max({a.at(i) - xv, 0.0, xv - b.at(i)});
    });
    return classify(d, opt).label == Label::negligible;
}

} // namespace gsf
