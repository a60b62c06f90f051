#include "gsf/calculus.hpp"
#include "gsf/error.hpp"
#include "gsf/mollifier.hpp"
#include "gsf/parallel.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace gsf {

namespace {

void require_infinite(const GenNum& b, const char* who)
{
    AsymptoticClass c = classify(b);
    if (c.label != Label::infinite || !(c.order < 0.0)) {
        throw InputError(std::string(who) + ": embedding scale b must be an infinite positive number (got " +
                         describe(c) + ")");
    }
    const Ctx& ctx = b.ctx();
    for (std::size_t i = 0; i < ctx->size(); ++i)
        if (!(b.at(i) > 0.0)) throw InputError(std::string(who) + ": b must be positive");
}

template <class Fn>
GenNum per_eps(const Ctx& ctx, Fn fn)
{
    Ctx c = ctx;
    return GenNum::from_index(ctx, [c, fn](std::size_t i) {
        try {
            return fn(i);
        } catch (const EvalError& e) {
            throw EvalError(e.what(), c->grid[i]);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(std::string(e.what()) + " at eps=" + std::to_string(c->grid[i]), e.partial());
        }
    });
}

} // namespace

GenNum embedding_scale(const Ctx& ctx, double a)
{
    if (!(a > 0.0)) throw InputError("embedding exponent a must be > 0");
    return drho(ctx, -a);
}

Expr embed_delta(const GenNum& b, const Expr& arg)
{
    require_infinite(b, "embed_delta");
    GenNum L = abs(log(b));
    Expr B = constant(b);
    return B * mollifier(MollKind::mu, B * arg) * mollifier(MollKind::chi, constant(L) * arg);
}

Expr embed_heaviside(const GenNum& b, const Expr& arg, HeavisideVariant variant)
{
    require_infinite(b, "embed_heaviside");
    Expr B = constant(b);
    if (variant == HeavisideVariant::blend) return mollifier(MollKind::step_blend, B * arg);
    return mollifier(MollKind::mu_cum, B * arg);
}

Expr embed_vp(const GenNum& b, const Expr& arg)
{
    require_infinite(b, "embed_vp");
    Expr B = constant(b);
    return B * mollifier(MollKind::vp, B * arg);
}

Expr embed_function(std::function<double(double)> g, const GenNum& b, std::vector<double> kinks, bool smooth,
                    std::vector<double> probe)
{
    require_infinite(b, "embed_function");
    if (!g) throw InputError("embed_function: empty function");
    auto e = std::make_shared<Embedded>();
    e->g = std::move(g);
    e->kinks = std::move(kinks);
    e->b = b;
    Expr f = embedded_sample(e, var(0), 0);
    if (smooth) {
        if (probe.empty()) probe = {-0.5, 0.0, 0.3, 0.7};
        const Ctx& ctx = b.ctx();
        for (std::size_t i = 0; i < ctx->size(); ++i) {
            const double bound = std::pow(b.at(i), -2.0);
            for (double x : probe) {
                double d = std::abs(eval(f, &x, i) - e->g(x));
                if (d > bound) {
                    std::ostringstream os;
                    os << "embed_function: |g_b - g| = " << d << " exceeds b^-2 at x=" << x
                       << ", eps=" << ctx->grid[i];
                    throw Error(os.str());
                }
            }
        }
    }
    return f;
}

Expr embed_function_samples(double x0, double h, std::vector<double> values, const GenNum& b)
{
    if (values.size() < 2 || !(h > 0.0)) throw InputError("embed_function: need >= 2 samples and h > 0");
    const Ctx& ctx = b.ctx();
    for (std::size_t i = 0; i < ctx->size(); ++i) {
        if (h * b.at(i) > 1.0) {
            std::ostringstream os;
            os << "embed_function: sample spacing " << h << " does not resolve 1/b at eps=" << ctx->grid[i]
               << " (b=" << b.at(i) << "); raise the eps-grid floor or use a coarser b";
            throw InputError(os.str());
        }
    }
    auto v = std::make_shared<std::vector<double>>(std::move(values));
    const double x1 = x0 + h * double(v->size() - 1);
    auto g = [v, x0, h, x1](double x) {
        if (x < x0 || x > x1) return 0.0;
        double t = (x - x0) / h;
        std::size_t j = std::min(std::size_t(t), v->size() - 2);
        double f = t - double(j);
        return (*v)[j] * (1.0 - f) + (*v)[j + 1] * f;
    };
    std::vector<double> kinks;
    for (std::size_t j = 0; j < v->size(); ++j) kinks.push_back(x0 + h * double(j));
    return embed_function(g, b, std::move(kinks));
}

GenNum incremental_ratio(const Expr& f, const GPoint& x, const GenNum& h, const GPoint& v)
{
    if (x.size() != v.size()) throw InputError("incremental_ratio: point and direction differ in dimension");
    if (!is_invertible(h, ClassifyOptions{}.n_max).invertible)
        throw EvalError("incremental_ratio: increment h is not invertible");
    GPoint xh(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) xh[k] = x[k] + h * v[k];
    GenNum f1 = eval(f, xh, h.ctx()), f0 = eval(f, x, h.ctx());
    return GenNum::from_index(h.ctx(), [f1, f0, h](std::size_t i) { return (f1.at(i) - f0.at(i)) / h.at(i); });
}

GenNum integrate_1d(const Expr& f, const GenNum& a, const GenNum& b, const QuadOptions& opt)
{
    require_same(a, b);
    if (arity(f) > 1) throw InputError("integrate_1d: integrand must depend on variable 0 only");
    auto layers = std::make_shared<const std::vector<LayerInfo>>(collect_layers(f, 0));
    return per_eps(a.ctx(), [f, a, b, layers, opt](std::size_t i) {
        double x = 0.0;
        return integrate_along(f, 0, &x, 1, a.at(i), b.at(i), i, *layers, opt);
    });
}

void check_box(const FCBox& box)
{
    if (box.lo.size() != box.hi.size() || box.lo.empty())
        throw InputError("box: lo and hi must have the same positive dimension");
    for (std::size_t k = 0; k < box.dim(); ++k) {
        require_same(box.lo[k], box.hi[k]);
        require_same(box.lo[k], box.lo[0]);
        const Ctx& c = box.lo[k].ctx();
        for (std::size_t i = 0; i < c->size(); ++i)
            if (!(box.lo[k].at(i) <= box.hi[k].at(i)))
                throw InputError("box: lo > hi at eps=" + std::to_string(c->grid[i]));
        AsymptoticClass cl = classify(sup(abs(box.lo[k]), abs(box.hi[k])));
        if (cl.non_moderate) throw InputError("box is not sharply bounded (non-moderate corner)");
    }
}

namespace {

double box_rec(const Expr& f, const std::vector<std::vector<LayerInfo>>& layers, const FCBox& box,
               std::vector<double>& x, std::size_t d, std::size_t i, const QuadOptions& opt)
{
    const std::size_t n = box.dim();
    const double lo = box.lo[d].at(i), hi = box.hi[d].at(i);
    if (d + 1 == n) return integrate_along(f, int(d), x.data(), int(n), lo, hi, i, layers[d], opt);
    x[d] = 0.5 * (lo + hi);
    std::vector<Window> w = layer_windows(layers[d], x.data(), int(d), i);
    QuadOptions outer = opt;
    outer.tol = std::max(opt.tol, 1e-11);
    auto g = [&](double s) {
        std::vector<double> y = x;
        y[d] = s;
        return box_rec(f, layers, box, y, d + 1, i, opt);
    };
    return integrate_panels(g, lo, hi, w, {}, outer);
}

} // namespace

GenNum integrate_box(const Expr& f, const FCBox& box, const QuadOptions& opt)
{
    check_box(box);
    const std::size_t n = box.dim();
    if (n > 3) throw InputError("integrate_box supports dimension <= 3");
    if (arity(f) > int(n)) throw InputError("integrate_box: integrand has more variables than the box");
    auto layers = std::make_shared<std::vector<std::vector<LayerInfo>>>();
    for (std::size_t k = 0; k < n; ++k) layers->push_back(collect_layers(f, int(k)));
    return per_eps(box.lo[0].ctx(), [f, box, layers, opt](std::size_t i) {
        std::vector<double> x(box.dim(), 0.0);
        return box_rec(f, *layers, box, x, 0, i, opt);
    });
}

Extremum extremum(const Expr& f, const FCBox& box)
{
    check_box(box);
    const std::size_t n = box.dim();
    if (n > 3) throw InputError("extremum supports dimension <= 3");
    if (arity(f) > int(n)) throw InputError("extremum: function has more variables than the box");
    const int m = n == 1 ? 2001 : (n == 2 ? 161 : 41);
    std::vector<std::vector<LayerInfo>> layers;
    for (std::size_t k = 0; k < n; ++k) layers.push_back(collect_layers(f, int(k)));
    const Ctx& ctx = box.lo[0].ctx();
    const std::size_t N = ctx->size();
    std::vector<double> mn(N), mx(N);
    std::vector<std::vector<double>> amn(N), amx(N);

    parallel_for(N, [&](std::size_t i) {
        std::vector<double> lo(n), hi(n), mid(n);
        for (std::size_t k = 0; k < n; ++k) {
            lo[k] = box.lo[k].at(i);
            hi[k] = box.hi[k].at(i);
            mid[k] = 0.5 * (lo[k] + hi[k]);
        }
        // axis samples: uniform plus dense points inside layer windows
        std::vector<std::vector<double>> ax(n);
        for (std::size_t k = 0; k < n; ++k) {
            for (int j = 0; j < m; ++j) ax[k].push_back(lo[k] + (hi[k] - lo[k]) * double(j) / double(m - 1));
            for (const Window& w : layer_windows(layers[k], mid.data(), int(k), i)) {
                double a = std::max(lo[k], w.center - w.halfwidth), b = std::min(hi[k], w.center + w.halfwidth);
                if (!(b >= a)) continue;
                for (int j = 0; j <= 128; ++j) ax[k].push_back(a + (b - a) * double(j) / 128.0);
                if (w.center >= lo[k] && w.center <= hi[k]) ax[k].push_back(w.center);
            }
            std::sort(ax[k].begin(), ax[k].end());
            ax[k].erase(std::unique(ax[k].begin(), ax[k].end()), ax[k].end());
        }
        std::vector<double> x(n);
        std::vector<std::size_t> idx(n, 0), bmin(n, 0), bmax(n, 0);
        double vmin = INFINITY, vmax = -INFINITY;
        for (;;) {
            for (std::size_t k = 0; k < n; ++k) x[k] = ax[k][idx[k]];
            double v = eval(f, x.data(), i);
            if (v < vmin) {
                vmin = v;
                bmin = idx;
            }
            if (v > vmax) {
                vmax = v;
                bmax = idx;
            }
            std::size_t k = 0;
            while (k < n && ++idx[k] == ax[k].size()) idx[k++] = 0;
            if (k == n) break;
        }
        // coordinate Brent polish
        auto polish = [&](std::vector<std::size_t> best, double sign, double& val) {
            std::vector<double> p(n);
            for (std::size_t k = 0; k < n; ++k) p[k] = ax[k][best[k]];
            for (int sweep = 0; sweep < 2; ++sweep) {
                for (std::size_t k = 0; k < n; ++k) {
                    std::size_t j = best[k];
                    double a = ax[k][j > 0 ? j - 1 : 0], b = ax[k][std::min(j + 1, ax[k].size() - 1)];
                    if (!(b > a)) continue;
                    auto g = [&](double s) {
                        std::vector<double> q = p;
                        q[k] = s;
                        return sign * eval(f, q.data(), i);
                    };
                    auto r = boost::math::tools::brent_find_minima(g, a, b, 40);
                    double cand = sign * r.second;
                    if ((sign > 0 && cand < val) || (sign < 0 && cand > val)) {
                        val = cand;
                        p[k] = r.first;
                    }
                }
            }
            return p;
        };
        double pmin = vmin, pmax = vmax;
        amn[i] = polish(bmin, 1.0, pmin);
        amx[i] = polish(bmax, -1.0, pmax);
        mn[i] = pmin;
        mx[i] = pmax;
    });

    Extremum out;
    out.samples_per_axis = m;
    out.min = GenNum::from_values(ctx, mn);
    out.max = GenNum::from_values(ctx, mx);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> a(N), b(N);
        for (std::size_t i = 0; i < N; ++i) {
            a[i] = amn[i][k];
            b[i] = amx[i][k];
        }
        out.argmin.push_back(GenNum::from_values(ctx, a));
        out.argmax.push_back(GenNum::from_values(ctx, b));
    }
    return out;
}

GenNum solve_scalar(const Expr& f, const GenNum& y, const GenNum& a, const GenNum& b, double tol_root)
{
    require_same(a, b);
    require_same(a, y);
    if (arity(f) > 1) throw InputError("solve_scalar: function must depend on variable 0 only");
    return per_eps(a.ctx(), [f, y, a, b, tol_root](std::size_t i) {
        double lo = a.at(i), hi = b.at(i), yv = y.at(i);
        double flo = eval(f, &lo, i) - yv, fhi = eval(f, &hi, i) - yv;
        if (flo == 0.0) return lo;
        if (fhi == 0.0) return hi;
        if (flo * fhi > 0.0) throw EvalError("solve_scalar: y is not bracketed by f(a), f(b)");
        const double scale = std::max({1.0, std::abs(yv), std::abs(flo + yv), std::abs(fhi + yv)});
        for (int it = 0; it < 400; ++it) {
            double c = 0.5 * (lo + hi);
            if (!(c > lo && c < hi)) return c;
            double fc = eval(f, &c, i) - yv;
            if (std::abs(fc) <= tol_root * scale) return c;
            if ((fc < 0.0) == (flo < 0.0)) {
                lo = c;
                flo = fc;
            } else {
                hi = c;
            }
        }
        return 0.5 * (lo + hi);
    });
}

void export_samples_csv(std::ostream& os, const Expr& f, const Ctx& ctx, const std::vector<double>& xs)
{
    os << "epsilon,x,f_eps_of_x\n" << std::setprecision(17);
    for (std::size_t i = 0; i < ctx->size(); ++i)
        for (double x : xs) os << ctx->grid[i] << ',' << x << ',' << eval(f, &x, i) << '\n';
}

} // namespace gsf
