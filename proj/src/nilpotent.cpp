#include "gsf/nilpotent.hpp"
#include "gsf/error.hpp"

#include <boost/math/special_functions/factorials.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace gsf {

namespace {

double factorial(int n) { return boost::math::factorial<double>(unsigned(n)); }

void require_order(double j, const char* who)
{
    if (!(j > 0.0) || !std::isfinite(j)) throw InputError(std::string(who) + ": order j must be a positive real");
}

GenNum ipow(const GenNum& x, int k)
{
    return map(x, [k](double v) {
        double r = 1.0;
        for (int t = 0; t < k; ++t) r *= v;
        return r;
    });
}

} // namespace

EqUpto eq_upto(const GenNum& x, const GenNum& y, double j, double c_max)
{
    require_order(j, "eq_upto");
    require_same(x, y);
    const Ctx& c = x.ctx();
    EqUpto r;
    std::vector<double> lr, lrho;
    for (std::size_t i = c->tail_start(); i < c->size(); ++i) {
        double d = std::abs(x.at(i) - y.at(i));
        if (!std::isfinite(d)) {
            r.C = std::numeric_limits<double>::infinity();
            r.unbounded = true;
            return r;
        }
        if (d == 0.0) continue;
        double l = std::log(d) - c->log_rho[i] / j;
        r.C = std::max(r.C, std::exp(l));
        lr.push_back(l);
        lrho.push_back(c->log_rho[i]);
    }
    if (lr.size() >= 3) {
        r.slope = fit_line(lrho, lr).slope;
        // a ratio that keeps growing toward eps -> 0 is not bounded, whatever its size on the grid
        r.unbounded = r.slope < -0.02 && r.C >= 1e-2;
        // Two bounded terms of different order that cancel somewhere on the grid also rise
        // after the crossing, but decelerate. Growth must keep its rate from the middle to
        // the finest third of the tail and peak at the finest sample.
        if (r.unbounded && lr.size() >= 6) {
            const std::size_t n = lr.size(), t = n / 3;
            auto slope = [&](std::size_t a, std::size_t b) {
                return fit_line({lrho.begin() + a, lrho.begin() + b}, {lr.begin() + a, lr.begin() + b}).slope;
            };
            double sm = slope(n - 2 * t, n - t), sf = slope(n - t, n);
            bool peak_last = lr.back() >= *std::max_element(lr.begin() + (n - 2 * t), lr.end()) - 1e-12;
            if (sf > std::min(-0.02, 0.5 * sm) || !peak_last) r.unbounded = false;
        }
    }
    r.holds = r.C <= c_max && !r.unbounded;
    return r;
}

bool in_Dkj(const GenNum& x, int k, double j)
{
    if (k < 1) throw InputError("in_Dkj: k must be >= 1");
    return eq_upto(ipow(x, k + 1), GenNum::constant(x.ctx(), 0.0), j).holds;
}

GenNum TaylorPoly::operator()(const GenNum& u) const
{
    GenNum s = GenNum::constant(u.ctx(), 0.0);
    for (int r = n; r >= 0; --r) s = s * u + coeffs[std::size_t(r)];
    return s;
}

GenNum TaylorPoly::remainder_bound(const GenNum& lo, const GenNum& hi, const GenNum& u) const
{
    Expr d = derive(f, std::vector<int>{n + 1});
    Extremum ex = extremum(d, FCBox{{lo}, {hi}});
    GenNum M = sup(abs(ex.min), abs(ex.max));
    return M * ipow(abs(u), n + 1) / factorial(n + 1);
}

TaylorPoly taylor_poly(const Expr& f, const GenNum& a, int n)
{
    if (n < 0) throw InputError("taylor_poly: n must be >= 0");
    if (arity(f) > 1) throw InputError("taylor_poly: f must be scalar in variable 0");
    if (n + 1 > d_max) throw InputError("taylor_poly: order exceeds d_max");
    TaylorPoly T{f, a, n, {}};
    Expr d = f;
    for (int r = 0; r <= n; ++r) {
        if (r > 0) d = derive(d, 0);
        T.coeffs.push_back(eval(d, a) / factorial(r));
    }
    return T;
}

GenNum taylor_remainder(const Expr& f, const GenNum& a, int n, const GenNum& u)
{
    require_same(a, u);
    Expr d = derive(f, std::vector<int>{n + 1});
    Expr s = var(0);
    Expr g = compose(d, {constant(a) + constant(u) * s});
    Expr w = real(1.0);
    for (int t = 0; t < n; ++t) w = w * (1.0 - s);
    const Ctx& c = a.ctx();
    GenNum I = integrate_1d(g * w, GenNum::constant(c, 0.0), GenNum::constant(c, 1.0));
    return I * ipow(u, n + 1) / factorial(n);
}

NilpotentTaylor check_taylor_nilpotent(const Expr& f, const GenNum& x, int n, double j, unsigned seed)
{
    require_order(j, "check_taylor_nilpotent");
    const Ctx& c = x.ctx();
    NilpotentTaylor out;
    TaylorPoly T = taylor_poly(f, x, n);
    std::vector<double> mult{1.0, -1.0, 0.5, -0.75};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(0.1, 1.0);
    for (int t = 0; t < 4; ++t) mult.push_back((t % 2 ? -1.0 : 1.0) * U(rng));

    std::ostringstream detail;
    for (int step = 0; step <= 6; ++step) {
        const double e = j / double(1 << step);
        GenNum base = drho(c, 1.0 / (double(n + 1) * e));
        bool all = true;
        double min_order = std::numeric_limits<double>::infinity(), C = 0.0;
        double worst = -1.0, worst_m = 0.0;
        for (double m : mult) {
            GenNum u = m * base;
            EqUpto q;
            GenNum R;
            try {
                R = taylor_remainder(f, x, n, u);
                q = eq_upto(R, GenNum::constant(c, 0.0), j);
            } catch (const Error& err) {
                detail << "e=" << e << " multiple " << m << ": " << err.what() << "\n";
                q.holds = false;
                q.C = std::numeric_limits<double>::infinity();
            }
            if (!q.holds) {
                all = false;
                if (q.C > worst) {
                    worst = q.C;
                    worst_m = m;
                }
                continue;
            }
            C = std::max(C, q.C);
            if (q.C > 0.0) min_order = std::min(min_order, q.slope + 1.0 / j);
            // the direct difference must agree wherever it is above roundoff
            GenNum fx = eval(f, x + u);
            GenNum direct = fx - T(u);
            for (std::size_t i = c->tail_start(); i < c->size(); ++i) {
                double scale = std::abs(fx.at(i));
                for (int r = 0; r <= n; ++r) scale += std::abs(T.coeffs[std::size_t(r)].at(i) * std::pow(u.at(i), r));
                if (std::abs(direct.at(i) - R.at(i)) > 1e-8 * std::abs(R.at(i)) + 1e3 * 2.2e-16 * scale) {
                    out.consistent = false;
                    detail << "e=" << e << " multiple " << m << ": direct remainder " << direct.at(i)
                           << " vs integral form " << R.at(i) << " at eps=" << c->grid[i] << "\n";
                    break;
                }
            }
        }
        if (all) {
            out.holds = true;
            out.e_witness = e;
            out.C = C;
            out.k_achieved = min_order > 0.0 && std::isfinite(min_order) ? 1.0 / min_order : 0.0;
            break;
        }
        if (out.worst_e == 0.0) {
            out.worst_e = e;
            out.worst_multiple = worst_m;
            out.worst_C = worst;
        }
    }
    if (!out.holds)
        detail << "no e in [j/64, j] passed; worst at e=" << out.worst_e << ", u = " << out.worst_multiple
               << " drho^(1/((n+1)e)), C=" << out.worst_C << "\n";
    out.detail = detail.str();
    return out;
}

Cancellation cancel(const GenNum& r, const GenNum& s, const GenNum& x, double j, double q)
{
    require_order(j, "cancel");
    require_same(r, s);
    require_same(r, x);
    if (!(1.0 / j - q > 0.0)) throw InputError("cancel: need 1/j - q > 0");
    const Ctx& c = x.ctx();
    GenNum lower = drho(c, q);
    for (std::size_t i = 0; i < c->size(); ++i) {
        if (!(std::abs(x.at(i)) >= lower.at(i) * (1.0 - 1e-12))) {
            std::ostringstream os;
            os << "cancel: |x| >= drho^" << q << " fails at eps=" << c->grid[i];
            throw InputError(os.str());
        }
    }
    Cancellation out;
    out.k = 1.0 / (1.0 / j - q);
    out.premise = eq_upto(x * r, x * s, j);
    out.conclusion = eq_upto(r, s, out.k);
    out.holds = !out.premise.holds || out.conclusion.holds;
    return out;
}

Cancellation cancel_converse(const GenNum& r, const GenNum& s, const GenNum& x, double k)
{
    require_order(k, "cancel_converse");
    require_same(r, s);
    require_same(r, x);
    AsymptoticClass cl = classify(x);
    if (cl.non_moderate || cl.label == Label::infinite || cl.label == Label::indeterminate)
        throw InputError("cancel_converse: x must be finite (got " + describe(cl) + ")");
    Cancellation out;
    out.k = k;
    out.premise = eq_upto(r, s, k);
    out.conclusion = eq_upto(x * r, x * s, k);
    out.holds = !out.premise.holds || out.conclusion.holds;
    return out;
}

LittleOh little_oh_check(const Expr& f, const GenNum& x, int n)
{
    const Ctx& c = x.ctx();
    const double lmin = *std::min_element(c->log_rho.begin(), c->log_rho.end());
    LittleOh out;
    for (double m : {1.0, 2.0, 4.0, 8.0}) {
        // u^(n+1) must stay a normal double
        if (m * double(n + 1) * lmin < -700.0) break;
        GenNum u = drho(c, m);
        GenNum ratio = taylor_remainder(f, x, n, u) * drho(c, -m * n);
        out.m.push_back(m);
        out.ratio.push_back(classify(ratio));
    }
    auto small = [](const AsymptoticClass& a) {
        return a.label == Label::infinitesimal || a.label == Label::negligible;
    };
    std::size_t k = out.ratio.size();
    out.holds = k >= 2 && small(out.ratio[k - 1]) && small(out.ratio[k - 2]);
    return out;
}

} // namespace gsf
