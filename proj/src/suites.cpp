#include "gsf/suites.hpp"
#include "gsf/error.hpp"
#include "gsf/hft.hpp"
#include "gsf/mollifier.hpp"
#include "gsf/nilpotent.hpp"
#include "gsf/ode.hpp"
#include "gsf/physics.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace gsf {

bool SuiteReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed; });
}

const SuiteCheck& SuiteReport::check(const std::string& name) const
{
    for (const SuiteCheck& c : checks)
        if (c.name == name) return c;
    throw InputError("suite " + suite + ": no check named " + name);
}

namespace {

double unif(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

int pick(Rng& rng, int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

// Collects per-instance residuals against one tolerance.
class Tally {
public:
    Tally(std::string name, double tol) { c_.name = std::move(name), c_.tolerance = tol; }

    void add(double resid, const std::string& what)
    {
        ++c_.instances;
        if (!(resid <= c_.tolerance)) fail(what + " residual " + fmt(resid));
        if (std::isnan(resid)) c_.achieved = resid;
        else if (!std::isnan(c_.achieved)) c_.achieved = std::max(c_.achieved, resid);
    }
    void flag(bool ok, const std::string& what)
    {
        ++c_.instances;
        if (!ok) fail(what);
        c_.achieved = c_.failures;
    }
    void note(const std::string& s) { extra_ = s; }

    SuiteCheck done() const
    {
        SuiteCheck c = c_;
        c.passed = c.instances > 0 && c.failures == 0;
        std::ostringstream os;
        os << "n=" << c.instances << " failures=" << c.failures;
        if (!extra_.empty()) os << ' ' << extra_;
        if (!first_.empty()) os << " first: " << first_;
        c.detail = os.str();
        return c;
    }

    static std::string fmt(double v)
    {
        std::ostringstream os;
        os << std::setprecision(3) << v;
        return os.str();
    }

private:
    void fail(const std::string& what)
    {
        if (c_.failures++ == 0) first_ = what;
    }
    SuiteCheck c_;
    std::string first_, extra_;
};

// max over eps of |a - b| / scale
double worst(const GenNum& a, const GenNum& b, const GenNum& scale)
{
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double r = std::abs(a.at(i) - b.at(i)) / scale.at(i);
        if (std::isnan(r)) return r;
        w = std::max(w, r);
    }
    return w;
}

GenNum one_plus_abs(const std::vector<GenNum>& v)
{
    GenNum s = GenNum::constant(v[0].ctx(), 1.0);
    for (const GenNum& x : v) s = s + abs(x);
    return s;
}

GenNum C(const Ctx& c, double v) { return GenNum::constant(c, v); }

std::string eq_note(const EqUpto& e)
{
    std::ostringstream os;
    os << std::setprecision(3) << " (C " << e.C << ", slope " << e.slope << (e.unbounded ? ", unbounded)" : ")");
    return os.str();
}

std::string label_of(int n, const char* what)
{
    std::ostringstream os;
    os << what << ' ' << n;
    return os.str();
}

// ---------------------------------------------------------------- ring

SuiteReport ring_suite(const Ctx& c, Rng& rng)
{
    Tally comm("commutativity_exact", 0.0), assoc("associativity", 1e-14), dist("distributivity", 1e-14),
        norm_mul("abs_multiplicative_exact", 0.0), tri("triangle_inequality", 0.0), order("lt_implies_leq_and_invertible", 0.0),
        asym("lt_asymmetric", 0.0), part("comparison_masks_partition_grid", 0.0), mask("mask_pointwise", 0.0),
        ns("near_standard_part", 1e-6), cls("classify_order", 0.05);
    const std::size_t n = c->size();
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> vx(n), vy(n), vz(n);
        for (std::size_t i = 0; i < n; ++i) {
            vx[i] = unif(rng, -2.0, 2.0);
            vy[i] = unif(rng, -2.0, 2.0) * c->rho[i];
            vz[i] = unif(rng, -2.0, 2.0) / c->rho[i];
        }
        GenNum x = GenNum::from_values(c, vx), y = GenNum::from_values(c, vy), z = GenNum::from_values(c, vz);
        const std::string tag = label_of(trial, "trial");
        GenNum l1 = x + y, r1 = y + x, l2 = x * y, r2 = y * x;
        GenNum l3 = (x + y) + z, r3 = x + (y + z), l4 = x * (y + z), r4 = x * y + x * z;
        GenNum l5 = (x * y) * z, r5 = x * (y * z);
        GenNum n1 = abs(x * y), n2 = abs(x) * abs(y), t1 = abs(x + y), t2 = abs(x) + abs(y);
        double ce = 0.0, as = 0.0, di = 0.0, nm = 0.0, tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ce = std::max({ce, std::abs(l1.at(i) - r1.at(i)), std::abs(l2.at(i) - r2.at(i))});
            // rounding of the intermediate sums, measured against the largest summand
            as = std::max(as, std::abs(l3.at(i) - r3.at(i)) / (std::abs(vx[i]) + std::abs(vy[i]) + std::abs(vz[i])));
            as = std::max(as, std::abs(l5.at(i) - r5.at(i)) / std::abs(vx[i] * vy[i] * vz[i]));
            di = std::max(di, std::abs(l4.at(i) - r4.at(i)) / (std::abs(vx[i]) * (std::abs(vy[i]) + std::abs(vz[i]))));
            nm = std::max(nm, std::abs(n1.at(i) - n2.at(i)));
            tr = std::max(tr, std::max(0.0, t1.at(i) - t2.at(i)));
        }
        comm.add(ce, tag);
        assoc.add(as, tag);
        dist.add(di, tag);
        norm_mul.add(nm, tag);
        tri.add(tr, tag);

        for (auto [p, q] : {std::pair{x, y}, std::pair{y, x}, std::pair{x, z}, std::pair{x, x + drho(c, 2.0)}}) {
            bool ab = lt(p, q), ba = lt(q, p);
            asym.flag(!(ab && ba), tag);
            if (ab) order.flag(leq(p, q) && is_invertible(q - p).invertible, tag);
        }

        // a sign pattern that changes along the grid
        GenNum w = GenNum::from_values(c, [&] {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = vx[i] + (pick(rng, 2) ? 1.0 : -1.0);
            return v;
        }());
        Comparison cmp = decompose_comparison(w, x);
        std::vector<std::size_t> all = cmp.L.indices;
        if (cmp.relation == Relation::mixed) all.insert(all.end(), cmp.Lc.indices.begin(), cmp.Lc.indices.end());
        std::sort(all.begin(), all.end());
        bool partition = all.size() == n && std::adjacent_find(all.begin(), all.end()) == all.end();
        part.flag(partition, tag);
        if (cmp.relation == Relation::mixed || cmp.relation == Relation::greater_equal) {
            double bad = 0.0;
            for (std::size_t i : cmp.L.indices) bad = std::max(bad, x.at(i) - w.at(i) - 1e-12 * (1.0 + std::abs(x.at(i))));
            mask.add(std::max(0.0, bad), tag);
        }

        double r = unif(rng, -5.0, 5.0);
        auto s = near_standard_part(r + drho(c));
        ns.add(s ? std::abs(*s - r) / std::max(1.0, std::abs(r)) : INFINITY, tag);
    }
    for (double a : {-3.0, -1.0, 0.5, 1.0, 2.0}) {
        AsymptoticClass k = classify(drho(c, a));
        cls.add(std::abs(k.order - a), label_of(int(a * 2), "2a ="));
    }
    SuiteReport out;
    for (const Tally* t : {&comm, &assoc, &dist, &norm_mul, &tri, &order, &asym, &part, &mask, &ns, &cls})
        out.checks.push_back(t->done());
    return out;
}

// ---------------------------------------------------------------- mollifier

SuiteReport mollifier_suite(Rng& rng)
{
    const MollifierFn& mu = standard_mollifier();
    Tally unit("unit_integral", 1e-10), mom("vanishing_moments_1_to_8", 1e-8), zeros("zeros_at_integers", 1e-8),
        at0("value_at_zero", 1e-10), poisson("integer_translates_sum_to_one", 1e-6),
        odd("derivative_odd", 1e-10), fd("derivatives_match_central_differences", 1e-6);
    unit.add(std::abs(moment(mu, 0, false).value - 1.0), "j = 0");
    for (int j = 1; j <= 8; ++j) mom.add(std::abs(moment(mu, j, false).value), label_of(j, "j ="));
    for (int k = 1; k <= 6; ++k) {
        zeros.add(std::abs(mu(k)), label_of(k, "k ="));
        zeros.add(std::abs(mu(-k)), label_of(-k, "k ="));
    }
    at0.add(std::abs(mu(0.0) - 1.0), "x = 0");
    for (int n = 0; n < 100; ++n) {
        double x = unif(rng, 0.0, 1.0), s = 0.0;
        for (int k = -60; k <= 60; ++k) s += mu(x + k);
        poisson.add(std::abs(s - 1.0), "x = " + Tally::fmt(x));
    }
    for (int n = 0; n < 100; ++n) {
        double x = unif(rng, -20.0, 20.0);
        odd.add(std::abs(mu.derivative(x, 1) + mu.derivative(-x, 1)), "x = " + Tally::fmt(x));
    }
    for (int n = 0; n < 100; ++n) {
        double x = unif(rng, -6.0, 6.0), worst_d = 0.0;
        for (int d = 0; d < 3; ++d) {
            const double h = 1e-4;
            double f1 = (mu.derivative(x + h, d) - mu.derivative(x - h, d)) / (2 * h);
            double f2 = (mu.derivative(x + 2 * h, d) - mu.derivative(x - 2 * h, d)) / (4 * h);
            double ex = mu.derivative(x, d + 1);
            worst_d = std::max(worst_d, std::abs((4.0 * f1 - f2) / 3.0 - ex) / std::max(1.0, std::abs(ex)));
        }
        fd.add(worst_d, "x = " + Tally::fmt(x));
    }
    SuiteReport out;
    for (const Tally* t : {&unit, &mom, &zeros, &at0, &poisson, &odd, &fd}) out.checks.push_back(t->done());
    return out;
}

// ---------------------------------------------------------------- calculus

Expr leaf(Rng& rng, const Ctx& c)
{
    switch (pick(rng, 5)) {
    case 0:
    case 1: return var(0);
    case 2:
    case 3: return real(std::round(unif(rng, -2.0, 2.0) * 8.0) / 8.0);
    default: return constant(unif(rng, -1.0, 1.0) + unif(rng, -1.0, 1.0) * drho(c, unif(rng, 0.5, 2.0)));
    }
}

} // namespace

Expr random_tree(Rng& rng, const Ctx& c, int depth)
{
    if (depth <= 0 || pick(rng, 5) == 0) return leaf(rng, c);
    auto sub = [&] { return random_tree(rng, c, depth - 1); };
    switch (pick(rng, 11)) {
    case 0: return sub() + sub();
    case 1: return sub() - sub();
    case 2:
    case 3: return sub() * sub();
    case 4: return sin(sub());
    case 5: return cos(sub());
    case 6: return tanh(sub());
    case 7: return atan(sub());
    case 8: return exp(0.5 * tanh(sub()));
    case 9: {
        Expr t = sub();
        return pick(rng, 2) ? log(2.0 + sin(t)) : sqrt(1.0 + t * t);
    }
    default: return sub() / (2.0 + cos(sub()));
    }
}

namespace {

// root of g on [a, b] per eps: uniform scan then TOMS 748 on the first sign change,
// else the best scanned point
double scan_root(const std::function<double(double)>& g, double a, double b)
{
    const int n = 400;
    double xb = a, gb = std::abs(g(a)), xp = a, gp = g(a);
    for (int k = 1; k <= n; ++k) {
        double x = a + (b - a) * k / n, gx = g(x);
        if (gx == 0.0) return x;
        if ((gx < 0.0) != (gp < 0.0)) {
            std::uintmax_t it = 100;
            auto r = boost::math::tools::toms748_solve(g, xp, x, gp, gx, boost::math::tools::eps_tolerance<double>(52), it);
            return 0.5 * (r.first + r.second);
        }
        if (std::abs(gx) < gb) xb = x, gb = std::abs(gx);
        xp = x, gp = gx;
    }
    return xb;
}

SuiteReport calculus_suite(const Ctx& c, Rng& rng, int trees)
{
    const double tol = 1e-9;
    Tally lin("linearity", tol), leib("leibniz", tol), chain("chain_rule", tol), ftc("fundamental_theorem", tol),
        parts("integration_by_parts", tol), cov("change_of_variables", tol), mono("monotonicity", 0.0),
        mvt("mean_value", tol), image("image_of_box", tol), diff("derivative_matches_differences", 1e-7);
    for (int t = 0; t < trees; ++t) {
        const std::string tag = label_of(t, "tree");
        Expr f = random_tree(rng, c, 3), g = random_tree(rng, c, 3), h = random_tree(rng, c, 3);
        GenNum A = C(c, unif(rng, -1.0, -0.1)) + unif(rng, -0.1, 0.1) * drho(c);
        GenNum B = C(c, unif(rng, 0.1, 1.0)) + unif(rng, -0.1, 0.1) * drho(c, 0.5);
        Expr df = derive(f, 0), dg = derive(g, 0), dh = derive(h, 0);
        try {
            for (int p = 0; p < 3; ++p) {
                GenNum x = C(c, unif(rng, -1.5, 1.5)) + unif(rng, -1.0, 1.0) * drho(c);
                GenNum fx = eval(f, x), gx = eval(g, x), fpx = eval(df, x), gpx = eval(dg, x);
                lin.add(worst(eval(derive(2.0 * f - g, 0), x), 2.0 * fpx - gpx, one_plus_abs({fpx, gpx})), tag);
                leib.add(worst(eval(derive(f * g, 0), x), fpx * gx + fx * gpx,
                               one_plus_abs({fpx * gx, fx * gpx})), tag);
                GenNum hx = eval(h, x), rhs = eval(df, hx) * eval(dh, x);
                chain.add(worst(eval(derive(compose(f, {h}), 0), x), rhs, one_plus_abs({rhs})), tag);
                // independent of the symbolic rules
                Expr fg = compose(f, {h}) * g;
                Expr dfg = derive(fg, 0);
                double fd = 0.0;
                for (std::size_t i = 0; i < c->size(); ++i) {
                    const double x0 = x.at(i), ex = eval(dfg, &x0, i);
                    auto at = [&](double s) {
                        double v = x0 + s;
                        return eval(fg, &v, i);
                    };
                    // the smaller step wins where the tree curves hard
                    double best = INFINITY;
                    for (double e : {1e-3, 2.5e-4}) {
                        double d1 = (at(e) - at(-e)) / (2 * e), d2 = (at(2 * e) - at(-2 * e)) / (4 * e);
                        best = std::min(best, std::abs((4.0 * d1 - d2) / 3.0 - ex) / (1.0 + std::abs(ex)));
                    }
                    fd = std::max(fd, best);
                }
                diff.add(fd, tag);
            }

            GenNum fA = eval(f, A), fB = eval(f, B), gA = eval(g, A), gB = eval(g, B);
            GenNum I = integrate_1d(df, A, B);
            ftc.add(worst(I, fB - fA, one_plus_abs({fA, fB})), tag);

            GenNum P = integrate_1d(df * g, A, B), Q = integrate_1d(f * dg, A, B);
            GenNum bnd = fB * gB - fA * gA;
            parts.add(worst(P, bnd - Q, one_plus_abs({fB * gB, fA * gA, Q})), tag);

            GenNum hA = eval(h, A), hB = eval(h, B);
            GenNum L = integrate_1d(compose(f, {h}) * dh, A, B), R = integrate_1d(f, hA, hB);
            cov.add(worst(L, R, one_plus_abs({R, integrate_1d(sqrt(f * f), inf(hA, hB), sup(hA, hB))})), tag);

            GenNum If = integrate_1d(f, A, B), Ig = integrate_1d(f + h * h + 0.01, A, B);
            double viol = 0.0;
            for (std::size_t i = 0; i < c->size(); ++i) viol = std::max(viol, If.at(i) - Ig.at(i));
            mono.add(std::max(0.0, viol), tag);

            double mv = 0.0;
            for (std::size_t i = 0; i < c->size(); ++i) {
                const double a = A.at(i), b = B.at(i), m = (fB.at(i) - fA.at(i)) / (b - a);
                auto gfun = [&](double s) { return eval(df, &s, i) - m; };
                double s = scan_root(gfun, a, b);
                double r = std::abs(fB.at(i) - fA.at(i) - (b - a) * eval(df, &s, i));
                mv = std::max(mv, r / (1.0 + std::abs(fA.at(i)) + std::abs(fB.at(i))));
            }
            mvt.add(mv, tag);

            Extremum ex = extremum(f, FCBox{{A}, {B}});
            GenNum sc = one_plus_abs({ex.min, ex.max});
            double im = 0.0;
            for (int k = 0; k < 5; ++k) {
                double u = unif(rng, 0.0, 1.0);
                GenNum y = ex.min + u * (ex.max - ex.min);
                GenNum lo = inf(ex.argmin[0], ex.argmax[0]), hi = sup(ex.argmin[0], ex.argmax[0]);
                GenNum root = solve_scalar(f, y, lo, hi);
                im = std::max(im, worst(eval(f, root), y, sc));
                GenNum p = A + u * (B - A), fp = eval(f, p);
                for (std::size_t i = 0; i < c->size(); ++i)
                    im = std::max(im, std::max(ex.min.at(i) - fp.at(i), fp.at(i) - ex.max.at(i)) / sc.at(i));
            }
            image.add(im, tag);
        } catch (const Error& e) {
            // any evaluation failure on a tree that is smooth by construction is a defect
            for (Tally* q : {&ftc, &parts, &cov, &mono, &mvt, &image}) q->add(INFINITY, tag + ": " + e.what());
        }
    }
    SuiteReport out;
    for (const Tally* q : {&lin, &leib, &chain, &diff, &ftc, &parts, &cov, &mono, &mvt, &image}) out.checks.push_back(q->done());
    return out;
}

// ---------------------------------------------------------------- nilpotent

// finite number with a real part and a random infinitesimal correction
GenNum finite(Rng& rng, const Ctx& c)
{
    return C(c, unif(rng, -2.0, 2.0)) + unif(rng, -1.0, 1.0) * drho(c, unif(rng, 0.2, 2.0));
}

double nonzero(Rng& rng, double lo, double hi)
{
    double a = unif(rng, lo, hi);
    return pick(rng, 2) ? a : -a;
}

SuiteReport nilpotent_suite(const Ctx& c, Rng& rng, int instances, int canc_instances)
{
    Tally refl("reflexive", 0.0), sym("symmetric", 0.0), trans("transitive", 0.0), mono("coarser_order", 0.0),
        sharp("finer_difference_rejected", 0.0), small_j("equal_for_all_small_j", 0.0), sum("sum_stable", 0.0),
        prod("product_stable", 0.0), fun("function_stable", 0.0), chain("D_chain", 0.0),
        dneg("D_membership_rejected", 0.0), infin("D_elements_infinitesimal", 0.0), ring("D_subring_ideal", 0.0),
        canc("cancellation", 0.0), conv("cancellation_converse", 0.0);
    const double js[] = {0.25, 1.0 / 3.0, 0.5, 1.0, 2.0, 3.0};
    // Nets are doubles: a difference drho^p is only visible next to a number of size
    // drho^p0 when drho^(p - p0) stays above 1e-11 on the grid tail. Instances with a
    // large 1/j therefore get infinitesimal magnitudes drho^p0.
    double rho_min = 1.0;
    for (std::size_t i = c->tail_start(); i < c->size(); ++i) rho_min = std::min(rho_min, c->rho[i]);
    const double window = std::log(1e-11) / std::log(rho_min);
    auto scale_for = [&](double p) { return std::max(0.0, p - window); };
    auto sized = [&](double p0) { return p0 > 0.0 ? finite(rng, c) * drho(c, p0) : finite(rng, c); };
    // f(0) = 0 keeps the relative resolution of an infinitesimal argument
    const Expr fs[] = {sin(var(0)), var(0) * exp(var(0)), tanh(var(0)), exp(var(0))};
    for (int n = 0; n < instances; ++n) {
        const std::string tag = label_of(n, "instance");
        const double j = js[pick(rng, 6)];
        const double p0 = scale_for(1.0 / j + 0.5);
        auto close = [&] { return nonzero(rng, 0.1, 3.0) * drho(c, 1.0 / j + unif(rng, 0.1, 0.5)); };
        GenNum x = sized(p0);
        GenNum y = x + close();
        GenNum z = y + close();
        refl.flag(eq_upto(x, x, j).holds, tag);
        sym.flag(eq_upto(x, y, j).holds && eq_upto(y, x, j).holds, tag);
        EqUpto xz = eq_upto(x, z, j);
        trans.flag(xz.holds, tag + " j = " + Tally::fmt(j) + eq_note(xz));
        mono.flag(eq_upto(x, y, j * unif(rng, 1.0, 3.0)).holds, tag);
        // a difference of order 1/j - d is not =_j
        double d = unif(rng, 0.1, 0.5);
        sharp.flag(!eq_upto(x, x + nonzero(rng, 0.1, 3.0) * drho(c, 1.0 / j - d), j).holds, tag);

        GenNum neg = nonzero(rng, 0.1, 3.0) * drho(c, unif(rng, 40.0, 60.0));
        bool all_small = true;
        for (double js2 : {0.125, 0.0625, 1.0 / 32.0}) all_small = all_small && eq_upto(neg, C(c, 0.0), js2).holds;
        small_j.flag(all_small && classify(neg).label == Label::negligible, tag);

        // the product compares x u with y v, so u needs the same resolution as x
        GenNum u = sized(p0), v = u + close();
        EqUpto es = eq_upto(x + u, y + v, j), ep = eq_upto(x * u, y * v, j);
        sum.flag(es.holds, tag + " j = " + Tally::fmt(j) + eq_note(es));
        prod.flag(ep.holds, tag + " j = " + Tally::fmt(j) + eq_note(ep));
        const Expr& f = fs[pick(rng, p0 > 0.0 ? 3 : 4)];
        fun.flag(eq_upto(eval(f, x), eval(f, y), j).holds, tag + " f = " + to_string(f));

        // nilpotents: h^(k+1) = O(drho^(1/jd + m)) with jd (k+1) <= 4 so that h stays visibly
        // infinitesimal. The margin m >= 0.1 keeps a sum of two of them from looking like slow
        // growth on the grid when their leading terms nearly cancel.
        const int k = 1 + pick(rng, 3);
        double jd = js[pick(rng, 4)];
        while (jd * (k + 1) > 4.0) jd *= 0.5;
        auto nil = [&](double over) { return nonzero(rng, 0.1, 1.0) * drho(c, over / (jd * (k + 1))); };
        auto margin = [&] { return 1.0 + jd * unif(rng, 0.1, 0.5); };
        GenNum h1 = nil(margin()), h2 = nil(margin());
        bool in = in_Dkj(h1, k, jd);
        for (int m = k + 1; m <= k + 2; ++m) in = in && in_Dkj(h1, m, jd);
        chain.flag(in, tag);
        // growth is only declared once the ratio reaches 1e-2 on the grid, hence the solid amplitude
        GenNum outside = nonzero(rng, 0.5, 1.0) * drho(c, unif(rng, 0.3, 0.8) / (jd * (k + 1)));
        dneg.flag(!in_Dkj(outside, k, jd), tag);
        Label l = classify(h1).label;
        infin.flag(l == Label::infinitesimal || l == Label::negligible, tag);
        ring.flag(in_Dkj(h1 + h2, k, jd) && in_Dkj(h1 * h2, k, jd) && in_Dkj(finite(rng, c) * h1, k, jd), tag);
    }
    for (int n = 0; n < canc_instances; ++n) {
        const std::string tag = label_of(n, "cancellation");
        const double j = js[pick(rng, 6)];
        const double q = unif(rng, 0.0, 0.9) / j;
        const double sgn = pick(rng, 2) ? 1.0 : -1.0;
        GenNum x = sgn * unif(rng, 1.0, 3.0) * drho(c, q) * (1.0 + unif(rng, 0.0, 0.5) * drho(c, 0.5));
        const double p = 1.0 / j - q + unif(rng, 0.0, 0.5), p0 = scale_for(p);
        GenNum r = sized(p0);
        GenNum s = r + nonzero(rng, 0.1, 3.0) * drho(c, p);
        Cancellation k = cancel(r, s, x, j, q);
        const double want = 1.0 / (1.0 / j - q);
        bool ok = k.premise.holds && k.conclusion.holds && std::abs(k.k - want) <= 1e-12 * want;
        canc.flag(ok, tag + " (j=" + Tally::fmt(j) + ", q=" + Tally::fmt(q) + ")");
        // kept away from zero so that classify sees a finite number
        GenNum xf = nonzero(rng, 0.5, 2.0) + unif(rng, -0.2, 0.2) * drho(c, unif(rng, 0.2, 2.0));
        Cancellation back = cancel_converse(r, s, xf, k.k);
        conv.flag(back.premise.holds && back.conclusion.holds, tag);
    }
    SuiteReport out;
    for (const Tally* t : {&refl, &sym, &trans, &mono, &sharp, &small_j, &sum, &prod, &fun, &chain, &dneg, &infin,
                           &ring, &canc, &conv})
        out.checks.push_back(t->done());
    return out;
}

// ---------------------------------------------------------------- ode

SuiteReport ode_suite(const Ctx& c)
{
    Tally pic("picard_bound", 1e-13), agree("runge_kutta_matches_picard", 1e-9), cont("continuous_dependence", 0.05),
        classical("classical_compatibility", 1e-9);
    IVP ivp{{var(1)}, C(c, 0.0), {C(c, 1.0)}, C(c, 0.5), C(c, 1.0)};
    SolveOptions tight;
    tight.rtol = 1e-13;
    tight.atol = 1e-15;
    SolvedPath y = solve_ivp(ivp, tight);
    for (int n = 1; n <= 10; ++n) {
        PicardResult p = solve_picard(ivp, n);
        GenNum err = picard_error(p, y);
        double over = 0.0;
        for (std::size_t i = 0; i < c->size(); ++i) over = std::max(over, err.at(i) - p.bounds[std::size_t(n - 1)].at(i));
        pic.add(std::max(0.0, over), label_of(n, "n ="));
    }
    PicardResult p30 = solve_picard(ivp, 30);
    for (std::size_t i = 0; i < c->size(); ++i)
        for (double t : {-0.5, -0.2, 0.13, 0.41, 0.5})
            agree.add(std::abs(p30.state(i, t)[0] - y.state(i, t)[0]) / std::abs(y.state(i, t)[0]), "t = " + Tally::fmt(t));

    for (double m : {0.5, 1.0}) {
        IVP pert = ivp;
        pert.y0 = {C(c, 1.0) + drho(c, m)};
        SolvedPath b = solve_ivp(pert, tight);
        GenNum diff = abs(b.at(C(c, 0.5))[0] - y.at(C(c, 0.5))[0]);
        AsymptoticClass k = classify(diff);
        double bound = 0.0;
        for (std::size_t i = 0; i < c->size(); ++i)
            bound = std::max(bound, diff.at(i) / (std::exp(0.5) * std::pow(c->rho[i], m)) - 1.0);
        cont.add(std::max(std::abs(k.order - m), std::max(0.0, bound)), "m = " + Tally::fmt(m));
    }

    IVP cl{{-var(1) + sin(var(0))}, C(c, 0.0), {C(c, 0.3)}, C(c, 2.0), C(c, 4.0)};
    SolvedPath p = solve_ivp(cl);
    for (double t : {-2.0, -0.7, 0.9, 2.0}) {
        double ref = p.state(0, t)[0], w = 0.0;
        for (std::size_t i = 1; i < c->size(); ++i) w = std::max(w, std::abs(p.state(i, t)[0] - ref) / std::abs(ref));
        classical.add(w, "t = " + Tally::fmt(t));
    }
    SuiteReport out;
    for (const Tally* t : {&pic, &agree, &cont, &classical}) out.checks.push_back(t->done());
    return out;
}

// ---------------------------------------------------------------- heat

GPoint point3(const Ctx& c, double a, double b, double d) { return {C(c, a), C(c, b), C(c, d)}; }

// source making u an exact solution of c rho u_t = div(k grad u) + F
Expr source_for(const Expr& cc, const Expr& rho, const Expr& k, const Expr& u)
{
    Expr div = real(0.0);
    for (int a = 0; a < 3; ++a) div = div + derive(k * derive(u, a), a);
    return cc * rho * derive(u, 3) - div;
}

SuiteReport heat_suite(const Ctx& c)
{
    Tally agree("item1_item2_agree", 0.0), exact("exact_fields_pass", 0.0), broken("perturbed_source_fails", 0.0),
        symm("axis_relabelling_symmetric", 1e-12), limit("residual_negligible_as_j_shrinks", 0.0);
    struct Field {
        std::string name;
        Expr cc, rho, k, u;
    };
    const Expr x = var(0), y = var(1), z = var(2), t = var(3);
    std::vector<Field> fields{
        {"exp(-t) sin x", real(1.0), real(1.0), real(1.0), exp(-t) * sin(x)},
        {"exp(-2t)(sin x + cos y)", real(0.5), real(1.0), real(1.0), exp(-2.0 * t) * (sin(x) + cos(y))},
        {"t x^2 + z sin y", 1.0 + z * z, real(2.0), 1.0 + x * x, t * x * x + z * sin(y)},
        {"exp(-t) cos(x + y + z)", real(1.0), 1.0 + 0.5 * sin(y), 2.0 + cos(z), exp(-t) * cos(x + y + z)},
    };
    const GPoint pts[] = {point3(c, 0.3, 0.2, -0.1), point3(c, -0.4, 0.7, 0.25)};
    for (const Field& f : fields) {
        Expr F = source_for(f.cc, f.rho, f.k, f.u);
        for (double j : {1.0, 0.5, 0.25}) {
            HeatIncrements inc = choose_heat_increments(c, j, j);
            for (const GPoint& p : pts) {
                const std::string tag = f.name + " j=" + Tally::fmt(j);
                HeatBalance r = heat_balance({f.cc, f.rho, f.k, f.u, F, p, C(c, 0.4), inc});
                agree.flag(r.consistent, tag);
                exact.flag(r.eq_j_holds && r.eq_k_holds, tag);
                HeatBalance w = heat_balance({f.cc, f.rho, f.k, f.u, F + 1.0, p, C(c, 0.4), inc});
                agree.flag(w.consistent, tag + " perturbed");
                broken.flag(!w.eq_j_holds && !w.eq_k_holds, tag);
            }
        }
    }

    Expr u = exp(-t) * (sin(x) + 0.5 * cos(y) + z * z);
    Expr k = 1.0 + x * x + y * y + z * z;
    Expr u2 = compose(u, {y, z, x, t});
    HeatIncrements inc = choose_heat_increments(c, 1.0, 1.0);
    GenNum tt = C(c, 0.2);
    HeatBalance a = heat_balance({real(1.0), real(1.0), k, u, real(0.0), point3(c, 0.3, -0.2, 0.5), tt, inc});
    HeatBalance b = heat_balance({real(1.0), real(1.0), k, u2, real(0.0), point3(c, 0.5, 0.3, -0.2), tt, inc});
    symm.add(worst(a.Q_cv, b.Q_cv, one_plus_abs({a.Q_cv})), "Q_cv");
    symm.add(worst(a.field_side, b.field_side, one_plus_abs({a.field_side})), "field side");

    Expr u0 = exp(-t) * sin(x);
    for (double j : {1.0, 0.5, 0.25, 0.125}) {
        HeatBalance r = heat_balance({real(1.0), real(1.0), real(1.0), u0, real(0.0), point3(c, 0.3, 0.2, -0.1),
                                      C(c, 0.5), choose_heat_increments(c, j, j)});
        limit.flag(r.eq_k_holds && classify(r.field_side).label == Label::negligible, "j = " + Tally::fmt(j));
    }
    SuiteReport out;
    for (const Tally* q : {&agree, &exact, &broken, &symm, &limit}) out.checks.push_back(q->done());
    return out;
}

// ---------------------------------------------------------------- wave

SuiteReport wave_suite(const Ctx& c)
{
    Tally quad("quadratic_string_both_directions", 0.0), sine("small_sine_backward", 0.0),
        large("large_amplitude_rejected", 0.0), length("string_length", 0.0);
    GenNum T = C(c, 2.0);
    for (double p : {-0.125, -0.0625}) {
        GenNum cc = drho(c, p);
        Expr u = constant(cc) * (var(0) * var(0) + 2.0 * var(1) * var(1));
        WaveBalance r = wave_balance({u, real(1.0), real(0.0), T, drho(c), C(c, 0.3), 1.0, 1.0, 0.5, p});
        quad.flag(r.newton.holds && r.taylor.holds && r.forward && r.backward && r.dynamic_k.holds,
                  "p = " + Tally::fmt(p) + " " + r.detail);
    }
    const double rho0 = 0.5, w = std::sqrt(2.0 / rho0);
    auto setup = [&](const GenNum& A) {
        Expr u = constant(A) * sin(var(0)) * cos(w * var(1));
        return WaveSetup{u, real(rho0), real(0.0), T, C(c, -std::numbers::pi / 4.0), C(c, 0.3), 1.0, 1.0, 0.5, 0.6};
    };
    for (double a : {0.5, 0.75}) {
        WaveBalance s = wave_balance(setup(drho(c, a)));
        sine.flag(s.backward && s.cos3_j.holds && s.wave_k.holds && s.dynamic_k.holds, "A = drho^" + Tally::fmt(a));
    }
    WaveBalance big = wave_balance(setup(C(c, 0.5)));
    large.flag(!big.newton.holds && !big.cos3_j.holds && !big.dynamic_k.holds, "A = 0.5");

    GenNum a = C(c, 0.0), b = C(c, std::numbers::pi), t = C(c, 0.0);
    auto run = [&](const GenNum& A) { return string_length_check(constant(A) * sin(var(0)), a, b, t, 1.0); };
    StringLength s = run(drho(c, 0.25));
    length.flag(s.precondition && s.holds, "A = drho^0.25");
    StringLength f = run(C(c, 0.3));
    length.flag(!f.holds, "A = 0.3");
    SuiteReport out;
    for (const Tally* q : {&quad, &sine, &large, &length}) out.checks.push_back(q->done());
    return out;
}

// ---------------------------------------------------------------- hft

SuiteReport hft_suite(const Ctx& c, Rng& rng)
{
    Tally lin("linearity", 1e-10), conj("conjugate_symmetry", 1e-12), gauss("classical_gaussian", 1e-6),
        closed("exponential_closed_form", 1e-6);
    GenNum k = C(c, 5.0);
    for (int n = 0; n < 5; ++n) {
        double a = unif(rng, -2.0, 2.0), b = unif(rng, -2.0, 2.0), w = unif(rng, -3.0, 3.0), s = unif(rng, -1.0, 1.0);
        Expr f = exp(-var(0) * var(0)), g = var(0) * exp(-0.5 * (var(0) - s) * (var(0) - s)) + 0.1;
        GenNum W = C(c, w);
        CGenNum L = hft(a * f + b * g, k, W), F = hft(f, k, W), G = hft(g, k, W);
        CGenNum M = hft(g, k, -W);
        double e1 = 0.0, e2 = 0.0;
        for (std::size_t i = 0; i < c->size(); ++i) {
            e1 = std::max(e1, std::abs(L.at(i) - (a * F.at(i) + b * G.at(i))) / (1.0 + std::abs(L.at(i))));
            e2 = std::max(e2, std::abs(M.at(i) - std::conj(G.at(i))) / (1.0 + std::abs(G.at(i))));
        }
        lin.add(e1, "omega = " + Tally::fmt(w));
        conj.add(e2, "omega = " + Tally::fmt(w));
    }
    GenNum kinf = drho(c, -1.0);
    for (double w : {0.0, 0.5, 2.0}) {
        CGenNum F = hft(exp(-var(0) * var(0)), kinf, C(c, w));
        double ex = std::sqrt(std::numbers::pi) * std::exp(-w * w / 4.0), e = 0.0;
        for (std::size_t i = c->tail_start(); i < c->size(); ++i) e = std::max(e, std::abs(F.at(i) - ex) / ex);
        gauss.add(e, "omega = " + Tally::fmt(w));
    }
    GenNum kl = -log(drho(c));
    for (double w : {0.0, 1.0, 3.0}) {
        CGenNum F = hft(exp(var(0)), kl, C(c, w));
        double e = 0.0;
        for (std::size_t i = 0; i < c->size(); ++i) {
            std::complex<double> p = std::exp(std::complex<double>(0.0, w * c->log_rho[i]));
            std::complex<double> ex = 1.0 / std::complex<double>(1.0, -w) * (p / c->rho[i] - c->rho[i] / p);
            e = std::max(e, std::abs(F.at(i) - ex) / std::abs(ex));
        }
        closed.add(e, "omega = " + Tally::fmt(w));
    }
    SuiteReport out;
    for (const Tally* q : {&lin, &conj, &gauss, &closed}) out.checks.push_back(q->done());
    return out;
}

} // namespace

const std::vector<std::string>& suite_ids()
{
    static const std::vector<std::string> ids{"ring", "mollifier", "calculus", "nilpotent", "ode", "heat", "wave", "hft"};
    return ids;
}

SuiteReport run_suite(const std::string& id, const SuiteOptions& opt)
{
    Ctx c = opt.ctx ? opt.ctx : make_context(GaugeKind::identity);
    // one stream per suite so that suites do not depend on each other's draws
    Rng rng(opt.seed);
    SuiteReport r;
    if (id == "ring") r = ring_suite(c, rng);
    else if (id == "mollifier") r = mollifier_suite(rng);
    else if (id == "calculus") r = calculus_suite(c, rng, opt.trees);
    else if (id == "nilpotent") r = nilpotent_suite(c, rng, opt.nilpotent_instances, opt.cancellation_instances);
    else if (id == "ode") r = ode_suite(c);
    else if (id == "heat") r = heat_suite(c);
    else if (id == "wave") r = wave_suite(c);
    else if (id == "hft") r = hft_suite(c, rng);
    else throw InputError("unknown suite '" + id + "'");
    r.suite = id;
    r.seed = opt.seed;
    return r;
}

void write_suite_csv(std::ostream& os, const SuiteReport& r)
{
    auto old = os.precision(17);
    os << "check,status,achieved,tolerance,instances,failures,detail\n";
    for (const SuiteCheck& c : r.checks) {
        std::string d = c.detail;
        std::replace(d.begin(), d.end(), '"', '\'');
        os << c.name << ',' << (c.passed ? "pass" : "fail") << ',' << c.achieved << ',' << c.tolerance << ','
           << c.instances << ',' << c.failures << ",\"" << d << "\"\n";
    }
    os.precision(old);
}

void write_suite_report(std::ostream& os, const SuiteReport& r)
{
    os << "suite " << r.suite << " (seed " << r.seed << "): " << (r.passed() ? "PASS" : "FAIL") << '\n';
    for (const SuiteCheck& c : r.checks)
        os << "  " << (c.passed ? "pass " : "FAIL ") << std::left << std::setw(40) << c.name << std::right
           << " achieved " << std::setprecision(3) << c.achieved << " tol " << c.tolerance << "  " << c.detail << '\n';
}

} // namespace gsf
