#include "gsf/error.hpp"
#include "gsf/ode.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace gsf;
using Catch::Approx;

namespace {

Ctx ctx() { return make_context(GaugeKind::identity); }

GenNum C(const Ctx& c, double v) { return GenNum::constant(c, v); }

IVP scalar(const Ctx& c, Expr F, double t0, double y0, double alpha, double r)
{
    return IVP{{F}, C(c, t0), {C(c, y0)}, C(c, alpha), C(c, r)};
}

} // namespace

TEST_CASE("generalized norms")
{
    auto c = ctx();
    FCBox k{{C(c, 0.0)}, {C(c, 2.0 * std::numbers::pi)}};
    GenNum n0 = gnorm(sin(var(0)), 0, k);
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(n0.at(i) == Approx(1.0).epsilon(1e-12));
    GenNum n1 = gnorm(sin(var(0)) * 2.0, 1, k);
    CHECK(n1.at(4) == Approx(2.0).epsilon(1e-12));

    GenNum b = embedding_scale(c);
    GenNum nd = gnorm(embed_delta(b), 0, FCBox{{C(c, -1.0)}, {C(c, 1.0)}});
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(nd.at(i) == Approx(b.at(i)).epsilon(1e-12));

    Expr u = cos(3.0 * var(0)) + var(0), v = exp(-var(0)) * sin(var(0));
    FCBox kk{{C(c, -1.0)}, {C(c, 1.5)}};
    GenNum s = gnorm(u + v, 0, kk), su = gnorm(u, 0, kk), sv = gnorm(v, 0, kk);
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(s.at(i) <= su.at(i) + sv.at(i) + 1e-12);
}

TEST_CASE("Picard precheck")
{
    auto c = ctx();
    PicardPrecheck p = picard_precheck(scalar(c, var(1), 0.0, 1.0, 0.5, 1.0));
    CHECK(p.L.at(3) == Approx(1.0).epsilon(1e-12));
    CHECK(p.M.at(3) == Approx(2.0).epsilon(1e-12));
    CHECK(p.contraction_ok);
    CHECK(p.alpha_M_le_r);

    Expr big = constant(drho(c, -1.0)) * var(1);
    CHECK_FALSE(picard_precheck(scalar(c, big, 0.0, 1.0, 1.0, 1.0)).contraction_ok);
    IVP small{{big}, C(c, 0.0), {C(c, 1.0)}, drho(c, 2.0), C(c, 1.0)};
    PicardPrecheck q = picard_precheck(small);
    CHECK(q.contraction_ok);
    CHECK(q.alpha_L.label == Label::infinitesimal);
    CHECK(q.alpha_L.order == Approx(1.0).margin(0.05));

    CHECK_THROWS_AS(validate(scalar(c, var(1), 0.0, 1.0, 0.0, 1.0)), InputError);
}

TEST_CASE("per-eps integration of y' = y")
{
    auto c = ctx();
    SolvedPath p = solve_ivp(scalar(c, var(1), 0.0, 1.0, 1.0, 1.0));
    REQUIRE(p.complete());
    GPoint y1 = p.at(C(c, 1.0)), ym = p.at(C(c, -1.0));
    for (std::size_t i = 0; i < c->size(); ++i) {
        CHECK(std::abs(y1[0].at(i) - std::exp(1.0)) <= 1e-8);
        CHECK(std::abs(ym[0].at(i) - std::exp(-1.0)) <= 1e-8);
        CHECK(p.state(i, 0.37)[0] == Approx(std::exp(0.37)).epsilon(1e-9));
    }
    CHECK_THROWS_AS(p.state(0, 1.5), EvalError);
}

TEST_CASE("solution on an infinitesimal domain")
{
    auto c = ctx();
    GenNum h = drho(c);
    Expr F = -var(0) / ((1.0 + var(1)) * constant(h));
    IVP ivp{{F}, C(c, 0.0), {C(c, 0.0)}, 0.5 * sqrt(h), C(c, 1.0)};
    SolvedPath p = solve_ivp(ivp);
    REQUIRE(p.complete());
    for (std::size_t i = 0; i < c->size(); ++i) {
        const double hh = h.at(i), al = 0.5 * std::sqrt(hh);
        for (int k = -10; k <= 10; ++k) {
            if (k == 0) continue;
            double t = al * k / 10.0;
            double ex = -1.0 + std::sqrt(1.0 - t * t / hh);
            CHECK(std::abs(p.state(i, t)[0] - ex) <= 1e-6 * std::abs(ex));
        }
    }
}

TEST_CASE("crossing a delta barrier")
{
    auto c = ctx();
    GenNum b = embedding_scale(c);
    Expr d = embed_delta(b);
    SolvedPath p = solve_range({d}, C(c, -1.0), {C(c, -1.0)}, C(c, -1.0), C(c, 1.0));
    REQUIRE(p.complete());
    for (std::size_t i = c->tail_start(); i < c->size(); ++i) {
        CHECK(std::abs(p.state(i, 1.0)[0]) <= 1e-8);
        CHECK(std::abs(p.state(i, -0.5)[0] + 1.0) <= 1e-8);
        // independent oracle: quadrature of delta
        for (double t : {-0.01, -1.0 / b.at(i), 0.0, 0.5 / b.at(i), 3.0 / b.at(i), 0.2}) {
            double x = 0.0;
            double q = -1.0 + integrate_along(d, 0, &x, 1, -1.0, t, i, collect_layers(d, 0));
            CHECK(std::abs(p.state(i, t)[0] - q) <= 1e-8);
        }
        CHECK(p.stats(i).steps < 20000);
    }
    // y' = delta(y) from y = -1: the kernel vanishes there, so the state never moves
    SolvedPath z = solve_range({compose(d, {var(1)})}, C(c, 0.0), {C(c, -1.0)}, C(c, 0.0), C(c, 1.0));
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(z.state(i, 1.0)[0] == -1.0);
}

TEST_CASE("Picard iterates obey the a priori bound")
{
    auto c = ctx();
    IVP ivp = scalar(c, var(1), 0.0, 1.0, 0.5, 1.0);
    SolveOptions tight;
    tight.rtol = 1e-13;
    tight.atol = 1e-15;
    SolvedPath y = solve_ivp(ivp, tight);
    for (int n = 1; n <= 10; ++n) {
        PicardResult p = solve_picard(ivp, n);
        GenNum err = picard_error(p, y);
        for (std::size_t i = 0; i < c->size(); ++i) CHECK(err.at(i) <= p.bounds[n - 1].at(i) + 1e-13);
        double exact = 0.0, term = 0.5;
        for (int k = 1; k <= n; ++k) term *= 0.5 / (k + 1);
        for (int k = n + 1; k < 60; ++k) {
            exact += term;
            term *= 0.5 / (k + 1);
        }
        CHECK(err.at(0) == Approx(exact).epsilon(1e-6).margin(5e-14));
    }
    PicardResult p30 = solve_picard(ivp, 30);
    for (std::size_t i = 0; i < c->size(); i += 5) CHECK(p30.state(i, 0.41)[0] == Approx(std::exp(0.41)).epsilon(1e-13));

    Expr big = constant(drho(c, -1.0)) * var(1);
    CHECK_THROWS_AS(solve_picard(scalar(c, big, 0.0, 1.0, 1.0, 1.0), 3), InputError);
}

TEST_CASE("linear systems")
{
    auto c = ctx();
    LinearSolution s = solve_linear({{real(0.7)}}, C(c, 0.0), {C(c, 2.0)}, C(c, 0.0), C(c, 1.0));
    CHECK(s.closed_form);
    CHECK(s.cross_check <= 1e-8);
    for (std::size_t i = 0; i < c->size(); i += 3) CHECK(s.path.state(i, 0.6)[0] == Approx(2.0 * std::exp(0.42)).epsilon(1e-12));

    LinearSolution dg = solve_linear({{real(1.0), real(0.0)}, {real(0.0), real(-1.0)}}, C(c, 0.0),
                                     {C(c, 1.0), C(c, 1.0)}, C(c, 0.0), C(c, 1.0));
    CHECK(dg.closed_form);
    auto v = dg.path.state(2, 1.0);
    CHECK(v[0] == Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(v[1] == Approx(std::exp(-1.0)).epsilon(1e-12));

    LinearSolution nc = solve_linear({{real(0.0), real(1.0)}, {var(0), real(0.0)}}, C(c, 0.0),
                                     {C(c, 1.0), C(c, 0.0)}, C(c, 0.0), C(c, 1.0));
    CHECK_FALSE(nc.closed_form);
    CHECK_FALSE(nc.notice.empty());
    CHECK(nc.path.complete());

    auto ce = make_context(GaugeKind::exp_inv);
    Expr inv_eps = constant(1.0 / eps_net(ce));
    LinearSolution ex = solve_linear({{inv_eps}}, C(ce, 0.0), {C(ce, 1.0)}, C(ce, 0.0), C(ce, 1.0));
    CHECK(ex.closed_form);
    CHECK(ex.cross_check <= 1e-7);
    GenNum y1 = ex.path.at(C(ce, 1.0))[0];
    for (std::size_t i = 0; i < ce->size(); ++i) CHECK(y1.at(i) == Approx(std::exp(1.0 / ce->grid[i])).epsilon(1e-10));
    AsymptoticClass k = classify(y1);
    CHECK(k.label == Label::infinite);
    CHECK_FALSE(k.non_moderate);
    CHECK(k.order == Approx(-1.0).margin(0.05));

    CHECK_THROWS_AS(solve_linear({{constant(drho(c, -1.0))}}, C(c, 0.0), {C(c, 1.0)}, C(c, 0.0), C(c, 1.0)),
                    InputError);
}

TEST_CASE("Gronwall inequality")
{
    auto c = ctx();
    GronwallResult g = gronwall_check(exp(var(0)), real(1.0), real(1.0), C(c, 1.0));
    CHECK(g.applicable);
    CHECK(g.holds);
    CHECK(g.item2_applicable);
    CHECK(std::abs(g.slack1) <= 1e-9);
    CHECK(std::abs(g.slack2) <= 1e-9);

    SolvedPath y = solve_ivp(scalar(c, var(1) + 1.0, 0.0, 0.0, 1.0, 4.0));
    PathFn u = [&](std::size_t i, double t) { return y.state(i, t)[0]; };
    GronwallResult h = gronwall_check(u, real(1.0), var(0), C(c, 1.0));
    CHECK(h.applicable);
    CHECK(h.holds);
    CHECK(h.item2);

    GronwallResult na = gronwall_check(exp(var(0)), constant(drho(c, -1.0)), real(1.0), C(c, 1.0));
    CHECK_FALSE(na.applicable);
    CHECK_FALSE(na.detail.empty());
}

TEST_CASE("continuous dependence on the initial value")
{
    auto c = ctx();
    // the perturbation has to stay above the solver tolerance on the whole grid
    SolveOptions o;
    o.rtol = 1e-13;
    o.atol = 1e-15;
    SolvedPath a = solve_ivp(scalar(c, var(1), 0.0, 1.0, 0.5, 1.0), o);
    IVP pert{{var(1)}, C(c, 0.0), {C(c, 1.0) + drho(c)}, C(c, 0.5), C(c, 1.0)};
    SolvedPath b = solve_ivp(pert, o);
    GenNum diff = abs(b.at(C(c, 0.5))[0] - a.at(C(c, 0.5))[0]);
    AsymptoticClass k = classify(diff);
    CHECK(k.label == Label::infinitesimal);
    CHECK(k.order >= 1.0 - 0.05);
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(diff.at(i) <= std::exp(0.5) * c->rho[i] * 1.001);
}

TEST_CASE("classical right-hand sides give eps-independent solutions")
{
    auto c = ctx();
    SolvedPath p = solve_ivp(scalar(c, -var(1) + sin(var(0)), 0.0, 0.3, 2.0, 4.0));
    for (double t : {-2.0, -0.7, 0.9, 2.0}) {
        double ref = p.state(0, t)[0];
        for (std::size_t i = 1; i < c->size(); ++i) CHECK(p.state(i, t)[0] == Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("step budget gives a partial result")
{
    auto c = ctx();
    SolveOptions o;
    o.max_steps = 5;
    SolvedPath p = solve_ivp(scalar(c, var(1), 0.0, 1.0, 1.0, 1.0), o);
    CHECK_FALSE(p.complete());
    CHECK(p.diagnostic().find("budget") != std::string::npos);
    CHECK_THROWS_AS(p.state(0, 1.0), EvalError);
}

TEST_CASE("path export")
{
    auto c = make_context(Gauge(GaugeKind::identity), EpsGrid::geometric(8, 0.5, 0.5));
    SolvedPath p = solve_ivp(scalar(c, var(1), 0.0, 1.0, 1.0, 1.0));
    std::ostringstream os;
    export_path_csv(os, p, 5);
    std::string s = os.str();
    CHECK(s.rfind("epsilon,t,y_1,dy_1\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 8 * 5);
}
