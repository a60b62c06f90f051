#include "gsf/calculus.hpp"
#include "gsf/error.hpp"
#include "gsf/mollifier.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace gsf;
using Catch::Approx;

namespace {

Ctx ctx() { return make_context(GaugeKind::identity); }

std::vector<std::size_t> tail(const Ctx& c)
{
    std::vector<std::size_t> t;
    for (std::size_t i = c->tail_start(); i < c->size(); ++i) t.push_back(i);
    return t;
}

} // namespace

TEST_CASE("pointwise values of embedded distributions")
{
    auto c = ctx();
    GenNum b = embedding_scale(c);
    Expr d = embed_delta(b), H = embed_heaviside(b);
    GenNum zero = GenNum::constant(c, 0.0);
    GenNum d0 = eval(d, zero), h0 = eval(H, zero);
    for (std::size_t i = 0; i < c->size(); ++i) {
        CHECK(std::abs(d0.at(i) - 1.0 / c->grid[i]) <= 1e-9 * b.at(i));
        CHECK(std::abs(h0.at(i) - 0.5) <= 1e-9);
    }
    AsymptoticClass k = classify(d0);
    CHECK(k.label == Label::infinite);
    CHECK(k.order == Approx(-1.0).margin(0.05));

    GenNum e1 = eval(exp(var(0)), GenNum::constant(c, 1.0));
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(e1.at(i) == std::exp(1.0));
}

TEST_CASE("delta vanishes at the integer multiples of 1/b")
{
    auto c = ctx();
    GenNum b = embedding_scale(c);
    Expr d = embed_delta(b);
    for (int k = 1; k <= 5; ++k) {
        GenNum v = eval(d, double(k) / b);
        for (std::size_t i = 0; i < c->size(); ++i) CHECK(std::abs(v.at(i)) <= 1e-8);
    }
}

TEST_CASE("Heaviside and vp far from the origin")
{
    auto c = ctx();
    GenNum b = embedding_scale(c);
    Expr H = embed_heaviside(b), vp = embed_vp(b);
    GenNum x = 0.3 + drho(c);
    GenNum h = eval(H, x);
    GenNum v1 = eval(vp, GenNum::constant(c, 1.0));
    GenNum vm = eval(vp, GenNum::constant(c, -0.25));
    for (std::size_t i : tail(c)) {
        CHECK(std::abs(h.at(i) - 1.0) <= 1e-8);
        CHECK(v1.at(i) == Approx(1.0).epsilon(1e-15));
        CHECK(vm.at(i) == Approx(-4.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(embed_delta(GenNum::constant(c, 5.0)), InputError);
}

TEST_CASE("embedding of functions")
{
    auto c = ctx();
    GenNum b = embedding_scale(c);
    Expr s = embed_function([](double x) { return std::sin(x); }, b, {}, true);
    GenNum v = eval(s, GenNum::constant(c, 0.3));
    for (std::size_t i = 0; i < c->size(); ++i)
        CHECK(std::abs(v.at(i) - std::sin(0.3)) <= std::pow(b.at(i), -2.0));

    Expr a = embed_function([](double x) { return std::abs(x); }, b, {0.0});
    GenNum a0 = eval(a, GenNum::constant(c, 0.0));
    for (std::size_t i = 0; i < c->size(); ++i) {
        CHECK(a0.at(i) >= 0.0);
        CHECK(a0.at(i) <= 2.0 / b.at(i));
    }

    Expr st = embed_function([](double x) { return x > 0 ? 1.0 : 0.0; }, b, {0.0});
    Expr H = embed_heaviside(b);
    for (double x : {-0.7, -0.2, 0.15, 0.9}) {
        GenNum p = GenNum::constant(c, x);
        GenNum u = eval(st, p), w = eval(H, p);
        for (std::size_t i : tail(c)) CHECK(std::abs(u.at(i) - w.at(i)) <= 1e-8);
    }
    // derivative of the mollified step is the kernel itself
    GenNum ds = eval(derive(st, 0), GenNum::constant(c, 0.0));
    for (std::size_t i : tail(c)) CHECK(ds.at(i) == Approx(b.at(i)).epsilon(1e-9));

    CHECK_THROWS_AS(embed_function_samples(0.0, 0.01, std::vector<double>(50, 1.0), b), InputError);
    auto coarse = make_context(Gauge(GaugeKind::identity), EpsGrid::geometric(8, 0.5, 0.5));
    GenNum bc = embedding_scale(coarse);
    std::vector<double> vals;
    for (int j = 0; j <= 2000; ++j) vals.push_back(std::sin(-2.0 + 0.002 * j));
    Expr sl = embed_function_samples(-2.0, 0.002, vals, bc);
    GenNum sv = eval(sl, GenNum::constant(coarse, 0.4));
    // coarse eps see the edges of the sample window through the kernel tails
    for (std::size_t i : tail(coarse)) CHECK(sv.at(i) == Approx(std::sin(0.4)).margin(2e-5));
}

TEST_CASE("delta composed with delta")
{
    auto c = ctx();
    GenNum b = embedding_scale(c);
    Expr d = embed_delta(b);
    Expr dd = compose(d, {d});
    GenNum x = 0.5 + drho(c);
    GenNum v = eval(dd, x);
    for (std::size_t i : tail(c)) CHECK(std::abs(v.at(i) - b.at(i)) <= 1e-8 * b.at(i));
    for (int k = 1; k <= 5; ++k) {
        GenNum w = eval(dd, double(k) / b);
        for (std::size_t i = 0; i < c->size(); ++i) CHECK(std::abs(w.at(i) - b.at(i)) <= 1e-8 * b.at(i));
    }
    CHECK(classify(eval(dd, GenNum::constant(c, 0.0))).label == Label::negligible);
}

TEST_CASE("derivatives commute with the embedding")
{
    auto c = ctx();
    GenNum b = embedding_scale(c);
    Expr d = embed_delta(b), H = embed_heaviside(b);
    Expr dH = derive(H, 0);
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    for (int n = 0; n < 50; ++n) {
        GenNum x = GenNum::constant(c, U(rng));
        GenNum p = eval(dH, x), q = eval(d, x);
        for (std::size_t i : tail(c)) CHECK(std::abs(p.at(i) - q.at(i)) <= 1e-8);
    }
    CHECK(derive(constant(b), 0).is_real(0.0));
    Expr sd = derive(compose(sin(var(0)), {d}), 0);
    GenNum far = eval(sd, GenNum::constant(c, 0.7));
    for (std::size_t i : tail(c)) CHECK(std::abs(far.at(i)) <= 1e-8);

    Expr deep = d;
    CHECK_THROWS_AS([&] {
        for (int k = 0; k < 14; ++k) deep = derive(deep, 0);
    }(), InputError);
}

TEST_CASE("incremental ratios")
{
    auto c = ctx();
    GenNum b = embedding_scale(c);
    auto dr = drho(c);
    GenNum one = GenNum::constant(c, 1.0);
    GenNum r = incremental_ratio(var(0) * var(0), {GenNum::constant(c, 3.0)}, dr, {one});
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(r.at(i) == Approx(6.0 + dr.at(i)).epsilon(1e-12));

    GenNum rs = incremental_ratio(sin(var(0)), {GenNum::constant(c, 0.0)}, dr, {one});
    for (std::size_t i = 0; i < c->size(); ++i)
        CHECK(rs.at(i) == Approx(std::sin(dr.at(i)) / dr.at(i)).epsilon(1e-14));

    GenNum rd = incremental_ratio(embed_delta(b), {GenNum::constant(c, 0.0)}, drho(c, 5.0), {one});
    AsymptoticClass k = classify(rd);
    CHECK((k.label == Label::infinitesimal || k.label == Label::negligible));
    CHECK_THROWS_AS(incremental_ratio(var(0), {one}, GenNum::constant(c, 0.0), {one}), EvalError);
}

TEST_CASE("improper integral of 1/s")
{
    auto c = ctx();
    Expr inv = real(1.0) / var(0);
    for (double q : {1.0, 2.0}) {
        GenNum I = integrate_1d(inv, GenNum::constant(c, 1.0), drho(c, -q));
        for (std::size_t i = 0; i < c->size(); ++i) {
            double ex = -q * std::log(c->grid[i]);
            CHECK(std::abs(I.at(i) - ex) <= 1e-10 * ex);
        }
    }
}

TEST_CASE("integral of delta over a real neighbourhood is one")
{
    auto c = ctx();
    GenNum b = embedding_scale(c);
    GenNum I = integrate_1d(embed_delta(b), GenNum::constant(c, -0.5), GenNum::constant(c, 2.0));
    for (std::size_t i : tail(c)) CHECK(std::abs(I.at(i) - 1.0) <= 1e-8);
    GenNum z = integrate_1d(exp(var(0)), GenNum::constant(c, 0.0), GenNum::constant(c, 0.0));
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(z.at(i) == 0.0);
    GenNum rev = integrate_1d(exp(var(0)), GenNum::constant(c, 1.0), GenNum::constant(c, 0.0));
    CHECK(rev.at(3) == Approx(1.0 - std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("box integrals")
{
    auto c = ctx();
    GenNum zero = GenNum::constant(c, 0.0), one = GenNum::constant(c, 1.0);
    GenNum I1 = integrate_box(real(1.0), FCBox{{zero, zero}, {one, one}});
    CHECK(I1.at(0) == Approx(1.0).epsilon(1e-14));

    GenNum b = embedding_scale(c);
    Expr d = embed_delta(b);
    GenNum I2 = integrate_box(d * d, FCBox{{GenNum::constant(c, -1.0)}, {one}});
    const MollifierFn& mu = standard_mollifier();
    double cmu = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double u) { return mu(u) * mu(u); }, -48.0, 48.0, 20, 1e-14);
    for (std::size_t i : tail(c)) CHECK(I2.at(i) == Approx(cmu * b.at(i)).epsilon(1e-9));

    GenNum I3 = integrate_box(exp(-var(0)), FCBox{{zero, zero}, {drho(c, -1.0), one}});
    for (std::size_t i = 0; i < c->size(); ++i)
        CHECK(I3.at(i) == Approx(1.0 - std::exp(-1.0 / c->grid[i])).epsilon(1e-10));

    GenNum I4 = integrate_box(var(0) * var(1) * var(2), FCBox{{zero, zero, zero}, {one, one, one}});
    CHECK(I4.at(2) == Approx(0.125).epsilon(1e-12));
    CHECK_THROWS_AS(integrate_box(real(1.0), FCBox{{one}, {zero}}), InputError);
}

TEST_CASE("extreme values")
{
    auto c = ctx();
    const double tp = 2.0 * std::numbers::pi;
    Extremum e = extremum(sin(var(0)), FCBox{{GenNum::constant(c, 0.0)}, {GenNum::constant(c, tp)}});
    for (std::size_t i = 0; i < c->size(); ++i) {
        CHECK(e.min.at(i) == Approx(-1.0).margin(1e-12));
        CHECK(e.max.at(i) == Approx(1.0).margin(1e-12));
        CHECK(e.argmax[0].at(i) == Approx(std::numbers::pi / 2).margin(1e-6));
    }
    GenNum b = embedding_scale(c);
    Extremum ed = extremum(embed_delta(b), FCBox{{GenNum::constant(c, -1.0)}, {GenNum::constant(c, 1.0)}});
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(ed.max.at(i) == Approx(b.at(i)).epsilon(1e-12));
    Extremum eq = extremum(var(0) * var(0), FCBox{{-drho(c)}, {GenNum::constant(c, 1.0)}});
    for (std::size_t i = 0; i < c->size(); ++i) {
        CHECK(eq.min.at(i) == Approx(0.0).margin(1e-20));
        CHECK(eq.max.at(i) == 1.0);
    }
    Extremum e2 = extremum(sin(var(0)) * cos(var(1)),
                           FCBox{{GenNum::constant(c, 0.0), GenNum::constant(c, 0.0)},
                                 {GenNum::constant(c, 3.0), GenNum::constant(c, 3.0)}});
    CHECK(e2.max.at(0) == Approx(1.0).margin(1e-10));
    CHECK(e2.min.at(0) == Approx(std::cos(3.0)).margin(1e-9));
}

TEST_CASE("intermediate values by bisection")
{
    auto c = ctx();
    GenNum r = solve_scalar(var(0) * var(0) * var(0), GenNum::constant(c, 8.0), GenNum::constant(c, 0.0),
                            GenNum::constant(c, 3.0));
    CHECK(r.at(4) == Approx(2.0).epsilon(1e-12));
    GenNum p = solve_scalar(sin(var(0)), GenNum::constant(c, 0.0), GenNum::constant(c, 2.0),
                            GenNum::constant(c, 4.0));
    CHECK(p.at(9) == Approx(std::numbers::pi).epsilon(1e-12));
    GenNum b = embedding_scale(c);
    GenNum h = solve_scalar(embed_heaviside(b), GenNum::constant(c, 0.5), GenNum::constant(c, -1.0),
                            GenNum::constant(c, 1.0));
    AsymptoticClass k = classify(h);
    CHECK((k.label == Label::infinitesimal || k.label == Label::negligible));
    CHECK(k.order > 0.0);
    GenNum bad = solve_scalar(var(0), GenNum::constant(c, 5.0), GenNum::constant(c, 0.0), GenNum::constant(c, 1.0));
    CHECK_THROWS_AS(bad.at(0), EvalError);
}

TEST_CASE("domain errors name the eps")
{
    auto c = ctx();
    GenNum v = eval(log(var(0)), GenNum::constant(c, -1.0));
    try {
        v.at(2);
        FAIL("expected an evaluation error");
    } catch (const EvalError& e) {
        CHECK(e.eps() == c->grid[2]);
    }
}

TEST_CASE("sampling export")
{
    auto c = ctx();
    std::ostringstream os;
    export_samples_csv(os, embed_delta(embedding_scale(c)), c, {0.0, 0.5});
    std::string s = os.str();
    CHECK(s.rfind("epsilon,x,f_eps_of_x\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 2 * 24);
}
