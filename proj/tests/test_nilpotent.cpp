#include "gsf/error.hpp"
#include "gsf/nilpotent.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace gsf;
using Catch::Approx;

namespace {

Ctx ctx() { return make_context(GaugeKind::identity); }

} // namespace

TEST_CASE("equality up to order j")
{
    auto c = ctx();
    GenNum y = GenNum::constant(c, 0.7);
    EqUpto a = eq_upto(y + drho(c, 2.0), y, 1.0);
    CHECK(a.holds);
    CHECK(a.C < 1e-3);
    CHECK_FALSE(eq_upto(y + drho(c, 0.5), y, 1.0).holds);
    EqUpto b = eq_upto(y + 5.0 * drho(c), y, 1.0);
    CHECK(b.holds);
    CHECK(b.C == Approx(5.0).epsilon(1e-6));
    CHECK(eq_upto(y, y, 0.1).C == 0.0);
    CHECK_THROWS_AS(eq_upto(y, y, 0.0), InputError);
}

TEST_CASE("a real residual is not equal at high order even if the grid ratio is small")
{
    auto c = ctx();
    GenNum one = GenNum::constant(c, 1.0), zero = GenNum::constant(c, 0.0);
    EqUpto r = eq_upto(one, zero, 15.0);
    CHECK(r.C < 1e3);
    CHECK(r.unbounded);
    CHECK_FALSE(r.holds);
}

TEST_CASE("membership in D_kj")
{
    auto c = ctx();
    CHECK(in_Dkj(drho(c), 1, 1.0));
    CHECK_FALSE(in_Dkj(drho(c, 1.0 / 3.0), 1, 1.0));
    CHECK(in_Dkj(drho(c, 1.0 / 3.0), 2, 1.0));
    CHECK_THROWS_AS(in_Dkj(drho(c), 0, 1.0), InputError);
}

TEST_CASE("Taylor polynomial coefficients and Lagrange bound")
{
    auto c = ctx();
    GenNum zero = GenNum::constant(c, 0.0);
    TaylorPoly T = taylor_poly(exp(var(0)), zero, 3);
    REQUIRE(T.coeffs.size() == 4);
    const double ex[] = {1.0, 1.0, 0.5, 1.0 / 6.0};
    for (int r = 0; r < 4; ++r)
        for (std::size_t i = 0; i < c->size(); ++i) CHECK(T.coeffs[r].at(i) == Approx(ex[r]).epsilon(1e-15));

    GenNum b = embedding_scale(c);
    TaylorPoly D = taylor_poly(embed_delta(b), zero, 1);
    for (std::size_t i = 0; i < c->size(); ++i) {
        CHECK(D.coeffs[0].at(i) == Approx(b.at(i)).epsilon(1e-14));
        CHECK(D.coeffs[1].at(i) == 0.0);
    }

    TaylorPoly S = taylor_poly(sin(var(0)), zero, 2);
    GenNum dr = drho(c);
    GenNum bound = S.remainder_bound(zero, dr, dr);
    for (std::size_t i = 0; i < c->size(); ++i) {
        double d = dr.at(i);
        CHECK(bound.at(i) <= d * d * d / 6.0 * (1.0 + 1e-12));
        CHECK(bound.at(i) >= d * d * d / 6.0 * std::cos(d) * (1.0 - 1e-12));
        double actual = std::abs(std::sin(d) - d);
        CHECK(actual <= bound.at(i) * (1.0 + 1e-9));
    }
}

TEST_CASE("integral remainder matches the direct difference where it is resolved")
{
    auto c = ctx();
    GenNum x = GenNum::constant(c, 0.3), u = GenNum::constant(c, 0.2);
    GenNum R = taylor_remainder(exp(var(0)), x, 2, u);
    double ex = std::exp(0.5) - std::exp(0.3) * (1.0 + 0.2 + 0.02);
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(R.at(i) == Approx(ex).epsilon(1e-11));
}

TEST_CASE("Taylor formula on nilpotent increments")
{
    auto c = ctx();
    GenNum zero = GenNum::constant(c, 0.0);
    NilpotentTaylor s = check_taylor_nilpotent(sin(var(0)), zero, 1, 1.0);
    CHECK(s.holds);
    CHECK(s.e_witness == 1.0);
    CHECK(s.consistent);

    NilpotentTaylor e = check_taylor_nilpotent(exp(var(0)), zero, 2, 1.0);
    CHECK(e.holds);
    CHECK(e.consistent);
    CHECK(e.k_achieved == Approx(1.0).epsilon(0.05));

    // infinite derivatives of delta shrink the admissible neighbourhood
    NilpotentTaylor d = check_taylor_nilpotent(embed_delta(embedding_scale(c)), zero, 1, 1.0);
    INFO(d.detail);
    CHECK(d.holds);
    CHECK(d.e_witness == 0.25);
    CHECK(d.worst_e == 1.0);
    CHECK(d.consistent);
}

TEST_CASE("cancellation law")
{
    auto c = ctx();
    GenNum s = GenNum::constant(c, 2.0), r = s + drho(c);
    Cancellation k = cancel(r, s, drho(c, 0.5), 2.0 / 3.0, 0.5);
    CHECK(k.premise.holds);
    CHECK(k.k == Approx(1.0));
    CHECK(k.conclusion.holds);
    CHECK(k.holds);

    GenNum one = GenNum::constant(c, 1.0);
    Cancellation q0 = cancel(r, s, one, 0.8, 0.0);
    CHECK(q0.k == Approx(0.8));
    CHECK(q0.conclusion.holds == eq_upto(r, s, 0.8).holds);

    Cancellation conv = cancel_converse(r, s, GenNum::constant(c, 3.0) + drho(c), 1.0);
    CHECK(conv.premise.holds);
    CHECK(conv.conclusion.holds);

    CHECK_THROWS_AS(cancel(r, s, drho(c, 2.0), 1.0, 1.0), InputError);
    CHECK_THROWS_AS(cancel(r, s, drho(c, 0.5), 1.0, 1.0), InputError);
    CHECK_THROWS_AS(cancel_converse(r, s, drho(c, -1.0), 1.0), InputError);
}

TEST_CASE("Peano remainder is little-oh")
{
    auto c = ctx();
    GenNum zero = GenNum::constant(c, 0.0);
    CHECK(little_oh_check(cos(var(0)), zero, 2).holds);
    CHECK(little_oh_check(exp(var(0)), zero, 0).holds);
    LittleOh d = little_oh_check(embed_delta(embedding_scale(c)), zero, 1);
    CHECK(d.holds);
    REQUIRE(d.ratio.size() == 4);
    CHECK(d.ratio[0].label == Label::infinite);
}
