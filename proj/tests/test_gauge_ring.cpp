#include "gsf/error.hpp"
#include "gsf/gennum.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace gsf;
using Catch::Approx;

namespace {

Ctx id_ctx() { return make_context(GaugeKind::identity); }

} // namespace

TEST_CASE("gauges are exact closed forms")
{
    Gauge id(GaugeKind::identity), ei(GaugeKind::exp_inv);
    CHECK(id.rho(0.01) == 0.01);
    CHECK(ei.rho(0.1) == std::exp(-10.0));
    CHECK(ei.log_rho(0.1) == -10.0);
    Gauge sq = make_gauge(GaugeKind::custom, [](double e) { return e * e; });
    CHECK(sq.rho(0.1) == Approx(0.01));
    CHECK_NOTHROW(make_context(sq, EpsGrid::default_for(GaugeKind::identity)));
}

TEST_CASE("non-monotone custom gauge is rejected")
{
    Gauge bad = make_gauge(GaugeKind::custom, [](double e) { return 0.5 + 0.4 * std::sin(40.0 * e); });
    CHECK_THROWS_AS(make_context(bad, EpsGrid::default_for(GaugeKind::identity)), InputError);
}

TEST_CASE("grid validation")
{
    CHECK_THROWS_AS(EpsGrid({0.5, 0.25, 0.125}), InputError);
    CHECK_THROWS_AS(EpsGrid({0.5, 0.6, 0.1, 0.05, 0.01, 0.005, 0.001, 0.0005}), InputError);
    EpsGrid g = EpsGrid::default_for(GaugeKind::identity);
    CHECK(g.size() == 24);
    CHECK(g[0] == 0.5);
    CHECK(g[23] == std::ldexp(1.0, -24));
    CHECK(parse_gauge_kind("exp_inv") == GaugeKind::exp_inv);
    CHECK_THROWS_AS(parse_gauge_kind("eps"), InputError);
}

TEST_CASE("evaluation is deterministic and cached")
{
    auto c = id_ctx();
    int calls = 0;
    GenNum x = GenNum::from_eps(c, [&](double e) {
        ++calls;
        return std::sin(1.0 / e);
    });
    double a = x.at(5);
    double b = x.at(5);
    CHECK(a == b);
    CHECK(calls == 1);
    GenNum r = GenNum::constant(c, 2.5);
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(r.at(i) == 2.5);
}

TEST_CASE("classify: orders and labels")
{
    auto c = id_ctx();
    auto dr = drho(c);
    AsymptoticClass k = classify(dr);
    CHECK(k.label == Label::infinitesimal);
    CHECK(k.order == Approx(1.0).margin(0.05));

    for (double a : {-3.0, -1.0, 0.5, 1.0, 2.0}) {
        AsymptoticClass ka = classify(drho(c, a));
        CHECK(std::abs(ka.order - a) <= 0.05);
    }
    CHECK(classify(drho(c, -1.0)).label == Label::infinite);
    CHECK(classify(GenNum::constant(c, 0.0)).label == Label::negligible);
    CHECK(classify(drho(c, 14.0)).label == Label::negligible);

    AsymptoticClass three = classify(3.0 + dr);
    CHECK(three.label == Label::near_standard);
    REQUIRE(three.limit.has_value());
    CHECK(*three.limit == Approx(3.0).epsilon(1e-9));
}

TEST_CASE("classify: moderateness depends on the gauge")
{
    auto ci = id_ctx();
    GenNum xi = GenNum::from_eps(ci, [](double e) { return std::exp(1.0 / e); });
    AsymptoticClass ki = classify(xi);
    CHECK(ki.label == Label::indeterminate);
    CHECK(ki.non_moderate);

    auto ce = make_context(GaugeKind::exp_inv);
    GenNum xe = GenNum::from_eps(ce, [](double e) { return std::exp(1.0 / e); });
    AsymptoticClass ke = classify(xe);
    CHECK(ke.label == Label::infinite);
    CHECK(ke.order == Approx(-1.0).margin(0.05));
}

TEST_CASE("classify: log-scale infinitesimal is flagged far from zero")
{
    auto c = id_ctx();
    GenNum t = -1.0 / log(drho(c));
    AsymptoticClass k = classify(t);
    CHECK(k.label == Label::infinitesimal);
    CHECK(k.far_from_zero);
    AsymptoticClass p = classify(0.01 * drho(c, 0.5));
    CHECK(p.label == Label::infinitesimal);
    CHECK_FALSE(p.far_from_zero);
    AsymptoticClass l = classify(-log(drho(c)));
    CHECK(l.label == Label::infinite);
    CHECK(l.far_from_zero);
}

TEST_CASE("classify: NaN gives indeterminate")
{
    auto c = id_ctx();
    GenNum x = GenNum::from_eps(c, [](double e) { return e < 0.01 ? NAN : 1.0; });
    AsymptoticClass k = classify(x);
    CHECK(k.label == Label::indeterminate);
    CHECK_FALSE(k.diagnostic.empty());
}

TEST_CASE("ring operations")
{
    auto c = id_ctx();
    auto dr = drho(c);
    GenNum m = abs(-dr);
    GenNum s = sup(dr, dr * dr);
    GenNum p = (1.0 + dr) * (1.0 - dr);
    for (std::size_t i = 0; i < c->size(); ++i) {
        CHECK(m.at(i) == dr.at(i));
        CHECK(s.at(i) == dr.at(i));
        CHECK(p.at(i) == Approx(1.0 - dr.at(i) * dr.at(i)).epsilon(1e-15));
    }
    auto ce = make_context(GaugeKind::exp_inv);
    CHECK_THROWS_AS(dr + drho(ce), InputError);
    CHECK_THROWS_AS(dr / GenNum::constant(c, 0.0), EvalError);
}

TEST_CASE("invertibility witnesses")
{
    auto c = id_ctx();
    Invertibility a = is_invertible(drho(c, 3.0));
    CHECK(a.invertible);
    CHECK(a.m == 4);
    CHECK_FALSE(is_invertible(GenNum::constant(c, 0.0)).invertible);
    GenNum alt = GenNum::from_index(c, [](std::size_t i) { return double(i % 2); });
    Invertibility b = is_invertible(alt);
    CHECK_FALSE(b.invertible);
    CHECK(b.inconclusive);
}

TEST_CASE("order relations")
{
    auto c = id_ctx();
    auto dr = drho(c);
    auto zero = GenNum::constant(c, 0.0);
    CHECK(leq(dr * dr, dr));
    CHECK(lt(zero, dr));
    GenNum x = GenNum::constant(c, 0.3);
    CHECK_FALSE(lt(x, x + drho(c, 10.0)));
    CHECK_FALSE(lt(dr, zero));
}

TEST_CASE("subpoint decomposition")
{
    auto c = id_ctx();
    auto dr = drho(c);
    auto zero = GenNum::constant(c, 0.0);
    Comparison a = decompose_comparison(zero, dr);
    CHECK(a.relation == Relation::less_equal);
    CHECK(a.L.indices.size() == c->size());

    GenNum osc = GenNum::from_eps(c, [](double e) { return std::sin(1.0 / e) * e; });
    Comparison b = decompose_comparison(osc, zero);
    CHECK(b.relation == Relation::mixed);
    CHECK(b.L.cofinal);
    CHECK(b.Lc.cofinal);
    CHECK(b.L.indices.size() + b.Lc.indices.size() == c->size());
    for (std::size_t i : b.L.indices) CHECK(osc.at(i) >= -std::pow(c->rho[i], 8));

    Comparison e = decompose_comparison(dr, dr);
    CHECK(e.relation == Relation::equal);
    CHECK(e.Lc.indices.empty());
}

TEST_CASE("near-standard part")
{
    auto c = id_ctx();
    auto dr = drho(c);
    CHECK(near_standard_part(3.0 + dr).value() == Approx(3.0).epsilon(1e-12));
    CHECK_FALSE(near_standard_part(drho(c, -1.0)).has_value());
    GenNum osc = GenNum::from_eps(c, [](double e) { return std::sin(1.0 / e); });
    CHECK_FALSE(near_standard_part(osc).has_value());
}

TEST_CASE("nudging to an invertible number")
{
    auto c = id_ctx();
    auto dr = drho(c);
    auto zero = GenNum::constant(c, 0.0);
    GenNum k0 = nudge_invertible(zero, dr);
    CHECK(is_invertible(k0).invertible);
    CHECK(lt(abs(k0 - zero), dr));
    GenNum k1 = nudge_invertible(GenNum::constant(c, 1.0), dr);
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(k1.at(i) == 1.0);
    GenNum alt = GenNum::from_index(c, [c](std::size_t i) { return (i % 2) ? c->rho[i] : 0.0; });
    GenNum k2 = nudge_invertible(alt, dr);
    CHECK(is_invertible(k2).invertible);
    CHECK(lt(abs(k2 - alt), dr));
}

TEST_CASE("internal interval membership")
{
    auto c = id_ctx();
    GenNum a = GenNum::constant(c, -1.0), b = GenNum::constant(c, 2.0);
    CHECK(in_internal_interval(a - drho(c, 11.0), a, b));
    CHECK_FALSE(in_internal_interval(a - 0.5, a, b));
    CHECK(in_internal_interval(0.5 * (a + b), a, b));
}

TEST_CASE("property: ring axioms and norm laws per eps")
{
    auto c = id_ctx();
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> vx(c->size()), vy(c->size()), vz(c->size());
        for (std::size_t i = 0; i < c->size(); ++i) {
            vx[i] = U(rng);
            vy[i] = U(rng) * c->rho[i];
            vz[i] = U(rng) / c->rho[i];
        }
        GenNum x = GenNum::from_values(c, vx), y = GenNum::from_values(c, vy), z = GenNum::from_values(c, vz);
        GenNum l1 = x + y, r1 = y + x, l2 = x * y, r2 = y * x;
        GenNum l3 = (x + y) + z, r3 = x + (y + z);
        GenNum l4 = x * (y + z), r4 = x * y + x * z;
        GenNum n1 = abs(x * y), n2 = abs(x) * abs(y);
        GenNum t1 = abs(x + y), t2 = abs(x) + abs(y);
        for (std::size_t i = 0; i < c->size(); ++i) {
            CHECK(l1.at(i) == r1.at(i));
            CHECK(l2.at(i) == r2.at(i));
            CHECK(l3.at(i) == Approx(r3.at(i)).epsilon(1e-14).margin(1e-14 * std::abs(vz[i])));
            CHECK(l4.at(i) == Approx(r4.at(i)).epsilon(1e-14).margin(1e-14 * std::abs(vx[i] * vz[i])));
            CHECK(n1.at(i) == n2.at(i));
            CHECK(t1.at(i) <= t2.at(i));
        }
        bool ab = lt(x, y), ba = lt(y, x);
        CHECK_FALSE((ab && ba));
        if (ab) {
            CHECK(leq(x, y));
            CHECK(is_invertible(y - x).invertible);
        }
        Comparison cmp = decompose_comparison(x, z);
        std::size_t total = cmp.relation == Relation::mixed ? cmp.L.indices.size() + cmp.Lc.indices.size()
                                                            : cmp.L.indices.size();
        CHECK(total == c->size());
        double r = U(rng);
        auto ns = near_standard_part(r + drho(c));
        REQUIRE(ns.has_value());
        CHECK(std::abs(*ns - r) <= 1e-6 * std::max(1.0, std::abs(r)));
    }
}
