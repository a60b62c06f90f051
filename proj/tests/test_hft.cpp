#include "gsf/error.hpp"
#include "gsf/hft.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

using namespace gsf;
using Catch::Approx;
using cd = std::complex<double>;

namespace {

Ctx ctx() { return make_context(GaugeKind::identity); }

GenNum C(const Ctx& c, double v) { return GenNum::constant(c, v); }

double rel(cd a, cd b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

} // namespace

TEST_CASE("transform of e^x on [log drho, -log drho]")
{
    auto c = ctx();
    GenNum k = -log(drho(c));
    for (double w : {0.0, 1.0, 3.0}) {
        CGenNum F = hft(exp(var(0)), k, C(c, w));
        for (std::size_t i = 0; i < c->size(); ++i) {
            double r = c->rho[i];
            cd p = std::exp(cd(0.0, w * std::log(r)));
            cd ex = 1.0 / cd(1.0, -w) * (p / r - r / p);
            INFO("omega " << w << " eps " << c->grid[i]);
            CHECK(rel(F.at(i), ex) < 1e-6);
        }
    }
}

TEST_CASE("transform of delta is one and of zero is zero")
{
    auto c = ctx();
    GenNum k = drho(c, -0.5);
    Expr d = embed_delta(embedding_scale(c));
    for (double w : {0.0, 1.0, 3.0}) {
        CGenNum F = hft(d, k, C(c, w));
        for (std::size_t i = c->tail_start(); i < c->size(); ++i) CHECK(std::abs(F.at(i) - 1.0) < 1e-6);
    }
    CGenNum z = hft(real(0.0), k, C(c, 2.0));
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(z.at(i) == cd(0.0, 0.0));
}

TEST_CASE("linearity and conjugate symmetry")
{
    auto c = ctx();
    GenNum k = C(c, 5.0), w = C(c, 1.7);
    Expr f = exp(-var(0) * var(0)), g = var(0) * exp(-0.5 * var(0) * var(0)) + 0.1;
    CGenNum a = hft(2.0 * f + 3.0 * g, k, w), F = hft(f, k, w), G = hft(g, k, w);
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(std::abs(a.at(i) - (2.0 * F.at(i) + 3.0 * G.at(i))) < 1e-10);

    Expr h = exp(-(var(0) - 0.5) * (var(0) - 0.5));
    CGenNum p = hft(h, k, w), m = hft(h, k, -w);
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(std::abs(m.at(i) - std::conj(p.at(i))) < 1e-12);
}

TEST_CASE("infinite box reproduces the classical transform of a Gaussian")
{
    auto c = ctx();
    GenNum k = drho(c, -1.0);
    for (double w : {0.5, 2.0}) {
        CGenNum F = hft(exp(-var(0) * var(0)), k, C(c, w));
        double ex = std::sqrt(std::numbers::pi) * std::exp(-w * w / 4.0);
        for (std::size_t i = c->tail_start(); i < c->size(); ++i) CHECK(rel(F.at(i), ex) < 1e-6);
    }
}

TEST_CASE("uncertainty product for a cut-off Gaussian")
{
    auto c = ctx();
    Expr psi = exp(-0.5 * var(0) * var(0)) * mollifier(MollKind::chi, var(0) / 6.0);
    Uncertainty u = uncertainty_product(psi, C(c, -12.0), C(c, 12.0));
    const double sp = std::sqrt(std::numbers::pi);
    for (std::size_t i = 0; i < c->size(); ++i) {
        CHECK(u.spread_x.at(i) == Approx(sp / 2.0).epsilon(1e-9));
        CHECK(u.norm_x.at(i) == Approx(std::sqrt(sp)).epsilon(1e-9));
        CHECK(u.spread_omega.at(i) == Approx(std::numbers::pi * sp).epsilon(1e-6));
        CHECK(u.norm_omega.at(i) == Approx(std::sqrt(2.0 * std::numbers::pi * sp)).epsilon(1e-6));
        CHECK(u.tail.at(i) < 1e-20);
    }
    CHECK(u.holds);
}

TEST_CASE("uncertainty product for delta")
{
    auto c = ctx();
    // at eps = 1/2 the cutoff of delta reaches 2 / log 2
    Uncertainty u = uncertainty_product(embed_delta(embedding_scale(c)), C(c, -3.0), C(c, 3.0));
    CHECK(classify(u.spread_x).label == Label::infinitesimal);
    CHECK(classify(u.spread_omega).label == Label::infinite);
    CHECK(u.holds);
    for (std::size_t i = 0; i < c->size(); ++i) CHECK(u.lhs.at(i) >= u.rhs.at(i));
}

TEST_CASE("uncertainty product edge cases")
{
    auto c = ctx();
    Uncertainty z = uncertainty_product(real(0.0), C(c, -1.0), C(c, 1.0));
    CHECK(z.holds);
    CHECK(z.lhs.at(0) == 0.0);
    CHECK_THROWS_AS(uncertainty_product(exp(-var(0) * var(0)), C(c, -1.0), C(c, 1.0)), InputError);
}

TEST_CASE("spectrum export")
{
    auto c = ctx();
    std::ostringstream os;
    export_spectrum_csv(os, exp(-var(0) * var(0)), C(c, 4.0), {0.0, 1.0});
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "epsilon,omega,re,im,abs");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == int(2 * c->size()));
}
