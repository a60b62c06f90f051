#include "gsf/error.hpp"
#include "gsf/mollifier.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace gsf;
using Catch::Approx;

TEST_CASE("mollifier builds and meets its defining properties")
{
    const MollifierFn mu = build_mollifier(8, 6);
    CHECK(mu(0.0) == Approx(1.0).margin(1e-10));
    CHECK(std::abs(moment(mu, 0, false).value - 1.0) <= 1e-10);
    for (int j = 1; j <= 8; ++j) CHECK(std::abs(moment(mu, j, false).value) <= 1e-8);
    for (int k = 1; k <= 6; ++k) {
        CHECK(std::abs(mu(k)) <= 1e-8);
        CHECK(std::abs(mu(-k)) <= 1e-8);
    }
    CHECK(std::abs(mu(3.0)) <= 1e-8);
    CHECK_THROWS_AS(build_mollifier(1, 6), InputError);
}

TEST_CASE("mollifier is even with odd derivative")
{
    const MollifierFn& mu = standard_mollifier();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-20.0, 20.0);
    for (int n = 0; n < 100; ++n) {
        double x = U(rng);
        CHECK(mu(x) == mu(-x));
        CHECK(std::abs(mu.derivative(x, 1) + mu.derivative(-x, 1)) <= 1e-10);
    }
}

TEST_CASE("one-sided moments are reported")
{
    const MollifierFn& mu = standard_mollifier();
    MomentResult m = moment(mu, 1, true);
    CHECK(std::isfinite(m.value));
    CHECK(m.error >= 0.0);
    CHECK(moment(mu, 0, true).value == Approx(0.5).margin(1e-10));
}

TEST_CASE("Poisson summation: integer translates sum to one")
{
    const MollifierFn& mu = standard_mollifier();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int n = 0; n < 100; ++n) {
        double x = U(rng), s = 0.0;
        for (int k = -60; k <= 60; ++k) s += mu(x + k);
        CHECK(std::abs(s - 1.0) <= 1e-6);
    }
}

TEST_CASE("derivatives agree with central differences")
{
    const MollifierFn& mu = standard_mollifier();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-6.0, 6.0);
    for (int n = 0; n < 100; ++n) {
        double x = U(rng);
        for (int d = 0; d < 3; ++d) {
            double h = 1e-4;
            double fd = (mu.derivative(x + h, d) - mu.derivative(x - h, d)) / (2 * h);
            double fdd = (mu.derivative(x + 2 * h, d) - mu.derivative(x - 2 * h, d)) / (4 * h);
            double rich = (4.0 * fd - fdd) / 3.0;
            double ex = mu.derivative(x, d + 1);
            CHECK(std::abs(rich - ex) <= 1e-6 * std::max(1.0, std::abs(ex)));
        }
    }
    // both branches of the sinc evaluation meet smoothly
    CHECK(mu.derivative(0.5 - 1e-13, 2) == Approx(mu.derivative(0.5, 2)).epsilon(1e-9));
}

TEST_CASE("cumulative function")
{
    const MollifierFn& mu = standard_mollifier();
    CHECK(mu.cumulative(0.0) == 0.5);
    CHECK(mu.cumulative(40.0) == 1.0);
    CHECK(mu.cumulative(-40.0) == 0.0);
    CHECK(mu.cumulative(31.9) == Approx(1.0).margin(1e-12));
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-10.0, 10.0);
    for (int n = 0; n < 50; ++n) {
        double u = U(rng), h = 1e-4;
        double fd = (mu.cumulative(u + h) - mu.cumulative(u - h)) / (2 * h);
        CHECK(fd == Approx(mu(u)).margin(1e-8));
        CHECK(mu.cumulative(u) + mu.cumulative(-u) == Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("vp kernel approaches 1/u and is odd")
{
    const MollifierFn& mu = standard_mollifier();
    CHECK(mu.vp_kernel(40.0) == 1.0 / 40.0);
    CHECK(mu.vp_kernel(39.5) == Approx(1.0 / 39.5).epsilon(1e-9));
    CHECK(mu.vp_kernel(0.0) == Approx(0.0).margin(1e-12));
    CHECK(mu.vp_kernel(2.3) == Approx(-mu.vp_kernel(-2.3)).epsilon(1e-10));
    double h = 1e-4;
    double fd = (mu.vp_kernel(1.7 + h) - mu.vp_kernel(1.7 - h)) / (2 * h);
    CHECK(fd == Approx(mu.vp_kernel(1.7, 1)).epsilon(1e-6));
}

TEST_CASE("cutoff")
{
    CutoffFn chi = build_cutoff();
    CHECK(chi(0.5) == 1.0);
    CHECK(chi(1.0) == 1.0);
    CHECK(chi(2.5) == 0.0);
    CHECK(chi(-2.0) == 0.0);
    double prev = 1.0;
    for (double x = 1.0; x <= 2.0; x += 0.01) {
        double v = chi(x);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v <= prev);
        prev = v;
    }
    CHECK(chi(1.5) > 0.0);
    CHECK(chi(1.5) < 1.0);
    CHECK(chi(-1.3) == chi(1.3));
    double h = 1e-5;
    CHECK((chi(1.4 + h) - chi(1.4 - h)) / (2 * h) == Approx(chi.derivative(1.4, 1)).epsilon(1e-6));
    CHECK((chi(-1.4 + h) - chi(-1.4 - h)) / (2 * h) == Approx(chi.derivative(-1.4, 1)).epsilon(1e-6));
}

TEST_CASE("smooth step blend")
{
    CHECK(step_blend(-1.5) == 0.0);
    CHECK(step_blend(1.5) == 1.0);
    CHECK(step_blend(0.0) == Approx(0.5).margin(1e-15));
    double h = 1e-5;
    CHECK((step_blend(0.3 + h) - step_blend(0.3 - h)) / (2 * h) == Approx(step_blend(0.3, 1)).epsilon(1e-6));
}

TEST_CASE("CSV export")
{
    std::ostringstream os;
    export_mollifier_csv(os, standard_mollifier(), -2.0, 2.0, 5);
    std::string s = os.str();
    CHECK(s.rfind("x,mu,mu_prime\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 6);
}
