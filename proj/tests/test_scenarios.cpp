#include "gsf/error.hpp"
#include "gsf/scenarios.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace gsf;

namespace {

void require_all(const ScenarioResult& r)
{
    std::ostringstream os;
    write_report(os, r);
    INFO(os.str());
    for (const ScenarioCheck& c : r.checks) {
        INFO(c.name << " achieved " << c.achieved);
        CHECK(c.passed);
    }
}

ScenarioConfig cfg(const std::string& id, std::map<std::string, double> over = {})
{
    ScenarioConfig c = default_config(id);
    for (auto& [k, v] : over) c.values[k] = v;
    return c;
}

// largest relative difference of two runs at the smallest eps, over samples far in both
double far_difference(const SolvedPath& a, const SolvedPath& b, double t1, std::size_t comp, double center, double far)
{
    const std::size_t ia = a.ctx()->size() - 1, ib = b.ctx()->size() - 1;
    double d = 0.0;
    for (int k = 0; k <= 200; ++k) {
        double t = t1 * k / 200.0;
        auto ya = a.state(ia, t), yb = b.state(ib, t);
        if (std::abs(ya[comp] - center) < far || std::abs(yb[comp] - center) < far) continue;
        double na = 0.0, nd = 0.0;
        for (std::size_t q = 0; q < ya.size(); ++q) {
            na += ya[q] * ya[q];
            nd += (ya[q] - yb[q]) * (ya[q] - yb[q]);
        }
        d = std::max(d, std::sqrt(nd / na));
    }
    return d;
}

} // namespace

TEST_CASE("config sections parse, validate and round-trip")
{
    std::istringstream in("; comment\n[scenario.snell]\nn2 = 1.33\nheaviside = blend\n[scenario.pendulum]\nL1 = 0.5\n");
    auto v = read_configs(in);
    REQUIRE(v.size() == 2);
    CHECK(v[0].id == "snell");
    CHECK(v[0].get("n2") == 1.33);
    CHECK(v[0].variant == HeavisideVariant::blend);
    CHECK(v[1].get("L1") == 0.5);
    CHECK(v[1].get("L2") == 0.2);

    std::ostringstream os;
    write_config(os, v[1]);
    std::istringstream back(os.str());
    ScenarioConfig w = read_config(back, "pendulum");
    CHECK(w.values == v[1].values);

    auto bad = [](const std::string& s) {
        std::istringstream b(s);
        return read_configs(b);
    };
    CHECK_THROWS_AS(bad("[scenario.nope]\nx = 1\n"), InputError);
    CHECK_THROWS_AS(bad("[scenario.pendulum]\nspeed = 1\n"), InputError);
    CHECK_THROWS_AS(bad("[scenario.pendulum]\ntheta0 = 4\n"), InputError);
    CHECK_THROWS_AS(bad("[scenario.pendulum]\nL2 = -1\n"), InputError);
    CHECK_THROWS_AS(bad("[scenario.pendulum]\nL2 = abc\n"), InputError);
    CHECK_THROWS_AS(bad("[other]\nx = 1\n"), InputError);
    CHECK_THROWS_AS(default_config("unknown"), InputError);
}

TEST_CASE("shipped config files match the defaults")
{
    for (const std::string& id : scenario_ids()) {
        std::ifstream f(std::string(GSF_SOURCE_DIR) + "/configs/" + id + ".cfg");
        REQUIRE(f);
        ScenarioConfig c = read_config(f, id);
        ScenarioConfig d = default_config(id);
        for (auto& [k, v] : d.values) CHECK(c.get(k) == Catch::Approx(v).epsilon(1e-15));
    }
}

TEST_CASE("pendulum on the edge")
{
    ScenarioResult r = run_pendulum(default_config("pendulum"));
    require_all(r);
    CHECK(r.check("far_field_oracle").achieved <= 1e-4);
    CHECK_FALSE(r.events.empty());

    std::ostringstream os;
    export_events_csv(os, r);
    CHECK(os.str().rfind("epsilon,event_time,crossing_id\n", 0) == 0);
}

TEST_CASE("pendulum that never reaches the edge is a fixed-length pendulum")
{
    ScenarioResult r = run_pendulum(cfg("pendulum", {{"omega_init", 0.2}, {"small_oscillation", 0.0}}));
    CHECK(r.events.empty());
    CHECK(r.check("far_field_oracle").achieved <= 1e-8);
    CHECK(r.check("energy_conserved").passed);
}

TEST_CASE("two media")
{
    ScenarioResult r = run_two_media(default_config("two_media"));
    require_all(r);

    ScenarioResult same = run_two_media(cfg("two_media", {{"beta2", 0.0064}}));
    const SolvedPath &p = same.paths[0].path, &q = same.paths[1].path;
    for (std::size_t i = 0; i < p.ctx()->size(); ++i)
        for (double t : {0.5, 2.0, 5.5}) CHECK(p.state(i, t)[0] == Catch::Approx(q.state(i, t)[0]).margin(1e-12));
}

TEST_CASE("stress-strain")
{
    ScenarioResult r = run_stress_strain(default_config("stress_strain"));
    require_all(r);
    CHECK(r.check("harmonic_oracle").achieved <= 1e-6);
    CHECK(r.check("energy_drift_per_segment").achieved <= 1e-5);
}

TEST_CASE("snell refraction, straight line and total reflection")
{
    ScenarioResult r = run_snell(default_config("snell"));
    require_all(r);
    const double want = std::asin(std::sin(std::numbers::pi / 6.0) / 1.5);
    const GenNum& a = r.quantities.at("exit_angle");
    CHECK(a.at(a.size() - 1) == Catch::Approx(want).margin(1e-4));

    ScenarioResult flat = run_snell(cfg("snell", {{"n2", 1.0}}));
    require_all(flat);
    const GenNum& f = flat.quantities.at("exit_angle");
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f.at(i) == Catch::Approx(std::numbers::pi / 6.0).margin(1e-12));

    ScenarioResult tir = run_snell(cfg("snell", {{"n1", 1.5}, {"n2", 1.0}, {"incidence_deg", 60.0}}));
    require_all(tir);
    CHECK(tir.check("reflection_angle").passed);
}

TEST_CASE("step potential")
{
    ScenarioResult r = run_step_potential(default_config("step_potential"));
    require_all(r);

    ScenarioResult free = run_step_potential(cfg("step_potential", {{"U0", 0.0}}));
    const GenNum& R0 = free.quantities.at("reflection");
    for (std::size_t i = 0; i < R0.size(); ++i) CHECK(R0.at(i) < 1e-12);
    CHECK(free.check("transmission_closed_form").passed);

    ScenarioResult wall = run_step_potential(cfg("step_potential", {{"U0_order", 0.25}}));
    require_all(wall);
    const GenNum& R1 = wall.quantities.at("reflection");
    for (std::size_t i = 0; i < R1.size(); ++i) CHECK(R1.at(i) == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("far-field outputs do not depend on the regularization")
{
    ScenarioConfig base = cfg("pendulum", {{"small_oscillation", 0.0}});
    base.grid_n = 8;
    const SolvedPath ref = run_pendulum(base).paths[0].path;
    const double th0 = base.get("theta0");
    for (double a : {0.5, 2.0}) {
        ScenarioConfig c = base;
        c.b_exponent = a;
        INFO("b exponent " << a);
        CHECK(far_difference(ref, run_pendulum(c).paths[0].path, 3.0, 0, th0, 0.01) <= 1e-5);
    }
    ScenarioConfig blend = base;
    blend.variant = HeavisideVariant::blend;
    CHECK(far_difference(ref, run_pendulum(blend).paths[0].path, 3.0, 0, th0, 0.01) <= 1e-5);

    ScenarioConfig s = default_config("snell");
    s.grid_n = 8;
    ScenarioConfig sb = s;
    sb.variant = HeavisideVariant::blend;
    ScenarioConfig sa = s;
    sa.b_exponent = 2.0;
    const SolvedPath ray = run_snell(s).paths[0].path;
    CHECK(far_difference(ray, run_snell(sb).paths[0].path, 3.0, 1, 0.0, 0.05) <= 1e-5);
    CHECK(far_difference(ray, run_snell(sa).paths[0].path, 3.0, 1, 0.0, 0.05) <= 1e-5);

    ScenarioConfig q = default_config("step_potential");
    q.grid_n = 8;
    ScenarioConfig qb = q;
    qb.variant = HeavisideVariant::blend;
    ScenarioConfig qa = q;
    qa.b_exponent = 0.5;
    auto last = [](const ScenarioResult& r) {
        const GenNum& v = r.quantities.at("reflection");
        return v.at(v.size() - 1);
    };
    const double R = last(run_step_potential(q));
    CHECK(std::abs(last(run_step_potential(qb)) - R) <= 1e-5 * R);
    CHECK(std::abs(last(run_step_potential(qa)) - R) <= 1e-5 * R);
}

TEST_CASE("dispatch and report")
{
    CHECK_THROWS_AS(run_scenario(ScenarioConfig{"nope"}), InputError);
    ScenarioResult r = run_scenario(default_config("snell"));
    std::ostringstream os;
    write_report(os, r);
    CHECK(os.str().find("scenario snell: PASS") != std::string::npos);
}
