#include "gsf/parse.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace gsf;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run gsfcalc(const std::string& args)
{
    std::string cmd = std::string(GSFCALC) + " " + args + " 2>&1";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    char buf[4096];
    std::size_t k;
    while ((k = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, k);
    int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name)
{
    fs::path d = fs::temp_directory_path() / ("gsfcalc_" + name);
    fs::remove_all(d);
    return d;
}

} // namespace

TEST_CASE("scalar grammar")
{
    Ctx c = make_context(GaugeKind::identity);
    GenNum x = parse_scalar("2*drho^2 - (3 + drho)/drho + exp(0) + log(1) + -drho^-1", c);
    for (std::size_t i = 0; i < c->size(); ++i) {
        double r = c->rho[i];
        CHECK(x.at(i) == Catch::Approx(2 * r * r - (3 + r) / r + 1.0 - 1.0 / r).epsilon(1e-13));
    }
    GenNum e = parse_scalar("drho^(1/2) * eps^2 + sqrt(4) + abs(-1) + sin(0) + cos(0) + 1.5e-1", c);
    CHECK(e.at(3) == Catch::Approx(std::sqrt(c->rho[3]) * std::pow(c->grid[3], 2) + 4.15));
    GenNum v = parse_scalar("2^drho", c);
    CHECK(v.at(5) == Catch::Approx(std::pow(2.0, c->rho[5])));
    CHECK(parse_scalar("-2^2", c).at(0) == -4.0);
    CHECK(parse_scalar("2^3^2", c).at(0) == 512.0);
}

TEST_CASE("parse errors carry the position")
{
    Ctx c = make_context(GaugeKind::identity);
    auto pos = [&](const std::string& s) {
        try {
            parse_scalar(s, c);
        } catch (const ParseError& e) {
            return long(e.position());
        }
        return -1L;
    };
    CHECK(pos("1 + ") == 4);
    CHECK(pos("2*(drho") == 7);
    CHECK(pos("foo(1)") == 0);
    CHECK(pos("drho drho") == 5);
    CHECK(pos("1 + $") == 4);
    CHECK(pos("log 2") == 4);
    CHECK(pos("drho^2 + drho") == -1);
}

TEST_CASE("classify command")
{
    Run a = gsfcalc("classify 'drho^2 + drho'");
    CHECK(a.code == 0);
    CHECK(a.out.find("label: infinitesimal") != std::string::npos);
    CHECK(a.out.find("order: 1.0000") != std::string::npos);

    Run b = gsfcalc("classify 1/drho");
    CHECK(b.code == 0);
    CHECK(b.out.find("label: infinite") != std::string::npos);
    CHECK(b.out.find("order: -1") != std::string::npos);

    Run n = gsfcalc("--gauge identity classify 'exp(1/eps)'");
    CHECK(n.code == 0);
    CHECK(n.out.find("non_moderate_suspected: yes") != std::string::npos);
    Run m = gsfcalc("--gauge exp_inv classify 'exp(1/eps)'");
    CHECK(m.code == 0);
    CHECK(m.out.find("label: infinite") != std::string::npos);
    CHECK(m.out.find("non_moderate_suspected: no") != std::string::npos);

    Run p = gsfcalc("classify '2*(drho'");
    CHECK(p.code == 2);
    CHECK(p.out.find("position 8") != std::string::npos);
    CHECK(gsfcalc("classify '1/(drho - drho)'").code == 3);
    CHECK(gsfcalc("classify 'log(-1)'").code == 3);
    CHECK(gsfcalc("--gauge foo classify drho").code == 2);
    CHECK(gsfcalc("--grid-n 4 classify drho").code == 2);
    CHECK(gsfcalc("--grid-n 16 --grid-eps0 0.25 --grid-ratio 0.3 classify drho").code == 0);
    CHECK(gsfcalc("frobnicate").code == 2);
}

TEST_CASE("simulate command")
{
    CHECK(gsfcalc("simulate nope").code == 2);

    fs::path d = scratch("sim");
    fs::create_directories(d);
    {
        std::ofstream cfg(d / "bad.cfg");
        cfg << "[scenario.two_media]\nbeta9 = 1\n";
    }
    Run bad = gsfcalc("simulate two_media --config " + (d / "bad.cfg").string());
    CHECK(bad.code == 2);
    CHECK(bad.out.find("beta9") != std::string::npos);

    {
        std::ofstream cfg(d / "equal.cfg");
        cfg << "[scenario.two_media]\nbeta1 = 0.0064\nbeta2 = 0.0064\n";
    }
    Run eq = gsfcalc("simulate two_media --config " + (d / "equal.cfg").string() + " --out " + (d / "a").string());
    CHECK(eq.code == 0);
    std::string report = slurp(d / "a" / "report.txt");
    CHECK(report.find("pass trivial_reduction") != std::string::npos);
    for (const char* f : {"two_media_path.csv", "two_media_baseline_path.csv", "two_media_events.csv"})
        CHECK(fs::exists(d / "a" / f));
    CHECK(slurp(d / "a" / "two_media_events.csv").rfind("epsilon,event_time,crossing_id\n", 0) == 0);

    // same manifest twice: byte-identical outputs
    gsfcalc("simulate two_media --config " + (d / "equal.cfg").string() + " --out " + (d / "b").string());
    for (const char* f : {"two_media_path.csv", "two_media_events.csv", "report.txt"})
        CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
}

TEST_CASE("simulate pendulum from the shipped config")
{
    fs::path d = scratch("pendulum");
    Run r = gsfcalc("simulate pendulum --config " + std::string(GSF_SOURCE_DIR) + "/configs/pendulum.cfg --out " +
                    d.string());
    CHECK(r.code == 0);
    for (const char* f : {"pendulum_path.csv", "pendulum_events.csv", "report.txt"}) CHECK(fs::exists(d / f));
    std::string csv = slurp(d / "pendulum_path.csv");
    CHECK(csv.rfind("epsilon,t,y_1,y_2,dy_1,dy_2\n", 0) == 0);
}

TEST_CASE("verify command")
{
    Run a = gsfcalc("verify ring --seed 7"), b = gsfcalc("verify ring --seed 7");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("check,status,achieved,tolerance,instances,failures,detail\n", 0) == 0);
    CHECK(a.out.find(",fail,") == std::string::npos);
    Run m = gsfcalc("verify mollifier");
    CHECK(m.code == 0);
    CHECK(m.out.find("integer_translates_sum_to_one,pass") != std::string::npos);
    CHECK(gsfcalc("verify bogus").code == 2);
}

TEST_CASE("embed-export command")
{
    Run a = gsfcalc("embed-export delta --lo -1 --hi 1 --points 3");
    CHECK(a.code == 0);
    std::istringstream in(a.out);
    std::string line;
    std::getline(in, line);
    CHECK(line == "epsilon,x,f_eps_of_x");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 24 * 3);

    fs::path d = scratch("embed");
    CHECK(gsfcalc("embed-export mollifier --points 11 --out " + d.string()).code == 0);
    CHECK(slurp(d / "mollifier.csv").rfind("x,mu,mu_prime\n", 0) == 0);
    CHECK(gsfcalc("embed-export heaviside --b-exponent 2 --points 5").code == 0);
    CHECK(gsfcalc("embed-export nothing").code == 2);
    CHECK(gsfcalc("embed-export delta --lo 1 --hi 0").code == 2);
}
