#include "gsf/error.hpp"
#include "gsf/suites.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <sstream>

using namespace gsf;

namespace {

std::string csv(const SuiteReport& r)
{
    std::ostringstream os;
    write_suite_csv(os, r);
    return os.str();
}

} // namespace

TEST_CASE("every suite passes at the default seed")
{
    for (const auto& id : suite_ids()) {
        SuiteReport r = run_suite(id);
        std::ostringstream os;
        write_suite_report(os, r);
        INFO(os.str());
        CHECK(r.passed());
        CHECK_FALSE(r.checks.empty());
    }
}

TEST_CASE("suites are deterministic per seed")
{
    SuiteOptions opt;
    opt.seed = 7;
    opt.trees = 20;
    CHECK(csv(run_suite("calculus", opt)) == csv(run_suite("calculus", opt)));
    opt.nilpotent_instances = 60;
    opt.cancellation_instances = 20;
    SuiteReport a = run_suite("nilpotent", opt);
    CHECK(csv(a) == csv(run_suite("nilpotent", opt)));
    CHECK(a.passed());
}

TEST_CASE("suite csv layout")
{
    SuiteReport r = run_suite("ring");
    std::string s = csv(r);
    CHECK(s.rfind("check,status,achieved,tolerance,instances,failures,detail\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(r.checks.size()) + 1);
    CHECK_THROWS_AS(r.check("no_such_check"), Error);
}

TEST_CASE("unknown suite")
{
    CHECK_THROWS_AS(run_suite("quantum"), InputError);
}
