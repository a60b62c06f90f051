#pragma once

#include "gsf/expr.hpp"

#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace gsf {

using Rng = std::mt19937_64;

struct SuiteCheck {
    std::string name;
    bool passed = false;
    // worst residual (or order, for order checks) over all instances
    double achieved = 0.0;
    double tolerance = 0.0;
    int instances = 0;
    int failures = 0;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    unsigned long seed = 0;
    std::vector<SuiteCheck> checks;

    bool passed() const;
    const SuiteCheck& check(const std::string& name) const;
};

struct SuiteOptions {
    unsigned long seed = 1;
    // nullptr: default identity grid
    Ctx ctx;
    int trees = 200;
    int nilpotent_instances = 500;
    int cancellation_instances = 100;
};

// ring, mollifier, calculus, nilpotent, ode, heat, wave, hft
const std::vector<std::string>& suite_ids();
// InputError for an unknown id
SuiteReport run_suite(const std::string& id, const SuiteOptions& opt = {});

// Smooth tree in variable 0 built from reals, generalized constants near the reals,
// + - *, sin, cos, tanh, atan, bounded exp, log(2 + sin), sqrt(1 + t^2) and t / (2 + cos).
// Finite with finite derivatives on [-2, 2] for every eps.
Expr random_tree(Rng& rng, const Ctx& ctx, int depth);

// check,status,achieved,tolerance,instances,failures,detail
void write_suite_csv(std::ostream& os, const SuiteReport& r);
void write_suite_report(std::ostream& os, const SuiteReport& r);

} // namespace gsf
