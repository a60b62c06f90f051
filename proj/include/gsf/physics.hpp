#pragma once

#include "gsf/nilpotent.hpp"

#include <array>
#include <optional>
#include <string>

namespace gsf {

struct HeatIncrements {
    double e = 1.0, j = 1.0;
    GenNum dt;
    std::array<GenNum, 3> dx;
    // dv * dt >= drho^q
    double q = 0.0;
    // 1/k = 1/j - q; empty when that is not positive
    std::optional<double> k_out;
};

// dt = drho^(1/(3e)), dx_i = drho^(1/(5e)), q = 14/(15e). Checks the smallness
// conditions on the grid and throws EvalError when one fails.
HeatIncrements choose_heat_increments(const Ctx& ctx, double e, double j);

// c, rho, k in variables 0..2 (space); u, F in variables 0..2 and 3 (time)
struct HeatSetup {
    Expr c, rho, k, u, F;
    GPoint x;
    GenNum t;
    HeatIncrements inc;
};

struct HeatBalance {
    GenNum Q_cv, Q_ext, Q_env;
    // Q_env - Q_cv - Q_ext
    GenNum flux_side;
    // c rho du/dt - div(k grad u) - F
    GenNum field_side;
    EqUpto eq_j, eq_k;
    bool eq_j_holds = false;
    bool eq_k_holds = false;
    // both verdicts agree
    bool consistent = false;
};

// InputError when k_out is missing (the cancellation is not available).
HeatBalance heat_balance(const HeatSetup& s);

// string (x, u(x, t)) with u in variables 0 = x, 1 = t; rho and G2 likewise
struct WaveSetup {
    Expr u, rho, G2;
    GenNum T;
    GenNum x, t;
    double j = 1.0, e = 1.0, q = 0.5, p = 0.0;
};

struct WaveCheck {
    bool holds = false;
    EqUpto eq;
};

struct WaveBalance {
    // 1/h = 1/j - p - 2q, 1/k = 1/j - q; 0 when the order is not positive
    double h = 0.0, k = 0.0;
    GenNum dx, phi, dphi;
    // hypotheses
    WaveCheck newton;       // e2 projection of Newton's law with T vec = T t, at order j
    WaveCheck taylor;       // first order Taylor of du/dx at x with the increment dx, order j
    bool dx_in_D1e = false;
    bool slope_ok = false;  // dphi/dx >= drho^p
    bool angle_ok = false;  // phi < pi/2
    // item 1: wave equation =_j implies cos^3 phi =_h 1
    bool forward_applicable = false;
    WaveCheck wave_j, cos3_h;
    bool forward = false;
    // item 2: cos^3 phi =_j 1 implies wave equation =_k
    bool backward_applicable = false;
    WaveCheck cos3_j, wave_k;
    bool backward = false;
    // wave equation with the Newton acceleration in place of d2u/dt2, order k
    WaveCheck dynamic_k;
    std::string detail;
};

WaveBalance wave_balance(const WaveSetup& s);

struct StringLength {
    bool precondition = false;  // sup |phi| in D_3j
    GenNum length, phi_max;
    EqUpto eq;
    bool holds = false;
};

// length of x -> (x, u(x, t)) on [a, b] against b - a at order 2j
StringLength string_length_check(const Expr& u, const GenNum& a, const GenNum& b, const GenNum& t, double j);

} // namespace gsf
