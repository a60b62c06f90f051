#pragma once

#include "gsf/calculus.hpp"

#include <string>
#include <vector>

namespace gsf {

// x =_j y: |x - y| <= C drho^(1/j) on the grid tail, C <= c_max.
struct EqUpto {
    bool holds = false;
    // attained max of |x - y| / rho^(1/j) over the tail
    double C = 0.0;
    // slope of log ratio against log rho (negative: ratio grows as eps -> 0)
    double slope = 0.0;
    bool unbounded = false;
};

inline constexpr double default_c_max = 1e3;

// Throws InputError for j <= 0.
EqUpto eq_upto(const GenNum& x, const GenNum& y, double j, double c_max = default_c_max);

// x in D_kj, i.e. x^(k+1) =_j 0
bool in_Dkj(const GenNum& x, int k, double j);

struct TaylorPoly {
    Expr f;
    GenNum a;
    int n = 0;
    // f^(r)(a) / r!
    std::vector<GenNum> coeffs;

    GenNum operator()(const GenNum& u) const;
    // sup |f^(n+1)| over [lo, hi] times |u|^(n+1) / (n+1)!
    GenNum remainder_bound(const GenNum& lo, const GenNum& hi, const GenNum& u) const;
};

TaylorPoly taylor_poly(const Expr& f, const GenNum& a, int n);

// f(a + u) - T_n(u) computed from the integral form
// u^(n+1)/n! int_0^1 f^(n+1)(a + s u) (1 - s)^n ds, so no cancellation is involved.
GenNum taylor_remainder(const Expr& f, const GenNum& a, int n, const GenNum& u);

struct NilpotentTaylor {
    bool holds = false;
    // largest e on the ladder j, j/2, ..., j/64 for which every sample passed
    double e_witness = 0.0;
    // best order k with remainder =_k 0 over the passing samples
    double k_achieved = 0.0;
    // largest ratio constant among the passing samples
    double C = 0.0;
    // worst offender at the first failing e
    double worst_e = 0.0;
    double worst_multiple = 0.0;
    double worst_C = 0.0;
    // direct difference f(x+u) - T(u) agrees with the integral remainder where resolvable
    bool consistent = true;
    std::string detail;
};

NilpotentTaylor check_taylor_nilpotent(const Expr& f, const GenNum& x, int n, double j,
                                       unsigned seed = 1);

struct Cancellation {
    bool holds = false;
    double k = 0.0;
    EqUpto premise;
    EqUpto conclusion;
};

// x r =_j x s implies r =_k s with 1/k = 1/j - q. Requires |x| >= drho^q on
// every eps and 1/j - q > 0 (InputError otherwise).
Cancellation cancel(const GenNum& r, const GenNum& s, const GenNum& x, double j, double q);

// Converse: for finite x, r =_k s implies x r =_k x s. InputError unless x is finite.
Cancellation cancel_converse(const GenNum& r, const GenNum& s, const GenNum& x, double k);

struct LittleOh {
    bool holds = false;
    std::vector<double> m;
    std::vector<AsymptoticClass> ratio;
};

// Peano form: R(u) / u^n at u = drho^m, m = 1, 2, 4, 8, must classify as
// infinitesimal or negligible for the two largest m.
LittleOh little_oh_check(const Expr& f, const GenNum& x, int n);

} // namespace gsf
