#pragma once

#include "gsf/expr.hpp"
#include "gsf/quadrature.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace gsf {

// b = drho^-a, the default embedding scale
GenNum embedding_scale(const Ctx& ctx, double a = 1.0);

// delta(x) = b mu(b x) chi(x |log b|), as a function of arg (default variable 0)
Expr embed_delta(const GenNum& b, const Expr& arg = var(0));

enum class HeavisideVariant { mollified, blend };

// mollified: H(x) = M(b x) with M the cumulative of mu (so H(0) = 1/2, H' = b mu(b x));
// blend: smooth monotone interpolation of 0 and 1 on |b x| <= 1
Expr embed_heaviside(const GenNum& b, const Expr& arg = var(0),
                     HeavisideVariant variant = HeavisideVariant::mollified);

// vp(1/x) embedded: b V(b x); equals 1/x once |b x| >= 40
Expr embed_vp(const GenNum& b, const Expr& arg = var(0));

// Mollified function g * mu_b as a GSF in variable 0. kinks lists the points
// where g is not smooth; smooth = true verifies |g_b - g| <= b^-2 on probe points.
Expr embed_function(std::function<double(double)> g, const GenNum& b, std::vector<double> kinks = {},
                    bool smooth = false, std::vector<double> probe = {});

// Same from uniform samples (piecewise linear between them). The spacing must
// resolve 1/b at every grid eps, otherwise InputError.
Expr embed_function_samples(double x0, double h, std::vector<double> values, const GenNum& b);

// (f(x + h v) - f(x)) / h
GenNum incremental_ratio(const Expr& f, const GPoint& x, const GenNum& h, const GPoint& v);

// integral of f (in variable 0) from a to b, per eps
GenNum integrate_1d(const Expr& f, const GenNum& a, const GenNum& b, const QuadOptions& opt = {});

struct FCBox {
    GPoint lo, hi;
    std::size_t dim() const { return lo.size(); }
};

// Validates lo <= hi per eps and sharp boundedness; throws InputError.
void check_box(const FCBox& box);

// iterated integral over a box of dimension <= 3
GenNum integrate_box(const Expr& f, const FCBox& box, const QuadOptions& opt = {});

struct Extremum {
    GenNum min, max;
    GPoint argmin, argmax;
    int samples_per_axis = 0;
};

Extremum extremum(const Expr& f, const FCBox& box);

// c in [a, b] with f(c) = y per eps (bisection); throws on bracket violation
GenNum solve_scalar(const Expr& f, const GenNum& y, const GenNum& a, const GenNum& b,
                    double tol_root = 1e-13);

// CSV with columns epsilon, x, f_eps_of_x
void export_samples_csv(std::ostream& os, const Expr& f, const Ctx& ctx, const std::vector<double>& xs);

} // namespace gsf
