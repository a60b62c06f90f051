#pragma once

#include "gsf/expr.hpp"

#include <functional>
#include <vector>

namespace gsf {

struct QuadOptions {
    double tol = 1e-12;
    // cap on the number of panels after bisection
    int max_panels = 4000;
    // pieces per layer window
    int layer_pieces = 16;
};

// Globally adaptive Gauss-Kronrod (31 points): the panel with the largest error
// is bisected until the summed error is below tol times the L1 mass. Initial
// panels are split at layer windows, at the extra breakpoints, and at dyadic
// magnitudes +-2^k for long intervals.
// Throws ConvergenceError naming the failing subinterval.
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        const std::vector<Window>& windows, const std::vector<double>& breaks = {},
                        const QuadOptions& opt = {});

// Integral of f along variable k from a to b, other coordinates taken from x.
double integrate_along(const Expr& f, int k, const double* x, int nvars, double a, double b,
                       std::size_t i, const std::vector<LayerInfo>& layers,
                       const QuadOptions& opt = {});

} // namespace gsf
