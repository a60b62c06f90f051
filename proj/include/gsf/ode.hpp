#pragma once

#include "gsf/calculus.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace gsf {

// y' = F(t, y), y(t0) = y0 on [t0 - alpha, t0 + alpha]. F[k] is an expression
// in variable 0 = t and variables 1..d = y.
struct IVP {
    std::vector<Expr> F;
    GenNum t0;
    GPoint y0;
    GenNum alpha;
    GenNum r;
    std::size_t dim() const { return y0.size(); }
};

// InputError unless alpha, r are positive invertible and F matches y0.
void validate(const IVP& ivp);

// Sup over the box of |d^a v^i| for every component i and |a| <= l.
GenNum gnorm(const std::vector<Expr>& v, int l, const FCBox& box);
GenNum gnorm(const Expr& v, int l, const FCBox& box);

struct PicardPrecheck {
    GenNum M, L;
    AsymptoticClass alpha_L;
    bool contraction_ok = false;
    bool alpha_M_le_r = false;
};

// M and L over [t0 - alpha, t0 + alpha] x {|y - y0|_inf <= r}; supports d <= 2.
PicardPrecheck picard_precheck(const IVP& ivp);

struct SolveOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    // per-eps budget of accepted plus rejected steps
    long max_steps = 5000000;
    // integrate only forward from t0
    bool forward_only = false;
    // a step may move a layer argument by at most this much
    double layer_fraction = 0.25;
    unsigned threads = 0;
};

struct PathStats {
    long steps = 0;
    long rejected = 0;
    double rtol = 0.0;
    bool complete = true;
    std::string diagnostic;
};

// Per-eps dense output. Evaluating past the end of an incomplete solve throws EvalError.
class SolvedPath {
public:
    struct Segment {
        double t0, h;
        // states at theta = 0, 1/5, ..., 1 (6 nodes, d values each)
        std::vector<double> nodes;
    };
    struct Branch {
        double t_lo = 0.0, t_hi = 0.0;
        // sorted by time
        std::vector<Segment> seg;
        std::vector<double> y0;
        double t0 = 0.0;
        PathStats stats;
    };
    using Exact = std::function<std::vector<double>(std::size_t i, double t)>;

    SolvedPath() = default;
    SolvedPath(Ctx ctx, std::size_t d, std::vector<Expr> F, std::vector<Branch> b);

    const Ctx& ctx() const { return ctx_; }
    std::size_t dim() const { return d_; }
    std::vector<double> state(std::size_t i, double t) const;
    std::vector<double> deriv(std::size_t i, double t) const;
    GPoint at(const GenNum& t) const;
    double t_lo(std::size_t i) const { return br_[i].t_lo; }
    double t_hi(std::size_t i) const { return br_[i].t_hi; }
    const PathStats& stats(std::size_t i) const { return br_[i].stats; }
    bool complete() const;
    std::string diagnostic() const;
    // replaces interpolation by a closed form (linear systems)
    void set_exact(Exact e) { exact_ = std::move(e); }
    bool has_exact() const { return bool(exact_); }

private:
    Ctx ctx_;
    std::size_t d_ = 0;
    std::vector<Expr> F_;
    std::vector<Branch> br_;
    Exact exact_;
};

// Adaptive Dormand-Prince 5(4) per eps with layer-aware step caps.
SolvedPath solve_ivp(const IVP& ivp, const SolveOptions& opt = {});

// Same integrator on [lo, hi] containing t0, without the Picard data.
SolvedPath solve_range(const std::vector<Expr>& F, const GenNum& t0, const GPoint& y0, const GenNum& lo,
                       const GenNum& hi, const SolveOptions& opt = {});

struct PicardResult {
    int iterations = 0;
    // sup-norm of P^n y0 - P^(n-1) y0 per iteration
    std::vector<GenNum> increments;
    // alpha M sum_{k >= n} (alpha L)^k / k!
    std::vector<GenNum> bounds;
    PicardPrecheck pre;
    // nodes on [t0 - alpha, t0 + alpha] and iterate values, per eps
    std::vector<std::vector<double>> t;
    std::vector<std::vector<std::vector<double>>> y;
    std::vector<double> state(std::size_t i, double t) const;
};

// n_iter Picard iterations from the constant y0 on Chebyshev nodes.
// EvalError on divergence (three consecutive increases of the increment norm).
// InputError if the precheck fails.
PicardResult solve_picard(const IVP& ivp, int n_iter, int nodes = 48);

// sup over the interval of |y(t) - P^n y0(t)| per eps, using the path as y
GenNum picard_error(const PicardResult& p, const SolvedPath& y);

struct LinearSolution {
    SolvedPath path;
    bool closed_form = false;
    std::string notice;
    // largest relative deviation between closed form and the per-eps solve
    double cross_check = 0.0;
    // max over t of |int_t0^t A| / (-log rho), per eps
    GenNum log_ratio;
};

// y' = A(t) y on [a, b] with d <= 4; A[i][j] are expressions in t (variable 0).
// InputError when the logarithmic bound on int A fails.
LinearSolution solve_linear(const std::vector<std::vector<Expr>>& A, const GenNum& t0, const GPoint& y0,
                            const GenNum& a, const GenNum& b, const SolveOptions& opt = {});

struct GronwallResult {
    bool applicable = false;
    bool hypothesis = false;
    bool item1 = false;
    bool item2_applicable = false;
    bool item2 = false;
    bool holds = false;
    // smallest (bound - u) / max(1, |bound|) over the sample, per item
    double slack1 = 0.0;
    double slack2 = 0.0;
    std::string detail;
};

using PathFn = std::function<double(std::size_t i, double t)>;

// u <= b + int_0^t a u implies the two Gronwall bounds on [0, alpha].
GronwallResult gronwall_check(const PathFn& u, const Expr& a, const Expr& b, const GenNum& alpha,
                              int samples = 33);
GronwallResult gronwall_check(const Expr& u, const Expr& a, const Expr& b, const GenNum& alpha,
                              int samples = 33);

// epsilon, t, y_1..y_d, dy_1..dy_d
void export_path_csv(std::ostream& os, const SolvedPath& p, int samples_per_eps);

} // namespace gsf
