#pragma once

#include <iosfwd>
#include <vector>

namespace gsf {

// sin(pi x) and cos(pi x) with exact zeros at the integers / half integers
double sinpi(double x);
double cospi(double x);

// Even Schwartz mollifier with unit integral, mu(0)=1, mu(k)=0 for k in Z\{0}
// and vanishing two-sided moments: mu(x) = sinc(pi x) exp(-sigma^2 x^2 / 4).
// Its Fourier transform is the indicator of [-pi,pi] smoothed by a Gaussian,
// a 2pi-lattice partition of unity.
class MollifierFn {
public:
    static constexpr int d_max = 16;

    MollifierFn(int moment_order, int interp_range);

    double operator()(double x) const;
    // d-th derivative, 0 <= d <= d_max
    double derivative(double x, int d) const;
    // M(u) = integral of mu over (-inf, u]
    double cumulative(double u) const;
    // derivatives of V(u) = p.v. integral mu(u-s)/s ds
    double vp_kernel(double u, int d = 0) const;

    int moment_order() const { return moment_order_; }
    int interp_range() const { return interp_range_; }
    double sigma() const { return sigma_; }
    // |x| beyond which mu and all its derivatives are below 1e-17
    double radius() const { return radius_; }
    // |u| beyond which vp_kernel switches to the far-field 1/u
    double vp_far() const { return vp_far_; }

private:
    int moment_order_;
    int interp_range_;
    double sigma_ = 0.4;
    double radius_ = 32.0;
    double vp_far_ = 40.0;
    double panel_ = 0.25;
    std::vector<double> prefix_;
};

// Builds the mollifier and checks its defining properties; throws on failure.
MollifierFn build_mollifier(int moment_order = 8, int interp_range = 6);

// Shared instance used by the embeddings (M=8, K=6).
const MollifierFn& standard_mollifier();

struct MomentResult {
    double value = 0.0;
    double error = 0.0;
};

// two-sided: integral of x^j mu over R; one-sided: integral over [0, inf)
MomentResult moment(const MollifierFn& mu, double j, bool one_sided);

// Smooth cutoff: 1 on [-1,1], 0 outside (-2,2), monotone in between.
class CutoffFn {
public:
    double operator()(double x) const { return derivative(x, 0); }
    double derivative(double x, int d) const;
    double inner() const { return 1.0; }
    double outer() const { return 2.0; }
};

CutoffFn build_cutoff();

// Smooth monotone step from 0 (u <= -1) to 1 (u >= 1), d-th derivative.
double step_blend(double u, int d = 0);

// CSV with columns x, mu, mu_prime on n points of [lo, hi].
void export_mollifier_csv(std::ostream& os, const MollifierFn& mu, double lo, double hi, int n);

} // namespace gsf
