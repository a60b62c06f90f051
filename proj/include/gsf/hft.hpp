#pragma once

#include "gsf/calculus.hpp"

#include <complex>
#include <iosfwd>
#include <vector>

namespace gsf {

struct CGenNum {
    GenNum re, im;
    GenNum abs() const;
    std::complex<double> at(std::size_t i) const { return {re.at(i), im.at(i)}; }
};

struct HftOptions {
    QuadOptions quad{};
    // above this many periods on [-k, k] the interval is no longer cut at period boundaries
    double max_periods = 20000.0;
};

// integral of f(x) e^(-i x omega) over [-k, k] at grid index i; f in variable 0.
// Throws EvalError carrying eps and the number of periods when quadrature fails.
std::complex<double> hft_at(const Expr& f, const std::vector<LayerInfo>& layers, double k, double omega,
                            std::size_t i, const HftOptions& opt = {});

// F_k(f)(omega), no 1/(2 pi) factor
CGenNum hft(const Expr& f, const GenNum& k, const GenNum& omega, const HftOptions& opt = {});

struct Uncertainty {
    // int x^2 |psi|^2 and int omega^2 |F psi|^2 over [-omega_max, omega_max]
    GenNum spread_x, spread_omega;
    GenNum lhs, rhs;
    GenNum norm_x, norm_omega;
    GenNum omega_max;
    // omega_max^3 |F psi(omega_max)|^2, a size estimate of the neglected tail
    GenNum tail;
    bool holds = false;
};

struct UncertaintyOptions {
    // empty: 8 max(1, sup|psi'| / sup|psi|) over the box
    GenNum omega_max;
    HftOptions hft{};
};

// psi real, supported in [lo, hi] (InputError otherwise); the transform uses k = max(|lo|, |hi|).
Uncertainty uncertainty_product(const Expr& psi, const GenNum& lo, const GenNum& hi,
                                const UncertaintyOptions& opt = {});

// epsilon, omega, re, im, abs
void export_spectrum_csv(std::ostream& os, const Expr& f, const GenNum& k, const std::vector<double>& omegas,
                         const HftOptions& opt = {});

} // namespace gsf
