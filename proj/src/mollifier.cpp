#include "gsf/mollifier.hpp"
#include "gsf/error.hpp"
#include "gsf/jet.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace gsf {

namespace {

constexpr double pi = boost::math::constants::pi<double>();
using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
using GL = boost::math::quadrature::gauss<double, 20>;

// 1/(2n+1)! for the sinc series
double inv_odd_factorial(int n)
{
    double f = 1.0;
    for (int i = 2; i <= 2 * n + 1; ++i) f /= double(i);
    return f;
}

Jet sinc_pi_jet(double x0, std::size_t order)
{
    if (std::abs(x0) < 0.5) {
        Jet u = Jet::variable(x0, order) * pi;
        Jet w = u * u;
        const int nterms = 22;
        Jet s(order, inv_odd_factorial(nterms) * ((nterms % 2) ? -1.0 : 1.0));
        for (int n = nterms - 1; n >= 0; --n) {
            s = s * w;
            s += inv_odd_factorial(n) * ((n % 2) ? -1.0 : 1.0);
        }
        return s;
    }
    const double s0 = sinpi(x0), c0 = cospi(x0);
    Jet sn(order);
    double pk = 1.0;
    for (std::size_t k = 0; k <= order; ++k) {
        if (k > 0) pk *= pi / double(k);
        double v = 0.0;
        switch (k % 4) {
        case 0: v = s0; break;
        case 1: v = c0; break;
        case 2: v = -s0; break;
        default: v = -c0; break;
        }
        sn[k] = pk * v;
    }
    return sn * recip(Jet::variable(x0, order) * pi);
}

Jet mu_jet(double x0, std::size_t order, double c)
{
    Jet x = Jet::variable(x0, order);
    Jet g = exp((x * x) * (-c));
    return sinc_pi_jet(x0, order) * g;
}

// smooth transition 0 -> 1 on t in [0,1]
Jet smooth_step(const Jet& t)
{
    const std::size_t n = t.order();
    if (t[0] <= 0.0) return Jet(n, 0.0);
    if (t[0] >= 1.0) return Jet(n, 1.0);
    Jet f = exp(recip(t) * -1.0);
    Jet g = exp(recip(1.0 - t) * -1.0);
    return f * recip(f + g);
}

} // namespace

double sinpi(double x)
{
    double n = std::round(x);
    double f = x - n;
    double s = std::sin(pi * f);
    return std::fmod(n, 2.0) == 0.0 ? s : -s;
}

double cospi(double x)
{
    double n = std::round(x);
    double f = x - n;
    double c = (std::abs(f) == 0.5) ? 0.0 : std::cos(pi * f);
    return std::fmod(n, 2.0) == 0.0 ? c : -c;
}

MollifierFn::MollifierFn(int moment_order, int interp_range)
    : moment_order_(moment_order), interp_range_(interp_range)
{
    if (moment_order < 2 || interp_range < 2)
        throw InputError("mollifier needs moment order >= 2 and interpolation range >= 2");
    const int np = int(std::round(radius_ / panel_));
    prefix_.assign(np + 1, 0.0);
    auto f = [this](double x) { return (*this)(x); };
    for (int k = 0; k < np; ++k)
        prefix_[k + 1] = prefix_[k] + GK::integrate(f, k * panel_, (k + 1) * panel_, 0, 1e-15);
}

double MollifierFn::operator()(double x) const
{
    const double ax = std::abs(x);
    if (ax > 200.0) return 0.0;
    const double g = std::exp(-0.25 * sigma_ * sigma_ * x * x);
    if (ax < 0.5) return sinc_pi_jet(x, 0)[0] * g;
    return sinpi(x) / (pi * x) * g;
}

double MollifierFn::derivative(double x, int d) const
{
    if (d < 0 || d > d_max) throw InputError("mollifier derivative order out of range");
    if (d == 0) return (*this)(x);
    if (std::abs(x) > 200.0) return 0.0;
    return mu_jet(x, std::size_t(d), 0.25 * sigma_ * sigma_).derivative(std::size_t(d));
}

double MollifierFn::cumulative(double u) const
{
    if (std::isnan(u)) return u;
    if (u < 0.0) return 1.0 - cumulative(-u);
    if (u >= radius_) return 1.0;
    const int n = int(u / panel_);
    const double a = n * panel_;
    double rest = 0.0;
    if (u > a) rest = GL::integrate([this](double s) { return (*this)(s); }, a, u);
    return 0.5 + prefix_[n] + rest;
}

double MollifierFn::vp_kernel(double u, int d) const
{
    if (std::abs(u) >= vp_far_) {
        double f = 1.0;
        for (int i = 2; i <= d; ++i) f *= double(i);
        return ((d % 2) ? -f : f) / std::pow(u, d + 1);
    }
    auto g = [&](double s) {
        if (s < 1e-3)
            return -2.0 * (derivative(u, d + 1) + derivative(u, d + 3) * s * s / 6.0);
        return (derivative(u - s, d) - derivative(u + s, d)) / s;
    };
    const double top = std::abs(u) + radius_;
    double total = 0.0;
    for (double a = 0.0; a < top; a += 1.0)
        total += GK::integrate(g, a, std::min(a + 1.0, top), 6, 1e-14);
    return total;
}

MollifierFn build_mollifier(int moment_order, int interp_range)
{
    MollifierFn mu(moment_order, interp_range);
    auto fail = [](const std::string& what, double v) {
        std::ostringstream os;
        os << "mollifier property violated: " << what << " (value " << v << ")";
        throw Error(os.str());
    };
    if (std::abs(mu(0.0) - 1.0) > 1e-10) fail("mu(0) = 1", mu(0.0));
    MomentResult m0 = moment(mu, 0, false);
    if (std::abs(m0.value - 1.0) > 1e-10) fail("unit integral", m0.value);
    for (int j = 1; j <= moment_order; ++j) {
        MomentResult mj = moment(mu, j, false);
        if (std::abs(mj.value) > 1e-8) fail("vanishing moment j=" + std::to_string(j), mj.value);
    }
    for (int k = 1; k <= interp_range; ++k) {
        if (std::abs(mu(k)) > 1e-8 || std::abs(mu(-k)) > 1e-8)
            fail("mu(k) = 0 for k=" + std::to_string(k), mu(k));
    }
    return mu;
}

const MollifierFn& standard_mollifier()
{
    static const MollifierFn mu = build_mollifier(8, 6);
    return mu;
}

MomentResult moment(const MollifierFn& mu, double j, bool one_sided)
{
    if (j < 0) throw InputError("moment order must be >= 0");
    // wider than radius(): x^j amplifies the Gaussian tail
    const double top = 48.0;
    auto f = [&](double x) { return (x == 0.0 && j == 0.0 ? 1.0 : std::pow(std::abs(x), j)) * mu(x); };
    MomentResult r;
    double pos = 0.0, neg = 0.0;
    for (double a = 0.0; a < top; a += 1.0) {
        double e = 0.0;
        pos += GK::integrate(f, a, a + 1.0, 3, 1e-15, &e);
        r.error += e;
    }
    if (one_sided) {
        r.value = pos;
        return r;
    }
    // mu is even; (-x)^j = (-1)^j |x|^j for integer j
    if (j != std::floor(j)) throw InputError("two-sided moments need an integer order");
    neg = std::fmod(j, 2.0) == 0.0 ? pos : -pos;
    r.value = pos + neg;
    r.error *= 2.0;
    return r;
}

double CutoffFn::derivative(double x, int d) const
{
    if (d < 0) throw InputError("negative derivative order");
    const double ax = std::abs(x);
    if (ax <= 1.0) return d == 0 ? 1.0 : 0.0;
    if (ax >= 2.0) return 0.0;
    const double sgn = x > 0 ? -1.0 : 1.0;
    Jet t(std::size_t(d), 2.0 - ax);
    if (d >= 1) t[1] = sgn;
    return smooth_step(t).derivative(std::size_t(d));
}

CutoffFn build_cutoff() { return CutoffFn{}; }

double step_blend(double u, int d)
{
    if (u <= -1.0) return 0.0;
    if (u >= 1.0) return d == 0 ? 1.0 : 0.0;
    Jet t(std::size_t(d), 0.5 * (u + 1.0));
    if (d >= 1) t[1] = 0.5;
    return smooth_step(t).derivative(std::size_t(d));
}

void export_mollifier_csv(std::ostream& os, const MollifierFn& mu, double lo, double hi, int n)
{
    if (n < 2) throw InputError("need at least two sample points");
    os << "x,mu,mu_prime\n" << std::setprecision(17);
    for (int i = 0; i < n; ++i) {
        double x = lo + (hi - lo) * double(i) / double(n - 1);
        os << x << ',' << mu(x) << ',' << mu.derivative(x, 1) << '\n';
    }
}

} // namespace gsf
