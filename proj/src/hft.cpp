#include "gsf/hft.hpp"
#include "gsf/error.hpp"
#include "gsf/parallel.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

namespace gsf {

GenNum CGenNum::abs() const
{
    return zip(re, im, [](double a, double b) { return std::hypot(a, b); });
}

std::complex<double> hft_at(const Expr& f, const std::vector<LayerInfo>& layers, double k, double omega,
                            std::size_t i, const HftOptions& opt)
{
    const double periods = std::abs(omega) * k / std::numbers::pi;
    std::vector<double> breaks;
    if (periods >= 1.0 && periods <= opt.max_periods) {
        const double P = 2.0 * std::numbers::pi / std::abs(omega);
        for (double s = -k + P; s < k; s += P) breaks.push_back(s);
    }
    QuadOptions q = opt.quad;
    q.max_panels = std::max(q.max_panels, int(4 * breaks.size()) + 4000);
    double x0 = 0.0;
    std::vector<Window> w = layer_windows(layers, &x0, 0, i);
    auto part = [&](bool cosine) {
        return integrate_panels(
            [&](double x) {
                double v = eval(f, &x, i);
                return v == 0.0 ? 0.0 : v * (cosine ? std::cos(omega * x) : std::sin(omega * x));
            },
            -k, k, w, breaks, q);
    };
    try {
        return {part(true), -part(false)};
    } catch (const ConvergenceError& e) {
        std::ostringstream os;
        os << "hft: oscillatory quadrature failed over " << periods << " periods (omega=" << omega << "): " << e.what();
        throw EvalError(os.str(), 0.0);
    }
}

namespace {

void require_scalar(const Expr& f, const char* who)
{
    if (arity(f) > 1) throw InputError(std::string(who) + ": f must depend on variable 0 only");
}

// rethrows with the grid eps attached
template <class Fn>
auto at_eps(const Ctx& c, std::size_t i, Fn fn)
{
    try {
        return fn();
    } catch (const EvalError& e) {
        throw EvalError(e.what(), c->grid[i]);
    }
}

// Composite Gauss-Legendre rule for x -> psi(x) e^(-i x omega), |omega| <= W, built
// from one set of samples of psi. Panels where psi is not negligible against its peak S
// are at most 10 / W wide.
struct Rule {
    std::vector<double> x, wf;
    std::complex<double> transform(double omega) const
    {
        double re = 0.0, im = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n) {
            re += wf[n] * std::cos(omega * x[n]);
            im -= wf[n] * std::sin(omega * x[n]);
        }
        return {re, im};
    }
};

Rule sampled_rule(const Expr& f, const std::vector<LayerInfo>& layers, double a, double b, double W, double S,
                 std::size_t i)
{
    using GL = boost::math::quadrature::gauss<double, 20>;
    using GL10 = boost::math::quadrature::gauss<double, 10>;
    double x0 = 0.0;
    std::vector<double> pts{a, b, 0.0};
    for (const Window& w : layer_windows(layers, &x0, 0, i))
        for (int j = 0; j <= 16; ++j) pts.push_back(w.center - w.halfwidth + w.halfwidth * j / 8.0);
    std::erase_if(pts, [&](double v) { return v < a || v > b; });
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    const double hmax = 10.0 / std::max(W, 1e-300);
    Rule out;
    auto node = [](const auto& rule, std::size_t m, bool neg) { return neg ? -rule.abscissa()[m] : rule.abscissa()[m]; };
    std::function<void(double, double, int)> panel = [&](double lo, double hi, int depth) {
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        std::vector<double> xs, ws;
        double i20 = 0.0, amax = 0.0;
        for (std::size_t m = 0; m < GL::abscissa().size(); ++m)
            for (bool neg : {false, true}) {
                if (neg && GL::abscissa()[m] == 0.0) continue;
                double x = c + h * node(GL{}, m, neg), v = eval(f, &x, i);
                xs.push_back(x);
                ws.push_back(h * GL::weights()[m] * v);
                i20 += ws.back();
                amax = std::max(amax, std::abs(v));
            }
        // below this psi does not register against its own peak
        if (amax <= 1e-17 * S) return;
        double i10 = 0.0;
        for (std::size_t m = 0; m < GL10::abscissa().size(); ++m)
            for (bool neg : {false, true}) {
                if (neg && GL10::abscissa()[m] == 0.0) continue;
                double x = c + h * node(GL10{}, m, neg);
                i10 += h * GL10::weights()[m] * eval(f, &x, i);
            }
        bool resolved = std::abs(i20 - i10) <= 1e-13 * (std::abs(i20) + 2.0 * h * amax);
        if (depth < 50 && (hi - lo > hmax || !resolved)) {
            panel(lo, c, depth + 1);
            panel(c, hi, depth + 1);
            return;
        }
        out.x.insert(out.x.end(), xs.begin(), xs.end());
        out.wf.insert(out.wf.end(), ws.begin(), ws.end());
    };
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) panel(pts[j], pts[j + 1], 0);
    return out;
}

} // namespace

CGenNum hft(const Expr& f, const GenNum& k, const GenNum& omega, const HftOptions& opt)
{
    require_scalar(f, "hft");
    require_same(k, omega);
    const Ctx& c = k.ctx();
    for (std::size_t i = 0; i < c->size(); ++i)
        if (!(k.at(i) > 0.0)) throw InputError("hft: k must be positive");
    auto layers = collect_layers(f, 0);
    std::vector<double> re(c->size()), im(c->size());
    parallel_for(c->size(), [&](std::size_t i) {
        auto z = at_eps(c, i, [&] { return hft_at(f, layers, k.at(i), omega.at(i), i, opt); });
        re[i] = z.real();
        im[i] = z.imag();
    });
    return {GenNum::from_values(c, std::move(re)), GenNum::from_values(c, std::move(im))};
}

Uncertainty uncertainty_product(const Expr& psi, const GenNum& lo, const GenNum& hi, const UncertaintyOptions& opt)
{
    require_scalar(psi, "uncertainty_product");
    require_same(lo, hi);
    const Ctx& c = lo.ctx();
    FCBox box{{lo}, {hi}};
    check_box(box);

    Expr sq = psi * psi;
    GenNum inside = extremum(sq, box).max;
    GenNum w = hi - lo;
    GenNum outside = sup(extremum(sq, FCBox{{lo - w}, {lo}}).max, extremum(sq, FCBox{{hi}, {hi + w}}).max);
    for (std::size_t i = 0; i < c->size(); ++i) {
        double in = inside.at(i), out = outside.at(i);
        // the endpoints themselves belong to both samples
        if (out > 1e-24 * in && out > 1e-300) {
            std::ostringstream os;
            os << "uncertainty_product: psi is not supported in the box (|psi|^2 = " << out << " outside)";
            throw InputError(os.str());
        }
    }

    Uncertainty r;
    r.spread_x = integrate_1d(var(0) * var(0) * sq, lo, hi);
    r.norm_x = sqrt(integrate_1d(sq, lo, hi));
    Extremum e0 = extremum(psi, box);
    GenNum peak = sup(abs(e0.min), abs(e0.max));
    if (opt.omega_max.valid()) {
        r.omega_max = opt.omega_max;
    } else {
        Extremum e1 = extremum(derive(psi, 0), box);
        GenNum s0 = peak, s1 = sup(abs(e1.min), abs(e1.max));
        r.omega_max = zip(s1, s0, [](double d, double v) { return 8.0 * std::max(1.0, v > 0.0 ? d / v : 1.0); });
    }
    GenNum K = sup(abs(lo), abs(hi));
    auto layers = collect_layers(psi, 0);
    const std::size_t n = c->size();
    std::vector<double> so(n), no(n), tail(n);
    parallel_for(n, [&](std::size_t i) {
        at_eps(c, i, [&] {
            const double W = r.omega_max.at(i);
            Rule rule = sampled_rule(psi, layers, -K.at(i), K.at(i), W, peak.at(i), i);
            auto g = [&](double om) { return std::norm(rule.transform(om)); };
            std::vector<double> br;
            for (int m = 1; m < 8; ++m) br.push_back(W * m / 8.0);
            QuadOptions q;
            q.tol = 1e-10;
            // |F psi|^2 is even for real psi
            so[i] = 2.0 * integrate_panels([&](double om) { return om * om * g(om); }, 0.0, W, {}, br, q);
            no[i] = std::sqrt(2.0 * integrate_panels(g, 0.0, W, {}, br, q));
            tail[i] = W * W * W * g(W);
            return 0;
        });
    });
    r.spread_omega = GenNum::from_values(c, std::move(so));
    r.norm_omega = GenNum::from_values(c, std::move(no));
    r.tail = GenNum::from_values(c, std::move(tail));
    r.lhs = r.spread_x * r.spread_omega;
    r.rhs = 0.25 * r.norm_x * r.norm_omega;
    r.holds = leq(r.rhs, r.lhs);
    return r;
}

void export_spectrum_csv(std::ostream& os, const Expr& f, const GenNum& k, const std::vector<double>& omegas,
                         const HftOptions& opt)
{
    require_scalar(f, "export_spectrum_csv");
    const Ctx& c = k.ctx();
    auto layers = collect_layers(f, 0);
    std::vector<std::complex<double>> z(c->size() * omegas.size());
    parallel_for(z.size(), [&](std::size_t n) {
        std::size_t i = n / omegas.size(), m = n % omegas.size();
        z[n] = at_eps(c, i, [&] { return hft_at(f, layers, k.at(i), omegas[m], i, opt); });
    });
    auto old = os.precision(17);
    os << "epsilon,omega,re,im,abs\n";
    for (std::size_t n = 0; n < z.size(); ++n) {
        std::size_t i = n / omegas.size(), m = n % omegas.size();
        os << c->grid[i] << ',' << omegas[m] << ',' << z[n].real() << ',' << z[n].imag() << ',' << std::abs(z[n])
           << '\n';
    }
    os.precision(old);
}

} // namespace gsf
