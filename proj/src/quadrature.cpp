#include "gsf/quadrature.hpp"
#include "gsf/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace gsf {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

struct Panel {
    double lo, hi, v, err, l1;
};

struct ByError {
    bool operator()(const Panel& a, const Panel& b) const { return a.err < b.err; }
};

Panel rule(const std::function<double(double)>& f, double lo, double hi)
{
    double err = 0.0, l1 = 0.0;
    double v = GK::integrate(f, lo, hi, 0, 1.0, &err, &l1);
    // the single-pass error comes back in units of the reference interval
    err *= 0.5 * (hi - lo);
    if (!std::isfinite(v)) err = std::numeric_limits<double>::infinity();
    return {lo, hi, v, err, l1};
}

void add_dyadic(std::vector<double>& pts, double p, double q, double sign)
{
    // p, q >= 0 magnitudes of a same-sign segment
    if (q <= 4.0 && (p == 0.0 || q / p <= 8.0)) return;
    if (p > 0.0 && q / p <= 8.0) return;
    int kq = int(std::ceil(std::log2(q)));
    int kp = p > 0.0 ? int(std::floor(std::log2(p))) : kq - 60;
    kp = std::max(kp, kq - 60);
    for (int k = kp; k <= kq; ++k) {
        double v = std::ldexp(1.0, k);
        if (v > p && v < q) pts.push_back(sign * v);
    }
}

} // namespace

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        const std::vector<Window>& windows, const std::vector<double>& breaks,
                        const QuadOptions& opt)
{
    if (a == b) return 0.0;
    if (a > b) return -integrate_panels(f, b, a, windows, breaks, opt);
    if (!std::isfinite(a) || !std::isfinite(b)) throw InputError("integration limits must be finite");
    std::vector<double> pts{a, b};
    for (const Window& w : windows) {
        double lo = std::max(a, w.center - w.halfwidth);
        double hi = std::min(b, w.center + w.halfwidth);
        if (!(hi > lo)) continue;
        for (int j = 0; j <= opt.layer_pieces; ++j) pts.push_back(lo + (hi - lo) * double(j) / opt.layer_pieces);
    }
    for (double v : breaks)
        if (v > a && v < b) pts.push_back(v);
    if (b > 0.0) add_dyadic(pts, std::max(a, 0.0), b, 1.0);
    if (a < 0.0) add_dyadic(pts, std::max(-b, 0.0), -a, -1.0);
    if (a < 0.0 && b > 0.0) pts.push_back(0.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<Panel> done;
    std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
    double total_err = 0.0, l1_total = 0.0;
    for (std::size_t j = 0; j + 1 < pts.size(); ++j) {
        if (!(pts[j + 1] > pts[j])) continue;
        Panel p = rule(f, pts[j], pts[j + 1]);
        total_err += p.err;
        l1_total += p.l1;
        heap.push(p);
    }
    std::size_t count = heap.size();
    while (!heap.empty() && total_err > opt.tol * l1_total && count < std::size_t(opt.max_panels)) {
        Panel w = heap.top();
        heap.pop();
        const double mid = 0.5 * (w.lo + w.hi);
        if (!std::isfinite(w.v) || !(mid > w.lo && mid < w.hi) || w.hi - w.lo < 1e-14 * std::abs(mid)) {
            done.push_back(w);
            continue;
        }
        Panel l = rule(f, w.lo, mid), r = rule(f, mid, w.hi);
        total_err += l.err + r.err - w.err;
        l1_total += l.l1 + r.l1 - w.l1;
        heap.push(l);
        heap.push(r);
        ++count;
    }
    double total = 0.0, err = 0.0;
    const Panel* worst = nullptr;
    for (; !heap.empty(); heap.pop()) done.push_back(heap.top());
    for (const Panel& p : done) {
        total += p.v;
        err += p.err;
        if (!worst || !(p.err <= worst->err)) worst = &p;
    }
    if (!std::isfinite(total) || err > 1e-7 * l1_total + 1e-300) {
        std::ostringstream os;
        os << "quadrature did not converge on [" << worst->lo << ", " << worst->hi << "] (error estimate "
           << worst->err << ", value " << worst->v << ")";
        throw ConvergenceError(os.str(), total);
    }
    return total;
}

double integrate_along(const Expr& f, int k, const double* x, int nvars, double a, double b,
                       std::size_t i, const std::vector<LayerInfo>& layers, const QuadOptions& opt)
{
    std::vector<double> y(x, x + std::max(nvars, k + 1));
    y[k] = 0.5 * (a + b);
    std::vector<Window> w = layer_windows(layers, y.data(), k, i);
    auto g = [&](double s) {
        y[k] = s;
        return eval(f, y.data(), i);
    };
    return integrate_panels(g, a, b, w, {}, opt);
}

} // namespace gsf
