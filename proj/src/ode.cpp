#include "gsf/ode.hpp"
#include "gsf/error.hpp"
#include "gsf/parallel.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace gsf {

namespace {

using State = std::vector<double>;
using Dopri = boost::numeric::odeint::runge_kutta_dopri5<State>;

constexpr int n_nodes = 6;

void require_positive_invertible(const GenNum& x, const char* what)
{
    const Ctx& c = x.ctx();
    for (std::size_t i = 0; i < c->size(); ++i)
        if (!(x.at(i) > 0.0)) throw InputError(std::string(what) + " must be positive");
    if (!is_invertible(x).invertible) throw InputError(std::string(what) + " must be invertible");
}

// singular layer of the right-hand side with the rate of its argument along solutions
struct OdeLayer {
    Expr arg, rate;
    double radius;
};

std::vector<OdeLayer> ode_layers(const std::vector<Expr>& F)
{
    const int d = int(F.size());
    std::map<std::string, OdeLayer> seen;
    for (const Expr& f : F) {
        for (int v = 0; v <= d; ++v) {
            for (const LayerInfo& L : collect_layers(f, v)) {
                std::string key = to_string(L.arg);
                if (seen.count(key)) continue;
                Expr rate = derive(L.arg, 0);
                for (int k = 0; k < d; ++k) rate = rate + derive(L.arg, k + 1) * F[std::size_t(k)];
                seen.emplace(key, OdeLayer{L.arg, rate, L.radius});
            }
        }
    }
    std::vector<OdeLayer> out;
    for (auto& kv : seen) out.push_back(kv.second);
    return out;
}

struct Rhs {
    const std::vector<Expr>* F;
    std::size_t i;
    mutable std::vector<double> buf;

    void operator()(const State& y, State& dy, double t) const
    {
        buf[0] = t;
        std::copy(y.begin(), y.end(), buf.begin() + 1);
        for (std::size_t k = 0; k < F->size(); ++k) {
            double v = eval((*F)[k], buf.data(), i);
            if (!std::isfinite(v)) throw EvalError("right-hand side is not finite at t=" + std::to_string(t));
            dy[k] = v;
        }
    }
};

double layer_cap(const std::vector<OdeLayer>& layers, double t, const State& y, std::size_t i, double frac)
{
    double cap = std::numeric_limits<double>::infinity();
    if (layers.empty()) return cap;
    std::vector<double> x(y.size() + 1);
    x[0] = t;
    std::copy(y.begin(), y.end(), x.begin() + 1);
    for (const OdeLayer& L : layers) {
        double rate = std::abs(eval(L.rate, x.data(), i));
        if (!(rate > 0.0)) continue;
        double a = std::abs(eval(L.arg, x.data(), i));
        // inside: resolve the kernel; outside: never jump past its edge
        double room = a <= L.radius ? frac : (a - L.radius) + frac;
        cap = std::min(cap, room / rate);
    }
    return cap;
}

double wnorm(const State& e, const State& y0, const State& y1, double atol, double rtol)
{
    double m = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
        double sc = atol + rtol * std::max(std::abs(y0[k]), std::abs(y1[k]));
        m = std::max(m, std::abs(e[k]) / sc);
    }
    return m;
}

// one direction from t0 to t_end; appends segments
void integrate_branch(const std::vector<Expr>& F, const std::vector<OdeLayer>& layers, std::size_t i,
                      double t0, const State& y0, double t_end, const SolveOptions& opt,
                      std::vector<SolvedPath::Segment>& seg, PathStats& st, double& reached)
{
    reached = t0;
    if (t_end == t0) return;
    const std::size_t d = y0.size();
    const double dir = t_end > t0 ? 1.0 : -1.0;
    Rhs sys{&F, i, std::vector<double>(d + 1)};
    Dopri stepper;
    State y = y0, f(d), y1(d), f1(d), err(d), tmp(d);
    double t = t0;
    try {
        sys(y, f, t);
        // initial step from the scale of y and y'
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double sc = opt.atol + opt.rtol * std::abs(y[k]);
            d0 = std::max(d0, std::abs(y[k]) / sc);
            d1 = std::max(d1, std::abs(f[k]) / sc);
        }
        double span = std::abs(t_end - t0);
        double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
        h = std::min(h, span);
        while (dir * (t_end - t) > 0.0) {
            if (st.steps + st.rejected >= opt.max_steps) {
                std::ostringstream os;
                os << "step budget " << opt.max_steps << " exhausted at t=" << t;
                st.complete = false;
                st.diagnostic = os.str();
                break;
            }
            double left = std::abs(t_end - t);
            double hh = std::min({h, left, layer_cap(layers, t, y, i, opt.layer_fraction)});
            bool last = hh >= left;
            if (last) hh = left;
            if (!(t + dir * hh != t)) {
                std::ostringstream os;
                os << "step size underflow at t=" << t;
                st.complete = false;
                st.diagnostic = os.str();
                break;
            }
            stepper.do_step(sys, y, f, t, y1, f1, dir * hh, err);
            double e = wnorm(err, y, y1, opt.atol, opt.rtol);
            if (!std::isfinite(e) || e > 1.0) {
                ++st.rejected;
                h = hh * (std::isfinite(e) ? std::max(0.2, 0.9 * std::pow(e, -0.2)) : 0.2);
                continue;
            }
            const double tn = last ? t_end : t + dir * hh;
            SolvedPath::Segment s{t, tn - t, std::vector<double>(n_nodes * d)};
            std::copy(y.begin(), y.end(), s.nodes.begin());
            for (int q = 1; q < n_nodes - 1; ++q) {
                stepper.calc_state(t + (tn - t) * q / double(n_nodes - 1), tmp, y, f, t, y1, f1, tn);
                std::copy(tmp.begin(), tmp.end(), s.nodes.begin() + q * d);
            }
            std::copy(y1.begin(), y1.end(), s.nodes.begin() + (n_nodes - 1) * d);
            seg.push_back(std::move(s));
            ++st.steps;
            t = tn;
            y.swap(y1);
            f.swap(f1);
            reached = t;
            h = hh * (e == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(e, -0.2)));
        }
    } catch (const Error& ex) {
        st.complete = false;
        st.diagnostic = ex.what();
    }
}

} // namespace

void validate(const IVP& ivp)
{
    if (ivp.y0.empty()) throw InputError("ivp: empty initial state");
    if (ivp.F.size() != ivp.y0.size()) throw InputError("ivp: F and y0 differ in dimension");
    for (const Expr& f : ivp.F)
        if (arity(f) > int(ivp.dim()) + 1) throw InputError("ivp: F uses more variables than (t, y)");
    require_same(ivp.t0, ivp.alpha);
    require_same(ivp.t0, ivp.r);
    for (const GenNum& v : ivp.y0) require_same(ivp.t0, v);
    require_positive_invertible(ivp.alpha, "alpha");
    require_positive_invertible(ivp.r, "r");
}

GenNum gnorm(const std::vector<Expr>& v, int l, const FCBox& box)
{
    if (l < 0) throw InputError("gnorm: l must be >= 0");
    check_box(box);
    const std::size_t n = box.dim();
    std::vector<std::vector<int>> alphas{std::vector<int>(n, 0)};
    for (int ord = 1; ord <= l; ++ord) {
        std::vector<std::vector<int>> next;
        for (const auto& a : alphas) {
            int s = 0;
            for (int x : a) s += x;
            if (s != ord - 1) continue;
            for (std::size_t k = 0; k < n; ++k) {
                auto b = a;
                ++b[k];
                if (std::find(next.begin(), next.end(), b) == next.end()) next.push_back(b);
            }
        }
        alphas.insert(alphas.end(), next.begin(), next.end());
    }
    GenNum acc = GenNum::constant(box.lo[0].ctx(), 0.0);
    for (const Expr& f : v) {
        for (const auto& a : alphas) {
            Extremum ex = extremum(derive(f, a), box);
            acc = sup(acc, sup(abs(ex.min), abs(ex.max)));
        }
    }
    return acc;
}

GenNum gnorm(const Expr& v, int l, const FCBox& box) { return gnorm(std::vector<Expr>{v}, l, box); }

PicardPrecheck picard_precheck(const IVP& ivp)
{
    validate(ivp);
    const std::size_t d = ivp.dim();
    if (d > 2) throw InputError("picard_precheck: state dimension must be <= 2");
    FCBox box{{ivp.t0 - ivp.alpha}, {ivp.t0 + ivp.alpha}};
    for (const GenNum& y : ivp.y0) {
        box.lo.push_back(y - ivp.r);
        box.hi.push_back(y + ivp.r);
    }
    PicardPrecheck p;
    if (d == 1) {
        p.M = gnorm(ivp.F[0], 0, box);
        p.L = gnorm(derive(ivp.F[0], 1), 0, box);
    } else {
        Expr m2 = ivp.F[0] * ivp.F[0] + ivp.F[1] * ivp.F[1];
        Expr l2 = real(0.0);
        for (const Expr& f : ivp.F)
            for (int k = 1; k <= 2; ++k) l2 = l2 + derive(f, k) * derive(f, k);
        p.M = sqrt(extremum(m2, box).max);
        p.L = sqrt(extremum(l2, box).max);
    }
    GenNum aL = ivp.alpha * p.L;
    p.alpha_L = classify(aL);
    bool small = p.alpha_L.label == Label::infinitesimal || p.alpha_L.label == Label::negligible;
    if (!small && p.alpha_L.label != Label::infinite && !p.alpha_L.non_moderate &&
        p.alpha_L.label != Label::indeterminate) {
        double mx = 0.0;
        const Ctx& c = aL.ctx();
        for (std::size_t i = c->tail_start(); i < c->size(); ++i) mx = std::max(mx, aL.at(i));
        small = mx <= 1.0 - 1e-9;
    }
    p.contraction_ok = small;
    p.alpha_M_le_r = leq(ivp.alpha * p.M, ivp.r);
    return p;
}

SolvedPath::SolvedPath(Ctx ctx, std::size_t d, std::vector<Expr> F, std::vector<Branch> b)
    : ctx_(std::move(ctx)), d_(d), F_(std::move(F)), br_(std::move(b))
{
}

std::vector<double> SolvedPath::state(std::size_t i, double t) const
{
    const Branch& b = br_.at(i);
    const double slack = 1e-12 * std::max({1.0, std::abs(b.t_lo), std::abs(b.t_hi)});
    if (t < b.t_lo - slack || t > b.t_hi + slack) {
        std::ostringstream os;
        os << "time " << t << " outside the solved interval [" << b.t_lo << ", " << b.t_hi << "]";
        if (!b.stats.complete) os << "; " << b.stats.diagnostic;
        throw EvalError(os.str(), ctx_->grid[i]);
    }
    if (exact_) return exact_(i, t);
    if (t == b.t0 || b.seg.empty()) return b.y0;
    // segments are sorted by their lower end
    auto lower = [](const Segment& s) { return std::min(s.t0, s.t0 + s.h); };
    auto it = std::upper_bound(b.seg.begin(), b.seg.end(), t,
                               [&](double v, const Segment& s) { return v < lower(s); });
    if (it != b.seg.begin()) --it;
    const Segment& s = *it;
    double th = std::clamp((t - s.t0) / s.h, 0.0, 1.0);
    std::vector<double> out(d_, 0.0);
    for (int q = 0; q < n_nodes; ++q) {
        double w = 1.0, tq = q / double(n_nodes - 1);
        for (int r = 0; r < n_nodes; ++r)
            if (r != q) w *= (th - r / double(n_nodes - 1)) / (tq - r / double(n_nodes - 1));
        for (std::size_t k = 0; k < d_; ++k) out[k] += w * s.nodes[std::size_t(q) * d_ + k];
    }
    return out;
}

std::vector<double> SolvedPath::deriv(std::size_t i, double t) const
{
    std::vector<double> y = state(i, t), x(d_ + 1), dy(d_);
    x[0] = t;
    std::copy(y.begin(), y.end(), x.begin() + 1);
    for (std::size_t k = 0; k < d_; ++k) dy[k] = eval(F_[k], x.data(), i);
    return dy;
}

GPoint SolvedPath::at(const GenNum& t) const
{
    GPoint out;
    auto self = std::make_shared<SolvedPath>(*this);
    for (std::size_t k = 0; k < d_; ++k)
        out.push_back(GenNum::from_index(ctx_, [self, t, k](std::size_t i) { return self->state(i, t.at(i))[k]; }));
    return out;
}

bool SolvedPath::complete() const
{
    for (const Branch& b : br_)
        if (!b.stats.complete) return false;
    return true;
}

std::string SolvedPath::diagnostic() const
{
    std::ostringstream os;
    for (std::size_t i = 0; i < br_.size(); ++i)
        if (!br_[i].stats.complete) os << "eps=" << ctx_->grid[i] << ": " << br_[i].stats.diagnostic << "\n";
    return os.str();
}

SolvedPath solve_range(const std::vector<Expr>& F, const GenNum& t0, const GPoint& y0, const GenNum& lo,
                       const GenNum& hi, const SolveOptions& opt)
{
    if (F.size() != y0.size() || F.empty()) throw InputError("solve: F and y0 differ in dimension");
    require_same(t0, lo);
    require_same(t0, hi);
    const Ctx& c = t0.ctx();
    const std::size_t d = y0.size();
    for (const GenNum& v : y0) require_same(t0, v);
    for (std::size_t i = 0; i < c->size(); ++i)
        if (!(lo.at(i) <= t0.at(i) && t0.at(i) <= hi.at(i)))
            throw InputError("solve: t0 outside the interval at eps=" + std::to_string(c->grid[i]));
    const std::vector<OdeLayer> layers = ode_layers(F);
    std::vector<SolvedPath::Branch> br(c->size());
    parallel_for(
        c->size(),
        [&](std::size_t i) {
            SolvedPath::Branch& b = br[i];
            b.t0 = t0.at(i);
            for (const GenNum& v : y0) b.y0.push_back(v.at(i));
            b.stats.rtol = opt.rtol;
            std::vector<SolvedPath::Segment> fwd, bwd;
            double rf = b.t0, rb = b.t0;
            integrate_branch(F, layers, i, b.t0, b.y0, hi.at(i), opt, fwd, b.stats, rf);
            if (!opt.forward_only && b.stats.complete)
                integrate_branch(F, layers, i, b.t0, b.y0, lo.at(i), opt, bwd, b.stats, rb);
            std::reverse(bwd.begin(), bwd.end());
            b.seg = std::move(bwd);
            b.seg.insert(b.seg.end(), fwd.begin(), fwd.end());
            b.t_lo = rb;
            b.t_hi = rf;
        },
        opt.threads);
    return SolvedPath(c, d, F, std::move(br));
}

SolvedPath solve_ivp(const IVP& ivp, const SolveOptions& opt)
{
    validate(ivp);
    return solve_range(ivp.F, ivp.t0, ivp.y0, ivp.t0 - ivp.alpha, ivp.t0 + ivp.alpha, opt);
}

namespace {

// values of int_0^x g over Chebyshev-Lobatto nodes x_j = cos(pi j / N)
std::vector<double> cheb_cumint(const std::vector<double>& g)
{
    const int N = int(g.size()) - 1;
    std::vector<double> a(N + 1, 0.0);
    for (int k = 0; k <= N; ++k) {
        double s = 0.0;
        for (int j = 0; j <= N; ++j) {
            double w = (j == 0 || j == N) ? 0.5 : 1.0;
            s += w * g[j] * std::cos(std::numbers::pi * j * k / N);
        }
        a[k] = 2.0 * s / N;
    }
    a[0] *= 0.5;
    a[N] *= 0.5;
    std::vector<double> C(N + 2, 0.0);
    for (int k = 0; k <= N; ++k) {
        if (k == 0) {
            C[1] += a[0];
        } else if (k == 1) {
            C[2] += a[1] / 4.0;
        } else {
            C[k + 1] += a[k] / (2.0 * (k + 1));
            C[k - 1] -= a[k] / (2.0 * (k - 1));
        }
    }
    auto G = [&](double theta) {
        double s = 0.0;
        for (int k = 0; k <= N + 1; ++k) s += C[k] * std::cos(k * theta);
        return s;
    };
    const double g0 = G(std::numbers::pi / 2.0);
    std::vector<double> out(N + 1);
    for (int j = 0; j <= N; ++j) out[j] = G(std::numbers::pi * j / N) - g0;
    return out;
}

// barycentric interpolation on Chebyshev-Lobatto nodes
double cheb_interp(const std::vector<double>& x, const std::vector<double>& v, double t)
{
    const int N = int(x.size()) - 1;
    double num = 0.0, den = 0.0;
    for (int j = 0; j <= N; ++j) {
        double w = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);
        double dx = t - x[j];
        if (dx == 0.0) return v[j];
        num += w * v[j] / dx;
        den += w / dx;
    }
    return num / den;
}

double series_tail(double q, int n)
{
    if (!(q >= 0.0) || q > 700.0) return std::numeric_limits<double>::infinity();
    // q^n / n! then the rest of the exponential series
    double term = 1.0;
    for (int k = 1; k <= n; ++k) term *= q / k;
    double s = 0.0;
    for (int k = n; k < n + 2000; ++k) {
        s += term;
        term *= q / (k + 1);
        if (term < 1e-18 * s) break;
    }
    return s;
}

} // namespace

std::vector<double> PicardResult::state(std::size_t i, double tt) const
{
    std::vector<double> out;
    for (const auto& comp : y[i]) out.push_back(cheb_interp(t[i], comp, tt));
    return out;
}

PicardResult solve_picard(const IVP& ivp, int n_iter, int nodes)
{
    if (n_iter < 1) throw InputError("picard: n_iter must be >= 1");
    if (nodes < 8) throw InputError("picard: need at least 8 nodes");
    PicardResult res;
    res.pre = picard_precheck(ivp);
    if (!res.pre.contraction_ok) throw InputError("picard: alpha L does not give a sharp contraction (" +
                                                  describe(res.pre.alpha_L) + ")");
    if (!res.pre.alpha_M_le_r) throw InputError("picard: alpha M <= r fails");
    const Ctx& c = ivp.t0.ctx();
    const std::size_t N = c->size(), d = ivp.dim();
    const int n = nodes;
    res.t.assign(N, std::vector<double>(n + 1));
    res.y.assign(N, std::vector<std::vector<double>>(d, std::vector<double>(n + 1)));
    std::vector<std::vector<double>> inc(N, std::vector<double>(n_iter, 0.0));
    std::vector<std::string> failure(N);
    parallel_for(N, [&](std::size_t i) {
        const double t0 = ivp.t0.at(i), al = ivp.alpha.at(i);
        for (int j = 0; j <= n; ++j) res.t[i][j] = t0 + al * std::cos(std::numbers::pi * j / n);
        auto& Y = res.y[i];
        for (std::size_t k = 0; k < d; ++k) std::fill(Y[k].begin(), Y[k].end(), ivp.y0[k].at(i));
        std::vector<double> x(d + 1);
        int rising = 0;
        try {
            for (int it = 0; it < n_iter; ++it) {
                std::vector<std::vector<double>> g(d, std::vector<double>(n + 1));
                for (int j = 0; j <= n; ++j) {
                    x[0] = res.t[i][j];
                    for (std::size_t k = 0; k < d; ++k) x[k + 1] = Y[k][j];
                    for (std::size_t k = 0; k < d; ++k) g[k][j] = eval(ivp.F[k], x.data(), i);
                }
                double m = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    std::vector<double> I = cheb_cumint(g[k]);
                    for (int j = 0; j <= n; ++j) {
                        double v = ivp.y0[k].at(i) + al * I[j];
                        m = std::max(m, std::abs(v - Y[k][j]));
                        Y[k][j] = v;
                    }
                }
                inc[i][it] = m;
                rising = (it > 0 && m > inc[i][it - 1]) ? rising + 1 : 0;
                if (rising >= 3) {
                    failure[i] = "Picard iterates diverge (increment grew 3 times in a row)";
                    return;
                }
            }
        } catch (const Error& e) {
            failure[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < N; ++i)
        if (!failure[i].empty()) throw EvalError(failure[i], c->grid[i]);
    res.iterations = n_iter;
    for (int it = 0; it < n_iter; ++it) {
        std::vector<double> v(N), b(N);
        for (std::size_t i = 0; i < N; ++i) {
            v[i] = inc[i][it];
            double q = ivp.alpha.at(i) * res.pre.L.at(i);
            b[i] = ivp.alpha.at(i) * res.pre.M.at(i) * series_tail(q, it + 1);
        }
        res.increments.push_back(GenNum::from_values(c, v));
        res.bounds.push_back(GenNum::from_values(c, b));
    }
    return res;
}

GenNum picard_error(const PicardResult& p, const SolvedPath& y)
{
    const Ctx& c = y.ctx();
    std::vector<double> out(c->size(), 0.0);
    for (std::size_t i = 0; i < c->size(); ++i) {
        const double lo = *std::min_element(p.t[i].begin(), p.t[i].end());
        const double hi = *std::max_element(p.t[i].begin(), p.t[i].end());
        for (int s = 0; s <= 400; ++s) {
            double t = lo + (hi - lo) * s / 400.0;
            std::vector<double> a = p.state(i, t), b = y.state(i, t);
            for (std::size_t k = 0; k < a.size(); ++k) out[i] = std::max(out[i], std::abs(a[k] - b[k]));
        }
    }
    return GenNum::from_values(c, out);
}

namespace {

Eigen::MatrixXd integrated_matrix(const std::vector<std::vector<Expr>>& A,
                                  const std::vector<std::vector<std::vector<LayerInfo>>>& layers, std::size_t i,
                                  double t0, double t)
{
    const std::size_t d = A.size();
    Eigen::MatrixXd I(d, d);
    double x = t0;
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t q = 0; q < d; ++q)
            I(Eigen::Index(r), Eigen::Index(q)) = integrate_along(A[r][q], 0, &x, 1, t0, t, i, layers[r][q]);
    return I;
}

Eigen::MatrixXd matrix_at(const std::vector<std::vector<Expr>>& A, std::size_t i, double t)
{
    const std::size_t d = A.size();
    Eigen::MatrixXd M(d, d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t q = 0; q < d; ++q) M(Eigen::Index(r), Eigen::Index(q)) = eval(A[r][q], &t, i);
    return M;
}

} // namespace

LinearSolution solve_linear(const std::vector<std::vector<Expr>>& A, const GenNum& t0, const GPoint& y0,
                            const GenNum& a, const GenNum& b, const SolveOptions& opt)
{
    const std::size_t d = y0.size();
    if (d == 0 || d > 4) throw InputError("solve_linear: dimension must be 1..4");
    if (A.size() != d) throw InputError("solve_linear: A must be d x d");
    for (const auto& row : A) {
        if (row.size() != d) throw InputError("solve_linear: A must be d x d");
        for (const Expr& e : row)
            if (arity(e) > 1) throw InputError("solve_linear: A may depend on t only");
    }
    const Ctx& c = t0.ctx();
    std::vector<std::vector<std::vector<LayerInfo>>> layers(d, std::vector<std::vector<LayerInfo>>(d));
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t q = 0; q < d; ++q) layers[r][q] = collect_layers(A[r][q], 0);

    LinearSolution out;
    const int S = 33;
    std::vector<double> ratio(c->size(), 0.0);
    bool commute = true;
    parallel_for(c->size(), [&](std::size_t i) {
        double lo = a.at(i), hi = b.at(i), s0 = t0.at(i);
        double m = 0.0;
        for (int s = 0; s < S; ++s) {
            double t = lo + (hi - lo) * s / double(S - 1);
            m = std::max(m, integrated_matrix(A, layers, i, s0, t).lpNorm<Eigen::Infinity>() * double(d));
        }
        ratio[i] = m / (-c->log_rho[i]);
    });
    out.log_ratio = GenNum::from_values(c, ratio);
    AsymptoticClass cr = classify(out.log_ratio);
    if (cr.label == Label::infinite || cr.non_moderate || cr.label == Label::indeterminate)
        throw InputError("solve_linear: |int A| <= -C log drho fails (ratio " + describe(cr) + ")");

    if (d > 1) {
        for (std::size_t i = 0; i < c->size() && commute; ++i) {
            std::vector<Eigen::MatrixXd> Ms;
            for (int s = 0; s < 9; ++s) Ms.push_back(matrix_at(A, i, a.at(i) + (b.at(i) - a.at(i)) * s / 8.0));
            for (std::size_t p = 0; p < Ms.size() && commute; ++p)
                for (std::size_t q = p + 1; q < Ms.size(); ++q) {
                    double comm = (Ms[p] * Ms[q] - Ms[q] * Ms[p]).norm();
                    if (comm > 1e-12 * Ms[p].norm() * Ms[q].norm() + 1e-300) {
                        commute = false;
                        break;
                    }
                }
        }
    }

    std::vector<Expr> F;
    for (std::size_t r = 0; r < d; ++r) {
        Expr f = real(0.0);
        for (std::size_t q = 0; q < d; ++q) f = f + A[r][q] * var(int(q) + 1);
        F.push_back(f);
    }
    out.path = solve_range(F, t0, y0, a, b, opt);
    if (!commute) {
        out.notice = "A(t) does not commute at distinct times; closed form skipped, solved per eps";
        return out;
    }
    auto Ap = std::make_shared<std::vector<std::vector<Expr>>>(A);
    auto Lp = std::make_shared<std::vector<std::vector<std::vector<LayerInfo>>>>(layers);
    GenNum tt0 = t0;
    GPoint yy0 = y0;
    SolvedPath::Exact exact = [Ap, Lp, tt0, yy0, d](std::size_t i, double t) {
        Eigen::MatrixXd E = integrated_matrix(*Ap, *Lp, i, tt0.at(i), t).exp();
        Eigen::VectorXd v(d);
        for (std::size_t k = 0; k < d; ++k) v(Eigen::Index(k)) = yy0[k].at(i);
        Eigen::VectorXd y = E * v;
        return std::vector<double>(y.data(), y.data() + d);
    };
    double dev = 0.0;
    for (std::size_t i = 0; i < c->size(); ++i) {
        if (!out.path.stats(i).complete) continue;
        for (int s = 0; s < S; ++s) {
            double t = a.at(i) + (b.at(i) - a.at(i)) * s / double(S - 1);
            std::vector<double> ye = exact(i, t), yr = out.path.state(i, t);
            double sc = 0.0;
            for (double v : ye) sc = std::max(sc, std::abs(v));
            for (std::size_t k = 0; k < d; ++k) dev = std::max(dev, std::abs(ye[k] - yr[k]) / std::max(sc, 1e-300));
        }
    }
    out.cross_check = dev;
    out.closed_form = true;
    out.path.set_exact(exact);
    return out;
}

GronwallResult gronwall_check(const PathFn& u, const Expr& a, const Expr& b, const GenNum& alpha, int samples)
{
    if (samples < 2) throw InputError("gronwall_check: need at least 2 samples");
    if (arity(a) > 1 || arity(b) > 1) throw InputError("gronwall_check: a and b depend on t only");
    const Ctx& c = alpha.ctx();
    GronwallResult res;
    std::ostringstream detail;
    FCBox box{{GenNum::constant(c, 0.0)}, {alpha}};
    Extremum ea = extremum(a, box);
    for (std::size_t i = 0; i < c->size(); ++i) {
        if (ea.min.at(i) < -1e-12) {
            detail << "a takes negative values (min " << ea.min.at(i) << " at eps=" << c->grid[i] << ")";
            res.detail = detail.str();
            return res;
        }
    }
    GenNum na = sup(abs(ea.min), abs(ea.max)) * alpha;
    GenNum q = GenNum::from_index(c, [na, c](std::size_t i) { return na.at(i) / (-c->log_rho[i]); });
    AsymptoticClass cq = classify(q);
    if (cq.label == Label::infinite || cq.non_moderate || cq.label == Label::indeterminate) {
        res.detail = "||a|| alpha is not bounded by N log(1/drho) (" + describe(cq) + ")";
        return res;
    }
    const std::vector<LayerInfo> la = collect_layers(a, 0);
    bool hyp = true, it1 = true, it2 = true, mono = true;
    double s1 = std::numeric_limits<double>::infinity(), s2 = s1;
    for (std::size_t i = 0; i < c->size(); ++i) {
        const double al = alpha.at(i);
        auto av = [&](double t) { return eval(a, &t, i); };
        auto bv = [&](double t) { return eval(b, &t, i); };
        auto A_of = [&](double lo, double hi) {
            double x = lo;
            return integrate_along(a, 0, &x, 1, lo, hi, i, la);
        };
        std::vector<double> ts(samples);
        for (int m = 0; m < samples; ++m) ts[m] = al * m / double(samples - 1);
        double A = 0.0, AU = 0.0, J = 0.0;
        for (int m = 0; m < samples; ++m) {
            if (m > 0) {
                const double lo = ts[m - 1], hi = ts[m], Alo = A;
                std::vector<Window> w = layer_windows(la, &lo, 0, i);
                AU += integrate_panels([&](double s) { return av(s) * u(i, s); }, lo, hi, w);
                J += integrate_panels(
                    [&](double s) { return av(s) * bv(s) * std::exp(-(Alo + A_of(lo, s))); }, lo, hi, w);
                A += A_of(lo, hi);
                if (bv(hi) < bv(lo) - 1e-12 * std::max(1.0, std::abs(bv(lo)))) mono = false;
            }
            const double t = ts[m], uv = u(i, t), bt = bv(t);
            const double rhs = bt + AU;
            if (uv > rhs + 1e-9 * std::max(1.0, std::abs(rhs))) {
                hyp = false;
                detail << "hypothesis u <= b + int a u fails at t=" << t << ", eps=" << c->grid[i] << "\n";
            }
            const double b1 = bt + std::exp(A) * J, b2 = bt * std::exp(A);
            const double g1 = (b1 - uv) / std::max(1.0, std::abs(b1)), g2 = (b2 - uv) / std::max(1.0, std::abs(b2));
            s1 = std::min(s1, g1);
            s2 = std::min(s2, g2);
            if (g1 < -1e-9) it1 = false;
            if (g2 < -1e-9) it2 = false;
        }
    }
    res.applicable = hyp;
    res.hypothesis = hyp;
    res.item1 = it1;
    res.item2_applicable = mono;
    res.item2 = mono && it2;
    res.slack1 = s1;
    res.slack2 = s2;
    res.holds = hyp && it1 && (!mono || it2);
    if (!hyp) detail << "not applicable: the integral hypothesis fails\n";
    res.detail = detail.str();
    return res;
}

GronwallResult gronwall_check(const Expr& u, const Expr& a, const Expr& b, const GenNum& alpha, int samples)
{
    if (arity(u) > 1) throw InputError("gronwall_check: u depends on t only");
    PathFn f = [u](std::size_t i, double t) { return eval(u, &t, i); };
    return gronwall_check(f, a, b, alpha, samples);
}

void export_path_csv(std::ostream& os, const SolvedPath& p, int samples_per_eps)
{
    if (samples_per_eps < 2) throw InputError("export: need at least 2 samples per eps");
    const std::size_t d = p.dim();
    os << "epsilon,t";
    for (std::size_t k = 1; k <= d; ++k) os << ",y_" << k;
    for (std::size_t k = 1; k <= d; ++k) os << ",dy_" << k;
    os << "\n" << std::setprecision(17);
    const Ctx& c = p.ctx();
    for (std::size_t i = 0; i < c->size(); ++i) {
        const double lo = p.t_lo(i), hi = p.t_hi(i);
        for (int s = 0; s < samples_per_eps; ++s) {
            double t = lo + (hi - lo) * s / double(samples_per_eps - 1);
            std::vector<double> y = p.state(i, t), dy = p.deriv(i, t);
            os << c->grid[i] << "," << t;
            for (double v : y) os << "," << v;
            for (double v : dy) os << "," << v;
            os << "\n";
        }
    }
}

} // namespace gsf
