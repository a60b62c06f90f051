#include "gsf/physics.hpp"
#include "gsf/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace gsf {

namespace {

void require_order(double j, const char* who)
{
    if (!(j > 0.0) || !std::isfinite(j)) throw InputError(std::string(who) + ": orders must be positive reals");
}

// 1 / (1/j - s), or 0 when that is not a positive order
double order_after(double j, double s)
{
    double inv = 1.0 / j - s;
    return inv > 1e-12 ? 1.0 / inv : 0.0;
}

GPoint shifted(GPoint p, std::size_t axis, const GenNum& by)
{
    p[axis] = p[axis] + by;
    return p;
}

WaveCheck check(const GenNum& x, const GenNum& y, double j)
{
    WaveCheck w;
    w.eq = eq_upto(x, y, j);
    w.holds = w.eq.holds;
    return w;
}

} // namespace

HeatIncrements choose_heat_increments(const Ctx& ctx, double e, double j)
{
    require_order(e, "choose_heat_increments");
    require_order(j, "choose_heat_increments");
    if (e > j) throw InputError("choose_heat_increments: need e <= j");
    HeatIncrements inc;
    inc.e = e;
    inc.j = j;
    inc.dt = drho(ctx, 1.0 / (3.0 * e));
    for (auto& d : inc.dx) d = drho(ctx, 1.0 / (5.0 * e));
    inc.q = 14.0 / (15.0 * e);
    double k = order_after(j, inc.q);
    if (k > 0.0) inc.k_out = k;

    const GenNum& dt = inc.dt;
    GenNum dv = inc.dx[0] * inc.dx[1] * inc.dx[2];
    auto fail = [&](const std::string& what) {
        std::ostringstream os;
        os << "choose_heat_increments(e=" << e << ", j=" << j << "): " << what << " fails on this grid";
        throw EvalError(os.str());
    };
    if (!in_Dkj(dv * dt, 1, e)) fail("dv dt in D_1e");
    GenNum zero = GenNum::constant(ctx, 0.0);
    for (int i = 0; i < 3; ++i) {
        GenNum ds = inc.dx[(i + 1) % 3] * inc.dx[(i + 2) % 3];
        if (!eq_upto(dt * ds * inc.dx[i] * inc.dx[i], zero, j).holds) fail("dt ds_i dx_i^2 =_j 0");
    }
    if (!eq_upto(dt * dt * dv, zero, j).holds) fail("dt^2 dv =_j 0");
    GenNum lower = drho(ctx, inc.q), vt = dv * dt;
    for (std::size_t i = 0; i < ctx->size(); ++i)
        if (vt.at(i) < lower.at(i) * (1.0 - 1e-12)) fail("dv dt >= drho^q");
    return inc;
}

HeatBalance heat_balance(const HeatSetup& s)
{
    if (s.x.size() != 3) throw InputError("heat_balance: x must have three coordinates");
    if (!s.inc.k_out) throw InputError("heat_balance: 1/j - q must be positive to cancel dv dt");
    const Ctx& ctx = s.t.ctx();
    const auto& inc = s.inc;
    GenNum dv = inc.dx[0] * inc.dx[1] * inc.dx[2];
    GPoint xt = s.x;
    xt.push_back(s.t);

    HeatBalance r;
    r.Q_cv = GenNum::constant(ctx, 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        GenNum dh = 0.5 * inc.dx[i];
        GenNum ds = inc.dx[(i + 1) % 3] * inc.dx[(i + 2) % 3];
        Expr flux = s.k * derive(s.u, int(i));
        GenNum plus = eval(flux, shifted(xt, i, dh), ctx);
        GenNum minus = eval(flux, shifted(xt, i, -dh), ctx);
        r.Q_cv = r.Q_cv + inc.dt * ds * (plus - minus);
    }
    r.Q_ext = eval(s.F, xt, ctx) * dv * inc.dt;
    GenNum cr = eval(s.c * s.rho, s.x, ctx);
    r.Q_env = (eval(s.u, shifted(xt, 3, inc.dt), ctx) - eval(s.u, xt, ctx)) * cr * dv;
    r.flux_side = r.Q_env - r.Q_cv - r.Q_ext;

    Expr div = real(0.0);
    for (int i = 0; i < 3; ++i) div = div + derive(s.k * derive(s.u, i), i);
    r.field_side = cr * eval(derive(s.u, 3), xt, ctx) - eval(div + s.F, xt, ctx);

    GenNum zero = GenNum::constant(ctx, 0.0);
    r.eq_j = eq_upto(r.flux_side, zero, inc.j);
    r.eq_k = eq_upto(r.field_side, zero, *inc.k_out);
    r.eq_j_holds = r.eq_j.holds;
    r.eq_k_holds = r.eq_k.holds;
    r.consistent = r.eq_j_holds == r.eq_k_holds;
    return r;
}

WaveBalance wave_balance(const WaveSetup& s)
{
    require_order(s.j, "wave_balance");
    require_order(s.e, "wave_balance");
    const Ctx& ctx = s.x.ctx();
    WaveBalance r;
    r.h = order_after(s.j, s.p + 2.0 * s.q);
    r.k = order_after(s.j, s.q);
    r.dx = drho(ctx, s.q);

    Expr ux = derive(s.u, 0), uxx = derive(ux, 0), utt = derive(derive(s.u, 1), 1);
    GPoint P{s.x, s.t}, Q{s.x + r.dx, s.t};
    GenNum ux0 = eval(ux, P), ux1 = eval(ux, Q), uxx0 = eval(uxx, P);
    r.phi = map(ux0, [](double v) { return std::atan(v); });
    r.dphi = zip(uxx0, ux0, [](double a, double v) { return a / (1.0 + v * v); });
    auto sin_phi = [](const GenNum& v) { return map(v, [](double w) { return w / std::sqrt(1.0 + w * w); }); };
    GenNum dsin = sin_phi(ux1) - sin_phi(ux0);
    GenNum rho = eval(s.rho, P), G2 = eval(s.G2, P), acc = eval(utt, P);
    GenNum zero = GenNum::constant(ctx, 0.0), one = GenNum::constant(ctx, 1.0);

    r.newton = check(rho * r.dx * acc, s.T * dsin + G2 * rho * r.dx, s.j);
    Expr ux_t = compose(ux, {var(0), constant(s.t)});
    r.taylor = check(taylor_remainder(ux_t, s.x, 1, r.dx), zero, s.j);
    r.dx_in_D1e = s.e <= s.j && in_Dkj(r.dx, 1, s.e);
    r.slope_ok = leq(drho(ctx, s.p), r.dphi);
    r.angle_ok = lt(r.phi, GenNum::constant(ctx, std::numbers::pi / 2.0));

    GenNum cos3 = map(r.phi, [](double f) { return std::pow(std::cos(f), 3); });
    GenNum lhs = rho * acc, rhs = s.T * uxx0 + G2 * rho;
    bool common = r.newton.holds && r.taylor.holds && r.dx_in_D1e && r.angle_ok;

    std::ostringstream d;
    if (!r.newton.holds) d << "Newton's law fails at order j (C=" << r.newton.eq.C << ")\n";
    if (!r.taylor.holds) d << "first order Taylor formula for du/dx fails at dx\n";
    if (!r.dx_in_D1e) d << "dx is not in D_1e\n";
    if (!r.angle_ok) d << "phi < pi/2 fails\n";
    if (!r.slope_ok) d << "dphi/dx >= drho^p fails\n";

    r.wave_j = check(lhs, rhs, s.j);
    r.forward_applicable = common && r.slope_ok && r.h > 0.0;
    if (r.h > 0.0) r.cos3_h = check(cos3, one, r.h);
    else d << "item 1 not applicable: 1/j - p - 2q <= 0\n";
    r.forward = r.forward_applicable && (!r.wave_j.holds || r.cos3_h.holds);

    r.cos3_j = check(cos3, one, s.j);
    r.backward_applicable = common && r.k > 0.0;
    if (r.k > 0.0) r.wave_k = check(lhs, rhs, r.k);
    else d << "item 2 not applicable: 1/j - q <= 0\n";
    r.backward = r.backward_applicable && (!r.cos3_j.holds || r.wave_k.holds);

    // acceleration dictated by Newton's law for the current shape
    r.dynamic_k = check(s.T * dsin / r.dx, s.T * uxx0, r.k > 0.0 ? r.k : s.j);
    r.detail = d.str();
    return r;
}

StringLength string_length_check(const Expr& u, const GenNum& a, const GenNum& b, const GenNum& t, double j)
{
    require_order(j, "string_length_check");
    StringLength r;
    Expr ux = compose(derive(u, 0), {var(0), constant(t)});
    r.length = integrate_1d(sqrt(1.0 + ux * ux), a, b);
    Extremum ex = extremum(atan(ux), FCBox{{a}, {b}});
    r.phi_max = sup(abs(ex.min), abs(ex.max));
    r.precondition = in_Dkj(r.phi_max, 3, j);
    r.eq = eq_upto(r.length, b - a, 2.0 * j);
    r.holds = r.precondition && r.eq.holds;
    return r;
}

} // namespace gsf
