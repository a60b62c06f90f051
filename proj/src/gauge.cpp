#include "gsf/gauge.hpp"
#include "gsf/error.hpp"

#include <cmath>

namespace gsf {

std::string to_string(GaugeKind k)
{
    switch (k) {
    case GaugeKind::identity: return "identity";
    case GaugeKind::exp_inv: return "exp_inv";
    case GaugeKind::custom: return "custom";
    }
    return "?";
}

GaugeKind parse_gauge_kind(const std::string& s)
{
    if (s == "identity") return GaugeKind::identity;
    if (s == "exp_inv") return GaugeKind::exp_inv;
    throw InputError("unknown gauge '" + s + "' (expected identity or exp_inv)");
}

Gauge::Gauge(GaugeKind kind, std::function<double(double)> custom)
    : kind_(kind), custom_(std::move(custom))
{
    if (kind_ == GaugeKind::custom && !custom_)
        throw InputError("custom gauge needs an evaluator");
}

double Gauge::rho(double eps) const
{
    switch (kind_) {
    case GaugeKind::identity: return eps;
    case GaugeKind::exp_inv: return std::exp(-1.0 / eps);
    case GaugeKind::custom: return custom_(eps);
    }
    return eps;
}

double Gauge::log_rho(double eps) const
{
    switch (kind_) {
    case GaugeKind::identity: return std::log(eps);
    case GaugeKind::exp_inv: return -1.0 / eps;
    case GaugeKind::custom: return std::log(custom_(eps));
    }
    return std::log(eps);
}

EpsGrid::EpsGrid(std::vector<double> samples) : eps_(std::move(samples))
{
    if (eps_.size() < 8)
        throw InputError("eps grid needs at least 8 samples");
    for (std::size_t i = 0; i < eps_.size(); ++i) {
        if (!(eps_[i] > 0.0 && eps_[i] <= 1.0))
            throw InputError("eps grid samples must lie in (0,1]");
        if (i > 0 && !(eps_[i] < eps_[i - 1]))
            throw InputError("eps grid must be strictly decreasing");
    }
}

EpsGrid EpsGrid::geometric(std::size_t n, double eps0, double ratio)
{
    if (!(ratio > 0.0 && ratio < 1.0))
        throw InputError("grid ratio must lie in (0,1)");
    std::vector<double> e(n);
    double v = eps0;
    for (std::size_t i = 0; i < n; ++i) {
        e[i] = v;
        v *= ratio;
    }
    return EpsGrid(std::move(e));
}

EpsGrid EpsGrid::default_for(GaugeKind kind, std::size_t n)
{
    if (kind == GaugeKind::exp_inv) {
        double ratio = std::pow((1.0 / 40.0) / 0.5, 1.0 / double(n - 1));
        return geometric(n, 0.5, ratio);
    }
    return geometric(n, 0.5, 0.5);
}

Ctx make_context(const Gauge& gauge, const EpsGrid& grid)
{
    auto c = std::make_shared<Context>();
    c->gauge = gauge;
    c->grid = grid;
    c->rho.resize(grid.size());
    c->log_rho.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double r = gauge.rho(grid[i]);
        double lr = gauge.log_rho(grid[i]);
        if (!(r >= 0.0 && r <= 1.0) || !std::isfinite(lr))
            throw InputError("gauge value outside (0,1] at eps=" + std::to_string(grid[i]));
        if (i > 0 && !(lr < c->log_rho[i - 1]))
            throw InputError("gauge is not decreasing on the grid at eps=" +
                             std::to_string(grid[i]));
        c->rho[i] = r;
        c->log_rho[i] = lr;
    }
    return c;
}

Ctx make_context(GaugeKind kind)
{
    return make_context(Gauge(kind), EpsGrid::default_for(kind));
}

Gauge make_gauge(GaugeKind kind, std::function<double(double)> custom)
{
    return Gauge(kind, std::move(custom));
}

bool same_context(const Ctx& a, const Ctx& b)
{
    if (a == b) return true;
    if (!a || !b) return false;
    return a->gauge.kind() == b->gauge.kind() && a->grid == b->grid &&
           a->log_rho == b->log_rho;
}

} // namespace gsf
