#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gsf {

enum class GaugeKind { identity, exp_inv, custom };

std::string to_string(GaugeKind k);
GaugeKind parse_gauge_kind(const std::string& s);

// The infinitesimal net eps -> rho_eps.
class Gauge {
public:
    Gauge() : Gauge(GaugeKind::identity) {}
    explicit Gauge(GaugeKind kind, std::function<double(double)> custom = {});

    GaugeKind kind() const { return kind_; }
    double rho(double eps) const;
    // log rho, from the closed form when one exists so exp_inv never underflows
    double log_rho(double eps) const;

private:
    GaugeKind kind_;
    std::function<double(double)> custom_;
};

class EpsGrid {
public:
    EpsGrid() = default;
    explicit EpsGrid(std::vector<double> samples);

    static EpsGrid geometric(std::size_t n, double eps0, double ratio);
    // Default grid for a gauge: identity uses eps0=0.5, ratio=0.5;
    // exp_inv stops at eps=1/40 so that rho^{-1} stays finite.
    static EpsGrid default_for(GaugeKind kind, std::size_t n = 24);

    std::size_t size() const { return eps_.size(); }
    double operator[](std::size_t i) const { return eps_[i]; }
    const std::vector<double>& samples() const { return eps_; }
    // first index of the asymptotic tail (second half of the grid)
    std::size_t tail_start() const { return eps_.size() / 2; }

    bool operator==(const EpsGrid& o) const { return eps_ == o.eps_; }

private:
    std::vector<double> eps_;
};

// Gauge plus grid plus the precomputed rho values; shared by every GenNum.
struct Context {
    Gauge gauge;
    EpsGrid grid;
    std::vector<double> rho;
    std::vector<double> log_rho;

    std::size_t size() const { return grid.size(); }
    std::size_t tail_start() const { return grid.tail_start(); }
};

using Ctx = std::shared_ptr<const Context>;

// Validates monotonicity of rho on the grid.
Ctx make_context(const Gauge& gauge, const EpsGrid& grid);
Ctx make_context(GaugeKind kind);
Gauge make_gauge(GaugeKind kind, std::function<double(double)> custom = {});

bool same_context(const Ctx& a, const Ctx& b);

} // namespace gsf
