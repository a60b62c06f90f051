#pragma once

#include "gsf/gauge.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gsf {

// A generalized number: a net of reals sampled lazily on the eps grid.
// Entries are filled at most once (thread safe) and never change afterwards.
class GenNum {
public:
    using IndexFn = std::function<double(std::size_t)>;

    GenNum() = default;

    static GenNum constant(const Ctx& ctx, double r);
    static GenNum from_index(const Ctx& ctx, IndexFn fn);
    static GenNum from_eps(const Ctx& ctx, std::function<double(double)> fn);
    static GenNum from_values(const Ctx& ctx, std::vector<double> v);

    bool valid() const { return impl_ != nullptr; }
    const Ctx& ctx() const;
    std::size_t size() const;
    double at(std::size_t i) const;
    double operator[](std::size_t i) const { return at(i); }
    std::vector<double> values() const;
    // true when built from a real constant (net identically r)
    bool is_constant() const;

    struct Impl;

private:
    std::shared_ptr<Impl> impl_;
};

GenNum drho(const Ctx& ctx, double a = 1.0);
// the net eps itself (differs from drho for non-identity gauges)
GenNum eps_net(const Ctx& ctx);

GenNum operator+(const GenNum& a, const GenNum& b);
GenNum operator-(const GenNum& a, const GenNum& b);
GenNum operator*(const GenNum& a, const GenNum& b);
// throws EvalError when b is not invertible on the grid tail
GenNum operator/(const GenNum& a, const GenNum& b);
GenNum operator-(const GenNum& a);
GenNum operator+(const GenNum& a, double b);
GenNum operator+(double a, const GenNum& b);
GenNum operator-(const GenNum& a, double b);
GenNum operator-(double a, const GenNum& b);
GenNum operator*(const GenNum& a, double b);
GenNum operator*(double a, const GenNum& b);
GenNum operator/(const GenNum& a, double b);
GenNum operator/(double a, const GenNum& b);

GenNum abs(const GenNum& x);
GenNum inf(const GenNum& x, const GenNum& y);
GenNum sup(const GenNum& x, const GenNum& y);
GenNum pow(const GenNum& x, double p);
GenNum exp(const GenNum& x);
GenNum log(const GenNum& x);
GenNum sqrt(const GenNum& x);
GenNum sin(const GenNum& x);
GenNum cos(const GenNum& x);
GenNum map(const GenNum& x, std::function<double(double)> f);
GenNum zip(const GenNum& x, const GenNum& y, std::function<double(double, double)> f);

void require_same(const GenNum& a, const GenNum& b);

struct ClassifyOptions {
    int n_max = 12;
    int n_eq = 8;
    double max_residual = 0.15;
    double order_tol = 0.05;
    double tol_std = 1e-6;
};

enum class Label { negligible, infinitesimal, finite_nonzero, near_standard, infinite, indeterminate };
std::string to_string(Label l);

struct AsymptoticClass {
    Label label = Label::indeterminate;
    double order = 0.0;
    double fit_residual = 0.0;
    std::optional<double> limit;
    bool non_moderate = false;
    bool far_from_zero = false;
    std::string diagnostic;
};

AsymptoticClass classify(const GenNum& x, const ClassifyOptions& opt = {});
std::string describe(const AsymptoticClass& c);

struct Invertibility {
    bool invertible = false;
    int m = -1;
    bool inconclusive = false;
};

Invertibility is_invertible(const GenNum& x, int m_max = ClassifyOptions{}.n_eq);

bool leq(const GenNum& x, const GenNum& y, int n_eq = ClassifyOptions{}.n_eq);
bool lt(const GenNum& x, const GenNum& y, int n_eq = ClassifyOptions{}.n_eq);

struct SubpointMask {
    std::vector<std::size_t> indices;
    bool cofinal = false;
};

enum class Relation { equal, less_equal, greater_equal, mixed };
std::string to_string(Relation r);

struct Comparison {
    Relation relation = Relation::mixed;
    // For equal/less_equal/greater_equal the relation holds on L (full grid).
    // For mixed, L is where x >= y - tol and Lc where x < y - tol.
    SubpointMask L;
    SubpointMask Lc;
};

Comparison decompose_comparison(const GenNum& x, const GenNum& y, int n_eq = ClassifyOptions{}.n_eq);

std::optional<double> near_standard_part(const GenNum& x, double tol_std = ClassifyOptions{}.tol_std);

GenNum nudge_invertible(const GenNum& h, const GenNum& delta);

bool in_internal_interval(const GenNum& x, const GenNum& a, const GenNum& b,
                          const ClassifyOptions& opt = {});

// least squares slope/intercept of y against x with rms residual
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

} // namespace gsf
