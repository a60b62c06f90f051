#pragma once

#include "gsf/gennum.hpp"

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace gsf {

enum class Op {
    real, constant, var,
    neg, add, sub, mul, div,
    sin, cos, exp, log, sqrt, tanh, atan, tan, pow,
    moll, compose, antideriv, sample
};

// mu: the mollifier; chi: the cutoff; mu_cum: cumulative of mu;
// step_blend: smooth monotone step on [-1,1]; vp: mu convolved with p.v. 1/x
enum class MollKind { mu, chi, mu_cum, step_blend, vp };

// highest derivative order a tree may request from mollifier nodes
inline constexpr int d_max = 12;

struct Node;
struct Embedded;
struct LayerInfo;

class Expr {
public:
    Expr();
    Expr(double r);
    Expr(const GenNum& c);
    explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

    const Node& node() const { return *n_; }
    const std::shared_ptr<const Node>& ptr() const { return n_; }
    bool is_real() const;
    bool is_real(double v) const;

private:
    std::shared_ptr<const Node> n_;
};

// Mollified g: per eps, (g * b mu(b .)) and its derivatives.
struct Embedded {
    std::function<double(double)> g;
    std::vector<double> kinks;
    GenNum b;
};

struct Node {
    Op op = Op::real;
    std::vector<Expr> kids;
    double real = 0.0;
    GenNum gen;
    int var = -1;
    double p = 0.0;
    MollKind mk = MollKind::mu;
    int order = 0;
    std::shared_ptr<const Embedded> emb;
    // antiderivative nodes cache their layer list
    mutable std::once_flag layers_once;
    mutable std::shared_ptr<const std::vector<LayerInfo>> layers;
};

Expr real(double r);
Expr constant(const GenNum& c);
Expr var(int k);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);

Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr tanh(const Expr& a);
Expr atan(const Expr& a);
Expr tan(const Expr& a);
Expr pow(const Expr& a, double p);
Expr mollifier(MollKind kind, const Expr& arg, int order = 0);
// f is an expression in variables 0..args.size()-1
Expr compose(const Expr& f, const std::vector<Expr> & args);
// F(x) = integral from base to x_k of f along variable k; base must not depend on variables
Expr antiderivative(const Expr& f, int k, const Expr& base);
Expr embedded_sample(std::shared_ptr<const Embedded> e, const Expr& arg, int order = 0);

// Exact symbolic derivative along variable k.
Expr derive(const Expr& f, int k);
// Mixed derivative, alpha[i] = order along variable i.
Expr derive(const Expr& f, const std::vector<int>& alpha);

// number of variables referenced (max index + 1)
int arity(const Expr& f);
bool depends_on(const Expr& f, int k);
std::string to_string(const Expr& f);

// Value of the eps-representative with grid index i at the real point x.
// Domain violations throw EvalError.
double eval(const Expr& f, const double* x, std::size_t i);

using GPoint = std::vector<GenNum>;

// f([x_eps]) = [f_eps(x_eps)], lazy; ctx taken from the point or the constants.
GenNum eval(const Expr& f, const GPoint& x, const Ctx& ctx = nullptr);
GenNum eval(const Expr& f, const GenNum& x);

// Context of the first GenNum constant found in f (nullptr if none).
Ctx find_context(const Expr& f);

// Singular layer: a mollifier-type node whose kernel is negligible once |arg| > radius.
struct LayerInfo {
    Expr arg;
    double radius = 0.0;
    // derivative of arg along the integration variable; affine when it does not depend on it
    Expr darg;
    bool affine = false;
};

std::vector<LayerInfo> collect_layers(const Expr& f, int k);

// Layer windows along variable k at point x (grid index i): [center - w, center + w].
struct Window {
    double center = 0.0;
    double halfwidth = 0.0;
};
std::vector<Window> layer_windows(const std::vector<LayerInfo>& layers, const double* x, int k,
                                  std::size_t i);

// kernel evaluation shared by the tree and by the ODE layer control
double moll_value(MollKind kind, int order, double u);
double moll_radius(MollKind kind);

} // namespace gsf
