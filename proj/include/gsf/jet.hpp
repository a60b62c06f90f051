#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace gsf {

// Truncated Taylor series: c[k] = f^(k)(x0)/k!.
class Jet {
public:
    Jet() = default;
    explicit Jet(std::size_t order, double value = 0.0) : c_(order + 1, 0.0) { c_[0] = value; }

    static Jet variable(double x0, std::size_t order)
    {
        Jet j(order, x0);
        if (order >= 1) j.c_[1] = 1.0;
        return j;
    }

    std::size_t order() const { return c_.size() - 1; }
    double operator[](std::size_t k) const { return c_[k]; }
    double& operator[](std::size_t k) { return c_[k]; }

    // k-th derivative at x0
    double derivative(std::size_t k) const
    {
        double f = 1.0;
        for (std::size_t i = 2; i <= k; ++i) f *= double(i);
        return c_[k] * f;
    }

    Jet& operator+=(const Jet& o)
    {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Jet& operator-=(const Jet& o)
    {
        for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Jet& operator*=(double s)
    {
        for (double& v : c_) v *= s;
        return *this;
    }
    Jet& operator+=(double s)
    {
        c_[0] += s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator-(double s, Jet a)
    {
        a *= -1.0;
        a.c_[0] += s;
        return a;
    }

    friend Jet operator*(const Jet& a, const Jet& b)
    {
        Jet r(a.order());
        for (std::size_t k = 0; k <= a.order(); ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i <= k; ++i) s += a.c_[i] * b.c_[k - i];
            r.c_[k] = s;
        }
        return r;
    }

    friend Jet recip(const Jet& a)
    {
        Jet r(a.order());
        const double inv = 1.0 / a.c_[0];
        r.c_[0] = inv;
        for (std::size_t k = 1; k <= a.order(); ++k) {
            double s = 0.0;
            for (std::size_t i = 1; i <= k; ++i) s += a.c_[i] * r.c_[k - i];
            r.c_[k] = -inv * s;
        }
        return r;
    }

    friend Jet exp(const Jet& a)
    {
        Jet r(a.order());
        r.c_[0] = std::exp(a.c_[0]);
        for (std::size_t k = 1; k <= a.order(); ++k) {
            double s = 0.0;
            for (std::size_t i = 1; i <= k; ++i) s += double(i) * a.c_[i] * r.c_[k - i];
            r.c_[k] = s / double(k);
        }
        return r;
    }

    // sin and cos of a jet, computed together
    friend void sincos(const Jet& a, Jet& s, Jet& c)
    {
        s = Jet(a.order());
        c = Jet(a.order());
        s.c_[0] = std::sin(a.c_[0]);
        c.c_[0] = std::cos(a.c_[0]);
        for (std::size_t k = 1; k <= a.order(); ++k) {
            double ss = 0.0, cc = 0.0;
            for (std::size_t i = 1; i <= k; ++i) {
                ss += double(i) * a.c_[i] * c.c_[k - i];
                cc += double(i) * a.c_[i] * s.c_[k - i];
            }
            s.c_[k] = ss / double(k);
            c.c_[k] = -cc / double(k);
        }
    }

private:
    std::vector<double> c_;
};

} // namespace gsf
