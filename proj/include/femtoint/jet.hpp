#pragma once

// Truncated Taylor ("jet") arithmetic. A Jet of order n carries the Taylor
// coefficients c[0..n] of a function around an expansion point, so
// c[i] = f^(i)(x0) / i!. Elementary functions propagate all coefficients
// exactly (up to rounding), which gives higher derivatives of composite
// expressions without symbolic differentiation.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

#include "femtoint/errors.hpp"

namespace femtoint {

class Jet {
public:
    Jet() = default;

    /// Constant of the given order.
    Jet(double value, std::size_t order) : c_(order + 1, 0.0) { c_[0] = value; }

    /// Independent variable t = x0 + dt.
    static Jet variable(double x0, std::size_t order)
    {
        Jet j(x0, order);
        if (order >= 1)
            j.c_[1] = 1.0;
        return j;
    }

    std::size_t order() const { return c_.size() - 1; }
    double value() const { return c_[0]; }
    double operator[](std::size_t i) const { return c_[i]; }
    double& operator[](std::size_t i) { return c_[i]; }
    const std::vector<double>& coefficients() const { return c_; }

    /// i-th derivative at the expansion point.
    double derivative(std::size_t i) const
    {
        double f = 1.0;
        for (std::size_t k = 2; k <= i; ++k)
            f *= static_cast<double>(k);
        return c_[i] * f;
    }

    Jet& operator+=(const Jet& o)
    {
        assert(o.order() == order());
        for (std::size_t i = 0; i < c_.size(); ++i)
            c_[i] += o.c_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o)
    {
        assert(o.order() == order());
        for (std::size_t i = 0; i < c_.size(); ++i)
            c_[i] -= o.c_[i];
        return *this;
    }
    Jet& operator+=(double v)
    {
        c_[0] += v;
        return *this;
    }
    Jet& operator-=(double v)
    {
        c_[0] -= v;
        return *this;
    }
    Jet& operator*=(double v)
    {
        for (double& x : c_)
            x *= v;
        return *this;
    }
    Jet& operator/=(double v)
    {
        for (double& x : c_)
            x /= v;
        return *this;
    }
    Jet& operator*=(const Jet& o)
    {
        *this = *this * o;
        return *this;
    }
    Jet& operator/=(const Jet& o)
    {
        *this = *this / o;
        return *this;
    }

    Jet operator-() const
    {
        Jet r = *this;
        for (double& x : r.c_)
            x = -x;
        return r;
    }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator+(Jet a, double b) { return a += b; }
    friend Jet operator+(double a, Jet b) { return b += a; }
    friend Jet operator-(Jet a, double b) { return a -= b; }
    friend Jet operator-(double a, const Jet& b) { return (-b) += a; }
    friend Jet operator*(Jet a, double b) { return a *= b; }
    friend Jet operator*(double a, Jet b) { return b *= a; }
    friend Jet operator/(Jet a, double b) { return a /= b; }

    friend Jet operator*(const Jet& a, const Jet& b)
    {
        assert(a.order() == b.order());
        const std::size_t n = a.c_.size();
        Jet r(0.0, n - 1);
        for (std::size_t k = 0; k < n; ++k) {
            double s = 0.0;
            for (std::size_t j = 0; j <= k; ++j)
                s += a.c_[j] * b.c_[k - j];
            r.c_[k] = s;
        }
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b)
    {
        assert(a.order() == b.order());
        if (b.c_[0] == 0.0)
            throw domain_error("Jet division by a series with zero constant term");
        const std::size_t n = a.c_.size();
        Jet r(0.0, n - 1);
        for (std::size_t k = 0; k < n; ++k) {
            double s = a.c_[k];
            for (std::size_t j = 1; j <= k; ++j)
                s -= b.c_[j] * r.c_[k - j];
            r.c_[k] = s / b.c_[0];
        }
        return r;
    }

    friend Jet operator/(double a, const Jet& b) { return Jet(a, b.order()) / b; }

    friend Jet exp(const Jet& a)
    {
        const std::size_t n = a.c_.size();
        Jet r(std::exp(a.c_[0]), n - 1);
        for (std::size_t k = 1; k < n; ++k) {
            double s = 0.0;
            for (std::size_t j = 1; j <= k; ++j)
                s += static_cast<double>(j) * a.c_[j] * r.c_[k - j];
            r.c_[k] = s / static_cast<double>(k);
        }
        return r;
    }

    friend Jet sqrt(const Jet& a)
    {
        if (!(a.c_[0] > 0.0))
            throw domain_error("Jet sqrt requires a positive constant term");
        const std::size_t n = a.c_.size();
        Jet r(std::sqrt(a.c_[0]), n - 1);
        for (std::size_t k = 1; k < n; ++k) {
            double s = a.c_[k];
            for (std::size_t j = 1; j < k; ++j)
                s -= r.c_[j] * r.c_[k - j];
            r.c_[k] = s / (2.0 * r.c_[0]);
        }
        return r;
    }

    // atan(a)' = a' / (1 + a^2); integrate the quotient series term by term.
    friend Jet atan(const Jet& a)
    {
        const std::size_t n = a.c_.size();
        Jet r(std::atan(a.c_[0]), n - 1);
        if (n == 1)
            return r;
        const Jet q = 1.0 + a * a;
        Jet da(0.0, n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k)
            da.c_[k] = static_cast<double>(k + 1) * a.c_[k + 1];
        const Jet d = da / q;
        for (std::size_t k = 1; k < n; ++k)
            r.c_[k] = d.c_[k - 1] / static_cast<double>(k);
        return r;
    }

private:
    std::vector<double> c_{0.0};
};

/// Value part of a scalar or jet; lets generic code make double-valued
/// decisions (truncation counts, branches) from either.
inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

} // namespace femtoint
