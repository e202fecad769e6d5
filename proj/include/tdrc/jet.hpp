#pragma once

#include <cmath>
#include <vector>

#include "tdrc/common.hpp"

namespace tdrc {

/// Truncated power series in one variable, coefficients c[0..order].
///
/// Arithmetic propagates Taylor coefficients exactly through composition,
/// which is how higher-order input derivatives of the kernels are obtained
/// without finite differences. Templated on the scalar so tests can rerun
/// the same propagation in extended precision.
template <typename T>
class PowerSeries {
public:
    PowerSeries(int order, T constant) : c_(static_cast<size_t>(order) + 1, T(0)) {
        c_[0] = constant;
    }

    /// Series of the expansion variable itself: constant + 1 * t.
    static PowerSeries variable(int order, T constant, T slope) {
        PowerSeries s(order, constant);
        if (order >= 1) s.c_[1] = slope;
        return s;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    const T& operator[](int i) const { return c_[static_cast<size_t>(i)]; }
    T& operator[](int i) { return c_[static_cast<size_t>(i)]; }

    friend PowerSeries operator+(const PowerSeries& a, const PowerSeries& b) {
        PowerSeries r = a;
        for (int i = 0; i <= r.order(); ++i) r.c_[i] += b.c_[i];
        return r;
    }
    friend PowerSeries operator-(const PowerSeries& a, const PowerSeries& b) {
        PowerSeries r = a;
        for (int i = 0; i <= r.order(); ++i) r.c_[i] -= b.c_[i];
        return r;
    }
    friend PowerSeries operator*(const PowerSeries& a, const PowerSeries& b) {
        PowerSeries r(a.order(), T(0));
        for (int i = 0; i <= a.order(); ++i) {
            if (a.c_[i] == T(0)) continue;
            for (int j = 0; i + j <= a.order(); ++j) r.c_[i + j] += a.c_[i] * b.c_[j];
        }
        return r;
    }
    friend PowerSeries operator*(T s, const PowerSeries& a) {
        PowerSeries r = a;
        for (int i = 0; i <= r.order(); ++i) r.c_[i] *= s;
        return r;
    }
    friend PowerSeries operator+(T s, const PowerSeries& a) {
        PowerSeries r = a;
        r.c_[0] += s;
        return r;
    }

    /// a / b with b[0] != 0.
    friend PowerSeries operator/(const PowerSeries& a, const PowerSeries& b) {
        if (b.c_[0] == T(0)) throw DomainError("power series division by series with zero constant term");
        PowerSeries r(a.order(), T(0));
        for (int k = 0; k <= a.order(); ++k) {
            T acc = a.c_[k];
            for (int j = 1; j <= k; ++j) acc -= b.c_[j] * r.c_[k - j];
            r.c_[k] = acc / b.c_[0];
        }
        return r;
    }

private:
    std::vector<T> c_;
};

/// sin of a series (recurrence on the sin/cos pair).
template <typename T>
PowerSeries<T> sin(const PowerSeries<T>& u) {
    using std::cos;
    using std::sin;
    const int n = u.order();
    PowerSeries<T> s(n, sin(u[0]));
    PowerSeries<T> c(n, cos(u[0]));
    for (int k = 1; k <= n; ++k) {
        T sk(0), ck(0);
        for (int j = 1; j <= k; ++j) {
            sk += T(j) * u[j] * c[k - j];
            ck -= T(j) * u[j] * s[k - j];
        }
        s[k] = sk / T(k);
        c[k] = ck / T(k);
    }
    return s;
}

/// u^p for real exponent p; requires u[0] > 0.
template <typename T>
PowerSeries<T> pow(const PowerSeries<T>& u, double p) {
    using std::pow;
    if (!(u[0] > T(0))) throw DomainError("power series pow: non-positive base with real exponent");
    const int n = u.order();
    PowerSeries<T> v(n, pow(u[0], T(p)));
    for (int k = 1; k <= n; ++k) {
        T acc(0);
        for (int j = 1; j <= k; ++j) acc += (T(p) * T(j) - T(k - j)) * u[j] * v[k - j];
        v[k] = acc / (T(k) * u[0]);
    }
    return v;
}

/// u^m for integer m >= 0 (valid for any base, including zero and negative).
template <typename T>
PowerSeries<T> powi(const PowerSeries<T>& u, long m) {
    PowerSeries<T> r(u.order(), T(1));
    PowerSeries<T> base = u;
    for (long e = m; e > 0; e >>= 1) {
        if (e & 1) r = r * base;
        if (e > 1) base = base * base;
    }
    return r;
}

}  // namespace tdrc
