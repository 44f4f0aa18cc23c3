#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <ostream>
#include <stdexcept>

namespace todalab {

using Rational = mpq_class;

/// Element a + b*sqrt(2) of Q(sqrt 2).
struct QSqrt2 {
    Rational a{0};
    Rational b{0};

    QSqrt2() = default;
    QSqrt2(long v) : a(v), b(0) {}
    QSqrt2(Rational av, Rational bv = 0) : a(std::move(av)), b(std::move(bv)) {}

    static QSqrt2 sqrt2() { return QSqrt2(Rational(0), Rational(1)); }

    QSqrt2 operator-() const { return QSqrt2(Rational(-a), Rational(-b)); }
    QSqrt2& operator+=(const QSqrt2& o) { a += o.a; b += o.b; return *this; }
    QSqrt2& operator-=(const QSqrt2& o) { a -= o.a; b -= o.b; return *this; }
    QSqrt2& operator*=(const QSqrt2& o) {
        Rational na = a * o.a + 2 * b * o.b;
        Rational nb = a * o.b + b * o.a;
        a = std::move(na);
        b = std::move(nb);
        return *this;
    }
    QSqrt2& operator/=(const QSqrt2& o) {
        Rational den = o.a * o.a - 2 * o.b * o.b;
        if (den == 0) throw std::domain_error("QSqrt2: division by zero");
        QSqrt2 conj(o.a, Rational(-o.b));
        *this *= conj;
        a /= den;
        b /= den;
        return *this;
    }
    friend QSqrt2 operator+(QSqrt2 x, const QSqrt2& y) { return x += y; }
    friend QSqrt2 operator-(QSqrt2 x, const QSqrt2& y) { return x -= y; }
    friend QSqrt2 operator*(QSqrt2 x, const QSqrt2& y) { return x *= y; }
    friend QSqrt2 operator/(QSqrt2 x, const QSqrt2& y) { return x /= y; }
    friend bool operator==(const QSqrt2& x, const QSqrt2& y) { return x.a == y.a && x.b == y.b; }
    friend bool operator!=(const QSqrt2& x, const QSqrt2& y) { return !(x == y); }

    bool is_zero() const { return a == 0 && b == 0; }
    double to_double() const { return a.get_d() + b.get_d() * std::sqrt(2.0); }

    friend std::ostream& operator<<(std::ostream& os, const QSqrt2& x) {
        return os << x.a << "+" << x.b << "*r2";
    }
};

/// Gaussian extension of Q(sqrt 2): re + i*im.
struct CQSqrt2 {
    QSqrt2 re;
    QSqrt2 im;

    CQSqrt2() = default;
    CQSqrt2(long v) : re(v), im(0) {}
    CQSqrt2(QSqrt2 r, QSqrt2 i = QSqrt2()) : re(std::move(r)), im(std::move(i)) {}

    static CQSqrt2 imag_unit() { return CQSqrt2(QSqrt2(0), QSqrt2(1)); }

    CQSqrt2 operator-() const { return CQSqrt2(-re, -im); }
    CQSqrt2& operator+=(const CQSqrt2& o) { re += o.re; im += o.im; return *this; }
    CQSqrt2& operator-=(const CQSqrt2& o) { re -= o.re; im -= o.im; return *this; }
    CQSqrt2& operator*=(const CQSqrt2& o) {
        QSqrt2 nr = re * o.re - im * o.im;
        QSqrt2 ni = re * o.im + im * o.re;
        re = std::move(nr);
        im = std::move(ni);
        return *this;
    }
    CQSqrt2& operator/=(const CQSqrt2& o) {
        QSqrt2 den = o.re * o.re + o.im * o.im;
        *this *= CQSqrt2(o.re, -o.im);
        re /= den;
        im /= den;
        return *this;
    }
    friend CQSqrt2 operator+(CQSqrt2 x, const CQSqrt2& y) { return x += y; }
    friend CQSqrt2 operator-(CQSqrt2 x, const CQSqrt2& y) { return x -= y; }
    friend CQSqrt2 operator*(CQSqrt2 x, const CQSqrt2& y) { return x *= y; }
    friend CQSqrt2 operator/(CQSqrt2 x, const CQSqrt2& y) { return x /= y; }
    friend bool operator==(const CQSqrt2& x, const CQSqrt2& y) { return x.re == y.re && x.im == y.im; }
    friend bool operator!=(const CQSqrt2& x, const CQSqrt2& y) { return !(x == y); }

    CQSqrt2 conj() const { return CQSqrt2(re, -im); }
    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
};

// Uniform access used by the templated algebra routines.
template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
    static constexpr bool exact = false;
    static double magnitude(double v) { return std::abs(v); }
    static double sqrt2() { return std::sqrt(2.0); }
};

template <>
struct ScalarOps<Rational> {
    static constexpr bool exact = true;
    static double magnitude(const Rational& v) { return std::abs(v.get_d()); }
};

template <>
struct ScalarOps<QSqrt2> {
    static constexpr bool exact = true;
    static double magnitude(const QSqrt2& v) { return std::abs(v.to_double()); }
    static QSqrt2 sqrt2() { return QSqrt2::sqrt2(); }
};

template <>
struct ScalarOps<std::complex<double>> {
    static constexpr bool exact = false;
    using Real = double;
    static double magnitude(const std::complex<double>& v) { return std::abs(v); }
    static std::complex<double> sqrt2() { return std::sqrt(2.0); }
    static std::complex<double> imag_unit() { return {0.0, 1.0}; }
};

template <>
struct ScalarOps<CQSqrt2> {
    static constexpr bool exact = true;
    using Real = QSqrt2;
    static double magnitude(const CQSqrt2& v) { return std::abs(v.to_complex()); }
    static CQSqrt2 sqrt2() { return CQSqrt2(QSqrt2::sqrt2()); }
    static CQSqrt2 imag_unit() { return CQSqrt2::imag_unit(); }
};

/// Zero test: exact equality for exact scalars, |v| <= tol otherwise.
template <class S>
bool near_zero(const S& v, double tol) {
    if constexpr (ScalarOps<S>::exact) {
        return v == S(0);
    } else {
        return ScalarOps<S>::magnitude(v) <= tol;
    }
}

}  // namespace todalab
