#pragma once

#include "todalab/exact.hpp"

#include <array>
#include <complex>
#include <string>
#include <vector>

namespace todalab {

/// Ambient signature of R^{p,q+1} in the frame order (iota, u1, v1, ..., un, vn).
struct SignatureSpec {
    int n = 0;
    int p = 0;
    int q = 0;
    std::vector<int> ambient_signs;

    int dim() const { return 2 * n + 1; }
    static SignatureSpec make(int n);
};

template <class S>
using PseudoVector = std::vector<S>;

/// Small row-major dense matrix usable with exact scalars.
template <class S>
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<S> v;

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, S(0)) {}

    static DenseMatrix identity(int d) {
        DenseMatrix m(d, d);
        for (int i = 0; i < d; ++i) m(i, i) = S(1);
        return m;
    }
    S& operator()(int i, int j) { return v[static_cast<size_t>(i) * cols + j]; }
    const S& operator()(int i, int j) const { return v[static_cast<size_t>(i) * cols + j]; }

    PseudoVector<S> column(int j) const {
        PseudoVector<S> c(rows);
        for (int i = 0; i < rows; ++i) c[i] = (*this)(i, j);
        return c;
    }
    DenseMatrix transpose() const {
        DenseMatrix t(cols, rows);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        DenseMatrix c(a.rows, b.cols);
        for (int i = 0; i < a.rows; ++i)
            for (int k = 0; k < a.cols; ++k) {
                if (a(i, k) == S(0)) continue;
                for (int j = 0; j < b.cols; ++j) c(i, j) += a(i, k) * b(k, j);
            }
        return c;
    }
    friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
        for (size_t i = 0; i < a.v.size(); ++i) a.v[i] += b.v[i];
        return a;
    }
    friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) {
        for (size_t i = 0; i < a.v.size(); ++i) a.v[i] -= b.v[i];
        return a;
    }
    friend DenseMatrix operator*(const S& s, DenseMatrix m) {
        for (auto& e : m.v) e = s * e;
        return m;
    }
    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
        return a.rows == b.rows && a.cols == b.cols && a.v == b.v;
    }
};

template <class S>
DenseMatrix<S> commutator(const DenseMatrix<S>& a, const DenseMatrix<S>& b) {
    return a * b - b * a;
}

/// Largest entry magnitude.
template <class S>
double max_magnitude(const DenseMatrix<S>& m) {
    double r = 0.0;
    for (const auto& x : m.v) r = std::max(r, ScalarOps<S>::magnitude(x));
    return r;
}

// Signature (3,4) on R^7: e1..e3 positive, e4..e7 negative.
inline constexpr std::array<int, 7> kSig34 = {1, 1, 1, -1, -1, -1, -1};

struct SignedIndex {
    int sign;
    int index;
};

// e_{row} x e_{col}, zero-based; sign 0 marks a vanishing product.
inline constexpr SignedIndex kCrossTable[7][7] = {
    {{0, 0}, {1, 2}, {-1, 1}, {1, 4}, {-1, 3}, {-1, 6}, {1, 5}},
    {{-1, 2}, {0, 0}, {1, 0}, {1, 5}, {1, 6}, {-1, 3}, {-1, 4}},
    {{1, 1}, {-1, 0}, {0, 0}, {1, 6}, {-1, 5}, {1, 4}, {-1, 3}},
    {{-1, 4}, {-1, 5}, {-1, 6}, {0, 0}, {-1, 0}, {-1, 1}, {-1, 2}},
    {{1, 3}, {-1, 6}, {1, 5}, {1, 0}, {0, 0}, {1, 2}, {-1, 1}},
    {{1, 6}, {1, 3}, {-1, 4}, {1, 1}, {-1, 2}, {0, 0}, {1, 0}},
    {{-1, 5}, {1, 4}, {1, 3}, {1, 2}, {1, 1}, {-1, 0}, {0, 0}},
};

// Basis (1, i, j, k, l, il, jl, kl); entry [r][c] is b_{r+1} * b_{c+1}.
inline constexpr SignedIndex kOctonionTable[7][7] = {
    {{-1, 0}, {1, 3}, {-1, 2}, {1, 5}, {-1, 4}, {-1, 7}, {1, 6}},
    {{-1, 3}, {-1, 0}, {1, 1}, {1, 6}, {1, 7}, {-1, 4}, {-1, 5}},
    {{1, 2}, {-1, 1}, {-1, 0}, {1, 7}, {-1, 6}, {1, 5}, {-1, 4}},
    {{-1, 5}, {-1, 6}, {-1, 7}, {1, 0}, {-1, 1}, {-1, 2}, {-1, 3}},
    {{1, 4}, {-1, 7}, {1, 6}, {1, 1}, {1, 0}, {1, 3}, {-1, 2}},
    {{1, 7}, {1, 4}, {-1, 5}, {1, 2}, {-1, 3}, {1, 0}, {1, 1}},
    {{-1, 6}, {1, 5}, {1, 4}, {1, 3}, {1, 2}, {-1, 1}, {1, 0}},
};

inline void require_dim(size_t got, size_t want, const char* what) {
    if (got != want)
        throw std::invalid_argument(std::string(what) + ": expected dimension " + std::to_string(want) +
                                    ", got " + std::to_string(got));
}

template <class S>
S inner(const PseudoVector<S>& x, const PseudoVector<S>& y, const std::vector<int>& signs) {
    require_dim(x.size(), signs.size(), "inner");
    require_dim(y.size(), signs.size(), "inner");
    S r(0);
    for (size_t i = 0; i < signs.size(); ++i) {
        if (signs[i] > 0) r += x[i] * y[i];
        else r -= x[i] * y[i];
    }
    return r;
}

/// Metric of signature (3,4).
template <class S>
S inner34(const PseudoVector<S>& x, const PseudoVector<S>& y) {
    require_dim(x.size(), 7, "inner34");
    require_dim(y.size(), 7, "inner34");
    S r(0);
    for (int i = 0; i < 7; ++i) {
        if (kSig34[i] > 0) r += x[i] * y[i];
        else r -= x[i] * y[i];
    }
    return r;
}

template <class S>
PseudoVector<S> cross(const PseudoVector<S>& x, const PseudoVector<S>& y) {
    require_dim(x.size(), 7, "cross");
    require_dim(y.size(), 7, "cross");
    PseudoVector<S> r(7, S(0));
    for (int a = 0; a < 7; ++a) {
        if (x[a] == S(0)) continue;
        for (int b = 0; b < 7; ++b) {
            const SignedIndex& t = kCrossTable[a][b];
            if (t.sign == 0) continue;
            if (t.sign > 0) r[t.index] += x[a] * y[b];
            else r[t.index] -= x[a] * y[b];
        }
    }
    return r;
}

template <class S>
PseudoVector<S> split_octonion_mul(const PseudoVector<S>& x, const PseudoVector<S>& y) {
    require_dim(x.size(), 8, "split_octonion_mul");
    require_dim(y.size(), 8, "split_octonion_mul");
    PseudoVector<S> r(8, S(0));
    for (int a = 0; a < 8; ++a) {
        if (x[a] == S(0)) continue;
        for (int b = 0; b < 8; ++b) {
            if (a == 0) { r[b] += x[a] * y[b]; continue; }
            if (b == 0) { r[a] += x[a] * y[b]; continue; }
            const SignedIndex& t = kOctonionTable[a - 1][b - 1];
            if (t.sign > 0) r[t.index] += x[a] * y[b];
            else r[t.index] -= x[a] * y[b];
        }
    }
    return r;
}

template <class S>
S phi3(const PseudoVector<S>& x, const PseudoVector<S>& y, const PseudoVector<S>& z) {
    return inner34(cross(x, y), z);
}

/// Alternating 3-form on a 7-dimensional space, stored on triples i<j<k.
template <class S>
struct ThreeForm {
    std::array<S, 35> coeff;

    ThreeForm() { coeff.fill(S(0)); }

    static int slot(int i, int j, int k) {
        // lexicographic rank of i<j<k among 3-subsets of {0..6}
        int r = 0;
        for (int a = 0; a < i; ++a) r += (6 - a) * (5 - a) / 2;
        for (int b = i + 1; b < j; ++b) r += 6 - b;
        return r + (k - j - 1);
    }

    S& at(int i, int j, int k) { return coeff[slot(i, j, k)]; }
    const S& at(int i, int j, int k) const { return coeff[slot(i, j, k)]; }

    /// Value on (e_i, e_j, e_k) for arbitrary indices.
    S value(int i, int j, int k) const {
        if (i == j || j == k || i == k) return S(0);
        int sgn = 1;
        if (i > j) { std::swap(i, j); sgn = -sgn; }
        if (j > k) { std::swap(j, k); sgn = -sgn; }
        if (i > j) { std::swap(i, j); sgn = -sgn; }
        return sgn > 0 ? at(i, j, k) : S(-at(i, j, k));
    }

    S eval(const PseudoVector<S>& x, const PseudoVector<S>& y, const PseudoVector<S>& z) const {
        require_dim(x.size(), 7, "ThreeForm::eval");
        require_dim(y.size(), 7, "ThreeForm::eval");
        require_dim(z.size(), 7, "ThreeForm::eval");
        S r(0);
        for (int i = 0; i < 7; ++i)
            for (int j = i + 1; j < 7; ++j)
                for (int k = j + 1; k < 7; ++k) {
                    const S& c = at(i, j, k);
                    if (c == S(0)) continue;
                    S det = x[i] * (y[j] * z[k] - y[k] * z[j]) - x[j] * (y[i] * z[k] - y[k] * z[i]) +
                            x[k] * (y[i] * z[j] - y[j] * z[i]);
                    r += c * det;
                }
        return r;
    }

    friend bool operator==(const ThreeForm& a, const ThreeForm& b) { return a.coeff == b.coeff; }
};

/// phi = e123 - e145 + e167 - e246 - e257 - e347 + e356.
template <class S>
ThreeForm<S> phi_form() {
    ThreeForm<S> f;
    f.at(0, 1, 2) = S(1);
    f.at(0, 3, 4) = S(-1);
    f.at(0, 5, 6) = S(1);
    f.at(1, 3, 5) = S(-1);
    f.at(1, 4, 6) = S(-1);
    f.at(2, 3, 6) = S(-1);
    f.at(2, 4, 5) = S(1);
    return f;
}

/// varpi = i(eps147 + eps246 - eps345 - 2 sqrt2 eps156 - eps237 / sqrt2).
template <class C>
ThreeForm<C> varpi_form() {
    const C i = ScalarOps<C>::imag_unit();
    const C s = ScalarOps<C>::sqrt2();
    ThreeForm<C> f;
    f.at(0, 3, 6) = i;
    f.at(1, 3, 5) = i;
    f.at(2, 3, 4) = -i;
    f.at(0, 4, 5) = C(-2) * s * i;
    f.at(1, 2, 6) = -(i / s);
    return f;
}

/// Coefficients of the pulled-back form (columns of B as the new basis).
template <class S>
ThreeForm<S> pullback(const ThreeForm<S>& form, const DenseMatrix<S>& b) {
    ThreeForm<S> out;
    std::array<PseudoVector<S>, 7> cols;
    for (int j = 0; j < 7; ++j) cols[j] = b.column(j);
    for (int i = 0; i < 7; ++i)
        for (int j = i + 1; j < 7; ++j)
            for (int k = j + 1; k < 7; ++k) out.at(i, j, k) = form.eval(cols[i], cols[j], cols[k]);
    return out;
}

/// Largest |(X.form)(e_a,e_b,e_c)| over a<b<c; zero iff X preserves form infinitesimally.
template <class S>
double invariance_residual(const DenseMatrix<S>& x, const ThreeForm<S>& form, bool* exact_zero = nullptr) {
    double worst = 0.0;
    bool all_zero = true;
    for (int a = 0; a < 7; ++a)
        for (int b = a + 1; b < 7; ++b)
            for (int c = b + 1; c < 7; ++c) {
                S r(0);
                for (int i = 0; i < 7; ++i) {
                    if (!(x(i, a) == S(0))) r += x(i, a) * form.value(i, b, c);
                    if (!(x(i, b) == S(0))) r += x(i, b) * form.value(a, i, c);
                    if (!(x(i, c) == S(0))) r += x(i, c) * form.value(a, b, i);
                }
                if (!(r == S(0))) all_zero = false;
                worst = std::max(worst, ScalarOps<S>::magnitude(r));
            }
    if (exact_zero) *exact_zero = all_zero;
    return worst;
}

/// Columns of the G2'-basis generated by (e1, e2, e4).
template <class S>
DenseMatrix<S> complete_g2_basis(const PseudoVector<S>& e1, const PseudoVector<S>& e2, const PseudoVector<S>& e4,
                                 double tol = 1e-12) {
    require_dim(e1.size(), 7, "complete_g2_basis");
    require_dim(e2.size(), 7, "complete_g2_basis");
    require_dim(e4.size(), 7, "complete_g2_basis");
    std::vector<std::string> failing;
    auto check = [&](const S& val, const S& want, const char* name) {
        if (!near_zero(S(val - want), tol)) failing.emplace_back(name);
    };
    PseudoVector<S> e3 = cross(e1, e2);
    check(inner34(e1, e1), S(1), "<e1,e1> = 1");
    check(inner34(e2, e2), S(1), "<e2,e2> = 1");
    check(inner34(e4, e4), S(-1), "<e4,e4> = -1");
    check(inner34(e1, e2), S(0), "<e1,e2> = 0");
    check(inner34(e1, e4), S(0), "<e1,e4> = 0");
    check(inner34(e2, e4), S(0), "<e2,e4> = 0");
    check(inner34(e3, e4), S(0), "<e1 x e2,e4> = 0");
    if (!failing.empty()) {
        std::string msg = "complete_g2_basis: violated";
        for (const auto& f : failing) msg += " [" + f + "]";
        throw std::invalid_argument(msg);
    }
    std::array<PseudoVector<S>, 7> cols = {e1, e2, e3, e4, cross(e1, e4), cross(e2, e4), cross(e3, e4)};
    DenseMatrix<S> m(7, 7);
    for (int j = 0; j < 7; ++j)
        for (int i = 0; i < 7; ++i) m(i, j) = cols[j][i];
    return m;
}

/// Parameters (a1..a6, b1..b6, c1, c2) of the real g2' pattern.
template <class S>
struct G2LieMatch {
    bool member = false;
    std::array<S, 14> params;
    double pattern_residual = 0.0;
    double phi_residual = 0.0;
};

template <class S>
DenseMatrix<S> g2_lie_matrix(const std::array<S, 14>& p) {
    const S &a1 = p[0], &a2 = p[1], &a3 = p[2], &a4 = p[3], &a5 = p[4], &a6 = p[5];
    const S &b1 = p[6], &b2 = p[7], &b3 = p[8], &b4 = p[9], &b5 = p[10], &b6 = p[11];
    const S &c1 = p[12], &c2 = p[13];
    const S z(0);
    const std::array<std::array<S, 7>, 7> rows = {{
        {z, a1, a2, b4, c1, b1, b2},
        {S(-a1), z, a3, b5, S(b1 - b6), c2, b3},
        {S(-a2), S(-a3), z, b6, S(b2 + b5), S(b3 - b4), S(-c1 - c2)},
        {b4, b5, b6, z, a4, a5, a6},
        {c1, S(b1 - b6), S(b2 + b5), S(-a4), z, S(a1 + a6), S(a2 - a5)},
        {b1, c2, S(b3 - b4), S(-a5), S(-a1 - a6), z, S(a3 + a4)},
        {b2, b3, S(-c1 - c2), S(-a6), S(a5 - a2), S(-a3 - a4), z},
    }};
    DenseMatrix<S> m(7, 7);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) m(i, j) = rows[i][j];
    return m;
}

template <class S>
G2LieMatch<S> g2_lie_pattern(const DenseMatrix<S>& x, double tol = 1e-12) {
    require_dim(static_cast<size_t>(x.rows), 7, "g2_lie_pattern");
    require_dim(static_cast<size_t>(x.cols), 7, "g2_lie_pattern");
    G2LieMatch<S> out;
    out.params = {x(0, 1), x(0, 2), x(1, 2), x(3, 4), x(3, 5), x(3, 6), x(0, 5),
                  x(0, 6), x(1, 6), x(0, 3), x(1, 3), x(2, 3), x(0, 4), x(1, 5)};
    DenseMatrix<S> diff = x - g2_lie_matrix(out.params);
    out.pattern_residual = max_magnitude(diff);
    bool all_zero = true;
    for (const auto& e : diff.v)
        if (!near_zero(e, tol)) all_zero = false;
    out.member = all_zero;
    out.phi_residual = invariance_residual(x, phi_form<S>());
    return out;
}

/// Parameters (t1, t2, x1..x6, y1..y6) of the complex g2 pattern.
template <class C>
struct G2ComplexMatch {
    bool member = false;
    std::array<C, 14> params;
    double pattern_residual = 0.0;
    double varpi_residual = 0.0;
    double so_q_residual = 0.0;
};

/// Anti-diagonal quadratic form with entries (-1, 1, -1, 1, -1, 1, -1).
template <class C>
DenseMatrix<C> quadratic_form_q() {
    DenseMatrix<C> q(7, 7);
    for (int i = 0; i < 7; ++i) q(i, 6 - i) = (i % 2 == 0) ? C(-1) : C(1);
    return q;
}

template <class C>
DenseMatrix<C> g2c_matrix(const std::array<C, 14>& p) {
    const C &t1 = p[0], &t2 = p[1];
    const C &x1 = p[2], &x2 = p[3], &x3 = p[4], &x4 = p[5], &x5 = p[6], &x6 = p[7];
    const C &y1 = p[8], &y2 = p[9], &y3 = p[10], &y4 = p[11], &y5 = p[12], &y6 = p[13];
    const C s = ScalarOps<C>::sqrt2();
    const C two_s = C(2) * s;
    const C z(0);
    const std::array<std::array<C, 7>, 7> rows = {{
        {C(t1 + t2), x1, x2, x3, x4, x5, z},
        {y1, t1, x6, C(-(two_s * x2)), C(-(s * x3)), z, x5},
        {y2, y6, t2, C(two_s * x1), z, C(-(s * x3)), C(-x4)},
        {y3, C(-(y2 / s)), C(y1 / s), z, C(two_s * x1), C(two_s * x2), x3},
        {y4, C(-(y3 / two_s)), z, C(y1 / s), C(-t2), x6, C(-x2)},
        {y5, z, C(-(y3 / two_s)), C(y2 / s), y6, C(-t1), x1},
        {z, y5, C(-y4), y3, C(-y2), y1, C(-t1 - t2)},
    }};
    DenseMatrix<C> m(7, 7);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) m(i, j) = rows[i][j];
    return m;
}

template <class C>
G2ComplexMatch<C> g2c_pattern(const DenseMatrix<C>& x, double tol = 1e-12) {
    require_dim(static_cast<size_t>(x.rows), 7, "g2c_pattern");
    require_dim(static_cast<size_t>(x.cols), 7, "g2c_pattern");
    G2ComplexMatch<C> out;
    out.params = {x(1, 1), x(2, 2), x(0, 1), x(0, 2), x(0, 3), x(0, 4), x(0, 5),
                  x(1, 2), x(1, 0), x(2, 0), x(3, 0), x(4, 0), x(5, 0), x(2, 1)};
    DenseMatrix<C> diff = x - g2c_matrix(out.params);
    out.pattern_residual = max_magnitude(diff);
    const DenseMatrix<C> q = quadratic_form_q<C>();
    DenseMatrix<C> soq = x.transpose() * q + q * x;
    out.so_q_residual = max_magnitude(soq);
    bool ok = true;
    for (const auto& e : diff.v)
        if (!near_zero(e, tol)) ok = false;
    for (const auto& e : soq.v)
        if (!near_zero(e, tol)) ok = false;
    out.member = ok;
    out.varpi_residual = invariance_residual(x, varpi_form<C>());
    return out;
}

/// Principal sl2 triple (e_tilde, a, e) inside the complex g2 pattern.
template <class S>
struct Sl2Triple {
    DenseMatrix<S> e_tilde;
    DenseMatrix<S> a;
    DenseMatrix<S> e;
};

template <class S>
Sl2Triple<S> principal_sl2() {
    const S s = ScalarOps<S>::sqrt2();
    Sl2Triple<S> t{DenseMatrix<S>(7, 7), DenseMatrix<S>(7, 7), DenseMatrix<S>(7, 7)};
    const std::array<S, 6> sub = {S(1), S(1), S(S(1) / s), S(S(1) / s), S(1), S(1)};
    const std::array<S, 6> sup = {S(3), S(5), S(S(6) * s), S(S(6) * s), S(5), S(3)};
    for (int i = 0; i < 6; ++i) {
        t.e_tilde(i + 1, i) = sub[i];
        t.e(i, i + 1) = sup[i];
    }
    for (int i = 0; i < 7; ++i) t.a(i, i) = S(3 - i);
    return t;
}

/// Real-form matrix B built from sqrt(h1), sqrt(h2); h3 = h1 h2 / 4.
template <class C>
DenseMatrix<C> real_form_frame_from_roots(const typename ScalarOps<C>::Real& root_h1,
                                          const typename ScalarOps<C>::Real& root_h2) {
    using R = typename ScalarOps<C>::Real;
    const C i = ScalarOps<C>::imag_unit();
    const C s = ScalarOps<C>::sqrt2();
    const C r1(root_h1), r2(root_h2);
    const C r3 = C(R(root_h1 * root_h2)) / C(2);
    DenseMatrix<C> m(7, 7);
    m(3, 0) = s;
    m(1, 1) = r2;
    m(5, 1) = C(1) / r2;
    m(1, 2) = -(i * r2);
    m(5, 2) = i / r2;
    m(2, 3) = r1;
    m(4, 3) = C(1) / r1;
    m(2, 4) = -(i * r1);
    m(4, 4) = i / r1;
    m(0, 5) = i * r3;
    m(6, 5) = -(i / r3);
    m(0, 6) = r3;
    m(6, 6) = C(1) / r3;
    for (auto& e : m.v) e = e / s;
    return m;
}

/// Floating-point B; throws on nonpositive h.
DenseMatrix<std::complex<double>> real_form_frame(double h1, double h2);

/// Anti-linear involution Lambda with h3 = h1 h2 / 4.
template <class C>
PseudoVector<C> lambda_involution(const PseudoVector<C>& z, const C& h1, const C& h2) {
    require_dim(z.size(), 7, "lambda_involution");
    const C h3 = h1 * h2 / C(4);
    auto cj = [](const C& v) {
        if constexpr (std::is_same_v<C, CQSqrt2>) return v.conj();
        else return std::conj(v);
    };
    return {h3 * cj(z[6]), h2 * cj(z[5]), h1 * cj(z[4]), cj(z[3]), cj(z[2]) / h1, cj(z[1]) / h2, cj(z[0]) / h3};
}

/// Outcome of the exact algebra self-test; empty failures means success.
struct SelftestReport {
    std::vector<std::string> passed;
    std::vector<std::string> failures;
    bool ok() const { return failures.empty(); }
};

SelftestReport algebra_selftest(unsigned seed, int samples);

}  // namespace todalab
