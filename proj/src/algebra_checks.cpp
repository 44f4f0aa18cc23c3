#include "todalab/algebra_checks.hpp"

namespace todalab {

Rational random_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-20, 20);
    std::uniform_int_distribution<int> den(1, 12);
    Rational r(num(rng), den(rng));
    r.canonicalize();
    return r;
}

PseudoVector<Rational> random_rational_vector(std::mt19937_64& rng, int dim) {
    PseudoVector<Rational> v(dim);
    for (auto& x : v) x = random_rational(rng);
    return v;
}

DenseMatrix<Rational> random_rational_g2_element(std::mt19937_64& rng, int factors) {
    std::uniform_int_distribution<int> pick(0, 13);
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(10, 23);
    DenseMatrix<Rational> g = DenseMatrix<Rational>::identity(7);
    for (int f = 0; f < factors; ++f) {
        std::array<Rational, 14> p;
        p.fill(Rational(0));
        p[pick(rng)] = 1;
        const DenseMatrix<Rational> x = g2_lie_matrix(p);
        const DenseMatrix<Rational> x2 = x * x;
        const DenseMatrix<Rational> x3 = x2 * x;
        // every basis generator satisfies X^3 = -X (compact) or X^3 = X
        const bool compact = (x3 == Rational(-1) * x);
        if (!compact && !(x3 == x)) throw std::logic_error("unexpected g2 generator");
        Rational u(num(rng), den(rng));
        u.canonicalize();
        Rational c, s;
        if (compact) {
            c = (1 - u * u) / (1 + u * u);
            s = 2 * u / (1 + u * u);
        } else {
            c = (1 + u * u) / (1 - u * u);
            s = 2 * u / (1 - u * u);
        }
        const Rational k = compact ? Rational(1 - c) : Rational(c - 1);
        DenseMatrix<Rational> e = DenseMatrix<Rational>::identity(7) + s * x + k * x2;
        g = g * e;
    }
    return g;
}

bool cross_identities_hold(const PseudoVector<Rational>& x, const PseudoVector<Rational>& y,
                           const PseudoVector<Rational>& z) {
    const auto xy = cross(x, y);
    if (inner34(xy, x) != 0) return false;
    if (inner34(xy, z) != inner34(cross(y, z), x)) return false;
    const Rational xx = inner34(x, x), yy = inner34(y, y), xyi = inner34(x, y);
    if (inner34(xy, xy) != xx * yy - xyi * xyi) return false;
    const auto lhs4 = cross(x, xy);
    for (int i = 0; i < 7; ++i)
        if (lhs4[i] != -xx * y[i] + xyi * x[i]) return false;
    if (xx == 0) return true;
    // fifth identity on a pairwise orthogonal triple (y, z projected off x, then z off y)
    PseudoVector<Rational> yp(7), zp(7);
    const Rational cy = inner34(x, y) / xx, cz = inner34(x, z) / xx;
    for (int i = 0; i < 7; ++i) {
        yp[i] = y[i] - cy * x[i];
        zp[i] = z[i] - cz * x[i];
    }
    const Rational ypyp = inner34(yp, yp);
    if (ypyp != 0) {
        const Rational cyz = inner34(yp, zp) / ypyp;
        for (int i = 0; i < 7; ++i) zp[i] -= cyz * yp[i];
    }
    if (inner34(x, yp) != 0 || inner34(x, zp) != 0 || inner34(yp, zp) != 0) return false;
    const auto lhs5 = cross(x, cross(yp, zp));
    const auto rhs5 = cross(yp, cross(x, zp));
    for (int i = 0; i < 7; ++i)
        if (lhs5[i] != -rhs5[i]) return false;
    return true;
}

bool double_cross_expansion_holds(const PseudoVector<Rational>& x, const PseudoVector<Rational>& y,
                                  const PseudoVector<Rational>& z) {
    const auto a = cross(x, cross(y, z));
    const auto b = cross(y, cross(x, z));
    const Rational xy = inner34(x, y), xz = inner34(x, z), yz = inner34(y, z);
    for (int i = 0; i < 7; ++i)
        if (a[i] + b[i] != -2 * xy * z[i] + xz * y[i] + yz * x[i]) return false;
    return true;
}

ThreeForm<Rational> phi_from_cross() {
    ThreeForm<Rational> f;
    for (int i = 0; i < 7; ++i)
        for (int j = i + 1; j < 7; ++j)
            for (int k = j + 1; k < 7; ++k) {
                PseudoVector<Rational> a(7, 0), b(7, 0), c(7, 0);
                a[i] = 1;
                b[j] = 1;
                c[k] = 1;
                f.at(i, j, k) = phi3(a, b, c);
            }
    return f;
}

bool real_form_checks_exact(const QSqrt2& root_h1, const QSqrt2& root_h2) {
    const DenseMatrix<CQSqrt2> b = real_form_frame_from_roots<CQSqrt2>(root_h1, root_h2);
    const CQSqrt2 h1(root_h1 * root_h1), h2(root_h2 * root_h2);
    for (int j = 0; j < 7; ++j) {
        const auto col = b.column(j);
        if (lambda_involution(col, h1, h2) != col) return false;
    }
    DenseMatrix<CQSqrt2> gram = b.transpose() * quadratic_form_q<CQSqrt2>() * b;
    DenseMatrix<CQSqrt2> want(7, 7);
    for (int i = 0; i < 7; ++i) want(i, i) = CQSqrt2(kSig34[i]);
    if (!(gram == want)) return false;
    return pullback(varpi_form<CQSqrt2>(), b) == phi_form<CQSqrt2>();
}

}  // namespace todalab
