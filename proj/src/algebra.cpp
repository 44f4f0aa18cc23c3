#include "todalab/algebra.hpp"
#include "todalab/algebra_checks.hpp"

#include <random>

namespace todalab {

SignatureSpec SignatureSpec::make(int n) {
    if (n < 2) throw std::invalid_argument("SignatureSpec: n must be >= 2");
    SignatureSpec s;
    s.n = n;
    s.ambient_signs.assign(2 * n + 1, -1);
    for (int i = 1; i <= n; ++i) {
        const int sg = (i % 2 == 1) ? 1 : -1;
        s.ambient_signs[2 * i - 1] = sg;
        s.ambient_signs[2 * i] = sg;
    }
    int pos = 0;
    for (int v : s.ambient_signs) pos += (v > 0);
    s.p = pos;
    s.q = 2 * n + 1 - pos - 1;
    return s;
}

DenseMatrix<std::complex<double>> real_form_frame(double h1, double h2) {
    if (!(h1 > 0.0) || !(h2 > 0.0)) throw std::invalid_argument("real_form_frame: h1 and h2 must be positive");
    return real_form_frame_from_roots<std::complex<double>>(std::sqrt(h1), std::sqrt(h2));
}

namespace {

void record(SelftestReport& rep, bool ok, const std::string& name) {
    (ok ? rep.passed : rep.failures).push_back(name);
}

}  // namespace

SelftestReport algebra_selftest(unsigned seed, int samples) {
    SelftestReport rep;
    std::mt19937_64 rng(seed);

    bool lemma_ok = true;
    for (int t = 0; t < samples && lemma_ok; ++t) {
        auto x = random_rational_vector(rng, 7);
        auto y = random_rational_vector(rng, 7);
        auto z = random_rational_vector(rng, 7);
        lemma_ok = cross_identities_hold(x, y, z);
    }
    record(rep, lemma_ok, "cross-product identities on random rational triples");

    record(rep, phi_form<Rational>() == phi_from_cross(), "phi coefficients from the cross product");

    bool phi3_ok = true;
    for (int t = 0; t < samples && phi3_ok; ++t) {
        auto x = random_rational_vector(rng, 7);
        auto y = random_rational_vector(rng, 7);
        auto z = random_rational_vector(rng, 7);
        phi3_ok = phi3(x, y, z) == phi_form<Rational>().eval(x, y, z);
    }
    record(rep, phi3_ok, "phi3 agrees with the stored 3-form");

    bool completion_ok = true;
    const auto g34 = [] {
        DenseMatrix<Rational> g(7, 7);
        for (int i = 0; i < 7; ++i) g(i, i) = kSig34[i];
        return g;
    }();
    for (int t = 0; t < std::min(samples, 100) && completion_ok; ++t) {
        DenseMatrix<Rational> g = random_rational_g2_element(rng, 3);
        DenseMatrix<Rational> m = complete_g2_basis(g.column(0), g.column(1), g.column(3));
        completion_ok = (m == g) && (m.transpose() * g34 * m == g34) &&
                        (pullback(phi_form<Rational>(), m) == phi_form<Rational>());
    }
    record(rep, completion_ok, "G2' basis completion preserves phi and the metric");

    const auto tri = principal_sl2<QSqrt2>();
    const bool sl2_ok = commutator(tri.a, tri.e) == tri.e &&
                        commutator(tri.a, tri.e_tilde) == QSqrt2(-1) * tri.e_tilde &&
                        commutator(tri.e, tri.e_tilde) == tri.a;
    record(rep, sl2_ok, "principal sl2 relations");

    bool pattern_ok = true;
    for (const auto* m : {&tri.e_tilde, &tri.a, &tri.e}) {
        DenseMatrix<CQSqrt2> c(7, 7);
        for (size_t k = 0; k < m->v.size(); ++k) c.v[k] = CQSqrt2(m->v[k]);
        const auto match = g2c_pattern(c);
        bool inv_zero = false;
        invariance_residual(c, varpi_form<CQSqrt2>(), &inv_zero);
        pattern_ok = pattern_ok && match.member && inv_zero;
    }
    record(rep, pattern_ok, "sl2 triple lies in the complex g2 pattern");

    bool b_ok = true;
    const std::array<std::pair<QSqrt2, QSqrt2>, 3> roots = {
        std::pair{QSqrt2(1), QSqrt2(1)}, std::pair{QSqrt2::sqrt2(), QSqrt2::sqrt2()}, std::pair{QSqrt2(2), QSqrt2(1)}};
    for (const auto& [r1, r2] : roots) {
        b_ok = b_ok && real_form_checks_exact(r1, r2);
    }
    record(rep, b_ok, "real-form frame maps varpi to phi and is Lambda-fixed");
    return rep;
}

}  // namespace todalab
