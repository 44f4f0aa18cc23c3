#include "todalab/cyclic.hpp"
#include "todalab/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <sstream>
#include <stdexcept>

namespace todalab {

cplx Poly::operator()(cplx z) const {
    cplx r = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * z + *it;
    return r;
}

bool Poly::is_zero() const {
    for (const auto& c : coeffs)
        if (c != cplx(0.0)) return false;
    return true;
}

int Poly::degree() const {
    for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k)
        if (coeffs[k] != cplx(0.0)) return k;
    return -1;
}

bool Poly::is_constant() const { return degree() <= 0; }

int Divisor::multiplicity_at(cplx z, double tol) const {
    int m = 0;
    for (const auto& [p, k] : points)
        if (std::abs(p - z) <= tol) m += k;
    return m;
}

Divisor divisor_in_domain(const Poly& p, const DomainGrid& grid) {
    Divisor d;
    if (p.is_zero()) {
        d.infinite = true;
        return d;
    }
    const int deg = p.degree();
    int low = 0;
    while (p.coeffs[low] == cplx(0.0)) ++low;
    std::vector<cplx> roots;
    const int m = deg - low;
    if (m > 0) {
        // companion matrix of the monic factor without the z^low part
        Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(m, m);
        const cplx lead = p.coeffs[deg];
        for (int k = 0; k < m; ++k) comp(0, k) = -p.coeffs[deg - 1 - k] / lead;
        for (int k = 1; k < m; ++k) comp(k, k - 1) = 1.0;
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
        for (int k = 0; k < m; ++k) roots.push_back(es.eigenvalues()(k));
    }
    std::vector<std::pair<cplx, int>> clusters;
    if (low > 0) clusters.emplace_back(cplx(0.0), low);
    std::vector<bool> used(roots.size(), false);
    for (std::size_t a = 0; a < roots.size(); ++a) {
        if (used[a]) continue;
        cplx sum = roots[a];
        int count = 1;
        used[a] = true;
        for (std::size_t b = a + 1; b < roots.size(); ++b) {
            if (!used[b] && std::abs(roots[b] - roots[a]) <= 1e-4 * std::max(1.0, std::abs(roots[a]))) {
                used[b] = true;
                sum += roots[b];
                ++count;
            }
        }
        clusters.emplace_back(sum / static_cast<double>(count), count);
    }
    if (grid.mode == DomainMode::Torus) return d;
    const double half = 0.5 * grid.L + 1e-12;
    for (const auto& c : clusters)
        if (std::abs(c.first.real()) <= half && std::abs(c.first.imag()) <= half) d.points.push_back(c);
    return d;
}

Divisor divisor_min(const Divisor& a, const Divisor& b, double tol) {
    if (a.infinite) return b;
    if (b.infinite) return a;
    Divisor out;
    for (const auto& [z, m] : a.points) {
        const int mb = b.multiplicity_at(z, tol);
        if (mb > 0) out.points.emplace_back(z, std::min(m, mb));
    }
    return out;
}

bool divisor_precedes(const Divisor& a, const Divisor& b, double tol) {
    if (a.infinite) return false;
    if (b.infinite) return true;
    for (const auto& [z, m] : a.points)
        if (!(m < b.multiplicity_at(z, tol))) return false;
    return true;
}

std::string describe(const Divisor& d) {
    if (d.infinite) return "+inf";
    if (d.points.empty()) return "{}";
    std::ostringstream os;
    os << "{";
    for (std::size_t k = 0; k < d.points.size(); ++k) {
        if (k) os << ", ";
        os << "(" << d.points[k].first.real() << "," << d.points[k].first.imag() << "):" << d.points[k].second;
    }
    os << "}";
    return os.str();
}

void CyclicData::validate() const {
    if (n < 2) throw std::invalid_argument("CyclicData: n must be >= 2");
    if (static_cast<int>(alpha.size()) != n - 2)
        throw std::invalid_argument("CyclicData: expected " + std::to_string(n - 2) + " entries alpha_2..alpha_{n-1}");
    if (grid.N < 8) throw std::invalid_argument("CyclicData: grid not initialized");
    for (int j = 2; j <= n - 1; ++j)
        if (alpha_j(j).is_zero())
            throw std::invalid_argument("CyclicData: alpha_" + std::to_string(j) + " must not vanish identically");
    if (alpha_plus.is_zero()) throw std::invalid_argument("CyclicData: alpha_n^+ must not vanish identically");
    if (alpha1 == cplx(0.0)) throw std::invalid_argument("CyclicData: alpha_1 must be nonzero");
    if (grid.mode == DomainMode::Torus) {
        bool constant = alpha_plus.is_constant() && alpha_minus.is_constant();
        for (const auto& a : alpha) constant = constant && a.is_constant();
        if (!constant) throw std::invalid_argument("CyclicData: torus mode requires constant alpha's");
    }
}

CyclicData CyclicData::constant(int n, const DomainGrid& grid, const std::vector<double>& magnitudes) {
    if (static_cast<int>(magnitudes.size()) != n)
        throw std::invalid_argument("CyclicData::constant: expected n magnitudes");
    CyclicData d;
    d.n = n;
    d.grid = grid;
    for (int j = 2; j <= n - 1; ++j) d.alpha.emplace_back(cplx(magnitudes[j - 2]));
    d.alpha_plus = Poly(cplx(magnitudes[n - 2]));
    d.alpha_minus = Poly(cplx(magnitudes[n - 1]));
    d.validate();
    return d;
}

std::vector<cplx> alpha_values_at(const CyclicData& data, int i, int j) {
    const cplx z = data.grid.z(i, j);
    std::vector<cplx> v;
    v.reserve(data.n + 1);
    v.push_back(data.alpha1);
    for (const auto& a : data.alpha) v.push_back(a(z));
    v.push_back(data.alpha_plus(z));
    v.push_back(data.alpha_minus(z));
    return v;
}

std::vector<double> alpha_squares_at(const CyclicData& data, int i, int j) {
    const auto v = alpha_values_at(data, i, j);
    std::vector<double> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::norm(v[k]);
    return out;
}

std::vector<ScalarField> alpha_square_fields(const CyclicData& data) {
    std::vector<ScalarField> out(data.n + 1, ScalarField(data.grid));
    const DomainGrid& g = data.grid;
    parallel_for(g.points(), [&](std::size_t p) {
        const auto a = alpha_squares_at(data, static_cast<int>(p % g.N), static_cast<int>(p / g.N));
        for (std::size_t k = 0; k < a.size(); ++k) out[k].values[p] = a[k];
    });
    return out;
}

CyclicData swap_alpha_n(const CyclicData& data) {
    CyclicData s = data;
    std::swap(s.alpha_plus, s.alpha_minus);
    return s;
}

}  // namespace todalab
