#pragma once

#include "todalab/field.hpp"

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace todalab {

using cplx = std::complex<double>;

/// Complex polynomial sum c_k z^k.
struct Poly {
    std::vector<cplx> coeffs;

    Poly() = default;
    Poly(cplx c) : coeffs{c} {}
    explicit Poly(std::vector<cplx> c) : coeffs(std::move(c)) {}

    cplx operator()(cplx z) const;
    bool is_zero() const;
    bool is_constant() const;
    int degree() const;  // -1 for the zero polynomial
};

/// Effective divisor restricted to the domain; `infinite` marks a section
/// that vanishes identically.
struct Divisor {
    bool infinite = false;
    std::vector<std::pair<cplx, int>> points;

    bool empty() const { return !infinite && points.empty(); }
    int multiplicity_at(cplx z, double tol) const;
};

/// Root multiplicities of p inside the grid's square domain (torus: none).
Divisor divisor_in_domain(const Poly& p, const DomainGrid& grid);

/// Pointwise minimum of two divisors.
Divisor divisor_min(const Divisor& a, const Divisor& b, double tol);

/// a precedes b: at every point of a, a's multiplicity is strictly less than b's.
bool divisor_precedes(const Divisor& a, const Divisor& b, double tol);

std::string describe(const Divisor& d);

/// Holomorphic data of a cyclic Higgs bundle on the grid domain.
struct CyclicData {
    int n = 3;
    cplx alpha1 = cplx(1.0 / std::sqrt(2.0), 0.0);
    std::vector<Poly> alpha;  // alpha_j for j = 2..n-1, stored at j - 2
    Poly alpha_plus;
    Poly alpha_minus;
    DomainGrid grid;
    bool deg_Ln_negative = false;

    const Poly& alpha_j(int j) const { return alpha.at(j - 2); }
    /// Throws std::invalid_argument when the invariants fail.
    void validate() const;
    /// Torus data with constant magnitudes |alpha_2..alpha_{n-1}|, |alpha_n^+|, |alpha_n^-|.
    static CyclicData constant(int n, const DomainGrid& grid, const std::vector<double>& magnitudes);
};

/// Squared moduli at one point, ordered |alpha_1|^2, ..., |alpha_{n-1}|^2, |alpha_n^+|^2, |alpha_n^-|^2.
std::vector<double> alpha_squares_at(const CyclicData& data, int i, int j);

/// The same quantities as fields: entry k is the k-th coefficient above.
std::vector<ScalarField> alpha_square_fields(const CyclicData& data);

/// Complex values alpha_1, ..., alpha_{n-1}, alpha_n^+, alpha_n^- at a point.
std::vector<cplx> alpha_values_at(const CyclicData& data, int i, int j);

/// Data with alpha_n^+ and alpha_n^- exchanged.
CyclicData swap_alpha_n(const CyclicData& data);

}  // namespace todalab
