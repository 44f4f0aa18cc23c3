#pragma once

#include "todalab/algebra.hpp"

#include <random>

namespace todalab {

/// Random rational with numerator in [-20, 20] and denominator in [1, 12].
Rational random_rational(std::mt19937_64& rng);

PseudoVector<Rational> random_rational_vector(std::mt19937_64& rng, int dim);

/// Exact G2' element: product of `factors` one-parameter subgroups with
/// rational (Pythagorean) cosine/sine or cosh/sinh pairs.
DenseMatrix<Rational> random_rational_g2_element(std::mt19937_64& rng, int factors);

/// The five cross-product identities on (x, y, z). The fifth is evaluated on
/// the pairwise orthogonal triple obtained by projecting y off x and z off x, y:
/// with only <x,y> = <x,z> = 0 it fails by <y,z> x.
bool cross_identities_hold(const PseudoVector<Rational>& x, const PseudoVector<Rational>& y,
                           const PseudoVector<Rational>& z);

/// x(yz) + y(xz) = -2<x,y>z + <x,z>y + <y,z>x for cross products, all triples.
bool double_cross_expansion_holds(const PseudoVector<Rational>& x, const PseudoVector<Rational>& y,
                                  const PseudoVector<Rational>& z);

/// phi(e_i, e_j, e_k) = <e_i x e_j, e_k> evaluated on all basis triples.
ThreeForm<Rational> phi_from_cross();

/// Lambda-fixedness, Q-Gram and varpi pullback of B for exact sqrt(h1), sqrt(h2).
bool real_form_checks_exact(const QSqrt2& root_h1, const QSqrt2& root_h2);

}  // namespace todalab
