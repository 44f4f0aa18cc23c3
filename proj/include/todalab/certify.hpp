#pragma once

#include "todalab/exact.hpp"
#include "todalab/toda.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace todalab {

/// Maxima A_2..A_n (A_k at index k - 2).
struct MaxTuple {
    int n = 2;
    std::vector<double> A;

    double a(int k) const { return A.at(k - 2); }
    /// B_k = (1 - 1/A_k) - (A_{k-1} - 1) for 3 <= k <= n, at index k - 3.
    std::vector<double> B() const;
    void validate() const;
};

/// Left-hand sides of the maximum-principle inequalities (<= 0 when satisfied):
/// n = 2: A_2 - 1; n >= 3: 2(A_2 - 1) - (1 - 1/A_3), then for 3 <= k <= n
/// -A_k(A_{k-1} - 1) + 2(A_k - 1) - (1 - 1/A_{k+1}), the last term dropped at k = n.
template <class S>
std::vector<S> inequality_residuals_of(int n, const std::vector<S>& A) {
    if (n < 2 || static_cast<int>(A.size()) != n - 1)
        throw std::invalid_argument("inequality_residuals: expected A_2..A_n");
    for (const auto& a : A)
        if (!(a > S(0))) throw std::invalid_argument("inequality_residuals: A_k must be positive");
    const S one(1), two(2);
    auto at = [&](int k) -> const S& { return A[k - 2]; };
    std::vector<S> r;
    if (n == 2) {
        r.push_back(S(at(2) - one));
        return r;
    }
    r.push_back(S(two * (at(2) - one) - (one - one / at(3))));
    for (int k = 3; k <= n; ++k) {
        S v = S(-at(k) * (at(k - 1) - one) + two * (at(k) - one));
        if (k < n) v -= S(one - one / at(k + 1));
        r.push_back(v);
    }
    return r;
}

/// The same system through B_k: A_2 - 1 - B_3, A_k B_k - B_{k+1}, A_n B_n + (A_n - 1).
template <class S>
std::vector<S> b_form_residuals(int n, const std::vector<S>& A) {
    if (n < 3 || static_cast<int>(A.size()) != n - 1) throw std::invalid_argument("b_form_residuals: needs n >= 3");
    const S one(1);
    auto at = [&](int k) -> const S& { return A[k - 2]; };
    auto b = [&](int k) { return S((one - one / at(k)) - (at(k - 1) - one)); };
    std::vector<S> r;
    r.push_back(S(at(2) - one - b(3)));
    for (int k = 3; k <= n - 1; ++k) r.push_back(S(at(k) * b(k) - b(k + 1)));
    r.push_back(S(at(n) * b(n) + (at(n) - one)));
    return r;
}

/// (1 - 1/A_n) - [B_n + A_{n-1} B_{n-1} + ... + A_{n-1}..A_3 B_3 + A_{n-1}..A_3 (A_2 - 1)].
template <class S>
S telescoping_defect(int n, const std::vector<S>& A) {
    if (n < 3 || static_cast<int>(A.size()) != n - 1) throw std::invalid_argument("telescoping_defect: needs n >= 3");
    const S one(1);
    auto at = [&](int k) -> const S& { return A[k - 2]; };
    auto b = [&](int k) { return S((one - one / at(k)) - (at(k - 1) - one)); };
    S sum(0), prod(1);
    for (int k = n; k >= 3; --k) {
        sum += S(prod * b(k));
        if (k > 3) prod *= at(k - 1);
    }
    sum += S(prod * (at(2) - one));
    return S((one - one / at(n)) - sum);
}

std::vector<double> inequality_residuals(const MaxTuple& t);

struct DichotomyReport {
    int n = 0;
    double a_max = 0.0;
    double step = 0.0;
    double eps = 0.0;
    std::size_t axis_points = 0;
    std::uint64_t grid_tuples = 0;
    std::uint64_t feasible = 0;
    bool unit_feasible = false;
    std::uint64_t counterexample_count = 0;
    std::vector<std::vector<double>> counterexamples;  // at most 100 listed
    double max_feasible_a = 0.0;    // largest A_k over feasible tuples
    double below_one_margin = 0.0;  // 1 - largest A_k over feasible tuples other than (1, .., 1)
    std::vector<double> closest_tuple;
    double delta = 0.0;          // largest |A_k - 1| over feasible tuples with some A_k within eps of 1
    double delta_allowed = 0.0;  // half the finest grid spacing
    std::uint64_t exact_failures = 0;  // feasible in floating point, not in rationals
};

/// Exhaustive grid over (0, a_max]^{n-1}: multiples of step, refined tenfold
/// on [0.9, 1.1]. A feasible tuple (all residuals <= eps) is a
/// counterexample when some A_k exceeds 1 + eps, or when some A_k lies within
/// eps of 1 and another is off the node 1. Feasible tuples are re-checked in
/// rational arithmetic. 10 / step must be an integer.
DichotomyReport dichotomy_scan(int n, double a_max, double step, double eps = 1e-9);

struct RatioMaximum {
    std::string name;  // "A_2", ...
    double value = 0.0;
    int i = 0;
    int j = 0;
    double laplacian = 0.0;  // discrete d^2/dzdzbar of the log ratio at the maximizer
    double predicted = 0.0;  // the same quantity from the Toda system, scaled as in the inequality
    bool interior = true;    // not next to the disk boundary ring
    bool at_zero = false;    // the denominator section vanishes at the maximizer
    bool mp_holds = true;    // predicted <= tol
};

struct FieldMaxima {
    int n = 0;
    std::vector<RatioMaximum> ratios;
    MaxTuple tuple;
    std::vector<double> residuals;
    double a2_prime = 0.0;  // max of the single ratio |alpha^+| / |alpha_{n-1}| form
    bool spot_checks_pass = true;
};

/// Ratio maxima of a Toda solution in the relabeled system (the first line
/// bundle taken last, h_0 = 1). Disk maxima skip the boundary ring and
/// points where the denominator vanishes.
FieldMaxima field_maxima(const TodaState& state, const CyclicData& data, double tol = 1e-6);

}  // namespace todalab
