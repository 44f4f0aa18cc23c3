#pragma once

#include "todalab/cyclic.hpp"
#include "todalab/field.hpp"

#include <Eigen/Sparse>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace todalab {

/// Metric logarithms w_i = log h_i, i = 1..n, stored at index i - 1.
struct TodaState {
    std::vector<ScalarField> w;

    int n() const { return static_cast<int>(w.size()); }
    const DomainGrid& grid() const { return w.at(0).grid; }
    double h(int i, std::size_t p) const;  // 1-based i

    static TodaState constant(const DomainGrid& grid, const std::vector<double>& h);
};

/// Right-hand sides of the Toda system at one point, from the logs w[0..n-1]
/// and the squared moduli in alpha_squares_at order.
std::vector<double> toda_rhs(const std::vector<double>& w, const std::vector<double>& alpha_sq);

/// Exponential terms E_1 (= |alpha_1|^2 h_1), E_2..E_{n-1}, E^+, E^- at one point.
std::vector<double> toda_edge_terms(const std::vector<double>& w, const std::vector<double>& alpha_sq);

/// r_k = d^2/dzdzbar w_k - RHS_k; zero on the disk boundary ring.
std::vector<ScalarField> toda_residual(const TodaState& state, const CyclicData& data);

/// Largest |r_k| over all components and points.
double max_residual(const std::vector<ScalarField>& r);

/// Constant h_1..h_n solving RHS = 0 for constant moduli
/// (|alpha_2|, .., |alpha_{n-1}|, |alpha_n^+|, |alpha_n^-|) and |alpha_1|.
std::vector<double> constant_solution(int n, const std::vector<double>& magnitudes,
                                      double alpha1_abs = 1.0 / std::sqrt(2.0));

/// Sparse derivative of the stacked residual (unknown p*n + k) with respect to w.
/// Disk boundary rows are identity rows.
Eigen::SparseMatrix<double> toda_jacobian(const TodaState& state, const CyclicData& data);

/// Stacked residual with the same layout as toda_jacobian; disk boundary
/// entries hold w - boundary.
Eigen::VectorXd stacked_residual(const TodaState& state, const CyclicData& data, const TodaState* boundary);

struct SolverOptions {
    double tol = 1e-10;
    int max_iter = 50;
    double damping = 1.0;
};

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;
    bool converged = false;
};

struct SolveResult {
    TodaState state;
    SolveReport report;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, SolveReport r) : std::runtime_error(what), report(std::move(r)) {}
    SolveReport report;
};

/// Torus: the constant solution. Disk: the pointwise constant solution of the
/// local moduli (floored at 1e-2 in the interior); throws if an alpha vanishes
/// on the boundary.
TodaState default_initial_state(const CyclicData& data);

/// Damped Newton with Armijo backtracking. Disk boundary values are kept from
/// the initial state. Throws SolverError on stagnation or when max_iter runs out.
SolveResult solve_toda(const CyclicData& data, const std::optional<TodaState>& init = std::nullopt,
                       const SolverOptions& opts = {});

/// Norm fields ||alpha_j||^2 (j = 2..n-1 at j - 2), ||alpha_n^+||^2, ||alpha_n^-||^2.
struct NormFields {
    std::vector<ScalarField> alpha;
    ScalarField plus;
    ScalarField minus;
};

NormFields norms(const TodaState& state, const CyclicData& data);

/// Hypothesis chains 1/2 - ||a_2||^2, ||a_k||^2 - ||a_{k+1}||^2, ||a_{n-1}||^2 - ||a^+||^2 - ||a^-||^2.
struct StarReport {
    std::vector<ScalarField> chains;
    std::vector<double> min_values;
    std::vector<double> positive_fraction;
    bool holds = false;
    bool borderline = false;
};

/// Evaluated over the torus or the disk interior. A point counts as positive
/// when the chain exceeds tol.
StarReport check_star(const TodaState& state, const CyclicData& data, double tol = 1e-10, double tol_frac = 0.01);

struct DivisorPair {
    std::string lhs;
    std::string rhs;
    Divisor lhs_divisor;
    Divisor rhs_divisor;
    bool precedes = false;
};

struct DivisorChainReport {
    bool holds = false;
    std::vector<DivisorPair> pairs;
};

/// (alpha_2) < ... < (alpha_{n-1}) < min{(alpha_n^+), (alpha_n^-)}.
DivisorChainReport check_divisor_chain(const CyclicData& data, double tol = 1e-6);

/// (alpha_n^+, w_n) <-> (alpha_n^-, -w_n); the residual becomes (r_1, .., r_{n-1}, -r_n).
std::pair<TodaState, CyclicData> hidden_symmetry(const TodaState& state, const CyclicData& data);

}  // namespace todalab
