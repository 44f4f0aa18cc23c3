#pragma once

#include "todalab/frame.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <random>
#include <vector>

namespace todalab {

/// Plus: L_3 + L_5 + ... (spacelike). Minus: L_2 + L_4 + ... (timelike).
enum class Parity { Plus, Minus, Mixed };

const char* parity_name(Parity p);

/// Parity of the line L_i, i >= 2.
inline Parity block_parity(int i) { return i % 2 == 1 ? Parity::Plus : Parity::Minus; }

/// Section of L_2 + ... + L_n by its coefficients in the (u_i, v_i) frames:
/// 2(n-1) values per point in the order (u_2, v_2, ..., u_n, v_n).
struct NormalField {
    DomainGrid grid;
    int n = 0;
    Parity parity = Parity::Mixed;
    std::vector<double> values;
    std::vector<double> mask;  // empty: no support restriction

    int comps() const { return 2 * (n - 1); }
    double* at(std::size_t p) { return values.data() + p * comps(); }
    const double* at(std::size_t p) const { return values.data() + p * comps(); }

    static NormalField zero(const DomainGrid& grid, int n, Parity parity);
    /// Throws if a block of the wrong parity is nonzero or the field is
    /// nonzero where the mask vanishes.
    void validate() const;
};

/// +1 on spacelike components, -1 on timelike ones.
std::vector<double> normal_signs(int n);

/// Smooth cutoff on the disk: zero within width * L of the boundary, one at
/// distance 2 * width * L and beyond. On the torus all ones.
std::vector<double> collar_mask(const DomainGrid& grid, double width = 0.1);

/// Sum of three Gaussian bumps with random centres and coefficients on the
/// blocks of the given parity, multiplied by the mask.
NormalField random_bump(const DomainGrid& grid, int n, Parity parity, std::mt19937_64& rng,
                        const std::vector<double>& mask);

/// The sign the second variation must have: +1 on Plus, -1 on Minus.
int claimed_sign(const NormalField& xi);

struct Gamma0Blocks {
    Eigen::MatrixXd plus_x, plus_y;    // N+ -> N-: rows (L_2, L_4, ...), columns (L_3, L_5, ...)
    Eigen::MatrixXd minus_x, minus_y;  // transposes
};

/// Off-parity part of the normal connection at one point (n >= 3).
Gamma0Blocks gamma0_blocks(const TodaState& state, const CyclicData& data, int i, int j);
Gamma0Blocks gamma0_blocks_at(int n, const std::vector<double>& w, const std::vector<cplx>& alpha);

struct TrgEigen {
    std::vector<double> analytic;  // the list 2|a_3|^2, 2|a_3|^2 + 2|a_4|^2, ..., 2(|a^+| +- |a^-|)^2
    std::vector<double> numeric;   // eigenvalues of the N+ form, then of the N- form
    double max_deviation = 0.0;    // largest distance of a numeric eigenvalue to the list
};

/// Eigenvalues of the g-traced quadratic forms -Tr<G0+ xi, G0+ xi> on N+ and
/// Tr<G0- xi, G0- xi> on N-, against the closed list.
TrgEigen trg_eigenvalues_at(int n, const std::vector<double>& w, const std::vector<cplx>& alpha);
TrgEigen trg_eigenvalues(const TodaState& state, const CyclicData& data, int i, int j);

/// 1/2 > |a_2|^2 > ... > |a_{n-1}|^2 > |a^+|^2 + |a^-|^2 > (|a^+| +- |a^-|)^2 / 2.
bool strict_norm_chain_at(int n, const std::vector<double>& w, const std::vector<cplx>& alpha);

/// Per-point pieces of the normal geometry of a solution.
struct NormalGeometry {
    DomainGrid grid;
    int n = 0;
    std::vector<Eigen::MatrixXd> normal_x, normal_y;    // normal-normal blocks of Omega
    std::vector<Eigen::MatrixXd> tangent_x, tangent_y;  // (u_1, v_1) rows against the normal columns
    std::vector<double> h1;
    std::vector<double> signs;

    static NormalGeometry build(const TodaState& state, const CyclicData& data);
};

/// Discrete second variation of area: sum over points of
/// sum_a [<D_a xi, D_a xi> - |S_xi(d_a)|^2] + 2 h_1 <xi, xi>, times the cell
/// area, with D_a xi = central difference + normal connection.
double second_variation(const NormalField& xi, const NormalGeometry& geom);
double second_variation(const NormalField& xi, const TodaState& state, const CyclicData& data);

/// Jacobi operator L = -W^{-1} M on the unknowns inside the support, where
/// M is the matrix of the second variation and W the diagonal of
/// <xi, eta> h_1 dx dy.
struct JacobiOperator {
    DomainGrid grid;
    int n = 0;
    std::vector<std::size_t> points;  // active grid points
    Eigen::SparseMatrix<double> form;
    Eigen::VectorXd weight;

    int comps() const { return 2 * (n - 1); }
    Eigen::VectorXd pack(const NormalField& xi) const;
    NormalField unpack(const Eigen::VectorXd& v, Parity parity = Parity::Mixed) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    /// Sum of <a, b> h_1 dx dy.
    double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
};

/// Active points: mask > 0 (all points when the mask is empty).
JacobiOperator assemble_jacobi(const NormalGeometry& geom, const std::vector<double>& mask);

NormalField jacobi_apply(const NormalField& xi, const TodaState& state, const CyclicData& data);

/// Smallest singular value of L: a dense SVD up to 3000 unknowns, subspace
/// Krylov iteration on (L^T L)^{-1} beyond.
double jacobi_min_singular(const JacobiOperator& op);
double jacobi_min_singular_dense(const JacobiOperator& op);
/// Restarted block Krylov; 0 when L is numerically singular.
double jacobi_min_singular_iterative(const JacobiOperator& op, int block = 4, double tol = 1e-10, int max_iter = 100);
double jacobi_min_singular(const TodaState& state, const CyclicData& data, const std::vector<double>& mask);

}  // namespace todalab
