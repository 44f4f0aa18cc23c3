#include "todalab/variation.hpp"

#include "todalab/parallel.hpp"

#include <Eigen/SVD>
#include <Eigen/SparseCholesky>
#include <Eigen/QR>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace todalab {

using Mat = Eigen::MatrixXd;

const char* parity_name(Parity p) {
    switch (p) {
        case Parity::Plus: return "plus";
        case Parity::Minus: return "minus";
        default: return "mixed";
    }
}

NormalField NormalField::zero(const DomainGrid& grid, int n, Parity parity) {
    if (n < 2) throw std::invalid_argument("normal field needs n >= 2");
    NormalField f;
    f.grid = grid;
    f.n = n;
    f.parity = parity;
    f.values.assign(grid.points() * f.comps(), 0.0);
    return f;
}

void NormalField::validate() const {
    if (values.size() != grid.points() * comps()) throw std::invalid_argument("normal field: wrong number of values");
    if (!mask.empty() && mask.size() != grid.points()) throw std::invalid_argument("normal field: mask size");
    for (std::size_t p = 0; p < grid.points(); ++p) {
        const double* v = at(p);
        for (int c = 0; c < comps(); ++c) {
            if (v[c] == 0.0) continue;
            if (parity != Parity::Mixed && block_parity(c / 2 + 2) != parity)
                throw std::invalid_argument(std::string("normal field: nonzero block outside the ") +
                                            parity_name(parity) + " part");
            if (!mask.empty() && mask[p] == 0.0)
                throw std::invalid_argument("normal field: nonzero where the mask vanishes");
        }
    }
}

std::vector<double> normal_signs(int n) {
    std::vector<double> s;
    for (int i = 2; i <= n; ++i) {
        const double sign = i % 2 == 1 ? 1.0 : -1.0;
        s.push_back(sign);
        s.push_back(sign);
    }
    return s;
}

namespace {

double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

}  // namespace

std::vector<double> collar_mask(const DomainGrid& grid, double width) {
    std::vector<double> m(grid.points(), 1.0);
    if (grid.mode == DomainMode::Torus) return m;
    const double c = width * grid.L;
    for (int j = 0; j < grid.N; ++j)
        for (int i = 0; i < grid.N; ++i) {
            const int k = std::min({i, j, grid.N - 1 - i, grid.N - 1 - j});
            m[grid.index(i, j)] = smooth_step((k * grid.h() - c) / c);
        }
    return m;
}

NormalField random_bump(const DomainGrid& grid, int n, Parity parity, std::mt19937_64& rng,
                        const std::vector<double>& mask) {
    NormalField f = NormalField::zero(grid, n, parity);
    f.mask = mask;
    const bool torus = grid.mode == DomainMode::Torus;
    const double L = grid.L;
    std::uniform_real_distribution<double> centre(torus ? 0.0 : -0.3 * L, torus ? L : 0.3 * L);
    std::normal_distribution<double> coef;
    const double sigma = 0.12 * L;
    const int c = f.comps();
    for (int k = 0; k < 3; ++k) {
        const double cx = centre(rng), cy = centre(rng);
        std::vector<double> a(c, 0.0);
        for (int q = 0; q < c; ++q)
            if (parity == Parity::Mixed || block_parity(q / 2 + 2) == parity) a[q] = coef(rng);
        for (int j = 0; j < grid.N; ++j)
            for (int i = 0; i < grid.N; ++i) {
                double dx = grid.x(i) - cx, dy = grid.y(j) - cy;
                if (torus) {
                    dx -= L * std::round(dx / L);
                    dy -= L * std::round(dy / L);
                }
                const double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
                double* v = f.at(grid.index(i, j));
                for (int q = 0; q < c; ++q) v[q] += a[q] * g;
            }
    }
    if (!mask.empty())
        for (std::size_t p = 0; p < grid.points(); ++p)
            for (int q = 0; q < c; ++q) f.at(p)[q] *= mask[p];
    return f;
}

int claimed_sign(const NormalField& xi) {
    if (xi.parity == Parity::Plus) return 1;
    if (xi.parity == Parity::Minus) return -1;
    throw std::invalid_argument("second variation sign needs a plus or minus parity tag");
}

namespace {

std::vector<int> parity_indices(int n, Parity parity) {
    std::vector<int> idx;
    for (int i = 2; i <= n; ++i)
        if (block_parity(i) == parity) {
            idx.push_back(u_index(i));
            idx.push_back(v_index(i));
        }
    return idx;
}

Mat select(const Mat& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    Mat out(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(rows[r], cols[c]);
    return out;
}

struct PointNorms {
    double h1 = 0.0;
    std::vector<double> alpha;  // index j for j = 2..n-1
    double plus = 0.0;
    double minus = 0.0;
};

PointNorms point_norms(int n, const std::vector<double>& w, const std::vector<cplx>& alpha) {
    PointNorms r;
    std::vector<double> h(n + 1);
    for (int k = 1; k <= n; ++k) h[k] = std::exp(w[k - 1]);
    r.h1 = h[1];
    r.alpha.assign(n, 0.0);
    for (int j = 2; j <= n - 1; ++j) r.alpha[j] = std::norm(alpha[j - 1]) * h[j] / (h[j - 1] * h[1]);
    r.plus = std::norm(alpha[n - 1]) * h[n] / (h[n - 1] * h[1]);
    r.minus = std::norm(alpha[n]) / (h[n - 1] * h[n] * h[1]);
    return r;
}

}  // namespace

Gamma0Blocks gamma0_blocks_at(int n, const std::vector<double>& w, const std::vector<cplx>& alpha) {
    if (n < 3) throw std::invalid_argument("gamma0_blocks needs n >= 3");
    std::vector<double> zero(n, 0.0);
    Mat ox, oy;
    connection_at(n, w, zero, zero, alpha, ox, oy);
    const auto plus = parity_indices(n, Parity::Plus), minus = parity_indices(n, Parity::Minus);
    Gamma0Blocks b;
    b.plus_x = select(ox, minus, plus);
    b.plus_y = select(oy, minus, plus);
    b.minus_x = select(ox, plus, minus);
    b.minus_y = select(oy, plus, minus);
    return b;
}

Gamma0Blocks gamma0_blocks(const TodaState& state, const CyclicData& data, int i, int j) {
    const std::size_t p = state.grid().index(i, j);
    std::vector<double> w(data.n);
    for (int k = 0; k < data.n; ++k) w[k] = state.w[k].values[p];
    return gamma0_blocks_at(data.n, w, alpha_values_at(data, i, j));
}

TrgEigen trg_eigenvalues_at(int n, const std::vector<double>& w, const std::vector<cplx>& alpha) {
    const Gamma0Blocks b = gamma0_blocks_at(n, w, alpha);
    const PointNorms nm = point_norms(n, w, alpha);
    // m_j = |alpha_j|^2 for 3 <= j <= n-1, m_n = |alpha^+|^2 + |alpha^-|^2
    std::vector<double> m(n + 1, 0.0);
    for (int j = 3; j <= n - 1; ++j) m[j] = nm.alpha[j];
    m[n] = nm.plus + nm.minus;
    TrgEigen out;
    out.analytic.push_back(2.0 * m[3]);
    for (int k = 3; k <= n - 1; ++k) out.analytic.push_back(2.0 * m[k] + 2.0 * m[k + 1]);
    const double a = std::sqrt(nm.plus), c = std::sqrt(nm.minus);
    out.analytic.push_back(2.0 * (a + c) * (a + c));
    out.analytic.push_back(2.0 * (a - c) * (a - c));

    const Mat qp = (b.plus_x.transpose() * b.plus_x + b.plus_y.transpose() * b.plus_y) / nm.h1;
    const Mat qm = (b.plus_x * b.plus_x.transpose() + b.plus_y * b.plus_y.transpose()) / nm.h1;
    for (const Mat* q : {&qp, &qm}) {
        Eigen::SelfAdjointEigenSolver<Mat> es(*q, Eigen::EigenvaluesOnly);
        for (int k = 0; k < es.eigenvalues().size(); ++k) out.numeric.push_back(es.eigenvalues()(k));
    }
    for (double e : out.numeric) {
        double best = std::numeric_limits<double>::infinity();
        for (double v : out.analytic) best = std::min(best, std::abs(e - v));
        out.max_deviation = std::max(out.max_deviation, best);
    }
    return out;
}

TrgEigen trg_eigenvalues(const TodaState& state, const CyclicData& data, int i, int j) {
    const std::size_t p = state.grid().index(i, j);
    std::vector<double> w(data.n);
    for (int k = 0; k < data.n; ++k) w[k] = state.w[k].values[p];
    return trg_eigenvalues_at(data.n, w, alpha_values_at(data, i, j));
}

bool strict_norm_chain_at(int n, const std::vector<double>& w, const std::vector<cplx>& alpha) {
    const PointNorms nm = point_norms(n, w, alpha);
    double prev = 0.5;
    for (int j = 2; j <= n - 1; ++j) {
        if (!(nm.alpha[j] < prev)) return false;
        prev = nm.alpha[j];
    }
    const double last = nm.plus + nm.minus;
    if (!(last < prev)) return false;
    const double a = std::sqrt(nm.plus), c = std::sqrt(nm.minus);
    return 0.5 * (a + c) * (a + c) < last && 0.5 * (a - c) * (a - c) < last;
}

NormalGeometry NormalGeometry::build(const TodaState& state, const CyclicData& data) {
    const int n = data.n;
    const ConnectionForm omega = assemble_omega(state, data, 4);
    NormalGeometry g;
    g.grid = data.grid;
    g.n = n;
    const std::size_t np = data.grid.points();
    const int c = 2 * (n - 1);
    g.normal_x.resize(np);
    g.normal_y.resize(np);
    g.tangent_x.resize(np);
    g.tangent_y.resize(np);
    g.h1.resize(np);
    g.signs = normal_signs(n);
    const int first = u_index(2);
    parallel_for(np, [&](std::size_t p) {
        const Mat ox = omega.x(p), oy = omega.y(p);
        g.normal_x[p] = ox.block(first, first, c, c);
        g.normal_y[p] = oy.block(first, first, c, c);
        g.tangent_x[p] = ox.block(u_index(1), first, 2, c);
        g.tangent_y[p] = oy.block(u_index(1), first, 2, c);
        g.h1[p] = state.h(1, p);
    });
    return g;
}

namespace {

void check_compatible(const NormalField& xi, const NormalGeometry& geom) {
    if (xi.n != geom.n || xi.grid != geom.grid)
        throw std::invalid_argument("normal field does not match the solution grid or n");
    xi.validate();
    if (geom.grid.mode == DomainMode::Disk) {
        const int N = geom.grid.N;
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i) {
                if (i >= 2 && j >= 2 && i <= N - 3 && j <= N - 3) continue;
                const double* v = xi.at(geom.grid.index(i, j));
                for (int q = 0; q < xi.comps(); ++q)
                    if (v[q] != 0.0)
                        throw std::invalid_argument("normal field must vanish within two points of the disk boundary");
            }
    }
}

// Points where the covariant derivative is evaluated.
bool evaluated(const DomainGrid& g, int i, int j) {
    return g.mode == DomainMode::Torus || (i >= 1 && j >= 1 && i <= g.N - 2 && j <= g.N - 2);
}

}  // namespace

double second_variation(const NormalField& xi, const NormalGeometry& geom) {
    check_compatible(xi, geom);
    const DomainGrid& g = geom.grid;
    const int c = xi.comps();
    const double h = g.h();
    auto vec = [&](int i, int j) {
        return Eigen::Map<const Eigen::VectorXd>(xi.at(g.index(g.mode == DomainMode::Torus ? g.wrap(i) : i,
                                                                g.mode == DomainMode::Torus ? g.wrap(j) : j)),
                                                 c);
    };
    const Eigen::Map<const Eigen::VectorXd> s(geom.signs.data(), c);
    std::vector<double> term(g.points(), 0.0);
    parallel_for(g.points(), [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        const Eigen::VectorXd v = vec(i, j);
        double t = 2.0 * geom.h1[p] * v.dot(s.cwiseProduct(v));
        if (evaluated(g, i, j)) {
            const Eigen::VectorXd dx = (vec(i + 1, j) - vec(i - 1, j)) / (2.0 * h) + geom.normal_x[p] * v;
            const Eigen::VectorXd dy = (vec(i, j + 1) - vec(i, j - 1)) / (2.0 * h) + geom.normal_y[p] * v;
            t += dx.dot(s.cwiseProduct(dx)) + dy.dot(s.cwiseProduct(dy));
            t -= (geom.tangent_x[p] * v).squaredNorm() + (geom.tangent_y[p] * v).squaredNorm();
        }
        term[p] = t;
    });
    double sum = 0.0;
    for (double t : term) sum += t;
    return sum * h * h;
}

double second_variation(const NormalField& xi, const TodaState& state, const CyclicData& data) {
    return second_variation(xi, NormalGeometry::build(state, data));
}

Eigen::VectorXd JacobiOperator::pack(const NormalField& xi) const {
    if (xi.n != n || xi.grid != grid) throw std::invalid_argument("normal field does not match the operator");
    const int c = comps();
    Eigen::VectorXd v(points.size() * c);
    std::vector<char> active(grid.points(), 0);
    for (std::size_t a = 0; a < points.size(); ++a) {
        active[points[a]] = 1;
        for (int q = 0; q < c; ++q) v(a * c + q) = xi.at(points[a])[q];
    }
    for (std::size_t p = 0; p < grid.points(); ++p)
        if (!active[p])
            for (int q = 0; q < c; ++q)
                if (xi.at(p)[q] != 0.0) throw std::invalid_argument("normal field is nonzero outside the support");
    return v;
}

NormalField JacobiOperator::unpack(const Eigen::VectorXd& v, Parity parity) const {
    NormalField f = NormalField::zero(grid, n, parity);
    const int c = comps();
    for (std::size_t a = 0; a < points.size(); ++a)
        for (int q = 0; q < c; ++q) f.at(points[a])[q] = v(a * c + q);
    return f;
}

Eigen::VectorXd JacobiOperator::apply(const Eigen::VectorXd& v) const {
    return -(form * v).cwiseQuotient(weight);
}

double JacobiOperator::inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    return a.dot(weight.cwiseProduct(b));
}

JacobiOperator assemble_jacobi(const NormalGeometry& geom, const std::vector<double>& mask) {
    const DomainGrid& g = geom.grid;
    const int n = geom.n, c = 2 * (n - 1), N = g.N;
    const bool torus = g.mode == DomainMode::Torus;
    if (!mask.empty() && mask.size() != g.points()) throw std::invalid_argument("assemble_jacobi: mask size");
    JacobiOperator op;
    op.grid = g;
    op.n = n;
    std::vector<long> slot(g.points(), -1);
    for (std::size_t p = 0; p < g.points(); ++p) {
        if (!mask.empty() && !(mask[p] > 0.0)) continue;
        const int i = static_cast<int>(p % N), j = static_cast<int>(p / N);
        if (!torus && (i < 2 || j < 2 || i > N - 3 || j > N - 3))
            throw std::invalid_argument("assemble_jacobi: support must stay two points inside the disk boundary");
        slot[p] = static_cast<long>(op.points.size());
        op.points.push_back(p);
    }
    const long unknowns = static_cast<long>(op.points.size()) * c;
    const double h = g.h();

    using Triplet = Eigen::Triplet<double>;
    std::vector<Triplet> grad_x, grad_y, tan_x, tan_y;
    std::vector<std::size_t> evals;
    for (std::size_t p = 0; p < g.points(); ++p) {
        const int i = static_cast<int>(p % N), j = static_cast<int>(p / N);
        if (evaluated(g, i, j)) evals.push_back(p);
    }
    auto neighbour = [&](int i, int j) -> long {
        if (torus) return slot[g.index(g.wrap(i), g.wrap(j))];
        return slot[g.index(i, j)];
    };
    for (std::size_t e = 0; e < evals.size(); ++e) {
        const std::size_t p = evals[e];
        const int i = static_cast<int>(p % N), j = static_cast<int>(p / N);
        const long row = static_cast<long>(e) * c;
        auto stencil = [&](std::vector<Triplet>& t, long plus, long minus, const Mat& conn) {
            for (int q = 0; q < c; ++q) {
                if (plus >= 0) t.emplace_back(row + q, plus * c + q, 1.0 / (2.0 * h));
                if (minus >= 0) t.emplace_back(row + q, minus * c + q, -1.0 / (2.0 * h));
            }
            if (slot[p] >= 0)
                for (int r = 0; r < c; ++r)
                    for (int q = 0; q < c; ++q)
                        if (conn(r, q) != 0.0) t.emplace_back(row + r, slot[p] * c + q, conn(r, q));
        };
        stencil(grad_x, neighbour(i + 1, j), neighbour(i - 1, j), geom.normal_x[p]);
        stencil(grad_y, neighbour(i, j + 1), neighbour(i, j - 1), geom.normal_y[p]);
        if (slot[p] >= 0)
            for (int r = 0; r < 2; ++r)
                for (int q = 0; q < c; ++q) {
                    const long tr = static_cast<long>(e) * 2 + r, col = slot[p] * c + q;
                    if (geom.tangent_x[p](r, q) != 0.0) tan_x.emplace_back(tr, col, geom.tangent_x[p](r, q));
                    if (geom.tangent_y[p](r, q) != 0.0) tan_y.emplace_back(tr, col, geom.tangent_y[p](r, q));
                }
    }
    const long rows = static_cast<long>(evals.size()) * c;
    Eigen::SparseMatrix<double> gx(rows, unknowns), gy(rows, unknowns);
    gx.setFromTriplets(grad_x.begin(), grad_x.end());
    gy.setFromTriplets(grad_y.begin(), grad_y.end());
    Eigen::SparseMatrix<double> tx(static_cast<long>(evals.size()) * 2, unknowns), ty(tx.rows(), unknowns);
    tx.setFromTriplets(tan_x.begin(), tan_x.end());
    ty.setFromTriplets(tan_y.begin(), tan_y.end());

    Eigen::VectorXd sign_rows(rows);
    for (long r = 0; r < rows; ++r) sign_rows(r) = geom.signs[r % c];
    const Eigen::SparseMatrix<double> sg = Eigen::VectorXd(sign_rows).asDiagonal() * gx;
    const Eigen::SparseMatrix<double> sgy = Eigen::VectorXd(sign_rows).asDiagonal() * gy;
    Eigen::SparseMatrix<double> form = Eigen::SparseMatrix<double>(gx.transpose()) * sg;
    form += Eigen::SparseMatrix<double>(gy.transpose()) * sgy;
    form -= Eigen::SparseMatrix<double>(tx.transpose()) * tx;
    form -= Eigen::SparseMatrix<double>(ty.transpose()) * ty;

    op.weight.resize(unknowns);
    std::vector<Triplet> curv;
    for (std::size_t a = 0; a < op.points.size(); ++a)
        for (int q = 0; q < c; ++q) {
            const long k = static_cast<long>(a) * c + q;
            op.weight(k) = geom.h1[op.points[a]] * geom.signs[q] * h * h;
            curv.emplace_back(k, k, 2.0 * geom.h1[op.points[a]] * geom.signs[q]);
        }
    Eigen::SparseMatrix<double> curvature(unknowns, unknowns);
    curvature.setFromTriplets(curv.begin(), curv.end());
    form += curvature;
    op.form = h * h * form;
    op.form.makeCompressed();
    return op;
}

NormalField jacobi_apply(const NormalField& xi, const TodaState& state, const CyclicData& data) {
    const NormalGeometry geom = NormalGeometry::build(state, data);
    check_compatible(xi, geom);
    const JacobiOperator op = assemble_jacobi(geom, xi.mask);
    NormalField out = op.unpack(op.apply(op.pack(xi)));
    out.mask = xi.mask;
    return out;
}

double jacobi_min_singular_dense(const JacobiOperator& op) {
    const Mat dense = -(op.weight.cwiseInverse().asDiagonal() * Mat(op.form));
    Eigen::BDCSVD<Mat> svd(dense);
    return svd.singularValues().minCoeff();
}

double jacobi_min_singular_iterative(const JacobiOperator& op, int block, double tol, int max_iter) {
    // L^{-1} = -M^{-1} W and L^{-T} = -W M^{-1}; restarted block Krylov on L^{-T} L^{-1}
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(op.form);
    if (ldlt.info() != Eigen::Success) return 0.0;
    const long n = op.form.rows();
    block = static_cast<int>(std::min<long>(block, n));
    const int depth = static_cast<int>(std::max<long>(1, std::min<long>(8, n / block - 1)));
    auto apply = [&](const Mat& x) -> Mat {
        const Mat a = ldlt.solve(op.weight.asDiagonal() * x);
        return op.weight.asDiagonal() * Mat(ldlt.solve(a));
    };
    auto orthonormal = [](const Mat& x) -> Mat {
        return Eigen::HouseholderQR<Mat>(x).householderQ() * Mat::Identity(x.rows(), x.cols());
    };
    std::mt19937_64 rng(7);
    std::normal_distribution<double> nd;
    Mat q(n, block);
    for (long r = 0; r < n; ++r)
        for (int c = 0; c < block; ++c) q(r, c) = nd(rng);
    q = orthonormal(q);
    const int dim = block * (depth + 1);
    double mu = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Mat v(n, dim), av(n, dim);
        v.leftCols(block) = q;
        for (int k = 0; k <= depth; ++k) {
            const auto cur = v.middleCols(k * block, block);
            av.middleCols(k * block, block) = apply(cur);
            if (k == depth) break;
            Mat z = av.middleCols(k * block, block);
            const auto prev = v.leftCols((k + 1) * block);
            for (int pass = 0; pass < 2; ++pass) z -= prev * (prev.transpose() * z);
            v.middleCols((k + 1) * block, block) = orthonormal(z);
        }
        if (!av.allFinite()) return 0.0;
        const Mat h = v.transpose() * av;
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.transpose()));
        const double next = es.eigenvalues()(dim - 1);
        q = orthonormal(v * es.eigenvectors().rightCols(block));
        const bool done = it > 0 && std::abs(next - mu) <= tol * next;
        mu = next;
        if (done) break;
    }
    return mu > 0.0 ? 1.0 / std::sqrt(mu) : 0.0;
}

double jacobi_min_singular(const JacobiOperator& op) {
    if (op.form.rows() <= 3000) return jacobi_min_singular_dense(op);
    return jacobi_min_singular_iterative(op);
}

double jacobi_min_singular(const TodaState& state, const CyclicData& data, const std::vector<double>& mask) {
    return jacobi_min_singular(assemble_jacobi(NormalGeometry::build(state, data), mask));
}

}  // namespace todalab
