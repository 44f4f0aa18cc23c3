#include "todalab/frame.hpp"
#include "todalab/parallel.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace todalab {

using Mat = Eigen::MatrixXd;

Mat signature_matrix(int n) {
    const auto spec = SignatureSpec::make(n);
    Mat g = Mat::Zero(spec.dim(), spec.dim());
    for (int k = 0; k < spec.dim(); ++k) g(k, k) = spec.ambient_signs[k];
    return g;
}

namespace {

void put_block(Mat& m, int row_block, int col_block, const Eigen::Matrix2d& b) {
    const int r = u_index(row_block), c = u_index(col_block);
    m.block<2, 2>(r, c) = b;
    m.block<2, 2>(c, r) = b.transpose();
}

// dx and dy components of the real matrix of alpha dz: [[Re, -Im], [Im, Re]]
std::pair<Eigen::Matrix2d, Eigen::Matrix2d> rotation_blocks(cplx a, double s) {
    const double re = a.real(), im = a.imag();
    Eigen::Matrix2d bx, by;
    bx << re, -im, im, re;
    by << -im, -re, re, -im;
    return {s * bx, s * by};
}

// [[Re, -Im], [-Im, -Re]] of alpha dz
std::pair<Eigen::Matrix2d, Eigen::Matrix2d> reflection_blocks(cplx a, double s) {
    const double re = a.real(), im = a.imag();
    Eigen::Matrix2d bx, by;
    bx << re, -im, -im, -re;
    by << -im, -re, -re, im;
    return {s * bx, s * by};
}

}  // namespace

void connection_at(int n, const std::vector<double>& w, const std::vector<double>& dw_dx,
                   const std::vector<double>& dw_dy, const std::vector<cplx>& alpha, Mat& ox,
                   Mat& oy) {
    const int d = 2 * n + 1;
    ox = Mat::Zero(d, d);
    oy = Mat::Zero(d, d);
    const double sq = std::exp(0.5 * w[0]);
    ox(u_index(1), 0) = ox(0, u_index(1)) = sq;
    oy(v_index(1), 0) = oy(0, v_index(1)) = sq;
    for (int i = 1; i <= n; ++i) {
        // Omega_i = [[0, omega_i], [-omega_i, 0]] with omega_i = d^c w_i / 2
        const double wx = 0.5 * dw_dy[i - 1], wy = -0.5 * dw_dx[i - 1];
        ox(u_index(i), v_index(i)) = wx;
        ox(v_index(i), u_index(i)) = -wx;
        oy(u_index(i), v_index(i)) = wy;
        oy(v_index(i), u_index(i)) = -wy;
    }
    for (int j = 2; j <= n - 1; ++j) {
        const auto [bx, by] = rotation_blocks(alpha[j - 1], std::exp(0.5 * (w[j - 1] - w[j - 2])));
        put_block(ox, j, j - 1, bx);
        put_block(oy, j, j - 1, by);
    }
    const auto [px, py] = rotation_blocks(alpha[n - 1], std::exp(0.5 * (w[n - 1] - w[n - 2])));
    const auto [mx, my] = reflection_blocks(alpha[n], std::exp(-0.5 * (w[n - 1] + w[n - 2])));
    put_block(ox, n, n - 1, px + mx);
    put_block(oy, n, n - 1, py + my);
}

ConnectionForm assemble_omega(const TodaState& state, const CyclicData& data, int order) {
    if (data.n < 2) throw std::invalid_argument("assemble_omega needs n >= 2");
    if (state.n() != data.n) throw std::invalid_argument("assemble_omega: state and data disagree on n");
    for (const auto& f : state.w) require_same_grid(f.grid, data.grid, "assemble_omega");
    if (std::abs(std::norm(data.alpha1) - 0.5) > 1e-14)
        throw std::invalid_argument("assemble_omega: the frame needs |alpha_1|^2 = 1/2");
    const int n = data.n;
    const DomainGrid& g = data.grid;
    ConnectionForm out(g, 2 * n + 1);
    parallel_for(g.points(), [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        std::vector<double> w(n), dx(n), dy(n);
        for (int k = 0; k < n; ++k) {
            w[k] = state.w[k].values[p];
            dx[k] = diff(state.w[k], i, j, Axis::X, order);
            dy[k] = diff(state.w[k], i, j, Axis::Y, order);
        }
        Mat ox, oy;
        connection_at(n, w, dx, dy, alpha_values_at(data, i, j), ox, oy);
        out.x(p) = ox;
        out.y(p) = oy;
    });
    return out;
}

double so_defect(const ConnectionForm& omega) {
    const int n = (omega.d - 1) / 2;
    const Mat g = signature_matrix(n);
    double m = 0.0;
    for (std::size_t p = 0; p < omega.grid.points(); ++p) {
        const Mat x = omega.x(p), y = omega.y(p);
        m = std::max(m, (x.transpose() * g + g * x).cwiseAbs().maxCoeff());
        m = std::max(m, (y.transpose() * g + g * y).cwiseAbs().maxCoeff());
    }
    return m;
}

GaussCodazziReport gauss_codazzi_residual(const ConnectionForm& omega) {
    GaussCodazziReport rep;
    rep.curvature = plaquette_curvature(omega);
    const int d = omega.d;
    for (std::size_t k = 0; k < rep.curvature.count(); ++k) {
        const auto c = rep.curvature.at(k);
        for (int r = 0; r < d; ++r)
            for (int s = 0; s < d; ++s) {
                const double v = std::abs(c(r, s));
                rep.max_total = std::max(rep.max_total, v);
                const int dist = std::abs(block_of(r) - block_of(s));
                if (dist == 0) rep.max_diagonal = std::max(rep.max_diagonal, v);
                else if (dist == 1) rep.max_first_off = std::max(rep.max_first_off, v);
                else if (dist == 2) rep.max_second_off = std::max(rep.max_second_off, v);
            }
    }
    return rep;
}

Mat rk4_step(const Mat& p, const Mat& a, const Mat& b, double h) {
    const Mat m = 0.5 * (a + b);
    const Mat k1 = p * a;
    const Mat k2 = (p + 0.5 * h * k1) * m;
    const Mat k3 = (p + 0.5 * h * k2) * m;
    const Mat k4 = (p + h * k3) * b;
    return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

struct Walk {
    int plus = 0;
    int minus = 0;
};

// Torus: a single forward sweep, so the seam sits right before the base index.
Walk walk_extent(const DomainGrid& g, int base) {
    if (g.mode == DomainMode::Torus) return {g.N - 1, 0};
    return {g.N - 1 - base, base};
}

}  // namespace

FrameField integrate_frame(const ConnectionForm& omega, int base_i, int base_j, const Mat& base_frame,
                           TreeOrder order) {
    const DomainGrid& g = omega.grid;
    const int d = omega.d;
    if (base_i < 0 || base_j < 0 || base_i >= g.N || base_j >= g.N)
        throw std::invalid_argument("integrate_frame: base point outside the grid");
    const Mat g_sig = signature_matrix((d - 1) / 2);
    Mat p0 = base_frame.size() == 0 ? Mat(Mat::Identity(d, d)) : base_frame;
    if (p0.rows() != d || p0.cols() != d) throw std::invalid_argument("integrate_frame: base frame has wrong size");
    if ((p0.transpose() * g_sig * p0 - g_sig).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("integrate_frame: base frame does not satisfy P^T G P = G");

    FrameField f;
    f.grid = g;
    f.d = d;
    f.base_i = base_i;
    f.base_j = base_j;
    f.order = order;
    f.data.assign(g.points() * d * d, 0.0);
    f.path_length.assign(g.points(), 0);
    const double h = g.h();
    const bool x_first = order == TreeOrder::XFirst;

    // point index from (trunk coordinate, branch coordinate)
    auto point = [&](int t, int b) { return x_first ? g.index(g.wrap(t), g.wrap(b)) : g.index(g.wrap(b), g.wrap(t)); };
    auto comp = [&](std::size_t p, bool along_x) -> Mat { return along_x ? Mat(omega.x(p)) : Mat(omega.y(p)); };

    auto sweep = [&](int t0, int b0, bool trunk, const Walk& wk) {
        const bool along_x = trunk == x_first;
        for (int dir : {1, -1}) {
            const int steps = dir > 0 ? wk.plus : wk.minus;
            std::size_t prev = point(t0, b0);
            for (int s = 1; s <= steps; ++s) {
                const std::size_t next = trunk ? point(t0 + dir * s, b0) : point(t0, b0 + dir * s);
                const double sgn = dir;
                const Mat a = sgn * comp(prev, along_x), b = sgn * comp(next, along_x);
                f.at(next) = rk4_step(Mat(f.at(prev)), a, b, h);
                f.path_length[next] = f.path_length[prev] + 1;
                prev = next;
            }
        }
    };

    const int t0 = x_first ? base_i : base_j, b0 = x_first ? base_j : base_i;
    f.at(point(t0, b0)) = p0;
    sweep(t0, b0, true, walk_extent(g, t0));
    const Walk trunk = walk_extent(g, t0), branch = walk_extent(g, b0);
    std::vector<int> trunk_coords;
    for (int s = -trunk.minus; s <= trunk.plus; ++s) trunk_coords.push_back(t0 + s);
    parallel_for(trunk_coords.size(), [&](std::size_t k) { sweep(trunk_coords[k], b0, false, branch); });
    return f;
}

FrameDrift frame_drift(const FrameField& frames) {
    const Mat g = signature_matrix((frames.d - 1) / 2);
    FrameDrift out;
    for (std::size_t p = 0; p < frames.grid.points(); ++p) {
        const Mat m = frames.at(p);
        const Eigen::VectorXd x = m.col(0);
        out.position_norm = std::max(out.position_norm, std::abs(x.dot(g * x) + 1.0));
        out.gram = std::max(out.gram, (m.transpose() * g * m - g).cwiseAbs().maxCoeff());
    }
    return out;
}

double frame_distance(const FrameField& a, const FrameField& b) {
    require_same_grid(a.grid, b.grid, "frame_distance");
    if (a.d != b.d) throw std::invalid_argument("frame_distance: dimension mismatch");
    double m = 0.0;
    for (std::size_t k = 0; k < a.data.size(); ++k) m = std::max(m, std::abs(a.data[k] - b.data[k]));
    return m;
}

Mat g2_frame_matrix() {
    Mat b = Mat::Zero(7, 7);
    b(0, 0) = 1;                 // F
    b(u_index(2), 1) = 1;        // U_2
    b(v_index(2), 2) = 1;        // V_2
    b(u_index(1), 3) = 1;        // U_1
    b(v_index(1), 4) = 1;        // V_1
    b(v_index(3), 5) = -1;       // -V_3
    b(u_index(3), 6) = 1;        // U_3
    return b;
}

double g2_phi_residual(const Mat& m) {
    const Mat b = g2_frame_matrix();
    const Mat local = b.transpose() * m * b;  // b is a signed permutation
    DenseMatrix<double> dm(7, 7);
    for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 7; ++c) dm(r, c) = local(r, c);
    const auto phi = phi_form<double>();
    const auto moved = pullback(phi, dm);
    double worst = 0.0;
    for (std::size_t k = 0; k < phi.coeff.size(); ++k) worst = std::max(worst, std::abs(moved.coeff[k] - phi.coeff[k]));
    return worst;
}

bool g2_constraint_holds(const TodaState& s, double tol) {
    for (std::size_t p = 0; p < s.grid().points(); ++p) {
        const double h1 = s.h(1, p), h2 = s.h(2, p), h3 = s.h(3, p);
        if (std::abs(h3 - h1 * h2 / 4.0) > tol * std::max(1.0, h3)) return false;
    }
    return true;
}

MonodromyReport monodromy(const ConnectionForm& omega, const TodaState* state) {
    const DomainGrid& g = omega.grid;
    if (g.mode != DomainMode::Torus) throw std::invalid_argument("monodromy needs torus mode");
    const int d = omega.d;
    const double h = g.h();
    auto loop = [&](bool along_x) {
        Mat p = Mat::Identity(d, d);
        for (int s = 0; s < g.N; ++s) {
            const std::size_t a = along_x ? g.index(s, 0) : g.index(0, s);
            const std::size_t b = along_x ? g.index(g.wrap(s + 1), 0) : g.index(0, g.wrap(s + 1));
            p = rk4_step(p, along_x ? Mat(omega.x(a)) : Mat(omega.y(a)), along_x ? Mat(omega.x(b)) : Mat(omega.y(b)),
                         h);
        }
        return p;
    };
    MonodromyReport rep;
    rep.mx = loop(true);
    rep.my = loop(false);
    rep.commutator = (rep.mx * rep.my - rep.my * rep.mx).cwiseAbs().maxCoeff();
    const Mat gs = signature_matrix((d - 1) / 2);
    rep.metric_x = (rep.mx.transpose() * gs * rep.mx - gs).cwiseAbs().maxCoeff();
    rep.metric_y = (rep.my.transpose() * gs * rep.my - gs).cwiseAbs().maxCoeff();
    if (d == 7 && (state == nullptr || g2_constraint_holds(*state, 1e-10))) {
        rep.has_phi = true;
        rep.phi_residual = std::max(g2_phi_residual(rep.mx), g2_phi_residual(rep.my));
    }
    return rep;
}

namespace {

// Derivative along an axis treating the frame field as non-periodic: on the
// torus the tree has a seam just before the base index.
Mat frame_derivative(const FrameField& f, int i, int j, Axis axis, int order) {
    const DomainGrid& g = f.grid;
    const int n = g.N;
    const int base = axis == Axis::X ? f.base_i : f.base_j;
    const bool torus = g.mode == DomainMode::Torus;
    auto to_index = [&](int r) { return torus ? g.wrap(base + r) : r; };
    const int k = axis == Axis::X ? i : j;
    const int r = torus ? g.wrap(k - base) : k;
    auto at = [&](int rr) -> Mat {
        const int idx = to_index(rr);
        return axis == Axis::X ? Mat(f.at(g.index(idx, j))) : Mat(f.at(g.index(i, idx)));
    };
    const double h = g.h();
    if (order == 4) {
        if (r >= 2 && r <= n - 3) return (at(r - 2) - 8.0 * at(r - 1) + 8.0 * at(r + 1) - at(r + 2)) / (12.0 * h);
        if (r == 0) return (-25.0 * at(0) + 48.0 * at(1) - 36.0 * at(2) + 16.0 * at(3) - 3.0 * at(4)) / (12.0 * h);
        if (r == 1) return (-3.0 * at(0) - 10.0 * at(1) + 18.0 * at(2) - 6.0 * at(3) + at(4)) / (12.0 * h);
        if (r == n - 1)
            return (25.0 * at(n - 1) - 48.0 * at(n - 2) + 36.0 * at(n - 3) - 16.0 * at(n - 4) + 3.0 * at(n - 5)) /
                   (12.0 * h);
        return (3.0 * at(n - 1) + 10.0 * at(n - 2) - 18.0 * at(n - 3) + 6.0 * at(n - 4) - at(n - 5)) / (12.0 * h);
    }
    if (r >= 1 && r <= n - 2) return (at(r + 1) - at(r - 1)) / (2.0 * h);
    if (r == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
}

}  // namespace

ConnectionForm frame_connection(const FrameField& frames, int order) {
    const DomainGrid& g = frames.grid;
    const int d = frames.d;
    const Mat gs = signature_matrix((d - 1) / 2);
    ConnectionForm out(g, d);
    parallel_for(g.points(), [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        const Mat inv = gs * Mat(frames.at(p)).transpose() * gs;
        out.x(p) = inv * frame_derivative(frames, i, j, Axis::X, order);
        out.y(p) = inv * frame_derivative(frames, i, j, Axis::Y, order);
    });
    return out;
}

bool StructureReport::passed() const {
    return position_norm < tol && gram < tol && tangent_span < tol && first_fundamental < tol &&
           block_pattern < tol && second_fundamental < tol;
}

StructureReport verify_structure(const FrameField& frames, const TodaState& state, const CyclicData& data,
                                 double tol) {
    const int n = data.n;
    if (frames.d != 2 * n + 1) throw std::invalid_argument("verify_structure: frame size does not match n");
    StructureReport rep;
    rep.tol = tol;
    const auto drift = frame_drift(frames);
    rep.position_norm = drift.position_norm;
    rep.gram = drift.gram;
    const ConnectionForm a = frame_connection(frames, 4);
    const ConnectionForm omega = assemble_omega(state, data, 4);
    const Mat gs = signature_matrix(n);
    const DomainGrid& g = frames.grid;
    const int d = frames.d;
    for (std::size_t p = 0; p < g.points(); ++p) {
        const Mat ax = a.x(p), ay = a.y(p);
        const double h1 = state.h(1, p);
        for (const Mat* m : {&ax, &ay}) {
            const Eigen::VectorXd df = m->col(0);
            const double off = std::sqrt(std::max(0.0, df.squaredNorm() - df.segment(1, 2).squaredNorm()));
            rep.tangent_span = std::max(rep.tangent_span, off / df.norm());
        }
        const Eigen::VectorXd fx = ax.col(0), fy = ay.col(0);
        rep.first_fundamental = std::max({rep.first_fundamental, std::abs(fx.dot(gs * fx) - h1) / h1,
                                          std::abs(fy.dot(gs * fy) - h1) / h1, std::abs(fx.dot(gs * fy)) / h1});
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c)
                if (std::abs(block_of(r) - block_of(c)) >= 2)
                    rep.block_pattern = std::max({rep.block_pattern, std::abs(ax(r, c)), std::abs(ay(r, c))});
        const int r2 = u_index(2), c1 = u_index(1);
        rep.second_fundamental =
            std::max({rep.second_fundamental,
                      (ax.block<2, 2>(r2, c1) - Mat(omega.x(p)).block<2, 2>(r2, c1)).cwiseAbs().maxCoeff(),
                      (ay.block<2, 2>(r2, c1) - Mat(omega.y(p)).block<2, 2>(r2, c1)).cwiseAbs().maxCoeff()});
    }
    return rep;
}

FrameField antipodal_frames(const FrameField& frames) {
    FrameField out = frames;
    const int d = frames.d;
    for (std::size_t p = 0; p < frames.grid.points(); ++p) {
        auto m = out.at(p);
        m.leftCols(d - 1) *= -1.0;
    }
    return out;
}

std::pair<cplx, cplx> alpha_n_parts(const Eigen::Ref<const Mat>& omega_x, int n) {
    const Eigen::Matrix2d m = omega_x.block<2, 2>(u_index(n), u_index(n - 1));
    const cplx plus(0.5 * (m(0, 0) + m(1, 1)), 0.5 * (m(1, 0) - m(0, 1)));
    const cplx minus(0.5 * (m(0, 0) - m(1, 1)), -0.5 * (m(0, 1) + m(1, 0)));
    return {plus, minus};
}

TodaState reconstruct_logs(const FrameField& frames, const CyclicData& data) {
    const int n = data.n;
    const DomainGrid& g = frames.grid;
    const ConnectionForm a = frame_connection(frames, 4);
    const Mat gs = signature_matrix(n);
    TodaState s;
    for (int k = 0; k < n; ++k) s.w.emplace_back(g);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    parallel_for(g.points(), [&](std::size_t p) {
        const int i = static_cast<int>(p % g.N), j = static_cast<int>(p / g.N);
        const Mat ax = a.x(p);
        const Eigen::VectorXd fx = ax.col(0);
        const auto alpha = alpha_values_at(data, i, j);
        double logh = std::log(fx.dot(gs * fx));
        s.w[0].values[p] = logh;
        for (int k = 2; k <= n - 1; ++k) {
            const Eigen::Matrix2d m = ax.block<2, 2>(u_index(k), u_index(k - 1));
            const double rot = 0.25 * (std::pow(m(0, 0) + m(1, 1), 2) + std::pow(m(1, 0) - m(0, 1), 2));
            const double asq = std::norm(alpha[k - 1]);
            logh = asq > 0.0 ? logh + std::log(rot / asq) : nan;
            s.w[k - 1].values[p] = logh;
        }
        const auto [plus, minus] = alpha_n_parts(ax, n);
        const double ap = std::norm(alpha[n - 1]), am = std::norm(alpha[n]);
        if (ap > 0.0) s.w[n - 1].values[p] = logh + std::log(std::norm(plus) / ap);
        else if (am > 0.0) s.w[n - 1].values[p] = std::log(am / std::norm(minus)) - logh;
        else s.w[n - 1].values[p] = nan;
    });
    return s;
}

void write_frames(const FrameField& frames, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    const nlohmann::json header = {{"N", frames.grid.N},
                                   {"d", frames.d},
                                   {"layout", "row-major f64"},
                                   {"mode", to_string(frames.grid.mode)},
                                   {"L", frames.grid.L},
                                   {"base_i", frames.base_i},
                                   {"base_j", frames.base_j},
                                   {"order", frames.order == TreeOrder::XFirst ? "x-first" : "y-first"}};
    os << header.dump() << '\n';
    // matrices are stored column-major in memory
    std::vector<double> row(static_cast<std::size_t>(frames.d) * frames.d);
    for (std::size_t p = 0; p < frames.grid.points(); ++p) {
        const auto m = frames.at(p);
        for (int r = 0; r < frames.d; ++r)
            for (int c = 0; c < frames.d; ++c) row[static_cast<std::size_t>(r) * frames.d + c] = m(r, c);
        os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
    std::vector<std::int32_t> len(frames.path_length.begin(), frames.path_length.end());
    len.resize(frames.grid.points(), 0);
    os.write(reinterpret_cast<const char*>(len.data()), static_cast<std::streamsize>(len.size() * sizeof(std::int32_t)));
    if (!os) throw std::runtime_error("failed writing " + path);
}

FrameField read_frames(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::invalid_argument("cannot open frames file " + path);
    std::string line;
    std::getline(is, line);
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("malformed frames header in " + path + ": " + e.what());
    }
    for (const char* key : {"N", "d", "layout", "mode", "L", "base_i", "base_j", "order"})
        if (!h.contains(key)) throw std::invalid_argument("frames header: missing '" + std::string(key) + "'");
    if (h["layout"] != "row-major f64") throw std::invalid_argument("frames header: unsupported layout");
    FrameField f;
    f.grid = DomainGrid::make(parse_mode(h["mode"].get<std::string>()), h["N"].get<int>(), h["L"].get<double>());
    f.d = h["d"].get<int>();
    if (f.d < 5 || f.d % 2 == 0) throw std::invalid_argument("frames header: bad matrix size");
    f.base_i = h["base_i"].get<int>();
    f.base_j = h["base_j"].get<int>();
    f.order = h["order"] == "y-first" ? TreeOrder::YFirst : TreeOrder::XFirst;
    const std::size_t dd = static_cast<std::size_t>(f.d) * f.d;
    f.data.resize(f.grid.points() * dd);
    std::vector<double> row(dd);
    for (std::size_t p = 0; p < f.grid.points(); ++p) {
        if (!is.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(dd * sizeof(double))))
            throw std::invalid_argument("frames file " + path + " is truncated");
        auto m = f.at(p);
        for (int r = 0; r < f.d; ++r)
            for (int c = 0; c < f.d; ++c) m(r, c) = row[static_cast<std::size_t>(r) * f.d + c];
    }
    std::vector<std::int32_t> len(f.grid.points());
    if (!is.read(reinterpret_cast<char*>(len.data()), static_cast<std::streamsize>(len.size() * sizeof(std::int32_t))))
        throw std::invalid_argument("frames file " + path + " is truncated");
    f.path_length.assign(len.begin(), len.end());
    return f;
}

}  // namespace todalab
