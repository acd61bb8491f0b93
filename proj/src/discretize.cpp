#include "ddae/discretize.hpp"

#include "ddae/model.hpp"

#include <cmath>

namespace ddae {

Mesh build_mesh(int N, double tau_max) {
    if (N < 1) throw DdaeError("mesh order N must be >= 1");
    if (!(tau_max > 0.0)) throw DdaeError("tau_max must be positive");
    Mesh mesh;
    mesh.N = N;
    mesh.tau_max = tau_max;
    mesh.points.resize(static_cast<std::size_t>(N) + 1);
    // theta_i = (tau_max/2)(cos(pi i / N) - 1), reindexed ascending so the
    // final point is exactly 0 and the first exactly -tau_max.
    for (int i = 0; i <= N; ++i) {
        double t = 0.5 * tau_max * (std::cos(M_PI * static_cast<double>(i) / N) - 1.0);
        mesh.points[static_cast<std::size_t>(N - i)] = t;
    }
    mesh.points.back() = 0.0;
    mesh.points.front() = -tau_max;
    return mesh;
}

namespace {

Vec bary_weights(const std::vector<double>& x) {
    const int np = static_cast<int>(x.size());
    Vec w = Vec::Ones(np);
    // Generic O(N^2) products are adequate and exact enough at the orders in
    // use; rescale on the fly to avoid under/overflow for long meshes.
    for (int j = 0; j < np; ++j) {
        double acc = 1.0;
        for (int k = 0; k < np; ++k) {
            if (k == j) continue;
            acc *= (x[static_cast<std::size_t>(j)] - x[static_cast<std::size_t>(k)]);
            if (std::abs(acc) > 1e290) acc *= 1e-290;
            if (std::abs(acc) < 1e-290 && acc != 0.0) acc *= 1e290;
        }
        w(j) = 1.0 / acc;
    }
    // Only ratios of weights matter; normalize the largest magnitude to 1.
    double mx = w.cwiseAbs().maxCoeff();
    if (mx > 0) w /= mx;
    return w;
}

}  // namespace

DifferentiationData differentiation_data(const Mesh& mesh, const std::vector<double>& delays) {
    const int np = mesh.N + 1;
    const auto& x = mesh.points;
    Vec w = bary_weights(x);

    DifferentiationData out;
    out.D = Mat::Zero(np, np);
    for (int i = 0; i < np; ++i) {
        double diag = 0.0;
        for (int j = 0; j < np; ++j) {
            if (i == j) continue;
            double d = (w(j) / w(i)) / (x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)]);
            out.D(i, j) = d;
            diag -= d;
        }
        out.D(i, i) = diag;  // rows sum to zero exactly
    }

    const int md = static_cast<int>(delays.size());
    out.L = Mat::Zero(md, np);
    for (int l = 0; l < md; ++l) {
        const double t = -delays[static_cast<std::size_t>(l)];
        if (t < x.front() - 1e-12 || t > 1e-12)
            throw DdaeError("delay outside the mesh interval");
        int hit = -1;
        for (int j = 0; j < np; ++j)
            if (t == x[static_cast<std::size_t>(j)]) { hit = j; break; }
        if (hit >= 0) {
            out.L(l, hit) = 1.0;
            continue;
        }
        double denom = 0.0;
        for (int j = 0; j < np; ++j) {
            double c = w(j) / (t - x[static_cast<std::size_t>(j)]);
            out.L(l, j) = c;
            denom += c;
        }
        out.L.row(l) /= denom;  // partition of unity by construction
    }
    return out;
}

DiscretizedSystem build(const DdaeSystem& sys, int N) {
    const double tmax = sys.delays.empty() ? 1.0 : sys.tau_max();
    DiscretizedSystem disc;
    disc.N = N;
    disc.n = sys.n;
    disc.mesh = build_mesh(N, tmax);
    DifferentiationData dd = differentiation_data(disc.mesh, sys.delays);

    const int n = sys.n;
    const int dim = (N + 1) * n;
    disc.EN = Mat::Zero(dim, dim);
    disc.EN.topLeftCorner(N * n, N * n).setIdentity();
    disc.EN.bottomRightCorner(n, n) = sys.E;

    disc.AN = Mat::Zero(dim, dim);
    for (int i = 0; i < N; ++i)
        for (int k = 0; k <= N; ++k)
            disc.AN.block(i * n, k * n, n, n) = dd.D(i, k) * Mat::Identity(n, n);

    // Boundary row: Gamma_k = sum_l A_l l_k(-tau_l), with A0 folded into the
    // rightmost block (l_k(0) = delta_{k,N} on this mesh).
    for (int k = 0; k <= N; ++k) {
        Mat G = Mat::Zero(n, n);
        if (k == N) G += sys.A[0];
        for (int l = 0; l < sys.m(); ++l)
            G += sys.A[static_cast<std::size_t>(l) + 1] * dd.L(l, k);
        disc.AN.block(N * n, k * n, n, n) = G;
    }

    disc.BN = Mat::Zero(dim, sys.nw());
    disc.BN.bottomRows(n) = sys.B;
    disc.CN = Mat::Zero(sys.nz(), dim);
    disc.CN.rightCols(n) = sys.C;
    return disc;
}

CMat tn_eval(const DiscretizedSystem& disc, Complex lambda) {
    CMat M = lambda * disc.EN.cast<Complex>() - disc.AN.cast<Complex>();
    Eigen::PartialPivLU<CMat> lu(M);
    if (lu.rcond() < 1e-14) throw SingularAtLambda("discretized pencil singular at lambda");
    return disc.CN.cast<Complex>() * lu.solve(disc.BN.cast<Complex>());
}

double tn_sigma1(const DiscretizedSystem& disc, double omega) {
    CMat M = Complex(0.0, omega) * disc.EN.cast<Complex>() - disc.AN.cast<Complex>();
    Eigen::PartialPivLU<CMat> lu(M);
    if (lu.rcond() < 1e-14) return -1.0;
    CMat T = disc.CN.cast<Complex>() * lu.solve(disc.BN.cast<Complex>());
    return T.jacobiSvd().singularValues()(0);
}

}  // namespace ddae
