#include "ddae/asymptotic.hpp"

#include "ddae/parallel.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace ddae {

CMat AsymptoticSystem::abb(const Vec& theta) const {
    CMat M = -A22[0].cast<Complex>();
    for (int k = 0; k < ma(); ++k) {
        const int i = retained[static_cast<std::size_t>(k)];
        M -= A22[static_cast<std::size_t>(i)].cast<Complex>() * std::exp(Complex(0.0, -theta(k)));
    }
    return M;
}

AsymptoticSystem reduce_delays(const PartitionedSystem& part, double tol_prune) {
    AsymptoticSystem asys;
    asys.A22 = part.A22;
    asys.B2 = part.B2;
    asys.C2 = part.C2;
    if (tol_prune < 0.0) {
        double mx = 0.0;
        for (std::size_t i = 0; i < part.A22.size(); ++i) {
            // Norm of the full A_i is not available here; the compressed block
            // plus the other three blocks bound it, which is what pruning cares
            // about anyway. Use the largest block norm as the scale.
            double s = 0.0;
            auto smax = [](const Mat& M) {
                return M.size() == 0 ? 0.0 : Eigen::JacobiSVD<Mat>(M).singularValues()(0);
            };
            s = std::max({smax(part.A11[i]), smax(part.A12[i]), smax(part.A21[i]), smax(part.A22[i])});
            mx = std::max(mx, s);
        }
        tol_prune = 1e-12 * std::max(mx, 1e-300);
    }
    asys.tol_prune = tol_prune;
    for (std::size_t i = 1; i < part.A22.size(); ++i) {
        double s = part.A22[i].size() == 0 ? 0.0 : Eigen::JacobiSVD<Mat>(part.A22[i]).singularValues()(0);
        if (s > tol_prune) asys.retained.push_back(static_cast<int>(i));
    }
    return asys;
}

CMat ta_eval(const AsymptoticSystem& asys, const Vec& theta) {
    if (theta.size() != asys.ma()) throw DimensionMismatch("theta must have one entry per retained delay");
    if (asys.nu() == 0) return CMat::Zero(asys.C2.rows(), asys.B2.cols());
    CMat M = asys.abb(theta);
    Eigen::PartialPivLU<CMat> lu(M);
    if (lu.rcond() < 1e-14)
        throw SingularAtTheta("Abb(theta) singular; difference part not strongly stable");
    return asys.C2.cast<Complex>() * lu.solve(asys.B2.cast<Complex>());
}

namespace {

// Certificate vectors from the singular triplet of Ta(theta):
// u = Abb^{-1} B2 x, v = Abb^{-*} C2^T y solve the block equation exactly at
// a singular point; afterwards normalize and fix the phase.
void init_certificate(const AsymptoticSystem& asys, const Vec& theta, CVec& u, CVec& v, int& phase_row) {
    CMat M = asys.abb(theta);
    Eigen::PartialPivLU<CMat> lu(M);
    CMat T = asys.C2.cast<Complex>() * lu.solve(asys.B2.cast<Complex>());
    Eigen::JacobiSVD<CMat> svd(T, Eigen::ComputeThinU | Eigen::ComputeThinV);
    CVec x = svd.matrixV().col(0);
    CVec y = svd.matrixU().col(0);
    u = lu.solve(asys.B2.cast<Complex>() * x);
    v = M.adjoint().partialPivLu().solve(asys.C2.cast<Complex>().transpose() * y);
    double s = std::sqrt(2.0 / (u.squaredNorm() + v.squaredNorm()));
    u *= s;
    v *= s;
    int r = 0;
    u.cwiseAbs().maxCoeff(&r);
    phase_row = r;
    Complex ph = u(r) / std::abs(u(r));
    u /= ph;
    v /= ph;
}

}  // namespace

TaNormResult ta_correct(const AsymptoticSystem& asys, const Vec& theta0, double xi0) {
    const int nu = asys.nu();
    const int ma = asys.ma();
    if (nu == 0 || !(xi0 > 0.0)) throw CorrectionDiverged("nothing to correct");

    Vec theta = theta0;
    double xi = xi0;
    CVec u, v;
    int prow = 0;
    init_certificate(asys, theta, u, v, prow);

    const int nunk = ma + 1 + 4 * nu;
    const int nres = 4 * nu + ma + 2;
    Mat J(nres, nunk);
    Vec F(nres);
    TaNormResult res;

    const Mat BBt = asys.B2 * asys.B2.transpose();
    const Mat CtC = asys.C2.transpose() * asys.C2;

    auto pack_cols = [&](int row0, const CMat& dRdu, int col0) {
        // complex derivative block -> four real blocks (Re/Im x re/im parts)
        const int r = static_cast<int>(dRdu.rows());
        for (int c = 0; c < dRdu.cols(); ++c) {
            for (int k = 0; k < r; ++k) {
                J(row0 + k, col0 + c) = dRdu(k, c).real();
                J(row0 + r + k, col0 + c) = dRdu(k, c).imag();
                J(row0 + k, col0 + static_cast<int>(dRdu.cols()) + c) = -dRdu(k, c).imag();
                J(row0 + r + k, col0 + static_cast<int>(dRdu.cols()) + c) = dRdu(k, c).real();
            }
        }
    };

    double prev_norm = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter <= 30; ++iter) {
        CMat Abb = asys.abb(theta);
        CVec R1 = Abb * u - (BBt.cast<Complex>() * v) / xi;
        CVec R2 = (CtC.cast<Complex>() * u) / xi - Abb.adjoint() * v;
        // Stationarity of the singular value in each torus direction. With the
        // certificate pinned by the block equations the vanishing part is the
        // imaginary one, matching the frequency-domain stationarity row.
        Vec R3(ma);
        std::vector<Complex> s_i(static_cast<std::size_t>(ma));
        for (int k = 0; k < ma; ++k) {
            const Mat& Ai = asys.A22[static_cast<std::size_t>(asys.retained[static_cast<std::size_t>(k)])];
            Complex s = std::exp(Complex(0.0, -theta(k))) * (v.adjoint() * (Ai.cast<Complex>() * u))(0);
            s_i[static_cast<std::size_t>(k)] = s;
            R3(k) = s.imag();
        }
        double R4 = u.squaredNorm() + v.squaredNorm() - 2.0;
        double R5 = u(prow).imag();

        F.segment(0, nu) = R1.real();
        F.segment(nu, nu) = R1.imag();
        F.segment(2 * nu, nu) = R2.real();
        F.segment(3 * nu, nu) = R2.imag();
        F.segment(4 * nu, ma) = R3;
        F(4 * nu + ma) = R4;
        F(4 * nu + ma + 1) = R5;

        const double fn = F.norm();
        res.residual_history.push_back(fn);
        if (!std::isfinite(fn)) throw CorrectionDiverged("non-finite residual");
        if (fn <= 1e-12 * (1.0 + std::abs(xi))) {
            res.value = xi;
            res.theta_hat = theta;
            res.u_a = u;
            res.v_a = v;
            res.corrected = true;
            return res;
        }
        if (iter == 30) throw MaxIterExceeded("Gauss-Newton did not converge in 30 iterations");
        if (fn > 1e4 * (1.0 + prev_norm)) throw CorrectionDiverged("Gauss-Newton residual exploding");
        prev_norm = std::min(prev_norm, fn);

        J.setZero();
        const int cth = 0, cxi = ma, cu = ma + 1, cv = ma + 1 + 2 * nu;
        // d/d theta
        for (int k = 0; k < ma; ++k) {
            const Mat& Ai = asys.A22[static_cast<std::size_t>(asys.retained[static_cast<std::size_t>(k)])];
            const Complex e = std::exp(Complex(0.0, -theta(k)));
            CVec d1 = Complex(0.0, 1.0) * e * (Ai.cast<Complex>() * u);
            CVec d2 = Complex(0.0, 1.0) * std::conj(e) * (Ai.transpose().cast<Complex>() * v);
            for (int r = 0; r < nu; ++r) {
                J(r, cth + k) = d1(r).real();
                J(nu + r, cth + k) = d1(r).imag();
                J(2 * nu + r, cth + k) = d2(r).real();
                J(3 * nu + r, cth + k) = d2(r).imag();
            }
            J(4 * nu + k, cth + k) = -s_i[static_cast<std::size_t>(k)].real();
        }
        // d/d xi
        {
            CVec d1 = (BBt.cast<Complex>() * v) / (xi * xi);
            CVec d2 = -(CtC.cast<Complex>() * u) / (xi * xi);
            for (int r = 0; r < nu; ++r) {
                J(r, cxi) = d1(r).real();
                J(nu + r, cxi) = d1(r).imag();
                J(2 * nu + r, cxi) = d2(r).real();
                J(3 * nu + r, cxi) = d2(r).imag();
            }
        }
        // d/d u and d/d v of the block equations
        pack_cols(0, Abb, cu);
        pack_cols(2 * nu, (CtC / xi).cast<Complex>(), cu);
        pack_cols(0, (-BBt / xi).cast<Complex>(), cv);
        pack_cols(2 * nu, -Abb.adjoint(), cv);
        // stationarity rows w.r.t. u, v
        for (int k = 0; k < ma; ++k) {
            const Mat& Ai = asys.A22[static_cast<std::size_t>(asys.retained[static_cast<std::size_t>(k)])];
            const Complex e = std::exp(Complex(0.0, -theta(k)));
            CVec vA = (v.adjoint() * Ai.cast<Complex>()).transpose();  // (v^* A)^T
            CVec Au = Ai.cast<Complex>() * u;
            for (int c = 0; c < nu; ++c) {
                J(4 * nu + k, cu + c) = (e * vA(c)).imag();
                J(4 * nu + k, cu + nu + c) = (e * vA(c)).real();
                J(4 * nu + k, cv + c) = (e * Au(c)).imag();
                J(4 * nu + k, cv + nu + c) = -(e * Au(c)).real();
            }
        }
        // normalization rows
        for (int c = 0; c < nu; ++c) {
            J(4 * nu + ma, cu + c) = 2.0 * u(c).real();
            J(4 * nu + ma, cu + nu + c) = 2.0 * u(c).imag();
            J(4 * nu + ma, cv + c) = 2.0 * v(c).real();
            J(4 * nu + ma, cv + nu + c) = 2.0 * v(c).imag();
        }
        J(4 * nu + ma + 1, cu + nu + prow) = 1.0;

        Vec step = J.colPivHouseholderQr().solve(-F);
        if (!step.allFinite()) throw CorrectionDiverged("non-finite Gauss-Newton step");
        theta += step.segment(cth, ma);
        xi += step(cxi);
        for (int c = 0; c < nu; ++c) {
            u(c) += Complex(step(cu + c), step(cu + nu + c));
            v(c) += Complex(step(cv + c), step(cv + nu + c));
        }
        if (!(xi > 0.0)) throw CorrectionDiverged("level left the positive axis");
    }
    throw MaxIterExceeded("unreachable");
}

TaNormResult strong_norm_ta(const AsymptoticSystem& asys, int p_a, bool do_correct) {
    TaNormResult res;
    const int nu = asys.nu();
    const int ma = asys.ma();
    res.theta_hat = Vec::Zero(ma);
    if (nu == 0) return res;  // T_a identically zero

    if (ma == 0) {
        Vec empty(0);
        CMat T = ta_eval(asys, empty);
        Eigen::JacobiSVD<CMat> svd(T);
        res.value = T.size() == 0 ? 0.0 : svd.singularValues()(0);
        if (res.value > 0.0) {
            int prow = 0;
            init_certificate(asys, empty, res.u_a, res.v_a, prow);
        }
        return res;
    }

    if (p_a < 2) throw DdaeError("p_a must be at least 2");
    std::size_t total = 1;
    for (int k = 0; k < ma; ++k) total *= static_cast<std::size_t>(p_a);

    std::vector<double> vals(total, 0.0);
    std::vector<char> singular(total, 0);
    const double step = 2.0 * M_PI / p_a;
    parallel_for(total, [&](std::size_t flat) {
        Vec theta(ma);
        std::size_t rem = flat;
        for (int k = 0; k < ma; ++k) {
            theta(k) = step * static_cast<double>(rem % static_cast<std::size_t>(p_a));
            rem /= static_cast<std::size_t>(p_a);
        }
        try {
            CMat T = ta_eval(asys, theta);
            vals[flat] = T.size() == 0 ? 0.0 : Eigen::JacobiSVD<CMat>(T).singularValues()(0);
        } catch (const SingularAtTheta&) {
            singular[flat] = 1;
        }
    });
    std::size_t best = 0;
    bool any_singular = false;
    for (std::size_t i = 0; i < total; ++i) {
        if (singular[i]) any_singular = true;
        if (vals[i] > vals[best]) best = i;
    }
    if (any_singular)
        throw SingularAtTheta("Abb(theta) singular on the sweep grid; strong norm of T_a unbounded");

    Vec theta(ma);
    std::size_t rem = best;
    for (int k = 0; k < ma; ++k) {
        theta(k) = step * static_cast<double>(rem % static_cast<std::size_t>(p_a));
        rem /= static_cast<std::size_t>(p_a);
    }
    res.value = vals[best];
    res.theta_hat = theta;
    if (res.value > 0.0) {
        int prow = 0;
        init_certificate(asys, theta, res.u_a, res.v_a, prow);
    }

    if (do_correct && res.value > 0.0) {
        try {
            TaNormResult ref = ta_correct(asys, theta, res.value);
            if (ref.value >= res.value - 1e-9 * (1.0 + res.value)) return ref;
        } catch (const DdaeError&) {
            // fall through with the grid value
        }
    }
    return res;
}

}  // namespace ddae
