#include "ddae/levelset.hpp"

#include "ddae/model.hpp"
#include "ddae/parallel.hpp"
#include "ddae/qz.hpp"
#include "ddae/stability.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ddae {

std::pair<Mat, Mat> level_pencil(const DiscretizedSystem& disc, double xi) {
    if (!(xi > 0.0)) throw DdaeError("level xi must be positive");
    const int dim = static_cast<int>(disc.EN.rows());
    Mat P = Mat::Zero(2 * dim, 2 * dim);
    Mat Q = Mat::Zero(2 * dim, 2 * dim);
    P.topLeftCorner(dim, dim) = disc.AN;
    P.topRightCorner(dim, dim) = (disc.BN * disc.BN.transpose()) / xi;
    P.bottomLeftCorner(dim, dim) = -(disc.CN.transpose() * disc.CN) / xi;
    P.bottomRightCorner(dim, dim) = -disc.AN.transpose();
    Q.topLeftCorner(dim, dim) = disc.EN;
    Q.bottomRightCorner(dim, dim) = disc.EN.transpose();
    return {std::move(P), std::move(Q)};
}

std::vector<double> pencil_frequencies(const DiscretizedSystem& disc, double xi, double axis_tol) {
    auto [P, Q] = level_pencil(disc, xi);
    std::vector<double> ws;
    for (const Complex& lam : generalized_eigenvalues(std::move(P), std::move(Q))) {
        if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag())) continue;
        if (std::abs(lam) > 1e10) continue;
        if (std::abs(lam.real()) > axis_tol * std::max(1.0, std::abs(lam.imag()))) continue;
        if (lam.imag() >= 0.0) ws.push_back(lam.imag());
    }
    std::sort(ws.begin(), ws.end());
    std::vector<double> out;
    for (double w : ws) {
        if (out.empty() || w - out.back() > 1e-7 * std::max(1.0, w)) out.push_back(w);
    }
    return out;
}

PeakResult correct_peak(const DdaeSystem& sys, double omega0, double xi0) {
    const int n = sys.n;
    if (!(xi0 > 0.0)) throw CorrectionDiverged("peak level must be positive");

    const Mat BBt = sys.B * sys.B.transpose();
    const Mat CtC = sys.C.transpose() * sys.C;

    auto delta = [&](double w) { return sys.char_matrix(Complex(0.0, w)); };
    auto gmat = [&](double w) {
        CMat G = sys.E.cast<Complex>();
        for (int i = 0; i < sys.m(); ++i) {
            const double tau = sys.delays[static_cast<std::size_t>(i)];
            G += sys.A[static_cast<std::size_t>(i) + 1].cast<Complex>() * (tau * std::exp(Complex(0.0, -w * tau)));
        }
        return G;
    };

    // starting certificate: least singular vector of H(j w0, xi0)
    double w = omega0, xi = xi0;
    CVec u(n), v(n);
    int prow = 0;
    {
        CMat H(2 * n, 2 * n);
        CMat D = delta(w);
        H.topLeftCorner(n, n) = D;
        H.topRightCorner(n, n) = -(BBt / xi).cast<Complex>();
        H.bottomLeftCorner(n, n) = (CtC / xi).cast<Complex>();
        H.bottomRightCorner(n, n) = -D.adjoint();
        Eigen::JacobiSVD<CMat> svd(H, Eigen::ComputeThinV);
        CVec zeta = svd.matrixV().col(2 * n - 1);
        u = zeta.head(n);
        v = zeta.tail(n);
        double s = std::sqrt(2.0 / (u.squaredNorm() + v.squaredNorm()));
        u *= s;
        v *= s;
        u.cwiseAbs().maxCoeff(&prow);
        if (std::abs(u(prow)) > 0) {
            Complex ph = u(prow) / std::abs(u(prow));
            u /= ph;
            v /= ph;
        }
    }

    const int nunk = 2 + 4 * n;
    const int nres = 4 * n + 3;
    Mat J(nres, nunk);
    Vec F(nres);
    PeakResult res;

    auto pack_cols = [&](int row0, const CMat& dR, int col0) {
        const int r = static_cast<int>(dR.rows());
        const int c0im = col0 + static_cast<int>(dR.cols());
        for (int c = 0; c < dR.cols(); ++c) {
            for (int k = 0; k < r; ++k) {
                J(row0 + k, col0 + c) = dR(k, c).real();
                J(row0 + r + k, col0 + c) = dR(k, c).imag();
                J(row0 + k, c0im + c) = -dR(k, c).imag();
                J(row0 + r + k, c0im + c) = dR(k, c).real();
            }
        }
    };

    double best = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter <= 30; ++iter) {
        CMat D = delta(w);
        CMat G = gmat(w);
        CVec R1 = D * u - (BBt.cast<Complex>() * v) / xi;
        CVec R2 = (CtC.cast<Complex>() * u) / xi - D.adjoint() * v;
        const Complex s = (v.adjoint() * (G * u))(0);
        const double R3 = s.imag();
        const double R4 = u.squaredNorm() + v.squaredNorm() - 2.0;
        const double R5 = u(prow).imag();

        F.segment(0, n) = R1.real();
        F.segment(n, n) = R1.imag();
        F.segment(2 * n, n) = R2.real();
        F.segment(3 * n, n) = R2.imag();
        F(4 * n) = R3;
        F(4 * n + 1) = R4;
        F(4 * n + 2) = R5;

        const double fn = F.norm();
        res.residual_history.push_back(fn);
        if (!std::isfinite(fn)) throw CorrectionDiverged("non-finite residual");
        if (fn <= 1e-12 * (1.0 + std::abs(xi))) {
            res.omega = std::abs(w);  // the response is even in omega
            res.xi = xi;
            res.u = u;
            res.v = v;
            return res;
        }
        if (iter == 30) throw MaxIterExceeded("peak correction did not converge in 30 iterations");
        if (fn > 1e4 * (1.0 + best)) throw CorrectionDiverged("peak correction residual exploding");
        best = std::min(best, fn);

        J.setZero();
        const int cw = 0, cxi = 1, cu = 2, cv = 2 + 2 * n;
        // d/d omega
        {
            CVec d1 = Complex(0.0, 1.0) * (G * u);
            CVec d2 = Complex(0.0, 1.0) * (G.adjoint() * v);
            for (int r = 0; r < n; ++r) {
                J(r, cw) = d1(r).real();
                J(n + r, cw) = d1(r).imag();
                J(2 * n + r, cw) = d2(r).real();
                J(3 * n + r, cw) = d2(r).imag();
            }
            CMat dG = CMat::Zero(n, n);
            for (int i = 0; i < sys.m(); ++i) {
                const double tau = sys.delays[static_cast<std::size_t>(i)];
                dG += sys.A[static_cast<std::size_t>(i) + 1].cast<Complex>() *
                      (Complex(0.0, -1.0) * tau * tau * std::exp(Complex(0.0, -w * tau)));
            }
            J(4 * n, cw) = ((v.adjoint() * (dG * u))(0)).imag();
        }
        // d/d xi
        {
            CVec d1 = (BBt.cast<Complex>() * v) / (xi * xi);
            CVec d2 = -(CtC.cast<Complex>() * u) / (xi * xi);
            for (int r = 0; r < n; ++r) {
                J(r, cxi) = d1(r).real();
                J(n + r, cxi) = d1(r).imag();
                J(2 * n + r, cxi) = d2(r).real();
                J(3 * n + r, cxi) = d2(r).imag();
            }
        }
        pack_cols(0, D, cu);
        pack_cols(2 * n, (CtC / xi).cast<Complex>(), cu);
        pack_cols(0, (-BBt / xi).cast<Complex>(), cv);
        pack_cols(2 * n, -D.adjoint(), cv);
        // stationarity row
        {
            CVec vG = (v.adjoint() * G).transpose();
            CVec Gu = G * u;
            for (int c = 0; c < n; ++c) {
                J(4 * n, cu + c) = vG(c).imag();
                J(4 * n, cu + n + c) = vG(c).real();
                J(4 * n, cv + c) = Gu(c).imag();
                J(4 * n, cv + n + c) = -Gu(c).real();
            }
        }
        for (int c = 0; c < n; ++c) {
            J(4 * n + 1, cu + c) = 2.0 * u(c).real();
            J(4 * n + 1, cu + n + c) = 2.0 * u(c).imag();
            J(4 * n + 1, cv + c) = 2.0 * v(c).real();
            J(4 * n + 1, cv + n + c) = 2.0 * v(c).imag();
        }
        J(4 * n + 2, cu + n + prow) = 1.0;

        Vec step = J.colPivHouseholderQr().solve(-F);
        if (!step.allFinite()) throw CorrectionDiverged("non-finite correction step");
        w += step(cw);
        xi += step(cxi);
        for (int c = 0; c < n; ++c) {
            u(c) += Complex(step(cu + c), step(cu + n + c));
            v(c) += Complex(step(cv + c), step(cv + n + c));
        }
        if (!(xi > 0.0)) throw CorrectionDiverged("level left the positive axis");
    }
    throw MaxIterExceeded("unreachable");
}

namespace {

std::vector<double> log_grid(double lo, double hi, int points) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(points));
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < points; ++i)
        g.push_back(std::exp(llo + (lhi - llo) * static_cast<double>(i) / (points - 1)));
    return g;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& v) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double l = i > 0 ? v[i - 1] : -std::numeric_limits<double>::infinity();
        const double r = i + 1 < v.size() ? v[i + 1] : -std::numeric_limits<double>::infinity();
        if (v[i] >= l && v[i] >= r && v[i] > 0.0) idx.push_back(i);
    }
    return idx;
}

}  // namespace

StrongNormResult strong_hinf_norm(const DdaeSystem& sys, const LevelSetOptions& opts) {
    StrongNormResult res;
    NullspaceBases bases = validate(sys, opts.tol_rank);
    PartitionedSystem part = partition(sys, bases);
    AsymptoticSystem asys = reduce_delays(part);

    if (!opts.skip_stability) {
        StabilityReport rep = check_strong_stability(sys, opts.N, opts.p_a);
        if (!rep.stable) {
            std::ostringstream os;
            os << "system not strongly exponentially stable (spectral abscissa "
               << rep.spectral_abscissa << ", difference radius " << rep.difference_radius << ")";
            throw NotStable(os.str());
        }
    }

    res.ta = strong_norm_ta(asys, opts.p_a, /*do_correct=*/true);
    const double ta_norm = res.ta.value;

    DiscretizedSystem disc = build(sys, opts.N);

    // first level: asymptotic floor plus candidate frequency peaks
    std::vector<double> seeds = opts.seed_frequencies;
    if (opts.auto_seeds) {
        const double tmax = sys.delays.empty() ? 1.0 : sys.tau_max();
        std::vector<double> grid = log_grid(1e-3 / tmax, 1e3 / tmax, 200);
        grid.insert(grid.begin(), 0.0);
        std::vector<double> vals(grid.size(), 0.0);
        parallel_for(grid.size(), [&](std::size_t i) {
            vals[i] = std::max(0.0, tn_sigma1(disc, grid[i]));
        });
        for (std::size_t i : local_maxima(vals)) seeds.push_back(grid[i]);
    }
    double xi_l = ta_norm;
    double omega_best = -1.0;  // frequency attaining xi_l, when it came from a peak
    for (double wseed : seeds) {
        const double s1 = sigma1(sys, wseed);
        if (s1 > xi_l) {
            xi_l = s1;
            omega_best = wseed;
        }
    }
    bool level_is_ta = xi_l == ta_norm;

    if (xi_l <= 0.0) {
        // zero transfer function everywhere we looked; the norm is zero
        res.value = 0.0;
        res.branch = NormBranch::Asymptotic;
        res.theta_hat = res.ta.theta_hat;
        return res;
    }

    std::vector<double> last_crossings;
    res.xi_l_history.push_back(xi_l);
    for (int level = 0; level < opts.max_levels; ++level) {
        res.iterations = level + 1;
        const double xi = xi_l * (1.0 + 2.0 * opts.tol);
        std::vector<double> ws = pencil_frequencies(disc, xi, opts.axis_tol);
        res.levels.push_back({xi, ws});

        if (ws.empty()) {
            if (level_is_ta) {
                res.value = ta_norm;
                res.branch = NormBranch::Asymptotic;
                res.theta_hat = res.ta.theta_hat;
                res.u = res.ta.u_a;
                res.v = res.ta.v_a;
                res.corrected = res.ta.corrected;
                return res;
            }
            // the peak lies between xi_l and xi: correct from the frequencies
            // where sigma_k(T_N) attains the current lower level; the point
            // that produced xi_l always belongs to that set
            std::vector<double> wtil = pencil_frequencies(disc, xi_l, opts.axis_tol);
            if (omega_best >= 0.0) {
                bool present = false;
                for (double w : wtil)
                    if (std::abs(w - omega_best) <= 1e-6 * std::max(1.0, omega_best)) present = true;
                if (!present) wtil.push_back(omega_best);
            }
            if (wtil.empty()) wtil = last_crossings;
            const double xi_til = 0.5 * (xi + xi_l);
            res.levels.push_back({xi_l, wtil});

            double best_xi = -1.0, best_w = 0.0, second = -1.0;
            CVec bu, bv;
            bool any = false;
            for (double wt : wtil) {
                try {
                    PeakResult pk = correct_peak(sys, wt, xi_til);
                    any = true;
                    if (pk.xi > best_xi) {
                        second = best_xi;
                        best_xi = pk.xi;
                        best_w = pk.omega;
                        bu = pk.u;
                        bv = pk.v;
                    } else if (pk.xi > second && std::abs(pk.xi - best_xi) > 1e-12 * (1.0 + best_xi)) {
                        second = pk.xi;
                    }
                } catch (const DdaeError& e) {
                    res.warnings.push_back(std::string("peak correction failed: ") + e.what());
                }
            }
            if (!any) {
                res.value = xi_til;
                res.branch = NormBranch::Frequency;
                res.omega_hat = wtil.empty() ? 0.0 : wtil.front();
                res.corrected = false;
                res.warnings.push_back("all corrections diverged; returning predicted value");
                return res;
            }
            if (best_xi < ta_norm) {
                // the predictor overshot; the asymptotic floor wins
                res.value = ta_norm;
                res.branch = NormBranch::Asymptotic;
                res.theta_hat = res.ta.theta_hat;
                res.u = res.ta.u_a;
                res.v = res.ta.v_a;
                res.corrected = res.ta.corrected;
                return res;
            }
            res.value = best_xi;
            res.branch = NormBranch::Frequency;
            res.omega_hat = best_w;
            res.u = bu;
            res.v = bv;
            res.corrected = true;
            res.second_peak = second;
            return res;
        }

        last_crossings = ws;
        double next = ta_norm;
        double next_omega = -1.0;
        if (ws.size() == 1) {
            const double vv = std::max(0.0, tn_sigma1(disc, ws[0]));
            if (vv > next) {
                next = vv;
                next_omega = ws[0];
            }
        } else {
            std::vector<double> mids(ws.size() - 1);
            for (std::size_t i = 0; i + 1 < ws.size(); ++i) {
                const bool touches_zero = ws[i] <= opts.axis_tol * std::max(1.0, ws[i + 1]);
                mids[i] = touches_zero ? 0.5 * (ws[i] + ws[i + 1]) : std::sqrt(ws[i] * ws[i + 1]);
            }
            std::vector<double> vals(mids.size(), 0.0);
            parallel_for(mids.size(), [&](std::size_t i) {
                vals[i] = std::max(0.0, tn_sigma1(disc, mids[i]));
            });
            for (std::size_t i = 0; i < vals.size(); ++i) {
                if (vals[i] > next) {
                    next = vals[i];
                    next_omega = mids[i];
                }
            }
        }
        if (next <= xi_l * (1.0 + 1e-14)) {
            // stalled (tangential crossings); treat like the no-intersection case
            const double xi_til = 0.5 * (xi + xi_l);
            double best_xi = -1.0, best_w = 0.0;
            CVec bu, bv;
            bool any = false;
            if (omega_best >= 0.0) ws.push_back(omega_best);
            for (double wt : ws) {
                try {
                    PeakResult pk = correct_peak(sys, wt, xi_til);
                    any = true;
                    if (pk.xi > best_xi) {
                        best_xi = pk.xi;
                        best_w = pk.omega;
                        bu = pk.u;
                        bv = pk.v;
                    }
                } catch (const DdaeError& e) {
                    res.warnings.push_back(std::string("peak correction failed: ") + e.what());
                }
            }
            if (any && best_xi >= ta_norm) {
                res.value = best_xi;
                res.branch = NormBranch::Frequency;
                res.omega_hat = best_w;
                res.u = bu;
                res.v = bv;
                res.corrected = true;
                return res;
            }
            res.value = ta_norm;
            res.branch = NormBranch::Asymptotic;
            res.theta_hat = res.ta.theta_hat;
            res.u = res.ta.u_a;
            res.v = res.ta.v_a;
            res.corrected = res.ta.corrected;
            return res;
        }
        xi_l = next;
        if (next_omega >= 0.0) omega_best = next_omega;
        res.xi_l_history.push_back(xi_l);
        level_is_ta = xi_l == ta_norm;
    }
    throw MaxLevelsExceeded("level iteration did not settle within max_levels");
}

PlainNormResult plain_hinf_norm(const DdaeSystem& sys, const PlainNormOptions& opts) {
    validate(sys);
    PlainNormResult res;
    const double tmax = sys.delays.empty() ? 1.0 : sys.tau_max();
    double wmin = opts.wmin >= 0.0 ? opts.wmin : 1e-3 / tmax;
    double wmax = opts.wmax > 0.0 ? opts.wmax : 1e3 / tmax;
    if (!(wmax > wmin)) throw DdaeError("wmax must exceed wmin");
    const int points = std::max(2, opts.points);

    std::vector<double> grid;
    if (opts.log_grid) {
        grid = log_grid(std::max(wmin, 1e-12), wmax, points);
        grid.insert(grid.begin(), 0.0);
    } else {
        grid.reserve(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i)
            grid.push_back(wmin + (wmax - wmin) * static_cast<double>(i) / (points - 1));
    }
    std::vector<double> vals(grid.size(), 0.0);
    parallel_for(grid.size(), [&](std::size_t i) {
        vals[i] = std::max(0.0, sigma1(sys, grid[i]));
    });

    std::vector<std::size_t> cand = local_maxima(vals);
    std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });
    if (cand.size() > static_cast<std::size_t>(opts.refine_top))
        cand.resize(static_cast<std::size_t>(opts.refine_top));

    std::size_t gbest = 0;
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (vals[i] > vals[gbest]) gbest = i;
    res.value = vals[gbest];
    res.omega = grid[gbest];
    res.corrected = false;

    for (std::size_t i : cand) {
        try {
            PeakResult pk = correct_peak(sys, grid[i], vals[i]);
            res.peaks.push_back(pk);
        } catch (const DdaeError&) {
        }
    }
    std::sort(res.peaks.begin(), res.peaks.end(),
              [](const PeakResult& a, const PeakResult& b) { return a.xi > b.xi; });
    if (!res.peaks.empty() && res.peaks.front().xi >= res.value - 1e-9 * (1.0 + res.value)) {
        res.value = res.peaks.front().xi;
        res.omega = res.peaks.front().omega;
        res.corrected = true;
    }
    return res;
}

}  // namespace ddae
