#include "ddae/synthesis.hpp"

#include "ddae/model.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ddae {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ObjectiveEval objective(const ParamClosedLoop& pcl, const Vec& p, const LevelSetOptions& opts) {
    ObjectiveEval ev;
    ev.xi = kInf;
    DdaeSystem sys = instantiate(pcl, p);
    try {
        StabilityReport rep = check_strong_stability(sys, opts.N, opts.p_a);
        if (!rep.stable) {
            ev.failure_reason = "not strongly stable";
            return ev;
        }
        LevelSetOptions lo = opts;
        lo.skip_stability = true;
        ev.result = strong_hinf_norm(sys, lo);
        ev.xi = ev.result.value;
        ev.finite = std::isfinite(ev.xi);
    } catch (const DdaeError& e) {
        ev.xi = kInf;
        ev.finite = false;
        ev.failure_reason = e.what();
    }
    return ev;
}

Vec gradient(const ParamClosedLoop& pcl, const Vec& p, const ObjectiveEval& eval) {
    if (!eval.finite) throw DdaeError("gradient requested at an infeasible point");
    const double xi = eval.xi;
    const StrongNormResult& r = eval.result;
    const int np = pcl.param_count();
    Vec g = Vec::Zero(np);

    DdaeSystem sys = instantiate(pcl, p);

    if (r.branch == NormBranch::Frequency) {
        if (std::abs(xi - r.ta.value) <= 1e-9 * std::max(1.0, xi))
            throw NonsmoothPoint("frequency peak ties the asymptotic floor");
        if (r.second_peak >= 0.0 && std::abs(xi - r.second_peak) <= 1e-9 * std::max(1.0, xi))
            throw NonsmoothPoint("two frequency peaks tie");
        // multiplicity of the attained singular value
        {
            CMat T = transfer(sys, Complex(0.0, r.omega_hat));
            Vec s = T.jacobiSvd().singularValues();
            if (s.size() > 1 && s(0) - s(1) <= 1e-9 * std::max(1.0, s(0)))
                throw NonsmoothPoint("singular value multiplicity above one");
        }
        const CVec& u = r.u;
        const CVec& v = r.v;
        std::vector<Complex> phase(sys.A.size());
        phase[0] = Complex(1.0, 0.0);
        for (int i = 0; i < sys.m(); ++i)
            phase[static_cast<std::size_t>(i) + 1] =
                std::exp(Complex(0.0, -r.omega_hat * sys.delays[static_cast<std::size_t>(i)]));
        const double den = (v.adjoint() * (sys.B * sys.B.transpose()).cast<Complex>() * v)(0).real() +
                           (u.adjoint() * (sys.C.transpose() * sys.C).cast<Complex>() * u)(0).real();
        if (!(den > 1e-300)) throw NonsmoothPoint("degenerate certificate (zero denominator)");
        for (int k = 0; k < np; ++k) {
            Complex num(0.0, 0.0);
            for (const JacEntry& e : pcl.jac[static_cast<std::size_t>(k)])
                num -= phase[static_cast<std::size_t>(e.delay_index)] * e.coeff *
                       std::conj(v(e.row)) * u(e.col);
            g(k) = -2.0 * xi * xi * num.real() / den;
        }
        return g;
    }

    // asymptotic branch
    NullspaceBases bases = validate(sys);
    PartitionedSystem part = partition(sys, bases);
    AsymptoticSystem asys = reduce_delays(part);
    if (asys.ma() != r.theta_hat.size())
        throw NonsmoothPoint("retained delay set changed under the certificate");
    {
        CMat T = ta_eval(asys, r.theta_hat);
        Vec s = T.jacobiSvd().singularValues();
        if (s.size() > 1 && s(0) - s(1) <= 1e-9 * std::max(1.0, s(0)))
            throw NonsmoothPoint("singular value multiplicity above one");
    }
    const CVec& u = r.ta.u_a;
    const CVec& v = r.ta.v_a;
    if (u.size() == 0 || v.size() == 0) throw NonsmoothPoint("missing asymptotic certificate");
    const double den = (v.adjoint() * (asys.B2 * asys.B2.transpose()).cast<Complex>() * v)(0).real() +
                       (u.adjoint() * (asys.C2.transpose() * asys.C2).cast<Complex>() * u)(0).real();
    if (!(den > 1e-300)) throw NonsmoothPoint("degenerate certificate (zero denominator)");

    // phases per delay index: only indices retained in Abb contribute
    std::vector<Complex> phase(sys.A.size(), Complex(0.0, 0.0));
    phase[0] = Complex(1.0, 0.0);
    for (int k = 0; k < asys.ma(); ++k)
        phase[static_cast<std::size_t>(asys.retained[static_cast<std::size_t>(k)])] =
            std::exp(Complex(0.0, -r.theta_hat(k)));

    for (int k = 0; k < np; ++k) {
        Complex num(0.0, 0.0);
        for (const JacEntry& e : pcl.jac[static_cast<std::size_t>(k)]) {
            const Complex ph = phase[static_cast<std::size_t>(e.delay_index)];
            if (ph == Complex(0.0, 0.0)) continue;  // pruned from Abb
            // dAbb/dp entry: -coeff * U.row(row)^T V.row(col) * phase
            const Complex left = (bases.U.row(e.row).cast<Complex>() * v.conjugate())(0);
            const Complex right = (bases.V.row(e.col).cast<Complex>() * u)(0);
            num -= ph * e.coeff * left * right;
        }
        g(k) = -2.0 * xi * xi * num.real() / den;
    }
    return g;
}

namespace {

// Minimum-norm point in the convex hull of the columns of G (MDM iteration).
Vec min_norm_point(const Mat& G) {
    const int m = static_cast<int>(G.cols());
    Vec lam = Vec::Zero(m);
    lam(0) = 1.0;
    for (int it = 0; it < 1000; ++it) {
        Vec w = G * lam;
        Vec scores = G.transpose() * w;
        int imin = 0;
        scores.minCoeff(&imin);
        int imax = 0;
        double worst = -kInf;
        for (int i = 0; i < m; ++i)
            if (lam(i) > 0 && scores(i) > worst) { worst = scores(i); imax = i; }
        const double gap = scores(imax) - scores(imin);
        if (gap <= 1e-14 * std::max(1.0, w.squaredNorm())) break;
        Vec d = G.col(imax) - G.col(imin);
        const double dd = d.squaredNorm();
        if (dd <= 0) break;
        double t = std::min(lam(imax), gap / dd);
        lam(imax) -= t;
        lam(imin) += t;
    }
    return G * lam;
}

struct EvalCache {
    double f = kInf;
    bool has_grad = false;
    Vec g;
    ObjectiveEval ev;
};

}  // namespace

OptimizeResult optimize(const ParamClosedLoop& pcl, const Vec& p0, const OptimizeOptions& opts) {
    const int dim = pcl.param_count();
    if (p0.size() != dim) throw DimensionMismatch("p0 length mismatch");

    auto eval_point = [&](const Vec& p) {
        EvalCache c;
        c.ev = objective(pcl, p, opts.norm);
        c.f = c.ev.finite ? c.ev.xi : kInf;
        if (c.ev.finite) {
            try {
                c.g = gradient(pcl, p, c.ev);
                c.has_grad = true;
            } catch (const NonsmoothPoint&) {
                c.has_grad = false;
            }
        }
        return c;
    };

    OptimizeResult out;
    Vec x = p0;
    EvalCache cur = eval_point(x);
    if (!std::isfinite(cur.f)) throw InfeasibleStart("objective infinite at p0: " + cur.ev.failure_reason);
    out.trace.push_back({x, cur.f, cur.ev.result.branch, 1});

    Vec best_x = x;
    double best_f = cur.f;
    int evals = 1;

    // ---- phase 1: BFGS with weak Wolfe line search ----
    Mat H = Mat::Identity(dim, dim);
    bool grad_ok = cur.has_grad;
    for (int it = 0; it < opts.max_iter && grad_ok; ++it) {
        Vec d = -(H * cur.g);
        if (d.dot(cur.g) >= 0) {
            H.setIdentity();
            d = -cur.g;
        }
        const double g0d = cur.g.dot(d);
        if (!(g0d < 0)) break;

        double lo = 0.0, hi = kInf, t = 1.0;
        EvalCache trial;
        bool accepted = false, hit_nonsmooth = false;
        for (int ls = 0; ls < 40; ++ls) {
            trial = eval_point(x + t * d);
            ++evals;
            const bool armijo = std::isfinite(trial.f) && trial.f <= cur.f + opts.c1 * t * g0d;
            if (!armijo) {
                hi = t;
            } else if (trial.has_grad && trial.g.dot(d) < opts.c2 * g0d) {
                lo = t;
            } else {
                if (!trial.has_grad) hit_nonsmooth = true;
                accepted = true;
                break;
            }
            t = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * std::max(lo, 0.5);
            if (t <= 1e-16) break;
        }
        if (!accepted) break;

        Vec s = t * d;
        Vec xn = x + s;
        if (trial.f < best_f) { best_f = trial.f; best_x = xn; }
        out.trace.push_back({xn, trial.f, trial.ev.result.branch, 1});

        if (trial.has_grad) {
            Vec y = trial.g - cur.g;
            const double sy = s.dot(y);
            if (sy > 1e-10 * s.norm() * y.norm()) {
                Mat I = Mat::Identity(dim, dim);
                const double rho = 1.0 / sy;
                H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
                    rho * s * s.transpose();
            }
        }
        const double snorm = s.norm();
        x = xn;
        cur = trial;
        grad_ok = cur.has_grad && !hit_nonsmooth;
        if (snorm < opts.step_tol * (1.0 + x.norm())) break;
        if (evals >= opts.max_iter * 4) break;
    }

    // ---- phase 2: gradient sampling from the BFGS endpoint ----
    std::mt19937_64 rng(opts.rng_seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto ball_sample = [&](double radius) {
        Vec z(dim);
        for (int i = 0; i < dim; ++i) z(i) = gauss(rng);
        double nz = z.norm();
        if (nz == 0) return Vec(Vec::Zero(dim));
        const double r = radius * std::pow(unif(rng), 1.0 / dim);
        return Vec(z * (r / nz));
    };

    const double scale = 1.0 + p0.norm();
    for (double radius0 : opts.gs_radii) {
        const double radius = radius0 * scale;
        for (int step = 0; step < opts.gs_steps_per_radius; ++step) {
            std::vector<Vec> grads;
            if (cur.has_grad) grads.push_back(cur.g);
            int tries = 0;
            while (static_cast<int>(grads.size()) < 2 * dim + (cur.has_grad ? 1 : 0) && tries < 6 * dim + 12) {
                ++tries;
                Vec xp = x + ball_sample(radius);
                EvalCache c = eval_point(xp);
                ++evals;
                if (c.has_grad) grads.push_back(c.g);
            }
            if (grads.empty()) break;
            Mat G(dim, static_cast<int>(grads.size()));
            for (std::size_t i = 0; i < grads.size(); ++i) G.col(static_cast<int>(i)) = grads[i];
            Vec gmin = min_norm_point(G);
            if (gmin.norm() <= 1e-6 * (1.0 + std::abs(cur.f))) break;  // stationary at this radius
            Vec d = -gmin / gmin.norm();

            double t = radius;
            bool moved = false;
            for (int bt = 0; bt < 30; ++bt) {
                EvalCache c = eval_point(x + t * d);
                ++evals;
                if (std::isfinite(c.f) && c.f < cur.f - opts.c1 * t * gmin.norm()) {
                    x += t * d;
                    cur = c;
                    moved = true;
                    if (cur.f < best_f) { best_f = cur.f; best_x = x; }
                    out.trace.push_back({x, cur.f, cur.ev.result.branch, 2});
                    break;
                }
                t *= 0.5;
                if (t < 1e-14 * scale) break;
            }
            if (!moved) break;
            if (evals >= opts.max_iter * 8) break;
        }
    }

    out.p_star = best_x;
    out.xi_star = best_f;
    return out;
}

}  // namespace ddae
