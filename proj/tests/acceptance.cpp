// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each check pins its tolerance in code.

#include "ddae/asymptotic.hpp"
#include "ddae/bench.hpp"
#include "ddae/levelset.hpp"
#include "ddae/model.hpp"
#include "ddae/synthesis.hpp"
#include "test_systems.hpp"

#include "ddae/qz.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace ddae;

namespace {

int g_failures = 0;

struct Criterion {
    std::string label;
    bool ok = true;
    std::string detail;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    explicit Criterion(std::string l) : label(std::move(l)) {}
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
    ~Criterion() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", label.c_str(), secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        if (!ok) ++g_failures;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

AsymptoticSystem asym_of(const DdaeSystem& s) {
    return reduce_delays(partition(s, validate(s)));
}

void criterion_1() {
    Criterion c("1: asymptotic strong norm of the two-delay loop equals 4");
    TaNormResult r = strong_norm_ta(asym_of(fixtures::benchmark_loop()), 20, true);
    c.expect(std::abs(r.value - 4.0) <= 1e-6, "value " + fmt(r.value));
}

void criterion_2() {
    Criterion c("2: asymptotic strong norm of the level-demo loop equals 16/7");
    TaNormResult r = strong_norm_ta(asym_of(fixtures::level_demo_loop()), 20, true);
    c.expect(std::abs(r.value - 16.0 / 7.0) <= 1e-6, "value " + fmt(r.value));
}

void criterion_3() {
    Criterion c("3: diagnostic plain norm 2.5788 at omega 1.6555");
    PlainNormResult r = plain_hinf_norm(fixtures::benchmark_loop(), {});
    c.expect(std::abs(r.value - 2.5788) <= 5e-3, "value " + fmt(r.value));
    c.expect(std::abs(r.omega - 1.6555) <= 5e-3, "omega " + fmt(r.omega));
}

void criterion_4() {
    Criterion c("4: delay-perturbation discontinuity study");
    // certified peak pairs reported for the perturbed delay vectors
    {
        DdaeSystem s = fixtures::benchmark_loop(0.99, 2.0);
        PeakResult pk = correct_peak(s, 158.66, sigma1(s, 158.66));
        c.expect(std::abs(pk.xi - 3.9993) <= 5e-3, "peak value " + fmt(pk.xi) + " at 158.66");
        c.expect(std::abs(pk.omega - 158.6569) <= 5e-2, "peak omega " + fmt(pk.omega));
        PlainNormOptions po;
        po.points = 20000;
        PlainNormResult plain = plain_hinf_norm(s, po);
        c.expect(std::abs(plain.value - 3.9993) <= 5e-3, "plain value " + fmt(plain.value));
        if (std::abs(plain.omega - 158.6569) > 5e-2)
            c.note("global sweep peak sits at omega " + fmt(plain.omega) + " (" + fmt(plain.value) +
                   "), above the first tall comb peak the study quotes");
    }
    {
        DdaeSystem s = fixtures::benchmark_loop(0.999, 2.0);
        PeakResult pk = correct_peak(s, 1515.8, sigma1(s, 1515.8));
        c.expect(std::abs(pk.xi - 3.9944) <= 5e-3, "peak value " + fmt(pk.xi) + " at 1515.8");
        c.expect(std::abs(pk.omega - 1515.8091) <= 5e-2, "peak omega " + fmt(pk.omega));
    }
    for (auto [t1, t2] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {0.99, 2.0}, {0.999, 2.0}}) {
        StrongNormResult r = strong_hinf_norm(fixtures::benchmark_loop(t1, t2), {});
        c.expect(std::abs(r.value - 4.0) <= 1e-3,
                 "strong norm " + fmt(r.value) + " at delays (" + fmt(t1) + ", " + fmt(t2) + ")");
    }
}

void criterion_5() {
    Criterion c("5: full level iteration on the level-demo loop");
    LevelSetOptions opts;  // N = 20, tol = 1e-3
    opts.auto_seeds = false;
    StrongNormResult r = strong_hinf_norm(fixtures::level_demo_loop(), opts);
    c.expect(r.levels.size() >= 3, "trace too short");
    if (r.levels.size() >= 3) {
        c.expect(std::abs(r.levels[0].level - 2.2903) <= 2e-3, "first level " + fmt(r.levels[0].level));
        c.expect(r.levels[0].crossings.size() == 2, "first level crossing count");
        if (r.levels[0].crossings.size() == 2) {
            c.expect(std::abs(r.levels[0].crossings[0] - 1.6600) <= 2e-3,
                     "crossing " + fmt(r.levels[0].crossings[0]));
            c.expect(std::abs(r.levels[0].crossings[1] - 1.8786) <= 2e-3,
                     "crossing " + fmt(r.levels[0].crossings[1]));
        }
        c.expect(std::abs(r.levels[1].level - 2.3903) <= 2e-3, "second level " + fmt(r.levels[1].level));
        c.expect(r.levels[2].crossings.size() == 2, "bracketing crossing count");
        if (r.levels[2].crossings.size() == 2) {
            c.expect(std::abs(r.levels[2].crossings[0] - 1.7656) <= 2e-3,
                     "bracket " + fmt(r.levels[2].crossings[0]));
            c.expect(std::abs(r.levels[2].crossings[1] - 1.7786) <= 2e-3,
                     "bracket " + fmt(r.levels[2].crossings[1]));
        }
    }
    c.expect(std::abs(r.value - 2.3859) <= 1e-3, "corrected value " + fmt(r.value));
    c.expect(std::abs(r.omega_hat - 1.7721) <= 1e-3, "corrected omega " + fmt(r.omega_hat));
}

void criterion_6() {
    Criterion c("6: scalar gain synthesis from K = -7.4");
    ParamClosedLoop pcl = assemble(fixtures::scalar_plant(), fixtures::scalar_gain_template(-7.4));
    OptimizeOptions oo;
    oo.rng_seed = 1;
    OptimizeResult res = optimize(pcl, Vec::Constant(1, -7.4), oo);
    c.expect(res.xi_star <= 0.2237, "final value " + fmt(res.xi_star));
    c.expect(std::abs(res.p_star(0) + 0.8813) <= 0.05, "final gain " + fmt(res.p_star(0)));
}

void criterion_7() {
    Criterion c("7: two-gain synthesis");
    ParamClosedLoop pcl = assemble(fixtures::two_gain_plant(), fixtures::two_gain_template(0.25, -0.5));
    Vec popt(2);
    popt << -0.3533, -0.1012;
    ObjectiveEval at_opt = objective(pcl, popt);
    c.expect(at_opt.finite && std::abs(at_opt.xi - 1.8333) <= 1e-2,
             "objective at the published gains " + fmt(at_opt.xi));
    Vec p0(2);
    p0 << 0.25, -0.5;
    OptimizeOptions oo;
    oo.rng_seed = 2;
    OptimizeResult res = optimize(pcl, p0, oo);
    c.expect(res.xi_star <= 1.8433, "optimized value " + fmt(res.xi_star));
}

double bench_value(const BenchCase& bc, std::size_t row, std::string* err) {
    try {
        ParamClosedLoop pcl = assemble(bc.plant, bc.rows[row].ctrl);
        DdaeSystem sys = instantiate(pcl, Vec::Zero(pcl.param_count()));
        return strong_hinf_norm(sys, bc.opts).value;
    } catch (const DdaeError& e) {
        if (err != nullptr) *err = e.what();
        return std::nan("");
    }
}

void criterion_8() {
    Criterion c("8: published-controller evaluations");
    struct Item {
        const char* bench;
        std::size_t row;
        double expect, tol;
    };
    const Item items[] = {
        {"c2_fridman1998_ex1", 0, 0.4005, 1e-2},
        {"c3_fridman_ex2", 0, 2.9091, 5e-2},
        {"c6_robust", 0, 3.3145, 1e-2},
        {"c7_heat11", 0, 386.3491, 1.0},
        {"c8_bfg_ex2", 0, 1.3907, 1e-2},
        {"c8_bfg_ex2", 1, 1.2513, 1e-2},
    };
    for (const Item& it : items) {
        const BenchCase* bc = find_bench(it.bench);
        if (bc == nullptr || it.row >= bc->rows.size()) {
            c.expect(false, std::string(it.bench) + ": missing registry entry");
            continue;
        }
        std::string err;
        const double got = bench_value(*bc, it.row, &err);
        const bool pass = std::isfinite(got) && std::abs(got - it.expect) <= it.tol;
        c.expect(pass, std::string(it.bench) + "/" + bc->rows[it.row].label + " achieved " +
                           (std::isfinite(got) ? fmt(got) : ("error: " + err)) + " vs published " +
                           fmt(it.expect) + " +- " + fmt(it.tol));
    }
    c.note("the heat-transfer source omits the input column and duplicates one "
           "diagonal entry; see the bench note for the transcription analysis");
}

void criterion_9() {
    Criterion c("9: pencil spectrum symmetry on the four-state benchmark plant");
    const BenchCase* bc = find_bench("c8_bfg_ex2");
    ParamClosedLoop pcl = assemble(bc->plant, bc->rows[0].ctrl);
    DdaeSystem sys = instantiate(pcl, Vec::Zero(pcl.param_count()));
    DiscretizedSystem disc = build(sys, 20);
    auto [P, Q] = level_pencil(disc, 2.0);
    std::vector<Complex> lam;
    for (const Complex& l : generalized_eigenvalues(std::move(P), std::move(Q)))
        if (std::abs(l) < 1e6) lam.push_back(l);
    c.expect(!lam.empty(), "no finite eigenvalues");
    double worst = 0.0;
    for (const Complex& l : lam) {
        const Complex target = -std::conj(l);
        double dist = 1e300;
        for (const Complex& o : lam) dist = std::min(dist, std::abs(o - target));
        worst = std::max(worst, dist / std::max(1.0, std::abs(l)));
    }
    c.expect(worst <= 1e-8, "worst relative asymmetry " + fmt(worst));
}

void criterion_10() {
    Criterion c("10: gradients against central finite differences");
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> span(-7.0, 1.2);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    int checked = 0;
    double worst = 0.0;

    ParamClosedLoop scalar = assemble(fixtures::scalar_plant(), fixtures::scalar_gain_template(0.0));
    int made = 0;
    while (made < 12) {
        Vec p = Vec::Constant(1, span(rng));
        ObjectiveEval ev = objective(scalar, p);
        if (!ev.finite) continue;
        Vec g;
        try {
            g = gradient(scalar, p, ev);
        } catch (const NonsmoothPoint&) {
            continue;
        }
        const double h = 1e-6 * (1.0 + p.norm());
        double fp = objective(scalar, Vec(p.array() + h)).xi;
        double fm = objective(scalar, Vec(p.array() - h)).xi;
        if (!std::isfinite(fp) || !std::isfinite(fm)) continue;
        const double fd = (fp - fm) / (2 * h);
        const double rel = std::abs(g(0) - fd) / std::max(1e-12, std::abs(fd));
        worst = std::max(worst, rel);
        ++made;
        ++checked;
    }

    const BenchCase* bc = find_bench("c8_bfg_ex2");
    ParamClosedLoop pc8 = assemble(bc->plant, bc->rows[1].ctrl);  // frozen published order-1
    // re-open the published controller as a fully free order-1 template
    ControllerTemplate freec;
    freec.nK = 1;
    freec.AK.push_back(ControllerTemplate::free_term(0.0, 1, 1));
    freec.BK.push_back(ControllerTemplate::free_term(0.0, 1, 1));
    freec.CK.push_back(ControllerTemplate::free_term(0.0, 1, 1));
    freec.DK.push_back(ControllerTemplate::free_term(0.0, 1, 1));
    Vec base(4);
    base << -0.3068, 0.9590, 0.0166, 0.0186;
    freec.p0 = base;
    ParamClosedLoop pfree = assemble(bc->plant, freec);
    made = 0;
    while (made < 8) {
        Vec p = base;
        for (int i = 0; i < 4; ++i) p(i) += jitter(rng);
        ObjectiveEval ev = objective(pfree, p);
        if (!ev.finite) continue;
        Vec g;
        try {
            g = gradient(pfree, p, ev);
        } catch (const NonsmoothPoint&) {
            continue;
        }
        const double h = 1e-6 * (1.0 + p.norm());
        bool good = true;
        for (int i = 0; i < 4 && good; ++i) {
            Vec pp = p, pm = p;
            pp(i) += h;
            pm(i) -= h;
            const double fp = objective(pfree, pp).xi;
            const double fm = objective(pfree, pm).xi;
            if (!std::isfinite(fp) || !std::isfinite(fm)) { good = false; break; }
            const double fd = (fp - fm) / (2 * h);
            const double rel = std::abs(g(i) - fd) / std::max(1e-7, std::abs(fd));
            worst = std::max(worst, rel);
        }
        if (!good) continue;
        ++made;
        ++checked;
    }
    c.expect(checked >= 20, "only " + std::to_string(checked) + " smooth points checked");
    c.expect(worst <= 1e-5, "worst relative gradient error " + fmt(worst));
}

void criterion_11() {
    Criterion c("11: delay invariance of the asymptotic strong norm");
    double ref = -1.0;
    for (auto [t1, t2] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {0.3, 5.7}, {M_PI, M_E}}) {
        TaNormResult r = strong_norm_ta(asym_of(fixtures::benchmark_loop(t1, t2)), 20, true);
        if (ref < 0)
            ref = r.value;
        else
            c.expect(std::abs(r.value - ref) <= 1e-12,
                     "value drifted by " + fmt(std::abs(r.value - ref)));
    }
}

void criterion_12() {
    Criterion c("12: discretization exactness and convergence");
    DdaeSystem lti;
    lti.n = 2;
    lti.E = Mat::Identity(2, 2);
    lti.A = {fixtures::mk({{-1, 2}, {0, -3}})};
    lti.B = fixtures::mk({{1}, {1}});
    lti.C = fixtures::mk({{1, 0}});
    for (int N : {5, 20}) {
        DiscretizedSystem d = build(lti, N);
        double worst = 0.0;
        for (double w : {0.0, 0.9, 7.0}) {
            CMat e = transfer(lti, Complex(0.0, w));
            CMat a = tn_eval(d, Complex(0.0, w));
            worst = std::max(worst, (e - a).norm());
        }
        c.expect(worst <= 1e-12, "delay-free error " + fmt(worst) + " at N " + std::to_string(N));
    }
    DdaeSystem s = fixtures::benchmark_loop();
    const double wref = 1.6555;
    const double exact = std::abs(transfer(s, Complex(0.0, wref))(0, 0));
    const double e5 = std::abs(tn_sigma1(build(s, 5), wref) - exact);
    const double e10 = std::abs(tn_sigma1(build(s, 10), wref) - exact);
    const double e20 = std::abs(tn_sigma1(build(s, 20), wref) - exact);
    c.expect(e10 <= e5 / 10.0, "N 5 -> 10 factor " + fmt(e5 / std::max(e10, 1e-300)));
    c.expect(e20 <= e10 / 10.0, "N 10 -> 20 factor " + fmt(e10 / std::max(e20, 1e-300)));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
