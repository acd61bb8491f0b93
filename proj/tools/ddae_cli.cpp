#include "ddae/asymptotic.hpp"
#include "ddae/bench.hpp"
#include "ddae/interconnect.hpp"
#include "ddae/json_io.hpp"
#include "ddae/levelset.hpp"
#include "ddae/model.hpp"
#include "ddae/stability.hpp"
#include "ddae/synthesis.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace ddae;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitUnstable = 3;

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

std::vector<double> make_grid(double wmin, double wmax, int points, bool log_grid) {
    std::vector<double> g;
    if (points < 1) return g;
    if (points == 1) return {wmin};
    g.reserve(static_cast<std::size_t>(points));
    if (log_grid) {
        const double llo = std::log(wmin), lhi = std::log(wmax);
        for (int i = 0; i < points; ++i)
            g.push_back(std::exp(llo + (lhi - llo) * i / (points - 1)));
    } else {
        for (int i = 0; i < points; ++i)
            g.push_back(wmin + (wmax - wmin) * i / (points - 1));
    }
    return g;
}

int cmd_validate(const std::string& path) {
    DdaeSystem sys = load_ddae_json(path);
    try {
        NullspaceBases b = validate(sys);
        std::printf("n = %d, rank(E) = %d, nullity = %d\n", sys.n, sys.n - b.nu, b.nu);
        std::printf("compressed A0 block nonsingular: yes\n");
        return kExitOk;
    } catch (const DdaeError& e) {
        std::fprintf(stderr, "invalid: %s\n", e.what());
        return kExitInput;
    }
}

json norm_to_json(const StrongNormResult& r) {
    json j;
    j["norm"] = r.value;
    j["branch"] = r.branch == NormBranch::Asymptotic ? "asymptotic" : "frequency";
    if (r.branch == NormBranch::Frequency) {
        j["omega_hat"] = r.omega_hat;
    } else {
        j["theta_hat"] = std::vector<double>(r.theta_hat.data(), r.theta_hat.data() + r.theta_hat.size());
    }
    j["corrected"] = r.corrected;
    j["levels"] = r.iterations;
    j["ta_norm"] = r.ta.value;
    j["warnings"] = r.warnings;
    return j;
}

int cmd_norm(const std::string& path, const LevelSetOptions& opts, bool plain,
             const PlainNormOptions& popts, bool as_json) {
    DdaeSystem sys = load_ddae_json(path);
    const double t0 = now_ms();
    if (plain) {
        PlainNormResult r = plain_hinf_norm(sys, popts);
        if (as_json) {
            json j;
            j["plain_norm"] = r.value;
            j["omega"] = r.omega;
            j["corrected"] = r.corrected;
            j["wall_ms"] = now_ms() - t0;
            std::printf("%s\n", j.dump(2).c_str());
        } else {
            std::printf("plain H-infinity norm (diagnostic, delay-fragile): %.10g at omega = %.10g%s\n",
                        r.value, r.omega, r.corrected ? "" : " (grid value, correction failed)");
        }
        return kExitOk;
    }
    StrongNormResult r = strong_hinf_norm(sys, opts);
    if (as_json) {
        json j = norm_to_json(r);
        j["wall_ms"] = now_ms() - t0;
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        std::printf("strong H-infinity norm: %.10g\n", r.value);
        if (r.branch == NormBranch::Asymptotic) {
            std::printf("branch: asymptotic (high-frequency)\n");
            std::ostringstream os;
            for (int i = 0; i < r.theta_hat.size(); ++i) os << (i ? ", " : "") << r.theta_hat(i);
            std::printf("theta_hat: [%s]\n", os.str().c_str());
        } else {
            std::printf("branch: frequency\n");
            std::printf("omega_hat: %.10g\n", r.omega_hat);
        }
        std::printf("corrected: %s, prediction levels: %d, T_a strong norm: %.10g\n",
                    r.corrected ? "yes" : "no", r.iterations, r.ta.value);
        for (const std::string& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    }
    return kExitOk;
}

int cmd_ta_norm(const std::string& path, int p_a, bool no_correct, bool as_json) {
    DdaeSystem sys = load_ddae_json(path);
    NullspaceBases b = validate(sys);
    AsymptoticSystem asys = reduce_delays(partition(sys, b));
    TaNormResult r = strong_norm_ta(asys, p_a, !no_correct);
    if (as_json) {
        json j;
        j["ta_norm"] = r.value;
        j["theta_hat"] = std::vector<double>(r.theta_hat.data(), r.theta_hat.data() + r.theta_hat.size());
        j["corrected"] = r.corrected;
        j["retained_delays"] = asys.retained;
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        std::printf("strong H-infinity norm of T_a: %.10g (m_a = %d, corrected: %s)\n",
                    r.value, asys.ma(), r.corrected ? "yes" : "no");
    }
    return kExitOk;
}

int cmd_sweep(const std::string& path, double wmin, double wmax, int points, bool log_grid,
              int nsig, const std::string& out) {
    if (!(wmax > wmin) || points < 1) {
        std::fprintf(stderr, "usage error: need wmin < wmax and points >= 1\n");
        return kExitInput;
    }
    if (log_grid && wmin <= 0) {
        std::fprintf(stderr, "usage error: log grid needs wmin > 0\n");
        return kExitInput;
    }
    DdaeSystem sys = load_ddae_json(path);
    validate(sys);
    SigmaCurve curve = sigma_sweep(sys, make_grid(wmin, wmax, points, log_grid), nsig);
    std::ostream* os = &std::cout;
    std::ofstream f;
    if (!out.empty()) {
        f.open(out);
        if (!f) {
            std::fprintf(stderr, "cannot write %s\n", out.c_str());
            return kExitInput;
        }
        os = &f;
    }
    (*os) << "omega";
    for (int k = 0; k < nsig; ++k) (*os) << ",sigma" << (k + 1);
    (*os) << "\n";
    char buf[64];
    for (std::size_t i = 0; i < curve.omega.size(); ++i) {
        if (curve.skipped[i]) continue;
        std::snprintf(buf, sizeof(buf), "%.9g", curve.omega[i]);
        (*os) << buf;
        for (std::size_t k = 0; k < curve.sigma[i].size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.9g", curve.sigma[i][k]);
            (*os) << "," << buf;
        }
        (*os) << "\n";
    }
    int skipped = 0;
    for (bool s : curve.skipped) skipped += s ? 1 : 0;
    if (skipped > 0) std::fprintf(stderr, "warning: %d grid points skipped (singular)\n", skipped);
    return kExitOk;
}

int cmd_assemble(const std::string& plant_path, const std::string& ctrl_path,
                 const std::string& pstr, const std::string& out) {
    PlantSpec plant = load_plant_json(plant_path);
    ControllerTemplate ctrl = load_template_json(ctrl_path);
    ParamClosedLoop pcl = assemble(plant, ctrl);
    Vec p = ctrl.p0.size() ? ctrl.p0 : Vec::Zero(pcl.param_count());
    if (!pstr.empty()) {
        std::vector<double> vals;
        std::stringstream ss(pstr);
        std::string tok;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        p = Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
    }
    DdaeSystem sys = instantiate(pcl, p);
    validate(sys);
    if (out.empty()) {
        std::printf("%s\n", ddae_to_json(sys).c_str());
    } else {
        save_ddae_json(sys, out);
        std::printf("wrote %s (n = %d, m = %d, parameters = %d)\n", out.c_str(), sys.n, sys.m(),
                    pcl.param_count());
    }
    return kExitOk;
}

int cmd_stability(const std::string& path, int N, int p_a) {
    DdaeSystem sys = load_ddae_json(path);
    StabilityReport rep = check_strong_stability(sys, N, p_a);
    std::printf("spectral abscissa estimate: %.6g\n", rep.spectral_abscissa);
    std::printf("difference-part delay-robust radius: %.6g\n", rep.difference_radius);
    std::printf("strongly exponentially stable: %s\n", rep.stable ? "yes" : "no");
    return rep.stable ? kExitOk : kExitUnstable;
}

int cmd_synthesize(const std::string& plant_path, const std::string& tmpl_path,
                   unsigned long long seed, int max_iter, const LevelSetOptions& nopts,
                   const std::string& out) {
    PlantSpec plant = load_plant_json(plant_path);
    ControllerTemplate tmpl = load_template_json(tmpl_path);
    ParamClosedLoop pcl = assemble(plant, tmpl);
    Vec p0 = tmpl.p0.size() ? tmpl.p0 : Vec::Zero(pcl.param_count());
    OptimizeOptions oo;
    oo.rng_seed = seed;
    if (max_iter > 0) oo.max_iter = max_iter;
    oo.norm = nopts;
    OptimizeResult res = optimize(pcl, p0, oo);
    json j;
    j["xi_star"] = res.xi_star;
    j["p_star"] = std::vector<double>(res.p_star.data(), res.p_star.data() + res.p_star.size());
    json tr = json::array();
    for (const TracePoint& t : res.trace) {
        json e;
        e["p"] = std::vector<double>(t.p.data(), t.p.data() + t.p.size());
        e["xi"] = t.xi;
        e["branch"] = t.branch == NormBranch::Asymptotic ? "asymptotic" : "frequency";
        e["phase"] = t.phase;
        tr.push_back(std::move(e));
    }
    j["trace"] = std::move(tr);
    if (out.empty()) {
        std::printf("%s\n", j.dump(2).c_str());
    } else {
        std::ofstream f(out);
        if (!f) {
            std::fprintf(stderr, "cannot write %s\n", out.c_str());
            return kExitInput;
        }
        f << j.dump(2) << "\n";
        std::printf("best value %.8g at p = [", res.xi_star);
        for (int i = 0; i < res.p_star.size(); ++i)
            std::printf("%s%.6g", i ? ", " : "", res.p_star(i));
        std::printf("]; trace written to %s\n", out.c_str());
    }
    return kExitOk;
}

void run_bench_row(const PlantSpec& plant, const BenchRow& row, const LevelSetOptions& opts,
                   const char* tag) {
    try {
        ParamClosedLoop pcl = assemble(plant, row.ctrl);
        DdaeSystem sys = instantiate(pcl, Vec::Zero(pcl.param_count()));
        StrongNormResult r = strong_hinf_norm(sys, opts);
        std::printf("  %-18s %-12s achieved %.6f   published %.6f   |diff| %.4g\n", tag,
                    row.label.c_str(), r.value, row.published, std::abs(r.value - row.published));
    } catch (const NotStable& e) {
        std::printf("  %-18s %-12s not strongly stable (%s); published %.6f not reproducible\n",
                    tag, row.label.c_str(), e.what(), row.published);
    } catch (const DdaeError& e) {
        std::printf("  %-18s %-12s failed: %s\n", tag, row.label.c_str(), e.what());
    }
}

int cmd_bench(const std::string& name, bool all_variants) {
    if (name == "--list" || name == "list") {
        for (const BenchCase& c : bench_registry())
            std::printf("%-22s %s\n", c.name.c_str(), c.description.c_str());
        return kExitOk;
    }
    const BenchCase* c = find_bench(name);
    if (c == nullptr) {
        std::fprintf(stderr, "unknown benchmark '%s' (try: bench list)\n", name.c_str());
        return kExitInput;
    }
    std::printf("%s: %s\n", c->name.c_str(), c->description.c_str());
    if (!c->note.empty()) std::printf("note: %s\n", c->note.c_str());
    for (const BenchRow& row : c->rows) run_bench_row(c->plant, row, c->opts, "primary");
    if (all_variants) {
        for (const auto& [label, variant] : c->variants)
            for (const BenchRow& row : c->rows) run_bench_row(variant, row, c->opts, label.c_str());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strong H-infinity norms and fixed-structure synthesis for delay descriptor systems"};
    app.require_subcommand(1);

    std::string path, plant_path, ctrl_path, out, pstr, bench_name = "list";
    LevelSetOptions lsopts;
    PlainNormOptions popts;
    bool plain = false, as_json = false, no_correct = false, no_seeds = false, all_variants = false;
    double wmin = 1e-2, wmax = 1e2;
    int points = 400, nsig = 1, p_a = 20, N = 20, max_iter = 0;
    bool log_grid = false;
    unsigned long long seed = 0;

    auto* v = app.add_subcommand("validate", "check structure and the index-one assumption");
    v->add_option("path", path, "DDAE JSON document")->required();

    auto* nrm = app.add_subcommand("norm", "strong H-infinity norm (Algorithm-style predictor-corrector)");
    nrm->add_option("path", path)->required();
    nrm->add_option("--N", lsopts.N, "discretization order");
    nrm->add_option("--tol", lsopts.tol, "prediction tolerance");
    nrm->add_option("--grid", lsopts.p_a, "T_a sweep points per axis");
    nrm->add_option("--axis-tol", lsopts.axis_tol, "imaginary-axis filter");
    nrm->add_flag("--plain", plain, "diagnostic plain norm (asymptotic floor removed)");
    nrm->add_flag("--no-seeds", no_seeds, "skip the automatic seed sweep");
    nrm->add_option("--wmin", popts.wmin, "plain mode: sweep start");
    nrm->add_option("--wmax", popts.wmax, "plain mode: sweep end");
    nrm->add_option("--points", popts.points, "plain mode: sweep points");
    nrm->add_flag("--linear", "plain mode: linear instead of log grid");
    nrm->add_flag("--json", as_json, "machine-readable output");

    auto* ta = app.add_subcommand("ta-norm", "strong norm of the asymptotic transfer function");
    ta->add_option("path", path)->required();
    ta->add_option("--grid", p_a, "sweep points per axis");
    ta->add_flag("--no-correct", no_correct, "skip the Gauss-Newton refinement");
    ta->add_flag("--json", as_json);

    auto* sw = app.add_subcommand("sweep", "singular-value sweep to CSV");
    sw->add_option("path", path)->required();
    sw->add_option("--wmin", wmin)->required();
    sw->add_option("--wmax", wmax)->required();
    sw->add_option("--points", points);
    sw->add_flag("--log", log_grid, "logarithmic grid");
    sw->add_option("-k,--sigmas", nsig, "number of singular values per row");
    sw->add_option("-o,--out", out, "output CSV (stdout if omitted)");

    auto* as = app.add_subcommand("assemble", "close a plant/controller pair into standard form");
    as->add_option("plant", plant_path)->required();
    as->add_option("controller", ctrl_path)->required();
    as->add_option("-p,--params", pstr, "comma-separated parameter values");
    as->add_option("-o,--out", out, "output DDAE JSON");

    auto* sy = app.add_subcommand("synthesize", "minimize the closed-loop strong norm");
    sy->add_option("plant", plant_path)->required();
    sy->add_option("template", ctrl_path)->required();
    sy->add_option("--seed", seed, "random seed for gradient sampling");
    sy->add_option("--max-iter", max_iter);
    sy->add_option("--N", lsopts.N);
    sy->add_option("--tol", lsopts.tol);
    sy->add_option("-o,--out", out, "result JSON path");

    auto* st = app.add_subcommand("stability", "strong exponential stability screen");
    st->add_option("path", path)->required();
    st->add_option("--N", N);
    st->add_option("--grid", p_a);

    auto* be = app.add_subcommand("bench", "run an embedded benchmark (or 'list')");
    be->add_option("name", bench_name);
    be->add_flag("--all", all_variants, "also evaluate transcription variants");

    CLI11_PARSE(app, argc, argv);

    try {
        if (v->parsed()) return cmd_validate(path);
        if (nrm->parsed()) {
            lsopts.auto_seeds = !no_seeds;
            popts.log_grid = nrm->count("--linear") == 0;
            return cmd_norm(path, lsopts, plain, popts, as_json);
        }
        if (ta->parsed()) return cmd_ta_norm(path, p_a, no_correct, as_json);
        if (sw->parsed()) return cmd_sweep(path, wmin, wmax, points, log_grid, nsig, out);
        if (as->parsed()) return cmd_assemble(plant_path, ctrl_path, pstr, out);
        if (sy->parsed()) return cmd_synthesize(plant_path, ctrl_path, seed, max_iter, lsopts, out);
        if (st->parsed()) return cmd_stability(path, N, p_a);
        if (be->parsed()) return cmd_bench(bench_name, all_variants);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInput;
    } catch (const DimensionMismatch& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInput;
    } catch (const NonpositiveDelay& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return kExitInput;
    } catch (const AssumptionOneViolated& e) {
        std::fprintf(stderr, "invalid system: %s\n", e.what());
        return kExitInput;
    } catch (const NotStable& e) {
        std::fprintf(stderr, "instability: %s\n", e.what());
        return kExitUnstable;
    } catch (const InfeasibleStart& e) {
        std::fprintf(stderr, "instability: %s\n", e.what());
        return kExitUnstable;
    } catch (const DdaeError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kExitNumerical;
    }
    return kExitOk;
}
