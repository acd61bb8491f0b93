#pragma once

#include "ddae/interconnect.hpp"
#include "ddae/levelset.hpp"
#include "ddae/stability.hpp"
#include "ddae/types.hpp"

namespace ddae {

// One closed-loop norm evaluation. xi is +inf (finite == false) when the
// instantiated loop is invalid or not strongly stable; the norm result and
// its certificate are meaningful only when finite.
struct ObjectiveEval {
    double xi = 0.0;
    bool finite = false;
    StrongNormResult result;
    std::string failure_reason;
};

struct OptimizeOptions {
    int max_iter = 400;
    double c1 = 1e-4;  // Armijo constant
    double c2 = 0.5;   // weak Wolfe curvature constant
    std::vector<double> gs_radii{1e-2, 1e-3, 1e-4};  // scaled by (1 + |p0|)
    int gs_steps_per_radius = 30;
    unsigned long long rng_seed = 0;
    double step_tol = 1e-8;
    LevelSetOptions norm;
};

struct TracePoint {
    Vec p;
    double xi = 0.0;
    NormBranch branch = NormBranch::Frequency;
    int phase = 1;  // 1 = BFGS, 2 = gradient sampling
};

struct OptimizeResult {
    Vec p_star;
    double xi_star = 0.0;
    std::vector<TracePoint> trace;
};

ObjectiveEval objective(const ParamClosedLoop& pcl, const Vec& p, const LevelSetOptions& opts = {});

// Derivative of the strong norm with respect to the controller parameters at
// a smooth point. Throws NonsmoothPoint on branch ties, peak ties or a
// singular-value multiplicity above one.
Vec gradient(const ParamClosedLoop& pcl, const Vec& p, const ObjectiveEval& eval);

// Two-phase minimization: BFGS with a weak Wolfe line search, then gradient
// sampling over a shrinking radius schedule. Requires a strongly stabilizing
// start. Deterministic for a fixed rng_seed.
OptimizeResult optimize(const ParamClosedLoop& pcl, const Vec& p0, const OptimizeOptions& opts = {});

}  // namespace ddae
