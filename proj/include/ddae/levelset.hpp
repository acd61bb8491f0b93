#pragma once

#include "ddae/asymptotic.hpp"
#include "ddae/discretize.hpp"
#include "ddae/types.hpp"

namespace ddae {

enum class NormBranch { Asymptotic, Frequency };

struct LevelSetOptions {
    int N = 20;                      // discretization order
    double tol = 1e-3;               // prediction tolerance
    int p_a = 20;                    // T_a sweep density per axis
    std::vector<double> seed_frequencies;
    bool auto_seeds = true;          // coarse log sweep of sigma1(T_N) for the first level
    double axis_tol = 1e-6;          // imaginary-axis filter, relative
    int max_levels = 50;
    bool skip_stability = false;
    double tol_rank = 1e-10;
};

struct LevelTraceEntry {
    double level = 0.0;
    std::vector<double> crossings;
};

struct StrongNormResult {
    double value = 0.0;
    NormBranch branch = NormBranch::Asymptotic;
    double omega_hat = 0.0;      // frequency branch
    Vec theta_hat;               // asymptotic branch
    CVec u, v;                   // certificate sized to the branch
    int iterations = 0;          // prediction levels executed
    bool corrected = false;
    double second_peak = -1.0;   // next-best corrected peak (frequency branch)
    TaNormResult ta;             // the asymptotic floor used by the run
    std::vector<LevelTraceEntry> levels;
    std::vector<double> xi_l_history;  // lower-level sequence, nondecreasing
    std::vector<std::string> warnings;
};

struct PeakResult {
    double omega = 0.0;
    double xi = 0.0;
    CVec u, v;
    std::vector<double> residual_history;
};

// The 2(N+1)n Hamiltonian-type pencil (P, Q): crossings of the level xi are
// the imaginary-axis solutions of det(lambda Q - P) = 0.
std::pair<Mat, Mat> level_pencil(const DiscretizedSystem& disc, double xi);

// Frequencies where some singular value of T_N(j w) equals xi, from the
// imaginary-axis generalized eigenvalues of the Hamiltonian-type pencil.
std::vector<double> pencil_frequencies(const DiscretizedSystem& disc, double xi,
                                       double axis_tol = 1e-6);

// Gauss-Newton refinement of a singular-value peak of the true transfer
// function near (omega0, xi0).
PeakResult correct_peak(const DdaeSystem& sys, double omega0, double xi0);

// Strong norm: max of the asymptotic strong norm and the frequency-domain
// peak located by the predictor-corrector level iteration.
StrongNormResult strong_hinf_norm(const DdaeSystem& sys, const LevelSetOptions& opts = {});

// Diagnostic mode with the asymptotic floor removed: dense sweep of
// sigma1(T(j w)) over [wmin, wmax] followed by peak correction. Not robust
// for systems whose norm is approached only as w -> inf.
struct PlainNormOptions {
    double wmin = -1.0;   // <0: pick from the delays
    double wmax = -1.0;
    int points = 4000;
    bool log_grid = true;
    int refine_top = 8;   // local maxima passed to the corrector
};

struct PlainNormResult {
    double value = 0.0;
    double omega = 0.0;
    bool corrected = false;
    std::vector<PeakResult> peaks;  // corrected local peaks, best first
};

PlainNormResult plain_hinf_norm(const DdaeSystem& sys, const PlainNormOptions& opts = {});

}  // namespace ddae
