#pragma once

#include "ddae/types.hpp"

namespace ddae {

// Algebraic-part compression U^T A_i V together with B2 = U^T B, C2 = C V.
// Delay indices whose compressed block vanishes (below tol_prune) do not
// enter the asymptotic transfer function and are pruned from the sweep.
struct AsymptoticSystem {
    std::vector<Mat> A22;       // m+1 blocks, index 0 undelayed
    Mat B2;                     // nu x nw
    Mat C2;                     // nz x nu
    std::vector<int> retained;  // delay indices (1-based into A22) kept
    double tol_prune = 0.0;

    int nu() const { return static_cast<int>(B2.rows()); }
    int ma() const { return static_cast<int>(retained.size()); }

    // Abb(theta) = -A22_0 - sum_{i in retained} A22_i e^{-j theta_i}.
    CMat abb(const Vec& theta) const;
};

struct TaNormResult {
    double value = 0.0;
    Vec theta_hat;       // size ma
    CVec u_a, v_a;       // certificate vectors, size nu
    bool corrected = false;
    std::vector<double> residual_history;  // Gauss-Newton residuals, when run
};

// Default tol_prune: 1e-12 * max_i ||A_i||_2 of the original system blocks
// (pass a negative tol to request the default).
AsymptoticSystem reduce_delays(const PartitionedSystem& part, double tol_prune = -1.0);

// T_a evaluated on the torus: C2 Abb(theta)^{-1} B2; theta sized ma.
// Throws SingularAtTheta when Abb is singular (difference part not strongly
// stable at that point).
CMat ta_eval(const AsymptoticSystem& asys, const Vec& theta);

// Strong norm of T_a: sweep of sigma_1 over the uniform grid {2 pi k / p_a}
// per retained axis followed by an optional Gauss-Newton refinement.
TaNormResult strong_norm_ta(const AsymptoticSystem& asys, int p_a = 20, bool do_correct = true);

// Gauss-Newton refinement of a smooth local maximizer starting at (theta0, xi0).
TaNormResult ta_correct(const AsymptoticSystem& asys, const Vec& theta0, double xi0);

}  // namespace ddae
