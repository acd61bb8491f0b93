#pragma once

#include "ddae/types.hpp"

namespace ddae {

// Collocation mesh of N+1 distinct points on [-tau_max, 0], ascending, with
// the last point exactly 0. Chebyshev extremal points for spectral accuracy.
struct Mesh {
    int N = 0;
    double tau_max = 0.0;
    std::vector<double> points;  // size N+1, points.back() == 0
};

// Lagrange data on a mesh: D(i,k) = l'_k(theta_i) (differentiation matrix)
// and L(l,k) = l_k(-tau_l) (interpolation rows at the delay abscissae).
struct DifferentiationData {
    Mat D;  // (N+1) x (N+1)
    Mat L;  // m x (N+1)
};

// Finite-dimensional companion system (E_N, A_N, B_N, C_N) whose transfer
// function T_N approximates T with spectral accuracy in N.
struct DiscretizedSystem {
    int N = 0;
    int n = 0;
    Mesh mesh;
    Mat EN;  // (N+1)n x (N+1)n, blkdiag(I_{nN}, E)
    Mat AN;  // differentiation rows above the boundary row of Gammas
    Mat BN;  // (N+1)n x nw, zero except the last block
    Mat CN;  // nz x (N+1)n, zero except the last block
};

Mesh build_mesh(int N, double tau_max);

// Barycentric evaluation of the Lagrange basis and its derivative on the mesh.
// Delays must lie in [0, tau_max].
DifferentiationData differentiation_data(const Mesh& mesh, const std::vector<double>& delays);

DiscretizedSystem build(const DdaeSystem& sys, int N);

// T_N(lambda) = C_N (lambda E_N - A_N)^{-1} B_N.
CMat tn_eval(const DiscretizedSystem& disc, Complex lambda);

// sigma_1(T_N(j w)); returns -1 when the pencil is singular at j w.
double tn_sigma1(const DiscretizedSystem& disc, double omega);

}  // namespace ddae
