#pragma once

#include "ddae/types.hpp"

namespace ddae {

// One delayed coefficient matrix; delay 0 denotes the undelayed term.
struct DelayTerm {
    double delay = 0.0;
    Mat matrix;
};
using DelayTermSeries = std::vector<DelayTerm>;

// Open-loop plant
//   E_G x_G' = sum A x_G(.-t) + sum B1 w(.-t) + sum B2 u(.-t)
//   z        = sum C1 x_G(.-t) + sum D11 w(.-t) + sum D12 u(.-t)
//   y        = sum C2 x_G(.-t) + sum D21 w(.-t) + sum D22 u(.-t)
// E defaults to the identity; a singular E makes the plant itself a DDAE.
struct PlantSpec {
    int nG = 0, nw = 0, nu = 0, ny = 0, nz = 0;
    Mat E;  // nG x nG; empty means identity
    DelayTermSeries A, B1, B2, C1, D11, D12, C2, D21, D22;
};

// One controller matrix term with a per-entry free/frozen mask. Frozen
// entries keep `value`; free entries are optimization parameters (their
// `value` entry is ignored and the base closed loop takes them as zero).
struct TemplateTerm {
    double delay = 0.0;
    Mat value;
    Mat free;  // same shape, 1.0 = free, 0.0 = frozen
};
using TemplateSeries = std::vector<TemplateTerm>;

// Controller template
//   x_K' = sum AK x_K(.-t) + sum BK y(.-t)
//   u    = sum CK x_K(.-t) + sum DK y(.-t) + sum DKu u(.-t)
// DK is the feedthrough from y; DKu is the delayed self-feedthrough of u and
// must carry strictly positive delays.
struct ControllerTemplate {
    int nK = 0;
    TemplateSeries AK, BK, CK, DK, DKu;
    Vec p0;  // optional initial parameter vector (empty means zeros)

    // Convenience: a term whose entries are all free.
    static TemplateTerm free_term(double delay, int rows, int cols);
    static TemplateTerm frozen_term(double delay, const Mat& value);
};

struct JacEntry {
    int delay_index = 0;  // 0 = A0
    int row = 0, col = 0;
    double coeff = 0.0;
};

// Closed loop whose A matrices depend affinely on the controller parameters;
// E, B, C are parameter independent.
struct ParamClosedLoop {
    DdaeSystem base;                         // closed loop at p = 0
    std::vector<std::vector<JacEntry>> jac;  // per parameter
    // slack layout bookkeeping
    int nG = 0, nK = 0, nu = 0, ny = 0, ngw = 0, ngz = 0;
    int off_K = 0, off_u = 0, off_y = 0, off_w = 0, off_z = 0;

    int param_count() const { return static_cast<int>(jac.size()); }
};

// Builds the standard-form closed loop by stacking plant state, controller
// state and slack variables for u, y (always), w and z (when needed).
// Throws DimensionMismatch or AlgebraicLoop (the latter when U^T A0 V of the
// assembled loop is singular at the template's p0, default zero).
ParamClosedLoop assemble(const PlantSpec& plant, const ControllerTemplate& ctrl);

// Closed-loop system at parameter vector p (affine in p).
DdaeSystem instantiate(const ParamClosedLoop& pcl, const Vec& p);

// dA_i/dp_k as dense matrices, index 0..m.
std::vector<Mat> parameter_jacobian(const ParamClosedLoop& pcl, int k);

}  // namespace ddae
