#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddae {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct DdaeError : std::runtime_error {
    explicit DdaeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : DdaeError {
    explicit DimensionMismatch(const std::string& msg) : DdaeError(msg) {}
};
struct NonpositiveDelay : DdaeError {
    explicit NonpositiveDelay(const std::string& msg) : DdaeError(msg) {}
};
// The left/right nullspace compression of A0 is numerically singular: the
// system may be of high index or advanced type.
struct AssumptionOneViolated : DdaeError {
    explicit AssumptionOneViolated(const std::string& msg) : DdaeError(msg) {}
};
struct SingularAtLambda : DdaeError {
    explicit SingularAtLambda(const std::string& msg) : DdaeError(msg) {}
};
struct SingularAtTheta : DdaeError {
    explicit SingularAtTheta(const std::string& msg) : DdaeError(msg) {}
};
struct CorrectionDiverged : DdaeError {
    explicit CorrectionDiverged(const std::string& msg) : DdaeError(msg) {}
};
struct MaxIterExceeded : DdaeError {
    explicit MaxIterExceeded(const std::string& msg) : DdaeError(msg) {}
};
struct EigSolverFailure : DdaeError {
    explicit EigSolverFailure(const std::string& msg) : DdaeError(msg) {}
};
struct NotStable : DdaeError {
    explicit NotStable(const std::string& msg) : DdaeError(msg) {}
};
struct MaxLevelsExceeded : DdaeError {
    explicit MaxLevelsExceeded(const std::string& msg) : DdaeError(msg) {}
};
struct AlgebraicLoop : DdaeError {
    explicit AlgebraicLoop(const std::string& msg) : DdaeError(msg) {}
};
struct IndexOutOfRange : DdaeError {
    explicit IndexOutOfRange(const std::string& msg) : DdaeError(msg) {}
};
struct NonsmoothPoint : DdaeError {
    explicit NonsmoothPoint(const std::string& msg) : DdaeError(msg) {}
};
struct InfeasibleStart : DdaeError {
    explicit InfeasibleStart(const std::string& msg) : DdaeError(msg) {}
};
struct ParseError : DdaeError {
    explicit ParseError(const std::string& msg) : DdaeError(msg) {}
};

// ---------------------------------------------------------------------------
// Core system types
// ---------------------------------------------------------------------------

// Descriptor delay system
//   E x'(t) = A[0] x(t) + sum_i A[i] x(t - delays[i-1]) + B w(t)
//   z(t)    = C x(t)
// with real matrices and strictly positive delays.
struct DdaeSystem {
    int n = 0;                     // state dimension
    std::vector<double> delays;    // m strictly positive delays
    Mat E;                         // n x n
    std::vector<Mat> A;            // m+1 matrices, A[0] undelayed
    Mat B;                         // n x nw
    Mat C;                         // nz x n

    int m() const { return static_cast<int>(delays.size()); }
    int nw() const { return static_cast<int>(B.cols()); }
    int nz() const { return static_cast<int>(C.rows()); }
    double tau_max() const;

    // Characteristic matrix  lambda*E - A0 - sum A_i exp(-lambda tau_i).
    CMat char_matrix(Complex lambda) const;
};

// Orthonormal bases for the left (U) and right (V) nullspaces of E, plus
// their orthogonal complements. [Uperp U] and [Vperp V] are orthogonal.
struct NullspaceBases {
    int nu = 0;     // nullity of E
    Mat U;          // n x nu,  U^T E = 0
    Mat V;          // n x nu,  E V = 0
    Mat Uperp;      // n x (n - nu)
    Mat Vperp;      // n x (n - nu)
};

// Block decomposition of the system under x = [Vperp V] [x1; x2].
struct PartitionedSystem {
    Mat E11;                       // Uperp^T E Vperp, invertible
    std::vector<Mat> A11, A12, A21, A22;  // per delay index 0..m
    Mat B1, B2;                    // Uperp^T B, U^T B
    Mat C1, C2;                    // C Vperp, C V
};

// Sampled singular values of T(j w) along a frequency grid.
struct SigmaCurve {
    std::vector<double> omega;
    std::vector<std::vector<double>> sigma;  // descending per entry
    std::vector<bool> skipped;               // true where T(j w) was singular
};

}  // namespace ddae
