#include "ddae/model.hpp"

#include "ddae/parallel.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ddae {

double DdaeSystem::tau_max() const {
    double t = 0.0;
    for (double d : delays) t = std::max(t, d);
    return t;
}

CMat DdaeSystem::char_matrix(Complex lambda) const {
    CMat M = lambda * E.cast<Complex>() - A[0].cast<Complex>();
    for (int i = 0; i < m(); ++i)
        M -= A[static_cast<std::size_t>(i) + 1].cast<Complex>() * std::exp(-lambda * delays[static_cast<std::size_t>(i)]);
    return M;
}

namespace {

void check_dimensions(const DdaeSystem& sys) {
    const int n = sys.n;
    if (n <= 0) throw DimensionMismatch("state dimension must be positive");
    if (sys.E.rows() != n || sys.E.cols() != n)
        throw DimensionMismatch("E must be n x n");
    if (sys.A.size() != sys.delays.size() + 1)
        throw DimensionMismatch("need one A matrix per delay plus A0");
    for (const Mat& Ai : sys.A)
        if (Ai.rows() != n || Ai.cols() != n)
            throw DimensionMismatch("every A_i must be n x n");
    if (sys.B.rows() != n) throw DimensionMismatch("B must have n rows");
    if (sys.C.cols() != n) throw DimensionMismatch("C must have n columns");
    for (double tau : sys.delays)
        if (!(tau > 0.0)) throw NonpositiveDelay("delays must be strictly positive");
}

}  // namespace

NullspaceBases validate(const DdaeSystem& sys, double tol_rank) {
    check_dimensions(sys);
    if (!(tol_rank > 0.0)) throw DdaeError("tol_rank must be positive");

    Eigen::JacobiSVD<Mat> svd(sys.E, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vec& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    int rank = 0;
    if (smax > 0.0) {
        for (int i = 0; i < s.size(); ++i)
            if (s(i) > tol_rank * smax) ++rank;
    }
    const int n = sys.n;
    const int nu = n - rank;

    NullspaceBases bases;
    bases.nu = nu;
    bases.Uperp = svd.matrixU().leftCols(rank);
    bases.U = svd.matrixU().rightCols(nu);
    bases.Vperp = svd.matrixV().leftCols(rank);
    bases.V = svd.matrixV().rightCols(nu);

    if (nu > 0) {
        Mat A0vv = bases.U.transpose() * sys.A[0] * bases.V;
        Eigen::JacobiSVD<Mat> s2(A0vv);
        const double a0norm = sys.A[0].norm() > 0 ? Eigen::JacobiSVD<Mat>(sys.A[0]).singularValues()(0) : 0.0;
        const double smin = s2.singularValues().size() > 0 ? s2.singularValues()(s2.singularValues().size() - 1) : 0.0;
        if (!(smin > tol_rank * std::max(a0norm, 1e-300))) {
            std::ostringstream os;
            os << "U^T A0 V is numerically singular (smallest singular value " << smin
               << "); the system may be of high index or advanced type";
            throw AssumptionOneViolated(os.str());
        }
    }
    return bases;
}

PartitionedSystem partition(const DdaeSystem& sys, const NullspaceBases& bases) {
    PartitionedSystem p;
    p.E11 = bases.Uperp.transpose() * sys.E * bases.Vperp;
    const std::size_t k = sys.A.size();
    p.A11.reserve(k); p.A12.reserve(k); p.A21.reserve(k); p.A22.reserve(k);
    for (const Mat& Ai : sys.A) {
        p.A11.push_back(bases.Uperp.transpose() * Ai * bases.Vperp);
        p.A12.push_back(bases.Uperp.transpose() * Ai * bases.V);
        p.A21.push_back(bases.U.transpose() * Ai * bases.Vperp);
        p.A22.push_back(bases.U.transpose() * Ai * bases.V);
    }
    p.B1 = bases.Uperp.transpose() * sys.B;
    p.B2 = bases.U.transpose() * sys.B;
    p.C1 = sys.C * bases.Vperp;
    p.C2 = sys.C * bases.V;
    return p;
}

CMat transfer(const DdaeSystem& sys, Complex lambda) {
    CMat M = sys.char_matrix(lambda);
    Eigen::PartialPivLU<CMat> lu(M);
    if (lu.rcond() < 1e-14) {
        std::ostringstream os;
        os << "characteristic matrix singular at lambda = " << lambda.real() << " + " << lambda.imag() << "j";
        throw SingularAtLambda(os.str());
    }
    return sys.C.cast<Complex>() * lu.solve(sys.B.cast<Complex>());
}

CMat transfer_partitioned(const PartitionedSystem& part, Complex lambda,
                          const std::vector<double>& delays) {
    const auto nrow1 = part.E11.rows();
    const auto nrow2 = part.A22[0].rows();
    const auto nn = nrow1 + nrow2;
    CMat M(nn, nn);
    CMat A11 = CMat::Zero(nrow1, part.A11[0].cols());
    CMat A12 = CMat::Zero(nrow1, nrow2);
    CMat A21 = CMat::Zero(nrow2, part.A11[0].cols());
    CMat A22 = CMat::Zero(nrow2, nrow2);
    for (std::size_t i = 0; i < part.A11.size(); ++i) {
        const Complex e = i == 0 ? Complex(1, 0) : std::exp(-lambda * delays[i - 1]);
        A11 += part.A11[i].cast<Complex>() * e;
        A12 += part.A12[i].cast<Complex>() * e;
        A21 += part.A21[i].cast<Complex>() * e;
        A22 += part.A22[i].cast<Complex>() * e;
    }
    M.topLeftCorner(nrow1, nrow1) = lambda * part.E11.cast<Complex>() - A11;
    M.topRightCorner(nrow1, nrow2) = -A12;
    M.bottomLeftCorner(nrow2, nrow1) = -A21;
    M.bottomRightCorner(nrow2, nrow2) = -A22;

    CMat rhs(nn, part.B1.cols());
    rhs.topRows(nrow1) = part.B1.cast<Complex>();
    rhs.bottomRows(nrow2) = part.B2.cast<Complex>();

    Eigen::PartialPivLU<CMat> lu(M);
    if (lu.rcond() < 1e-14) throw SingularAtLambda("partitioned characteristic matrix singular");
    CMat sol = lu.solve(rhs);

    CMat Cfull(part.C1.rows(), nn);
    Cfull.leftCols(nrow1) = part.C1.cast<Complex>();
    Cfull.rightCols(nrow2) = part.C2.cast<Complex>();
    return Cfull * sol;
}

double sigma1(const DdaeSystem& sys, double omega) {
    CMat M = sys.char_matrix(Complex(0.0, omega));
    Eigen::PartialPivLU<CMat> lu(M);
    if (lu.rcond() < 1e-14) return -1.0;
    CMat T = sys.C.cast<Complex>() * lu.solve(sys.B.cast<Complex>());
    return T.jacobiSvd().singularValues()(0);
}

SigmaCurve sigma_sweep(const DdaeSystem& sys, const std::vector<double>& grid, int k) {
    SigmaCurve curve;
    const std::size_t np = grid.size();
    curve.omega = grid;
    curve.sigma.assign(np, {});
    curve.skipped.assign(np, false);
    const int kk = std::max(1, k);
    parallel_for(np, [&](std::size_t i) {
        CMat M = sys.char_matrix(Complex(0.0, grid[i]));
        Eigen::PartialPivLU<CMat> lu(M);
        if (lu.rcond() < 1e-14) {
            curve.skipped[i] = true;
            return;
        }
        CMat T = sys.C.cast<Complex>() * lu.solve(sys.B.cast<Complex>());
        Vec s = T.jacobiSvd().singularValues();
        const int take = std::min<int>(kk, static_cast<int>(s.size()));
        curve.sigma[i].assign(s.data(), s.data() + take);
    });
    return curve;
}

}  // namespace ddae
