#include "ddae/stability.hpp"

#include "ddae/asymptotic.hpp"
#include "ddae/discretize.hpp"
#include "ddae/model.hpp"
#include "ddae/qz.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace ddae {

StabilityReport check_strong_stability(const DdaeSystem& sys, int N, int p_a) {
    StabilityReport rep;
    NullspaceBases bases = validate(sys);
    PartitionedSystem part = partition(sys, bases);
    AsymptoticSystem asys = reduce_delays(part);

    rep.difference_radius = 0.0;
    const int ma = asys.ma();
    if (ma > 0) {
        Eigen::PartialPivLU<Mat> lu(asys.A22[0]);
        const Mat A0inv = lu.solve(Mat::Identity(asys.nu(), asys.nu()));
        std::size_t total = 1;
        for (int k = 0; k < ma; ++k) total *= static_cast<std::size_t>(p_a);
        const double step = 2.0 * M_PI / p_a;
        for (std::size_t flat = 0; flat < total; ++flat) {
            CMat S = CMat::Zero(asys.nu(), asys.nu());
            std::size_t rem = flat;
            for (int k = 0; k < ma; ++k) {
                const double th = step * static_cast<double>(rem % static_cast<std::size_t>(p_a));
                rem /= static_cast<std::size_t>(p_a);
                S += asys.A22[static_cast<std::size_t>(asys.retained[static_cast<std::size_t>(k)])].cast<Complex>() *
                     std::exp(Complex(0.0, -th));
            }
            CMat M = A0inv.cast<Complex>() * S;
            Eigen::ComplexEigenSolver<CMat> es(M, /*computeEigenvectors=*/false);
            double rho = es.eigenvalues().cwiseAbs().maxCoeff();
            rep.difference_radius = std::max(rep.difference_radius, rho);
        }
    }

    DiscretizedSystem disc = build(sys, N);
    double absc = -1e300;
    for (const Complex& lam : generalized_eigenvalues(disc.AN, disc.EN)) {
        if (std::abs(lam) > 1e8) continue;
        absc = std::max(absc, lam.real());
    }
    rep.spectral_abscissa = absc;
    rep.stable = rep.difference_radius < 1.0 - 1e-6 && absc < -1e-8;
    return rep;
}

}  // namespace ddae
