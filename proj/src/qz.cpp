#include "ddae/qz.hpp"

#include <lapacke.h>

#include <cmath>

namespace ddae {

std::vector<Complex> generalized_eigenvalues(Mat P, Mat Q) {
    const lapack_int n = static_cast<lapack_int>(P.rows());
    if (P.cols() != n || Q.rows() != n || Q.cols() != n)
        throw DimensionMismatch("pencil matrices must be square and matched");
    std::vector<double> ar(static_cast<std::size_t>(n)), ai(static_cast<std::size_t>(n)),
        be(static_cast<std::size_t>(n));
    lapack_int info = LAPACKE_dggev(LAPACK_COL_MAJOR, 'N', 'N', n, P.data(), n, Q.data(), n,
                                    ar.data(), ai.data(), be.data(), nullptr, 1, nullptr, 1);
    if (info != 0) throw EigSolverFailure("dggev failed with info " + std::to_string(info));
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
        const double scale = std::abs(ar[i]) + std::abs(ai[i]) + std::abs(be[i]);
        if (std::abs(be[i]) <= 1e-14 * scale) continue;  // infinite direction
        out.emplace_back(ar[i] / be[i], ai[i] / be[i]);
    }
    return out;
}

}  // namespace ddae
