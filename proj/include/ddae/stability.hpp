#pragma once

#include "ddae/types.hpp"

namespace ddae {

struct StabilityReport {
    bool stable = false;
    double spectral_abscissa = 0.0;   // max Re of finite discretized eigenvalues
    double difference_radius = 0.0;   // delay-robust spectral radius of the difference part
};

// Strong exponential stability screen: the difference part must have
// delay-robust spectral radius below one and the discretized spectrum must
// lie strictly in the open left half plane.
StabilityReport check_strong_stability(const DdaeSystem& sys, int N = 20, int p_a = 20);

}  // namespace ddae
