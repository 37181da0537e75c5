#pragma once

// Reduction constants by eliminating the log-linear system by hand:
//   (p-1) k1 = ln s1 + 2 a,  (p-1) k2 = ln s2 + 2 b,
//   ln l + 2 k1 = ln s2 + 2 b,  ln l + 2 k2 = ln s1 + 2 a
// gives k1 = k2 = ln l / (p-3), a = ((p-1) k - ln s1)/2, b = ((p-1) k - ln s2)/2.

#include <cmath>

namespace oracle {

struct Constants {
    double alpha, beta, k1, k2;
};

inline Constants scaling(double p, double s1, double s2, double lambda)
{
    const double k = std::log(lambda) / (p - 3.0);
    const double la = 0.5 * ((p - 1.0) * k - std::log(s1));
    const double lb = 0.5 * ((p - 1.0) * k - std::log(s2));
    return {std::exp(la), std::exp(lb), std::exp(k), std::exp(k)};
}

} // namespace oracle
