#pragma once

#include <cmath>
#include <limits>

#include "mixnls/errors.hpp"

namespace mixnls::roots {

struct Result {
    double x = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

/// Root of a strictly increasing function on [lo, hi] with f(lo) <= 0 <= f(hi).
///
/// Bisection shrinks the bracket until it is narrow relative to its position, Newton
/// polishes inside the bracket (falling back to bisection whenever a step leaves it),
/// and a final scan over the neighbouring doubles keeps the one with the smallest
/// |f|. The scan makes exact roots such as l = 1 come out exactly.
template <class F, class DF>
Result increasing_root(F&& f, DF&& df, double lo, double hi, int max_iter = 200)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo > 0.0 || fhi < 0.0) throw InvalidParams("increasing_root: root not bracketed");
    if (flo == 0.0) return {lo, 0.0, 0};
    if (fhi == 0.0) return {hi, 0.0, 0};

    int it = 0;
    for (; it < max_iter && (hi - lo) > 1e-3 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return {mid, 0.0, it + 1};
        (fm < 0.0 ? lo : hi) = mid;
    }

    double x = 0.5 * (lo + hi);
    for (; it < max_iter; ++it) {
        const double fx = f(x);
        if (fx == 0.0) break;
        (fx < 0.0 ? lo : hi) = x;
        const double d = df(x);
        double next = (d > 0.0 && std::isfinite(d)) ? x - fx / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
            x = next;
            break;
        }
        x = next;
    }

    double best = x;
    double best_res = std::abs(f(x));
    double probe = x;
    for (int k = 0; k < 4; ++k) {
        probe = std::nextafter(probe, std::numeric_limits<double>::infinity());
        if (const double r = std::abs(f(probe)); r < best_res) best = probe, best_res = r;
    }
    probe = x;
    for (int k = 0; k < 4; ++k) {
        probe = std::nextafter(probe, -std::numeric_limits<double>::infinity());
        if (const double r = std::abs(f(probe)); r < best_res) best = probe, best_res = r;
    }
    return {best, best_res, it};
}

} // namespace mixnls::roots
