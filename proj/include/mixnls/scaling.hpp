#pragma once

// Reduction of the general system (sigma1, sigma2, lambda) to the canonical one.
//
// With u(r) = K1 ubar(alpha r) and v(r) = K2 vbar(beta r) the constants must satisfy
//
//     K1^{p-1} = sigma1 alpha^2,   K2^{p-1} = sigma2 beta^2,
//     lambda K1^2 = sigma2 beta^2, lambda K2^2 = sigma1 alpha^2,
//
// which is linear in the logarithms. The canonical frequency is omega / (sigma1 alpha^2).

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "mixnls/errors.hpp"
#include "mixnls/integrator.hpp"
#include "mixnls/model.hpp"

namespace mixnls {

struct ScalingConstants {
    double alpha = 1.0;
    double beta = 1.0;
    double k1 = 1.0;
    double k2 = 1.0;
    double a_lambda = 0.0;
    double b_lambda = 0.0;
    std::array<double, 4> residuals{};
    bool closed_form_disagreed = false;
    double omega_canonical = 0.0;

    [[nodiscard]] bool identity() const noexcept
    {
        return alpha == 1.0 && beta == 1.0 && k1 == 1.0 && k2 == 1.0;
    }

    [[nodiscard]] double max_residual() const noexcept
    {
        return *std::max_element(residuals.begin(), residuals.end());
    }
};

inline constexpr double scaling_residual_tol = 1e-10;

/// Relative residuals of the four constraints, each as |lhs - rhs| / max(|lhs|, |rhs|).
inline std::array<double, 4> constraint_residuals(double alpha, double beta, double k1, double k2,
                                                  const Params& prm)
{
    auto rel = [](double l, double r) {
        const double s = std::max(std::abs(l), std::abs(r));
        return s == 0.0 ? 0.0 : std::abs(l - r) / s;
    };
    const double pm1 = prm.p - 1.0;
    return {rel(std::pow(k1, pm1), prm.sigma1 * alpha * alpha), rel(std::pow(k2, pm1), prm.sigma2 * beta * beta),
            rel(prm.lambda * k1 * k1, prm.sigma2 * beta * beta),
            rel(prm.lambda * k2 * k2, prm.sigma1 * alpha * alpha)};
}

namespace detail {

/// Gaussian elimination with partial pivoting; throws DegenerateExponent on a singular matrix.
inline std::array<double, 4> solve4(std::array<std::array<double, 4>, 4> m, std::array<double, 4> rhs)
{
    for (std::size_t c = 0; c < 4; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < 4; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (std::abs(m[piv][c]) < 1e-14) throw DegenerateExponent("scaling system is singular");
        std::swap(m[piv], m[c]);
        std::swap(rhs[piv], rhs[c]);
        for (std::size_t r = c + 1; r < 4; ++r) {
            const double f = m[r][c] / m[c][c];
            for (std::size_t k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
            rhs[r] -= f * rhs[c];
        }
    }
    std::array<double, 4> x{};
    for (std::size_t i = 4; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t k = i + 1; k < 4; ++k) s -= m[i][k] * x[k];
        x[i] = s / m[i][i];
    }
    return x;
}

} // namespace detail

/// Closed-form constants, verified against the constraint system. If any relative
/// residual exceeds 1e-10 the log-linear system in (ln alpha, ln beta, ln K1, ln K2) is
/// solved directly and that solution is returned with closed_form_disagreed set.
inline ScalingConstants reduction_constants(const Params& prm)
{
    if (prm.p == 3.0) throw DegenerateExponent("reduction_constants: p = 3");
    if (prm.p == -1.0) throw DegenerateExponent("reduction_constants: p = -1");
    if (!(prm.sigma1 > 0.0 && prm.sigma2 > 0.0 && prm.lambda > 0.0))
        throw InvalidParams("reduction_constants: sigma1, sigma2, lambda must be > 0");
    if (!std::isfinite(prm.p) || prm.p == 1.0) throw InvalidParams("reduction_constants: p must be finite and != 1");

    const double p = prm.p;
    const double ls1 = std::log(prm.sigma1);
    const double ls2 = std::log(prm.sigma2);
    const double ll = std::log(prm.lambda);

    ScalingConstants c;
    c.a_lambda = ls1 / (1.0 - p) + 0.5 * ls2 - 0.5 * ll;
    c.b_lambda = -0.5 * ls1 + ls2 / (p - 1.0) - 0.5 * ll;
    const double den = (p - 3.0) * (p + 1.0);
    c.alpha = std::exp(((p - 1.0) * c.b_lambda - 2.0 * c.a_lambda) / den);
    c.beta = std::exp((2.0 * c.b_lambda - (p - 1.0) * c.a_lambda) / den);
    c.k1 = std::sqrt(prm.sigma2 * c.beta * c.beta / prm.lambda);
    c.k2 = std::sqrt(prm.sigma1 * c.alpha * c.alpha / prm.lambda);
    c.residuals = constraint_residuals(c.alpha, c.beta, c.k1, c.k2, prm);

    if (!(c.max_residual() <= scaling_residual_tol)) {
        // unknowns (ln alpha, ln beta, ln K1, ln K2)
        const std::array<std::array<double, 4>, 4> m{{{-2.0, 0.0, p - 1.0, 0.0},
                                                      {0.0, -2.0, 0.0, p - 1.0},
                                                      {0.0, -2.0, 2.0, 0.0},
                                                      {-2.0, 0.0, 0.0, 2.0}}};
        const auto x = detail::solve4(m, {ls1, ls2, ls2 - ll, ls1 - ll});
        c.alpha = std::exp(x[0]);
        c.beta = std::exp(x[1]);
        c.k1 = std::exp(x[2]);
        c.k2 = std::exp(x[3]);
        c.residuals = constraint_residuals(c.alpha, c.beta, c.k1, c.k2, prm);
        c.closed_form_disagreed = true;
    }
    c.omega_canonical = prm.omega / (prm.sigma1 * c.alpha * c.alpha);
    return c;
}

/// Parameters of the canonical problem: sigma1 = sigma2 = lambda = 1, omega rescaled.
inline Params canonical_params(const Params& prm)
{
    const ScalingConstants c = reduction_constants(prm);
    return Params{prm.p, c.omega_canonical, 1.0, 1.0, 1.0};
}

/// Initial datum of the canonical problem: (a / K1, b / K2).
inline std::pair<double, double> to_canonical(double a, double b, const Params& prm)
{
    const ScalingConstants c = reduction_constants(prm);
    return {a / c.k1, b / c.k2};
}

/// r -> (K1 ubar(alpha r), K2 vbar(beta r)) sampled at r = k * stride on [0, x_max].
///
/// The transformed trajectory solves the original system only when alpha = beta,
/// i.e. sigma1 = sigma2; otherwise the coupling term sees vbar at the wrong argument.
/// Dense segments are carried over when alpha = beta, so the result supports at().
inline Trajectory from_canonical(const Trajectory& canon, const Params& prm, double x_max,
                                 double stride = 0.05)
{
    const ScalingConstants c = reduction_constants(prm);
    if (c.identity()) return canon;
    if (!(x_max > 0.0) || !(stride > 0.0)) throw InvalidParams("from_canonical: x_max and stride must be > 0");
    const double need = std::max(c.alpha, c.beta) * x_max;
    if (canon.x_end() < need * (1.0 - 1e-12))
        throw InterpolationOutOfRange("from_canonical: canonical trajectory ends before max(alpha, beta) * x_max");

    auto state_at = [&](double r) {
        const State su = canon.at(std::min(c.alpha * r, canon.x_end()));
        const State sv = canon.at(std::min(c.beta * r, canon.x_end()));
        return State{r, c.k1 * su.u, c.k2 * sv.v, c.k1 * c.alpha * su.du, c.k2 * c.beta * sv.dv};
    };

    Trajectory out;
    out.params = prm;
    out.a = c.k1 * canon.a;
    out.b = c.k2 * canon.b;
    out.termination = canon.termination;
    out.accepted_steps = canon.accepted_steps;
    out.rejected_steps = canon.rejected_steps;

    if (c.alpha == c.beta) {
        for (const auto& seg : canon.segments) {
            if (seg.x0 >= need) break;
            DenseSegment s = seg;
            s.x0 = seg.x0 / c.alpha;
            s.x1 = seg.x1 / c.alpha;
            s.h = seg.h / c.alpha;
            for (auto& co : s.coef) {
                co[idx::u] *= c.k1;
                co[idx::du] *= c.k1 * c.alpha;
                co[idx::v] *= c.k2;
                co[idx::dv] *= c.k2 * c.beta;
            }
            out.segments.push_back(s);
        }
    }

    std::vector<double> nodes;
    for (std::size_t k = 0;; ++k) {
        const double r = double(k) * stride;
        if (r > x_max) break;
        nodes.push_back(r);
    }
    if (nodes.back() < x_max) nodes.push_back(x_max);

    out.events = detail::locate_crossings(
        nodes,
        [&](double r) {
            const State s = state_at(r);
            return Point{s.u, s.v};
        },
        prm);

    std::vector<double> xs = nodes;
    for (const auto& ev : out.events) xs.push_back(ev.x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    const double e0 = energy(State{0.0, out.a, out.b, 0.0, 0.0}, prm).total;
    double drift = 0.0;
    for (double r : xs) {
        const State s = r == 0.0 ? State{0.0, out.a, out.b, 0.0, 0.0} : state_at(r);
        drift = std::max(drift, std::abs(energy(s, prm).total - e0));
        out.samples.push_back(s);
    }
    out.energy_drift = drift;
    out.verdict = detect_limit(out, vertices(prm));
    return out;
}

/// Sup over r = k * stride in [0, x_max] of the original-system residuals
///     |sigma1 u'' + g(u, v) u|, |sigma2 v'' + g(v, u) v|
/// for r -> (K1 ubar(alpha r), K2 vbar(beta r)), with ubar'', vbar'' taken from the
/// canonical field at the interpolated canonical state.
inline double original_residual(const Trajectory& canon, const Params& prm, double x_max, double stride = 0.05)
{
    const ScalingConstants c = reduction_constants(prm);
    const Params cp{prm.p, c.omega_canonical, 1.0, 1.0, 1.0};
    if (canon.x_end() < std::max(c.alpha, c.beta) * x_max * (1.0 - 1e-12))
        throw InterpolationOutOfRange("original_residual: canonical trajectory too short");
    double worst = 0.0;
    for (std::size_t k = 0;; ++k) {
        const double r = double(k) * stride;
        if (r > x_max) break;
        const Vec4 xu = canon.at(std::min(c.alpha * r, canon.x_end())).phase();
        const Vec4 xv = canon.at(std::min(c.beta * r, canon.x_end())).phase();
        const double u = c.k1 * xu[idx::u];
        const double v = c.k2 * xv[idx::v];
        const double upp = c.k1 * c.alpha * c.alpha * vector_field(xu, cp)[idx::du];
        const double vpp = c.k2 * c.beta * c.beta * vector_field(xv, cp)[idx::dv];
        worst = std::max(worst, std::abs(prm.sigma1 * upp + g_omega(u, v, prm) * u));
        worst = std::max(worst, std::abs(prm.sigma2 * vpp + g_omega(v, u, prm) * v));
    }
    return worst;
}

} // namespace mixnls
