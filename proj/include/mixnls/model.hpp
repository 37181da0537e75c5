#pragma once

// Steady-state coupled system
//
//     sigma1 u'' + (|u|^{p-1} + lambda v^2 - omega) u = 0
//     sigma2 v'' + (|v|^{p-1} + lambda u^2 - omega) v = 0
//
// written as a first-order system in the phase vector X = (u, u', v, v').

#include <array>
#include <cmath>
#include <sstream>
#include <utility>

#include "mixnls/errors.hpp"

namespace mixnls {

/// Phase vector in the order (u, du, v, dv).
using Vec4 = std::array<double, 4>;

namespace idx {
inline constexpr std::size_t u = 0;
inline constexpr std::size_t du = 1;
inline constexpr std::size_t v = 2;
inline constexpr std::size_t dv = 3;
} // namespace idx

struct Params {
    double p = 2.0;
    double omega = 2.0;
    double lambda = 1.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;

    [[nodiscard]] bool canonical() const noexcept
    {
        return sigma1 == 1.0 && sigma2 == 1.0 && lambda == 1.0;
    }

    friend bool operator==(const Params&, const Params&) = default;
};

/// Throws InvalidParams naming the first violated precondition.
inline void validate(const Params& prm)
{
    auto fail = [](const char* what, double value) {
        std::ostringstream os;
        os << what << " (got " << value << ")";
        throw InvalidParams(os.str());
    };
    if (!std::isfinite(prm.p) || !(prm.p > 1.0)) fail("p must be finite and > 1", prm.p);
    if (prm.p == 3.0) fail("p must differ from 3", prm.p);
    if (!std::isfinite(prm.omega) || !(prm.omega > 0.0)) fail("omega must be finite and > 0", prm.omega);
    if (!std::isfinite(prm.lambda) || !(prm.lambda > 0.0)) fail("lambda must be finite and > 0", prm.lambda);
    if (!std::isfinite(prm.sigma1) || !(prm.sigma1 > 0.0)) fail("sigma1 must be finite and > 0", prm.sigma1);
    if (!std::isfinite(prm.sigma2) || !(prm.sigma2 > 0.0)) fail("sigma2 must be finite and > 0", prm.sigma2);
}

struct State {
    double x = 0.0;
    double u = 0.0;
    double v = 0.0;
    double du = 0.0;
    double dv = 0.0;

    [[nodiscard]] Vec4 phase() const noexcept { return {u, du, v, dv}; }

    [[nodiscard]] static State from_phase(double x, const Vec4& X) noexcept
    {
        return {x, X[idx::u], X[idx::v], X[idx::du], X[idx::dv]};
    }

    [[nodiscard]] bool finite() const noexcept
    {
        return std::isfinite(x) && std::isfinite(u) && std::isfinite(v) && std::isfinite(du) &&
               std::isfinite(dv);
    }
};

struct EnergyValue {
    double total = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
};

/// |x|^e with the convention 0^e = 0 (e > 0).
inline double abs_pow(double x, double e) noexcept
{
    return x == 0.0 ? 0.0 : std::pow(std::abs(x), e);
}

/// g_omega(x, y) = |x|^{p-1} + lambda y^2 - omega.
inline double g_omega(double x, double y, const Params& prm) noexcept
{
    return abs_pow(x, prm.p - 1.0) + prm.lambda * y * y - prm.omega;
}

/// X' = F(X). Mirror- and swap-equivariant bit for bit: only |.|, squares and sign flips touch u, v.
inline Vec4 vector_field(const Vec4& X, const Params& prm) noexcept
{
    const double u = X[idx::u];
    const double v = X[idx::v];
    return {X[idx::du], -g_omega(u, v, prm) * u / prm.sigma1, X[idx::dv],
            -g_omega(v, u, prm) * v / prm.sigma2};
}

inline Vec4 vector_field(const State& s, const Params& prm) noexcept
{
    return vector_field(s.phase(), prm);
}

/// H(u, v) = (|u|^{p+1} + |v|^{p+1})/(p+1) + lambda u^2 v^2 / 2 - omega (u^2 + v^2) / 2.
inline double potential(double u, double v, const Params& prm) noexcept
{
    const double q = prm.p + 1.0;
    return (abs_pow(u, q) + abs_pow(v, q)) / q + 0.5 * prm.lambda * u * u * v * v -
           0.5 * prm.omega * (u * u + v * v);
}

/// Conserved energy. The kinetic part is weighted by the dispersion coefficients,
/// which reduces to (u'^2 + v'^2)/2 on the canonical problem.
inline EnergyValue energy(const State& s, const Params& prm) noexcept
{
    EnergyValue e;
    e.kinetic = 0.5 * (prm.sigma1 * s.du * s.du + prm.sigma2 * s.dv * s.dv);
    e.potential = potential(s.u, s.v, prm);
    e.total = e.kinetic + e.potential;
    return e;
}

inline EnergyValue energy(const Vec4& X, const Params& prm) noexcept
{
    return energy(State::from_phase(0.0, X), prm);
}

/// (u''(0), v''(0)) for the data u(0) = a, v(0) = b, u'(0) = v'(0) = 0.
inline std::pair<double, double> second_derivatives_at_origin(double a, double b, const Params& prm) noexcept
{
    return {-g_omega(a, b, prm) * a / prm.sigma1, -g_omega(b, a, prm) * b / prm.sigma2};
}

/// -1, 0 or +1.
inline int sign_of(double x) noexcept
{
    return (x > 0.0) - (x < 0.0);
}

} // namespace mixnls
