#pragma once

// Plane partition of the initial data (a, b) by the closed curves
//   Gamma  : g_omega(u, v) = 0
//   Gamma* : g_omega(v, u) = 0
// and the equal-nonlinearity locus Lambda : |u|^{p-1} + lambda v^2 = |v|^{p-1} + lambda u^2.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixnls/errors.hpp"
#include "mixnls/model.hpp"
#include "mixnls/roots.hpp"

namespace mixnls {

struct Point {
    double u = 0.0;
    double v = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

enum class Vertex { B, D, F, H };

inline const char* to_string(Vertex v) noexcept
{
    switch (v) {
    case Vertex::B: return "B";
    case Vertex::D: return "D";
    case Vertex::F: return "F";
    case Vertex::H: return "H";
    }
    return "?";
}

inline constexpr std::array<Vertex, 4> all_vertices{Vertex::B, Vertex::D, Vertex::F, Vertex::H};

/// Cell of the partition containing an initial datum.
///
/// Omega(1..12) and OmegaExt(1..4) follow a fixed table indexed by the quadrant of
/// (a, b) and the sign pair (g(a,b), g(b,a)): quadrants I, IV, III, II in that order,
/// and inside each quadrant (-,+), (-,-), (+,-) for the bounded cells and (+,+) for
/// the exterior one.
struct Region {
    enum class Kind {
        Omega,
        OmegaExt,
        EdgeGamma,
        EdgeGammaStar,
        VertexB,
        VertexD,
        VertexF,
        VertexH,
        LambdaDiagonal,
        Origin
    };

    Kind kind = Kind::Origin;
    int index = 0; // 1..12 for Omega, 1..4 for OmegaExt, 0 otherwise

    static constexpr Region omega(int i) noexcept { return {Kind::Omega, i}; }
    static constexpr Region ext(int j) noexcept { return {Kind::OmegaExt, j}; }
    static constexpr Region of(Kind k) noexcept { return {k, 0}; }
    static constexpr Region vertex(Vertex v) noexcept
    {
        switch (v) {
        case Vertex::B: return of(Kind::VertexB);
        case Vertex::D: return of(Kind::VertexD);
        case Vertex::F: return of(Kind::VertexF);
        case Vertex::H: return of(Kind::VertexH);
        }
        return of(Kind::VertexB);
    }

    [[nodiscard]] bool is_interior() const noexcept { return kind == Kind::Omega; }
    [[nodiscard]] bool is_vertex() const noexcept
    {
        return kind == Kind::VertexB || kind == Kind::VertexD || kind == Kind::VertexF ||
               kind == Kind::VertexH;
    }
    [[nodiscard]] bool is_edge() const noexcept
    {
        return kind == Kind::EdgeGamma || kind == Kind::EdgeGammaStar;
    }

    [[nodiscard]] std::string name() const
    {
        switch (kind) {
        case Kind::Omega: return "Omega" + std::to_string(index);
        case Kind::OmegaExt: return "OmegaExt" + std::to_string(index);
        case Kind::EdgeGamma: return "EdgeGamma";
        case Kind::EdgeGammaStar: return "EdgeGammaStar";
        case Kind::VertexB: return "VertexB";
        case Kind::VertexD: return "VertexD";
        case Kind::VertexF: return "VertexF";
        case Kind::VertexH: return "VertexH";
        case Kind::LambdaDiagonal: return "LambdaDiagonal";
        case Kind::Origin: return "Origin";
        }
        return "?";
    }

    friend bool operator==(const Region&, const Region&) = default;
};

/// Quadrant numbering used by the region table: 0 = I, 1 = IV, 2 = III, 3 = II.
inline int table_quadrant(double a, double b) noexcept
{
    if (a >= 0.0) return b >= 0.0 ? 0 : 1;
    return b < 0.0 ? 2 : 3;
}

/// omega_s = omega^{1/(s-1)}.
inline double omega_s(double omega, double s)
{
    if (s == 1.0) throw DegenerateExponent("omega_s: s = 1 makes the exponent 1/(s-1) singular");
    if (!(omega > 0.0)) throw InvalidParams("omega_s: omega must be > 0");
    return std::pow(omega, 1.0 / (s - 1.0));
}

/// omega_{s,eta} = (omega/eta)^{1/(s-1)}.
inline double omega_s(double omega, double s, double eta)
{
    return omega_s(omega / eta, s);
}

/// Unique positive root of l^{p-1} + lambda l^2 = omega.
inline double fixed_point_l(const Params& prm)
{
    if (!(prm.omega > 0.0) || !(prm.lambda > 0.0) || !(prm.p > 1.0))
        throw InvalidParams("fixed_point_l: requires omega > 0, lambda > 0, p > 1");
    const double e = prm.p - 1.0;
    auto f = [&](double l) { return abs_pow(l, e) + prm.lambda * l * l - prm.omega; };
    auto df = [&](double l) { return e * abs_pow(l, e - 1.0) + 2.0 * prm.lambda * l; };
    const double hi = std::max(omega_s(prm.omega, prm.p), std::sqrt(prm.omega / prm.lambda));
    return roots::increasing_root(f, df, 0.0, hi).x;
}

struct FixedPoints {
    double l = 0.0;
    Point b, d, f, h;

    [[nodiscard]] Point at(Vertex v) const noexcept
    {
        switch (v) {
        case Vertex::B: return b;
        case Vertex::D: return d;
        case Vertex::F: return f;
        case Vertex::H: return h;
        }
        return b;
    }

    /// Vertex closest to (u, v) and its Euclidean distance.
    [[nodiscard]] std::pair<Vertex, double> nearest(double u, double v) const noexcept
    {
        Vertex best = Vertex::B;
        double best_d = std::numeric_limits<double>::infinity();
        for (Vertex vx : all_vertices) {
            const Point q = at(vx);
            const double dist = std::hypot(u - q.u, v - q.v);
            if (dist < best_d) best = vx, best_d = dist;
        }
        return {best, best_d};
    }
};

inline FixedPoints vertices(const Params& prm)
{
    const double l = fixed_point_l(prm);
    return {l, {l, l}, {l, -l}, {-l, -l}, {-l, l}};
}

/// Intersections of Gamma and Gamma* with the coordinate axes.
///   Gamma  meets u = 0 at v = +-omega_{3,lambda} and v = 0 at u = +-omega_p.
///   Gamma* meets u = 0 at v = +-omega_p        and v = 0 at u = +-omega_{3,lambda}.
struct AxisPoints {
    double omega_p = 0.0;
    double omega_3 = 0.0;

    [[nodiscard]] Point gamma_u(int sign) const noexcept { return {sign * omega_p, 0.0}; }
    [[nodiscard]] Point gamma_v(int sign) const noexcept { return {0.0, sign * omega_3}; }
    [[nodiscard]] Point gammastar_u(int sign) const noexcept { return {sign * omega_3, 0.0}; }
    [[nodiscard]] Point gammastar_v(int sign) const noexcept { return {0.0, sign * omega_p}; }

    struct Named {
        std::string name;
        Point point;
    };

    [[nodiscard]] std::vector<Named> all() const
    {
        return {{"gamma_u+", gamma_u(1)},         {"gamma_u-", gamma_u(-1)},
                {"gamma_v+", gamma_v(1)},         {"gamma_v-", gamma_v(-1)},
                {"gammastar_u+", gammastar_u(1)}, {"gammastar_u-", gammastar_u(-1)},
                {"gammastar_v+", gammastar_v(1)}, {"gammastar_v-", gammastar_v(-1)}};
    }
};

inline AxisPoints axis_points(const Params& prm)
{
    return {omega_s(prm.omega, prm.p), omega_s(prm.omega, 3.0, prm.lambda)};
}

inline double gamma_residual(Point q, const Params& prm) noexcept { return g_omega(q.u, q.v, prm); }
inline double gammastar_residual(Point q, const Params& prm) noexcept { return g_omega(q.v, q.u, prm); }
inline double lambda_residual(Point q, const Params& prm) noexcept
{
    return g_omega(q.u, q.v, prm) - g_omega(q.v, q.u, prm);
}

inline constexpr double default_boundary_tol = 1e-9;

inline Region classify_point(double a, double b, const Params& prm, double tol = default_boundary_tol)
{
    if (!(tol > 0.0)) throw InvalidParams("classify_point: tol must be > 0");
    if (std::abs(a) <= tol && std::abs(b) <= tol) return Region::of(Region::Kind::Origin);

    const double s1 = g_omega(a, b, prm);
    const double s2 = g_omega(b, a, prm);
    const bool on_gamma = std::abs(s1) <= tol;
    const bool on_gammastar = std::abs(s2) <= tol;

    if (on_gamma && on_gammastar) {
        const auto [vx, dist] = vertices(prm).nearest(a, b);
        if (dist <= 1e-6) return Region::vertex(vx);
        return Region::of(Region::Kind::EdgeGamma);
    }
    if (on_gamma) return Region::of(Region::Kind::EdgeGamma);
    if (on_gammastar) return Region::of(Region::Kind::EdgeGammaStar);

    const int q = table_quadrant(a, b);
    if (s1 > 0.0 && s2 > 0.0) return Region::ext(q + 1);
    int cell = 0;
    if (s1 < 0.0 && s2 > 0.0) cell = 1;
    else if (s1 < 0.0 && s2 < 0.0) cell = 2;
    else cell = 3;
    return Region::omega(3 * q + cell);
}

// ---------------------------------------------------------------------------
// Curves

enum class Curve { Gamma, GammaStar, Lambda };

struct Polyline {
    std::string id;
    std::vector<Point> points;
    bool closed = false;
};

namespace detail {

/// cos and sin with representation noise at the quarter turns removed.
inline std::pair<double, double> clean_cos_sin(double theta) noexcept
{
    double c = std::cos(theta);
    double s = std::sin(theta);
    constexpr double snap = 1e-15;
    if (std::abs(c) < snap) c = 0.0, s = s > 0.0 ? 1.0 : -1.0;
    if (std::abs(s) < snap) s = 0.0, c = c > 0.0 ? 1.0 : -1.0;
    return {c, s};
}

/// Quadrant-I arc of Gamma from (omega_p, 0) to (0, omega_{3,lambda}), m + 1 points.
inline std::vector<Point> gamma_quarter(const Params& prm, std::size_t m)
{
    const double top = std::sqrt(prm.omega / prm.lambda);
    const double inv = 1.0 / (prm.p - 1.0);
    std::vector<Point> arc;
    arc.reserve(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        if (k == m) {
            arc.push_back({0.0, top});
            break;
        }
        const double v = top * std::sin(0.5 * std::numbers::pi * double(k) / double(m));
        const double rest = std::max(0.0, prm.omega - prm.lambda * v * v);
        arc.push_back({std::pow(rest, inv), v});
    }
    return arc;
}

} // namespace detail

/// Radius of the closed branch of Lambda at polar angle theta, from
///   r^{p-3} (|cos t|^{p-1} - |sin t|^{p-1}) = lambda cos 2t.
/// Empty where the branch meets the diagonals (both sides vanish) or has no real point.
inline std::optional<double> lambda_polar_radius(double theta, double p, double lambda = 1.0)
{
    if (!(p > 0.0) || p == 3.0) throw InvalidParams("lambda_polar_radius: requires p > 0, p != 3");
    const auto [c, s] = detail::clean_cos_sin(theta);
    const double denom = abs_pow(c, p - 1.0) - abs_pow(s, p - 1.0);
    const double rhs = lambda * (c * c - s * s);
    if (std::abs(denom) <= 1e-12 || std::abs(rhs) <= 1e-12) return std::nullopt;
    const double ratio = rhs / denom;
    if (!(ratio > 0.0)) return std::nullopt;
    return std::pow(ratio, 1.0 / (p - 3.0));
}

/// Samples of the requested curve; every emitted point satisfies its implicit equation.
///   Gamma, GammaStar : one closed counterclockwise polyline with about n points.
///   Lambda           : the diagonals u = v and u = -v clipped to [-clip, clip]^2 and
///                      the closed branch sampled at n polar angles.
/// clip <= 0 selects 1.25 * max(1, omega_p, omega_{3,lambda}).
inline std::vector<Polyline> sample_curve(Curve which, const Params& prm, std::size_t n, double clip = 0.0)
{
    validate(prm);
    if (n < 8) throw InvalidParams("sample_curve: n must be >= 8");

    if (which == Curve::Gamma || which == Curve::GammaStar) {
        const std::size_t m = std::max<std::size_t>(2, n / 4);
        const auto arc = detail::gamma_quarter(prm, m);
        std::vector<Point> pts;
        pts.reserve(4 * m + 1);
        for (std::size_t k = 0; k < m; ++k) pts.push_back(arc[k]);                            // I
        for (std::size_t k = m; k > 0; --k) pts.push_back({-arc[k].u, arc[k].v});             // II
        for (std::size_t k = 0; k < m; ++k) pts.push_back({-arc[k].u, -arc[k].v});            // III
        for (std::size_t k = m; k > 0; --k) pts.push_back({arc[k].u, -arc[k].v});             // IV
        pts.push_back(pts.front());
        if (which == Curve::GammaStar) {
            for (auto& q : pts) std::swap(q.u, q.v);
            std::reverse(pts.begin(), pts.end());
            return {{"GammaStar", std::move(pts), true}};
        }
        return {{"Gamma", std::move(pts), true}};
    }

    if (clip <= 0.0) {
        const auto ax = axis_points(prm);
        clip = 1.25 * std::max({1.0, ax.omega_p, ax.omega_3});
    }
    Polyline diag{"LambdaDiagonalPlus", {}, false};
    Polyline anti{"LambdaDiagonalMinus", {}, false};
    for (std::size_t k = 0; k < n; ++k) {
        const double c = -clip + 2.0 * clip * double(k) / double(n - 1);
        diag.points.push_back({c, c});
        anti.points.push_back({c, -c});
    }

    Polyline branch{"LambdaBranch", {}, prm.p < 3.0};
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = 2.0 * std::numbers::pi * double(k) / double(n);
        const auto r = lambda_polar_radius(theta, prm.p, prm.lambda);
        if (!r || *r > clip) continue;
        const auto [c, s] = detail::clean_cos_sin(theta);
        branch.points.push_back({*r * c, *r * s});
    }
    if (branch.closed && !branch.points.empty()) branch.points.push_back(branch.points.front());
    return {std::move(diag), std::move(anti), std::move(branch)};
}

/// Largest coordinate magnitude over the closed Lambda branch (lambda = 1) sampled at
/// n polar angles theta_k = 2 pi k / n, skipping the diagonal crossings.
inline double check_area_bound(double p, std::size_t n)
{
    if (!(p > 1.0 && p < 3.0)) throw InvalidParams("check_area_bound: requires 1 < p < 3");
    if (n < 4) throw InvalidParams("check_area_bound: n must be >= 4");
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = 2.0 * std::numbers::pi * double(k) / double(n);
        const auto r = lambda_polar_radius(theta, p);
        if (!r) continue;
        const auto [c, s] = detail::clean_cos_sin(theta);
        worst = std::max({worst, std::abs(*r * c), std::abs(*r * s)});
    }
    return worst;
}

} // namespace mixnls
