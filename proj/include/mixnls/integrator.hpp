#pragma once

// Adaptive Dormand-Prince 5(4) integration of X' = F(X) from X(0) = (a, 0, b, 0).
//
// Every accepted step keeps its quartic continuous extension, so the trajectory can
// be evaluated anywhere in [0, x_end]. The step error is the max over components of
// |err_i| / (atol + rtol |y_i|); the max is taken in commutative pairs, which makes the
// step sequence (and hence the whole trajectory) exactly equivariant under the mirrors
// u -> -u, v -> -v and the swap u <-> v.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mixnls/errors.hpp"
#include "mixnls/geometry.hpp"
#include "mixnls/model.hpp"

namespace mixnls {

namespace dopri {
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
} // namespace dopri

/// Continuous extension of one accepted step.
struct DenseSegment {
    double x0 = 0.0;
    double x1 = 0.0;
    double h = 0.0;
    std::array<Vec4, 5> coef{};

    [[nodiscard]] Vec4 eval(double x) const noexcept
    {
        const double t = (x - x0) / h;
        const double t1 = 1.0 - t;
        Vec4 y;
        for (std::size_t i = 0; i < 4; ++i)
            y[i] = coef[0][i] + t * (coef[1][i] + t1 * (coef[2][i] + t * (coef[3][i] + t1 * coef[4][i])));
        return y;
    }
};

enum class CurveId { Gamma, GammaStar };

inline const char* to_string(CurveId c) noexcept
{
    return c == CurveId::Gamma ? "Gamma" : "GammaStar";
}

/// Sign change of g(u, v) (Gamma) or g(v, u) (Gamma*) along the trajectory.
struct Event {
    double x = 0.0;
    CurveId curve = CurveId::Gamma;
};

struct LimitVerdict {
    enum class Kind { ConvergedTo, BoundedOscillation, Unbounded, Undecided };

    Kind kind = Kind::Undecided;
    Vertex vertex = Vertex::B; // ConvergedTo
    double escape_x = 0.0;     // Unbounded
    // BoundedOscillation: extent of (u, v) over the trailing window
    double u_min = 0.0, u_max = 0.0, v_min = 0.0, v_max = 0.0;
    int du_sign_changes = 0;

    [[nodiscard]] std::string name() const
    {
        switch (kind) {
        case Kind::ConvergedTo: return std::string("ConvergedTo(") + to_string(vertex) + ")";
        case Kind::BoundedOscillation: return "BoundedOscillation";
        case Kind::Unbounded: return "Unbounded";
        case Kind::Undecided: return "Undecided";
        }
        return "?";
    }
};

enum class Termination { ReachedEnd, LimitDetected, BlowUp, StepSizeUnderflow, StepLimit };

inline const char* to_string(Termination t) noexcept
{
    switch (t) {
    case Termination::ReachedEnd: return "ReachedEnd";
    case Termination::LimitDetected: return "LimitDetected";
    case Termination::BlowUp: return "BlowUp";
    case Termination::StepSizeUnderflow: return "StepSizeUnderflow";
    case Termination::StepLimit: return "StepLimit";
    }
    return "?";
}

struct IntegratorOptions {
    double x_max = 200.0;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double output_stride = 0.05;
    double max_step = 0.5;
    bool stop_on_limit = true;
    double limit_eps = 1e-4;
    double limit_window = 20.0;
    double blowup_norm = 1e8;
    std::size_t max_steps = 20'000'000;
};

struct Trajectory {
    Params params;
    double a = 0.0;
    double b = 0.0;
    std::vector<State> samples;
    std::vector<DenseSegment> segments;
    double energy_drift = 0.0;
    std::vector<Event> events;
    LimitVerdict verdict;
    Termination termination = Termination::ReachedEnd;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;

    [[nodiscard]] double x_end() const noexcept
    {
        if (!segments.empty()) return segments.back().x1;
        return samples.empty() ? 0.0 : samples.back().x;
    }

    /// Dense evaluation; throws InterpolationOutOfRange outside [0, x_end].
    [[nodiscard]] State at(double x) const
    {
        if (segments.empty()) {
            for (const auto& s : samples)
                if (s.x == x) return s;
            throw InterpolationOutOfRange("trajectory has no dense output");
        }
        const double slack = 1e-12 * std::max(1.0, x_end());
        if (x < segments.front().x0 - slack || x > segments.back().x1 + slack)
            throw InterpolationOutOfRange("x = " + std::to_string(x) + " outside [0, " +
                                          std::to_string(x_end()) + "]");
        auto it = std::upper_bound(segments.begin(), segments.end(), x,
                                   [](double xx, const DenseSegment& s) { return xx < s.x1; });
        if (it == segments.end()) --it;
        return State::from_phase(x, it->eval(x));
    }
};

namespace detail {

/// Root-mean-square of four scaled components, summed in the pairs (u, v) and (u', v').
inline double pair_rms(const Vec4& e) noexcept
{
    const double s = (e[idx::u] * e[idx::u] + e[idx::v] * e[idx::v]) +
                     (e[idx::du] * e[idx::du] + e[idx::dv] * e[idx::dv]);
    return std::sqrt(0.25 * s);
}

inline double inf_norm(const Vec4& X) noexcept
{
    return std::max(std::max(std::abs(X[0]), std::abs(X[2])), std::max(std::abs(X[1]), std::abs(X[3])));
}

inline bool all_finite(const Vec4& X) noexcept
{
    return std::isfinite(X[0]) && std::isfinite(X[1]) && std::isfinite(X[2]) && std::isfinite(X[3]);
}

inline Vec4 axpy(const Vec4& y, double h, const Vec4& k) noexcept
{
    return {y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]};
}

struct StepResult {
    Vec4 y1{};
    Vec4 k7{};
    Vec4 err{};
    Vec4 k3{}, k4{}, k5{}, k6{};
};

/// One Dormand-Prince step from (y, k1 = F(y)) with step h.
inline StepResult dp_step(const Vec4& y, const Vec4& k1, double h, const Params& prm) noexcept
{
    using namespace dopri;
    StepResult r;
    const Vec4 k2 = vector_field(axpy(y, h * a21, k1), prm);
    Vec4 ys;
    for (std::size_t i = 0; i < 4; ++i) ys[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    r.k3 = vector_field(ys, prm);
    for (std::size_t i = 0; i < 4; ++i) ys[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * r.k3[i]);
    r.k4 = vector_field(ys, prm);
    for (std::size_t i = 0; i < 4; ++i)
        ys[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * r.k3[i] + a54 * r.k4[i]);
    r.k5 = vector_field(ys, prm);
    for (std::size_t i = 0; i < 4; ++i)
        ys[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * r.k3[i] + a64 * r.k4[i] + a65 * r.k5[i]);
    r.k6 = vector_field(ys, prm);
    for (std::size_t i = 0; i < 4; ++i)
        r.y1[i] = y[i] + h * (a71 * k1[i] + a73 * r.k3[i] + a74 * r.k4[i] + a75 * r.k5[i] + a76 * r.k6[i]);
    r.k7 = vector_field(r.y1, prm);
    for (std::size_t i = 0; i < 4; ++i)
        r.err[i] = h * (e1 * k1[i] + e3 * r.k3[i] + e4 * r.k4[i] + e5 * r.k5[i] + e6 * r.k6[i] + e7 * r.k7[i]);
    return r;
}

inline DenseSegment make_segment(const Vec4& y, const Vec4& k1, const StepResult& r, double x0, double x1,
                                 double h) noexcept
{
    using namespace dopri;
    DenseSegment seg;
    seg.x0 = x0;
    seg.x1 = x1;
    seg.h = h;
    for (std::size_t i = 0; i < 4; ++i) {
        const double ydiff = r.y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        seg.coef[0][i] = y[i];
        seg.coef[1][i] = ydiff;
        seg.coef[2][i] = bspl;
        seg.coef[3][i] = ydiff - h * r.k7[i] - bspl;
        seg.coef[4][i] =
            h * (d1 * k1[i] + d3 * r.k3[i] + d4 * r.k4[i] + d5 * r.k5[i] + d6 * r.k6[i] + d7 * r.k7[i]);
    }
    return seg;
}

/// True if u or v changes sign over the step or ends it within two step lengths of zero.
inline bool near_axis(const Vec4& y0, const Vec4& y1) noexcept
{
    auto close = [](double a, double b) {
        return sign_of(a) * sign_of(b) <= 0 || std::min(std::abs(a), std::abs(b)) < 2.0 * std::abs(b - a);
    };
    return close(y0[idx::u], y1[idx::u]) || close(y0[idx::v], y1[idx::v]);
}

/// Fraction of the step at which u or v first changes sign (1 if neither does).
inline double first_sign_change(const Vec4& y0, const Vec4& y1, const DenseSegment& seg)
{
    double th = 1.0;
    for (std::size_t c : {idx::u, idx::v}) {
        const int s0 = sign_of(y0[c]);
        if (s0 == 0 || sign_of(y1[c]) != -s0) continue;
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            (sign_of(seg.eval(seg.x0 + mid * seg.h)[c]) == s0 ? lo : hi) = mid;
        }
        th = std::min(th, hi);
    }
    return th;
}

inline double initial_step(const Vec4& y0, const Vec4& f0, const Params& prm, double rtol, double atol,
                           double hmax)
{
    Vec4 sy, sf;
    for (std::size_t i = 0; i < 4; ++i) {
        const double sk = atol + rtol * std::abs(y0[i]);
        sy[i] = y0[i] / sk;
        sf[i] = f0[i] / sk;
    }
    const double dny = pair_rms(sy);
    const double dnf = pair_rms(sf);
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * (dny / dnf);
    h = std::min(h, hmax);
    const Vec4 f1 = vector_field(axpy(y0, h, f0), prm);
    Vec4 sd;
    for (std::size_t i = 0; i < 4; ++i) sd[i] = (f1[i] - f0[i]) / (atol + rtol * std::abs(y0[i]));
    const double der2 = pair_rms(sd) / h;
    const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, hmax});
}

/// Crossing search on a node sequence using an (x -> (u, v)) evaluator.
template <class Eval>
std::vector<Event> locate_crossings(const std::vector<double>& nodes, Eval&& uv_at, const Params& prm)
{
    std::vector<Event> out;
    if (nodes.size() < 2) return out;
    struct Tracker {
        CurveId id;
        int last_sign = 0;
        double last_x = 0.0;
    };
    std::array<Tracker, 2> tr{Tracker{CurveId::Gamma}, Tracker{CurveId::GammaStar}};
    auto gval = [&](CurveId id, double x) {
        const Point q = uv_at(x);
        return id == CurveId::Gamma ? g_omega(q.u, q.v, prm) : g_omega(q.v, q.u, prm);
    };
    for (double x : nodes) {
        for (auto& t : tr) {
            const int s = sign_of(gval(t.id, x));
            if (s == 0) continue;
            if (t.last_sign != 0 && s != t.last_sign) {
                double lo = t.last_x, hi = x;
                while (hi - lo > 1e-10) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    const int sm = sign_of(gval(t.id, mid));
                    if (sm == 0) {
                        lo = hi = mid;
                        break;
                    }
                    (sm == t.last_sign ? lo : hi) = mid;
                }
                const double xr = 0.5 * (lo + hi);
                out.push_back({xr, t.id});
            }
            t.last_sign = s;
            t.last_x = x;
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Event& l, const Event& r) { return l.x < r.x; });
    return out;
}

} // namespace detail

/// All sign changes of g(u(x), v(x)) and g(v(x), u(x)), localized to 1e-10 in x on the
/// dense output. Each step is probed at four interior points.
inline std::vector<Event> event_crossings(const Trajectory& traj, const Params& prm)
{
    std::vector<double> nodes;
    if (traj.segments.empty()) return {};
    nodes.reserve(4 * traj.segments.size() + 1);
    nodes.push_back(traj.segments.front().x0);
    for (const auto& seg : traj.segments) {
        for (int k = 1; k < 4; ++k) nodes.push_back(seg.x0 + seg.h * (0.25 * k));
        nodes.push_back(seg.x1);
    }
    return detail::locate_crossings(
        nodes,
        [&](double x) {
            const State s = traj.at(x);
            return Point{s.u, s.v};
        },
        prm);
}

inline std::vector<Event> event_crossings(const Trajectory& traj)
{
    return event_crossings(traj, traj.params);
}

/// Classifies the tail of a trajectory.
///   ConvergedTo(V)      the whole trailing window lies within eps of V with |u'| + |v'| <= eps
///   Unbounded           the phase norm exceeded blowup_norm (or became non-finite)
///   BoundedOscillation  otherwise, if u' changes sign at least twice in the window
///   Undecided           otherwise
/// A trajectory shorter than the window is judged on all of its samples.
inline LimitVerdict detect_limit(const Trajectory& traj, const FixedPoints& fixed, double eps = 1e-4,
                                 double window = 20.0, double blowup_norm = 1e8)
{
    LimitVerdict verdict;
    if (traj.samples.empty()) throw InvalidParams("detect_limit: empty trajectory");

    for (const auto& s : traj.samples) {
        const Vec4 X = s.phase();
        if (!detail::all_finite(X) || detail::inf_norm(X) > blowup_norm) {
            verdict.kind = LimitVerdict::Kind::Unbounded;
            verdict.escape_x = s.x;
            return verdict;
        }
    }
    if (traj.termination == Termination::BlowUp) {
        verdict.kind = LimitVerdict::Kind::Unbounded;
        verdict.escape_x = traj.x_end();
        return verdict;
    }

    const double x_last = traj.samples.back().x;
    const double x_from = x_last - window;
    auto first = std::find_if(traj.samples.begin(), traj.samples.end(),
                              [&](const State& s) { return s.x >= x_from; });

    for (Vertex vx : all_vertices) {
        const Point q = fixed.at(vx);
        const bool close = std::all_of(first, traj.samples.end(), [&](const State& s) {
            return std::hypot(s.u - q.u, s.v - q.v) <= eps && std::abs(s.du) + std::abs(s.dv) <= eps;
        });
        if (close) {
            verdict.kind = LimitVerdict::Kind::ConvergedTo;
            verdict.vertex = vx;
            return verdict;
        }
    }

    constexpr double dead_band = 1e-12;
    int last = 0;
    int changes = 0;
    verdict.u_min = verdict.v_min = std::numeric_limits<double>::infinity();
    verdict.u_max = verdict.v_max = -std::numeric_limits<double>::infinity();
    for (auto it = first; it != traj.samples.end(); ++it) {
        verdict.u_min = std::min(verdict.u_min, it->u);
        verdict.u_max = std::max(verdict.u_max, it->u);
        verdict.v_min = std::min(verdict.v_min, it->v);
        verdict.v_max = std::max(verdict.v_max, it->v);
        if (std::abs(it->du) <= dead_band) continue;
        const int s = sign_of(it->du);
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    verdict.du_sign_changes = changes;
    verdict.kind = changes >= 2 ? LimitVerdict::Kind::BoundedOscillation : LimitVerdict::Kind::Undecided;
    return verdict;
}

inline Trajectory integrate(double a, double b, const Params& prm, const IntegratorOptions& opt)
{
    validate(prm);
    if (!(opt.x_max > 0.0) || !std::isfinite(opt.x_max)) throw InvalidParams("integrate: x_max must be > 0");
    if (!(opt.rel_tol > 0.0 && opt.rel_tol <= 1e-2)) throw InvalidParams("integrate: rel_tol must lie in (0, 1e-2]");
    if (!(opt.abs_tol > 0.0 && opt.abs_tol <= 1e-2)) throw InvalidParams("integrate: abs_tol must lie in (0, 1e-2]");
    if (!(opt.output_stride > 0.0)) throw InvalidParams("integrate: output_stride must be > 0");
    if (!std::isfinite(a) || !std::isfinite(b)) throw InvalidParams("integrate: initial data must be finite");

    using namespace dopri;
    Trajectory traj;
    traj.params = prm;
    traj.a = a;
    traj.b = b;

    const FixedPoints fixed = vertices(prm);
    const double rtol = opt.rel_tol;
    const double atol = opt.abs_tol;
    const double xend = opt.x_max;
    const double hmax = std::min(opt.max_step, xend);
    const double hmin = 1e-14 * xend;

    Vec4 y{a, 0.0, b, 0.0};
    const double e0 = energy(y, prm).total;
    double drift = 0.0;
    Vec4 k1 = vector_field(y, prm);
    double x = 0.0;
    double h = detail::initial_step(y, k1, prm, rtol, atol, hmax);

    constexpr double safe = 0.9, facl = 0.2, facr = 10.0, beta = 0.04;
    const double expo1 = 0.2 - beta * 0.75;
    double facold = 1e-4;
    bool last_rejected = false;
    double last_far = 0.0;

    auto near_vertex = [&](const Vec4& X) {
        return fixed.nearest(X[idx::u], X[idx::v]).second <= opt.limit_eps &&
               std::abs(X[idx::du]) + std::abs(X[idx::dv]) <= opt.limit_eps;
    };

    while (true) {
        if (traj.accepted_steps + traj.rejected_steps >= opt.max_steps) {
            traj.termination = Termination::StepLimit;
            break;
        }
        bool last = false;
        if (x + 1.01 * h >= xend) {
            h = xend - x;
            last = true;
        }
        if (h < hmin) {
            traj.termination = Termination::StepSizeUnderflow;
            break;
        }

        const detail::StepResult full = detail::dp_step(y, k1, h, prm);
        const Vec4& y1 = full.y1;

        Vec4 scaled_err;
        for (std::size_t i = 0; i < 4; ++i)
            scaled_err[i] = full.err[i] / (atol + rtol * std::max(std::abs(y[i]), std::abs(y1[i])));
        double err = detail::inf_norm(scaled_err);
        if (!std::isfinite(err)) err = 1e10;

        const double fac11 = std::pow(err, expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::clamp(fac / safe, 1.0 / facr, 1.0 / facl);
        double hnew = h / fac;

        if (err > 1.0) {
            ++traj.rejected_steps;
            hnew = h / std::min(1.0 / facl, fac11 / safe);
            last_rejected = true;
            h = hnew;
            continue;
        }

        // A step that carries u or v through zero is shortened to end just past the
        // crossing, so the non-smooth point sits at a step boundary.
        if (const double th = detail::first_sign_change(y, y1, detail::make_segment(y, k1, full, x, x + h, h));
            th < 0.999 && th * h > hmin) {
            h *= std::min(th + 1e-9, 1.0);
            last = false;
            continue;
        }

        // Near u = 0 or v = 0 the term |u|^{p-1} u loses smoothness and the embedded
        // estimate is unreliable. Such steps are redone as two half steps and accepted
        // only if the two answers agree to tolerance.
        std::array<detail::StepResult, 2> halves;
        const bool crossing = detail::near_axis(y, y1);
        if (crossing) {
            halves[0] = detail::dp_step(y, k1, 0.5 * h, prm);
            halves[1] = detail::dp_step(halves[0].y1, halves[0].k7, 0.5 * h, prm);
            Vec4 diff;
            for (std::size_t i = 0; i < 4; ++i)
                diff[i] = (y1[i] - halves[1].y1[i]) /
                          (atol + rtol * std::max(std::abs(y[i]), std::abs(halves[1].y1[i])));
            const double err2 = detail::inf_norm(diff);
            if (!(err2 <= 1.0)) {
                ++traj.rejected_steps;
                h *= std::isfinite(err2) ? std::clamp(0.9 * std::pow(err2, -0.25), facl, 0.9) : facl;
                last_rejected = true;
                continue;
            }
        }

        // accepted
        facold = std::max(err, 1e-4);
        ++traj.accepted_steps;
        const double xn = last ? xend : x + h;
        const Vec4 y_next = crossing ? halves[1].y1 : y1;

        if (!detail::all_finite(y_next)) {
            traj.termination = Termination::BlowUp;
            break;
        }

        if (crossing) {
            const double xm = x + 0.5 * h;
            traj.segments.push_back(detail::make_segment(y, k1, halves[0], x, xm, 0.5 * h));
            traj.segments.push_back(detail::make_segment(halves[0].y1, halves[0].k7, halves[1], xm, xn, xn - xm));
        } else {
            traj.segments.push_back(detail::make_segment(y, k1, full, x, xn, h));
        }

        const Vec4 k_next = crossing ? halves[1].k7 : full.k7;
        y = y_next;
        k1 = k_next;
        x = xn;
        drift = std::max(drift, std::abs(energy(y, prm).total - e0));

        if (detail::inf_norm(y) > opt.blowup_norm) {
            traj.termination = Termination::BlowUp;
            break;
        }
        if (!near_vertex(y)) last_far = x;
        if (opt.stop_on_limit && x - last_far >= opt.limit_window) {
            traj.termination = Termination::LimitDetected;
            break;
        }
        if (last) {
            traj.termination = Termination::ReachedEnd;
            break;
        }

        hnew = std::min(hnew, hmax);
        if (last_rejected) hnew = std::min(hnew, h);
        last_rejected = false;
        h = hnew;
    }

    traj.events = event_crossings(traj, prm);

    // samples: fixed stride, every event point, and the final point
    const double x_stop = traj.x_end();
    std::vector<double> xs;
    for (std::size_t k = 0;; ++k) {
        const double xk = double(k) * opt.output_stride;
        if (xk > x_stop) break;
        xs.push_back(xk);
    }
    for (const auto& ev : traj.events) xs.push_back(ev.x);
    xs.push_back(x_stop);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    traj.samples.reserve(xs.size());
    if (traj.segments.empty()) {
        traj.samples.push_back(State{0.0, a, b, 0.0, 0.0});
    } else {
        for (double xs_k : xs) {
            State s = xs_k == 0.0 ? State{0.0, a, b, 0.0, 0.0} : traj.at(xs_k);
            drift = std::max(drift, std::abs(energy(s, prm).total - e0));
            traj.samples.push_back(s);
        }
    }
    traj.energy_drift = drift;
    traj.verdict = detect_limit(traj, fixed, opt.limit_eps, opt.limit_window, opt.blowup_norm);
    return traj;
}

inline Trajectory integrate(double a, double b, const Params& prm, double x_max, double rel_tol,
                            double abs_tol)
{
    IntegratorOptions opt;
    opt.x_max = x_max;
    opt.rel_tol = rel_tol;
    opt.abs_tol = abs_tol;
    return integrate(a, b, prm, opt);
}

} // namespace mixnls
