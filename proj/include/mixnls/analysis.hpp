#pragma once

// Report-mode checks of the qualitative claims: per-region predictions, trajectory
// reports, grid sweeps, mirror/swap residuals and a Monte-Carlo Lipschitz estimate.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mixnls/errors.hpp"
#include "mixnls/geometry.hpp"
#include "mixnls/integrator.hpp"
#include "mixnls/model.hpp"

namespace mixnls {

/// +1 nondecreasing, -1 nonincreasing, 0 no claim.
using Direction = int;

inline const char* direction_name(Direction d) noexcept
{
    return d > 0 ? "nondecreasing" : d < 0 ? "nonincreasing" : "none";
}

struct TheoremPrediction {
    Region region;
    std::string theorem; // "1".."6"

    // Monotonicity as stated for the cell.
    Direction u_dir = 0;
    Direction v_dir = 0;
    // Directions implied by the signs of u''(0), v''(0) everywhere in the cell.
    Direction u_initial = 0;
    Direction v_initial = 0;
    // Sign of u and v claimed along the solution (0: no claim).
    int u_sign = 0;
    int v_sign = 0;

    std::optional<Vertex> attractor;  // a specific vertex, or any vertex if empty
    bool confined = false;            // stays in its cell
    bool not_simultaneously_monotone = false;

    /// Stated directions agree with the initial-sign directions.
    [[nodiscard]] bool stated_matches_initial() const noexcept
    {
        return u_dir == u_initial && v_dir == v_initial;
    }
};

namespace detail {

inline constexpr std::array<Vertex, 4> quadrant_vertex{Vertex::B, Vertex::D, Vertex::F, Vertex::H};
// (sign a, sign b) for table quadrants I, IV, III, II
inline constexpr std::array<std::array<int, 2>, 4> quadrant_signs{{{1, 1}, {1, -1}, {-1, -1}, {-1, 1}}};
// (sign g(a,b), sign g(b,a)) for cells 1..3 and the exterior cell
inline constexpr std::array<std::array<int, 2>, 4> cell_signs{{{-1, 1}, {-1, -1}, {1, -1}, {1, 1}}};

// Stated (u, v) directions for Omega1..Omega12.
inline constexpr std::array<std::array<Direction, 2>, 12> stated_dirs{{
    {1, -1}, {1, 1}, {-1, 1},   // Omega1..3
    {-1, 1}, {1, 1}, {1, 1},    // Omega4..6
    {-1, 1}, {-1, -1}, {1, -1}, // Omega7..9
    {1, 1}, {-1, 1}, {-1, -1},  // Omega10..12
}};

} // namespace detail

/// Prediction table for a cell. Throws NoPrediction for vertices, the origin and the
/// diagonals of Lambda.
inline TheoremPrediction theorem_prediction(const Region& region)
{
    TheoremPrediction t;
    t.region = region;
    switch (region.kind) {
    case Region::Kind::Omega: {
        if (region.index < 1 || region.index > 12) throw InvalidParams("theorem_prediction: bad Omega index");
        const int q = (region.index - 1) / 3;
        const int cell = (region.index - 1) % 3;
        const auto qs = detail::quadrant_signs[std::size_t(q)];
        const auto cs = detail::cell_signs[std::size_t(cell)];
        t.theorem = q == 0 ? std::to_string(cell + 1) : "6";
        t.u_dir = detail::stated_dirs[std::size_t(region.index - 1)][0];
        t.v_dir = detail::stated_dirs[std::size_t(region.index - 1)][1];
        t.u_initial = -cs[0] * qs[0];
        t.v_initial = -cs[1] * qs[1];
        t.u_sign = qs[0];
        t.v_sign = qs[1];
        t.attractor = detail::quadrant_vertex[std::size_t(q)];
        t.confined = true;
        return t;
    }
    case Region::Kind::OmegaExt: {
        if (region.index < 1 || region.index > 4) throw InvalidParams("theorem_prediction: bad OmegaExt index");
        const auto qs = detail::quadrant_signs[std::size_t(region.index - 1)];
        t.theorem = "4";
        t.u_initial = -qs[0];
        t.v_initial = -qs[1];
        t.not_simultaneously_monotone = true;
        return t;
    }
    case Region::Kind::EdgeGamma:
    case Region::Kind::EdgeGammaStar:
        t.theorem = "5";
        t.not_simultaneously_monotone = true;
        return t;
    default:
        throw NoPrediction("no prediction for region " + region.name());
    }
}

struct TheoremReport {
    double a = 0.0;
    double b = 0.0;
    Region region;
    std::optional<TheoremPrediction> predicted;

    struct Observed {
        int sign_u2 = 0; // sign of u''(0), analytic
        int sign_v2 = 0;
        Direction u_first_steps = 0; // common direction of u over the first accepted steps, 0 if mixed
        Direction v_first_steps = 0;
        double mono_fraction_u = 1.0; // fraction of samples with du in the stated direction
        double mono_fraction_v = 1.0;
        bool u_monotone = true; // monotone in some direction over the whole run
        bool v_monotone = true;
        int confinement_violations = 0;
        std::size_t n_events = 0;
        LimitVerdict verdict;
        Termination termination = Termination::ReachedEnd;
        double energy_drift = 0.0;
        double x_end = 0.0;
    } observed;

    struct Agreement {
        bool sign_u2 = true;     // analytic sign equals sign(-g(a,b) a)
        bool sign_v2 = true;
        bool initial_u = true;   // first steps move u in the initial-sign direction
        bool initial_v = true;
        bool mono_u = true;      // stated monotonicity held over the run
        bool mono_v = true;
        bool attractor = true;
        bool confinement = true;
    } agreement;

    std::string notes;
};

inline constexpr double monotone_dead_band = 1e-12;
inline constexpr std::size_t first_steps_checked = 10;

namespace detail {

/// Common sign of u(x_k) - u(x_{k-1}) over the first n accepted steps (0 if not common).
inline Direction first_steps_direction(const Trajectory& tr, std::size_t comp, std::size_t n)
{
    Direction dir = 0;
    double prev = tr.segments.empty() ? 0.0 : tr.segments.front().coef[0][comp];
    for (std::size_t k = 0; k < std::min(n, tr.segments.size()); ++k) {
        const double next = tr.segments[k].eval(tr.segments[k].x1)[comp];
        const int s = sign_of(next - prev);
        if (s == 0) return 0;
        if (dir == 0) dir = s;
        else if (s != dir) return 0;
        prev = next;
    }
    return dir;
}

inline double mono_fraction(const std::vector<State>& samples, bool use_u, Direction dir)
{
    if (samples.size() < 2 || dir == 0) return 1.0;
    std::size_t good = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double d = use_u ? samples[i].du : samples[i].dv;
        if (std::abs(d) <= monotone_dead_band || sign_of(d) == dir) ++good;
    }
    return double(good) / double(samples.size() - 1);
}

} // namespace detail

/// Classifies, integrates and compares. Disagreement is recorded, never raised.
/// Requires canonical parameters (sigma1 = sigma2 = lambda = 1).
inline TheoremReport verify_theorem(double a, double b, const Params& prm, const IntegratorOptions& opt)
{
    if (!prm.canonical())
        throw InvalidParams("verify_theorem: parameters must be canonical; reduce them with scaling first");
    TheoremReport r;
    r.a = a;
    r.b = b;
    r.region = classify_point(a, b, prm);

    auto& ob = r.observed;
    const auto [upp, vpp] = second_derivatives_at_origin(a, b, prm);
    ob.sign_u2 = sign_of(upp);
    ob.sign_v2 = sign_of(vpp);
    r.agreement.sign_u2 = ob.sign_u2 == sign_of(-g_omega(a, b, prm) * a);
    r.agreement.sign_v2 = ob.sign_v2 == sign_of(-g_omega(b, a, prm) * b);

    try {
        r.predicted = theorem_prediction(r.region);
    } catch (const NoPrediction&) {
        r.notes = r.region.kind == Region::Kind::Origin ? "zero solution" : "stationary point";
    }

    const Trajectory tr = integrate(a, b, prm, opt);
    ob.verdict = tr.verdict;
    ob.termination = tr.termination;
    ob.energy_drift = tr.energy_drift;
    ob.x_end = tr.x_end();
    ob.n_events = tr.events.size();
    ob.u_first_steps = detail::first_steps_direction(tr, idx::u, first_steps_checked);
    ob.v_first_steps = detail::first_steps_direction(tr, idx::v, first_steps_checked);
    ob.u_monotone = detail::mono_fraction(tr.samples, true, 1) == 1.0 ||
                    detail::mono_fraction(tr.samples, true, -1) == 1.0;
    ob.v_monotone = detail::mono_fraction(tr.samples, false, 1) == 1.0 ||
                    detail::mono_fraction(tr.samples, false, -1) == 1.0;

    if (!r.predicted) {
        if (r.region.is_vertex())
            r.agreement.attractor = ob.verdict.kind == LimitVerdict::Kind::ConvergedTo;
        return r;
    }
    const TheoremPrediction& pr = *r.predicted;
    auto& ag = r.agreement;

    if (pr.u_initial != 0) ag.initial_u = ob.u_first_steps == pr.u_initial;
    if (pr.v_initial != 0) ag.initial_v = ob.v_first_steps == pr.v_initial;

    ob.mono_fraction_u = detail::mono_fraction(tr.samples, true, pr.u_dir);
    ob.mono_fraction_v = detail::mono_fraction(tr.samples, false, pr.v_dir);
    if (pr.not_simultaneously_monotone) {
        ag.mono_u = ag.mono_v = !(ob.u_monotone && ob.v_monotone);
    } else {
        ag.mono_u = ob.mono_fraction_u == 1.0;
        ag.mono_v = ob.mono_fraction_v == 1.0;
    }

    const bool converged = ob.verdict.kind == LimitVerdict::Kind::ConvergedTo;
    ag.attractor = converged && (!pr.attractor || ob.verdict.vertex == *pr.attractor);

    if (pr.confined) {
        ob.confinement_violations = int(tr.events.size());
        ag.confinement = ob.confinement_violations == 0;
    }

    if (!pr.stated_matches_initial()) {
        r.notes = std::string("stated directions (u ") + direction_name(pr.u_dir) + ", v " +
                  direction_name(pr.v_dir) + ") differ from initial signs (u " + direction_name(pr.u_initial) +
                  ", v " + direction_name(pr.v_initial) + ")";
        if (ob.u_first_steps == pr.u_initial && ob.v_first_steps == pr.v_initial)
            r.notes += "; observed start follows the initial signs";
    }
    return r;
}

inline TheoremReport verify_theorem(double a, double b, const Params& prm, double x_max)
{
    IntegratorOptions opt;
    opt.x_max = x_max;
    return verify_theorem(a, b, prm, opt);
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepPoint {
    std::size_t i = 0; // u index
    std::size_t j = 0; // v index
    double a = 0.0;
    double b = 0.0;
    std::optional<TheoremReport> report;
    std::string error; // set when the point failed
};

struct RegionSummary {
    std::size_t count = 0;
    std::size_t with_prediction = 0;
    std::size_t agree_sign_u2 = 0, agree_sign_v2 = 0;
    std::size_t agree_initial_u = 0, agree_initial_v = 0;
    std::size_t agree_mono_u = 0, agree_mono_v = 0;
    std::size_t agree_attractor = 0, agree_confinement = 0;
    std::size_t stated_matches_initial = 0;
    std::map<std::string, std::size_t> verdicts;
};

struct SweepResult {
    std::vector<SweepPoint> points; // row-major in (i, j): j fastest
    std::map<std::string, RegionSummary> summary;
    std::size_t failures = 0;
};

/// n points from lo to hi; x_i = ((n-1-i) lo + i hi)/(n-1), so mirrored ranges give
/// exactly negated nodes.
inline std::vector<double> grid_nodes(double lo, double hi, std::size_t n)
{
    if (n == 1) return {lo};
    std::vector<double> xs(n);
    const double m = double(n - 1);
    for (std::size_t i = 0; i < n; ++i) xs[i] = (double(n - 1 - i) * lo + double(i) * hi) / m;
    return xs;
}

/// A point fails when verify_theorem throws or the integration ends in step-size
/// underflow or the step limit. Blow-up is an outcome, not a failure.
inline SweepResult sweep(std::array<double, 2> u_range, std::array<double, 2> v_range, std::size_t n_u,
                         std::size_t n_v, const Params& prm, const IntegratorOptions& opt,
                         unsigned threads = 0)
{
    for (double x : {u_range[0], u_range[1], v_range[0], v_range[1]})
        if (!std::isfinite(x)) throw InvalidParams("sweep: ranges must be finite");
    if (n_u < 1 || n_v < 1) throw InvalidParams("sweep: counts must be >= 1");
    validate(prm);

    const auto us = grid_nodes(u_range[0], u_range[1], n_u);
    const auto vs = grid_nodes(v_range[0], v_range[1], n_v);
    SweepResult res;
    res.points.resize(n_u * n_v);
    for (std::size_t i = 0; i < n_u; ++i)
        for (std::size_t j = 0; j < n_v; ++j) {
            auto& pt = res.points[i * n_v + j];
            pt.i = i;
            pt.j = j;
            pt.a = us[i];
            pt.b = vs[j];
        }

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < res.points.size(); k = next++) {
            auto& pt = res.points[k];
            try {
                pt.report = verify_theorem(pt.a, pt.b, prm, opt);
                const Termination t = pt.report->observed.termination;
                if (t == Termination::StepSizeUnderflow || t == Termination::StepLimit)
                    pt.error = std::string("integration ended with ") + to_string(t);
            } catch (const std::exception& e) {
                pt.error = e.what();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = unsigned(std::min<std::size_t>(threads, res.points.size()));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    for (const auto& pt : res.points) {
        if (!pt.error.empty()) ++res.failures;
        if (!pt.report) continue;
        const auto& r = *pt.report;
        auto& s = res.summary[r.region.name()];
        ++s.count;
        if (r.predicted) {
            ++s.with_prediction;
            s.stated_matches_initial += r.predicted->stated_matches_initial();
        }
        s.agree_sign_u2 += r.agreement.sign_u2;
        s.agree_sign_v2 += r.agreement.sign_v2;
        s.agree_initial_u += r.agreement.initial_u;
        s.agree_initial_v += r.agreement.initial_v;
        s.agree_mono_u += r.agreement.mono_u;
        s.agree_mono_v += r.agreement.mono_v;
        s.agree_attractor += r.agreement.attractor;
        s.agree_confinement += r.agreement.confinement;
        ++s.verdicts[r.observed.verdict.name()];
    }
    return res;
}

// ---------------------------------------------------------------------------
// Symmetry

/// Sup-norm residuals of the identities
///   [0] (-a, b) vs u-negated (a, b)   [1] (a, -b) vs v-negated
///   [2] (-a, -b) vs both negated      [3] (b, a) vs swapped
/// over all samples. A sample-grid mismatch gives an infinite residual.
inline std::array<double, 4> symmetry_check(double a, double b, const Params& prm, const IntegratorOptions& opt)
{
    const Trajectory base = integrate(a, b, prm, opt);
    auto resid = [&](const Trajectory& other, double su, double sv, bool swap) {
        if (other.samples.size() != base.samples.size()) return std::numeric_limits<double>::infinity();
        double m = 0.0;
        for (std::size_t k = 0; k < base.samples.size(); ++k) {
            const State& s = base.samples[k];
            const State& o = other.samples[k];
            State t = swap ? State{s.x, s.v, s.u, s.dv, s.du} : State{s.x, su * s.u, sv * s.v, su * s.du, sv * s.dv};
            m = std::max({m, std::abs(o.x - t.x), std::abs(o.u - t.u), std::abs(o.v - t.v), std::abs(o.du - t.du),
                          std::abs(o.dv - t.dv)});
        }
        return m;
    };
    return {resid(integrate(-a, b, prm, opt), -1.0, 1.0, false), resid(integrate(a, -b, prm, opt), 1.0, -1.0, false),
            resid(integrate(-a, -b, prm, opt), -1.0, -1.0, false), resid(integrate(b, a, prm, opt), 1.0, 1.0, true)};
}

inline std::array<double, 4> symmetry_check(double a, double b, const Params& prm, double x_max)
{
    IntegratorOptions opt;
    opt.x_max = x_max;
    opt.stop_on_limit = false;
    return symmetry_check(a, b, prm, opt);
}

// ---------------------------------------------------------------------------
// Lipschitz

struct LipschitzEstimate {
    Vec4 center{};
    double delta = 0.0;
    std::size_t n_pairs = 0;
    double max_ratio = 0.0;
    std::uint64_t seed = 0;
};

/// ||F(X) - F(Y)||_2 / ||X - Y||_2 (0 when X = Y).
inline double lipschitz_ratio(const Vec4& X, const Vec4& Y, const Params& prm)
{
    const Vec4 fx = vector_field(X, prm);
    const Vec4 fy = vector_field(Y, prm);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        num += (fx[i] - fy[i]) * (fx[i] - fy[i]);
        den += (X[i] - Y[i]) * (X[i] - Y[i]);
    }
    return den == 0.0 ? 0.0 : std::sqrt(num / den);
}

/// Max ratio over n_pairs pairs drawn uniformly from the ball B(center, delta).
/// Points are drawn in the unit ball and scaled by delta, so runs sharing a seed
/// use nested samples.
inline LipschitzEstimate lipschitz_estimate(const Vec4& center, double delta, std::size_t n_pairs,
                                            const Params& prm, std::uint64_t seed)
{
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidParams("lipschitz_estimate: delta must be > 0");
    if (n_pairs < 100) throw InvalidParams("lipschitz_estimate: n_pairs must be >= 100");
    for (double c : center)
        if (!std::isfinite(c)) throw InvalidParams("lipschitz_estimate: center must be finite");
    validate(prm);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    auto draw = [&] {
        Vec4 d;
        double n2 = 0.0;
        do {
            n2 = 0.0;
            for (double& x : d) n2 += (x = gauss(rng)) * x;
        } while (n2 == 0.0);
        const double r = delta * std::pow(unif(rng), 0.25) / std::sqrt(n2);
        Vec4 X;
        for (std::size_t i = 0; i < 4; ++i) X[i] = center[i] + r * d[i];
        return X;
    };

    LipschitzEstimate est{center, delta, n_pairs, 0.0, seed};
    for (std::size_t k = 0; k < n_pairs; ++k) {
        const Vec4 X = draw();
        const Vec4 Y = draw();
        est.max_ratio = std::max(est.max_ratio, lipschitz_ratio(X, Y, prm));
    }
    return est;
}

} // namespace mixnls
