#include <cmath>

#include <gtest/gtest.h>

#include "mixnls/analysis.hpp"

using namespace mixnls;

namespace {

const Params P2{2.0, 2.0};

IntegratorOptions short_run(double x_max = 20.0)
{
    IntegratorOptions o;
    o.x_max = x_max;
    return o;
}

Vertex mirror_u(Vertex v)
{
    switch (v) {
    case Vertex::B: return Vertex::H;
    case Vertex::H: return Vertex::B;
    case Vertex::D: return Vertex::F;
    case Vertex::F: return Vertex::D;
    }
    return v;
}

} // namespace

TEST(Prediction, OmegaTwo)
{
    const TheoremPrediction t = theorem_prediction(Region::omega(2));
    EXPECT_EQ(t.u_dir, 1);
    EXPECT_EQ(t.v_dir, 1);
    ASSERT_TRUE(t.attractor);
    EXPECT_EQ(*t.attractor, Vertex::B);
    EXPECT_EQ(t.theorem, "2");
    EXPECT_TRUE(t.stated_matches_initial());
    EXPECT_TRUE(t.confined);
}

TEST(Prediction, OmegaFourAsStated)
{
    const TheoremPrediction t = theorem_prediction(Region::omega(4));
    EXPECT_EQ(t.u_dir, -1);
    EXPECT_EQ(t.v_dir, 1);
    EXPECT_EQ(t.u_sign, 1);
    EXPECT_EQ(t.v_sign, -1);
    EXPECT_EQ(*t.attractor, Vertex::D);
    EXPECT_EQ(t.theorem, "6");
    // u''(0) > 0 throughout the cell, so u starts increasing
    EXPECT_EQ(t.u_initial, 1);
    EXPECT_EQ(t.v_initial, 1);
    EXPECT_FALSE(t.stated_matches_initial());
}

TEST(Prediction, StatedDirectionsAgreeWithSignsInSevenCells)
{
    std::vector<int> mismatched;
    for (int i = 1; i <= 12; ++i)
        if (!theorem_prediction(Region::omega(i)).stated_matches_initial()) mismatched.push_back(i);
    EXPECT_EQ(mismatched, (std::vector<int>{4, 5, 6, 10, 12}));
}

TEST(Prediction, InitialDirectionsMatchSecondDerivativeSigns)
{
    for (int i = 0; i < 41; ++i)
        for (int j = 0; j < 41; ++j) {
            const double a = -1.9 + 3.8 * i / 40.0 + 1e-3, b = -1.9 + 3.8 * j / 40.0 + 2e-3;
            const Region r = classify_point(a, b, P2);
            if (!r.is_interior() && r.kind != Region::Kind::OmegaExt) continue;
            const TheoremPrediction t = theorem_prediction(r);
            const auto [upp, vpp] = second_derivatives_at_origin(a, b, P2);
            EXPECT_EQ(sign_of(upp), t.u_initial) << a << ' ' << b;
            EXPECT_EQ(sign_of(vpp), t.v_initial) << a << ' ' << b;
        }
}

TEST(Prediction, ExteriorAndEdges)
{
    const TheoremPrediction e = theorem_prediction(Region::ext(1));
    EXPECT_TRUE(e.not_simultaneously_monotone);
    EXPECT_FALSE(e.attractor);
    EXPECT_EQ(e.theorem, "4");
    EXPECT_EQ(theorem_prediction(Region::of(Region::Kind::EdgeGamma)).theorem, "5");
}

TEST(Prediction, NoneForVerticesOriginDiagonal)
{
    EXPECT_THROW(theorem_prediction(Region::of(Region::Kind::VertexB)), NoPrediction);
    EXPECT_THROW(theorem_prediction(Region::of(Region::Kind::Origin)), NoPrediction);
    EXPECT_THROW(theorem_prediction(Region::of(Region::Kind::LambdaDiagonal)), NoPrediction);
}

TEST(Verify, VertexIsStationary)
{
    const TheoremReport r = verify_theorem(1.0, 1.0, P2, short_run());
    EXPECT_EQ(r.region, Region::of(Region::Kind::VertexB));
    EXPECT_FALSE(r.predicted);
    EXPECT_EQ(r.observed.verdict.kind, LimitVerdict::Kind::ConvergedTo);
    EXPECT_TRUE(r.agreement.attractor);
    EXPECT_EQ(r.notes, "stationary point");
}

TEST(Verify, OmegaTwoStartsUpward)
{
    const TheoremReport r = verify_theorem(0.5, 0.5, P2, short_run());
    EXPECT_EQ(r.region, Region::omega(2));
    EXPECT_EQ(r.observed.sign_u2, 1);
    EXPECT_EQ(r.observed.sign_v2, 1);
    EXPECT_EQ(r.observed.u_first_steps, 1);
    EXPECT_TRUE(r.agreement.initial_u);
    EXPECT_TRUE(r.agreement.initial_v);
    EXPECT_TRUE(r.agreement.sign_u2);
}

TEST(Verify, ExteriorStartsDownward)
{
    const TheoremReport r = verify_theorem(1.5, 1.5, P2, short_run());
    EXPECT_EQ(r.region, Region::ext(1));
    EXPECT_EQ(r.observed.sign_u2, -1);
    EXPECT_EQ(r.observed.sign_v2, -1);
    EXPECT_TRUE(r.agreement.initial_u);
}

TEST(Verify, MismatchIsNotedNotRaised)
{
    const TheoremReport r = verify_theorem(1.41, -0.05, P2, short_run());
    EXPECT_EQ(r.region, Region::omega(4));
    EXPECT_NE(r.notes.find("differ from initial signs"), std::string::npos);
    EXPECT_NE(r.notes.find("observed start follows the initial signs"), std::string::npos);
}

TEST(Verify, RequiresCanonicalParams)
{
    EXPECT_THROW(verify_theorem(0.5, 0.5, Params{2.0, 2.0, 2.0}, 10.0), InvalidParams);
}

TEST(Verify, ReproducibleBitForBit)
{
    const TheoremReport a = verify_theorem(0.7, 1.2, P2, short_run());
    const TheoremReport b = verify_theorem(0.7, 1.2, P2, short_run());
    EXPECT_EQ(a.observed.energy_drift, b.observed.energy_drift);
    EXPECT_EQ(a.observed.mono_fraction_u, b.observed.mono_fraction_u);
    EXPECT_EQ(a.observed.verdict.u_min, b.observed.verdict.u_min);
}

TEST(GridNodes, MirroredRangesNegateExactly)
{
    const auto pos = grid_nodes(0.0, 1.6, 20);
    const auto neg = grid_nodes(-1.6, 0.0, 20);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(neg[i], -pos[19 - i]);
    EXPECT_EQ(pos.front(), 0.0);
    EXPECT_EQ(pos.back(), 1.6);
    EXPECT_EQ(grid_nodes(1.0, 2.0, 1), std::vector<double>{1.0});
}

TEST(Sweep, SinglePointAtVertex)
{
    const SweepResult s = sweep({1.0, 1.0}, {1.0, 1.0}, 1, 1, P2, short_run());
    ASSERT_EQ(s.points.size(), 1u);
    ASSERT_TRUE(s.points[0].report);
    EXPECT_EQ(s.points[0].report->region.name(), "VertexB");
    EXPECT_EQ(s.summary.at("VertexB").count, 1u);
    EXPECT_EQ(s.failures, 0u);
}

TEST(Sweep, SignAgreementIsTotal)
{
    const SweepResult s = sweep({0.0, 1.6}, {0.0, 1.6}, 20, 20, P2, short_run(), 2);
    EXPECT_EQ(s.points.size(), 400u);
    EXPECT_EQ(s.failures, 0u);
    std::size_t total = 0;
    for (const auto& [name, r] : s.summary) {
        EXPECT_EQ(r.agree_sign_u2, r.count) << name;
        EXPECT_EQ(r.agree_sign_v2, r.count) << name;
        total += r.count;
    }
    EXPECT_EQ(total, 400u);
    for (std::size_t k = 0; k < s.points.size(); ++k) {
        EXPECT_EQ(s.points[k].i, k / 20);
        EXPECT_EQ(s.points[k].j, k % 20);
    }
}

TEST(Sweep, MirroredGridMirrorsObservations)
{
    const std::size_t n = 8;
    const SweepResult q1 = sweep({0.0, 1.6}, {0.0, 1.6}, n, n, P2, short_run());
    const SweepResult q2 = sweep({-1.6, 0.0}, {0.0, 1.6}, n, n, P2, short_run());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto& r1 = *q1.points[i * n + j].report;
            const auto& r2 = *q2.points[(n - 1 - i) * n + j].report;
            ASSERT_EQ(r2.a, -r1.a);
            ASSERT_EQ(r2.b, r1.b);
            if (r1.a == 0.0) continue; // the axis belongs to quadrant I in the table
            if (r1.region.kind == Region::Kind::Omega) EXPECT_EQ(r2.region, Region::omega(r1.region.index + 9));
            if (r1.region.kind == Region::Kind::OmegaExt) EXPECT_EQ(r2.region, Region::ext(4));
            EXPECT_EQ(r2.observed.sign_u2, -r1.observed.sign_u2);
            EXPECT_EQ(r2.observed.sign_v2, r1.observed.sign_v2);
            EXPECT_EQ(r2.observed.u_first_steps, -r1.observed.u_first_steps);
            EXPECT_EQ(r2.observed.v_first_steps, r1.observed.v_first_steps);
            EXPECT_EQ(r2.observed.energy_drift, r1.observed.energy_drift);
            EXPECT_EQ(r2.observed.n_events, r1.observed.n_events);
            EXPECT_EQ(r2.observed.verdict.kind, r1.observed.verdict.kind);
            EXPECT_EQ(r2.observed.verdict.du_sign_changes, r1.observed.verdict.du_sign_changes);
            if (r1.observed.verdict.kind == LimitVerdict::Kind::ConvergedTo)
                EXPECT_EQ(r2.observed.verdict.vertex, mirror_u(r1.observed.verdict.vertex));
        }
}

TEST(Sweep, RejectsBadGrid)
{
    EXPECT_THROW(sweep({0.0, NAN}, {0.0, 1.0}, 2, 2, P2, short_run()), InvalidParams);
    EXPECT_THROW(sweep({0.0, 1.0}, {0.0, 1.0}, 0, 2, P2, short_run()), InvalidParams);
}

TEST(Symmetry, Examples)
{
    for (double r : symmetry_check(0.0, 0.0, P2, 20.0)) EXPECT_EQ(r, 0.0);
    EXPECT_EQ(symmetry_check(0.7, 0.7, P2, 20.0)[3], 0.0);
    for (double r : symmetry_check(1.2, 0.3, P2, 50.0)) EXPECT_LE(r, 1e-10);
}

TEST(Lipschitz, LinearComponentsGiveOne)
{
    const Vec4 X{0.0, 0.3, 0.0, 0.0}, Y{0.0, -0.2, 0.0, 0.0};
    EXPECT_EQ(lipschitz_ratio(X, Y, P2), 1.0);
    const Vec4 Z{0.0, 0.0, 0.0, 0.7}, W{0.0, 0.0, 0.0, 0.1};
    EXPECT_EQ(lipschitz_ratio(Z, W, P2), 1.0);
    EXPECT_EQ(lipschitz_ratio(X, X, P2), 0.0);
}

TEST(Lipschitz, StableAcrossSeeds)
{
    const Vec4 c{1.0, 0.0, 1.0, 0.0};
    std::vector<double> r;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) r.push_back(lipschitz_estimate(c, 0.1, 10000, P2, seed).max_ratio);
    const double mean = (r[0] + r[1] + r[2] + r[3] + r[4]) / 5.0;
    for (double x : r) {
        EXPECT_TRUE(std::isfinite(x));
        EXPECT_NEAR(x, mean, 0.1 * mean);
    }
}

TEST(Lipschitz, NestedBallsDoNotShrink)
{
    const Vec4 c{1.0, 0.0, 1.0, 0.0};
    double prev = 0.0;
    for (double d : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        const double r = lipschitz_estimate(c, d, 5000, P2, 7).max_ratio;
        EXPECT_GE(r, prev * 0.98) << d;
        prev = r;
    }
}

TEST(Lipschitz, DeterministicAndValidated)
{
    const Vec4 c{0.2, 0.1, -0.4, 0.0};
    EXPECT_EQ(lipschitz_estimate(c, 0.3, 500, P2, 11).max_ratio, lipschitz_estimate(c, 0.3, 500, P2, 11).max_ratio);
    EXPECT_THROW(lipschitz_estimate(c, 0.0, 500, P2, 1), InvalidParams);
    EXPECT_THROW(lipschitz_estimate(c, 0.1, 50, P2, 1), InvalidParams);
}
