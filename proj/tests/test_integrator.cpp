#include <cmath>

#include <gtest/gtest.h>

#include "mixnls/integrator.hpp"
#include "oracles/rk4.hpp"

using namespace mixnls;

namespace {

const Params P2{2.0, 2.0};

IntegratorOptions opts(double x_max, bool stop = true)
{
    IntegratorOptions o;
    o.x_max = x_max;
    o.stop_on_limit = stop;
    return o;
}

} // namespace

TEST(Integrate, EquilibriumAtVertexB)
{
    const Trajectory tr = integrate(1.0, 1.0, P2, opts(200.0));
    EXPECT_LE(tr.energy_drift, 1e-13);
    EXPECT_EQ(tr.verdict.kind, LimitVerdict::Kind::ConvergedTo);
    EXPECT_EQ(tr.verdict.vertex, Vertex::B);
    EXPECT_EQ(tr.termination, Termination::LimitDetected);
    EXPECT_TRUE(tr.events.empty());
    for (const auto& s : tr.samples) {
        EXPECT_EQ(s.u, 1.0);
        EXPECT_EQ(s.v, 1.0);
    }
}

TEST(Integrate, SamplesStartAtDataAndIncrease)
{
    const Trajectory tr = integrate(0.3, -1.1, Params{1.5, 2.0}, opts(20.0, false));
    ASSERT_FALSE(tr.samples.empty());
    const State& s0 = tr.samples.front();
    EXPECT_EQ(s0.x, 0.0);
    EXPECT_EQ(s0.u, 0.3);
    EXPECT_EQ(s0.v, -1.1);
    EXPECT_EQ(s0.du, 0.0);
    EXPECT_EQ(s0.dv, 0.0);
    for (std::size_t k = 1; k < tr.samples.size(); ++k) EXPECT_GT(tr.samples[k].x, tr.samples[k - 1].x);
    EXPECT_EQ(tr.samples.back().x, 20.0);
    EXPECT_EQ(tr.termination, Termination::ReachedEnd);
}

TEST(Integrate, SecondDerivativeFromFiniteDifference)
{
    const Trajectory tr = integrate(1.41, 0.05, P2, opts(50.0));
    for (double h : {1e-2, 5e-3}) {
        const State s = tr.at(h);
        const double upp = 2.0 * (s.u - 1.41) / (h * h);
        EXPECT_NEAR(upp, 0.828375, 2.0 * h * h) << h;
        const double vpp = 2.0 * (s.v - 0.05) / (h * h);
        EXPECT_NEAR(vpp, -0.001905, 2.0 * h * h) << h;
    }
}

TEST(Integrate, MatchesRk4Oracle)
{
    struct Case {
        double a, b;
        Params prm;
    };
    const Case cases[] = {{0.5, 0.5, P2},
                          {1.41, 0.05, P2},
                          {-1.2, 0.7, Params{1.5, 2.0}},
                          {0.3, -1.6, Params{2.5, 1.0}},
                          {1.1, 0.4, Params{2.0, 2.0, 0.7, 1.5, 1.5}}};
    for (const auto& c : cases) {
        const double h = 1e-4;
        const auto ref = oracle::rk4(c.a, c.b, {c.prm.p, c.prm.omega, c.prm.lambda, c.prm.sigma1, c.prm.sigma2}, h, 10.0);
        const Trajectory tr = integrate(c.a, c.b, c.prm, opts(10.0, false));
        double worst = 0.0;
        for (std::size_t k = 0; k < ref.size(); k += 500) {
            const Vec4 X = tr.at(double(k) * h).phase();
            for (std::size_t i = 0; i < 4; ++i) worst = std::max(worst, std::abs(X[i] - ref[k][i]));
        }
        EXPECT_LE(worst, 1e-6) << c.a << ' ' << c.b;
    }
}

TEST(Integrate, EnergyDriftSmall)
{
    const Trajectory tr = integrate(-1.3, 0.9, Params{2.0, 1.0}, opts(50.0, false));
    EXPECT_LE(tr.energy_drift, 1e-8);
    EXPECT_GT(tr.energy_drift, 0.0);
}

TEST(Integrate, ShortRunMatchesDenseOutputOfLongRun)
{
    const Trajectory tr = integrate(0.8, 0.2, P2, opts(10.0, false));
    const State s = tr.at(3.0);
    const Trajectory back = integrate(0.8, 0.2, P2, opts(3.0, false));
    EXPECT_NEAR(back.samples.back().u, s.u, 1e-9);
}

TEST(Integrate, RejectsBadInput)
{
    EXPECT_THROW(integrate(0.1, 0.1, P2, 0.0, 1e-8, 1e-8), InvalidParams);
    EXPECT_THROW(integrate(0.1, 0.1, P2, 1.0, 0.0, 1e-8), InvalidParams);
    EXPECT_THROW(integrate(0.1, 0.1, P2, 1.0, 1e-8, 0.1), InvalidParams);
    EXPECT_THROW(integrate(NAN, 0.1, P2, 1.0, 1e-8, 1e-8), InvalidParams);
    EXPECT_THROW(integrate(0.1, 0.1, Params{3.0, 2.0}, 1.0, 1e-8, 1e-8), InvalidParams);
}

TEST(Integrate, BlowUpIsRecordedNotThrown)
{
    IntegratorOptions o = opts(10.0);
    o.blowup_norm = 2.0;
    const Trajectory tr = integrate(1.9, 1.9, P2, o);
    EXPECT_EQ(tr.termination, Termination::BlowUp);
    EXPECT_EQ(tr.verdict.kind, LimitVerdict::Kind::Unbounded);
}

TEST(Integrate, StepLimitIsRecorded)
{
    IntegratorOptions o = opts(100.0);
    o.max_steps = 5;
    const Trajectory tr = integrate(0.5, 0.2, P2, o);
    EXPECT_EQ(tr.termination, Termination::StepLimit);
    EXPECT_LT(tr.x_end(), 100.0);
}

TEST(Integrate, DenseOutputOutOfRangeThrows)
{
    const Trajectory tr = integrate(0.5, 0.5, P2, opts(5.0, false));
    EXPECT_THROW((void)tr.at(5.5), InterpolationOutOfRange);
    EXPECT_THROW((void)tr.at(-0.1), InterpolationOutOfRange);
    EXPECT_NO_THROW((void)tr.at(5.0));
}

TEST(Events, EquilibriumHasNone)
{
    EXPECT_TRUE(event_crossings(integrate(1.0, -1.0, P2, opts(30.0))).empty());
}

TEST(Events, FirstCrossingFromExterior)
{
    const Trajectory tr = integrate(1.5, 1.5, P2, opts(20.0, false));
    ASSERT_FALSE(tr.events.empty());
    const Event& e = tr.events.front();
    EXPECT_EQ(e.curve, CurveId::Gamma);
    const State s = tr.at(e.x);
    EXPECT_LE(std::abs(g_omega(s.u, s.v, P2)), 1e-8);
    // u == v along this run, so both curves are crossed together
    ASSERT_GE(tr.events.size(), 2u);
    EXPECT_EQ(tr.events[1].curve, CurveId::GammaStar);
    EXPECT_NEAR(tr.events[1].x, e.x, 1e-10);
    for (std::size_t k = 1; k < tr.events.size(); ++k) EXPECT_GE(tr.events[k].x, tr.events[k - 1].x);
}

TEST(Events, AllLocalizedOnTheirCurve)
{
    const Params prm{1.5, 2.0};
    const Trajectory tr = integrate(1.7, -0.4, prm, opts(30.0, false));
    EXPECT_FALSE(tr.events.empty());
    for (const auto& e : tr.events) {
        const State s = tr.at(e.x);
        const double g = e.curve == CurveId::Gamma ? g_omega(s.u, s.v, prm) : g_omega(s.v, s.u, prm);
        EXPECT_LE(std::abs(g), 1e-8);
    }
}

TEST(Events, OneShortStepHasNone)
{
    const Trajectory tr = integrate(0.5, 0.5, P2, opts(1e-3, false));
    EXPECT_LE(tr.segments.size(), 2u);
    EXPECT_TRUE(tr.events.empty());
}

TEST(DetectLimit, ArtificialSineOscillates)
{
    Trajectory tr;
    tr.params = P2;
    for (int k = 0; k <= 4000; ++k) {
        const double x = 0.01 * k;
        tr.samples.push_back({x, std::sin(x), 0.3, std::cos(x), 0.0});
    }
    const LimitVerdict v = detect_limit(tr, vertices(P2));
    EXPECT_EQ(v.kind, LimitVerdict::Kind::BoundedOscillation);
    EXPECT_GE(v.du_sign_changes, 2);
    EXPECT_NEAR(v.u_max, 1.0, 1e-3);
}

TEST(DetectLimit, ConstantAwayFromVerticesIsUndecided)
{
    Trajectory tr;
    tr.params = P2;
    for (int k = 0; k <= 100; ++k) tr.samples.push_back({0.5 * k, 0.2, 0.3, 0.0, 0.0});
    EXPECT_EQ(detect_limit(tr, vertices(P2)).kind, LimitVerdict::Kind::Undecided);
    EXPECT_THROW(detect_limit(Trajectory{}, vertices(P2)), InvalidParams);
}

TEST(DetectLimit, ConvergedRequiresWholeWindow)
{
    Trajectory tr;
    tr.params = P2;
    for (int k = 0; k <= 100; ++k) tr.samples.push_back({0.5 * k, -1.0, 1.0, 0.0, 0.0});
    LimitVerdict v = detect_limit(tr, vertices(P2));
    EXPECT_EQ(v.kind, LimitVerdict::Kind::ConvergedTo);
    EXPECT_EQ(v.vertex, Vertex::H);
    tr.samples[95].u = -1.001;
    EXPECT_NE(detect_limit(tr, vertices(P2)).kind, LimitVerdict::Kind::ConvergedTo);
}

TEST(Integrate, AccurateThroughAxisCrossings)
{
    // p = 1.5: the field is only C^1 where u or v vanishes; crossings must not spoil accuracy.
    const Params prm{1.5, 2.0};
    const double h = 1e-4;
    const auto ref = oracle::rk4(1.8, -0.1, {1.5, 2.0, 1.0, 1.0, 1.0}, h, 10.0);
    const Trajectory tr = integrate(1.8, -0.1, prm, opts(10.0, false));
    EXPECT_NEAR(tr.at(10.0).u, ref.back()[0], 1e-7);
    EXPECT_NEAR(tr.at(10.0).v, ref.back()[2], 1e-7);
}
