#include <gtest/gtest.h>

#include <cmath>

#include "circbias/runners.hpp"
#include "oracles.hpp"

using namespace circbias;
using namespace circbias::runners;

namespace {

using Q = Rational;

RunnerSystem<Q> random_system(Rng& rng, std::size_t n, long max_speed, std::int64_t max_den) {
    RunnerSystem<Q> sys;
    for (std::size_t i = 0; i < n; ++i) {
        sys.starts.push_back(rng.uniform_rational(max_den));
        sys.speeds.emplace_back(rng.uniform_int(1, max_speed));
    }
    return sys;
}

RunnerSystem<Q> distinct_speed_system(Rng& rng, std::size_t n, std::int64_t max_den) {
    RunnerSystem<Q> sys;
    for (std::size_t i = 0; i < n; ++i) {
        sys.starts.push_back(rng.uniform_rational(max_den));
        sys.speeds.emplace_back(static_cast<long>(i + 1));
    }
    return sys;
}

/// Largest bias seen at the rational times i/steps, computed by pair enumeration.
Q grid_max_by_oracle(const RunnerSystem<Q>& sys, long steps) {
    Q best(0);
    for (long i = 0; i < steps; ++i) {
        const Q t(i, steps);
        std::vector<Q> pos;
        for (std::size_t r = 0; r < sys.size(); ++r) pos.push_back(sys.starts[r] + sys.speeds[r] * t);
        best = std::max(best, oracle::pair_bias(pos));
    }
    return best;
}

} // namespace

TEST(PositionsAt, Examples) {
    const RunnerSystem<double> a{{0.0, 0.5}, {1.0, 1.0}};
    const auto pa = positions_at(a, 0.25);
    EXPECT_DOUBLE_EQ(pa.points()[0], 0.25);
    EXPECT_DOUBLE_EQ(pa.points()[1], 0.75);

    const RunnerSystem<Q> b{{Q(0), Q(0)}, {Q(1), Q(2)}};
    const auto pb = positions_at(b, Q(1, 3));
    EXPECT_EQ(pb.points()[0], Q(1, 3));
    EXPECT_EQ(pb.points()[1], Q(2, 3));

    const RunnerSystem<Q> c{{Q(7, 4), Q(-1, 3)}, {Q(5), Q(2)}};
    const auto pc = positions_at(c, Q(0));
    EXPECT_EQ(pc.points()[0], Q(3, 4));
    EXPECT_EQ(pc.points()[1], Q(2, 3));
}

TEST(RunnerSystem, MismatchedLengthsRejected) {
    const RunnerSystem<Q> bad{{Q(0), Q(1, 2)}, {Q(1)}};
    EXPECT_THROW(positions_at(bad, Q(0)), InvalidArgument);
}

TEST(MaxBiasExact, SingleRunner) {
    const auto w = max_bias_exact(RunnerSystem<Q>{{Q(0)}, {Q(1)}});
    EXPECT_EQ(w.report.bias, Q(1));
}

TEST(MaxBiasExact, RejectsNonIntegerSpeed) {
    const RunnerSystem<Q> sys{{Q(0), Q(0)}, {Q(1), Q(3, 2)}};
    EXPECT_THROW(max_bias_exact(sys), InvalidArgument);
}

TEST(MaxBiasExact, EventCapEnforced) {
    Rng rng(4);
    SweepOptions opts;
    opts.event_cap = 3;
    EXPECT_THROW(max_bias_exact(distinct_speed_system(rng, 6, 30), opts), InvalidArgument);
}

TEST(MaxBiasExact, WitnessTimeReproducesValue) {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const auto sys = random_system(rng, 2 + trial % 6, 9, 12);
        const auto w = max_bias_exact(sys);
        EXPECT_EQ(exact_bias(positions_at(sys, w.t)).bias, w.report.bias);
        EXPECT_GE(w.t, Q(0));
        EXPECT_LT(w.t, Q(1));
    }
}

TEST(MaxBiasExact, FourDistinctSpeeds) {
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const auto w = max_bias_exact(distinct_speed_system(rng, 4, 20));
        EXPECT_GE(w.report.bias, Q(1));
    }
}

TEST(MaxBiasExact, DuplicatedSpeedsBeatGridOracle) {
    Rng rng(6);
    RunnerSystem<Q> sys;
    for (long v : {1, 1, 2, 2, 3, 3}) {
        sys.starts.push_back(rng.uniform_rational(30));
        sys.speeds.emplace_back(v);
    }
    const Q exact = max_bias_exact(sys).report.bias;
    EXPECT_GE(exact * exact * Q(12), Q(3));
    EXPECT_GE(exact, grid_max_by_oracle(sys, 3000));
}

TEST(MaxBiasExact, NeverBeatenByTimeGrid) {
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        const auto sys = random_system(rng, 2 + trial % 5, 7, 10);
        EXPECT_GE(max_bias_exact(sys).report.bias, grid_max_by_oracle(sys, 500)) << "trial " << trial;
    }
}

TEST(MaxBiasExact, ReachedByFineRationalGridWhenEventsAreOnIt) {
    // every crossing time has denominator dividing 144 and the maximum sits on an event
    const RunnerSystem<Q> sys{{Q(0), Q(1, 3), Q(1, 2), Q(3, 4)}, {Q(1), Q(2), Q(4), Q(5)}};
    const Q exact = max_bias_exact(sys).report.bias;
    EXPECT_EQ(exact, grid_max_by_oracle(sys, 144));
}

TEST(MaxBiasExact, SqrtKOverTwelveLowerBound) {
    Rng rng(1234);
    for (int trial = 0; trial < 25; ++trial) {
        const auto sys = random_system(rng, 1 + trial % 8, 12, 16);
        const Q b = max_bias_exact(sys).report.bias;
        EXPECT_GE(b * b * Q(12), Q(static_cast<long>(sys.distinct_speeds()))) << "trial " << trial;
    }
}

TEST(MaxBiasExact, DistinctSpeedLowerBounds) {
    Rng rng(31);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 1 + trial % 6;
        const auto sys = distinct_speed_system(rng, n, 16);
        const Q nn(static_cast<long>(n));
        const Q b = max_bias_exact(sys).report.bias;
        EXPECT_GE(Q(4) * b * b, nn);
        for (const Q& gamma : {Q(1, 4), Q(1, 2)}) {
            const Q g = aperture_max_bias_exact(sys, gamma).report.bias;
            EXPECT_GE(g * g, (gamma - gamma * gamma) * nn);
            EXPECT_LE(g, b);
        }
    }
}

TEST(MaxBiasExact, TimeShiftInvariance) {
    Rng rng(2);
    for (int trial = 0; trial < 15; ++trial) {
        const auto sys = random_system(rng, 2 + trial % 5, 8, 9);
        const Q c = rng.uniform_rational(17) + Q(trial);
        RunnerSystem<Q> shifted = sys;
        for (std::size_t i = 0; i < sys.size(); ++i) shifted.starts[i] += sys.speeds[i] * c;
        EXPECT_EQ(max_bias_exact(shifted).report.bias, max_bias_exact(sys).report.bias);
    }
}

TEST(MaxBiasExact, CommonSpeedShiftInvariance) {
    Rng rng(21);
    for (int trial = 0; trial < 15; ++trial) {
        const auto sys = random_system(rng, 2 + trial % 5, 8, 9);
        RunnerSystem<Q> shifted = sys;
        const Q shift(rng.uniform_int(1, 50));
        for (auto& v : shifted.speeds) v += shift;
        EXPECT_EQ(max_bias_exact(shifted).report.bias, max_bias_exact(sys).report.bias);
    }
}

TEST(MaxBiasExact, ThreadCountDoesNotChangeResult) {
    Rng rng(5);
    const auto sys = random_system(rng, 7, 11, 13);
    SweepOptions one, four;
    four.threads = 4;
    const auto a = max_bias_exact(sys, one), b = max_bias_exact(sys, four);
    EXPECT_EQ(a.report.bias, b.report.bias);
    EXPECT_EQ(a.t, b.t);
}

TEST(ApertureMaxBiasExact, TwoRunnersAgainstGrid) {
    const RunnerSystem<Q> sys{{Q(0), Q(1, 2)}, {Q(1), Q(2)}};
    const Q gamma(1, 4);
    const Q exact = aperture_max_bias_exact(sys, gamma).report.bias;
    // events have denominators dividing 4, so a grid of step 1/8 visits every piece and every event
    Q best(0);
    for (long i = 0; i < 800; ++i) {
        const auto cfg = positions_at(sys, Q(i, 800));
        for (long a = 0; a < 800; ++a) {
            const auto s = make_sector(Q(a, 800), gamma);
            best = std::max(best, Q(static_cast<long>(sector_count(cfg, s, ArcMode::closed))) - Q(2) * gamma);
            best = std::max(best, Q(2) * gamma - Q(static_cast<long>(sector_count(cfg, s, ArcMode::open))));
        }
    }
    EXPECT_EQ(exact, best);
}

TEST(ApertureMaxBiasExact, FourDistinctSpeedsHalfAperture) {
    Rng rng(19);
    for (int trial = 0; trial < 5; ++trial)
        EXPECT_GE(aperture_max_bias_exact(distinct_speed_system(rng, 4, 20), Q(1, 2)).report.bias, Q(1));
}

TEST(MaxBiasGrid, EqualSpeedsIsConstant) {
    const RunnerSystem<double> sys{{0.0, 0.1, 0.15, 0.7}, {3.0, 3.0, 3.0, 3.0}};
    GridOptions opts;
    opts.steps = 200;
    const auto w = max_bias_grid(sys, opts);
    EXPECT_NEAR(w.report.bias, exact_bias(positions_at(sys, 0.0)).bias, 1e-12);
}

TEST(MaxBiasGrid, BoundedByExact) {
    Rng rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        const auto sys = random_system(rng, 2 + trial % 5, 6, 10);
        GridOptions opts;
        opts.steps = 1000;
        EXPECT_LE(max_bias_grid(to_double(sys), opts).report.bias, to_double(max_bias_exact(sys).report.bias) + 1e-9);
    }
}

TEST(MaxBiasGrid, IrrationalSpeedsNearlyMeet) {
    const RunnerSystem<double> sys{{0.0, 0.0}, {1.0, std::sqrt(2.0)}};
    GridOptions opts;
    opts.steps = 10'000;
    EXPECT_GE(max_bias_grid(sys, opts).report.bias, 1.9);
}

TEST(MaxBiasGrid, WitnessIsReal) {
    const RunnerSystem<double> sys{{0.1, 0.4, 0.8}, {1.0, std::sqrt(3.0), 2.5}};
    const auto w = max_bias_grid(sys);
    EXPECT_DOUBLE_EQ(w.report.bias, exact_bias(positions_at(sys, w.t)).bias);
}

TEST(AntipodalPairs, Construction) {
    const auto one = antipodal_pairs(1);
    ASSERT_EQ(one.size(), 2u);
    EXPECT_EQ(one.starts[0], Q(0));
    EXPECT_EQ(one.starts[1], Q(1, 2));
    EXPECT_EQ(one.speeds[0], one.speeds[1]);

    const auto two = antipodal_pairs(2);
    EXPECT_EQ(two.size(), 4u);
    EXPECT_EQ(two.distinct_speeds(), 2u);
    EXPECT_THROW(antipodal_pairs(0), InvalidArgument);
}

TEST(AntipodalPairs, HalfOpenHalfCircleHoldsOneOfEachPair) {
    for (std::size_t k = 1; k <= 6; ++k) {
        const auto rep = antipodal_check(k, 200, 100 + k);
        EXPECT_EQ(rep.range.half_open_min, k);
        EXPECT_EQ(rep.range.half_open_max, k);
        EXPECT_GE(rep.range.closed_min, k);
        EXPECT_LE(rep.range.closed_max, k + 4);
    }
}

TEST(AntipodalPairs, AlignedTimeDoublesTheClosedCount) {
    // at t = 2/5 every runner of antipodal_pairs(5) lies on the diameter {1/10, 3/5}
    const auto cfg = positions_at(antipodal_pairs(5), Q(2, 5));
    const auto r = half_sector_range(cfg);
    EXPECT_EQ(r.closed_max, 10u);
    EXPECT_EQ(r.half_open_min, 5u);
    EXPECT_EQ(r.half_open_max, 5u);
}

TEST(AntipodalPairs, ApertureHalfStaysWithinFourOfK) {
    for (std::size_t k = 1; k <= 3; ++k) {
        const Q g = aperture_max_bias_exact(antipodal_pairs(k), Q(1, 2)).report.bias;
        EXPECT_GE(g, Q(0));
        EXPECT_LE(g, Q(static_cast<long>(k)));
    }
}

TEST(HalfSectorRange, MatchesDenseScan) {
    Rng rng(44);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Q> pts;
        for (int i = 0; i < 1 + trial % 7; ++i) pts.push_back(rng.uniform_rational(8));
        const PointConfiguration<Q> cfg(pts);
        // denominators divide 840, so alpha = a/1680 hits every breakpoint and every gap
        std::size_t cmin = 99, cmax = 0, hmin = 99, hmax = 0;
        for (long a = 0; a < 1680; ++a) {
            const Q alpha(a, 1680);
            std::size_t c = 0, h = 0;
            for (const auto& u : cfg.points()) {
                const Q d = frac(Q(u - alpha));
                c += d <= Q(1, 2) ? 1 : 0;
                h += d < Q(1, 2) ? 1 : 0;
            }
            cmin = std::min(cmin, c), cmax = std::max(cmax, c), hmin = std::min(hmin, h), hmax = std::max(hmax, h);
        }
        const auto r = half_sector_range(cfg);
        EXPECT_EQ(r.closed_min, cmin);
        EXPECT_EQ(r.closed_max, cmax);
        EXPECT_EQ(r.half_open_min, hmin);
        EXPECT_EQ(r.half_open_max, hmax);
    }
}

TEST(SecondMoment, SingleRunner) {
    const RunnerSystem<double> sys{{0.3}, {1.0}};
    EXPECT_NEAR(second_moment_estimate(sys, 0.5, 200), 0.25, 1e-3);
}

TEST(SecondMoment, DistinctSpeedsMatchVarianceIdentity) {
    const RunnerSystem<double> sys{{0.11, 0.52, 0.93, 0.27, 0.68}, {1, 2, 3, 4, 5}};
    EXPECT_NEAR(second_moment_estimate(sys, 0.3, 400), 1.05, 0.02);
}

TEST(SecondMoment, GammaAveragedAtLeastKOverTwelve) {
    const RunnerSystem<double> sys{{0.1, 0.35, 0.6, 0.85}, {1, 1, 2, 2}};
    EXPECT_GE(gamma_averaged_second_moment(sys, 60), 2.0 / 12.0);
}

TEST(PairMoment, DistinctSpeedsGiveGammaSquared) {
    for (const auto& [v1, v2, gamma] : {std::tuple{1.0, 2.0, 0.3}, {2.0, 5.0, 0.5}, {3.0, 1.0, 0.7}})
        EXPECT_NEAR(pair_moment_estimate(0.13, v1, 0.71, v2, gamma, 600), gamma * gamma, 1e-2);
}

TEST(DeltaIntegral, ExactlyOneTwelfth) {
    for (long m = 1; m <= 10; ++m) {
        const auto d = delta_integral_check(m);
        EXPECT_EQ(d.exact, Q(1, 12));
        EXPECT_NEAR(d.quadrature, 1.0 / 12.0, 1e-6);
    }
    EXPECT_THROW(delta_integral_check(0), InvalidArgument);
}

TEST(Chernoff, SmokeAtSixteen) {
    const auto rep = chernoff_experiment(16, 1, 42);
    EXPECT_EQ(rep.n, 16u);
    EXPECT_EQ(rep.m, 1u);
    EXPECT_EQ(rep.sectors, 1u);
    EXPECT_EQ(rep.times, 18u);
    ASSERT_EQ(rep.per_trial.size(), 1u);
    EXPECT_GE(rep.pass_fraction, 0.0);
    EXPECT_LE(rep.pass_fraction, 1.0);
    EXPECT_EQ(rep.rng, "mt19937_64");
}

TEST(Chernoff, SeedDeterminesReport) {
    const auto a = chernoff_experiment(32, 3, 9, 1), b = chernoff_experiment(32, 3, 9, 3);
    EXPECT_EQ(a.max_ratio, b.max_ratio);
    EXPECT_EQ(a.pass_fraction, b.pass_fraction);
    EXPECT_THROW(chernoff_experiment(2, 1, 0), InvalidArgument);
}
