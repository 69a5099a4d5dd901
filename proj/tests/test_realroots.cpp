#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "circbias/realroots.hpp"
#include "circbias/rng.hpp"

using namespace circbias;
using namespace circbias::realroots;
using newton::SparseBivariatePoly;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

SparseBivariatePoly iconic(long long k) {
    SparseBivariatePoly f;
    for (long long i = 0; i < k; ++i) f.add(i, i * i, 1.0);
    return f;
}

/// Best V over a fine phi grid, computed without the library.
std::size_t brute_best_variations(const std::vector<double>& alphas, const std::vector<long long>& ns, std::size_t steps) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double phi = two_pi * static_cast<double>(k) / static_cast<double>(steps);
        std::size_t v = 0;
        for (std::size_t i = 0; i + 1 < alphas.size(); ++i)
            if (std::cos(alphas[i] + phi * static_cast<double>(ns[i])) * std::cos(alphas[i + 1] + phi * static_cast<double>(ns[i + 1])) < 0)
                ++v;
        best = std::max(best, v);
    }
    return best;
}

void random_phase_data(Rng& rng, std::size_t k, long long max_n, std::vector<double>& alphas, std::vector<long long>& ns) {
    alphas.clear();
    ns.clear();
    for (std::size_t i = 0; i < k; ++i) {
        alphas.push_back(two_pi * rng.uniform());
        long long n;
        do n = rng.uniform_int(1, max_n);
        while (!ns.empty() && n == ns.back());
        ns.push_back(n);
    }
}

} // namespace

TEST(SignVariations, Examples) {
    EXPECT_EQ(sign_variations({1.0, -1.0, 1.0}), 2u);
    EXPECT_EQ(sign_variations({1.0, 0.0, -1.0}), 0u);
    EXPECT_EQ(sign_variations({5.0, 3.0, -2.0, -7.0, 4.0}), 2u);
    EXPECT_EQ(sign_variations({}), 0u);
    EXPECT_EQ(sign_variations({1.0, -1.0, 1.0}, {true, false}), 1u);
}

TEST(FindPhase, TwoTerms) {
    const auto res = find_phase({0.0, 0.0}, {1, 2}, 64);
    EXPECT_EQ(res.variations, 1u);
    EXPECT_LT(std::cos(res.phi) * std::cos(2 * res.phi), 0.0);
}

TEST(FindPhase, SingleTermHasNothingToFind) {
    const auto res = find_phase({1.0}, {3}, 64);
    EXPECT_EQ(res.variations, 0u);
    EXPECT_EQ(res.bound, 0u);
}

TEST(FindPhase, RejectsCoarseGrid) {
    EXPECT_THROW(find_phase({0.0, 0.0}, {1, 20}, 100), InvalidArgument);
    EXPECT_THROW(find_phase({0.0}, {1, 2}, 64), InvalidArgument);
}

TEST(FindPhase, MeetsBoundOnRandomInstances) {
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> alphas;
        std::vector<long long> ns;
        const std::size_t k = 2 + static_cast<std::size_t>(trial % 30);
        random_phase_data(rng, k, 12, alphas, ns);
        const auto res = find_phase(alphas, ns, 8 * 12);
        EXPECT_EQ(res.bound, (k - 1 + 7) / 8);
        EXPECT_GE(res.variations, res.bound) << "trial " << trial;
        EXPECT_EQ(res.variations, *std::max_element(res.curve.begin(), res.curve.end()));
    }
}

TEST(FindPhase, SeventeenTermsGiveAtLeastTwo) {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> alphas;
        std::vector<long long> ns;
        random_phase_data(rng, 17, 9, alphas, ns);
        EXPECT_GE(find_phase(alphas, ns, 72).variations, 2u);
    }
}

TEST(FindPhase, AgreesWithBruteForceOnSameGrid) {
    Rng rng(56);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> alphas;
        std::vector<long long> ns;
        random_phase_data(rng, 10, 6, alphas, ns);
        const auto res = find_phase(alphas, ns, 512);
        if (res.grid_steps == 512) {
            EXPECT_EQ(res.variations, brute_best_variations(alphas, ns, 512));
        }
        EXPECT_LE(res.variations, brute_best_variations(alphas, ns, 1 << 15));
    }
}

TEST(FindPhase, EqualNeighboursAreSkipped) {
    const auto res = find_phase({0.0, std::numbers::pi, 0.0}, {2, 2, 3}, 64);
    EXPECT_EQ(res.bound, 1u);
    EXPECT_LE(res.variations, 1u);
}

TEST(CosineProducts, NegativeSetHasMeasureAtLeastOneEighth) {
    Rng rng(57);
    const std::size_t samples = 200'000;
    for (int trial = 0; trial < 40; ++trial) {
        const double a1 = two_pi * rng.uniform(), a2 = two_pi * rng.uniform();
        const auto n1 = rng.uniform_int(1, 10);
        auto n2 = rng.uniform_int(1, 10);
        if (n2 == n1) ++n2;
        std::size_t negative = 0;
        double mean = 0.0, square = 0.0;
        for (std::size_t s = 0; s < samples; ++s) {
            const double x = (static_cast<double>(s) + 0.5) / static_cast<double>(samples);
            const double f = std::cos(a1 + two_pi * static_cast<double>(n1) * x) * std::cos(a2 + two_pi * static_cast<double>(n2) * x);
            negative += f < 0 ? 1 : 0;
            mean += f;
            square += f * f;
        }
        EXPECT_GE(static_cast<double>(negative) / static_cast<double>(samples), 1.0 / 8.0 - 0.02);
        EXPECT_NEAR(mean / static_cast<double>(samples), 0.0, 1e-6);
        EXPECT_NEAR(square / static_cast<double>(samples), 0.25, 1e-6);
    }
}

TEST(VertexPhases, ParabolaChain) {
    SparseBivariatePoly f;
    for (long long i = 0; i < 4; ++i) f.add(i, i * i, std::polar(1.0 + static_cast<double>(i), 0.5 * static_cast<double>(i) - 1.0));
    const auto vp = vertex_phases(f, Chain::lower);
    EXPECT_EQ(vp.y_exponents, (std::vector<long long>{0, 1, 4, 9}));
    EXPECT_EQ(vp.x_exponents, (std::vector<long long>{0, 1, 2, 3}));
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(vp.magnitudes[i], 1.0 + static_cast<double>(i), 1e-12);
        EXPECT_NEAR(std::cos(vp.alphas[i]), std::cos(0.5 * static_cast<double>(i) - 1.0), 1e-12);
        EXPECT_GE(vp.alphas[i], 0.0);
        EXPECT_LT(vp.alphas[i], two_pi);
    }
    EXPECT_EQ(vertex_phases(f, Chain::upper).y_exponents, (std::vector<long long>{0, 9}));
}

TEST(Driver, IconicSix) {
    const auto f = iconic(6);
    const auto rep = real_roots_driver(f);
    EXPECT_EQ(rep.chain, Chain::lower);
    EXPECT_EQ(rep.s, 5u);
    EXPECT_EQ(rep.bound, 1u);
    EXPECT_GE(rep.count, rep.bound);
    EXPECT_GE(rep.confirmed, rep.count);
    for (std::size_t k = 0; k + 1 < rep.intervals.size(); ++k) EXPECT_LT(rep.intervals[k].hi, rep.intervals[k + 1].lo);

    // every interval holds a sign change of Re f(x, a)
    const DensePoly section = re_part(newton::substitute_y(f, rep.a));
    for (const auto& w : rep.intervals) EXPECT_LT(sign_of(eval_real(section, w.lo)) * sign_of(eval_real(section, w.hi)), 0);
}

TEST(Driver, RealRunnerPolynomial) {
    runners::RunnerSystem<Rational> sys;
    Rng rng(58);
    for (long v = 1; v <= 8; ++v) {
        sys.starts.push_back(rng.uniform_rational(12));
        sys.speeds.emplace_back(v);
    }
    const auto f = newton::runner_poly_real(sys);
    const auto rep = real_roots_driver(f);
    const auto P = newton::newton_polytope(f);
    EXPECT_EQ(rep.s, std::max(P.count(newton::EdgeKind::lower), P.count(newton::EdgeKind::upper)));
    EXPECT_GE(rep.count, (rep.s - 1 + 7) / 8);
    EXPECT_GE(rep.confirmed, rep.count);
    for (std::size_t k = 0; k + 1 < rep.intervals.size(); ++k) EXPECT_LT(rep.intervals[k].hi, rep.intervals[k + 1].lo);
}

TEST(Driver, UpperChainIsDrivenWithLargeModulus) {
    const auto f = newton::y_invert(iconic(6), 25);
    const auto rep = real_roots_driver(f);
    EXPECT_EQ(rep.chain, Chain::upper);
    EXPECT_EQ(rep.s, 5u);
    EXPECT_GT(std::abs(rep.a), 1.0);
    EXPECT_GE(rep.confirmed, rep.count);
    EXPECT_GE(rep.count, 1u);
}

TEST(Driver, FallbackOnSingleEdge) {
    SparseBivariatePoly f;
    f.add(0, 0, 1.0);
    f.add(1, 0, 3.0);
    f.add(2, 0, 2.0);
    const auto rep = real_roots_driver(f);
    EXPECT_TRUE(rep.fallback);
    EXPECT_EQ(rep.s, 1u);
    EXPECT_EQ(rep.count, 2u);  // 1 + 3x + 2x^2 = (1 + x)(1 + 2x)
}

TEST(Driver, ExhaustedScheduleReportsLastState) {
    DriverOptions opts;
    opts.r_schedule = {0.9};
    try {
        real_roots_driver(iconic(8), opts);
        SUCCEED();  // a lucky bracket at r = 0.9 is allowed
    } catch (const NumericalError& e) {
        EXPECT_NE(e.diagnostics().find("r=0.9"), std::string::npos);
    }
    opts.r_schedule = {2.0};
    EXPECT_THROW(real_roots_driver(iconic(4), opts), InvalidArgument);
}

TEST(Driver, Deterministic) {
    const auto a = real_roots_driver(iconic(7));
    DriverOptions opts;
    opts.threads = 3;
    const auto b = real_roots_driver(iconic(7), opts);
    EXPECT_EQ(a.phi, b.phi);
    EXPECT_EQ(a.r, b.r);
    EXPECT_EQ(a.count, b.count);
}

TEST(FindPhase, RoundedZeroCosineHasNoSign) {
    // cos(pi/2) evaluates to 6e-17, which must not count as a sign
    const auto res = find_phase({std::numbers::pi / 2, 0.0}, {0, 1}, 64);
    EXPECT_EQ(res.variations, 0u);
}
