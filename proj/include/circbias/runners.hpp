#pragma once

/**
 * @file runners.hpp
 * @brief Runner systems on the unit circle and the maximum of their bias over time.
 *
 * A runner system is a list of starts s_i and speeds v_i; at time t the
 * runners sit at {s_i + v_i t}. For integer speeds the motion is 1-periodic
 * and the maximum bias over time is computed exactly by an event sweep:
 * between two consecutive crossing times the cyclic order is fixed, every
 * candidate-arc deviation is |c - n L(t)| with L affine in t, so the bias is
 * convex on each segment and its maximum sits at a crossing time.
 *
 * Also here: the grid fallback for real speeds, the antipodal-pairs family,
 * quadrature estimates of the second-moment identities behind the lower
 * bounds, and the random-start Monte Carlo experiment.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "circbias/circle.hpp"
#include "circbias/errors.hpp"
#include "circbias/parallel.hpp"
#include "circbias/rational.hpp"
#include "circbias/rng.hpp"

namespace circbias::runners {

template <Scalar T>
struct RunnerSystem {
    std::vector<T> starts;
    std::vector<T> speeds;

    std::size_t size() const noexcept { return starts.size(); }

    /// Number k of distinct speeds.
    std::size_t distinct_speeds() const {
        std::vector<T> v = speeds;
        std::sort(v.begin(), v.end());
        return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
    }

    void validate() const {
        require(starts.size() == speeds.size(), "runner system: starts and speeds differ in length");
        if constexpr (!is_exact_v<T>) {
            for (double s : starts) require(std::isfinite(s), "runner system: non-finite start");
            for (double v : speeds) require(std::isfinite(v), "runner system: non-finite speed");
        }
    }
};

template <Scalar T>
struct TimeWitness {
    T t{0};
    BiasReport<T> report{};
    std::size_t evaluations = 0;
};

struct SweepOptions {
    std::size_t event_cap = 1'000'000;
    unsigned threads = 1;
};

inline RunnerSystem<double> to_double(const RunnerSystem<Rational>& sys) {
    RunnerSystem<double> out;
    for (const auto& s : sys.starts) out.starts.push_back(circbias::to_double(s));
    for (const auto& v : sys.speeds) out.speeds.push_back(circbias::to_double(v));
    return out;
}

template <Scalar T>
PointConfiguration<T> positions_at(const RunnerSystem<T>& sys, const T& t) {
    sys.validate();
    std::vector<T> pos(sys.size());
    for (std::size_t i = 0; i < sys.size(); ++i) pos[i] = sys.starts[i] + sys.speeds[i] * t;
    return PointConfiguration<T>(std::move(pos));
}

namespace detail {

/// Speeds v_i = shift + scale * w_i with integer w_i >= 0 and gcd(w) = 1.
struct NormalizedSpeeds {
    std::vector<Integer> w;
    Integer shift = 0;
    Integer scale = 0;  // zero when all speeds are equal
};

inline NormalizedSpeeds normalize_speeds(const RunnerSystem<Rational>& sys, const char* op) {
    NormalizedSpeeds out;
    if (sys.size() == 0) return out;
    for (const auto& v : sys.speeds) {
        if (!is_integer(v))
            throw InvalidArgument(std::string(op) + ": speed " + to_string(v) +
                                  " is not an integer; use max_bias_grid for real speeds");
    }
    out.shift = boost::multiprecision::numerator(*std::min_element(sys.speeds.begin(), sys.speeds.end()));
    for (const auto& v : sys.speeds) {
        out.w.push_back(boost::multiprecision::numerator(v) - out.shift);
        out.scale = gcd(out.scale, out.w.back());
    }
    if (out.scale != 0)
        for (auto& w : out.w) w /= out.scale;
    return out;
}

/**
 * All t in [0,1) at which two runners of (starts, w) are at circular offset
 * c (mod 1) for some c in `offsets`, sorted and deduplicated, with t = 0 added.
 */
inline std::vector<Rational> crossing_events(const std::vector<Rational>& starts, const std::vector<Integer>& w,
                                             const std::vector<Rational>& offsets, std::size_t cap) {
    const std::size_t n = starts.size();
    Integer total = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) total += boost::multiprecision::abs(w[j] - w[i]);
    total *= static_cast<long>(offsets.size());
    if (total > Integer(cap))
        throw InvalidArgument("event count " + total.str() + " exceeds the cap of " + std::to_string(cap) +
                              "; raise the cap or use max_bias_grid");

    std::vector<Rational> events{Rational(0)};
    events.reserve(static_cast<std::size_t>(total) + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Integer d = w[j] - w[i];
            if (d == 0) continue;
            const Integer span = boost::multiprecision::abs(d);
            const Rational gap = starts[j] - starts[i];
            for (const Rational& c : offsets) {
                // (s_j - s_i) + d t = c (mod 1)  <=>  t = (k + delta) / |d|
                const Rational delta = d > 0 ? Rational(c - gap) : Rational(gap - c);
                const Integer first = ceil_int(Rational(-delta));
                for (Integer k = first; k < first + span; ++k)
                    events.push_back((Rational(k) + delta) / Rational(span));
            }
        }
    }
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());
    return events;
}

template <class Evaluate>
TimeWitness<Rational> sweep(const RunnerSystem<Rational>& sys, const std::vector<Rational>& offsets,
                            const SweepOptions& opts, const char* op, Evaluate&& evaluate) {
    sys.validate();
    require(sys.size() > 0, std::string(op) + ": empty runner system");
    const NormalizedSpeeds ns = normalize_speeds(sys, op);

    TimeWitness<Rational> out;
    if (ns.scale == 0) {
        out.t = 0;
        out.report = evaluate(positions_at(sys, Rational(0)));
        out.evaluations = 1;
        return out;
    }

    std::vector<Rational> starts(sys.starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) starts[i] = frac(sys.starts[i]);
    const std::vector<Rational> events = crossing_events(starts, ns.w, offsets, opts.event_cap);

    auto normalized_at = [&](const Rational& t) {
        std::vector<Rational> pos(starts.size());
        for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = starts[i] + Rational(ns.w[i]) * t;
        return PointConfiguration<Rational>(std::move(pos));
    };
    const std::vector<Rational> values =
        parallel_map(events.size(), opts.threads, [&](std::size_t k) { return evaluate(normalized_at(events[k])).bias; });

    const auto best = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    // The normalized system at t' is the original at t'/scale, rigidly rotated.
    out.t = events[best] / Rational(ns.scale);
    out.report = evaluate(positions_at(sys, out.t));
    out.evaluations = events.size();
    return out;
}

} // namespace detail

/// Exact max over t in [0,1) of the bias; integer speeds and rational starts only.
inline TimeWitness<Rational> max_bias_exact(const RunnerSystem<Rational>& sys, const SweepOptions& opts = {}) {
    return detail::sweep(sys, {Rational(0)}, opts, "max_bias_exact",
                         [](const PointConfiguration<Rational>& cfg) { return exact_bias(cfg); });
}

/**
 * Exact max over t of the fixed-aperture bias. Besides crossings, the count of
 * an aperture-gamma arc changes when two runners are gamma apart, so those
 * times join the event set; between events the value is constant.
 */
inline TimeWitness<Rational> aperture_max_bias_exact(const RunnerSystem<Rational>& sys, const Rational& gamma,
                                                     const SweepOptions& opts = {}) {
    require(gamma >= 0 && gamma <= 1, "aperture_max_bias_exact: gamma must lie in [0,1]");
    std::vector<Rational> offsets{Rational(0), frac(gamma), frac(Rational(-gamma))};
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    return detail::sweep(sys, offsets, opts, "aperture_max_bias_exact",
                         [&](const PointConfiguration<Rational>& cfg) { return aperture_bias(cfg, gamma); });
}

struct GridOptions {
    double t_begin = 0.0;
    double t_end = 1.0;
    std::size_t steps = 10'000;
    std::size_t refine_iters = 40;
    unsigned threads = 1;
};

/**
 * Best bias over a uniform time grid on [t_begin, t_end), followed by a local
 * pattern search around the best grid time. Every reported value is the bias
 * of an actual configuration, so it is a lower bound on the true maximum.
 */
inline TimeWitness<double> max_bias_grid(const RunnerSystem<double>& sys, const GridOptions& opts = {}) {
    sys.validate();
    require(sys.size() > 0, "max_bias_grid: empty runner system");
    require(opts.steps >= 1, "max_bias_grid: steps must be >= 1");
    require(opts.t_end > opts.t_begin, "max_bias_grid: empty time range");

    const double h = (opts.t_end - opts.t_begin) / static_cast<double>(opts.steps);
    auto bias_at = [&](double t) { return exact_bias(positions_at(sys, t)).bias; };
    const std::vector<double> values = parallel_map(opts.steps, opts.threads, [&](std::size_t k) {
        return bias_at(opts.t_begin + h * static_cast<double>(k));
    });

    const auto best_k = static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
    double best_t = opts.t_begin + h * static_cast<double>(best_k);
    double best_v = values[best_k];
    double radius = h;
    for (std::size_t it = 0; it < opts.refine_iters; ++it) {
        radius *= 0.5;
        for (double t : {best_t - radius, best_t + radius}) {
            if (t < opts.t_begin || t >= opts.t_end) continue;
            if (const double v = bias_at(t); v > best_v) {
                best_v = v;
                best_t = t;
            }
        }
    }

    TimeWitness<double> out;
    out.t = best_t;
    out.report = exact_bias(positions_at(sys, best_t));
    out.evaluations = opts.steps + 2 * opts.refine_iters;
    return out;
}

/**
 * 2k runners in k antipodal pairs: pair j sits at j/(2k) and j/(2k) + 1/2 and
 * both members run at speed j + 1. Any half-open half-circle holds exactly
 * one member of each pair.
 */
inline RunnerSystem<Rational> antipodal_pairs(std::size_t k) {
    require(k >= 1, "antipodal_pairs: k must be >= 1");
    RunnerSystem<Rational> sys;
    for (std::size_t j = 0; j < k; ++j) {
        const Rational s(static_cast<long>(j), static_cast<long>(2 * k));
        const Rational v(static_cast<long>(j + 1));
        sys.starts.push_back(s);
        sys.speeds.push_back(v);
        sys.starts.push_back(frac(Rational(s + Rational(1, 2))));
        sys.speeds.push_back(v);
    }
    return sys;
}

struct HalfSectorRange {
    std::size_t closed_min = 0;
    std::size_t closed_max = 0;
    std::size_t half_open_min = 0;
    std::size_t half_open_max = 0;
};

/**
 * Extremes over alpha of the counts in [alpha, alpha + 1/2] and
 * [alpha, alpha + 1/2). Both counts are piecewise constant with breakpoints
 * at u_i and u_i - 1/2, so breakpoints and the midpoints between them suffice.
 */
template <Scalar T>
HalfSectorRange half_sector_range(const PointConfiguration<T>& cfg) {
    const T half = T(1) / T(2);
    std::vector<T> cand;
    for (const T& u : cfg.points()) {
        cand.push_back(u);
        cand.push_back(frac(T(u - half)));
    }
    if (cand.empty()) return {};
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    const std::size_t m = cand.size();
    for (std::size_t i = 0; i < m; ++i) {
        const T next = i + 1 < m ? cand[i + 1] : T(cand[0] + T(1));
        cand.push_back(frac(T((cand[i] + next) / T(2))));
    }

    HalfSectorRange out{cfg.size(), 0, cfg.size(), 0};
    for (const T& alpha : cand) {
        std::size_t closed = 0, half_open = 0;
        for (const T& u : cfg.points()) {
            const T d = frac(T(u - alpha));
            if (d <= half) ++closed;
            if (d < half) ++half_open;
        }
        out.closed_min = std::min(out.closed_min, closed);
        out.closed_max = std::max(out.closed_max, closed);
        out.half_open_min = std::min(out.half_open_min, half_open);
        out.half_open_max = std::max(out.half_open_max, half_open);
    }
    return out;
}

struct AntipodalReport {
    std::size_t k = 0;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::string rng;
    HalfSectorRange range{};
    Rational worst_time{0};  ///< a sampled time attaining range.closed_max
};

/**
 * Half-sector counts of antipodal_pairs(k) at `samples` random dyadic times
 * t = u / 2^20. Aligned times where every pair sits on one diameter have odd
 * denominators (t = 2/5 for k = 5) and are never drawn.
 */
inline AntipodalReport antipodal_check(std::size_t k, std::size_t samples, std::uint64_t seed, unsigned threads = 1) {
    const auto sys = antipodal_pairs(k);
    constexpr std::int64_t den = std::int64_t{1} << 20;
    Rng rng(seed);
    std::vector<Rational> times;
    for (std::size_t s = 0; s < samples; ++s) times.emplace_back(rng.uniform_int(0, den - 1), den);

    const auto ranges = parallel_map(samples, threads, [&](std::size_t s) { return half_sector_range(positions_at(sys, times[s])); });

    AntipodalReport rep;
    rep.k = k;
    rep.samples = samples;
    rep.seed = seed;
    rep.rng = std::string(Rng::name);
    rep.range = {2 * k, 0, 2 * k, 0};
    for (std::size_t s = 0; s < samples; ++s) {
        const auto& r = ranges[s];
        if (r.closed_max > rep.range.closed_max) rep.worst_time = times[s];
        rep.range.closed_min = std::min(rep.range.closed_min, r.closed_min);
        rep.range.closed_max = std::max(rep.range.closed_max, r.closed_max);
        rep.range.half_open_min = std::min(rep.range.half_open_min, r.half_open_min);
        rep.range.half_open_max = std::max(rep.range.half_open_max, r.half_open_max);
    }
    return rep;
}

/// Midpoint-rule estimate of E_{alpha,t}[(N - gamma n)^2] on [0,1]^2 (closed sectors).
inline double second_moment_estimate(const RunnerSystem<double>& sys, double gamma, std::size_t steps) {
    sys.validate();
    require(gamma >= 0.0 && gamma <= 1.0, "second_moment_estimate: gamma must lie in [0,1]");
    require(steps >= 1, "second_moment_estimate: steps must be >= 1");
    const double n = static_cast<double>(sys.size());
    const double h = 1.0 / static_cast<double>(steps);
    double sum = 0.0;
    for (std::size_t b = 0; b < steps; ++b) {
        const auto cfg = positions_at(sys, (static_cast<double>(b) + 0.5) * h);
        for (std::size_t a = 0; a < steps; ++a) {
            const Sector<double> s{(static_cast<double>(a) + 0.5) * h, gamma};
            const double dev = static_cast<double>(sector_count(cfg, s, ArcMode::closed)) - gamma * n;
            sum += dev * dev;
        }
    }
    return sum * h * h;
}

/// Midpoint-rule estimate of E_{alpha,gamma,t}[(N - gamma n)^2] on [0,1]^3.
inline double gamma_averaged_second_moment(const RunnerSystem<double>& sys, std::size_t steps) {
    require(steps >= 1, "gamma_averaged_second_moment: steps must be >= 1");
    const double h = 1.0 / static_cast<double>(steps);
    double sum = 0.0;
    for (std::size_t g = 0; g < steps; ++g) sum += second_moment_estimate(sys, (static_cast<double>(g) + 0.5) * h, steps);
    return sum * h;
}

/// Midpoint-rule estimate of E_{t,alpha}[chi(s1 + v1 t) chi(s2 + v2 t)] for one pair of runners.
inline double pair_moment_estimate(double s1, double v1, double s2, double v2, double gamma, std::size_t steps) {
    require(steps >= 1, "pair_moment_estimate: steps must be >= 1");
    const double h = 1.0 / static_cast<double>(steps);
    std::size_t hits = 0;
    for (std::size_t b = 0; b < steps; ++b) {
        const double t = (static_cast<double>(b) + 0.5) * h;
        const double p1 = frac(s1 + v1 * t), p2 = frac(s2 + v2 * t);
        for (std::size_t a = 0; a < steps; ++a) {
            const double alpha = (static_cast<double>(a) + 0.5) * h;
            if (frac(p1 - alpha) <= gamma && frac(p2 - alpha) <= gamma) ++hits;
        }
    }
    return static_cast<double>(hits) * h * h;
}

struct DeltaIntegral {
    Rational exact;     ///< closed form of the integral of dist(gamma m, Z)^2 over [0,1]
    double quadrature;  ///< midpoint-rule estimate of the same integral
};

/**
 * The map gamma -> dist(gamma m, Z) is 1/m-periodic and symmetric about
 * 1/(2m), where it equals gamma m, so the integral is
 * 2m * m^2 * (1/(2m))^3 / 3.
 */
inline DeltaIntegral delta_integral_check(long m, std::size_t quadrature_steps = 100'000) {
    require(m >= 1, "delta_integral_check: m must be >= 1");
    require(quadrature_steps >= 1, "delta_integral_check: quadrature_steps must be >= 1");
    const Rational half_period(1, 2 * m);
    const Rational exact = Rational(2 * m) * Rational(m * m) * half_period * half_period * half_period / Rational(3);

    const double h = 1.0 / static_cast<double>(quadrature_steps);
    double sum = 0.0;
    for (std::size_t k = 0; k < quadrature_steps; ++k) {
        const double z = (static_cast<double>(k) + 0.5) * h * static_cast<double>(m);
        const double d = std::abs(z - std::round(z));
        sum += d * d;
    }
    return {exact, sum * h};
}

struct ChernoffTrial {
    std::size_t index = 0;
    bool all_pass = true;
    std::size_t violations = 0;
    double max_ratio = 0.0;  ///< max |N_S - |S|n| / sqrt(n |S| log2 n) over |S| > 0
};

struct ChernoffReport {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::string rng;
    std::size_t m = 0;
    double gamma0 = 0.0;
    std::size_t sectors = 0;
    std::size_t times = 0;
    std::vector<ChernoffTrial> per_trial;
    double pass_fraction = 0.0;
    double max_ratio = 0.0;
};

/**
 * Uniform random starts, speeds 1..n. For m = floor(n / (4 log2 n)) and
 * gamma0 = 1/m, checks |N_S - |S| n| <= 4 sqrt(n |S| log2 n) for all m^2
 * grid sectors S(i gamma0, j gamma0) and all times k/(nm), k = 0..nm+1.
 */
inline ChernoffReport chernoff_experiment(std::size_t n, std::size_t trials, std::uint64_t seed, unsigned threads = 1) {
    require(n >= 2, "chernoff_experiment: n must be >= 2");
    const double log_n = std::log2(static_cast<double>(n));
    const auto m = static_cast<std::size_t>(std::floor(static_cast<double>(n) / (4.0 * log_n)));
    require(m >= 1, "chernoff_experiment: n too small, floor(n / (4 log2 n)) must be >= 1");

    ChernoffReport report;
    report.n = n;
    report.trials = trials;
    report.seed = seed;
    report.rng = std::string(Rng::name);
    report.m = m;
    report.gamma0 = 1.0 / static_cast<double>(m);
    report.sectors = m * m;
    report.times = n * m + 2;

    Rng rng(seed);
    std::vector<std::vector<double>> all_starts(trials, std::vector<double>(n));
    for (auto& starts : all_starts)
        for (double& s : starts) s = rng.uniform();

    const double nd = static_cast<double>(n);
    report.per_trial = parallel_map(trials, threads, [&](std::size_t trial) {
        ChernoffTrial result;
        result.index = trial;
        std::vector<double> pos(n);
        for (std::size_t k = 0; k < report.times; ++k) {
            const double t = static_cast<double>(k) / (nd * static_cast<double>(m));
            for (std::size_t i = 0; i < n; ++i) pos[i] = frac(all_starts[trial][i] + static_cast<double>(i + 1) * t);
            std::sort(pos.begin(), pos.end());
            auto count_linear = [&](double lo, double hi) {
                return static_cast<std::size_t>(std::upper_bound(pos.begin(), pos.end(), hi) -
                                                std::lower_bound(pos.begin(), pos.end(), lo));
            };
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    const double alpha = static_cast<double>(i) / static_cast<double>(m);
                    const double gamma = static_cast<double>(j) / static_cast<double>(m);
                    const double end = alpha + gamma;
                    const std::size_t count =
                        end < 1.0 ? count_linear(alpha, end) : count_linear(alpha, 1.0) + count_linear(0.0, end - 1.0);
                    const double dev = std::abs(static_cast<double>(count) - gamma * nd);
                    const double scale = std::sqrt(nd * gamma * log_n);
                    if (dev > 4.0 * scale) {
                        result.all_pass = false;
                        ++result.violations;
                    }
                    if (gamma > 0.0) result.max_ratio = std::max(result.max_ratio, dev / scale);
                }
            }
        }
        return result;
    });

    std::size_t passed = 0;
    for (const auto& t : report.per_trial) {
        passed += t.all_pass ? 1 : 0;
        report.max_ratio = std::max(report.max_ratio, t.max_ratio);
    }
    report.pass_fraction = trials == 0 ? 0.0 : static_cast<double>(passed) / static_cast<double>(trials);
    return report;
}

} // namespace circbias::runners
