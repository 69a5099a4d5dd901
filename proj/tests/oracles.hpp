#pragma once

/**
 * @file oracles.hpp
 * @brief Slow, independent reference computations used by the tests.
 *
 * Nothing here calls the library's bias, hull or root code.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "circbias/rational.hpp"

namespace oracle {

using circbias::Rational;

template <class T>
T frac(const T& x) {
    if constexpr (std::is_same_v<T, double>) {
        return x - std::floor(x);
    } else {
        return circbias::frac(x);
    }
}

/**
 * Bias by enumerating every ordered pair of points as arc endpoints, with
 * counts taken by a direct scan: O(n^3).
 *   excess     = N([u_i, u_j]) - n len      (len = 0 when i == j)
 *   deficiency = n len - N((u_i, u_j))      (len = 1 when u_i == u_j)
 */
template <class T>
T pair_bias(const std::vector<T>& raw) {
    std::vector<T> u;
    for (const auto& x : raw) u.push_back(frac(x));
    const T n(static_cast<long>(u.size()));
    T best(0);
    for (const T& a : u) {
        for (const T& b : u) {
            const bool same = a == b;
            const T len = frac(T(b - a));
            std::size_t closed = 0, open = 0;
            for (const T& p : u) {
                const T d = frac(T(p - a));
                if (d <= len) ++closed;
                if (same ? d > 0 : (d > 0 && d < len)) ++open;
            }
            const T excess = T(static_cast<long>(closed)) - n * len;
            const T deficiency = n * (same ? T(1) : len) - T(static_cast<long>(open));
            best = std::max({best, excess, deficiency});
        }
    }
    return best;
}

/**
 * max |N_closed - gamma n| over sectors with alpha = a/G, gamma = g/G.
 * For fixed alpha the closed count is a step function of gamma, so each
 * step contributes its first and last grid gamma.
 */
inline double grid_bias(const std::vector<double>& pts, std::size_t G) {
    const double n = static_cast<double>(pts.size());
    const double Gd = static_cast<double>(G);
    double best = 0.0;
    std::vector<double> d(pts.size());
    for (std::size_t a = 0; a < G; ++a) {
        const double alpha = static_cast<double>(a) / Gd;
        for (std::size_t i = 0; i < pts.size(); ++i) d[i] = frac(pts[i] - alpha);
        std::sort(d.begin(), d.end());
        // piece k: exactly k of the d's are <= gamma, for gamma in [d_(k), d_(k+1))
        for (std::size_t k = 0; k <= pts.size(); ++k) {
            const double lo = k == 0 ? 0.0 : d[k - 1];
            const double hi = k == pts.size() ? 2.0 : d[k];
            if (k > 0 && k < pts.size() && d[k] == d[k - 1]) continue;
            const double gmin = std::ceil(lo * Gd);
            double gmax = std::ceil(hi * Gd) - 1.0;
            gmax = std::min(gmax, Gd);
            if (gmin > gmax) continue;
            const double kk = static_cast<double>(k);
            best = std::max({best, std::abs(kk - gmin / Gd * n), std::abs(kk - gmax / Gd * n)});
        }
    }
    return best;
}

/// Same as grid_bias for points on the grid (integers mod G), in exact integer arithmetic scaled by G.
inline long long grid_bias_scaled(const std::vector<long long>& pts, long long G) {
    const long long n = static_cast<long long>(pts.size());
    long long best = 0;
    std::vector<long long> d(pts.size());
    for (long long a = 0; a < G; ++a) {
        for (std::size_t i = 0; i < pts.size(); ++i) d[i] = ((pts[i] - a) % G + G) % G;
        std::sort(d.begin(), d.end());
        for (std::size_t k = 0; k <= pts.size(); ++k) {
            const long long lo = k == 0 ? 0 : d[k - 1];
            const long long hi = k == pts.size() ? G : d[k] - 1;
            if (lo > hi) continue;
            const long long kk = static_cast<long long>(k) * G;
            best = std::max({best, std::llabs(kk - lo * n), std::llabs(kk - hi * n)});
        }
    }
    return best;
}

/// The p = 2, r <= 3 sequences written out by hand (coefficients of Q_0 and Q_1).
inline std::vector<std::vector<std::vector<int>>> shapiro_p2_table() {
    return {
        {{1}, {1}},
        {{1, 1}, {1, -1}},
        {{1, 1, 1, -1}, {1, 1, -1, 1}},
        {{1, 1, 1, -1, 1, 1, -1, 1}, {1, 1, 1, -1, -1, -1, 1, -1}},
    };
}

/// Float recursion with an explicit DFT matrix product.
inline std::vector<std::vector<std::complex<double>>> shapiro_float(long p, int r) {
    using C = std::complex<double>;
    std::vector<std::vector<C>> q(static_cast<std::size_t>(p), std::vector<C>{1.0});
    std::size_t block = 1;
    for (int level = 0; level < r; ++level) {
        std::vector<std::vector<C>> next(static_cast<std::size_t>(p), std::vector<C>(block * static_cast<std::size_t>(p)));
        for (long j = 0; j < p; ++j)
            for (long k = 0; k < p; ++k) {
                const C w = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(p));
                for (std::size_t l = 0; l < block; ++l)
                    next[static_cast<std::size_t>(j)][static_cast<std::size_t>(k) * block + l] += w * q[static_cast<std::size_t>(k)][l];
            }
        q = std::move(next);
        block *= static_cast<std::size_t>(p);
    }
    return q;
}

/// Points of the support that are vertices: not inside any closed triangle or segment of other points.
template <class P>
std::vector<P> extreme_points(const std::vector<P>& pts) {
    auto cross = [](const P& o, const P& a, const P& b) {
        return static_cast<long double>(a.i - o.i) * static_cast<long double>(b.j - o.j) -
               static_cast<long double>(a.j - o.j) * static_cast<long double>(b.i - o.i);
    };
    auto in_triangle = [&](const P& p, const P& a, const P& b, const P& c) {
        const auto d1 = cross(a, b, p), d2 = cross(b, c, p), d3 = cross(c, a, p);
        const bool neg = d1 < 0 || d2 < 0 || d3 < 0, pos = d1 > 0 || d2 > 0 || d3 > 0;
        if (neg && pos) return false;
        // degenerate triangle: require p within the bounding box as well
        const auto lo_i = std::min({a.i, b.i, c.i}), hi_i = std::max({a.i, b.i, c.i});
        const auto lo_j = std::min({a.j, b.j, c.j}), hi_j = std::max({a.j, b.j, c.j});
        return p.i >= lo_i && p.i <= hi_i && p.j >= lo_j && p.j <= hi_j;
    };
    std::vector<P> out;
    for (std::size_t x = 0; x < pts.size(); ++x) {
        bool inside = false;
        for (std::size_t a = 0; a < pts.size() && !inside; ++a)
            for (std::size_t b = a; b < pts.size() && !inside; ++b)
                for (std::size_t c = b; c < pts.size() && !inside; ++c) {
                    if (a == x || b == x || c == x) continue;
                    inside = in_triangle(pts[x], pts[a], pts[b], pts[c]);
                }
        if (!inside) out.push_back(pts[x]);
    }
    return out;
}

/// Lower edges between extreme points: a.i < b.i and every support point on or above the line ab.
template <class P>
std::size_t lower_edge_count(const std::vector<P>& pts) {
    const auto ext = extreme_points(pts);
    std::size_t count = 0;
    for (const auto& a : ext)
        for (const auto& b : ext) {
            if (!(a.i < b.i)) continue;
            bool ok = true;
            for (const auto& p : pts) {
                const long double c = static_cast<long double>(b.i - a.i) * static_cast<long double>(p.j - a.j) -
                                      static_cast<long double>(b.j - a.j) * static_cast<long double>(p.i - a.i);
                if (c < 0) ok = false;
            }
            if (ok) ++count;
        }
    return count;
}

} // namespace oracle
