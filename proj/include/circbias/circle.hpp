#pragma once

/**
 * @file circle.hpp
 * @brief Point configurations on the unit circle, sector counts and bias.
 *
 * The circle is [0,1) with wraparound. A sector S(alpha, gamma) is the closed
 * arc of length gamma starting at alpha. The bias of n points is
 *
 *     B = sup over sectors |N_S - gamma * n|,
 *
 * and it does not matter whether sectors are taken closed or open. The exact
 * algorithm therefore splits the supremum into an excess side (closed arcs,
 * endpoints on points) and a deficiency side (open arcs, endpoints on points).
 *
 * Both sides reduce to "max minus min" over per-point prefix quantities, so
 * exact_bias runs in O(n log n) after one sort, for either scalar type.
 */

#include <algorithm>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "circbias/errors.hpp"
#include "circbias/rational.hpp"

namespace circbias {

/// Multiset of circle positions, each stored as its fractional part.
template <Scalar T>
class PointConfiguration {
public:
    PointConfiguration() = default;

    /// Positions are reduced modulo one on construction.
    explicit PointConfiguration(std::vector<T> values) : points_(std::move(values)) {
        for (auto& p : points_) p = frac(p);
    }

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    std::span<const T> points() const noexcept { return points_; }
    const T& operator[](std::size_t i) const { return points_[i]; }

    /// Rigid rotation by c.
    PointConfiguration rotated(const T& c) const {
        std::vector<T> out(points_.begin(), points_.end());
        for (auto& p : out) p += c;
        return PointConfiguration(std::move(out));
    }

    /// Reflection p -> -p.
    PointConfiguration reflected() const {
        std::vector<T> out(points_.begin(), points_.end());
        for (auto& p : out) p = -p;
        return PointConfiguration(std::move(out));
    }

private:
    std::vector<T> points_;
};

template <Scalar T>
struct Sector {
    T alpha{0};
    T gamma{0};
};

enum class ArcMode { closed, open };
enum class Side { excess, deficiency };

inline std::string_view to_string(Side side) {
    return side == Side::excess ? "excess" : "deficiency";
}

/**
 * Bias value with the sector that realises it.
 *
 * Excess witnesses are closed sectors: bias = count - n*gamma.
 * Deficiency witnesses are open sectors: bias = n*gamma - count. An open
 * witness is the limit of closed sectors, which is how the supremum is
 * attained on that side.
 */
template <Scalar T>
struct BiasReport {
    T bias{0};
    Sector<T> witness{};
    std::size_t count = 0;
    Side side = Side::excess;
    std::size_t n = 0;
};

template <Scalar T>
Sector<T> make_sector(const T& alpha, const T& gamma) {
    require(!(gamma < T(0)) && !(gamma > T(1)), "sector aperture must lie in [0,1]");
    return Sector<T>{frac(alpha), gamma};
}

/// Number of points p with {p - alpha} <= gamma (closed) or 0 < {p - alpha} < gamma (open).
template <Scalar T>
std::size_t sector_count(const PointConfiguration<T>& cfg, const Sector<T>& s, ArcMode mode) {
    std::size_t count = 0;
    for (const T& p : cfg.points()) {
        const T d = frac(T(p - s.alpha));
        if (mode == ArcMode::closed ? !(d > s.gamma) : (d > T(0) && d < s.gamma)) ++count;
    }
    return count;
}

namespace detail {

/// Sorted distinct positions with multiplicities and inclusive prefix counts.
template <Scalar T>
struct Collapsed {
    std::vector<T> pos;
    std::vector<std::size_t> mult;
    std::vector<std::size_t> cum;  // cum[k] = points at indices <= k
    std::size_t n = 0;

    explicit Collapsed(const PointConfiguration<T>& cfg) : n(cfg.size()) {
        std::vector<T> sorted(cfg.points().begin(), cfg.points().end());
        std::sort(sorted.begin(), sorted.end());
        for (const T& p : sorted) {
            if (!pos.empty() && pos.back() == p) {
                ++mult.back();
            } else {
                pos.push_back(p);
                mult.push_back(1);
            }
        }
        cum.resize(pos.size());
        std::size_t running = 0;
        for (std::size_t k = 0; k < pos.size(); ++k) cum[k] = running += mult[k];
    }

    std::size_t before(std::size_t k) const { return k == 0 ? 0 : cum[k - 1]; }

    /// Points in [lo, hi] with 0 <= lo <= hi < 1 (no wrap).
    std::size_t closed_linear(const T& lo, const T& hi) const {
        auto first = std::lower_bound(pos.begin(), pos.end(), lo);
        auto last = std::upper_bound(pos.begin(), pos.end(), hi);
        return prefix(last) - prefix(first);
    }

    /// Points in (lo, hi) with 0 <= lo, hi <= 1 (no wrap).
    std::size_t open_linear(const T& lo, const T& hi) const {
        if (!(lo < hi)) return 0;
        auto first = std::upper_bound(pos.begin(), pos.end(), lo);
        auto last = std::lower_bound(pos.begin(), pos.end(), hi);
        if (last <= first) return 0;
        return prefix(last) - prefix(first);
    }

    std::size_t closed_arc(const T& alpha, const T& gamma) const {
        if (!(gamma < T(1))) return n;
        const T end = alpha + gamma;
        if (end < T(1)) return closed_linear(alpha, end);
        return closed_linear(alpha, T(1)) + closed_linear(T(0), T(end - 1));
    }

    std::size_t open_arc(const T& alpha, const T& gamma) const {
        if (!(gamma > T(0))) return 0;
        const T end = alpha + gamma;
        if (!(end > T(1))) return open_linear(alpha, end);
        // (alpha, 1) together with [0, end - 1)
        const T tail = end - 1;
        std::size_t head = open_linear(alpha, T(1));
        auto last = std::lower_bound(pos.begin(), pos.end(), tail);
        return head + prefix(last);
    }

private:
    std::size_t prefix(typename std::vector<T>::const_iterator it) const {
        const auto k = static_cast<std::size_t>(it - pos.begin());
        return k == 0 ? 0 : cum[k - 1];
    }
};

template <Scalar T>
T arc_length(const T& from, const T& to, bool same_point, bool full_if_same) {
    if (same_point) return full_if_same ? T(1) : T(0);
    return to > from ? T(to - from) : T(T(1) + to - from);
}

} // namespace detail

/**
 * Exact supremum of |N_S - gamma*n| over all sectors.
 *
 * Excess of the closed arc [u_i, u_j] equals A_j - B_i with
 * A_j = C_j - n u_j and B_i = C_{i-1} - n u_i (C = inclusive prefix counts);
 * the identity also holds for wrapping arcs and for the degenerate arc i = j.
 * Deficiency of the open arc (u_i, u_j) equals D_j - E_i with
 * D_j = n u_j - C_{j-1} and E_i = n u_i - C_i; i = j is the full circle minus
 * one point. The supremum is the larger of max A - min B and max D - min E.
 */
template <Scalar T>
BiasReport<T> exact_bias(const PointConfiguration<T>& cfg) {
    require(!cfg.empty(), "exact_bias: empty configuration");
    const detail::Collapsed<T> c(cfg);
    const std::size_t m = c.pos.size();
    const T n = T(static_cast<long>(c.n));

    std::size_t best_a = 0, best_b = 0, best_d = 0, best_e = 0;
    T max_a = T(static_cast<long>(c.cum[0])) - n * c.pos[0];
    T min_b = T(0) - n * c.pos[0];
    T max_d = n * c.pos[0];
    T min_e = n * c.pos[0] - T(static_cast<long>(c.cum[0]));
    for (std::size_t k = 1; k < m; ++k) {
        const T cum = T(static_cast<long>(c.cum[k]));
        const T before = T(static_cast<long>(c.before(k)));
        const T nu = n * c.pos[k];
        if (T a = cum - nu; a > max_a) { max_a = a; best_a = k; }
        if (T b = before - nu; b < min_b) { min_b = b; best_b = k; }
        if (T d = nu - before; d > max_d) { max_d = d; best_d = k; }
        if (T e = nu - cum; e < min_e) { min_e = e; best_e = k; }
    }

    const T excess = max_a - min_b;
    const T deficiency = max_d - min_e;

    BiasReport<T> report;
    report.n = c.n;
    if (!(deficiency > excess)) {
        const std::size_t i = best_b, j = best_a;
        report.side = Side::excess;
        report.bias = excess;
        report.witness = {c.pos[i], detail::arc_length(c.pos[i], c.pos[j], i == j, false)};
        report.count = j >= i ? c.cum[j] - c.before(i) : c.n - c.before(i) + c.cum[j];
    } else {
        const std::size_t i = best_e, j = best_d;
        report.side = Side::deficiency;
        report.bias = deficiency;
        report.witness = {c.pos[i], detail::arc_length(c.pos[i], c.pos[j], i == j, true)};
        report.count = j > i ? c.before(j) - c.cum[i] : c.n - c.cum[i] + c.before(j);
    }
    return report;
}

/**
 * Supremum of |N_S - gamma*n| over sectors of the fixed aperture gamma.
 *
 * The largest closed count is attained with a point at either end of the arc;
 * the smallest open count likewise. Four candidate families are checked:
 * alpha = u_i and alpha = {u_j - gamma}, each counted closed and open.
 */
template <Scalar T>
BiasReport<T> aperture_bias(const PointConfiguration<T>& cfg, const T& gamma) {
    require(!(gamma < T(0)) && !(gamma > T(1)), "aperture_bias: gamma must lie in [0,1]");
    require(!cfg.empty(), "aperture_bias: empty configuration");
    const detail::Collapsed<T> c(cfg);
    const T expected = T(static_cast<long>(c.n)) * gamma;

    BiasReport<T> best;
    best.n = c.n;
    bool have = false;
    auto consider = [&](const T& alpha, Side side) {
        const std::size_t count = side == Side::excess ? c.closed_arc(alpha, gamma) : c.open_arc(alpha, gamma);
        const T value = side == Side::excess ? T(T(static_cast<long>(count)) - expected)
                                             : T(expected - T(static_cast<long>(count)));
        if (!have || value > best.bias) {
            have = true;
            best.bias = value;
            best.side = side;
            best.count = count;
            best.witness = {alpha, gamma};
        }
    };
    for (const T& u : c.pos) {
        const T shifted = frac(T(u - gamma));
        consider(u, Side::excess);
        consider(shifted, Side::excess);
        consider(u, Side::deficiency);
        consider(shifted, Side::deficiency);
    }
    return best;
}

} // namespace circbias
