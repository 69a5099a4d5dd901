#pragma once

/**
 * @file realroots.hpp
 * @brief Sign variations of cosine sequences and a driver that finds a with
 *        many distinct real roots of Re(f(x, a)).
 *
 * Re(f(x, a)) is the polynomial whose coefficients are the real parts of the
 * coefficients of f(x, a). For a = rho e^{i phi}, the terms of f on one chain
 * edge of gradient q dominate near |x| = rho^{-q}. When the two endpoint
 * coefficients have opposite signs after the phase twist, the edge polynomial
 * changes sign on (0, inf), and so does Re(f(x, a)) on a scaled interval once
 * rho is extreme enough. The lower chain needs rho -> 0, the upper chain
 * rho -> inf.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "circbias/errors.hpp"
#include "circbias/newton.hpp"
#include "circbias/parallel.hpp"
#include "circbias/unipoly.hpp"

namespace circbias::realroots {

/// Number of indices with seq[i] * seq[i+1] < 0. Zeros never count.
inline std::size_t sign_variations(const std::vector<double>& seq) {
    std::size_t v = 0;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
        if (seq[i] * seq[i + 1] < 0.0) ++v;
    return v;
}

/// Variations counted only over pairs (i, i+1) with eligible[i] set.
inline std::size_t sign_variations(const std::vector<double>& seq, const std::vector<bool>& eligible) {
    std::size_t v = 0;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i)
        if (eligible[i] && seq[i] * seq[i + 1] < 0.0) ++v;
    return v;
}

struct PhaseResult {
    double phi = 0.0;
    std::size_t variations = 0;
    std::size_t bound = 0;       ///< ceil(eligible pairs / 8)
    std::size_t grid_steps = 0;  ///< final grid size after any refinement
    std::vector<std::size_t> curve;  ///< V at phi = 2 pi k / grid_steps
};

inline std::size_t ceil_div8(std::size_t m) { return (m + 7) / 8; }

/// |cos| below this is a rounded zero and carries no sign.
inline constexpr double phase_zero_tol = 1e-9;

/**
 * Scan V(cos(alpha_i + phi n_i)) over a uniform phi grid. Pairs with
 * n_i == n_{i+1} are excluded from the count, and cosines below 1e-9 in
 * magnitude count as zero. Ties go to the phase whose counted cosines stay
 * farthest from zero. The grid is doubled (up to 64
 * times the requested size) while the maximum stays below ceil(pairs/8).
 */
inline PhaseResult find_phase(const std::vector<double>& alphas, const std::vector<long long>& ns,
                              std::size_t grid_steps, unsigned threads = 1) {
    require(alphas.size() == ns.size(), "find_phase: alphas and ns differ in length");
    long long max_n = 0;
    for (long long n : ns) {
        require(n >= 0, "find_phase: exponents must be non-negative");
        max_n = std::max(max_n, n);
    }
    const std::size_t needed = 8 * static_cast<std::size_t>(std::max<long long>(max_n, 1));
    if (grid_steps < needed)
        throw InvalidArgument("find_phase: grid_steps " + std::to_string(grid_steps) + " too coarse, need >= " +
                              std::to_string(needed));

    std::vector<bool> eligible(alphas.empty() ? 0 : alphas.size() - 1);
    std::size_t pairs = 0;
    for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
        eligible[i] = ns[i] != ns[i + 1];
        pairs += eligible[i] ? 1 : 0;
    }

    PhaseResult res;
    res.bound = ceil_div8(pairs);
    for (std::size_t steps = grid_steps;; steps *= 2) {
        res.grid_steps = steps;
        struct Sample {
            std::size_t v;
            double margin;  // smallest |cos| over the endpoints of counted pairs
        };
        const auto samples = parallel_map(steps, threads, [&](std::size_t k) {
            const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(steps);
            std::vector<double> seq(alphas.size());
            for (std::size_t i = 0; i < alphas.size(); ++i) {
                seq[i] = std::cos(alphas[i] + phi * static_cast<double>(ns[i]));
                if (std::abs(seq[i]) < phase_zero_tol) seq[i] = 0.0;
            }
            Sample out{sign_variations(seq, eligible), INFINITY};
            for (std::size_t i = 0; i + 1 < seq.size(); ++i)
                if (eligible[i] && seq[i] * seq[i + 1] < 0.0)
                    out.margin = std::min({out.margin, std::abs(seq[i]), std::abs(seq[i + 1])});
            return out;
        });
        // among the phases with the most variations, keep the one farthest from a zero of any counted cosine
        std::size_t best = 0;
        res.curve.resize(steps);
        for (std::size_t k = 0; k < steps; ++k) {
            res.curve[k] = samples[k].v;
            if (samples[k].v > samples[best].v || (samples[k].v == samples[best].v && samples[k].margin > samples[best].margin))
                best = k;
        }
        res.variations = samples[best].v;
        res.phi = 2.0 * std::numbers::pi * static_cast<double>(best) / static_cast<double>(steps);
        if (res.variations >= res.bound || steps >= 64 * grid_steps) return res;
    }
}

/// Coefficient data at the vertices of one chain, ordered left to right.
struct VertexPhases {
    std::vector<double> alphas;        ///< arguments in [0, 2 pi)
    std::vector<double> magnitudes;    ///< r_i > 0
    std::vector<long long> y_exponents;  ///< b_i
    std::vector<long long> x_exponents;  ///< a_i
};

enum class Chain { lower, upper };

inline std::string_view to_string(Chain c) { return c == Chain::lower ? "lower" : "upper"; }

/// Chain edges left to right (lower: polytope above; upper: polytope below).
inline std::vector<newton::Edge> chain_edges(const newton::SparseBivariatePoly& f, Chain chain) {
    const auto P = newton::newton_polytope(f);
    return chain == Chain::lower ? newton::lower_edges(P) : newton::upper_edges(P);
}

inline VertexPhases vertex_phases(const newton::SparseBivariatePoly& f, Chain chain) {
    VertexPhases vp;
    const auto edges = chain_edges(f, chain);
    auto push = [&](const newton::Exponent& e) {
        const Complex c = f.coefficient(e.i, e.j);
        double alpha = std::arg(c);
        if (alpha < 0) alpha += 2.0 * std::numbers::pi;
        vp.alphas.push_back(alpha);
        vp.magnitudes.push_back(std::abs(c));
        vp.y_exponents.push_back(e.j);
        vp.x_exponents.push_back(e.i);
    };
    for (std::size_t k = 0; k < edges.size(); ++k) {
        push(edges[k].from);
        if (k + 1 == edges.size()) push(edges[k].to);
    }
    return vp;
}

struct WitnessInterval {
    std::size_t edge = 0;  ///< index along the chain
    double gradient = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct DriverOptions {
    std::vector<double> r_schedule{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    std::size_t grid_steps = 0;  ///< 0 selects 8 * max y-exponent (at least 64)
    std::size_t scan_points = 256;  ///< log grid per decade window for d, d'
    double cluster_tol = 1e-6;
    RootOptions root{};
    unsigned threads = 1;
};

struct DriverReport {
    Complex a{};
    double phi = 0.0;
    double r = 0.0;        ///< schedule value; |a| = r (lower chain) or 1/r (upper chain)
    Chain chain = Chain::lower;
    std::size_t s = 0;     ///< edges on the chain used
    std::size_t bound = 0; ///< ceil((s - 1) / 8)
    std::size_t variations = 0;
    std::vector<std::size_t> phase_curve;  ///< V over the phi grid used by find_phase
    std::size_t count = 0; ///< bracketed roots
    std::vector<WitnessInterval> intervals;
    std::size_t confirmed = 0;  ///< distinct real roots found numerically
    bool fallback = false;      ///< s < 2: count comes from distinct_real_roots at a = 1
};

namespace detail {

/// Re(f(x, a)) as a dense real polynomial in x.
inline DensePoly real_section(const newton::SparseBivariatePoly& f, Complex a) {
    return re_part(newton::substitute_y(f, a));
}

/// Twisted real edge polynomial G(z) = sum Re(c e^{i j phi}) z^{i - i0} over the terms on the edge.
inline DensePoly twisted_edge(const newton::SparseBivariatePoly& f, const newton::Edge& e, double phi) {
    std::vector<Complex> c;
    const long long i0 = std::min(e.from.i, e.to.i);
    const newton::SparseBivariatePoly fe = newton::edge_poly(f, e);
    for (const auto& [ex, coef] : fe.terms()) {
        const auto k = static_cast<std::size_t>(ex.i - i0);
        if (c.size() <= k) c.resize(k + 1);
        c[k] += (coef * std::polar(1.0, static_cast<double>(ex.j) * phi)).real();
    }
    return DensePoly(std::move(c));
}

/// Adjacent points d < d' of a geometric grid with G(d) G(d') < 0, widening the window if needed.
inline bool locate_sign_change(const DensePoly& G, std::size_t points, double& d, double& dprime) {
    for (double decades = 3.0; decades <= 24.0; decades += 3.0) {
        const double lo = -decades, hi = decades;
        const std::size_t n = points * static_cast<std::size_t>(decades / 3.0);
        long double prev_x = std::pow(10.0L, static_cast<long double>(lo));
        int prev_sign = sign_of(eval_real(G, prev_x));
        for (std::size_t k = 1; k <= n; ++k) {
            const long double x = std::pow(10.0L, static_cast<long double>(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n)));
            const int s = sign_of(eval_real(G, x));
            if (s != 0 && prev_sign != 0 && s != prev_sign) {
                d = static_cast<double>(prev_x);
                dprime = static_cast<double>(x);
                return true;
            }
            if (s != 0) {
                prev_sign = s;
                prev_x = x;
            }
        }
    }
    return false;
}

} // namespace detail

/**
 * Choose the chain with more edges, pick phi by find_phase on its vertex
 * data, and walk the r schedule until every sign-changing pair brackets a
 * sign change of Re(f(x, a)) and the brackets are pairwise disjoint.
 */
inline DriverReport real_roots_driver(const newton::SparseBivariatePoly& f0, const DriverOptions& opts = {}) {
    require(!f0.is_zero(), "real_roots_driver: zero polynomial");
    require(!opts.r_schedule.empty(), "real_roots_driver: empty r schedule");
    for (double r : opts.r_schedule) require(r > 0.0 && r < 1.0, "real_roots_driver: schedule values must lie in (0,1)");
    const newton::SparseBivariatePoly f = newton::x_normalized(f0);

    DriverReport rep;
    const auto P = newton::newton_polytope(f);
    const std::size_t lower = P.count(newton::EdgeKind::lower), upper = P.count(newton::EdgeKind::upper);
    rep.chain = upper > lower ? Chain::upper : Chain::lower;
    rep.s = std::max(lower, upper);

    auto confirm = [&](Complex a) {
        return distinct_real_roots(detail::real_section(f, a), opts.cluster_tol, opts.root).count;
    };

    if (rep.s < 2) {
        rep.fallback = true;
        rep.a = 1.0;
        rep.r = 1.0;
        rep.count = confirm(rep.a);
        rep.confirmed = rep.count;
        return rep;
    }
    rep.bound = ceil_div8(rep.s - 1);

    const auto edges = chain_edges(f, rep.chain);
    const VertexPhases vp = vertex_phases(f, rep.chain);
    long long max_b = 1;
    for (long long b : vp.y_exponents) max_b = std::max(max_b, b);
    const std::size_t grid = opts.grid_steps ? opts.grid_steps : std::max<std::size_t>(64, 8 * static_cast<std::size_t>(max_b));
    const PhaseResult phase = find_phase(vp.alphas, vp.y_exponents, grid, opts.threads);
    rep.phi = phase.phi;
    rep.variations = phase.variations;
    rep.phase_curve = phase.curve;

    struct Candidate {
        std::size_t edge;
        double gradient;
        double d, dprime;
    };
    std::vector<Candidate> cands;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (vp.y_exponents[k] == vp.y_exponents[k + 1]) continue;
        const double ck = std::cos(vp.alphas[k] + rep.phi * static_cast<double>(vp.y_exponents[k]));
        const double cn = std::cos(vp.alphas[k + 1] + rep.phi * static_cast<double>(vp.y_exponents[k + 1]));
        if (std::abs(ck) < phase_zero_tol || std::abs(cn) < phase_zero_tol || ck * cn >= 0.0) continue;
        Candidate c{k, edges[k].gradient->value(), 0.0, 0.0};
        if (!detail::locate_sign_change(detail::twisted_edge(f, edges[k], rep.phi), opts.scan_points, c.d, c.dprime))
            throw NumericalError("real_roots_driver: no sign change of the twisted edge polynomial",
                                 "edge " + std::to_string(k) + ", phi " + std::to_string(rep.phi));
        cands.push_back(c);
    }

    std::ostringstream last;
    for (double r : opts.r_schedule) {
        const double rho = rep.chain == Chain::lower ? r : 1.0 / r;
        const Complex a = std::polar(rho, rep.phi);
        const DensePoly section = detail::real_section(f, a);
        std::vector<WitnessInterval> iv;
        bool ok = true;
        last.str("");
        last << "r=" << r;
        for (const auto& c : cands) {
            const double scale = std::pow(rho, -c.gradient);
            WitnessInterval w{c.edge, c.gradient, c.d * scale, c.dprime * scale};
            const int s_lo = sign_of(eval_real(section, w.lo)), s_hi = sign_of(eval_real(section, w.hi));
            if (s_lo * s_hi >= 0) {
                ok = false;
                last << " edge " << c.edge << ": no sign change on [" << w.lo << ", " << w.hi << "]";
            }
            iv.push_back(w);
        }
        std::sort(iv.begin(), iv.end(), [](const auto& x, const auto& y) { return x.lo < y.lo; });
        for (std::size_t k = 0; k + 1 < iv.size(); ++k) {
            if (iv[k].hi >= iv[k + 1].lo) {
                ok = false;
                last << " intervals " << iv[k].edge << " and " << iv[k + 1].edge << " overlap";
            }
        }
        if (!ok) continue;

        rep.r = r;
        rep.a = a;
        rep.intervals = std::move(iv);
        rep.count = rep.intervals.size();
        rep.confirmed = distinct_real_roots(section, opts.cluster_tol, opts.root).count;
        if (rep.count < rep.bound)
            throw NumericalError("real_roots_driver: bracketed count below ceil((s-1)/8)",
                                 "count " + std::to_string(rep.count) + ", bound " + std::to_string(rep.bound));
        return rep;
    }
    throw NumericalError("real_roots_driver: r schedule exhausted without disjoint brackets", last.str());
}

} // namespace circbias::realroots
