#pragma once

/**
 * @file newton.hpp
 * @brief Sparse bivariate polynomials, Newton polytopes and root-angle bias of f(x, a).
 *
 * Polytope geometry is exact (64-bit exponents, 128-bit orientation tests).
 * Edges are classified relative to the x-direction: a lower edge has the
 * polytope in the closed half-plane above its supporting line, an upper edge
 * below, and at most two edges are vertical.
 *
 * For small |y| the non-zero roots of f(x, y) split into groups, one per
 * lower edge e, approximated by the roots of the edge polynomial f_e. The
 * product f* of the x-shifted edge polynomials therefore predicts the root
 * arguments of f(x, r e^{i phi}) once r is small; edge_approx_check measures
 * how well, and bias_search looks for a substitution point with large bias.
 */

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "circbias/circle.hpp"
#include "circbias/errors.hpp"
#include "circbias/parallel.hpp"
#include "circbias/runners.hpp"
#include "circbias/unipoly.hpp"

namespace circbias::newton {

struct Exponent {
    long long i = 0;  ///< power of x
    long long j = 0;  ///< power of y
    auto operator<=>(const Exponent&) const = default;
};

class SparseBivariatePoly {
public:
    using Terms = std::map<Exponent, Complex>;

    SparseBivariatePoly() = default;

    static SparseBivariatePoly monomial(long long i, long long j, Complex c = 1.0) {
        SparseBivariatePoly f;
        f.add(i, j, c);
        return f;
    }

    /// Adds c x^i y^j; a coefficient that becomes exactly zero is removed.
    void add(long long i, long long j, Complex c) {
        if (c == Complex{}) return;
        auto [it, inserted] = terms_.try_emplace(Exponent{i, j}, c);
        if (!inserted) {
            it->second += c;
            if (it->second == Complex{}) terms_.erase(it);
        }
    }

    const Terms& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    Complex coefficient(long long i, long long j) const {
        auto it = terms_.find(Exponent{i, j});
        return it == terms_.end() ? Complex{} : it->second;
    }

    long long min_i() const { return extreme([](const Exponent& e) { return e.i; }, false); }
    long long max_i() const { return extreme([](const Exponent& e) { return e.i; }, true); }
    long long min_j() const { return extreme([](const Exponent& e) { return e.j; }, false); }
    long long max_j() const { return extreme([](const Exponent& e) { return e.j; }, true); }

    friend SparseBivariatePoly operator*(const SparseBivariatePoly& a, const SparseBivariatePoly& b) {
        SparseBivariatePoly out;
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) out.add(ea.i + eb.i, ea.j + eb.j, ca * cb);
        return out;
    }

    friend bool operator==(const SparseBivariatePoly&, const SparseBivariatePoly&) = default;

private:
    template <class Key>
    long long extreme(Key key, bool largest) const {
        require(!terms_.empty(), "empty polynomial has no exponents");
        long long best = key(terms_.begin()->first);
        for (const auto& [e, c] : terms_) best = largest ? std::max(best, key(e)) : std::min(best, key(e));
        return best;
    }

    Terms terms_;
};

/// Reduced slope num/den with den > 0.
struct Gradient {
    long long num = 0;
    long long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool integral() const { return den == 1; }
    auto operator<=>(const Gradient& o) const {
        return static_cast<__int128>(num) * o.den <=> static_cast<__int128>(o.num) * den;
    }
    bool operator==(const Gradient& o) const = default;
};

enum class EdgeKind { lower, upper, vertical };

inline std::string_view to_string(EdgeKind k) {
    switch (k) {
    case EdgeKind::lower: return "lower";
    case EdgeKind::upper: return "upper";
    default: return "vertical";
    }
}

struct Edge {
    Exponent from;
    Exponent to;
    EdgeKind kind = EdgeKind::lower;
    std::optional<Gradient> gradient;  ///< empty for vertical edges

    bool same_segment(const Edge& o) const {
        return (from == o.from && to == o.to) || (from == o.to && to == o.from);
    }
};

struct NewtonPolytope {
    std::vector<Exponent> vertices;  ///< counterclockwise, starting at the lowest leftmost point
    std::vector<Edge> edges;         ///< edge k joins vertices k and k+1 (cyclically)

    std::size_t count(EdgeKind kind) const {
        return static_cast<std::size_t>(
            std::count_if(edges.begin(), edges.end(), [&](const Edge& e) { return e.kind == kind; }));
    }
};

namespace detail {

inline __int128 cross(const Exponent& o, const Exponent& a, const Exponent& b) {
    return static_cast<__int128>(a.i - o.i) * (b.j - o.j) - static_cast<__int128>(a.j - o.j) * (b.i - o.i);
}

inline Gradient make_gradient(long long dy, long long dx) {
    if (dx < 0) { dx = -dx; dy = -dy; }
    const long long g = std::gcd(dy < 0 ? -dy : dy, dx);
    return {dy / g, dx / g};
}

inline bool on_segment(const Exponent& p, const Edge& e) {
    return cross(e.from, e.to, p) == 0 && p.i >= std::min(e.from.i, e.to.i) && p.i <= std::max(e.from.i, e.to.i) &&
           p.j >= std::min(e.from.j, e.to.j) && p.j <= std::max(e.from.j, e.to.j);
}

} // namespace detail

/// Convex hull of the support by Andrew's monotone chain; collinear points are not vertices.
inline NewtonPolytope newton_polytope(const SparseBivariatePoly& f) {
    require(!f.is_zero(), "newton_polytope: empty polynomial");
    std::vector<Exponent> pts;
    pts.reserve(f.size());
    for (const auto& [e, c] : f.terms()) pts.push_back(e);  // map order is lexicographic

    NewtonPolytope P;
    if (pts.size() == 1) {
        P.vertices = pts;
        return P;
    }
    std::vector<Exponent> lower, upper;
    for (const auto& p : pts) {
        while (lower.size() >= 2 && detail::cross(lower[lower.size() - 2], lower.back(), p) <= 0) lower.pop_back();
        lower.push_back(p);
    }
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (upper.size() >= 2 && detail::cross(upper[upper.size() - 2], upper.back(), *it) <= 0) upper.pop_back();
        upper.push_back(*it);
    }
    P.vertices.assign(lower.begin(), lower.end() - 1);
    P.vertices.insert(P.vertices.end(), upper.begin(), upper.end() - 1);

    const std::size_t k = P.vertices.size();
    for (std::size_t v = 0; v < k; ++v) {
        Edge e;
        e.from = P.vertices[v];
        e.to = P.vertices[(v + 1) % k];
        const long long dx = e.to.i - e.from.i, dy = e.to.j - e.from.j;
        if (dx == 0) {
            e.kind = EdgeKind::vertical;
        } else {
            e.kind = dx > 0 ? EdgeKind::lower : EdgeKind::upper;
            e.gradient = detail::make_gradient(dy, dx);
        }
        P.edges.push_back(e);
    }
    return P;
}

/// Lower chain, left to right; gradients strictly increase along it.
inline std::vector<Edge> lower_edges(const NewtonPolytope& P) {
    std::vector<Edge> out;
    for (const auto& e : P.edges)
        if (e.kind == EdgeKind::lower) out.push_back(e);
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) { return a.from.i < b.from.i; });
    return out;
}

/// Upper chain, oriented and sorted left to right.
inline std::vector<Edge> upper_edges(const NewtonPolytope& P) {
    std::vector<Edge> out;
    for (auto e : P.edges) {
        if (e.kind != EdgeKind::upper) continue;
        std::swap(e.from, e.to);
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) { return a.from.i < b.from.i; });
    return out;
}

inline void require_edge_of(const SparseBivariatePoly& f, const Edge& e) {
    require(e.from != e.to, "edge_poly: a single vertex is not an edge");
    const NewtonPolytope P = newton_polytope(f);
    const bool found = std::any_of(P.edges.begin(), P.edges.end(), [&](const Edge& x) { return x.same_segment(e); });
    require(found, "edge_poly: segment is not an edge of the Newton polytope");
}

/// f_e: the terms of f lying on the edge e.
inline SparseBivariatePoly edge_poly(const SparseBivariatePoly& f, const Edge& e) {
    require_edge_of(f, e);
    SparseBivariatePoly out;
    for (const auto& [ex, c] : f.terms())
        if (detail::on_segment(ex, e)) out.add(ex.i, ex.j, c);
    return out;
}

/// f_e* = x^{-a} f_e with a the smaller x-exponent of the edge.
inline SparseBivariatePoly star_poly(const SparseBivariatePoly& f, const Edge& e) {
    require(e.from.i != e.to.i, "star_poly: vertical edges have no shifted edge polynomial");
    const long long a = std::min(e.from.i, e.to.i);
    SparseBivariatePoly out;
    const SparseBivariatePoly fe = edge_poly(f, e);
    for (const auto& [ex, c] : fe.terms()) out.add(ex.i - a, ex.j, c);
    return out;
}

/// f divided by the largest power of x dividing it.
inline SparseBivariatePoly x_normalized(const SparseBivariatePoly& f) {
    if (f.is_zero()) return f;
    const long long a = f.min_i();
    SparseBivariatePoly out;
    for (const auto& [e, c] : f.terms()) out.add(e.i - a, e.j, c);
    return out;
}

/// (i, j) -> (i, m j): the polynomial f(x, y^m).
inline SparseBivariatePoly y_power_substitute(const SparseBivariatePoly& f, long long m) {
    require(m >= 1, "y_power_substitute: m must be >= 1");
    SparseBivariatePoly out;
    for (const auto& [e, c] : f.terms()) out.add(e.i, m * e.j, c);
    return out;
}

/// (i, j) -> (i, m - j): the polynomial y^m f(x, 1/y). Swaps lower and upper chains.
inline SparseBivariatePoly y_invert(const SparseBivariatePoly& f, long long m) {
    require(f.is_zero() || m >= f.max_j(), "y_invert: m is smaller than the largest y-exponent");
    SparseBivariatePoly out;
    for (const auto& [e, c] : f.terms()) out.add(e.i, m - e.j, c);
    return out;
}

/// Least common multiple of the lower-edge gradient denominators.
inline long long gradient_denominator_lcm(const SparseBivariatePoly& f) {
    long long m = 1;
    for (const auto& e : lower_edges(newton_polytope(f))) m = std::lcm(m, e.gradient->den);
    return m;
}

/**
 * f* = product of f_e* over the lower edges of the x-normalized f. Its
 * x-degree equals the x-degree of the normalized f. Lower-edge gradients
 * must be integers; apply y_power_substitute first otherwise.
 */
inline SparseBivariatePoly f_star(const SparseBivariatePoly& f) {
    const SparseBivariatePoly g = x_normalized(f);
    SparseBivariatePoly out = SparseBivariatePoly::monomial(0, 0);
    for (const auto& e : lower_edges(newton_polytope(g))) {
        if (!e.gradient->integral())
            throw InvalidArgument("f_star: lower edge gradient " + std::to_string(e.gradient->num) + "/" +
                                  std::to_string(e.gradient->den) +
                                  " is not an integer; substitute y -> y^m with m = " +
                                  std::to_string(gradient_denominator_lcm(g)) + " first");
        out = out * star_poly(g, e);
    }
    return out;
}

/// f(x, a) collected by powers of x.
inline DensePoly substitute_y(const SparseBivariatePoly& f, Complex a) {
    if (f.is_zero()) return {};
    require(f.min_i() >= 0, "substitute_y: negative x-exponent");
    std::vector<Complex> c(static_cast<std::size_t>(f.max_i() + 1));
    for (const auto& [e, coef] : f.terms()) c[static_cast<std::size_t>(e.i)] += coef * std::pow(a, static_cast<double>(e.j));
    return DensePoly(std::move(c));
}

/**
 * f(x, radius * e^{2 pi i turn}). Powers are formed as radius^j and the angle
 * 2 pi {j turn}, which keeps rational turns accurate for large j.
 */
inline DensePoly substitute_y_polar(const SparseBivariatePoly& f, double radius, double turn) {
    if (f.is_zero()) return {};
    require(f.min_i() >= 0, "substitute_y: negative x-exponent");
    require(radius > 0.0, "substitute_y: radius must be positive");
    std::vector<Complex> c(static_cast<std::size_t>(f.max_i() + 1));
    for (const auto& [e, coef] : f.terms()) {
        const double angle = 2.0 * std::numbers::pi * frac(static_cast<double>(e.j) * turn);
        c[static_cast<std::size_t>(e.i)] += coef * std::polar(std::pow(radius, static_cast<double>(e.j)), angle);
    }
    return DensePoly(std::move(c));
}

/// e^{2 pi i s}, exact at quarter turns.
template <Scalar T>
Complex unit_from_turn(const T& s) {
    const T f = frac(s);
    for (int q = 0; q < 4; ++q) {
        if (f == T(q) / T(4)) {
            constexpr Complex quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
            return quarter[q];
        }
    }
    return std::polar(1.0, 2.0 * std::numbers::pi * to_double(f));
}

namespace detail {

template <Scalar T>
std::vector<long long> integer_speeds(const runners::RunnerSystem<T>& sys, std::size_t max_runners) {
    sys.validate();
    require(sys.size() <= max_runners, "runner_poly: at most " + std::to_string(max_runners) + " runners supported");
    std::vector<long long> v;
    for (const T& s : sys.speeds) {
        const double d = to_double(s);
        require(T(static_cast<long long>(std::llround(d))) == s && d >= 0,
                "runner_poly: speeds must be non-negative integers");
        v.push_back(std::llround(d));
    }
    return v;
}

} // namespace detail

inline constexpr std::size_t max_runner_poly_factors = 512;

/// g(x, y) = prod_j (x - e^{2 pi i s_j} y^{v_j}).
template <Scalar T>
SparseBivariatePoly runner_poly(const runners::RunnerSystem<T>& sys) {
    const auto v = detail::integer_speeds(sys, max_runner_poly_factors);
    SparseBivariatePoly out = SparseBivariatePoly::monomial(0, 0);
    for (std::size_t j = 0; j < v.size(); ++j) {
        SparseBivariatePoly factor = SparseBivariatePoly::monomial(1, 0);
        factor.add(0, v[j], -unit_from_turn(sys.starts[j]));
        out = out * factor;
    }
    return out;
}

/// g times its coefficient conjugate: prod_j (x^2 - 2 cos(2 pi s_j) x y^{v_j} + y^{2 v_j}), real coefficients.
template <Scalar T>
SparseBivariatePoly runner_poly_real(const runners::RunnerSystem<T>& sys) {
    const auto v = detail::integer_speeds(sys, max_runner_poly_factors / 2);
    SparseBivariatePoly out = SparseBivariatePoly::monomial(0, 0);
    for (std::size_t j = 0; j < v.size(); ++j) {
        SparseBivariatePoly factor = SparseBivariatePoly::monomial(2, 0);
        factor.add(1, v[j], -2.0 * unit_from_turn(sys.starts[j]).real());
        factor.add(0, 2 * v[j], 1.0);
        out = out * factor;
    }
    return out;
}

/// Lower edges together with the root moduli of their edge polynomials at |y| = 1.
struct EdgeModel {
    Edge edge;
    double gradient = 0.0;
    std::size_t degree = 0;  ///< d = x-degree of f_e*
    double min_modulus = 0.0;
    double max_modulus = 0.0;
    SparseBivariatePoly star;
};

inline std::vector<EdgeModel> edge_models(const SparseBivariatePoly& g, const RootOptions& ropts = {}) {
    std::vector<EdgeModel> out;
    for (const auto& e : lower_edges(newton_polytope(g))) {
        EdgeModel m;
        m.edge = e;
        m.gradient = e.gradient->value();
        m.star = star_poly(g, e);
        const DensePoly h = substitute_y_polar(m.star, 1.0, 0.0);
        m.degree = static_cast<std::size_t>(h.degree());
        const RootSet rs = roots(h, ropts);
        m.min_modulus = std::numeric_limits<double>::infinity();
        for (const auto& z : rs.roots) {
            m.min_modulus = std::min(m.min_modulus, std::abs(z));
            m.max_modulus = std::max(m.max_modulus, std::abs(z));
        }
        out.push_back(std::move(m));
    }
    return out;
}

/**
 * Edge-approximation setup: the x-normalized polynomial with lower-edge
 * gradients made integral by y -> y^m.
 */
struct EdgeSetup {
    SparseBivariatePoly poly;
    long long substitution = 1;
};

inline EdgeSetup edge_setup(const SparseBivariatePoly& f) {
    require(!f.is_zero(), "edge approximation: zero polynomial");
    EdgeSetup s;
    s.poly = x_normalized(f);
    s.substitution = gradient_denominator_lcm(s.poly);
    if (s.substitution > 1) s.poly = y_power_substitute(s.poly, s.substitution);
    return s;
}

struct RadiusChoice {
    double r = 1e-2;
    bool separated = false;  ///< false when the floor was reached first
};

/**
 * Start at 1e-2 and halve until consecutive annuli
 * [m_i r^{-q_i}, m_i' r^{-q_i}] are separated by a factor >= 4 in modulus,
 * stopping at the floor 1e-6.
 */
inline RadiusChoice select_radius(const SparseBivariatePoly& f, const RootOptions& ropts = {}) {
    const EdgeSetup setup = edge_setup(f);
    const auto models = edge_models(setup.poly, ropts);
    RadiusChoice choice;
    const double floor = 1e-6;
    for (double r = 1e-2;; r *= 0.5) {
        bool ok = true;
        for (std::size_t i = 0; i + 1 < models.size(); ++i) {
            const double inner_next = std::log(models[i + 1].min_modulus) - models[i + 1].gradient * std::log(r);
            const double outer_here = std::log(models[i].max_modulus) - models[i].gradient * std::log(r);
            if (inner_next - outer_here < std::log(4.0)) ok = false;
        }
        if (ok || r * 0.5 < floor) {
            choice.r = ok ? r : std::max(r, floor);
            choice.separated = ok;
            return choice;
        }
    }
}

struct AnnulusReport {
    double gradient = 0.0;
    std::size_t expected = 0;   ///< d_i
    std::size_t occupancy = 0;  ///< roots of f(x, r e^{i phi}) found in the annulus
    double inner = 0.0;
    double outer = 0.0;
    double max_arg = 0.0;       ///< matched |Arg(xi'/xi)|, infinity when occupancy differs
};

struct EdgeApproxReport {
    double phi = 0.0;
    double r = 0.0;
    double eps = 0.0;
    long long substitution = 1;
    double bias_f = 0.0;
    double bias_star = 0.0;
    double gap = 0.0;
    std::vector<AnnulusReport> annuli;
    std::size_t unassigned = 0;
    bool occupancy_ok = false;
    double max_arg_mismatch = 0.0;
    bool matched = false;  ///< an eps-matching exists
};

namespace detail {

/// Smallest achievable max |Arg(a/b)| over cyclic pairings of angle-sorted lists.
inline double circular_matching(std::vector<Complex> a, std::vector<Complex> b) {
    auto by_arg = [](const Complex& x, const Complex& y) { return std::arg(x) < std::arg(y); };
    std::sort(a.begin(), a.end(), by_arg);
    std::sort(b.begin(), b.end(), by_arg);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t shift = 0; shift < a.size(); ++shift) {
        double worst = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k)
            worst = std::max(worst, std::abs(std::arg(a[(k + shift) % a.size()] / b[k])));
        best = std::min(best, worst);
    }
    return a.empty() ? 0.0 : best;
}

inline double bias_of_turns(std::vector<double> turns, double angle_tol) {
    if (turns.empty()) return 0.0;
    return exact_bias(PointConfiguration<double>(merge_close_turns(std::move(turns), angle_tol))).bias;
}

} // namespace detail

/**
 * Compare B(f(x, r e^{i phi})) with B(f*(x, e^{i phi})). Roots of f are
 * grouped by the annulus predicted for each lower edge and matched by
 * argument against the edge roots. B(f*) is computed from the union of the
 * edge-polynomial roots, which is the root multiset of f*.
 *
 * When lower-edge gradients are fractional the check runs on f(x, y^m) and
 * phi, r refer to that polynomial.
 */
inline EdgeApproxReport edge_approx_check(const SparseBivariatePoly& f, double phi, double r, double eps,
                                          const PolyBiasOptions& popts = {}) {
    require(r > 0.0, "edge_approx_check: r must be positive");
    require(eps > 0.0 && eps < 1.0, "edge_approx_check: eps must lie in (0,1)");
    const EdgeSetup setup = edge_setup(f);
    const double turn = frac(phi / (2.0 * std::numbers::pi));

    EdgeApproxReport rep;
    rep.phi = phi;
    rep.r = r;
    rep.eps = eps;
    rep.substitution = setup.substitution;

    const DensePoly F = substitute_y_polar(setup.poly, r, turn);
    require(F.degree() >= 1, "edge_approx_check: f(x, a) has no non-zero roots");
    const RootSet froots = roots(F, popts.root);
    rep.bias_f = detail::bias_of_turns(root_turns(froots), popts.angle_tol);

    std::vector<double> star_turns;
    std::vector<std::vector<Complex>> predicted;
    for (const auto& e : lower_edges(newton_polytope(setup.poly))) {
        const DensePoly h = substitute_y_polar(star_poly(setup.poly, e), 1.0, turn);
        const RootSet hr = roots(h, popts.root);
        const auto t = root_turns(hr);
        star_turns.insert(star_turns.end(), t.begin(), t.end());

        AnnulusReport a;
        a.gradient = e.gradient->value();
        a.expected = hr.roots.size();
        const double scale = std::pow(r, -a.gradient);
        std::vector<Complex> pred;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (const auto& z : hr.roots) {
            pred.push_back(z * scale);
            lo = std::min(lo, std::abs(z) * scale);
            hi = std::max(hi, std::abs(z) * scale);
        }
        a.inner = lo * (1.0 - eps);
        a.outer = hi * (1.0 + eps);
        rep.annuli.push_back(a);
        predicted.push_back(std::move(pred));
    }
    rep.bias_star = detail::bias_of_turns(star_turns, popts.angle_tol);
    rep.gap = std::abs(rep.bias_f - rep.bias_star);

    std::vector<std::vector<Complex>> assigned(rep.annuli.size());
    for (const auto& z : froots.roots) {
        const double mod = std::abs(z);
        bool placed = false;
        for (std::size_t i = 0; i < rep.annuli.size() && !placed; ++i) {
            if (mod >= rep.annuli[i].inner && mod <= rep.annuli[i].outer) {
                assigned[i].push_back(z);
                placed = true;
            }
        }
        if (!placed) ++rep.unassigned;
    }

    rep.occupancy_ok = rep.unassigned == 0;
    for (std::size_t i = 0; i < rep.annuli.size(); ++i) {
        auto& a = rep.annuli[i];
        a.occupancy = assigned[i].size();
        if (a.occupancy == a.expected) {
            a.max_arg = detail::circular_matching(assigned[i], predicted[i]);
        } else {
            a.max_arg = std::numeric_limits<double>::infinity();
            rep.occupancy_ok = false;
        }
        rep.max_arg_mismatch = std::max(rep.max_arg_mismatch, a.max_arg);
    }
    rep.matched = rep.occupancy_ok && rep.max_arg_mismatch < eps;
    return rep;
}

struct SweepPoint {
    double phi = 0.0;
    double bias = 0.0;
    double star_bias = std::numeric_limits<double>::quiet_NaN();
};

struct BiasSearchOptions {
    std::size_t phi_steps = 64;
    double radius = 0.0;  ///< |a|; zero or negative selects the edge-approximation radius
    bool include_star = true;
    PolyBiasOptions poly{};
    unsigned threads = 1;
};

struct BiasSearchResult {
    Complex a{};              ///< substitution point for the input polynomial
    double phi = 0.0;         ///< argument of the point on the working polynomial
    double radius = 0.0;
    bool flipped = false;     ///< searched y^M f(x, 1/y); a has been mapped back
    std::size_t lower_edges = 0;  ///< s, after the flip
    std::size_t vertices = 0;
    BiasReport<double> report{};
    double star_best = std::numeric_limits<double>::quiet_NaN();
    double star_best_phi = 0.0;
    long long star_substitution = 1;
    std::vector<SweepPoint> sweep;
};

/**
 * Scan B(f(x, r e^{i phi})) over phi = 2 pi k / phi_steps, plus B(f*(x, e^{i phi}))
 * on the same grid. If the upper chain is longer than the lower one the
 * search runs on y^M f(x, 1/y) (same roots at 1/a) so the lower chain is the
 * long one.
 */
inline BiasSearchResult bias_search(const SparseBivariatePoly& f, const BiasSearchOptions& opts = {}) {
    require(!f.is_zero(), "bias_search: zero polynomial");
    require(opts.phi_steps >= 1, "bias_search: phi_steps must be >= 1");
    const NewtonPolytope P = newton_polytope(f);

    BiasSearchResult res;
    res.vertices = P.vertices.size();
    const std::size_t lower = P.count(EdgeKind::lower), upper = P.count(EdgeKind::upper);
    res.flipped = upper > lower;
    res.lower_edges = std::max(lower, upper);
    const SparseBivariatePoly g = x_normalized(res.flipped ? y_invert(f, f.max_j()) : f);
    if (g.max_i() < 1) throw InvalidArgument("bias_search: f(x, a) has no non-zero roots (x-degree 0 after removing x^m)");

    res.radius = opts.radius > 0.0 ? opts.radius : select_radius(g, opts.poly.root).r;
    const double steps = static_cast<double>(opts.phi_steps);

    std::vector<double> star_values(opts.phi_steps, std::numeric_limits<double>::quiet_NaN());
    if (opts.include_star && res.lower_edges > 0) {
        const EdgeSetup setup = edge_setup(g);
        res.star_substitution = setup.substitution;
        const SparseBivariatePoly star = f_star(setup.poly);
        if (star.max_i() >= 1) {
            star_values = parallel_map(opts.phi_steps, opts.threads, [&](std::size_t k) {
                return bias_of_poly(substitute_y_polar(star, 1.0, static_cast<double>(k) / steps), opts.poly).bias;
            });
        }
    }

    const auto reports = parallel_map(opts.phi_steps, opts.threads, [&](std::size_t k) {
        return bias_of_poly(substitute_y_polar(g, res.radius, static_cast<double>(k) / steps), opts.poly);
    });

    std::size_t best = 0;
    for (std::size_t k = 0; k < opts.phi_steps; ++k) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / steps;
        res.sweep.push_back({phi, reports[k].bias, star_values[k]});
        if (reports[k].bias > reports[best].bias) best = k;
        if (!std::isnan(star_values[k]) && (std::isnan(res.star_best) || star_values[k] > res.star_best)) {
            res.star_best = star_values[k];
            res.star_best_phi = phi;
        }
    }
    res.phi = res.sweep[best].phi;
    res.report = reports[best];
    const Complex a = std::polar(res.radius, res.phi);
    res.a = res.flipped ? 1.0 / a : a;
    return res;
}

} // namespace circbias::newton
