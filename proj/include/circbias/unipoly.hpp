#pragma once

/**
 * @file unipoly.hpp
 * @brief Dense univariate complex polynomials, root finding and root-angle bias.
 *
 * Roots come from Aberth-Ehrlich simultaneous iteration started on circles
 * read off the Newton polygon of the coefficient moduli. Polynomials obtained
 * by substituting small |y| into a bivariate polynomial have coefficients
 * spanning hundreds of orders of magnitude; the polygon start places each
 * group of roots on the right annulus, and evaluation switches to the
 * reversed polynomial outside the unit disc so nothing overflows.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "circbias/circle.hpp"
#include "circbias/errors.hpp"

namespace circbias {

using Complex = std::complex<double>;

/// Coefficients a_0..a_d; trailing exact zeros are stripped.
class DensePoly {
public:
    DensePoly() = default;
    explicit DensePoly(std::vector<Complex> coefficients) : c_(std::move(coefficients)) { normalize(); }
    DensePoly(std::initializer_list<Complex> coefficients) : c_(coefficients) { normalize(); }

    static DensePoly from_real(const std::vector<double>& coefficients) {
        return DensePoly(std::vector<Complex>(coefficients.begin(), coefficients.end()));
    }

    const std::vector<Complex>& coefficients() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }

    /// Degree; -1 for the zero polynomial.
    long degree() const noexcept { return static_cast<long>(c_.size()) - 1; }

    Complex operator[](std::size_t i) const { return i < c_.size() ? c_[i] : Complex{}; }

    bool is_real() const {
        return std::all_of(c_.begin(), c_.end(), [](const Complex& z) { return z.imag() == 0.0; });
    }

    Complex operator()(Complex x) const {
        Complex acc{};
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    friend DensePoly operator*(const DensePoly& a, const DensePoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Complex> out(a.c_.size() + b.c_.size() - 1);
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
        return DensePoly(std::move(out));
    }

private:
    void normalize() {
        while (!c_.empty() && c_.back() == Complex{}) c_.pop_back();
    }

    std::vector<Complex> c_;
};

struct RootOptions {
    double tol = 1e-10;       ///< required relative backward error per root
    std::size_t max_iters = 200;
    double zero_tol = 0.0;    ///< low coefficients with |a_i| <= zero_tol * max|a| count as zero
};

/// Non-zero roots plus the multiplicity of the root at the origin.
struct RootSet {
    std::vector<Complex> roots;
    std::size_t zero_multiplicity = 0;
    std::vector<double> residuals;  ///< |f(z)| / sum |a_i| |z|^i per root
};

namespace detail {

struct Evaluation {
    Complex newton;         ///< f / f'
    double backward_error;  ///< |f(z)| / sum |a_i||z|^i
};

/// f/f' and the relative residual at z, evaluated through the reversed polynomial when |z| > 1.
inline Evaluation evaluate(const std::vector<Complex>& a, Complex z) {
    const std::size_t n = a.size() - 1;
    Complex p{}, dp{};
    double scale = 0.0;
    if (std::abs(z) <= 1.0) {
        const double az = std::abs(z);
        for (std::size_t k = a.size(); k-- > 0;) {
            dp = dp * z + p;
            p = p * z + a[k];
            scale = scale * az + std::abs(a[k]);
        }
        return {p / dp, scale > 0 ? std::abs(p) / scale : 0.0};
    }
    // f(z) = z^n q(w), q(w) = sum a_{n-i} w^i, w = 1/z;  f/f' = z q / (n q - w q')
    const Complex w = 1.0 / z;
    const double aw = std::abs(w);
    for (std::size_t i = 0; i <= n; ++i) {
        dp = dp * w + p;
        p = p * w + a[i];
        scale = scale * aw + std::abs(a[i]);
    }
    const Complex denom = static_cast<double>(n) * p - w * dp;
    return {z * p / denom, scale > 0 ? std::abs(p) / scale : 0.0};
}

/// Initial approximations on circles given by the upper hull of (i, log|a_i|).
inline std::vector<Complex> newton_polygon_start(const std::vector<Complex>& a) {
    const std::size_t n = a.size() - 1;
    std::vector<std::size_t> idx;
    std::vector<double> logs(a.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i <= n; ++i) {
        if (a[i] == Complex{}) continue;
        logs[i] = std::log(std::abs(a[i]));
        // upper hull: drop the last point while it lies on or below the chord
        while (idx.size() >= 2) {
            const std::size_t p = idx[idx.size() - 2], q = idx.back();
            const double cross = (static_cast<double>(q) - static_cast<double>(p)) * (logs[i] - logs[p]) -
                                 (logs[q] - logs[p]) * (static_cast<double>(i) - static_cast<double>(p));
            if (cross >= 0) idx.pop_back();
            else break;
        }
        idx.push_back(i);
    }

    std::vector<Complex> z;
    z.reserve(n);
    const double offset = 0.7;
    for (std::size_t e = 0; e + 1 < idx.size(); ++e) {
        const std::size_t lo = idx[e], hi = idx[e + 1];
        const std::size_t count = hi - lo;
        const double radius = std::exp((logs[lo] - logs[hi]) / static_cast<double>(count));
        for (std::size_t k = 0; k < count; ++k) {
            const double angle = 2.0 * std::numbers::pi *
                                     (static_cast<double>(k) / static_cast<double>(count) +
                                      static_cast<double>(lo) / static_cast<double>(n)) +
                                 offset;
            z.push_back(std::polar(radius, angle));
        }
    }
    return z;
}

} // namespace detail

/**
 * All roots of f. The power of x dividing f is factored out exactly (or up
 * to opts.zero_tol); the rest are found by Aberth iteration. Throws
 * NumericalError with the best iterate if some root misses opts.tol.
 */
inline RootSet roots(const DensePoly& f, const RootOptions& opts = {}) {
    require(f.degree() >= 1, "roots: polynomial degree must be >= 1");
    const auto& all = f.coefficients();

    double max_abs = 0.0;
    for (const auto& c : all) max_abs = std::max(max_abs, std::abs(c));
    std::size_t shift = 0;
    while (shift < all.size() && std::abs(all[shift]) <= opts.zero_tol * max_abs) ++shift;

    RootSet out;
    out.zero_multiplicity = shift;
    const std::vector<Complex> a(all.begin() + static_cast<long>(shift), all.end());
    const std::size_t n = a.size() - 1;
    if (n == 0) return out;
    if (n == 1) {
        out.roots = {-a[0] / a[1]};
        out.residuals = {detail::evaluate(a, out.roots[0]).backward_error};
        return out;
    }

    std::vector<Complex> z = detail::newton_polygon_start(a);
    std::vector<bool> done(n, false);
    const double eps = std::numeric_limits<double>::epsilon();
    const double stop = std::max(4.0 * eps * static_cast<double>(n), std::min(opts.tol, 1e-3) * 1e-4);

    for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
        bool all_done = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (done[k]) continue;
            const auto ev = detail::evaluate(a, z[k]);
            if (ev.backward_error <= stop || !std::isfinite(std::abs(ev.newton))) {
                done[k] = ev.backward_error <= stop;
                if (!done[k]) all_done = false;
                continue;
            }
            Complex sum{};
            for (std::size_t j = 0; j < n; ++j)
                if (j != k) sum += 1.0 / (z[k] - z[j]);
            const Complex correction = ev.newton / (1.0 - ev.newton * sum);
            if (std::isfinite(correction.real()) && std::isfinite(correction.imag())) z[k] -= correction;
            if (std::abs(correction) <= eps * std::abs(z[k])) done[k] = true;
            else all_done = false;
        }
        if (all_done) break;
    }

    out.roots = std::move(z);
    out.residuals.resize(n);
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        out.residuals[k] = detail::evaluate(a, out.roots[k]).backward_error;
        if (!(out.residuals[k] <= opts.tol)) worst = std::max(worst, std::isfinite(out.residuals[k]) ? out.residuals[k] : 1.0);
    }
    if (worst > 0.0) {
        std::ostringstream diag;
        diag.precision(17);
        for (std::size_t k = 0; k < n; ++k)
            diag << "root " << out.roots[k].real() << (out.roots[k].imag() < 0 ? "" : "+") << out.roots[k].imag()
                 << "i residual " << out.residuals[k] << '\n';
        throw NumericalError("roots: no convergence after " + std::to_string(opts.max_iters) +
                                 " iterations (worst residual " + std::to_string(worst) + ")",
                             diag.str());
    }
    return out;
}

/// Normalized arguments phi / (2 pi) in [0,1) of the non-zero roots.
inline std::vector<double> root_turns(const RootSet& rs) {
    std::vector<double> turns;
    turns.reserve(rs.roots.size());
    for (const auto& z : rs.roots) turns.push_back(frac(std::arg(z) / (2.0 * std::numbers::pi)));
    return turns;
}

/**
 * Merge circle positions closer than tol (circularly) into one value.
 * Root angles carry float noise; a real negative triple root must read as
 * three points at exactly 1/2, not as three points 1e-16 apart.
 */
inline std::vector<double> merge_close_turns(std::vector<double> turns, double tol) {
    if (turns.size() < 2 || tol <= 0.0) return turns;
    std::sort(turns.begin(), turns.end());
    // start a cluster after the largest gap so wraparound clusters stay whole
    std::size_t start = 0;
    double largest = 1.0 - turns.back() + turns.front();
    for (std::size_t i = 1; i < turns.size(); ++i)
        if (turns[i] - turns[i - 1] > largest) { largest = turns[i] - turns[i - 1]; start = i; }
    if (largest <= tol) return std::vector<double>(turns.size(), turns.front());

    std::vector<double> out(turns.size());
    double anchor = turns[start];
    double prev = anchor;
    for (std::size_t step = 0; step < turns.size(); ++step) {
        const std::size_t i = (start + step) % turns.size();
        const double gap = frac(turns[i] - prev);
        if (step > 0 && gap > tol) anchor = turns[i];
        out[i] = anchor;
        prev = turns[i];
    }
    return out;
}

struct PolyBiasOptions {
    RootOptions root{};
    double angle_tol = 1e-9;
};

/// B(f): bias of the normalized arguments of the non-zero roots of f.
inline BiasReport<double> bias_of_poly(const DensePoly& f, const PolyBiasOptions& opts = {}) {
    require(f.degree() >= 1, "bias_of_poly: f has no non-zero roots");
    const RootSet rs = roots(f, opts.root);
    require(!rs.roots.empty(), "bias_of_poly: f has no non-zero roots");
    return exact_bias(PointConfiguration<double>(merge_close_turns(root_turns(rs), opts.angle_tol)));
}

/// Coefficientwise real part.
inline DensePoly re_part(const DensePoly& f) {
    std::vector<Complex> out;
    out.reserve(f.coefficients().size());
    for (const auto& c : f.coefficients()) out.emplace_back(c.real(), 0.0);
    return DensePoly(std::move(out));
}

/// Value of a real polynomial in extended precision (wide exponent range).
inline long double eval_real(const DensePoly& f, long double x) {
    long double acc = 0.0L;
    const auto& c = f.coefficients();
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + static_cast<long double>(it->real());
    return acc;
}

inline int sign_of(long double v) { return (v > 0) - (v < 0); }

struct RealRootCount {
    std::size_t count = 0;
    std::vector<double> roots;               ///< one representative per distinct real root, ascending
    std::vector<std::size_t> multiplicities;
};

/**
 * Distinct real roots of a real polynomial: numeric roots with
 * |Im| <= cluster_tol (1 + |Re|), merged at relative distance cluster_tol.
 * Cross-check: between consecutive clusters (and beyond both ends) the sign
 * of f is sampled at log-spaced points; it must flip exactly across the
 * clusters of odd multiplicity. Disagreement throws NumericalError.
 */
inline RealRootCount distinct_real_roots(const DensePoly& f, double cluster_tol = 1e-6, const RootOptions& opts = {}) {
    require(!f.is_zero(), "distinct_real_roots: zero polynomial");
    require(f.is_real(), "distinct_real_roots: polynomial has non-real coefficients");
    RealRootCount out;
    if (f.degree() == 0) return out;

    const RootSet rs = roots(f, opts);
    std::vector<double> candidates;
    for (const auto& z : rs.roots)
        if (std::abs(z.imag()) <= cluster_tol * (1.0 + std::abs(z.real()))) candidates.push_back(z.real());
    for (std::size_t k = 0; k < rs.zero_multiplicity; ++k) candidates.push_back(0.0);
    std::sort(candidates.begin(), candidates.end());

    for (double x : candidates) {
        if (!out.roots.empty()) {
            const double prev = out.roots.back();
            if (std::abs(x - prev) <= cluster_tol * std::max(std::abs(x), std::abs(prev))) {
                ++out.multiplicities.back();
                continue;
            }
        }
        out.roots.push_back(x);
        out.multiplicities.push_back(1);
    }
    out.count = out.roots.size();
    if (out.count == 0) return out;

    // Sample points strictly between clusters: geometric mean for same-sign
    // neighbours, zero or the arithmetic mean otherwise.
    auto between = [](double a, double b) {
        if (a > 0 && b > 0) return std::sqrt(a) * std::sqrt(b);
        if (a < 0 && b < 0) return -std::sqrt(-a) * std::sqrt(-b);
        return 0.5 * (a + b);
    };
    auto outside = [](double x, double dir) {
        if (x == 0.0) return dir;
        return (x * dir > 0) ? 2.0 * x : 0.5 * x;
    };
    std::vector<long double> samples;
    samples.push_back(outside(out.roots.front(), -1.0));
    for (std::size_t k = 0; k + 1 < out.count; ++k) samples.push_back(between(out.roots[k], out.roots[k + 1]));
    samples.push_back(outside(out.roots.back(), 1.0));

    for (std::size_t k = 0; k < out.count; ++k) {
        const int left = sign_of(eval_real(f, samples[k]));
        const int right = sign_of(eval_real(f, samples[k + 1]));
        const bool flips = left * right < 0;
        const bool odd = out.multiplicities[k] % 2 == 1;
        if (flips != odd || left == 0 || right == 0) {
            std::ostringstream diag;
            diag.precision(17);
            diag << "cluster at " << out.roots[k] << " multiplicity " << out.multiplicities[k] << " signs " << left
                 << ',' << right;
            throw NumericalError("distinct_real_roots: root clustering disagrees with sign changes", diag.str());
        }
    }
    return out;
}

} // namespace circbias
