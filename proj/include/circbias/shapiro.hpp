#pragma once

/**
 * @file shapiro.hpp
 * @brief Generalized Shapiro polynomials, Hadamard powers and unit-circle norms.
 *
 * For a prime p and xi = e^{2 pi i / p}, the family Q_{0,r}..Q_{p-1,r} starts
 * from Q_{i,0} = 1 and is advanced by multiplying the vector
 * (Q_0, x^{p^r} Q_1, ..., x^{(p-1) p^r} Q_{p-1}) with the p x p DFT matrix
 * D_{jk} = xi^{jk}. Every coefficient is a power of xi, so the family is
 * stored exactly as exponents modulo p and converted to complex values on
 * demand; no rounding accumulates across levels.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "circbias/errors.hpp"
#include "circbias/rational.hpp"
#include "circbias/runners.hpp"
#include "circbias/unipoly.hpp"

namespace circbias::shapiro {

inline bool is_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

/// e^{2 pi i k / p}, exact at multiples of a quarter turn.
inline Complex unit_root(long k, long p) {
    k %= p;
    if (k < 0) k += p;
    if (k == 0) return {1.0, 0.0};
    if (2 * k == p) return {-1.0, 0.0};
    if (4 * k == p) return {0.0, 1.0};
    if (4 * k == 3 * p) return {0.0, -1.0};
    return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(p));
}

/// Dense polynomial whose coefficients all have modulus one.
struct UnimodularPoly {
    DensePoly poly;

    static UnimodularPoly checked(DensePoly f, double tol = 1e-9) {
        for (const auto& c : f.coefficients())
            require(std::abs(std::abs(c) - 1.0) <= tol, "coefficient of modulus " + std::to_string(std::abs(c)) +
                                                            " is not unimodular");
        return {std::move(f)};
    }
};

struct ShapiroFamily {
    long p = 2;
    int r = 0;
    Complex xi{1.0, 0.0};
    /// phases[i][j]: coefficient j of Q_i equals xi^{phases[i][j]}
    std::vector<std::vector<long>> phases;

    std::size_t length() const { return phases.empty() ? 0 : phases.front().size(); }

    /// Q_i, or its Hadamard power Q_i^{(k)} (phase exponents scaled by k).
    DensePoly poly(std::size_t i, long k = 1) const {
        std::vector<Complex> c;
        c.reserve(length());
        for (long e : phases.at(i)) c.push_back(unit_root((e * (k % p)) % p, p));
        return DensePoly(std::move(c));
    }
};

inline constexpr std::size_t max_family_length = std::size_t{1} << 20;

inline ShapiroFamily shapiro_family(long p, int r) {
    require(is_prime(p), "shapiro_family: p = " + std::to_string(p) + " is not prime");
    require(r >= 0, "shapiro_family: r must be >= 0");
    std::size_t length = 1;
    for (int level = 0; level < r; ++level) {
        length *= static_cast<std::size_t>(p);
        require(length <= max_family_length, "shapiro_family: p^r exceeds 2^20 coefficients");
    }

    ShapiroFamily fam;
    fam.p = p;
    fam.r = r;
    fam.xi = unit_root(1, p);
    fam.phases.assign(static_cast<std::size_t>(p), std::vector<long>{0});
    for (int level = 0; level < r; ++level) {
        const std::size_t block = fam.phases.front().size();
        std::vector<std::vector<long>> next(static_cast<std::size_t>(p), std::vector<long>(block * static_cast<std::size_t>(p)));
        for (long j = 0; j < p; ++j)
            for (long k = 0; k < p; ++k)
                for (std::size_t l = 0; l < block; ++l)
                    next[static_cast<std::size_t>(j)][static_cast<std::size_t>(k) * block + l] =
                        (j * k + fam.phases[static_cast<std::size_t>(k)][l]) % p;
        fam.phases = std::move(next);
    }
    return fam;
}

/// f^{(k)}(x) = sum a_i^k x^i.
inline DensePoly hadamard_power(const DensePoly& f, long k) {
    require(k >= 1, "hadamard_power: k must be >= 1");
    std::vector<Complex> out;
    out.reserve(f.coefficients().size());
    for (Complex base : f.coefficients()) {
        Complex acc{1.0, 0.0};
        for (long e = k; e > 0; e >>= 1) {
            if (e & 1) acc *= base;
            base *= base;
        }
        out.push_back(acc);
    }
    return DensePoly(std::move(out));
}

namespace detail {

/// In-place radix-2 FFT computing sum_j a_j e^{+2 pi i jk / N} (evaluation at the N-th roots of unity).
inline void fft_eval(std::vector<Complex>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = 2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Complex w = std::polar(1.0, angle * static_cast<double>(k));
                const Complex u = a[i + k], v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

inline double modulus_at(const DensePoly& f, double theta) { return std::abs(f(std::polar(1.0, theta))); }

} // namespace detail

/**
 * Lower estimate of max_{|x|=1} |f(x)|: FFT samples at no fewer than
 * oversample * (deg + 1) points, then golden-section refinement around the
 * best few samples. The true maximum can only be larger.
 */
inline double sup_norm(const DensePoly& f, std::size_t oversample = 16) {
    require(oversample >= 4, "sup_norm: oversample must be >= 4");
    if (f.is_zero()) return 0.0;
    const std::size_t terms = static_cast<std::size_t>(f.degree() + 1);
    std::size_t n = 1;
    while (n < oversample * terms) n <<= 1;

    std::vector<Complex> samples(n);
    std::copy(f.coefficients().begin(), f.coefficients().end(), samples.begin());
    detail::fft_eval(samples);

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    const std::size_t keep = std::min<std::size_t>(8, n);
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(keep), order.end(),
                      [&](std::size_t a, std::size_t b) { return std::abs(samples[a]) > std::abs(samples[b]); });

    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    double best = std::abs(samples[order[0]]);
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t c = 0; c < keep; ++c) {
        const double center = step * static_cast<double>(order[c]);
        double lo = center - step, hi = center + step;
        double x1 = hi - golden * (hi - lo), x2 = lo + golden * (hi - lo);
        double f1 = detail::modulus_at(f, x1), f2 = detail::modulus_at(f, x2);
        for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + golden * (hi - lo);
                f2 = detail::modulus_at(f, x2);
            } else {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - golden * (hi - lo);
                f1 = detail::modulus_at(f, x1);
            }
        }
        best = std::max({best, f1, f2, detail::modulus_at(f, center)});
    }
    return best;
}

/// max over `samples` equispaced |x| = 1 of | sum_i |Q_i(x)|^2 - p^{r+1} |.
inline double parseval_check(const ShapiroFamily& fam, std::size_t samples) {
    require(samples >= 1, "parseval_check: samples must be >= 1");
    double target = 1.0;
    for (int i = 0; i <= fam.r; ++i) target *= static_cast<double>(fam.p);
    std::vector<DensePoly> polys;
    for (std::size_t i = 0; i < static_cast<std::size_t>(fam.p); ++i) polys.push_back(fam.poly(i));

    double worst = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Complex x = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(samples));
        double sum = 0.0;
        for (const auto& q : polys) sum += std::norm(q(x));
        worst = std::max(worst, std::abs(sum - target));
    }
    return worst;
}

struct NormEntry {
    std::size_t i = 0;
    long k = 1;
    double sup_norm = 0.0;
    double bound = 0.0;
    bool excluded = false;  ///< p divides k: outside the flatness hypothesis
    bool pass = true;
};

struct FlatnessReport {
    long p = 0;
    int r = 0;
    double bound = 0.0;  ///< p^{(r+1)/2}
    std::vector<NormEntry> entries;
    std::size_t violations = 0;
};

/**
 * Sampled sup-norms of every Hadamard power Q_i^{(k)}, k <= p^r, against
 * p^{(r+1)/2} (1 + 1e-9). Powers with p | k are listed only when
 * include_excluded is set and are never counted as violations.
 */
inline FlatnessReport flatness_check(const ShapiroFamily& fam, std::size_t oversample = 16, bool include_excluded = false) {
    FlatnessReport report;
    report.p = fam.p;
    report.r = fam.r;
    report.bound = std::pow(static_cast<double>(fam.p), (fam.r + 1) / 2.0);
    const long kmax = static_cast<long>(fam.length());
    for (std::size_t i = 0; i < static_cast<std::size_t>(fam.p); ++i) {
        for (long k = 1; k <= kmax; ++k) {
            const bool excluded = k % fam.p == 0;
            if (excluded && !include_excluded) continue;
            NormEntry e;
            e.i = i;
            e.k = k;
            e.excluded = excluded;
            e.bound = report.bound;
            e.sup_norm = sup_norm(fam.poly(i, k), oversample);
            e.pass = excluded || e.sup_norm <= report.bound * (1.0 + 1e-9);
            if (!e.pass) ++report.violations;
            report.entries.push_back(e);
        }
    }
    return report;
}

/// Starts s_j = arg(a_j) / 2 pi in [0,1), speeds 0..deg.
inline runners::RunnerSystem<double> runner_config_from_poly(const UnimodularPoly& f) {
    UnimodularPoly::checked(f.poly);
    runners::RunnerSystem<double> sys;
    const auto& c = f.poly.coefficients();
    for (std::size_t j = 0; j < c.size(); ++j) {
        sys.starts.push_back(frac(std::arg(c[j]) / (2.0 * std::numbers::pi)));
        sys.speeds.push_back(static_cast<double>(j));
    }
    return sys;
}

/// Exact variant for a family member: starts are phase / p.
inline runners::RunnerSystem<Rational> runner_system_from_family(const ShapiroFamily& fam, std::size_t i = 0) {
    runners::RunnerSystem<Rational> sys;
    const auto& ph = fam.phases.at(i);
    for (std::size_t j = 0; j < ph.size(); ++j) {
        sys.starts.emplace_back(ph[j], fam.p);
        sys.speeds.emplace_back(static_cast<long>(j));
    }
    return sys;
}

/// c (1 + sum_{k=1}^{K} |f^{(k)}|_m / k) with sampled norms.
inline double erdos_turan_bound(const DensePoly& f, long K, double c = 1.0, std::size_t oversample = 16) {
    require(K >= 1, "erdos_turan_bound: K must be >= 1");
    require(c > 0.0, "erdos_turan_bound: c must be > 0");
    double sum = 1.0;
    for (long k = 1; k <= K; ++k) sum += sup_norm(hadamard_power(f, k), oversample) / static_cast<double>(k);
    return c * sum;
}

/**
 * Deterministic ceiling for erdos_turan_bound on Q_{0,r}: terms with p not
 * dividing k are at most p^{(r+1)/2} / k, the others at most p^r / k.
 */
inline double flat_split_bound(long p, int r, long K, double c = 1.0) {
    const double flat = std::pow(static_cast<double>(p), (r + 1) / 2.0);
    const double trivial = std::pow(static_cast<double>(p), r);
    double sum = 1.0;
    for (long k = 1; k <= K; ++k) sum += (k % p == 0 ? trivial : flat) / static_cast<double>(k);
    return c * sum;
}

} // namespace circbias::shapiro
