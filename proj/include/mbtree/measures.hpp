#pragma once

// Densities of the alpha-gamma dislocation measure and related objects. Measures are
// represented only through densities (and an explicit atom for the alpha = 1 case).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "mbtree/numerics.hpp"
#include "mbtree/rng.hpp"

namespace mbtree {

namespace detail {

inline void check_point(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("size-biased point needs at least one coordinate");
    double s = 0;
    for (double v : x) {
        if (!(v > 0 && v < 1)) throw std::invalid_argument("size-biased coordinates must lie in (0,1)");
        s += v;
    }
    if (!(s < 1)) throw std::invalid_argument("size-biased coordinates must sum to less than 1");
}

}  // namespace detail

/// Joint density of the first k size-biased marginals of GEM*_{alpha,theta}:
///   C_k (1 - sum x)^{theta + k alpha} prod x_j^{-alpha} / prod_j (1 - x_1 - ... - x_j),
///   C_k = alpha Gamma(2+theta/alpha) / (Gamma(1-alpha) Gamma(theta+alpha+1) prod_{j=2}^k B(1-alpha, theta+j alpha)).
inline double gem_star_density(double alpha, double theta, std::span<const double> x) {
    if (!(alpha > 0 && alpha < 1 && theta > -2 * alpha))
        throw std::invalid_argument("gem_star_density: need 0 < alpha < 1 and theta > -2 alpha");
    detail::check_point(x);
    const std::size_t k = x.size();
    double c = alpha * std::tgamma(2 + theta / alpha) /
               (std::tgamma(1 - alpha) * std::tgamma(theta + alpha + 1));
    for (std::size_t j = 2; j <= k; ++j) c /= beta_fn(1 - alpha, theta + j * alpha);
    double rest = 1.0, logv = 0.0, denom = 1.0;
    for (double v : x) {
        logv += -alpha * std::log(v);
        rest -= v;
        denom *= rest;
    }
    return c * std::exp(logv + (theta + k * alpha) * std::log(rest)) / denom;
}

/// The bracket of the size-biased alpha-gamma marginal, in the form
///   gamma + (1-alpha-gamma)(1 - sum x^2 - (1-alpha)/(1+(k-1)alpha-gamma) (1 - sum x)^2).
inline double nu_sb_bracket(double alpha, double gamma, std::span<const double> x) {
    const double k = static_cast<double>(x.size());
    double sq = 0, s = 0;
    for (double v : x) {
        sq += v * v;
        s += v;
    }
    double r = 1 - s;
    return gamma + (1 - alpha - gamma) * (1 - sq - (1 - alpha) / (1 + (k - 1) * alpha - gamma) * r * r);
}

/// k = 1 bracket rewritten with 1 - x^2 = 2x(1-x) + (1-x)^2.
inline double nu_sb_bracket_k1_alt(double alpha, double gamma, double x) {
    return gamma + (1 - alpha - gamma) * (2 * x * (1 - x) + (alpha - gamma) / (1 - gamma) * (1 - x) * (1 - x));
}

/// Density of the first k size-biased marginals of nu_{alpha,gamma}, 0 <= gamma < alpha.
inline double nu_sb_density(double alpha, double gamma, std::span<const double> x) {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("nu_sb_density: 0 < alpha < 1");
    if (gamma == alpha)
        throw std::domain_error("nu_sb_density: gamma = alpha has two fragments; use binary_density");
    if (!(gamma >= 0 && gamma < alpha)) throw std::invalid_argument("nu_sb_density: 0 <= gamma < alpha");
    return nu_sb_bracket(alpha, gamma, x) * gem_star_density(alpha, -alpha - gamma, x);
}

inline double nu_sb_density(double alpha, double gamma, double x) {
    return nu_sb_density(alpha, gamma, std::span<const double>(&x, 1));
}

/// Ranked two-fragment density of nu_{alpha,alpha} on x = s_1 in (1/2, 1).
inline double binary_density(double alpha, double gamma, double x) {
    if (gamma != alpha) throw std::invalid_argument("binary_density: only for gamma = alpha");
    if (!(x > 0.5 && x < 1)) throw std::invalid_argument("binary_density: x in (1/2, 1)");
    return (gamma + (1 - alpha - gamma) * 2 * x * (1 - x)) * std::pow(x, -alpha - 1) *
           std::pow(1 - x, -alpha - 1);
}

/// nu_{1,gamma}: continuous part gamma (1-s)^{-1-gamma} on (0,1) plus a unit atom at s_1 = 0.
struct Alpha1Measure {
    double density;
    double atom_at_zero = 1.0;
};

inline Alpha1Measure alpha1_density(double gamma, double s1) {
    if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("alpha1_density: gamma in (0,1)");
    if (!(s1 >= 0 && s1 < 1)) throw std::invalid_argument("alpha1_density: s1 in [0,1)");
    return {gamma * std::pow(1 - s1, -1 - gamma), 1.0};
}

/// Levy density of the tagged-fragment subordinator -log|block|, 0 < gamma < alpha < 1.
inline double levy_density(double alpha, double gamma, double x) {
    if (!(x > 0)) throw std::invalid_argument("levy_density: x > 0");
    if (!(alpha > 0 && alpha < 1 && gamma > 0 && gamma < alpha))
        throw std::invalid_argument("levy_density: 0 < gamma < alpha < 1");
    const double u = std::exp(-x);
    const double v = -std::expm1(-x);  // 1 - e^{-x} without cancellation
    const double c = alpha * std::tgamma(1 - gamma / alpha) / (std::tgamma(1 - alpha) * std::tgamma(1 - gamma));
    return c * std::pow(v, -1 - gamma) * std::pow(u, 1 - alpha) *
           (gamma + (1 - alpha - gamma) * (2 * u * v + (alpha - gamma) / (1 - gamma) * v * v));
}

/// Lambda([x, inf)) = int_0^{e^{-x}} g(u) du with g the first size-biased marginal.
/// The integral is split at 1/2; u^{-alpha} near 0 is removed by u = w^{1/(1-alpha)}
/// and (1-u)^{-1-gamma} near 1 by integrating in log(1-u).
inline double levy_tail(double alpha, double gamma, double x) {
    if (!(x > 0)) throw std::invalid_argument("levy_tail: x > 0");
    if (!(alpha > 0 && alpha < 1 && gamma > 0 && gamma < alpha))
        throw std::invalid_argument("levy_tail: 0 < gamma < alpha < 1");
    const double theta = -alpha - gamma;
    const double c1 = alpha * std::tgamma(2 + theta / alpha) /
                      (std::tgamma(1 - alpha) * std::tgamma(theta + alpha + 1));
    // g(u) u^alpha, finite at u = 0
    auto g_reg = [&](double u, double v) {
        return (gamma + (1 - alpha - gamma) * (2 * u * v + (alpha - gamma) / (1 - gamma) * v * v)) * c1 *
               std::pow(v, theta + alpha - 1);
    };
    auto low_part = [&](double hi) {
        const double e = 1.0 / (1.0 - alpha);
        // du = e w^{e-1} dw and u^{-alpha} = w^{1-e}, so the integrand is e g_reg(u).
        return adaptive_simpson([&](double w) { double u = std::pow(w, e);
                                    return e * g_reg(u, 1 - u); }, 0.0,
                                std::pow(hi, 1.0 - alpha), 1e-13, 30);
    };
    const double top = std::exp(-x);
    if (top <= 0.5) return low_part(top);
    const double vlo = -std::expm1(-x);  // 1 - e^{-x}
    double high = adaptive_simpson(
        [&](double s) {
            double v = std::exp(s);
            double u = 1 - v;
            return g_reg(u, v) * std::pow(u, -alpha) * v;
        },
        std::log(vlo), std::log(0.5), 1e-13, 30);
    return low_part(0.5) + high;
}

/// First size-biased marginal of nu_{alpha,gamma} at x, given also xc = 1 - x to full precision.
inline double nu_sb_density_k1(double alpha, double gamma, double x, double xc) {
    if (!(alpha > 0 && alpha < 1 && gamma >= 0 && gamma < alpha))
        throw std::invalid_argument("nu_sb_density_k1: 0 <= gamma < alpha < 1");
    const double theta = -alpha - gamma;
    const double c1 = alpha * std::tgamma(2 + theta / alpha) /
                      (std::tgamma(1 - alpha) * std::tgamma(theta + alpha + 1));
    const double bracket = gamma + (1 - alpha - gamma) * (2 * x * xc + (alpha - gamma) / (1 - gamma) * xc * xc);
    return bracket * c1 * std::pow(x, -alpha) * std::pow(xc, theta + alpha - 1);
}

/// int (1 - x^{n-1}) nu_1^sb(dx), the normaliser of the integral representation for nu_{alpha,gamma}.
inline double nu_normaliser(double alpha, double gamma, int n) {
    if (n < 2) throw std::invalid_argument("nu_normaliser: n >= 2");
    return trapezoid_unit_interval([&](double x, double xc) {
        double one_minus_pow = -std::expm1((n - 1) * std::log1p(-xc));
        return one_minus_pow * nu_sb_density_k1(alpha, gamma, x, xc);
    });
}

struct McEstimate {
    double value;
    double stderr_;
};

/// Monte-Carlo value of
///   (1/Z) int x_1^{n_1-1} ... x_k^{n_k-1} prod_{j<k}(1 - x_1 - ... - x_j) nu_k^sb(dx)
/// by importance sampling in stick coordinates x_j = w_j (1-w_1)...(1-w_{j-1}) with
/// w_j ~ beta(n_j - alpha, b_j), b_j = sum_{i>j}(n_i - alpha) + theta + k alpha, theta = -alpha-gamma.
/// Under this proposal the weight is proportional to the bracket of nu_k^sb alone.
inline McEstimate eppf_from_measure(double alpha, double gamma, const std::vector<int>& parts, int samples,
                                    RngStream& rng) {
    const int k = static_cast<int>(parts.size());
    if (k < 2) throw std::invalid_argument("eppf_from_measure: at least two blocks");
    const double theta = -alpha - gamma;
    std::vector<double> a(k), b(k), log_b(k);
    for (int j = 0; j < k; ++j) {
        a[j] = parts[j] - alpha;
        double s = theta + k * alpha;
        for (int i = j + 1; i < k; ++i) s += parts[i] - alpha;
        b[j] = s;
        log_b[j] = log_beta_fn(a[j], b[j]);
    }
    const int n = std::accumulate(parts.begin(), parts.end(), 0);
    const double z = nu_normaliser(alpha, gamma, n);
    double log_ck = std::log(alpha) + std::lgamma(2 + theta / alpha) - std::lgamma(1 - alpha) -
                    std::lgamma(theta + alpha + 1);
    for (int j = 2; j <= k; ++j) log_ck -= log_beta_fn(1 - alpha, theta + j * alpha);
    MomentAccumulator acc;
    std::vector<double> x(k), ws(k);
    for (int s = 0; s < samples; ++s) {
        double rest = 1.0, logw = 0.0;
        for (int j = 0; j < k; ++j) {
            double w = rng.beta(a[j], b[j]);
            w = std::clamp(w, 1e-300, 1 - 1e-16);
            ws[j] = w;
            x[j] = w * rest;
            logw += (parts[j] - 1) * std::log(x[j]) + std::log(rest);  // integrand power and Jacobian
            if (j < k - 1) logw += std::log(rest * (1 - w));           // prod_{j<k} R_j
            logw -= (a[j] - 1) * std::log(w) + (b[j] - 1) * std::log1p(-w) - log_b[j];
            rest *= 1 - w;
        }
        // nu_k^sb at x, with the remainders kept from the stick products rather than 1 - sum x
        double sq = 0, log_dens = log_ck + (theta + k * alpha) * std::log(rest);
        for (int j = 0; j < k; ++j) {
            sq += x[j] * x[j];
            log_dens -= alpha * std::log(x[j]);
        }
        double rj = 1.0;
        for (int j = 0; j < k; ++j) {
            rj *= 1 - ws[j];
            log_dens -= std::log(rj);
        }
        double bracket = gamma + (1 - alpha - gamma) *
                                     (1 - sq - (1 - alpha) / (1 + (k - 1) * alpha - gamma) * rest * rest);
        acc.add(std::exp(logw + log_dens) * bracket);
    }
    return {acc.mean() / z, acc.stderr_mean() / z};
}

}  // namespace mbtree
