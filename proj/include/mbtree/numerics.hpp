#pragma once

// Scalar fields, rising products, special functions and the goodness-of-fit
// utilities shared by every other header.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace mbtree {

/// Exact rational scalar. Probabilities built from it are exact.
using Rational = boost::multiprecision::cpp_rational;

template <class T>
inline constexpr bool is_exact_v = !std::is_floating_point_v<T>;

template <class T>
concept ScalarField = std::is_same_v<T, double> || std::is_same_v<T, Rational>;

template <class T>
double to_double(const T& v) {
    if constexpr (std::is_floating_point_v<T>) {
        return static_cast<double>(v);
    } else {
        return v.template convert_to<double>();
    }
}

inline Rational make_rational(long long num, long long den = 1) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    return Rational(num) / Rational(den);
}

/// "num/den", always with an explicit denominator ("0/1", "3/1").
inline std::string format_rational(const Rational& r) {
    return boost::multiprecision::numerator(r).str() + "/" +
           boost::multiprecision::denominator(r).str();
}

/// Parses "p/q" or an integer literal into an exact rational.
inline Rational parse_rational(std::string_view text) {
    auto slash = text.find('/');
    auto parse_int = [](std::string_view s) {
        if (s.empty()) throw std::invalid_argument("empty integer in rational");
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) throw std::invalid_argument("malformed integer in rational");
        for (std::size_t j = i; j < s.size(); ++j)
            if (s[j] < '0' || s[j] > '9')
                throw std::invalid_argument("malformed integer '" + std::string(s) + "'");
        return boost::multiprecision::cpp_int(std::string(s));
    };
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    auto num = parse_int(text.substr(0, slash));
    auto den = parse_int(text.substr(slash + 1));
    if (den == 0) throw std::domain_error("rational with zero denominator");
    return Rational(num, den);
}

/// a (a+1) ... (a+m-1); empty product for m = 0.
template <ScalarField T>
T pochhammer(const T& a, int m) {
    T out(1);
    for (int j = 0; j < m; ++j) out *= a + T(j);
    return out;
}

/// log|(a)_m| with the sign of the product returned through `sign`.
inline double log_abs_pochhammer(double a, int m, int* sign) {
    double acc = 0.0;
    int s = 1;
    for (int j = 0; j < m; ++j) {
        double f = a + j;
        if (f == 0.0) {
            if (sign) *sign = 0;
            return -std::numeric_limits<double>::infinity();
        }
        if (f < 0) s = -s;
        acc += std::log(std::fabs(f));
    }
    if (sign) *sign = s;
    return acc;
}

/// Gamma_x(n) = Gamma(n-x)/Gamma(1-x) = prod_{j=1}^{n-1} (j - x).
template <ScalarField T>
T rising_product(const T& x, int n) {
    if (n < 1) throw std::invalid_argument("rising_product requires n >= 1");
    if constexpr (std::is_floating_point_v<T>) {
        if (n - 1 > 50) {
            int sign = 0;
            double l = log_abs_pochhammer(1.0 - x, n - 1, &sign);
            return sign == 0 ? 0.0 : sign * std::exp(l);
        }
    }
    return pochhammer(T(1) - x, n - 1);
}

inline double log_rising_product(double x, int n, int* sign) {
    if (n < 1) throw std::invalid_argument("rising_product requires n >= 1");
    return log_abs_pochhammer(1.0 - x, n - 1, sign);
}

template <ScalarField T>
T binomial(int n, int m) {
    if (m < 0 || m > n) return T(0);
    m = std::min(m, n - m);
    T out(1);
    for (int j = 1; j <= m; ++j) {
        out *= T(n - m + j);
        out /= T(j);
    }
    return out;
}

inline double log_binomial(int n, int m) {
    return std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
}

template <ScalarField T>
T factorial(int n) {
    T out(1);
    for (int j = 2; j <= n; ++j) out *= T(j);
    return out;
}

inline double log_gamma(double x) {
    if (!(x > 0)) throw std::domain_error("log_gamma requires a positive argument");
    return std::lgamma(x);
}

inline double log_beta_fn(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

inline double beta_fn(double a, double b) { return std::exp(log_beta_fn(a, b)); }

struct BetaParams {
    double a = 1.0;
    double b = 1.0;  // b == 0 is the point mass at 1

    BetaParams() = default;
    BetaParams(double a_, double b_) : a(a_), b(b_) {
        if (!(a > 0) || !(b >= 0)) throw std::invalid_argument("beta parameters need a > 0, b >= 0");
    }
    bool degenerate() const { return b == 0.0; }
    double mean() const { return a / (a + b); }
};

struct DirichletParams {
    std::vector<double> weights;

    DirichletParams() = default;
    explicit DirichletParams(std::vector<double> w) : weights(std::move(w)) {
        if (weights.empty()) throw std::invalid_argument("dirichlet needs at least one weight");
        for (double v : weights)
            if (!(v > 0)) throw std::invalid_argument("dirichlet weights must be positive");
    }
    double total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
    /// i-th marginal of a Dirichlet vector is beta(a_i, sum - a_i).
    BetaParams marginal(std::size_t i) const { return {weights.at(i), total() - weights.at(i)}; }
};

/// Beta density; `xc` is 1 - x, passed separately so that mass near 1 stays resolvable.
inline double beta_pdf(const BetaParams& p, double x, double xc) {
    if (p.degenerate()) throw std::domain_error("beta_pdf: b = 0 is a point mass at 1");
    if (!(x > 0) || !(xc > 0)) throw std::domain_error("beta_pdf: x outside (0,1)");
    return std::exp((p.a - 1) * std::log(x) + (p.b - 1) * std::log(xc) - log_beta_fn(p.a, p.b));
}

inline double beta_pdf(const BetaParams& p, double x) { return beta_pdf(p, x, 1.0 - x); }

inline double beta_cdf(const BetaParams& p, double x) {
    if (p.degenerate()) return x >= 1.0 ? 1.0 : 0.0;
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    return boost::math::ibeta(p.a, p.b, x);
}

/// Density of the first m-1 coordinates on the open simplex; `x` holds all m coordinates
/// or only the first m-1 (the last is then 1 - sum).
inline double dirichlet_pdf(const DirichletParams& p, std::span<const double> x) {
    const std::size_t m = p.weights.size();
    if (x.size() != m && x.size() + 1 != m)
        throw std::invalid_argument("dirichlet_pdf: dimension mismatch");
    double sum = 0.0, logdens = 0.0, lognorm = 0.0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        if (!(x[i] > 0)) throw std::domain_error("dirichlet_pdf: point outside the open simplex");
        sum += x[i];
        logdens += (p.weights[i] - 1) * std::log(x[i]);
    }
    double last = x.size() == m ? x[m - 1] : 1.0 - sum;
    if (!(last > 0)) throw std::domain_error("dirichlet_pdf: point outside the open simplex");
    logdens += (p.weights[m - 1] - 1) * std::log(last);
    for (double a : p.weights) lognorm += log_gamma(a);
    lognorm -= log_gamma(p.total());
    return std::exp(logdens - lognorm);
}

// ---------------------------------------------------------------------------
// Goodness of fit

/// P(K > lambda) for the Kolmogorov distribution. Series terms below 1e-12 are dropped.
inline double kolmogorov_survival(double lambda) {
    if (lambda <= 0) return 1.0;
    constexpr double eps = 1e-12;
    if (lambda < 1.0) {
        // Jacobi-transformed series converges fast for small lambda.
        const double pi2 = std::numbers::pi * std::numbers::pi;
        double sum = 0.0;
        for (int k = 1; k < 1000; ++k) {
            double term = std::exp(-(2.0 * k - 1) * (2.0 * k - 1) * pi2 / (8.0 * lambda * lambda));
            sum += term;
            if (term < eps) break;
        }
        double cdf = std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
        return std::clamp(1.0 - cdf, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k < 1000; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < eps) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test; `sample` must be sorted ascending.
inline KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_test: empty sample");
    const double m = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max({d, (i + 1) / m - f, f - i / m});
    }
    return {d, kolmogorov_survival(std::sqrt(m) * d)};
}

/// Two-sample Kolmogorov-Smirnov test; both samples sorted ascending.
inline KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    double en = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_survival(en * d)};
}

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

/// Pearson chi-square test of homogeneity for a 2 x m table of counts. Columns with
/// zero total are dropped.
inline ChiSquareResult chi_square_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("chi_square_two_sample: size mismatch");
    double na = std::accumulate(a.begin(), a.end(), 0.0);
    double nb = std::accumulate(b.begin(), b.end(), 0.0);
    double stat = 0.0;
    int cols = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double tot = a[i] + b[i];
        if (tot == 0) continue;
        ++cols;
        double ea = tot * na / (na + nb), eb = tot * nb / (na + nb);
        stat += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    }
    ChiSquareResult r;
    r.statistic = stat;
    r.dof = cols - 1;
    if (r.dof >= 1) {
        boost::math::chi_squared dist(r.dof);
        r.p_value = boost::math::cdf(boost::math::complement(dist, stat));
    }
    return r;
}

/// Running mean/variance by Welford updates; merge() combines two accumulators with the
/// pairwise (Chan) formula.
class MomentAccumulator {
public:
    void add(double x) {
        ++n_;
        double d = x - mean_;
        mean_ += d / n_;
        m2_ += d * (x - mean_);
    }
    void merge(const MomentAccumulator& o) {
        if (o.n_ == 0) return;
        std::size_t n = n_ + o.n_;
        double d = o.mean_ - mean_;
        mean_ += d * o.n_ / n;
        m2_ += o.m2_ + d * d * (double(n_) * o.n_ / n);
        n_ = n;
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ < 2 ? 0.0 : m2_ / (n_ - 1); }
    double stderr_mean() const { return n_ ? std::sqrt(variance() / n_) : 0.0; }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0, m2_ = 0.0;
};

// ---------------------------------------------------------------------------
// Quadrature

/// Adaptive Simpson on [a,b] to absolute tolerance `tol`.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-8, int max_depth = 50) {
    struct Rec {
        const std::function<double(double)>& f;
        double go(double a, double b, double fa, double fm, double fb, double whole, double tol,
                  int depth) const {
            double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
            double flm = f(lm), frm = f(rm);
            double left = (m - a) / 6 * (fa + 4 * flm + fm);
            double right = (b - m) / 6 * (fm + 4 * frm + fb);
            double diff = left + right - whole;
            if (depth <= 0 || std::fabs(diff) <= 15 * tol) return left + right + diff / 15;
            return go(a, m, fa, flm, fm, left, tol / 2, depth - 1) +
                   go(m, b, fm, frm, fb, right, tol / 2, depth - 1);
        }
    } rec{f};
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    return rec.go(a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Trapezoidal rule after the double-exponential map x = (1 + tanh(pi/2 sinh t))/2 of (0,1).
/// The integrand receives (x, 1 - x) so both endpoints keep full relative precision, which
/// makes integrable endpoint singularities harmless.
inline double trapezoid_unit_interval(const std::function<double(double, double)>& f,
                                      int points = 10000, double t_max = 5.0) {
    const double h = 2.0 * t_max / (points - 1);
    const double half_pi = 0.5 * std::numbers::pi;
    double sum = 0.0;
    for (int i = 0; i < points; ++i) {
        double t = -t_max + i * h;
        double s = half_pi * std::sinh(t);
        // x = 1/(1+e^{-2s}), 1-x = 1/(1+e^{2s})
        double x = 1.0 / (1.0 + std::exp(-2.0 * s));
        double xc = 1.0 / (1.0 + std::exp(2.0 * s));
        if (!(x > 0) || !(xc > 0)) continue;
        double w = half_pi * std::cosh(t) * x * xc * 2.0;  // dx/dt
        double fx = f(x, xc);
        double wt = (i == 0 || i == points - 1) ? 0.5 : 1.0;
        sum += wt * w * fx;
    }
    return sum * h;
}

}  // namespace mbtree
