#pragma once

// Chinese restaurant processes (plain and ordered), regenerative compositions, GEM sticks
// and one-sided stable / Mittag-Leffler variates.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mbtree/laws.hpp"
#include "mbtree/numerics.hpp"
#include "mbtree/rng.hpp"

namespace mbtree {

struct CrpState {
    double alpha = 0.0;
    double theta = 1.0;
    std::vector<int> sizes;  // in order of creation

    CrpState(double a, double th) : alpha(a), theta(th) {
        bool ok = (a >= 0 && a <= 1 && th > -a) || (a < 0 && th > 0);
        if (!ok) throw std::invalid_argument("crp: need 0 <= alpha <= 1 and theta > -alpha");
    }
    int customers() const { return std::accumulate(sizes.begin(), sizes.end(), 0); }
    int tables() const { return static_cast<int>(sizes.size()); }
};

/// Seats one customer: table j with weight n_j - alpha, a new table with theta + k alpha.
/// Returns the table index used (== old table count for a new table).
inline int crp_seat(CrpState& s, RngStream& rng) {
    if (s.sizes.empty()) {
        s.sizes.push_back(1);
        return 0;
    }
    std::vector<double> w;
    w.reserve(s.sizes.size() + 1);
    for (int x : s.sizes) w.push_back(x - s.alpha);
    w.push_back(s.theta + s.tables() * s.alpha);
    int j = static_cast<int>(rng.discrete(w));
    if (j == s.tables())
        s.sizes.push_back(1);
    else
        ++s.sizes[j];
    return j;
}

inline CrpState crp_step(CrpState s, RngStream& rng) {
    crp_seat(s, rng);
    return s;
}

/// Number of tables after n customers. Only the new-table event matters, so this runs in
/// O(n) regardless of the table count.
inline int crp_table_count(double alpha, double theta, int n, RngStream& rng) {
    CrpState check(alpha, theta);
    (void)check;
    if (n < 1) return 0;
    int k = 1;
    for (int m = 1; m < n; ++m)
        if (rng.uniform() * (m + theta) < theta + k * alpha) ++k;
    return k;
}

struct OrderedCrpState {
    CrpState crp;
    std::vector<int> order;  // table indices left to right

    OrderedCrpState(double a, double th) : crp(a, th) {
        if (!(a > 0 && a < 1 && th >= 0)) throw std::invalid_argument("ordered crp: need 0 < alpha < 1, theta >= 0");
    }

    /// Table sizes read left to right.
    std::vector<int> composition() const {
        std::vector<int> out;
        for (int j : order) out.push_back(crp.sizes[j]);
        return out;
    }
};

/// Seats as the plain CRP; a new table goes to the far right with weight theta, or into
/// one of the k slots left of an existing table with weight alpha each.
inline OrderedCrpState ordered_crp_step(OrderedCrpState s, RngStream& rng) {
    int k = s.crp.tables();
    int j = crp_seat(s.crp, rng);
    if (j < k) return s;
    if (k == 0) {
        s.order.push_back(j);
        return s;
    }
    std::vector<double> w(k, s.crp.alpha);  // slot i: immediately left of order[i]
    w.push_back(s.crp.theta);
    std::size_t slot = rng.discrete(w);
    s.order.insert(s.order.begin() + static_cast<std::ptrdiff_t>(slot), j);
    return s;
}

/// Composition of n drawn part by part from the decrement matrix.
template <ScalarField T>
std::vector<int> regenerative_composition(const DecrementMatrix<T>& dec, int n, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("regenerative_composition: n >= 1");
    std::vector<int> out;
    int rest = n;
    while (rest > 0) {
        std::vector<double> w(rest);
        for (int m = 1; m <= rest; ++m) w[m - 1] = to_double(dec(rest, m));
        int m = static_cast<int>(rng.discrete(w)) + 1;
        out.push_back(m);
        rest -= m;
    }
    return out;
}

/// P_i = W_i prod_{j<i}(1 - W_j), W_i ~ beta(1-alpha, theta + i alpha).
inline std::vector<double> gem_sticks(double alpha, double theta, int k, RngStream& rng) {
    std::vector<double> out;
    double rest = 1.0;
    for (int i = 1; i <= k; ++i) {
        double b = theta + i * alpha;
        if (!(b > 0) || !(alpha < 1)) throw std::invalid_argument("gem_sticks: need theta + i alpha > 0");
        double w = rng.beta(1.0 - alpha, b);
        out.push_back(rest * w);
        rest *= 1.0 - w;
    }
    return out;
}

/// sigma_1 with E exp(-lambda sigma_1) = exp(-lambda^a), by Kanter's representation
/// (U uniform on (0, pi), E standard exponential).
inline double stable_sample(double index, RngStream& rng) {
    if (!(index > 0 && index < 1)) throw std::invalid_argument("stable_sample: index in (0,1)");
    const double a = index;
    double u = std::numbers::pi * rng.uniform_open();
    double e = rng.exponential();
    double A = std::pow(std::pow(std::sin(a * u), a) * std::pow(std::sin((1 - a) * u), 1 - a) / std::sin(u),
                        1.0 / (1 - a));
    return std::pow(A / e, (1 - a) / a);
}

inline double mittag_leffler_sample(double index, RngStream& rng) {
    return std::pow(stable_sample(index, rng), -index);
}

/// Gamma(p+1)/Gamma(p a + 1).
inline double mittag_leffler_moment(double index, double p) {
    if (!(p > -1)) throw std::invalid_argument("mittag_leffler_moment: p > -1");
    return std::exp(std::lgamma(p + 1) - std::lgamma(p * index + 1));
}

/// E[S^p] for the a.s. limit S of K_n / n^alpha in the (alpha, theta) CRP, theta > -alpha.
/// S has density Gamma(theta+1)/Gamma(theta/alpha+1) s^{theta/alpha} g_alpha(s); integrating
/// against the Mittag-Leffler moments gives
///   E[S^p] = Gamma(theta+1)/Gamma(theta/alpha+1) * Gamma(theta/alpha+p+1)/Gamma(theta+p alpha+1).
/// At (1/2, 1/2): E[S] = sqrt(pi), E[S^2] = 4.
inline double crp_limit_moment(double alpha, double theta, double p) {
    double r = theta / alpha;
    return std::exp(std::lgamma(theta + 1) - std::lgamma(r + 1) + std::lgamma(r + p + 1) -
                    std::lgamma(theta + p * alpha + 1));
}

}  // namespace mbtree
