#pragma once

// Exact splitting rules and partition probability functions of the alpha-gamma family,
// the Ewens-Pitman kernels they are built from, ordered-CRP decrement matrices and
// Aldous' beta-splitting comparison model.

#include <functional>
#include <map>
#include <vector>

#include "mbtree/growth.hpp"
#include "mbtree/numerics.hpp"
#include "mbtree/tree.hpp"

namespace mbtree {

/// All partitions of n into decreasing positive parts, with at least `min_parts` parts.
inline std::vector<std::vector<int>> integer_partitions(int n, int min_parts = 1) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int rest, int cap) {
        if (rest == 0) {
            if (static_cast<int>(cur.size()) >= min_parts) out.push_back(cur);
            return;
        }
        for (int x = std::min(rest, cap); x >= 1; --x) {
            cur.push_back(x);
            rec(rest - x, x);
            cur.pop_back();
        }
    };
    if (n >= 1) rec(n, n);
    return out;
}

/// prod_r m_r! over the multiplicities of equal parts.
template <ScalarField T>
T multiplicity_factorials(const std::vector<int>& parts) {
    std::map<int, int> m;
    for (int x : parts) ++m[x];
    T out(1);
    for (const auto& [v, c] : m) out *= factorial<T>(c);
    return out;
}

/// Number of set partitions of [n] whose block sizes form `parts`: n!/(prod n_j! prod m_r!).
template <ScalarField T>
T set_partition_count(const std::vector<int>& parts) {
    int n = std::accumulate(parts.begin(), parts.end(), 0);
    T out = factorial<T>(n);
    for (int x : parts) out /= factorial<T>(x);
    return out / multiplicity_factorials<T>(parts);
}

/// q(parts) = count * p(parts) and back.
template <ScalarField T>
T eppf_to_split(const std::vector<int>& parts, const T& p) {
    return set_partition_count<T>(parts) * p;
}
template <ScalarField T>
T split_to_eppf(const std::vector<int>& parts, const T& q) {
    return q / set_partition_count<T>(parts);
}

// ---------------------------------------------------------------------------
// Ewens-Pitman

template <ScalarField T>
void check_pd_params(const T& alpha, const T& theta, int k) {
    if (alpha < T(0)) {
        T m = theta / (-alpha);
        long long mi = static_cast<long long>(std::llround(to_double(m)));
        if (!(m == T(mi)) || mi < 1)
            throw std::invalid_argument("eppf_pd: for alpha < 0 theta must be -m*alpha, m = 1, 2, ...");
        if (k > mi) throw std::invalid_argument("eppf_pd: more blocks than m");
        return;
    }
    if (alpha > T(1)) throw std::invalid_argument("eppf_pd: alpha must be at most 1");
    // theta = -alpha is admitted as the boundary where every partition is a single block.
    if (theta < -alpha || (theta == -alpha && !(T(1) + theta > T(0))))
        throw std::invalid_argument("eppf_pd: need theta > -alpha");
}

/// Ewens-Pitman EPPF: prod_{i=1}^{k-1}(theta+i*alpha) / prod_{j=1}^{n-1}(theta+j) * prod Gamma_alpha(n_i).
template <ScalarField T>
T eppf_pd(const T& alpha, const T& theta, const std::vector<int>& parts) {
    if (parts.empty()) throw std::invalid_argument("eppf_pd: empty partition");
    const int k = static_cast<int>(parts.size());
    check_pd_params(alpha, theta, k);
    int n = 0;
    T out(1);
    for (int x : parts) {
        if (x < 1) throw std::invalid_argument("eppf_pd: parts must be positive");
        n += x;
        out *= rising_product(alpha, x);
    }
    for (int i = 1; i < k; ++i) out *= theta + T(i) * alpha;
    for (int j = 1; j < n; ++j) out /= theta + T(j);
    return out;
}

/// a_k = alpha^{k-2} Gamma(k+theta/alpha)/Gamma(2+theta/alpha) at theta = -alpha-gamma, written
/// as prod_{i=2}^{k-1}((i-1)alpha - gamma) so that alpha = 0 and gamma = alpha need no limits.
template <ScalarField T>
T pdstar_coefficient(const T& alpha, const T& gamma, int k) {
    T out(1);
    for (int i = 2; i < k; ++i) out *= T(i - 1) * alpha - gamma;
    return out;
}

template <ScalarField T>
void check_pdstar_params(const T& alpha, const T& gamma) {
    if (!(T(0) <= alpha && alpha < T(1) && T(0) <= gamma && gamma <= alpha))
        throw std::invalid_argument("need 0 <= alpha < 1 and 0 <= gamma <= alpha");
}

/// Normalisation constants Z_n of the PD* partition function, memoised per (alpha, gamma).
/// Z_n = sum_k a_k B_{n,k}, with B_{n,k} the partial Bell polynomial in w_j = Gamma_alpha(j).
template <ScalarField T>
class NormConstants {
public:
    NormConstants(T alpha, T gamma) : alpha_(std::move(alpha)), gamma_(std::move(gamma)) {
        check_pdstar_params(alpha_, gamma_);
    }

    const T& Z(int n) {
        if (n < 2) throw std::invalid_argument("norm_const: n >= 2");
        if (n >= static_cast<int>(z_.size())) extend(n);
        return z_[n];
    }

    /// Normalisation of the integral representation, Z_n alpha Gamma(1-gamma/alpha)/Gamma(n-alpha-gamma).
    double Z_tilde(int n) {
        double a = to_double(alpha_), g = to_double(gamma_);
        if (!(a > 0) || !(g < a)) throw std::domain_error("Z_tilde needs 0 < alpha and gamma < alpha");
        return to_double(Z(n)) * a * std::exp(std::lgamma(1.0 - g / a) - std::lgamma(n - a - g));
    }

private:
    void extend(int n) {
        // B[m][k] for m <= n.
        std::vector<T> w(n + 1);
        for (int j = 1; j <= n; ++j) w[j] = rising_product(alpha_, j);
        std::vector<std::vector<T>> B(n + 1, std::vector<T>(n + 1, T(0)));
        B[0][0] = T(1);
        for (int m = 1; m <= n; ++m)
            for (int k = 1; k <= m; ++k) {
                T s(0);
                for (int j = 1; j <= m - k + 1; ++j)
                    if (B[m - j][k - 1] != T(0)) s += binomial<T>(m - 1, j - 1) * w[j] * B[m - j][k - 1];
                B[m][k] = s;
            }
        z_.assign(n + 1, T(0));
        for (int m = 2; m <= n; ++m) {
            T s(0);
            for (int k = 2; k <= m; ++k) s += pdstar_coefficient(alpha_, gamma_, k) * B[m][k];
            z_[m] = s;
        }
    }

    T alpha_, gamma_;
    std::vector<T> z_;
};

template <ScalarField T>
T norm_const(const T& alpha, const T& gamma, int n) {
    NormConstants<T> nc(alpha, gamma);
    return nc.Z(n);
}

/// PD* EPPF with theta = -alpha-gamma: a_k prod Gamma_alpha(n_j) / Z_n, k >= 2.
template <ScalarField T>
T eppf_pdstar(const T& alpha, const T& gamma, const std::vector<int>& parts, NormConstants<T>* nc = nullptr) {
    if (parts.size() < 2) throw std::invalid_argument("eppf_pdstar: need at least two blocks");
    check_pdstar_params(alpha, gamma);
    int n = 0;
    T out = pdstar_coefficient(alpha, gamma, static_cast<int>(parts.size()));
    for (int x : parts) {
        n += x;
        out *= rising_product(alpha, x);
    }
    if (nc) return out / nc->Z(n);
    return out / norm_const(alpha, gamma, n);
}

// ---------------------------------------------------------------------------
// Alpha-gamma splitting rules

/// sum_{i != j} n_i n_j = n^2 - sum n_i^2.
inline long long cross_sum(const std::vector<int>& parts) {
    long long n = 0, sq = 0;
    for (int x : parts) {
        n += x;
        sq += static_cast<long long>(x) * x;
    }
    return n * n - sq;
}

/// First-split probability for 0 <= alpha < 1. Z_n cancels:
/// q = count * a_k prod Gamma_alpha(n_j) / Gamma_alpha(n) * (gamma + (1-alpha-gamma) S/(n(n-1))).
template <ScalarField T>
T split_prob_seq(const T& alpha, const T& gamma, const SplitPartition& part) {
    check_pdstar_params(alpha, gamma);
    const auto& p = part.parts;
    const int n = part.total();
    T out = set_partition_count<T>(p) * pdstar_coefficient(alpha, gamma, static_cast<int>(p.size()));
    for (int x : p) out *= rising_product(alpha, x);
    out /= rising_product(alpha, n);
    T frac = T(cross_sum(p)) / T(static_cast<long long>(n) * (n - 1));
    return out * (gamma + (T(1) - alpha - gamma) * frac);
}

/// First-split probability at alpha = 1. The closed interval for gamma is admitted: gamma = 0
/// gives the star and gamma = 1 the comb as limits of the same formula.
template <ScalarField T>
T split_prob_alpha1(const T& gamma, const SplitPartition& part) {
    if (!(T(0) <= gamma && gamma <= T(1))) throw std::invalid_argument("split_prob_alpha1: gamma in [0,1]");
    const auto& p = part.parts;
    const int n = part.total();
    const int k = static_cast<int>(p.size());
    bool tail_ones = std::all_of(p.begin() + 1, p.end(), [](int x) { return x == 1; });
    if (!tail_ones) return T(0);
    if (k == n) return rising_product(gamma, n - 1) / factorial<T>(n - 2);
    return gamma * rising_product(gamma, k - 1) / factorial<T>(k - 1);
}

/// Dispatches on alpha = 1.
template <ScalarField T>
T split_prob(const ModelParams<T>& m, const SplitPartition& part) {
    if (m.alpha == T(1)) return split_prob_alpha1(m.gamma, part);
    return split_prob_seq(m.alpha, m.gamma, part);
}

/// EPPF of the alpha-gamma model.
template <ScalarField T>
T eppf_seq(const ModelParams<T>& m, const std::vector<int>& parts) {
    return split_to_eppf(parts, split_prob(m, SplitPartition(parts)));
}

template <ScalarField T>
struct SplitDistribution {
    int n = 0;
    std::map<SplitPartition, T> entries;

    T total() const {
        T s(0);
        for (const auto& [k, v] : entries) s += v;
        return s;
    }
};

template <ScalarField T>
SplitDistribution<T> split_distribution(const ModelParams<T>& m, int n) {
    if (n < 2) throw std::invalid_argument("split_distribution: n >= 2");
    SplitDistribution<T> d;
    d.n = n;
    for (auto& p : integer_partitions(n, 2)) {
        SplitPartition sp(p);
        d.entries[sp] = split_prob(m, sp);
    }
    return d;
}

// ---------------------------------------------------------------------------
// Ordered CRP decrement matrices

template <ScalarField T>
void check_decrement_params(const T& alpha, const T& theta) {
    if (!(T(0) <= alpha && alpha < T(1) && theta >= T(0)))
        throw std::invalid_argument("decrement: need 0 <= alpha < 1 and theta >= 0");
    if (alpha == T(0) && theta == T(0)) throw std::invalid_argument("decrement: alpha = theta = 0");
}

/// q^dec(n, m) = C(n,m) ((n-m)alpha + m theta)/n * Gamma_alpha(m) / prod_{j=n-m}^{n-1}(j+theta).
/// At m = n the theta factor cancels against j = 0, which keeps theta = 0 finite.
template <ScalarField T>
T decrement(const T& alpha, const T& theta, int n, int m) {
    check_decrement_params(alpha, theta);
    if (n < 1 || m < 1 || m > n) throw std::out_of_range("decrement: need 1 <= m <= n");
    if constexpr (std::is_floating_point_v<T>) {
        int sign = 1;
        double l = log_rising_product(alpha, m, &sign);
        if (sign == 0) return 0.0;
        if (m == n) return std::exp(l - log_abs_pochhammer(1.0 + theta, n - 1, nullptr));
        double lin = (n - m) * alpha + m * theta;
        if (lin == 0.0) return 0.0;
        return std::exp(log_binomial(n, m) + std::log(lin) - std::log(double(n)) + l -
                        log_abs_pochhammer(n - m + theta, m, nullptr));
    } else {
        if (m == n) return rising_product(alpha, n) / pochhammer(T(1) + theta, n - 1);
        T lin = T(n - m) * alpha + T(m) * theta;
        return binomial<T>(n, m) * lin / T(n) * rising_product(alpha, m) / pochhammer(T(n - m) + theta, m);
    }
}

template <ScalarField T>
struct DecrementMatrix {
    T alpha, theta;
    DecrementMatrix(T a, T th) : alpha(std::move(a)), theta(std::move(th)) {
        check_decrement_params(alpha, theta);
    }
    T operator()(int n, int m) const { return decrement(alpha, theta, n, m); }

    /// Probability of a composition read left to right.
    T composition_prob(const std::vector<int>& parts) const {
        int rest = std::accumulate(parts.begin(), parts.end(), 0);
        T out(1);
        for (int x : parts) {
            out *= (*this)(rest, x);
            rest -= x;
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Aldous beta-splitting

/// q(n-m, m) for 1 <= m <= n/2. Unnormalised weights C(n,m)(2+beta)_{m-1}(2+beta)_{n-m-1},
/// halved at m = n/2, then normalised over m. beta = -2 is the comb limit.
template <ScalarField T>
T aldous_split(const T& beta, int n, int m) {
    if (beta < T(-2)) throw std::invalid_argument("aldous_split: beta >= -2");
    if (n < 2 || m < 1 || 2 * m > n) throw std::out_of_range("aldous_split: need 1 <= m <= n/2");
    if (beta == T(-2)) return m == 1 ? T(1) : T(0);
    auto weight = [&](int j) {
        T w = binomial<T>(n, j) * pochhammer(T(2) + beta, j - 1) * pochhammer(T(2) + beta, n - j - 1);
        if (2 * j == n) w /= T(2);
        return w;
    };
    T total(0);
    for (int j = 1; 2 * j <= n; ++j) total += weight(j);
    return weight(m) / total;
}

// ---------------------------------------------------------------------------
// Sampling consistency

template <ScalarField T>
using SplitKernel = std::function<T(const SplitPartition&)>;

template <ScalarField T>
struct ConsistencyResidual {
    T del3;  // splitting-rule form
    T del4;  // EPPF form
};

/// Largest |LHS - RHS| of both consistency identities over all partitions of n-1 with at
/// least two blocks; q must be defined on partitions of n-1 and n.
template <ScalarField T>
ConsistencyResidual<T> sampling_consistency_residual(const SplitKernel<T>& q, int n) {
    if (n < 3) throw std::invalid_argument("check_sampling_consistency: n >= 3");
    auto absval = [](const T& x) { return x < T(0) ? T(-x) : x; };
    auto p = [&](std::vector<int> parts) {
        SplitPartition sp(std::move(parts));
        return split_to_eppf(sp.parts, q(sp));
    };
    auto qq = [&](std::vector<int> parts) { return q(SplitPartition(std::move(parts))); };
    ConsistencyResidual<T> r{T(0), T(0)};
    const T q_n1 = qq({n - 1, 1});
    const T p_n1 = p({n - 1, 1});
    for (const auto& lam : integer_partitions(n - 1, 2)) {
        std::map<int, int> mult;
        for (int x : lam) ++mult[x];
        // splitting-rule form
        T rhs3(0), rhs4(0);
        for (std::size_t i = 0; i < lam.size(); ++i) {
            auto up = lam;
            ++up[i];
            int ni = lam[i];
            T coef = T((ni + 1) * (mult[ni + 1] + 1)) / T(n * mult[ni]);
            rhs3 += coef * qq(up);
            rhs4 += p(up);
        }
        auto ext = lam;
        ext.push_back(1);
        rhs3 += T(mult[1] + 1) / T(n) * qq(ext);
        rhs4 += p(ext);
        T q_lam = qq(lam);
        rhs3 += q_n1 * q_lam / T(n);
        T lhs4 = (T(1) - p_n1) * p(lam);
        T d3 = absval(q_lam - rhs3), d4 = absval(lhs4 - rhs4);
        if (d3 > r.del3) r.del3 = d3;
        if (d4 > r.del4) r.del4 = d4;
    }
    return r;
}

template <ScalarField T>
ConsistencyResidual<T> check_sampling_consistency(const ModelParams<T>& m, int n) {
    return sampling_consistency_residual<T>([&](const SplitPartition& s) { return split_prob(m, s); }, n);
}

/// The two joint probabilities of the strong-consistency pair (t3, t4) = (((oo)o), ((oo)oo)).
/// lhs: P(T_{4,-1} = t3, T_4 = t4) = q(2,1,1) q(1,1) / 2, the 1/2 being the chance that the
/// removed leaf is one of the two singletons. rhs: P(T_3 = t3, T_4 = t4) = q(2,1) times the
/// normalised weight of the top branch point of t3.
template <ScalarField T>
struct StrongPair {
    T lhs, rhs;
};

template <ScalarField T>
StrongPair<T> check_strong_consistency_pair(const ModelParams<T>& m) {
    StrongPair<T> r;
    r.lhs = split_prob(m, SplitPartition({2, 1, 1})) * split_prob(m, SplitPartition({1, 1})) / T(2);
    LabelledTree t3 = parse_tree("((1,2),3);");
    auto w = weights(t3, m);
    int top = t3.children(t3.root()).at(0);
    T vertex_weight(0);
    for (const auto& s : w.sites)
        if (s.kind == SiteKind::Vertex && s.vertex == top) vertex_weight = s.weight;
    r.rhs = split_prob(m, SplitPartition({2, 1})) * vertex_weight / w.total();
    return r;
}

}  // namespace mbtree
