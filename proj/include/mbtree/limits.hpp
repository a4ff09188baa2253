#pragma once

// Statistics of reduced subtrees and spines of large alpha-gamma trees, their limit laws,
// and the Monte-Carlo suites comparing the two.

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "mbtree/crp.hpp"
#include "mbtree/growth.hpp"
#include "mbtree/numerics.hpp"
#include "mbtree/rng.hpp"
#include "mbtree/tree.hpp"

namespace mbtree {

struct ReducedTreeStats {
    int n = 0;
    int k = 0;
    TreeShape shape;
    int ell = 0;                     // branch points of T_k (= non-leaf edges)
    long W_nk = 0;                   // leaves beyond [k] hanging off skeleton edges
    long W_bar_nk = 0;               // leaves beyond [k] hanging off branch points of T_k
    long skeleton_length = 0;        // L_k^(n)
    long bushes = 0;                 // degree-2 skeleton vertices
    std::vector<long> edge_lengths;  // leaf edges by label, then inner edges in preorder
    std::vector<int> branch_degrees; // degrees in T_n of the branch points of T_k, preorder
    long total_degree = 0;           // C_k^tot(n)
    long branch_subtrees = 0;        // subtrees hanging directly off the branch points of T_k
};

/// Reads the reduced-tree statistics of T_n for leaves [k].
inline ReducedTreeStats reduced_stats(const LabelledTree& t, int k) {
    const int n = t.leaf_count();
    if (k < 1 || k > n) throw std::out_of_range("reduced_stats: 1 <= k <= n");
    ReducedTreeStats s;
    s.n = n;
    s.k = k;
    ReducedTree r = reduced_subtree(t, k);
    s.shape = r.shape;
    s.edge_lengths = r.edge_lengths;
    for (int v : r.tree.preorder())
        if (r.tree.is_branch_point(v)) {
            ++s.ell;
            int host = r.host_vertex[v];
            int deg = static_cast<int>(t.children(host).size()) + 1;
            s.branch_degrees.push_back(deg);
            s.total_degree += deg;
        }
    std::vector<int> marked(t.node_count(), 0);
    auto counts = t.leaf_counts();
    auto order = t.preorder();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        if (t.is_leaf(v) && t.label(v) <= k) marked[v] = 1;
        if (t.parent(v) >= 0) marked[t.parent(v)] += marked[v];
    }
    for (int v : order) {
        if (v == t.root() || !marked[v]) continue;
        ++s.skeleton_length;
        if (t.is_leaf(v)) continue;
        int mc = 0, unmarked = 0;
        long hanging = 0;
        for (int c : t.children(v)) {
            if (marked[c]) {
                ++mc;
            } else {
                ++unmarked;
                hanging += counts[c];
            }
        }
        if (mc == 1) {
            ++s.bushes;
            s.W_nk += hanging;
        } else {
            s.W_bar_nk += hanging;
            s.branch_subtrees += unmarked;
        }
    }
    return s;
}

/// Sizes of the subtrees hanging off the spine from the root to leaf 1, in order of
/// appearance (smallest label), divided by n-1.
inline std::vector<double> spine_frequencies(const LabelledTree& t) {
    const int n = t.leaf_count();
    if (n < 2) throw std::invalid_argument("spine_frequencies: n >= 2");
    auto sd = spinal_decomposition(t);
    std::vector<std::pair<int, int>> subs;  // (min label, size)
    for (std::size_t i = 0; i < sd.subtree_sizes.size(); ++i)
        for (std::size_t j = 0; j < sd.subtree_sizes[i].size(); ++j)
            subs.push_back({sd.subtree_min_labels[i][j], sd.subtree_sizes[i][j]});
    std::sort(subs.begin(), subs.end());
    std::vector<double> out;
    for (auto [lab, size] : subs) out.push_back(static_cast<double>(size) / (n - 1));
    return out;
}

/// Limit laws for a realised T_k: shape code, k leaves, ell branch points with c_i children.
struct LimitLaws {
    double alpha, gamma;
    int k, ell;
    double w, w_bar;
    BetaParams wk;
    DirichletParams dk;
    std::vector<double> d_prime;  // Dirichlet(c_i - 1 - gamma/alpha); empty if degenerate
    bool d_prime_degenerate = false;

    /// E[L_k^p] = Gamma(1+w)/Gamma(1+w/g) * Gamma(1+w/g+p)/Gamma(1+w+p g), from the density
    /// Gamma(1+w)/Gamma(1+w/g) s^{w/g} g_g(s) and the Mittag-Leffler moments.
    double lk_moment(double p) const {
        double r = w / gamma;
        return std::exp(std::lgamma(1 + w) - std::lgamma(1 + r) + std::lgamma(1 + r + p) -
                        std::lgamma(1 + w + p * gamma));
    }

    /// E[M_k^p], same form with (alpha, w_bar).
    double mk_moment(double p) const {
        double r = w_bar / alpha;
        return std::exp(std::lgamma(1 + w_bar) - std::lgamma(1 + r) + std::lgamma(1 + r + p) -
                        std::lgamma(1 + w_bar + p * alpha));
    }
};

inline LimitLaws limit_laws(double alpha, double gamma, const TreeShape& shape) {
    if (!(gamma > 0 && gamma <= alpha && alpha < 1)) throw std::invalid_argument("limit_laws: 0 < gamma <= alpha < 1");
    LabelledTree t = parse_tree([&] {
        // Any labelling of the shape will do; build one from the code.
        std::string text;
        int next = 1;
        for (char ch : shape.code) {
            if (ch == 'o') {
                if (!text.empty() && text.back() != '(') text += ",";
                text += std::to_string(next++);
            } else if (ch == '(') {
                if (!text.empty() && text.back() != '(') text += ",";
                text += "(";
            } else {
                text += ")";
            }
        }
        return text + ";";
    }());
    const int k = t.leaf_count();
    std::vector<int> c;
    for (int v : t.preorder())
        if (t.is_branch_point(v)) c.push_back(static_cast<int>(t.children(v).size()));
    const int ell = static_cast<int>(c.size());
    const double w = k * (1 - alpha) + ell * gamma;
    const double wb = (k - 1) * alpha - ell * gamma;
    std::vector<double> dir(k, (1 - alpha) / gamma);
    dir.insert(dir.end(), ell, 1.0);
    LimitLaws L{alpha, gamma, k, ell, w, wb, BetaParams(w, std::max(wb, 0.0)), DirichletParams(dir), {}, false};
    for (int ci : c) {
        double a = ci - 1 - gamma / alpha;
        if (!(a > 0)) L.d_prime_degenerate = true;
        L.d_prime.push_back(a);
    }
    if (L.d_prime_degenerate) L.d_prime.clear();
    return L;
}

// ---------------------------------------------------------------------------
// Monte-Carlo suites

/// Shortest round-trip-ish text for a config value ("0.7", not "0.700000").
inline std::string format_number(double x) {
    std::ostringstream o;
    o << std::setprecision(15) << x;
    return o.str();
}

struct StatResult {
    std::string name;
    double estimate = 0;
    double stderr_ = 0;
    double target = 0;
    double p_value = -1;  // -1 when the check is a standard-error band
    bool pass = false;
};

struct SuiteReport {
    std::map<std::string, std::string> config;
    std::vector<StatResult> stats;
    bool all_pass() const {
        return std::all_of(stats.begin(), stats.end(), [](const StatResult& s) { return s.pass; });
    }
};

/// Runs body(i) for i in [0, count) on `threads` workers. Results must be written by index.
template <class F>
void parallel_replicates(int count, int threads, F&& body) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += threads) body(i);
        });
    for (auto& th : pool) th.join();
}

inline StatResult ks_stat(std::string name, std::vector<double> sample, const std::function<double(double)>& cdf,
                          double alpha_level) {
    std::sort(sample.begin(), sample.end());
    auto r = ks_test(sample, cdf);
    StatResult s;
    s.name = std::move(name);
    s.estimate = r.statistic;
    s.p_value = r.p_value;
    s.pass = r.p_value > alpha_level;
    return s;
}

inline StatResult moment_stat(std::string name, const std::vector<double>& values, double target,
                              double se_mult) {
    MomentAccumulator acc;
    for (double v : values) acc.add(v);
    StatResult s;
    s.name = std::move(name);
    s.estimate = acc.mean();
    s.stderr_ = acc.stderr_mean();
    s.target = target;
    s.pass = std::fabs(s.estimate - target) <= se_mult * s.stderr_;
    return s;
}

inline double sample_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    MomentAccumulator ma, mb;
    for (double x : a) ma.add(x);
    for (double x : b) mb.add(x);
    double cov = 0;
    for (std::size_t i = 0; i < a.size(); ++i) cov += (a[i] - ma.mean()) * (b[i] - mb.mean());
    cov /= static_cast<double>(a.size() - 1);
    return cov / std::sqrt(ma.variance() * mb.variance());
}

struct ReducedSuiteConfig {
    double alpha = 0.7, gamma = 0.3;
    int k = 2;
    int n = 10000;
    int replicates = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string shape;  // target T_k code; empty: the shape realised by replicate 0
    double ks_level = 0.001;
    double se_mult = 3.0;
};

/// Grows T_k (regrowing until it has the target shape, if one is set) and then T_n.
inline LabelledTree grow_conditioned(double alpha, double gamma, int k, int n, const std::string& shape,
                                     RngStream& rng, int max_attempts = 100000) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        Grower g(alpha, gamma);
        g.grow_to(k, rng);
        if (!shape.empty() && canonical_code(g.tree()).code != shape) continue;
        Grower h(alpha, gamma, g.tree());
        h.grow_to(n, rng);
        return h.tree();
    }
    throw std::runtime_error("grow_conditioned: target shape not reached");
}

inline SuiteReport reduced_suite(const ReducedSuiteConfig& cfg) {
    if (!(cfg.k >= 2 && cfg.k < cfg.n)) throw std::invalid_argument("mc-reduced: need 2 <= k < n");
    if (cfg.replicates < 2) throw std::invalid_argument("mc-reduced: replicates >= 2");
    std::string shape = cfg.shape;
    if (shape.empty()) {
        RngStream r0 = RngStream::derive(cfg.seed, 0);
        Grower g(cfg.alpha, cfg.gamma);
        g.grow_to(cfg.k, r0);
        shape = canonical_code(g.tree()).code;
    }
    LimitLaws laws = limit_laws(cfg.alpha, cfg.gamma, TreeShape{shape});
    std::vector<ReducedTreeStats> stats(cfg.replicates);
    parallel_replicates(cfg.replicates, cfg.threads, [&](int i) {
        RngStream rng = RngStream::derive(cfg.seed, static_cast<std::uint64_t>(i) + 1);
        stats[i] = reduced_stats(grow_conditioned(cfg.alpha, cfg.gamma, cfg.k, cfg.n, shape, rng), cfg.k);
    });
    SuiteReport rep;
    rep.config = {{"alpha", format_number(cfg.alpha)}, {"gamma", format_number(cfg.gamma)},
                  {"k", std::to_string(cfg.k)},         {"n", std::to_string(cfg.n)},
                  {"replicates", std::to_string(cfg.replicates)}, {"seed", std::to_string(cfg.seed)},
                  {"shape", shape}};
    const double n = cfg.n;
    std::vector<double> W, LW, MW, Wn;
    std::vector<std::vector<double>> D(laws.k + laws.ell);
    for (const auto& s : stats) {
        W.push_back(s.W_nk / n);
        LW.push_back(s.skeleton_length / std::pow(static_cast<double>(s.W_nk), cfg.gamma));
        // C_tot minus its value on T_k is the table count of an (alpha, wbar) restaurant, and
        // (K_m + wbar/alpha) / m^alpha has the limit's mean up to O(1/m). Same limit as C_tot/Wbar^alpha.
        if (s.W_bar_nk > 0)  // W-bar still 0 at level n leaves the ratio undefined
            MW.push_back((s.branch_subtrees + laws.w_bar / cfg.alpha) /
                         std::pow(static_cast<double>(s.W_bar_nk), cfg.alpha));
        for (std::size_t e = 0; e < s.edge_lengths.size(); ++e)
            D[e].push_back(static_cast<double>(s.edge_lengths[e]) / s.skeleton_length);
    }
    if (!laws.wk.degenerate()) {
        BetaParams b = laws.wk;
        rep.stats.push_back(ks_stat("W_nk/n", W, [b](double x) { return beta_cdf(b, x); }, cfg.ks_level));
    } else {
        StatResult s{"W_nk/n", 0, 0, 1.0, -1, false};
        MomentAccumulator acc;
        for (double x : W) acc.add(x);
        s.estimate = acc.mean();
        s.pass = s.estimate <= 1.0;
        rep.stats.push_back(s);
    }
    for (std::size_t e = 0; e < D.size(); ++e) {
        BetaParams b = laws.dk.marginal(e);
        rep.stats.push_back(ks_stat("D_" + std::to_string(e + 1), D[e], [b](double x) { return beta_cdf(b, x); },
                                    cfg.ks_level));
    }
    for (int p = 1; p <= 2; ++p) {
        std::vector<double> v;
        for (double x : LW) v.push_back(std::pow(x, p));
        rep.stats.push_back(moment_stat("L/W^gamma moment " + std::to_string(p), v, laws.lk_moment(p), cfg.se_mult));
    }
    rep.config["wbar_zero_replicates"] = std::to_string(stats.size() - MW.size());
    if (laws.w_bar > 0 && MW.size() >= 2) {
        for (int p = 1; p <= 2; ++p) {
            std::vector<double> v;
            for (double x : MW) v.push_back(std::pow(x, p));
            rep.stats.push_back(
                moment_stat("(K+wbar/alpha)/Wbar^alpha moment " + std::to_string(p), v, laws.mk_moment(p), cfg.se_mult));
        }
    }
    // Conditional independence of W_k and L_k given T_k.
    double rho = sample_correlation(W, LW);
    double se = 1.0 / std::sqrt(static_cast<double>(W.size()));
    rep.stats.push_back({"corr(W, L/W^gamma)", rho, se, 0.0, -1, std::fabs(rho) <= cfg.se_mult * se});
    return rep;
}

struct CrpSuiteConfig {
    double alpha = 0.5, theta = 0.5;
    int n = 10000;
    int replicates = 2000;
    int ml_samples = 1000000;
    std::uint64_t seed = 1;
    int threads = 1;
    double se_mult = 3.0;
};

inline SuiteReport crp_suite(const CrpSuiteConfig& cfg) {
    std::vector<double> kn(cfg.replicates);
    parallel_replicates(cfg.replicates, cfg.threads, [&](int i) {
        RngStream rng = RngStream::derive(cfg.seed, static_cast<std::uint64_t>(i));
        kn[i] = crp_table_count(cfg.alpha, cfg.theta, cfg.n, rng) / std::pow(cfg.n, cfg.alpha);
    });
    SuiteReport rep;
    rep.config = {{"alpha", format_number(cfg.alpha)}, {"theta", format_number(cfg.theta)},
                  {"n", std::to_string(cfg.n)}, {"replicates", std::to_string(cfg.replicates)},
                  {"ml_samples", std::to_string(cfg.ml_samples)}, {"seed", std::to_string(cfg.seed)}};
    rep.stats.push_back(moment_stat("K_n/n^alpha mean", kn, crp_limit_moment(cfg.alpha, cfg.theta, 1), cfg.se_mult));
    RngStream ml = RngStream::derive(cfg.seed, 0xA11CEULL);
    std::vector<double> m1, m2;
    m1.reserve(cfg.ml_samples);
    m2.reserve(cfg.ml_samples);
    for (int i = 0; i < cfg.ml_samples; ++i) {
        double x = mittag_leffler_sample(cfg.alpha, ml);
        m1.push_back(x);
        m2.push_back(x * x);
    }
    rep.stats.push_back(moment_stat("Mittag-Leffler moment 1", m1, mittag_leffler_moment(cfg.alpha, 1), cfg.se_mult));
    rep.stats.push_back(moment_stat("Mittag-Leffler moment 2", m2, mittag_leffler_moment(cfg.alpha, 2), cfg.se_mult));
    return rep;
}

struct SpineSuiteConfig {
    double alpha = 0.6, gamma = 0.2, gamma2 = 0.5;
    int n = 10000;
    int replicates = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    double ks_level = 0.001;
};

inline std::vector<double> first_spine_frequencies(double alpha, double gamma, int n, int replicates,
                                                   std::uint64_t seed, int threads) {
    std::vector<double> out(replicates);
    parallel_replicates(replicates, threads, [&](int i) {
        RngStream rng = RngStream::derive(seed, static_cast<std::uint64_t>(i));
        Grower g(alpha, gamma);
        g.grow_to(n, rng);
        out[i] = spine_frequencies(g.tree()).at(0);
    });
    return out;
}

inline SuiteReport spine_suite(const SpineSuiteConfig& cfg) {
    auto a = first_spine_frequencies(cfg.alpha, cfg.gamma, cfg.n, cfg.replicates, cfg.seed, cfg.threads);
    // The second run uses an unrelated stream family.
    auto b = first_spine_frequencies(cfg.alpha, cfg.gamma2, cfg.n, cfg.replicates, splitmix64(cfg.seed ^ 0x5EED),
                                     cfg.threads);
    SuiteReport rep;
    rep.config = {{"alpha", format_number(cfg.alpha)}, {"gamma", format_number(cfg.gamma)},
                  {"gamma2", format_number(cfg.gamma2)}, {"n", std::to_string(cfg.n)},
                  {"replicates", std::to_string(cfg.replicates)}, {"seed", std::to_string(cfg.seed)}};
    BetaParams b1(1 - cfg.alpha, 1.0);
    rep.stats.push_back(ks_stat("P_1 vs beta(1-alpha,1)", a, [b1](double x) { return beta_cdf(b1, x); }, cfg.ks_level));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    auto r = ks_two_sample(a, b);
    rep.stats.push_back({"P_1 two-sample gamma vs gamma2", r.statistic, 0, 0, r.p_value, r.p_value > cfg.ks_level});
    return rep;
}

/// Along single trajectories, the share of replicates whose |W_{2m,k}/2m - W_{m,k}/m| stays
/// below `tol` for every doubling m = n0, 2 n0, ... < n1.
inline double urn_stabilisation(double alpha, double gamma, int k, int n0, int n1, int replicates,
                                std::uint64_t seed, double tol) {
    int good = 0;
    for (int i = 0; i < replicates; ++i) {
        RngStream rng = RngStream::derive(seed, static_cast<std::uint64_t>(i));
        Grower g(alpha, gamma);
        g.grow_to(n0, rng);
        double prev = static_cast<double>(reduced_stats(g.tree(), k).W_nk) / n0;
        bool ok = true;
        for (int m = 2 * n0; m <= n1; m *= 2) {
            g.grow_to(m, rng);
            double cur = static_cast<double>(reduced_stats(g.tree(), k).W_nk) / m;
            if (std::fabs(cur - prev) >= tol) ok = false;
            prev = cur;
        }
        good += ok;
    }
    return static_cast<double>(good) / replicates;
}

}  // namespace mbtree
