#pragma once

// Exact laws of small alpha-gamma trees by pushing every labelled tree through every
// weighted insertion, and exact checks of the structural properties built on them.

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mbtree/growth.hpp"
#include "mbtree/laws.hpp"
#include "mbtree/numerics.hpp"
#include "mbtree/tree.hpp"

namespace mbtree {

inline constexpr int kOracleDefaultBound = 6;
inline constexpr int kOracleMaxBound = 7;

using TreeLaw = std::map<std::string, Rational>;  // canonical serialization -> probability

/// Laws of T_1, ..., T_n; level m is levels[m].
struct ExactLaw {
    int n = 0;
    std::vector<TreeLaw> levels;

    const TreeLaw& trees() const { return levels.at(n); }

    static std::map<std::string, Rational> shapes_of(const TreeLaw& law) {
        std::map<std::string, Rational> out;
        for (const auto& [s, p] : law) out[canonical_code(parse_tree(s)).code] += p;
        return out;
    }
    std::map<std::string, Rational> shape_law(int m) const { return shapes_of(levels.at(m)); }
    std::map<std::string, Rational> shape_law() const { return shape_law(n); }

    std::map<SplitPartition, Rational> first_split_law() const {
        std::map<SplitPartition, Rational> out;
        for (const auto& [s, p] : trees()) out[first_split(parse_tree(s)).partition] += p;
        return out;
    }

    Rational total() const {
        Rational s = 0;
        for (const auto& [k, p] : trees()) s += p;
        return s;
    }
};

inline void check_bound(int n, int bound) {
    if (bound > kOracleMaxBound) throw std::invalid_argument("oracle bound above the hard limit");
    if (n < 1 || n > bound) throw std::invalid_argument("oracle: n must lie in [1, bound]");
}

inline TreeLaw advance_law(const TreeLaw& law, const ModelParams<Rational>& p) {
    TreeLaw next;
    for (const auto& [s, pr] : law)
        for (auto& [t, q] : weighted_successors(parse_tree(s), p)) next[t.serialize()] += pr * q;
    return next;
}

inline ExactLaw exact_law(const ModelParams<Rational>& p, int n, int bound = kOracleDefaultBound) {
    check_bound(n, bound);
    ExactLaw out;
    out.n = n;
    out.levels.resize(n + 1);
    out.levels[1][LabelledTree::single_leaf().serialize()] = 1;
    for (int m = 1; m < n; ++m) out.levels[m + 1] = advance_law(out.levels[m], p);
    return out;
}

/// Law of crush(T_n^col) under the coloured Ford construction. Levels below the cherry
/// are the deterministic 1- and 2-leaf trees.
inline ExactLaw exact_coloured_law(const Rational& alpha, const Rational& c, int n,
                                   int bound = kOracleDefaultBound) {
    check_bound(n, bound);
    check_colour_params(alpha, c);
    ExactLaw out;
    out.n = n;
    out.levels.resize(n + 1);
    out.levels[1][LabelledTree::single_leaf().serialize()] = 1;
    if (n == 1) return out;
    std::map<std::string, std::pair<ColouredTree, Rational>> cur;
    ColouredTree start = ColouredTree::cherry();
    cur[start.key()] = {start, Rational(1)};
    auto read_out = [](const std::map<std::string, std::pair<ColouredTree, Rational>>& m) {
        TreeLaw law;
        for (const auto& [key, v] : m) law[crush(v.first).serialize()] += v.second;
        return law;
    };
    out.levels[2] = read_out(cur);
    for (int m = 2; m < n; ++m) {
        std::map<std::string, std::pair<ColouredTree, Rational>> next;
        for (const auto& [key, v] : cur)
            for (auto& [tc, q] : coloured_successors(v.first, alpha, c)) {
                std::string k = tc.key();
                auto it = next.find(k);
                if (it == next.end())
                    next.emplace(k, std::make_pair(std::move(tc), v.second * q));
                else
                    it->second.second += v.second * q;
            }
        cur = std::move(next);
        out.levels[m + 1] = read_out(cur);
    }
    return out;
}

inline Rational abs_diff(const Rational& a, const Rational& b) { return a > b ? Rational(a - b) : Rational(b - a); }

/// Largest difference between two maps over the union of their keys (missing = 0).
template <class K>
Rational max_abs_diff(const std::map<K, Rational>& a, const std::map<K, Rational>& b) {
    Rational r = 0;
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        Rational d = abs_diff(v, it == b.end() ? Rational(0) : it->second);
        if (d > r) r = d;
    }
    for (const auto& [k, v] : b)
        if (!a.count(k) && (v < 0 ? Rational(-v) : v) > r) r = v < 0 ? Rational(-v) : v;
    return r;
}

/// Markov branching: the delabelled law at level n against
///   q(sizes) * prod_r [m_r! / prod mult!] * prod_j P_{n_j}(s_j)
/// with q the first-split law read off the same ExactLaw.
inline Rational verify_markov_branching(const ExactLaw& law) {
    if (law.n < 2) return 0;
    auto shapes = law.shape_law();
    auto q = law.first_split_law();
    std::vector<std::map<std::string, Rational>> lower(law.n);
    for (int m = 1; m < law.n; ++m) lower[m] = law.shape_law(m);
    // Candidate shapes: every combination reachable from the split law and lower levels.
    std::map<std::string, Rational> predicted;
    for (const auto& [part, qp] : q) {
        // enumerate multisets of child shapes by recursion over the parts
        std::vector<int> sizes = part.parts;
        std::function<void(std::size_t, std::vector<std::string>&, Rational)> rec =
            [&](std::size_t i, std::vector<std::string>& chosen, Rational pr) {
                if (i == sizes.size()) {
                    std::vector<std::string> codes = chosen;
                    std::sort(codes.begin(), codes.end());
                    std::string code = "(";
                    for (auto& c : codes) code += c;
                    code += ")";
                    predicted[code] += pr;
                    return;
                }
                for (const auto& [c, pc] : lower[sizes[i]]) {
                    chosen.push_back(c);
                    rec(i + 1, chosen, pr * pc);
                    chosen.pop_back();
                }
            };
        // Summing over ordered choices per block already produces the m_r!/prod mult! factor.
        std::vector<std::string> chosen;
        rec(0, chosen, qp);
    }
    return max_abs_diff(shapes, predicted);
}

/// True iff every labelled tree of a shape carries probability P(shape) * |Aut| / n!.
inline bool verify_exchangeability(const ExactLaw& law) {
    const int n = law.n;
    auto shapes = law.shape_law();
    Rational nfact = factorial<Rational>(n);
    std::map<std::string, std::size_t> seen;
    for (const auto& [s, p] : law.trees()) {
        std::string code = canonical_code(parse_tree(s)).code;
        Rational expect = shapes[code] * Rational(static_cast<long long>(shape_automorphisms(code))) / nfact;
        if (p != expect) return false;
        ++seen[code];
    }
    for (const auto& [code, p] : shapes) {
        if (p == 0) continue;
        Rational orbit = nfact / Rational(static_cast<long long>(shape_automorphisms(code)));
        if (Rational(static_cast<long long>(seen[code])) != orbit) return false;
    }
    return true;
}

struct SpinalResidual {
    Rational composition;  // law of (N_1, ..., N_L) vs the decrement product
    Rational joint;        // joint law with the per-bush partitions vs the full product
};

/// Spinal decomposition check at level law.n against q^dec_{gamma,1-alpha} and q^PD_{alpha,-gamma}.
inline SpinalResidual verify_spinal(const ExactLaw& law, const ModelParams<Rational>& p) {
    const int n = law.n;
    if (n < 2) throw std::invalid_argument("verify_spinal: n >= 2");
    using Key = std::vector<std::vector<int>>;  // bush sizes, then each bush's partition
    std::map<std::vector<int>, Rational> comp_obs, comp_pred;
    std::map<Key, Rational> joint_obs, joint_pred;
    for (const auto& [s, pr] : law.trees()) {
        auto sd = spinal_decomposition(parse_tree(s));
        comp_obs[sd.bush_sizes] += pr;
        Key key{sd.bush_sizes};
        for (const auto& parts : sd.subtree_sizes) key.push_back(parts);
        joint_obs[key] += pr;
    }
    const Rational theta_dec = Rational(1) - p.alpha;
    const Rational theta_pd = -p.gamma;
    // All compositions of n-1, each with all per-bush partitions.
    std::function<void(int, std::vector<int>&)> comps = [&](int rest, std::vector<int>& cur) {
        if (rest == 0) {
            Rational pc = 1;
            int r = n - 1;
            for (int x : cur) {
                pc *= decrement(p.gamma, theta_dec, r, x);
                r -= x;
            }
            if (pc == 0) return;
            comp_pred[cur] += pc;
            std::function<void(std::size_t, Key&, Rational)> bushes = [&](std::size_t i, Key& key, Rational pr) {
                if (i == cur.size()) {
                    if (pr != 0) joint_pred[key] += pr;
                    return;
                }
                for (auto& part : integer_partitions(cur[i])) {
                    Rational q = eppf_to_split(part, eppf_pd(p.alpha, theta_pd, part));
                    key.push_back(part);
                    bushes(i + 1, key, pr * q);
                    key.pop_back();
                }
            };
            Key key{cur};
            bushes(0, key, pc);
            return;
        }
        for (int x = 1; x <= rest; ++x) {
            cur.push_back(x);
            comps(rest - x, cur);
            cur.pop_back();
        }
    };
    std::vector<int> cur;
    comps(n - 1, cur);
    return {max_abs_diff(comp_obs, comp_pred), max_abs_diff(joint_obs, joint_pred)};
}

/// Delabelled law of T_{n,-1} (uniform leaf removed from T_n).
inline std::map<std::string, Rational> deleted_shape_law(const ExactLaw& law) {
    std::map<std::string, Rational> out;
    const Rational inv = Rational(1) / Rational(law.n);
    for (const auto& [s, p] : law.trees()) {
        LabelledTree t = parse_tree(s);
        for (int l = 1; l <= law.n; ++l) out[canonical_code(remove_leaf(t, l)).code] += p * inv;
    }
    return out;
}

struct StrongConsistency {
    std::map<std::pair<std::string, std::string>, Rational> deleted;  // (T_{n,-1}, T_n)
    std::map<std::pair<std::string, std::string>, Rational> grown;    // (T_{n-1}, T_n)
    Rational residual;
};

inline StrongConsistency strong_consistency_joint(const ModelParams<Rational>& p, int n,
                                                  int bound = kOracleDefaultBound) {
    if (n < 3) throw std::invalid_argument("strong_consistency_joint: n >= 3");
    ExactLaw law = exact_law(p, n - 1, bound);
    StrongConsistency out;
    for (const auto& [s, pr] : law.trees()) {
        LabelledTree t = parse_tree(s);
        std::string before = canonical_code(t).code;
        for (auto& [u, q] : weighted_successors(t, p)) {
            std::string after = canonical_code(u).code;
            out.grown[{before, after}] += pr * q;
            for (int l = 1; l <= n; ++l)
                out.deleted[{canonical_code(remove_leaf(u, l)).code, after}] += pr * q / Rational(n);
        }
    }
    out.residual = max_abs_diff(out.deleted, out.grown);
    return out;
}

}  // namespace mbtree
