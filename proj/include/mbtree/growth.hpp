#pragma once

// Sequential alpha-gamma growth, the coloured Ford construction and crushing.

#include <string>
#include <utility>
#include <vector>

#include "mbtree/numerics.hpp"
#include "mbtree/rng.hpp"
#include "mbtree/tree.hpp"

namespace mbtree {

template <ScalarField T>
struct ModelParams {
    T alpha;
    T gamma;

    ModelParams(T a, T g) : alpha(std::move(a)), gamma(std::move(g)) {
        if (!(T(0) <= gamma && gamma <= alpha && alpha <= T(1)))
            throw std::invalid_argument("model parameters need 0 <= gamma <= alpha <= 1");
    }
};

enum class SiteKind { LeafEdge, InnerEdge, Vertex };

/// One place where leaf n+1 can go. For edges, `vertex` is the lower endpoint.
template <ScalarField T>
struct Site {
    SiteKind kind;
    int vertex;
    T weight;
};

/// Sites in sampling order: leaf edges by label, inner edges (root edge included) in
/// preorder, then branch points in preorder.
template <ScalarField T>
struct WeightTable {
    std::vector<Site<T>> sites;

    T total() const {
        T s(0);
        for (const auto& x : sites) s += x.weight;
        return s;
    }
};

template <ScalarField T>
WeightTable<T> weights(const LabelledTree& t, const ModelParams<T>& p) {
    if (t.leaf_count() < 2) throw std::invalid_argument("weights: need at least two leaves");
    WeightTable<T> w;
    for (int l = 1; l <= t.leaf_count(); ++l)
        w.sites.push_back({SiteKind::LeafEdge, t.leaf(l), T(1) - p.alpha});
    auto bps = t.branch_points();
    for (int v : bps) w.sites.push_back({SiteKind::InnerEdge, v, p.gamma});
    for (int v : bps) {
        int c = static_cast<int>(t.children(v).size());
        w.sites.push_back({SiteKind::Vertex, v, T(c - 1) * p.alpha - p.gamma});
    }
    return w;
}

/// Tree obtained by putting leaf n+1 at `site`.
template <ScalarField T>
LabelledTree apply_site(const LabelledTree& t, const Site<T>& site) {
    LabelledTree out = t;
    if (site.kind == SiteKind::Vertex)
        out.attach_to_vertex(site.vertex, t.leaf_count() + 1);
    else
        out.insert_on_edge(site.vertex, t.leaf_count() + 1);
    return out;
}

/// Every successor with positive probability, with its exact transition probability.
template <ScalarField T>
std::vector<std::pair<LabelledTree, T>> weighted_successors(const LabelledTree& t,
                                                            const ModelParams<T>& p) {
    std::vector<std::pair<LabelledTree, T>> out;
    if (t.leaf_count() == 1) {
        out.emplace_back(LabelledTree::cherry(), T(1));
        return out;
    }
    auto w = weights(t, p);
    T total = w.total();
    for (const auto& s : w.sites)
        if (s.weight != T(0)) out.emplace_back(apply_site(t, s), s.weight / total);
    return out;
}

/// Reference step: one uniform draw against the cumulative weights in table order.
template <ScalarField T>
LabelledTree grow_step(const LabelledTree& t, const ModelParams<T>& p, RngStream& rng) {
    if (t.leaf_count() == 1) return LabelledTree::cherry();
    auto w = weights(t, p);
    std::vector<double> wd;
    wd.reserve(w.sites.size());
    for (const auto& s : w.sites) wd.push_back(to_double(s.weight));
    return apply_site(t, w.sites[rng.discrete(wd)]);
}

/// Constant-time sampler for long trajectories. It draws from the same law as grow_step
/// but decomposes the weights by category (leaf edges, inner edges, branch points split
/// into an (alpha - gamma) base part and an alpha part per child beyond the second),
/// so the random stream is consumed differently.
class Grower {
public:
    Grower(double alpha, double gamma, LabelledTree start = LabelledTree::single_leaf())
        : alpha_(alpha), gamma_(gamma), t_(std::move(start)) {
        ModelParams<double> check(alpha, gamma);
        (void)check;
        for (int v : t_.branch_points()) {
            branch_.push_back(v);
            for (std::size_t c = 2; c < t_.children(v).size(); ++c) extra_.push_back(v);
        }
    }

    const LabelledTree& tree() const { return t_; }
    int size() const { return t_.leaf_count(); }

    void step(RngStream& rng) {
        const int n = t_.leaf_count();
        if (n == 1) {
            branch_.push_back(t_.insert_on_edge(t_.leaf(1), 2));
            return;
        }
        const double nb = static_cast<double>(branch_.size());
        const double w[4] = {n * (1.0 - alpha_), nb * gamma_, nb * (alpha_ - gamma_),
                             static_cast<double>(extra_.size()) * alpha_};
        const std::size_t pool[4] = {static_cast<std::size_t>(n), branch_.size(), branch_.size(),
                                     extra_.size()};
        double u = rng.uniform() * (w[0] + w[1] + w[2] + w[3]);
        int cat = -1;
        for (int i = 0; i < 4; ++i) {
            if (w[i] <= 0 || pool[i] == 0) continue;
            cat = i;
            if (u < w[i]) break;
            u -= w[i];
        }
        const int label = n + 1;
        switch (cat) {
            case 0:
                branch_.push_back(t_.insert_on_edge(t_.leaf(1 + static_cast<int>(rng.uniform_index(n))), label));
                break;
            case 1:
                branch_.push_back(t_.insert_on_edge(branch_[rng.uniform_index(branch_.size())], label));
                break;
            case 2: {
                int v = branch_[rng.uniform_index(branch_.size())];
                t_.attach_to_vertex(v, label);
                extra_.push_back(v);
                break;
            }
            default: {
                int v = extra_[rng.uniform_index(extra_.size())];
                t_.attach_to_vertex(v, label);
                extra_.push_back(v);
                break;
            }
        }
    }

    void grow_to(int n, RngStream& rng) {
        while (t_.leaf_count() < n) step(rng);
    }

private:
    double alpha_, gamma_;
    LabelledTree t_;
    std::vector<int> branch_;  // branch points, each also names its parent edge
    std::vector<int> extra_;   // one entry per child beyond the second
};

/// A sample of T_n.
template <ScalarField T>
LabelledTree grow(int n, const ModelParams<T>& p, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("grow: n >= 1");
    Grower g(to_double(p.alpha), to_double(p.gamma));
    g.grow_to(n, rng);
    return g.tree();
}

// ---------------------------------------------------------------------------
// Coloured construction

/// Binary tree with a colour on the edge above every branch point (true = red).
/// The root edge sits above the top branch point and is always blue.
struct ColouredTree {
    LabelledTree tree;
    std::vector<char> red;  // indexed by vertex id

    static ColouredTree cherry() {
        ColouredTree c{LabelledTree::cherry(), {}};
        c.red.assign(c.tree.node_count(), 0);
        return c;
    }

    /// Canonical labelled text with "*" after every vertex whose parent edge is red.
    std::string key() const {
        auto lo = tree.min_labels();
        std::function<void(int, std::string&)> emit = [&](int v, std::string& out) {
            if (tree.is_leaf(v)) {
                out += std::to_string(tree.label(v));
                return;
            }
            std::vector<int> ch = tree.children(v);
            std::sort(ch.begin(), ch.end(), [&](int a, int b) { return lo[a] < lo[b]; });
            out += "(";
            for (std::size_t i = 0; i < ch.size(); ++i) {
                if (i) out += ",";
                emit(ch[i], out);
            }
            out += ")";
            if (red[v]) out += "*";
        };
        std::string out;
        emit(tree.children(tree.root()).at(0), out);
        return out + ";";
    }
};

template <ScalarField T>
void check_colour_params(const T& alpha, const T& c) {
    if (!(T(0) <= alpha && alpha <= T(1))) throw std::invalid_argument("alpha must lie in [0,1]");
    if (!(T(0) <= c && c <= T(1))) throw std::invalid_argument("colour probability c must lie in [0,1]");
}

/// Successors of a coloured tree under Ford weights and the colouring rule, with exact
/// probabilities. Outcomes of probability zero are dropped.
template <ScalarField T>
std::vector<std::pair<ColouredTree, T>> coloured_successors(const ColouredTree& tc, const T& alpha,
                                                            const T& c) {
    check_colour_params(alpha, c);
    const LabelledTree& t = tc.tree;
    auto w = weights(t, ModelParams<T>(alpha, alpha));
    T total = w.total();
    std::vector<std::pair<ColouredTree, T>> out;
    for (const auto& s : w.sites) {
        if (s.weight == T(0) || s.kind == SiteKind::Vertex) continue;
        T pr = s.weight / total;
        ColouredTree base{t, tc.red};
        int b = base.tree.insert_on_edge(s.vertex, t.leaf_count() + 1);
        base.red.resize(base.tree.node_count(), 0);
        if (s.kind == SiteKind::LeafEdge) {
            base.red[b] = 0;
            out.emplace_back(std::move(base), pr);
        } else if (tc.red[s.vertex]) {
            base.red[b] = 1;
            base.red[s.vertex] = 1;
            out.emplace_back(std::move(base), pr);
        } else {
            base.red[b] = 0;
            ColouredTree redc = base;
            redc.red[s.vertex] = 1;
            base.red[s.vertex] = 0;
            if (c != T(0)) out.emplace_back(std::move(redc), pr * c);
            if (c != T(1)) out.emplace_back(std::move(base), pr * (T(1) - c));
        }
    }
    return out;
}

template <ScalarField T>
ColouredTree colour_grow_step(const ColouredTree& tc, const T& alpha, const T& c, RngStream& rng) {
    auto succ = coloured_successors(tc, alpha, c);
    std::vector<double> wd;
    for (const auto& s : succ) wd.push_back(to_double(s.second));
    return succ[rng.discrete(wd)].first;
}

/// Contracts every red edge and forgets the colours.
inline LabelledTree crush(const ColouredTree& tc) {
    LabelledTree t = tc.tree;
    // Contract bottom-up so that merged children are already final.
    auto order = t.preorder();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        if (v < static_cast<int>(tc.red.size()) && tc.red[v] && t.is_branch_point(v)) {
            if (!t.is_branch_point(t.parent(v)))
                throw std::logic_error("crush: the root edge cannot be red");
            t.contract_edge(v);
        }
    }
    return t.compact();
}

}  // namespace mbtree
