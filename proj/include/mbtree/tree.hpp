#pragma once

// Rooted multifurcating trees with labelled leaves: the combinatorial objects grown by the
// samplers, enumerated by the oracle and summarised by the limit statistics.
//
// A tree on n leaves has one degree-1 root, n degree-1 leaves labelled 1..n and branch
// points with at least two children. Vertices live in an arena; an edge is identified by
// its lower endpoint.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mbtree {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t pos)
        : std::runtime_error("parse error at position " + std::to_string(pos) + ": " + what),
          position(pos) {}
    std::size_t position;
};

struct TreeNode {
    int parent = -1;
    std::vector<int> children;
    int label = 0;  // > 0 for leaves, 0 otherwise
};

class LabelledTree {
public:
    LabelledTree() : LabelledTree(single_leaf()) {}

    static LabelledTree single_leaf() {
        LabelledTree t(0);
        t.nodes_.resize(2);
        t.nodes_[0].children = {1};
        t.nodes_[1].parent = 0;
        t.nodes_[1].label = 1;
        t.leaf_node_ = {-1, 1};
        return t;
    }

    static LabelledTree cherry() {
        LabelledTree t = single_leaf();
        t.insert_on_edge(t.leaf(1), 2);
        return t;
    }

    int root() const { return root_; }
    int leaf_count() const { return static_cast<int>(leaf_node_.size()) - 1; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    const TreeNode& node(int v) const { return nodes_.at(v); }
    int parent(int v) const { return nodes_[v].parent; }
    const std::vector<int>& children(int v) const { return nodes_[v].children; }
    int label(int v) const { return nodes_[v].label; }
    bool is_leaf(int v) const { return nodes_[v].label > 0; }
    bool is_branch_point(int v) const { return v != root_ && nodes_[v].label == 0; }

    int leaf(int label) const {
        if (label < 1 || label > leaf_count())
            throw std::out_of_range("no leaf labelled " + std::to_string(label));
        return leaf_node_[label];
    }

    /// Replaces the edge parent(c) -> c by parent(c) -> b -> c and adds b -> new leaf.
    /// Returns the new branch point b.
    int insert_on_edge(int c, int new_label) {
        int a = nodes_.at(c).parent;
        if (a < 0) throw std::invalid_argument("insert_on_edge: the root has no parent edge");
        check_new_label(new_label);
        int b = static_cast<int>(nodes_.size());
        int leaf = b + 1;
        nodes_.push_back(TreeNode{a, {c, leaf}, 0});
        nodes_.push_back(TreeNode{b, {}, new_label});
        auto& sib = nodes_[a].children;
        *std::find(sib.begin(), sib.end(), c) = b;
        nodes_[c].parent = b;
        leaf_node_.push_back(leaf);
        return b;
    }

    /// Adds an edge v -> new leaf at branch point v. Returns the new leaf vertex.
    int attach_to_vertex(int v, int new_label) {
        if (!is_branch_point(v)) throw std::invalid_argument("attach_to_vertex: not a branch point");
        check_new_label(new_label);
        int leaf = static_cast<int>(nodes_.size());
        nodes_.push_back(TreeNode{v, {}, new_label});
        nodes_[v].children.push_back(leaf);
        leaf_node_.push_back(leaf);
        return leaf;
    }

    /// Merges branch point v into its parent branch point (contraction of the edge above v).
    void contract_edge(int v) {
        int p = nodes_.at(v).parent;
        if (!is_branch_point(v) || !is_branch_point(p))
            throw std::invalid_argument("contract_edge: both ends must be branch points");
        auto& sib = nodes_[p].children;
        auto it = std::find(sib.begin(), sib.end(), v);
        auto kids = nodes_[v].children;
        it = sib.erase(it);
        sib.insert(it, kids.begin(), kids.end());
        for (int c : kids) nodes_[c].parent = p;
        nodes_[v].children.clear();
        nodes_[v].parent = -2;  // detached; dropped by compact()
    }

    /// Rebuilds the arena in preorder, dropping detached vertices.
    LabelledTree compact() const { return LabelledTree(*this, root_); }

    /// Vertices in depth-first preorder from the root (children in stored order).
    std::vector<int> preorder() const {
        std::vector<int> out;
        out.reserve(nodes_.size());
        std::vector<int> stack{root_};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            out.push_back(v);
            const auto& ch = nodes_[v].children;
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
        }
        return out;
    }

    std::vector<int> branch_points() const {
        std::vector<int> out;
        for (int v : preorder())
            if (is_branch_point(v)) out.push_back(v);
        return out;
    }

    /// Number of leaves below each vertex, indexed by vertex id.
    std::vector<int> leaf_counts() const {
        std::vector<int> cnt(nodes_.size(), 0);
        auto order = preorder();
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int v = *it;
            if (is_leaf(v)) cnt[v] = 1;
            if (nodes_[v].parent >= 0) cnt[nodes_[v].parent] += cnt[v];
        }
        return cnt;
    }

    /// Smallest leaf label below each vertex.
    std::vector<int> min_labels() const {
        std::vector<int> lo(nodes_.size(), std::numeric_limits<int>::max());
        auto order = preorder();
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int v = *it;
            if (is_leaf(v)) lo[v] = nodes_[v].label;
            if (nodes_[v].parent >= 0) lo[nodes_[v].parent] = std::min(lo[nodes_[v].parent], lo[v]);
        }
        return lo;
    }

    int edge_count() const { return static_cast<int>(preorder().size()) - 1; }

    /// Throws std::logic_error describing the first violated structural invariant.
    void validate() const {
        const int n = leaf_count();
        if (n < 1) throw std::logic_error("tree has no leaves");
        if (nodes_[root_].children.size() != 1) throw std::logic_error("root must have one child");
        std::vector<int> seen(n + 1, 0);
        for (int v : preorder()) {
            const auto& nd = nodes_[v];
            for (int c : nd.children)
                if (nodes_[c].parent != v) throw std::logic_error("inconsistent parent pointer");
            if (v == root_) continue;
            if (nd.label > 0) {
                if (!nd.children.empty()) throw std::logic_error("leaf with children");
                if (nd.label > n || seen[nd.label]++) throw std::logic_error("bad leaf label");
                if (leaf_node_[nd.label] != v) throw std::logic_error("leaf index out of sync");
            } else if (nd.children.size() < 2) {
                throw std::logic_error("branch point with fewer than two children");
            }
        }
        for (int l = 1; l <= n; ++l)
            if (!seen[l]) throw std::logic_error("missing leaf " + std::to_string(l));
    }

    /// Canonical labelled text: children ordered by smallest leaf label below them.
    /// Leaf = decimal label; internal = "(" child ("," child)+ ")"; terminated by ";".
    std::string serialize() const { return serialize_impl(nullptr); }

    /// As serialize(), with ":length" after every vertex (length of the edge above it).
    std::string serialize(const std::vector<long>& edge_lengths) const {
        return serialize_impl(&edge_lengths);
    }

    /// Subtree rooted at v as a tree of its own, leaves relabelled by rank of their labels.
    LabelledTree subtree(int v) const { return LabelledTree(*this, v); }

    bool operator==(const LabelledTree& other) const { return serialize() == other.serialize(); }

private:
    explicit LabelledTree(int) {}

    // Copy of the fringe subtree at `top` under a fresh root, rank-relabelled, in preorder.
    LabelledTree(const LabelledTree& src, int top) {
        std::vector<int> labels;
        std::vector<int> stack;
        int start = top == src.root_ ? src.nodes_[top].children.at(0) : top;
        stack.push_back(start);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (src.is_leaf(v)) labels.push_back(src.nodes_[v].label);
            for (int c : src.nodes_[v].children) stack.push_back(c);
        }
        std::sort(labels.begin(), labels.end());
        nodes_.push_back(TreeNode{});
        leaf_node_.assign(labels.size() + 1, -1);
        // (source vertex, new parent)
        std::vector<std::pair<int, int>> work{{start, 0}};
        while (!work.empty()) {
            auto [v, p] = work.back();
            work.pop_back();
            int id = static_cast<int>(nodes_.size());
            TreeNode nd;
            nd.parent = p;
            if (src.is_leaf(v)) {
                int rank = static_cast<int>(std::lower_bound(labels.begin(), labels.end(),
                                                             src.nodes_[v].label) -
                                            labels.begin()) + 1;
                nd.label = rank;
                leaf_node_[rank] = id;
            }
            nodes_.push_back(nd);
            nodes_[p].children.push_back(id);
            const auto& ch = src.nodes_[v].children;
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) work.push_back({*it, id});
        }
    }

    void check_new_label(int new_label) const {
        if (new_label != leaf_count() + 1)
            throw std::invalid_argument("new leaves must be labelled n+1");
    }

    std::string serialize_impl(const std::vector<long>* lengths) const {
        auto lo = min_labels();
        std::string out;
        // Iterative emission; frames are (vertex, next child index).
        struct Frame {
            int v;
            std::vector<int> order;
            std::size_t next = 0;
        };
        auto sorted_children = [&](int v) {
            std::vector<int> ch = nodes_[v].children;
            std::sort(ch.begin(), ch.end(), [&](int a, int b) { return lo[a] < lo[b]; });
            return ch;
        };
        auto emit_length = [&](int v) {
            if (lengths) out += ":" + std::to_string(lengths->at(v));
        };
        std::vector<Frame> stack;
        int top = nodes_[root_].children.at(0);
        auto open = [&](int v) {
            if (is_leaf(v)) {
                out += std::to_string(nodes_[v].label);
                emit_length(v);
                return false;
            }
            out += "(";
            stack.push_back(Frame{v, sorted_children(v)});
            return true;
        };
        open(top);
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next == f.order.size()) {
                out += ")";
                int v = f.v;
                stack.pop_back();
                emit_length(v);
                continue;
            }
            if (f.next > 0) out += ",";
            int c = f.order[f.next++];
            open(c);
        }
        out += ";";
        return out;
    }

    std::vector<TreeNode> nodes_;
    int root_ = 0;
    std::vector<int> leaf_node_;  // leaf_node_[label] = vertex; index 0 unused

    friend struct TreeParser;
};

/// Tree plus optional per-vertex edge lengths (index = vertex id; 0 where absent).
struct ParsedTree {
    LabelledTree tree;
    std::vector<long> edge_lengths;
    bool has_lengths = false;
};

struct TreeParser {
    std::string_view s;
    std::size_t pos = 0;
    LabelledTree t{0};
    std::vector<long> lengths;
    bool any_length = false;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos); }

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\n' || s[pos] == '\t' || s[pos] == '\r'))
            ++pos;
    }

    long number() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
        if (start == pos) fail("expected a decimal number");
        if (pos - start > 9) fail("number too large");
        return std::stol(std::string(s.substr(start, pos - start)));
    }

    // Parses one vertex below `parent`; returns its id.
    int vertex(int parent) {
        skip_ws();
        int id = static_cast<int>(t.nodes_.size());
        t.nodes_.push_back(TreeNode{parent, {}, 0});
        lengths.push_back(0);
        if (parent >= 0) t.nodes_[parent].children.push_back(id);
        if (pos < s.size() && s[pos] == '(') {
            ++pos;
            int count = 0;
            for (;;) {
                vertex(id);
                ++count;
                skip_ws();
                if (pos >= s.size()) fail("unterminated '('");
                if (s[pos] == ',') {
                    ++pos;
                    continue;
                }
                if (s[pos] == ')') {
                    ++pos;
                    break;
                }
                fail("expected ',' or ')'");
            }
            if (count < 2) fail("internal vertex needs at least two children");
        } else {
            long label = number();
            if (label < 1) fail("leaf labels start at 1");
            t.nodes_[id].label = static_cast<int>(label);
        }
        skip_ws();
        if (pos < s.size() && s[pos] == ':') {
            ++pos;
            long len = number();
            if (len < 1) fail("edge lengths must be positive");
            lengths[id] = len;
            any_length = true;
        }
        return id;
    }

    ParsedTree run() {
        t.nodes_.push_back(TreeNode{});  // root
        lengths.push_back(0);
        vertex(0);
        skip_ws();
        if (pos >= s.size() || s[pos] != ';') fail("expected ';'");
        ++pos;
        skip_ws();
        if (pos != s.size()) fail("trailing characters");
        int n = 0;
        for (const auto& nd : t.nodes_)
            if (nd.label > 0) ++n;
        t.leaf_node_.assign(n + 1, -1);
        for (int v = 0; v < static_cast<int>(t.nodes_.size()); ++v) {
            int l = t.nodes_[v].label;
            if (l == 0) continue;
            if (l > n) throw ParseError("leaf label " + std::to_string(l) + " exceeds leaf count", pos);
            if (t.leaf_node_[l] != -1) throw ParseError("duplicate leaf label " + std::to_string(l), pos);
            t.leaf_node_[l] = v;
        }
        return ParsedTree{std::move(t), std::move(lengths), any_length};
    }
};

inline ParsedTree parse_with_lengths(std::string_view text) {
    TreeParser parser;
    parser.s = text;
    return parser.run();
}

inline LabelledTree parse_tree(std::string_view text) { return parse_with_lengths(text).tree; }

// ---------------------------------------------------------------------------
// Shapes

/// Canonical delabelled code: leaf -> "o", internal -> "(" + sorted child codes + ")".
/// The root edge is not encoded.
struct TreeShape {
    std::string code;
    auto operator<=>(const TreeShape&) const = default;
};

inline std::vector<std::string> subtree_codes(const LabelledTree& t) {
    std::vector<std::string> code(t.node_count());
    auto order = t.preorder();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        if (v == t.root()) continue;
        if (t.is_leaf(v)) {
            code[v] = "o";
            continue;
        }
        std::vector<std::string> parts;
        for (int c : t.children(v)) parts.push_back(std::move(code[c]));
        std::sort(parts.begin(), parts.end());
        std::string s = "(";
        for (auto& p : parts) s += p;
        s += ")";
        code[v] = std::move(s);
    }
    return code;
}

inline TreeShape canonical_code(const LabelledTree& t) {
    auto codes = subtree_codes(t);
    return {codes[t.children(t.root()).at(0)]};
}

/// Number of leaves of the shape encoded by `code`.
inline int shape_leaf_count(std::string_view code) {
    return static_cast<int>(std::count(code.begin(), code.end(), 'o'));
}

/// Splits a shape code into its top-level child codes (sorted), e.g. "((oo)o)" -> {"(oo)", "o"}.
inline std::vector<std::string> shape_children(std::string_view code) {
    std::vector<std::string> out;
    if (code == "o") return out;
    int depth = 0;
    std::size_t start = 1;
    for (std::size_t i = 1; i + 1 < code.size(); ++i) {
        if (code[i] == '(') ++depth;
        if (code[i] == ')') --depth;
        if (depth == 0) {
            out.emplace_back(code.substr(start, i + 1 - start));
            start = i + 1;
        }
    }
    return out;
}

/// |Aut| of a delabelled shape: product over vertices of factorials of repeated child codes
/// times the children's automorphism counts.
inline std::uint64_t shape_automorphisms(std::string_view code) {
    auto kids = shape_children(code);
    std::uint64_t out = 1;
    std::map<std::string, int> mult;
    for (const auto& k : kids) {
        out *= shape_automorphisms(k);
        ++mult[k];
    }
    for (const auto& [k, m] : mult)
        for (int j = 2; j <= m; ++j) out *= static_cast<std::uint64_t>(j);
    return out;
}

// ---------------------------------------------------------------------------
// Decompositions

/// Decreasing multiset of at least two positive block sizes.
struct SplitPartition {
    std::vector<int> parts;

    SplitPartition() = default;
    explicit SplitPartition(std::vector<int> p) : parts(std::move(p)) {
        std::sort(parts.begin(), parts.end(), std::greater<>());
        if (parts.size() < 2) throw std::invalid_argument("a split has at least two parts");
        for (int x : parts)
            if (x < 1) throw std::invalid_argument("split parts must be positive");
    }
    int total() const { return std::accumulate(parts.begin(), parts.end(), 0); }
    auto operator<=>(const SplitPartition&) const = default;
};

struct FirstSplit {
    SplitPartition partition;
    std::vector<std::vector<int>> blocks;  // original labels, aligned with subtrees
    std::vector<LabelledTree> subtrees;    // rank-relabelled
};

inline FirstSplit first_split(const LabelledTree& t) {
    if (t.leaf_count() < 2) throw std::invalid_argument("first_split needs at least two leaves");
    int top = t.children(t.root()).at(0);
    struct Item {
        std::vector<int> labels;
        int child;
    };
    std::vector<Item> items;
    for (int c : t.children(top)) {
        Item it{{}, c};
        std::vector<int> stack{c};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (t.is_leaf(v)) it.labels.push_back(t.label(v));
            for (int w : t.children(v)) stack.push_back(w);
        }
        std::sort(it.labels.begin(), it.labels.end());
        items.push_back(std::move(it));
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.labels.size() != b.labels.size()) return a.labels.size() > b.labels.size();
        return a.labels.front() < b.labels.front();
    });
    FirstSplit out;
    std::vector<int> sizes;
    for (auto& it : items) {
        sizes.push_back(static_cast<int>(it.labels.size()));
        out.subtrees.push_back(t.subtree(it.child));
        out.blocks.push_back(std::move(it.labels));
    }
    out.partition = SplitPartition(sizes);
    return out;
}

/// Deletes leaf `label`, suppresses a branch point left with one child and relabels the
/// remaining leaves by rank (order preserving).
inline LabelledTree remove_leaf(const LabelledTree& t, int label) {
    if (t.leaf_count() < 2) throw std::invalid_argument("remove_leaf needs at least two leaves");
    int v = t.leaf(label);
    int p = t.parent(v);
    // Rebuilt through the text grammar, which compacts and relabels in one pass.
    int keep_child = -1;
    int suppressed = -1;
    if (t.children(p).size() == 2) {
        suppressed = p;
        keep_child = t.children(p)[0] == v ? t.children(p)[1] : t.children(p)[0];
    }
    std::vector<int> keep_labels;
    for (int l = 1; l <= t.leaf_count(); ++l)
        if (l != label) keep_labels.push_back(l);
    auto rank = [&](int l) {
        return static_cast<int>(std::lower_bound(keep_labels.begin(), keep_labels.end(), l) -
                                keep_labels.begin()) + 1;
    };
    std::string out;
    std::function<void(int)> emit = [&](int u) {
        if (u == suppressed) {
            emit(keep_child);
            return;
        }
        if (t.is_leaf(u)) {
            out += std::to_string(rank(t.label(u)));
            return;
        }
        out += "(";
        bool first = true;
        for (int c : t.children(u)) {
            if (c == v) continue;
            if (!first) out += ",";
            first = false;
            emit(c);
        }
        out += ")";
    };
    emit(t.children(t.root()).at(0));
    out += ";";
    return parse_tree(out).compact();
}

/// Subtree spanned by the root and leaves 1..k with degree-2 vertices suppressed.
struct ReducedTree {
    LabelledTree tree;              // labelled tree on k leaves
    TreeShape shape;
    std::vector<long> edge_lengths; // leaf edges by label, then inner edges in preorder
    std::vector<int> host_vertex;   // host vertex of each reduced vertex (same indexing as tree)
};

inline ReducedTree reduced_subtree(const LabelledTree& t, int k) {
    const int n = t.leaf_count();
    if (k < 1 || k > n) throw std::out_of_range("reduced_subtree: k out of range");
    std::vector<int> marked(t.node_count(), 0);  // number of leaves <= k below
    auto order = t.preorder();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        if (t.is_leaf(v) && t.label(v) <= k) marked[v] = 1;
        if (t.parent(v) >= 0) marked[t.parent(v)] += marked[v];
    }
    // Build the text form of the reduced tree while recording host vertices and lengths.
    std::string text;
    std::vector<std::pair<int, long>> emitted;  // in the order vertices are opened
    struct Frame {
        int host;
        std::vector<int> kids;
        std::size_t next = 0;
    };
    auto descend = [&](int v, long& len) {
        // Follow single marked children until a leaf or a vertex with >= 2 marked children.
        for (;;) {
            if (t.is_leaf(v)) return v;
            int count = 0, only = -1;
            for (int c : t.children(v))
                if (marked[c]) {
                    ++count;
                    only = c;
                }
            if (count >= 2) return v;
            v = only;
            ++len;
        }
    };
    std::vector<Frame> stack;
    auto open = [&](int v) {
        long len = 1;
        int r = descend(v, len);
        emitted.push_back({r, len});
        if (t.is_leaf(r)) {
            text += std::to_string(t.label(r)) + ":" + std::to_string(len);
            return;
        }
        text += "(";
        Frame f{r, {}};
        for (int c : t.children(r))
            if (marked[c]) f.kids.push_back(c);
        stack.push_back(std::move(f));
    };
    open(t.children(t.root()).at(0));
    std::vector<long> pending;
    if (!stack.empty()) pending.push_back(emitted.back().second);
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next == f.kids.size()) {
            text += "):" + std::to_string(pending.back());
            pending.pop_back();
            stack.pop_back();
            continue;
        }
        if (f.next > 0) text += ",";
        int c = f.kids[f.next++];
        std::size_t depth = stack.size();
        open(c);
        if (stack.size() > depth) pending.push_back(emitted.back().second);
    }
    text += ";";
    ParsedTree parsed = parse_with_lengths(text);
    ReducedTree out;
    out.tree = parsed.tree;
    out.shape = canonical_code(parsed.tree);
    // Vertices in the parsed tree are created in the same order as `emitted`, after the root.
    out.host_vertex.assign(parsed.tree.node_count(), t.root());
    for (std::size_t i = 0; i < emitted.size(); ++i) out.host_vertex[i + 1] = emitted[i].first;
    for (int l = 1; l <= k; ++l) out.edge_lengths.push_back(parsed.edge_lengths[parsed.tree.leaf(l)]);
    for (int v : parsed.tree.preorder())
        if (parsed.tree.is_branch_point(v)) out.edge_lengths.push_back(parsed.edge_lengths[v]);
    return out;
}

/// Bushes along the spine from the root to leaf 1. Bush i hangs at the i-th spine branch
/// point counted from the root, so bush 1 is the one met first when walking down from the
/// root.
struct SpinalDecomposition {
    std::vector<int> bush_sizes;                       // composition of n-1
    std::vector<std::vector<int>> subtree_sizes;       // per bush, decreasing
    std::vector<std::vector<LabelledTree>> subtrees;   // per bush, aligned with sizes
    std::vector<std::vector<int>> subtree_min_labels;  // smallest original label per subtree
};

inline SpinalDecomposition spinal_decomposition(const LabelledTree& t) {
    if (t.leaf_count() < 2) throw std::invalid_argument("spinal_decomposition needs two leaves");
    std::vector<int> spine;
    for (int v = t.parent(t.leaf(1)); v != t.root(); v = t.parent(v)) spine.push_back(v);
    std::reverse(spine.begin(), spine.end());
    auto counts = t.leaf_counts();
    auto lo = t.min_labels();
    SpinalDecomposition out;
    int below = t.leaf(1);
    std::vector<int> next_on_spine(spine.size());
    for (std::size_t i = 0; i < spine.size(); ++i)
        next_on_spine[i] = i + 1 < spine.size() ? spine[i + 1] : below;
    for (std::size_t i = 0; i < spine.size(); ++i) {
        std::vector<int> kids;
        for (int c : t.children(spine[i]))
            if (c != next_on_spine[i]) kids.push_back(c);
        std::sort(kids.begin(), kids.end(), [&](int a, int b) {
            if (counts[a] != counts[b]) return counts[a] > counts[b];
            return lo[a] < lo[b];
        });
        int total = 0;
        std::vector<int> sizes, mins;
        std::vector<LabelledTree> trees;
        for (int c : kids) {
            total += counts[c];
            sizes.push_back(counts[c]);
            mins.push_back(lo[c]);
            trees.push_back(t.subtree(c));
        }
        out.bush_sizes.push_back(total);
        out.subtree_sizes.push_back(std::move(sizes));
        out.subtrees.push_back(std::move(trees));
        out.subtree_min_labels.push_back(std::move(mins));
    }
    return out;
}

/// All labelled trees on n leaves, each exactly once, generated by inserting leaf m+1 into
/// every edge and branch point of every tree on m leaves.
inline std::vector<LabelledTree> enumerate_labelled_trees(int n) {
    if (n < 1) throw std::invalid_argument("enumerate_labelled_trees: n >= 1");
    std::vector<LabelledTree> level{LabelledTree::single_leaf()};
    for (int m = 1; m < n; ++m) {
        std::vector<LabelledTree> next;
        for (const auto& t : level) {
            for (int v : t.preorder()) {
                if (v == t.root()) continue;
                LabelledTree e = t;
                e.insert_on_edge(v, m + 1);
                next.push_back(std::move(e));
                if (t.is_branch_point(v)) {
                    LabelledTree a = t;
                    a.attach_to_vertex(v, m + 1);
                    next.push_back(std::move(a));
                }
            }
        }
        level = std::move(next);
    }
    return level;
}

}  // namespace mbtree
