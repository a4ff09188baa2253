#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "mbtree/rng.hpp"
#include "mbtree/tree.hpp"

using namespace mbtree;

namespace {

// Applies a label permutation (perm[l-1] = new label of l) textually; labels are single digits.
std::string relabel(const std::string& s, const std::vector<int>& perm) {
    std::string out;
    for (char ch : s) out += (ch >= '1' && ch <= '9') ? char('0' + perm[ch - '1']) : ch;
    return out;
}

}  // namespace

TEST(Parse, RoundTrip) {
    for (std::string s : {"1;", "(1,2);", "((1,2),3);", "(1,2,3);", "((1,3),(2,4,5));"}) {
        auto t = parse_tree(s);
        t.validate();
        EXPECT_EQ(t.serialize(), s);
    }
    // children are emitted in order of their smallest label
    EXPECT_EQ(parse_tree("(3,(2, 1));").serialize(), "((1,2),3);");
}

TEST(Parse, Rejections) {
    for (std::string s : {"(1);", "(1,1);", "(1,3);", "(1,2)", "(1,2);x", "(0,1);", "((1,2),3;", ""})
        EXPECT_THROW(parse_tree(s), ParseError) << s;
}

TEST(Parse, EdgeLengths) {
    auto p = parse_with_lengths("(1:1,2:1):2;");
    EXPECT_TRUE(p.has_lengths);
    EXPECT_EQ(p.tree.serialize(p.edge_lengths), "(1:1,2:1):2;");
    EXPECT_THROW(parse_with_lengths("(1:0,2:1);"), ParseError);
}

TEST(Shape, CanonicalCodes) {
    EXPECT_EQ(canonical_code(parse_tree("1;")).code, "o");
    EXPECT_EQ(canonical_code(parse_tree("(1,2);")).code, "(oo)");
    EXPECT_EQ(canonical_code(parse_tree("((1,2),3);")).code, "((oo)o)");
    EXPECT_EQ(canonical_code(parse_tree("(1,(2,3));")).code, "((oo)o)");
    EXPECT_EQ(shape_leaf_count("((oo)(oo)o)"), 5);
    EXPECT_EQ(shape_children("((oo)o)"), (std::vector<std::string>{"(oo)", "o"}));
    EXPECT_EQ(shape_automorphisms("(ooo)"), 6u);
    EXPECT_EQ(shape_automorphisms("((oo)(oo))"), 8u);
}

TEST(Enumeration, SchroederCounts) {
    // rooted trees with labelled leaves and no unary branch points
    const std::vector<std::size_t> expect{1, 1, 4, 26, 236, 2752};
    for (int n = 1; n <= 6; ++n) {
        auto trees = enumerate_labelled_trees(n);
        EXPECT_EQ(trees.size(), expect[n - 1]);
        std::set<std::string> distinct;
        for (const auto& t : trees) distinct.insert(t.serialize());
        EXPECT_EQ(distinct.size(), trees.size());
    }
}

TEST(Enumeration, OrbitStabiliser) {
    // unlabelled series-reduced counts and sum of n!/|Aut| over shapes
    const std::vector<std::size_t> shapes_expect{1, 1, 2, 5, 12, 33};
    for (int n = 1; n <= 6; ++n) {
        auto trees = enumerate_labelled_trees(n);
        std::map<std::string, std::size_t> per_shape;
        for (const auto& t : trees) ++per_shape[canonical_code(t).code];
        EXPECT_EQ(per_shape.size(), shapes_expect[n - 1]);
        std::uint64_t nf = 1;
        for (int j = 2; j <= n; ++j) nf *= j;
        for (const auto& [code, count] : per_shape) EXPECT_EQ(count * shape_automorphisms(code), nf) << code;
    }
}

TEST(Shape, CanonicalInvariantUnderRelabelling) {
    RngStream rng(11);
    for (const auto& t : enumerate_labelled_trees(5)) {
        std::vector<int> perm{1, 2, 3, 4, 5};
        for (int i = 4; i > 0; --i) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);
        auto u = parse_tree(relabel(t.serialize(), perm));
        EXPECT_EQ(canonical_code(u), canonical_code(t));
        EXPECT_EQ(parse_tree(t.serialize()), t);
    }
}

TEST(Tree, EdgeCountIsLeavesPlusBranchPoints) {
    for (int n = 1; n <= 5; ++n)
        for (const auto& t : enumerate_labelled_trees(n))
            EXPECT_EQ(t.edge_count(), n + static_cast<int>(t.branch_points().size()));
}

TEST(Tree, Mutations) {
    auto t = LabelledTree::cherry();
    EXPECT_EQ(t.serialize(), "(1,2);");
    int b = t.children(t.root())[0];
    t.attach_to_vertex(b, 3);
    EXPECT_EQ(t.serialize(), "(1,2,3);");
    EXPECT_THROW(t.attach_to_vertex(b, 5), std::invalid_argument);
    EXPECT_THROW(t.insert_on_edge(t.root(), 4), std::invalid_argument);
    int c = t.insert_on_edge(t.leaf(1), 4);
    EXPECT_EQ(t.serialize(), "((1,4),2,3);");
    t.contract_edge(c);
    EXPECT_EQ(t.compact().serialize(), "(1,2,3,4);");
}

TEST(FirstSplit, Examples) {
    auto fs = first_split(parse_tree("((1,2),3);"));
    EXPECT_EQ(fs.partition.parts, (std::vector<int>{2, 1}));
    EXPECT_EQ(fs.blocks, (std::vector<std::vector<int>>{{1, 2}, {3}}));
    EXPECT_EQ(fs.subtrees[0].serialize(), "(1,2);");
    auto star = first_split(parse_tree("(1,2,3);"));
    EXPECT_EQ(star.partition.parts, (std::vector<int>{1, 1, 1}));
    auto mixed = first_split(parse_tree("((2,5),(1,3,4));"));
    EXPECT_EQ(mixed.partition.parts, (std::vector<int>{3, 2}));
    EXPECT_EQ(mixed.subtrees[1].serialize(), "(1,2);");
    EXPECT_THROW(first_split(parse_tree("1;")), std::invalid_argument);
}

TEST(RemoveLeaf, Examples) {
    EXPECT_EQ(remove_leaf(parse_tree("((1,2),3);"), 3).serialize(), "(1,2);");
    EXPECT_EQ(remove_leaf(parse_tree("((1,2),3);"), 1).serialize(), "(1,2);");
    EXPECT_EQ(remove_leaf(parse_tree("(1,2,3);"), 2).serialize(), "(1,2);");
    EXPECT_EQ(remove_leaf(parse_tree("((1,2),(3,4));"), 1).serialize(), "(1,(2,3));");
    EXPECT_EQ(remove_leaf(parse_tree("(1,2);"), 1).serialize(), "1;");
}

TEST(RemoveLeaf, InvertsInsertionOfLastLeaf) {
    for (const auto& t : enumerate_labelled_trees(4))
        for (int v : t.preorder()) {
            if (v == t.root()) continue;
            auto u = t;
            u.insert_on_edge(v, 5);
            EXPECT_EQ(remove_leaf(u, 5), t);
        }
}

TEST(Reduced, Example) {
    auto r = reduced_subtree(parse_tree("((1,2),3);"), 2);
    EXPECT_EQ(r.shape.code, "(oo)");
    EXPECT_EQ(r.edge_lengths, (std::vector<long>{1, 1, 2}));
    auto full = reduced_subtree(parse_tree("((1,2),3);"), 3);
    EXPECT_EQ(full.tree.serialize(), "((1,2),3);");
    EXPECT_EQ(full.edge_lengths, (std::vector<long>{1, 1, 1, 1, 1}));
    auto one = reduced_subtree(parse_tree("((1,2),3);"), 1);
    EXPECT_EQ(one.edge_lengths, (std::vector<long>{3}));
}

TEST(Reduced, LengthsSumToSpannedEdges) {
    for (const auto& t : enumerate_labelled_trees(5))
        for (int k = 1; k <= 5; ++k) {
            auto r = reduced_subtree(t, k);
            long total = std::accumulate(r.edge_lengths.begin(), r.edge_lengths.end(), 0L);
            // edges of t lying on a path from the root to one of leaves 1..k
            std::set<int> spanned;
            for (int l = 1; l <= k; ++l)
                for (int v = t.leaf(l); v != t.root(); v = t.parent(v)) spanned.insert(v);
            EXPECT_EQ(total, static_cast<long>(spanned.size()));
            EXPECT_EQ(r.tree.leaf_count(), k);
        }
}

TEST(Spinal, Examples) {
    auto a = spinal_decomposition(parse_tree("((1,2),3);"));
    EXPECT_EQ(a.bush_sizes, (std::vector<int>{1, 1}));
    EXPECT_EQ(a.subtree_min_labels, (std::vector<std::vector<int>>{{3}, {2}}));
    auto b = spinal_decomposition(parse_tree("(1,2,3);"));
    EXPECT_EQ(b.bush_sizes, (std::vector<int>{2}));
    EXPECT_EQ(b.subtree_sizes, (std::vector<std::vector<int>>{{1, 1}}));
    auto c = spinal_decomposition(parse_tree("(((1,4),2,3),(5,6));"));
    EXPECT_EQ(c.bush_sizes, (std::vector<int>{2, 2, 1}));
    EXPECT_EQ(c.subtree_sizes[0], (std::vector<int>{2}));
    EXPECT_EQ(c.subtree_sizes[1], (std::vector<int>{1, 1}));
}

TEST(Spinal, SizesComposeNMinusOne) {
    for (int n = 2; n <= 5; ++n)
        for (const auto& t : enumerate_labelled_trees(n)) {
            auto sd = spinal_decomposition(t);
            EXPECT_EQ(std::accumulate(sd.bush_sizes.begin(), sd.bush_sizes.end(), 0), n - 1);
            for (std::size_t i = 0; i < sd.bush_sizes.size(); ++i) {
                EXPECT_EQ(std::accumulate(sd.subtree_sizes[i].begin(), sd.subtree_sizes[i].end(), 0),
                          sd.bush_sizes[i]);
                EXPECT_TRUE(std::is_sorted(sd.subtree_sizes[i].rbegin(), sd.subtree_sizes[i].rend()));
            }
        }
}
