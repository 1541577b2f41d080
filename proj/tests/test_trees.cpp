#include <gtest/gtest.h>

#include <random>
#include <set>

#include "hdyn/tree.hpp"

using namespace hdyn;

namespace {

// Oracle: every stable tree arises from the one-vertex tree by repeatedly splitting a
// vertex into two adjacent vertices, each keeping at least two of the old flags.
// Trees are kept as explicit vertex/flag structures and deduplicated by canonical_form.
struct RawTree {
    int n;
    std::vector<std::vector<int>> legs;           // per vertex
    std::vector<std::pair<int, int>> edges;
};

MarkedTree to_marked(const RawTree& r) {
    MarkedTree t;
    t.n = r.n;
    t.vertex_count = static_cast<int>(r.legs.size());
    t.edges = r.edges;
    t.leg_vertex.assign(r.n, -1);
    for (int v = 0; v < t.vertex_count; ++v)
        for (int l : r.legs[v]) t.leg_vertex[l] = v;
    return t;
}

std::set<std::vector<Mask>> brute_force_trees(int n) {
    RawTree start{n, {{}}, {}};
    for (int i = 0; i < n; ++i) start.legs[0].push_back(i);
    std::set<std::vector<Mask>> seen;
    std::vector<RawTree> frontier{start};
    seen.insert(Stratum::from_tree(to_marked(start)).splits());
    while (!frontier.empty()) {
        std::vector<RawTree> next;
        for (const RawTree& r : frontier) {
            int vc = static_cast<int>(r.legs.size());
            for (int v = 0; v < vc; ++v) {
                // flags of v: legs (id >= 0) and edges (encoded as -(edge index)-1)
                std::vector<int> flags;
                for (int l : r.legs[v]) flags.push_back(l);
                for (std::size_t e = 0; e < r.edges.size(); ++e)
                    if (r.edges[e].first == v || r.edges[e].second == v) flags.push_back(-static_cast<int>(e) - 1);
                int m = static_cast<int>(flags.size());
                if (m < 4) continue;
                for (int sub = 1; sub < (1 << m) - 1; ++sub) {
                    if (sub & 1) continue; // flag 0 stays at v
                    int cnt = __builtin_popcount(sub);
                    if (cnt < 2 || m - cnt < 2) continue;
                    RawTree t = r;
                    int w = vc;
                    t.legs.emplace_back();
                    t.legs[v].clear();
                    for (int i = 0; i < m; ++i) {
                        int f = flags[i];
                        bool moves = (sub >> i) & 1;
                        if (f >= 0) (moves ? t.legs[w] : t.legs[v]).push_back(f);
                        else if (moves) {
                            auto& e = t.edges[-f - 1];
                            (e.first == v ? e.first : e.second) = w;
                        }
                    }
                    t.edges.emplace_back(v, w);
                    auto key = Stratum::from_tree(canonical_form(to_marked(t))).splits();
                    if (seen.insert(key).second) next.push_back(std::move(t));
                }
            }
        }
        frontier = std::move(next);
    }
    return seen;
}

MarkedTree relabel_vertices(const MarkedTree& t, std::mt19937& rng) {
    std::vector<int> perm(t.vertex_count);
    for (int i = 0; i < t.vertex_count; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    MarkedTree out = t;
    for (auto& [a, b] : out.edges) {
        a = perm[a];
        b = perm[b];
        if (rng() & 1) std::swap(a, b);
    }
    std::shuffle(out.edges.begin(), out.edges.end(), rng);
    for (int& v : out.leg_vertex) v = perm[v];
    return out;
}

// Independent md computation from an explicit tree.
int dim_from_scratch(const MarkedTree& t) {
    std::vector<int> val(t.vertex_count, 0);
    for (int v : t.leg_vertex) ++val[v];
    for (auto [a, b] : t.edges) ++val[a], ++val[b];
    int d = 0;
    for (int x : val) d += x - 3;
    return d;
}

} // namespace

TEST(Trees, EnumerationCountsSmall) {
    EXPECT_EQ(enumerate_strata(4, 0).size(), 3u);
    EXPECT_EQ(enumerate_strata(5, 1).size(), 10u);
    EXPECT_EQ(enumerate_strata(6, 1).size(), 105u);
    EXPECT_EQ(enumerate_strata(4, 1).size(), 1u);
    // all-trivalent trees: (2n-5)!!
    EXPECT_EQ(enumerate_strata(7, 0).size(), 945u);
    EXPECT_EQ(enumerate_strata(8, 0).size(), 10395u);
}

TEST(Trees, EnumerationMatchesBruteForce) {
    for (int n = 3; n <= 8; ++n) {
        auto oracle = brute_force_trees(n);
        std::set<std::vector<Mask>> ours;
        std::size_t total = 0;
        for (int k = 0; k <= n - 3; ++k)
            for (const auto& s : enumerate_strata(n, k)) {
                ours.insert(s.splits());
                ++total;
            }
        EXPECT_EQ(total, ours.size()) << "duplicates at n=" << n;
        EXPECT_EQ(ours, oracle) << "n=" << n;
    }
}

TEST(Trees, EnumerationRejectsBadK) {
    EXPECT_THROW(enumerate_strata(5, 3), ValidationError);
    EXPECT_THROW(enumerate_strata(5, -1), ValidationError);
}

TEST(Trees, CanonicalFormRelabelingInvariance) {
    std::mt19937 rng(20240611);
    for (int n = 4; n <= 8; ++n) {
        const auto& all = all_strata(n);
        for (int trial = 0; trial < 1000; ++trial) {
            const Stratum& s = all[rng() % all.size()];
            MarkedTree t = s.to_tree();
            MarkedTree u = relabel_vertices(t, rng);
            MarkedTree c = canonical_form(u);
            EXPECT_EQ(Stratum::from_tree(c), s);
            EXPECT_EQ(c.edges, t.edges);
            EXPECT_EQ(c.leg_vertex, t.leg_vertex);
            MarkedTree cc = canonical_form(c);
            EXPECT_EQ(cc.edges, c.edges);
            EXPECT_EQ(cc.leg_vertex, c.leg_vertex);
        }
    }
}

TEST(Trees, CanonicalFormDistinguishesNonIsomorphic) {
    // swapping two marks across an edge changes the class
    MarkedTree a{4, 2, {{0, 1}}, {0, 0, 1, 1}};
    MarkedTree b{4, 2, {{1, 0}}, {1, 1, 0, 0}};
    MarkedTree c{4, 2, {{0, 1}}, {0, 1, 0, 1}};
    EXPECT_EQ(Stratum::from_tree(a), Stratum::from_tree(b));
    EXPECT_NE(Stratum::from_tree(a), Stratum::from_tree(c));
    // two 3-vertex caterpillars on 8 marks with md 2,1,0 at different positions
    MarkedTree left{8, 3, {{0, 1}, {1, 2}}, {0, 0, 0, 0, 1, 1, 2, 2}};
    MarkedTree middle{8, 3, {{0, 1}, {1, 2}}, {0, 0, 0, 0, 2, 2, 1, 1}};
    MarkedTree right{8, 3, {{0, 1}, {1, 2}}, {0, 0, 0, 1, 1, 1, 2, 2}};
    EXPECT_NE(Stratum::from_tree(left), Stratum::from_tree(middle));
    EXPECT_EQ(induced_partition(Stratum::from_tree(left)).to_string(), "(1,2)");
    EXPECT_EQ(induced_partition(Stratum::from_tree(right)).to_string(), "(1,2)");
}

TEST(Trees, ValidationErrors) {
    MarkedTree disconnected{4, 2, {}, {0, 0, 1, 1}};
    EXPECT_THROW(disconnected.validate(), ValidationError);
    MarkedTree low_valence{4, 3, {{0, 1}, {1, 2}}, {0, 0, 2, 2}};
    EXPECT_THROW(low_valence.validate(), ValidationError);
    MarkedTree cyclic{6, 3, {{0, 1}, {1, 2}}, {0, 0, 1, 1, 2, 2}};
    cyclic.edges.push_back({2, 0});
    EXPECT_THROW(cyclic.validate(), ValidationError);
    MarkedTree one{4, 1, {}, {0, 0, 0, 0}};
    EXPECT_NO_THROW(one.validate());
    EXPECT_EQ(canonical_form(one).vertex_count, 1);
}

TEST(Trees, DimensionAndPartition) {
    for (int n = 3; n <= 8; ++n)
        for (const auto& s : all_strata(n)) {
            EXPECT_EQ(s.dim() + s.codim(), n - 3);
            EXPECT_EQ(dim_from_scratch(s.to_tree()), s.dim());
            EXPECT_EQ(induced_partition(s).total(), s.dim());
        }
    EXPECT_EQ(induced_partition(Stratum::single_vertex(6)).to_string(), "(3)");
    EXPECT_TRUE(induced_partition(caterpillar(7)).empty());
    EXPECT_EQ(caterpillar(7).dim(), 0);
}

TEST(Trees, CanonicalEncodingParentsPrecedeChildren) {
    for (const auto& s : all_strata(7)) {
        const auto& vs = s.vertices();
        EXPECT_EQ(vs[0].parent, -1);
        for (std::size_t v = 1; v < vs.size(); ++v) EXPECT_LT(vs[v].parent, static_cast<int>(v));
        EXPECT_EQ(s.vertex_of_mark(0), 0);
    }
}

TEST(Trees, ForgetCases) {
    // one vertex, drop a leg: the image dimension drops
    EXPECT_FALSE(forget_mark(Stratum::single_vertex(5), 4).has_value());
    // {0,1} | {2,3,4}: leg 1 sits on a trivalent vertex; the image is the interior of M_{0,4}
    Stratum s = Stratum::from_splits(5, {bit(2) | bit(3) | bit(4)});
    auto img = forget_mark(s, 1);
    ASSERT_TRUE(img.has_value());
    EXPECT_EQ(*img, Stratum::single_vertex(4));
    // leg 4 sits on the 4-valent vertex
    EXPECT_FALSE(forget_mark(s, 4).has_value());
    // keep everything: identity
    EXPECT_EQ(*forget_pushforward(s, full_mask(5)), s);
    EXPECT_THROW(forget_pushforward(s, bit(0) | bit(1)), ValidationError);
}

TEST(Trees, ForgetPreservesPartition) {
    for (int n = 5; n <= 8; ++n)
        for (const auto& s : all_strata(n))
            for (int j = 0; j < n; ++j) {
                auto img = forget_mark(s, j);
                if (!img) continue;
                EXPECT_EQ(img->dim(), s.dim());
                EXPECT_EQ(induced_partition(*img), induced_partition(s));
            }
}

TEST(Trees, ForgetIteratedMatchesRestriction) {
    // Dropping several marks one at a time agrees with restricting splits in one go
    // when no step hits a high-valence vertex.
    std::mt19937 rng(7);
    const auto& all = all_strata(8);
    for (int trial = 0; trial < 300; ++trial) {
        const Stratum& s = all[rng() % all.size()];
        Mask kept = full_mask(8);
        while (popcount(kept) > 5) kept &= ~bit(static_cast<int>(rng() % 8));
        auto img = forget_pushforward(s, kept);
        if (!img) continue;
        std::set<Mask> expect;
        for (Mask sp : s.splits()) {
            Mask r = 0;
            int pos = 0;
            for (int i = 0; i < 8; ++i)
                if (kept & bit(i)) {
                    if (sp & bit(i)) r |= bit(pos);
                    ++pos;
                }
            Mask all5 = full_mask(pos);
            if (r & 1) r = all5 & ~r;
            if (popcount(r) >= 2 && popcount(all5 & ~r) >= 2) expect.insert(r);
        }
        EXPECT_EQ(img->splits(), std::vector<Mask>(expect.begin(), expect.end()));
    }
}

TEST(Trees, GlueSubstitution) {
    Stratum host = Stratum::single_vertex(6);
    Stratum small = Stratum::from_splits(6, {full_mask(6) & ~(bit(0) | bit(1))});
    EXPECT_EQ(glue_substitution(host, 0, small), small);
    // identity substitution
    Stratum t = Stratum::from_splits(7, {bit(4) | bit(5) | bit(6)});
    for (int v = 0; v < t.vertex_count(); ++v)
        EXPECT_EQ(glue_substitution(t, v, Stratum::single_vertex(t.vertex(v).valence())), t);
    EXPECT_THROW(glue_substitution(t, 0, Stratum::single_vertex(4)), ValidationError);
}

TEST(Trees, GlueDimensionBookkeeping) {
    std::mt19937 rng(99);
    const auto& all = all_strata(7);
    int checked = 0;
    while (checked < 400) {
        const Stratum& host = all[rng() % all.size()];
        int v = static_cast<int>(rng() % host.vertex_count());
        int m = host.vertex(v).valence();
        if (m < 4) continue;
        const auto& smalls = all_strata(m);
        const Stratum& small = smalls[rng() % smalls.size()];
        Stratum g = glue_substitution(host, v, small);
        EXPECT_EQ(g.dim(), host.dim() - host.vertex(v).moduli_dim() + small.dim());
        EXPECT_EQ(dim_from_scratch(g.to_tree()), g.dim());
        ++checked;
    }
}

TEST(Partitions, RefinementOrder) {
    EXPECT_TRUE(refines(Partition({1, 1, 2}), Partition({2, 2})));
    EXPECT_TRUE(refines(Partition({1, 1, 2}), Partition({1, 3})));
    EXPECT_TRUE(refines(Partition({1, 1, 2}), Partition({4})));
    EXPECT_FALSE(refines(Partition({2, 2}), Partition({1, 3})));
    EXPECT_FALSE(refines(Partition({1, 3}), Partition({1, 1, 2})));
    EXPECT_TRUE(refines(Partition(), Partition()));
    for (int k = 0; k <= 6; ++k) {
        auto ps = partitions_of(k);
        for (const auto& a : ps) {
            EXPECT_TRUE(refines(a, a));
            for (const auto& b : ps) {
                if (a != b && refines(a, b)) {
                    EXPECT_FALSE(refines(b, a));
                }
                for (const auto& c : ps)
                    if (refines(a, b) && refines(b, c)) {
                        EXPECT_TRUE(refines(a, c));
                    }
            }
        }
    }
    EXPECT_EQ(partitions_of(6).size(), 11u);
}

TEST(Partitions, Realizability) {
    EXPECT_FALSE(realizable(Partition({1, 1, 1}), 7));
    EXPECT_TRUE(realizable(Partition({1, 2}), 7));
    EXPECT_TRUE(realizable(Partition({3}), 7));
    EXPECT_TRUE(realizable(Partition(), 5));
}
