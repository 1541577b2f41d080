#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "hdyn/errors.hpp"
#include "hdyn/partition.hpp"

namespace hdyn {

/// Set of marks as a bitmask; mark i is bit i.
using Mask = std::uint64_t;
inline constexpr int kMaxMarks = 64;

inline Mask full_mask(int n) { return n >= 64 ? ~Mask{0} : ((Mask{1} << n) - 1); }
inline Mask bit(int i) { return Mask{1} << i; }
inline int popcount(Mask m) { return std::popcount(m); }
inline int lowest_mark(Mask m) { return std::countr_zero(m); }

/// Removes mark j from the mask; marks above j shift down by one.
inline Mask compress_mask(Mask m, int j) {
    Mask low = m & (bit(j) - 1);
    Mask high = (m >> (j + 1)) << j;
    return low | high;
}

/// Inserts an empty slot at position j; marks at or above j shift up by one.
inline Mask expand_mask(Mask m, int j) {
    Mask low = m & (bit(j) - 1);
    Mask high = (m >> j) << (j + 1);
    return low | high;
}

/// A leg-labeled tree with explicit vertex ids, as accepted from input.
/// Marks are 0..n-1; vertex ids are 0..vertex_count-1.
struct MarkedTree {
    int n = 0;
    int vertex_count = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<int> leg_vertex;

    /// Throws ValidationError unless this is a stable tree: connected, acyclic,
    /// every mark attached, every vertex of valence at least 3.
    void validate() const {
        if (n < 3) throw ValidationError("a stable tree needs at least 3 marks");
        if (n > kMaxMarks) throw ValidationError("too many marks (max 64)");
        if (vertex_count < 1) throw ValidationError("tree has no vertices");
        if (static_cast<int>(leg_vertex.size()) != n)
            throw ValidationError("every mark must be attached to exactly one vertex");
        if (static_cast<int>(edges.size()) != vertex_count - 1)
            throw ValidationError("edge count must be vertex count minus one");
        std::vector<int> valence(vertex_count, 0);
        for (int v : leg_vertex) {
            if (v < 0 || v >= vertex_count) throw ValidationError("leg attached to unknown vertex");
            ++valence[v];
        }
        std::vector<int> parent(vertex_count);
        for (int i = 0; i < vertex_count; ++i) parent[i] = i;
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (auto [a, b] : edges) {
            if (a < 0 || b < 0 || a >= vertex_count || b >= vertex_count)
                throw ValidationError("edge references unknown vertex");
            if (a == b) throw ValidationError("self-loop in tree");
            int ra = find(a), rb = find(b);
            if (ra == rb) throw ValidationError("tree contains a cycle");
            parent[ra] = rb;
            ++valence[a];
            ++valence[b];
        }
        for (int v = 0; v < vertex_count; ++v)
            if (valence[v] < 3) throw ValidationError("vertex " + std::to_string(v) + " has valence < 3");
    }
};

/// A vertex of a stratum tree, described by the partition of the marks induced by its flags.
/// Blocks of size one are legs; larger blocks are edges (the marks beyond that edge).
struct Vertex {
    std::vector<Mask> blocks; // sorted by lowest mark
    int parent = -1;          // canonical BFS parent, -1 for the root

    int valence() const { return static_cast<int>(blocks.size()); }
    int moduli_dim() const { return valence() - 3; }

    /// Index of the flag leading toward mark i.
    int flag_toward(int mark) const {
        for (std::size_t f = 0; f < blocks.size(); ++f)
            if (blocks[f] & bit(mark)) return static_cast<int>(f);
        throw InternalError("mark not covered by vertex blocks");
    }
};

/// Canonical boundary stratum of M_{0,n}: a stable n-marked tree up to isomorphism.
///
/// Stored as its split system: one mask per edge, normalized to the side that does not
/// contain mark 0, sorted ascending. Two trees are isomorphic as leg-labeled trees exactly
/// when their split systems agree, so equality of strata is equality of split vectors.
/// Vertices are kept in canonical BFS order rooted at the vertex carrying mark 0, with
/// children ordered by the lowest mark beyond them.
class Stratum {
public:
    Stratum() = default;

    static Stratum single_vertex(int n) { return from_splits(n, {}); }

    static Stratum from_splits(int n, std::vector<Mask> splits) {
        if (n < 3) throw ValidationError("strata need at least 3 marks");
        if (n > kMaxMarks) throw ValidationError("too many marks (max 64)");
        Mask all = full_mask(n);
        for (Mask& s : splits) {
            if ((s & ~all) != 0) throw ValidationError("split mentions an unknown mark");
            if (s & bit(0)) s = all & ~s;
            if (popcount(s) < 2 || popcount(all & ~s) < 2)
                throw ValidationError("split does not leave two marks on each side");
        }
        std::sort(splits.begin(), splits.end());
        if (std::adjacent_find(splits.begin(), splits.end()) != splits.end())
            throw ValidationError("duplicate split");
        for (std::size_t i = 0; i < splits.size(); ++i)
            for (std::size_t j = i + 1; j < splits.size(); ++j) {
                Mask a = splits[i], b = splits[j];
                if ((a & b) != 0 && (a & b) != a && (a & b) != b)
                    throw ValidationError("incompatible splits");
            }
        Stratum s;
        s.n_ = n;
        s.splits_ = std::move(splits);
        s.build_vertices();
        return s;
    }

    static Stratum from_tree(const MarkedTree& t) {
        t.validate();
        std::vector<std::vector<int>> adj(t.vertex_count);
        for (auto [a, b] : t.edges) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        std::vector<Mask> below(t.vertex_count, 0);
        for (int i = 0; i < t.n; ++i) below[t.leg_vertex[i]] |= bit(i);
        // post-order accumulation from root 0
        std::vector<int> order, par(t.vertex_count, -1);
        std::vector<bool> seen(t.vertex_count, false);
        std::vector<int> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            order.push_back(v);
            for (int u : adj[v])
                if (!seen[u]) {
                    seen[u] = true;
                    par[u] = v;
                    stack.push_back(u);
                }
        }
        std::vector<Mask> splits;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int v = *it;
            if (par[v] >= 0) {
                below[par[v]] |= below[v];
                splits.push_back(below[v]);
            }
        }
        return from_splits(t.n, std::move(splits));
    }

    int marks() const { return n_; }
    const std::vector<Mask>& splits() const { return splits_; }
    const std::vector<Vertex>& vertices() const { return vertices_; }
    const Vertex& vertex(int v) const { return vertices_.at(v); }
    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int codim() const { return static_cast<int>(splits_.size()); }
    int dim() const { return n_ - 3 - codim(); }

    int vertex_of_mark(int mark) const {
        for (int v = 0; v < vertex_count(); ++v)
            for (Mask b : vertices_[v].blocks)
                if (b == bit(mark)) return v;
        throw InternalError("mark has no vertex");
    }

    /// Index of the vertex whose blocks are exactly `blocks` (any order), or -1.
    int find_vertex(std::vector<Mask> blocks) const {
        std::sort(blocks.begin(), blocks.end(), [](Mask a, Mask b) { return lowest_mark(a) < lowest_mark(b); });
        for (int v = 0; v < vertex_count(); ++v)
            if (vertices_[v].blocks == blocks) return v;
        return -1;
    }

    /// Canonical explicit tree: vertices in BFS order, so parents[v] < v for v > 0.
    MarkedTree to_tree() const {
        MarkedTree t;
        t.n = n_;
        t.vertex_count = vertex_count();
        t.leg_vertex.assign(n_, -1);
        for (int v = 0; v < vertex_count(); ++v) {
            if (vertices_[v].parent >= 0) t.edges.emplace_back(vertices_[v].parent, v);
            for (Mask b : vertices_[v].blocks)
                if (popcount(b) == 1) t.leg_vertex[lowest_mark(b)] = v;
        }
        return t;
    }

    auto operator<=>(const Stratum& o) const {
        if (auto c = n_ <=> o.n_; c != 0) return c;
        return splits_ <=> o.splits_;
    }
    bool operator==(const Stratum& o) const { return n_ == o.n_ && splits_ == o.splits_; }

private:
    void build_vertices() {
        Mask all = full_mask(n_);
        std::vector<std::vector<Mask>> raw(1);
        for (int i = 0; i < n_; ++i) raw[0].push_back(bit(i));
        // insert larger splits first; any order works for a compatible system
        std::vector<Mask> order = splits_;
        std::sort(order.begin(), order.end(), [](Mask a, Mask b) {
            return popcount(a) != popcount(b) ? popcount(a) > popcount(b) : a < b;
        });
        for (Mask s : order) {
            Mask sc = all & ~s;
            bool placed = false;
            for (std::size_t v = 0; v < raw.size() && !placed; ++v) {
                int inside = 0, outside = 0;
                bool ok = true;
                for (Mask b : raw[v]) {
                    if ((b & s) == b) ++inside;
                    else if ((b & sc) == b) ++outside;
                    else { ok = false; break; }
                }
                if (!ok || inside < 2 || outside < 2) continue;
                std::vector<Mask> in_side{sc}, out_side{s};
                for (Mask b : raw[v]) ((b & s) == b ? in_side : out_side).push_back(b);
                raw[v] = std::move(out_side);
                raw.push_back(std::move(in_side));
                placed = true;
            }
            if (!placed) throw InternalError("split could not be placed in tree");
        }
        for (auto& blocks : raw)
            std::sort(blocks.begin(), blocks.end(), [](Mask a, Mask b) { return lowest_mark(a) < lowest_mark(b); });

        // BFS from the vertex holding mark 0.
        std::map<Mask, int> owner; // edge block -> vertex having that block
        int root = -1;
        for (std::size_t v = 0; v < raw.size(); ++v)
            for (Mask b : raw[v]) {
                if (popcount(b) >= 2) owner[b] = static_cast<int>(v);
                if (b == bit(0)) root = static_cast<int>(v);
            }
        std::vector<int> new_index(raw.size(), -1);
        vertices_.clear();
        std::queue<std::pair<int, int>> q; // raw vertex, parent new index
        q.emplace(root, -1);
        std::vector<int> order_raw;
        while (!q.empty()) {
            auto [v, p] = q.front();
            q.pop();
            new_index[v] = static_cast<int>(vertices_.size());
            vertices_.push_back(Vertex{raw[v], p});
            // children: edge blocks of v not leading to parent, ordered by lowest mark
            std::vector<std::pair<int, int>> kids;
            for (Mask b : raw[v]) {
                if (popcount(b) < 2) continue;
                if (b & bit(0)) continue; // leads toward the root
                int child = owner.at(all & ~b);
                kids.emplace_back(lowest_mark(b), child);
            }
            std::sort(kids.begin(), kids.end());
            for (auto [lm, c] : kids) q.emplace(c, new_index[v]);
        }
        if (vertices_.size() != raw.size()) throw InternalError("tree BFS did not reach every vertex");
    }

    int n_ = 0;
    std::vector<Mask> splits_;
    std::vector<Vertex> vertices_;
};

/// Canonical representative of the isomorphism class of `t`.
inline MarkedTree canonical_form(const MarkedTree& t) { return Stratum::from_tree(t).to_tree(); }

/// For each vertex id of `t`, the index of the same vertex in `s = Stratum::from_tree(t)`.
inline std::vector<int> canonical_vertex_map(const MarkedTree& t, const Stratum& s) {
    std::vector<std::vector<int>> adj(t.vertex_count);
    for (auto [a, b] : t.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<Mask> below(t.vertex_count, 0), legs(t.vertex_count, 0);
    for (int i = 0; i < t.n; ++i) legs[t.leg_vertex[i]] |= bit(i);
    std::vector<int> order, par(t.vertex_count, -1);
    std::vector<bool> seen(t.vertex_count, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (int u : adj[v])
            if (!seen[u]) {
                seen[u] = true;
                par[u] = v;
                stack.push_back(u);
            }
    }
    for (int v = 0; v < t.vertex_count; ++v) below[v] = legs[v];
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if (par[*it] >= 0) below[par[*it]] |= below[*it];
    Mask all = full_mask(t.n);
    std::vector<int> out(t.vertex_count);
    for (int v = 0; v < t.vertex_count; ++v) {
        std::vector<Mask> blocks;
        for (int i = 0; i < t.n; ++i)
            if (legs[v] & bit(i)) blocks.push_back(bit(i));
        for (int u : adj[v]) blocks.push_back(u == par[v] ? (all & ~below[v]) : below[u]);
        out[v] = s.find_vertex(blocks);
        if (out[v] < 0) throw InternalError("vertex not found in canonical form");
    }
    return out;
}

/// Renames mark i to new_index[i] in a stratum on new_index.size() marks.
inline Stratum relabel_marks(const Stratum& s, const std::vector<int>& new_index) {
    int n = s.marks();
    if (static_cast<int>(new_index.size()) != n) throw ValidationError("relabeling has the wrong size");
    std::vector<Mask> splits;
    for (Mask sp : s.splits()) {
        Mask r = 0;
        for (int i = 0; i < n; ++i)
            if (sp & bit(i)) r |= bit(new_index[i]);
        splits.push_back(r);
    }
    return Stratum::from_splits(n, std::move(splits));
}

/// Multiset of nonzero vertex moduli dimensions.
inline Partition induced_partition(const Stratum& s) {
    std::vector<int> parts;
    for (const auto& v : s.vertices())
        if (v.moduli_dim() > 0) parts.push_back(v.moduli_dim());
    return Partition(std::move(parts));
}

/// Forgets mark j and stabilizes. Returns nullopt when the image has smaller dimension
/// (the leg sat on a vertex of valence at least 4), i.e. the pushforward class is zero.
/// Marks above j are renumbered down by one.
inline std::optional<Stratum> forget_mark(const Stratum& s, int j) {
    if (j < 0 || j >= s.marks()) throw ValidationError("forgotten mark out of range");
    if (s.marks() - 1 < 3) throw ValidationError("cannot forget below 3 marks");
    const Vertex& v0 = s.vertex(s.vertex_of_mark(j));
    if (v0.valence() >= 4) return std::nullopt;
    int n1 = s.marks() - 1;
    Mask all = full_mask(n1);
    std::set<Mask> out;
    for (Mask sp : s.splits()) {
        Mask c = compress_mask(sp, j);
        if (c & bit(0)) c = all & ~c;
        if (popcount(c) >= 2 && popcount(all & ~c) >= 2) out.insert(c);
    }
    Stratum image = Stratum::from_splits(n1, {out.begin(), out.end()});
    if (image.dim() != s.dim()) throw InternalError("forgetful stabilization changed dimension");
    return image;
}

/// Pushforward of [S] along the forgetful map keeping the marks in `kept`.
/// Kept marks are renumbered in increasing order. nullopt means the class is zero.
inline std::optional<Stratum> forget_pushforward(const Stratum& s, Mask kept) {
    kept &= full_mask(s.marks());
    if (popcount(kept) < 3) throw ValidationError("forgetful map must keep at least 3 marks");
    std::optional<Stratum> cur = s;
    for (int j = s.marks() - 1; j >= 0; --j) {
        if (kept & bit(j)) continue;
        cur = forget_mark(*cur, j);
        if (!cur) return std::nullopt;
    }
    return cur;
}

/// Splits contributed by substituting `small` (marks = flags of vertex v of `host`, in the
/// host's block order) into vertex v.
inline std::vector<Mask> lifted_splits(const Stratum& host, int v, const Stratum& small) {
    const auto& blocks = host.vertex(v).blocks;
    if (small.marks() != static_cast<int>(blocks.size()))
        throw ValidationError("substituted stratum must be marked by the flags of the vertex");
    Mask all = full_mask(host.marks());
    std::vector<Mask> out;
    for (Mask t : small.splits()) {
        Mask lifted = 0;
        for (int f = 0; f < small.marks(); ++f)
            if (t & bit(f)) lifted |= blocks[f];
        if (lifted & bit(0)) lifted = all & ~lifted;
        out.push_back(lifted);
    }
    return out;
}

/// Gluing: replaces vertex v of `host` by the tree of `small`, whose mark f corresponds to
/// flag f of v (host block order).
inline Stratum glue_substitution(const Stratum& host, int v, const Stratum& small) {
    auto splits = host.splits();
    auto extra = lifted_splits(host, v, small);
    splits.insert(splits.end(), extra.begin(), extra.end());
    return Stratum::from_splits(host.marks(), std::move(splits));
}

/// A fixed zero-dimensional stratum: the caterpillar with marks 0,1 on one end.
inline Stratum caterpillar(int n) {
    std::vector<Mask> splits;
    // sides not containing mark 0: {i+1, ..., n-1} for i = 1..n-3 leaves {0,1,..,i} | rest
    for (int i = 2; i <= n - 2; ++i) splits.push_back(full_mask(n) & ~full_mask(i));
    return Stratum::from_splits(n, std::move(splits));
}

namespace detail {

inline std::vector<Stratum> grow_by_one_leg(const std::vector<Stratum>& smaller) {
    std::vector<Stratum> out;
    if (smaller.empty()) return out;
    int n0 = smaller.front().marks();
    int n = n0 + 1;
    int j = n0; // new mark
    Mask all0 = full_mask(n0);
    for (const Stratum& t : smaller) {
        const auto& splits = t.splits();
        // (a) attach the new leg to an existing vertex
        for (const Vertex& v : t.vertices()) {
            std::vector<Mask> ns;
            for (Mask s : splits) {
                bool on_s_side = std::any_of(v.blocks.begin(), v.blocks.end(),
                                             [&](Mask b) { return (b | s) == all0; });
                ns.push_back(on_s_side ? (s | bit(j)) : s);
            }
            out.push_back(Stratum::from_splits(n, std::move(ns)));
        }
        // (b) subdivide an edge with a new trivalent vertex carrying the leg
        for (Mask e : splits) {
            std::vector<Mask> ns;
            for (Mask s : splits) {
                if (s == e) continue;
                bool strictly_contains = (s & e) == e;
                ns.push_back(strictly_contains ? (s | bit(j)) : s);
            }
            ns.push_back(e);
            ns.push_back(e | bit(j));
            out.push_back(Stratum::from_splits(n, std::move(ns)));
        }
        // (c) sprout a new trivalent vertex on an existing leg
        for (int i = 0; i < n0; ++i) {
            std::vector<Mask> ns;
            for (Mask s : splits) ns.push_back((s & bit(i)) ? (s | bit(j)) : s);
            ns.push_back(bit(i) | bit(j));
            out.push_back(Stratum::from_splits(n, std::move(ns)));
        }
    }
    return out;
}

} // namespace detail

/// Every stable n-marked tree, sorted. Each tree is produced exactly once: a stable tree on
/// n marks is recovered uniquely from its image after forgetting the last mark together with
/// the position of that leg (vertex, edge, or leg).
inline const std::vector<Stratum>& all_strata(int n) {
    if (n < 3) throw ValidationError("strata need at least 3 marks");
    if (n > 12) throw ResourceLimitError("strata enumeration is bounded to n <= 12");
    static std::mutex mu;
    static std::map<int, std::vector<Stratum>> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    std::vector<Stratum> cur{Stratum::single_vertex(3)};
    for (int m = 4; m <= n; ++m) {
        if (auto it = cache.find(m); it != cache.end()) {
            cur = it->second;
            continue;
        }
        cur = detail::grow_by_one_leg(cur);
    }
    std::sort(cur.begin(), cur.end());
    return cache.emplace(n, std::move(cur)).first->second;
}

/// One representative per isomorphism class of stable n-trees with n-3-k edges, sorted.
inline std::vector<Stratum> enumerate_strata(int n, int k, std::size_t limit = 2'000'000) {
    if (n < 3) throw ValidationError("n must be at least 3");
    if (k < 0 || k > n - 3) throw ValidationError("k must satisfy 0 <= k <= n-3");
    std::vector<Stratum> out;
    for (const Stratum& s : all_strata(n))
        if (s.dim() == k) out.push_back(s);
    if (out.size() > limit)
        throw ResourceLimitError("stratum count " + std::to_string(out.size()) + " exceeds limit " +
                                 std::to_string(limit));
    return out;
}

} // namespace hdyn
