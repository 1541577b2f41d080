#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <numeric>
#include <vector>

#include "hdyn/numeric.hpp"
#include "hdyn/partition.hpp"
#include "hdyn/permutation.hpp"
#include "hdyn/tree.hpp"

namespace hdyn {

/// Discrete data (A, B, d, F, br, rm) of a genus-zero Hurwitz space, index based.
/// Marks are referred to by position in A and B; names are carried for I/O.
struct HurwitzData {
    std::vector<std::string> A;
    std::vector<std::string> B;
    int d = 1;
    std::vector<int> F;         // per a: index into B
    std::vector<Partition> br;  // per b
    std::vector<int> rm;        // per a
    std::optional<std::vector<int>> forget_to; // indices into A
    std::optional<std::vector<int>> identify;  // per b: index into A

    int num_a() const { return static_cast<int>(A.size()); }
    int num_b() const { return static_cast<int>(B.size()); }

    /// Kept source marks A' (all of A when forget_to is absent), increasing.
    std::vector<int> kept() const {
        std::vector<int> k;
        if (forget_to) k = *forget_to;
        else
            for (int a = 0; a < num_a(); ++a) k.push_back(a);
        std::sort(k.begin(), k.end());
        return k;
    }
};

enum class HurwitzStatus { Plain, FullyMarked, Invalid };

struct HurwitzValidation {
    HurwitzStatus status = HurwitzStatus::Invalid;
    std::string reason;
};

inline std::string status_name(HurwitzStatus s) {
    switch (s) {
    case HurwitzStatus::Plain: return "Plain";
    case HurwitzStatus::FullyMarked: return "FullyMarked";
    default: return "Invalid";
    }
}

inline HurwitzValidation validate(const HurwitzData& h) {
    auto invalid = [](std::string why) { return HurwitzValidation{HurwitzStatus::Invalid, std::move(why)}; };
    if (h.num_a() < 3) return invalid("|A| must be at least 3");
    if (h.num_b() < 3) return invalid("|B| must be at least 3");
    if (h.num_a() > kMaxMarks || h.num_b() > kMaxMarks) return invalid("too many marks");
    if (h.d < 1) return invalid("degree must be positive");
    if (static_cast<int>(h.F.size()) != h.num_a() || static_cast<int>(h.rm.size()) != h.num_a())
        return invalid("F and rm must be defined on every a");
    if (static_cast<int>(h.br.size()) != h.num_b()) return invalid("br must be defined on every b");
    std::set<std::string> names(h.A.begin(), h.A.end());
    if (static_cast<int>(names.size()) != h.num_a()) return invalid("duplicate names in A");
    names = std::set<std::string>(h.B.begin(), h.B.end());
    if (static_cast<int>(names.size()) != h.num_b()) return invalid("duplicate names in B");
    for (int a = 0; a < h.num_a(); ++a) {
        if (h.F[a] < 0 || h.F[a] >= h.num_b()) return invalid("F(" + h.A[a] + ") is not in B");
        if (h.rm[a] < 1) return invalid("rm(" + h.A[a] + ") must be positive");
    }
    for (int b = 0; b < h.num_b(); ++b)
        if (h.br[b].total() != h.d) return invalid("br(" + h.B[b] + ") is not a partition of d");
    int rh = 0;
    for (const auto& p : h.br) rh += h.d - static_cast<int>(p.length());
    if (rh != 2 * h.d - 2)
        return invalid("Condition 1 fails: sum of (d - length br(b)) is " + std::to_string(rh) + ", expected " +
                       std::to_string(2 * h.d - 2));
    bool full = true;
    for (int b = 0; b < h.num_b(); ++b) {
        std::map<int, int> need;
        for (int r : h.br[b].parts()) ++need[r];
        std::map<int, int> have;
        for (int a = 0; a < h.num_a(); ++a)
            if (h.F[a] == b) ++have[h.rm[a]];
        for (auto [r, m] : have)
            if (need[r] < m)
                return invalid("Condition 2 fails over " + h.B[b] + ": ramification profile is not a submultiset of br");
        if (have != need) full = false;
    }
    std::vector<int> kept = h.kept();
    if (h.forget_to) {
        if (kept.size() < 3) return invalid("forget_to must keep at least 3 marks");
        for (std::size_t i = 0; i < kept.size(); ++i) {
            if (kept[i] < 0 || kept[i] >= h.num_a()) return invalid("forget_to names an unknown mark");
            if (i && kept[i] == kept[i - 1]) return invalid("forget_to repeats a mark");
        }
    }
    if (h.identify) {
        const auto& id = *h.identify;
        if (static_cast<int>(id.size()) != h.num_b()) return invalid("identify must be defined on every b");
        if (kept.size() != id.size()) return invalid("identify must be a bijection B -> A'");
        std::vector<int> sorted = id;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != kept) return invalid("identify must be a bijection B -> A'");
    }
    return {full ? HurwitzStatus::FullyMarked : HurwitzStatus::Plain, ""};
}

inline void require_valid(const HurwitzData& h) {
    auto v = validate(h);
    if (v.status == HurwitzStatus::Invalid) throw ValidationError("invalid Hurwitz data: " + v.reason);
}

inline void require_fully_marked(const HurwitzData& h) {
    auto v = validate(h);
    if (v.status == HurwitzStatus::Invalid) throw ValidationError("invalid Hurwitz data: " + v.reason);
    if (v.status != HurwitzStatus::FullyMarked) throw ValidationError("Hurwitz data is not fully marked");
}

struct FullyMarked {
    HurwitzData data;
    Integer deg_nu = 1;
};

/// Adds a(b,r) for every unmarked preimage; deg nu counts relabelings of the added marks
/// preserving F and rm.
inline FullyMarked fully_mark(const HurwitzData& h) {
    require_valid(h);
    FullyMarked out{h, 1};
    if (!out.data.forget_to) out.data.forget_to = h.kept();
    std::set<std::string> names(h.A.begin(), h.A.end());
    for (int b = 0; b < h.num_b(); ++b) {
        std::map<int, int> need;
        for (int r : h.br[b].parts()) ++need[r];
        for (int a = 0; a < h.num_a(); ++a)
            if (h.F[a] == b) --need[h.rm[a]];
        for (auto [r, m] : need) {
            out.deg_nu *= factorial(static_cast<unsigned>(m));
            for (int i = 0; i < m; ++i) {
                std::string name = "a(" + h.B[b] + "," + std::to_string(r) + ")";
                if (i > 0) name += "#" + std::to_string(i + 1);
                while (names.count(name)) name += "'";
                names.insert(name);
                out.data.A.push_back(name);
                out.data.F.push_back(b);
                out.data.rm.push_back(r);
            }
        }
    }
    return out;
}

inline constexpr std::uint64_t kDefaultTupleLimit = 50'000'000;

namespace detail {

/// Calls visit(g) for every tuple g (indexed by b) with cycle types br, product over `order`
/// equal to the identity, transitive, and g[order[0]] the fixed class representative.
/// Returns the class size of the first branch point (the conjugation multiplier).
inline Integer for_each_tuple(const HurwitzData& h, const std::vector<int>& order, std::uint64_t limit,
                              const std::function<void(const std::vector<Perm>&)>& visit) {
    int n = h.num_b(), d = h.d;
    if (d > kMaxDegree) throw ResourceLimitError("degree bounded to 8");
    Integer work = 1;
    for (int i = 1; i + 1 < n; ++i) {
        work *= static_cast<unsigned>(conjugacy_class(d, h.br[order[i]]).size());
        if (work > limit)
            throw ResourceLimitError("monodromy enumeration exceeds the tuple limit of " + std::to_string(limit));
    }
    std::vector<Perm> g(n);
    g[order[0]] = class_representative(d, h.br[order[0]]);
    const Partition& last_type = h.br[order[n - 1]];
    std::function<void(int, const Perm&)> rec = [&](int i, const Perm& prefix) {
        if (i == n - 1) {
            Perm last = inverse(prefix);
            if (cycle_type(last) != last_type) return;
            g[order[n - 1]] = last;
            if (orbits_of(d, g).second != 1) return;
            visit(g);
            return;
        }
        for (const Perm& p : conjugacy_class(d, h.br[order[i]])) {
            g[order[i]] = p;
            rec(i + 1, mul(prefix, p));
        }
    };
    rec(1, g[order[0]]);
    return class_size(d, h.br[order[0]]);
}

inline Integer labeling_count(const HurwitzData& h, const std::vector<Perm>& g) {
    Integer l = 1;
    for (int b = 0; b < h.num_b(); ++b) {
        std::map<int, int> mult;
        for (const auto& c : cycles_of(g[b])) ++mult[static_cast<int>(c.size())];
        for (auto [r, m] : mult) l *= factorial(static_cast<unsigned>(m));
    }
    return l;
}

inline std::vector<int> default_order(int n) {
    std::vector<int> o(n);
    for (int i = 0; i < n; ++i) o[i] = i;
    return o;
}

} // namespace detail

/// Number of connected fully marked covers: orbits of labeled transitive monodromy tuples
/// under simultaneous conjugation, via sum over tuples of labelings * |stabilizer| / d!.
inline Integer count_covers(const HurwitzData& h, const std::vector<int>& order,
                            std::uint64_t limit = kDefaultTupleLimit) {
    require_fully_marked(h);
    if (static_cast<int>(order.size()) != h.num_b()) throw ValidationError("product order must list every b");
    Integer sum = 0;
    Integer mult = detail::for_each_tuple(h, order, limit, [&](const std::vector<Perm>& g) {
        sum += detail::labeling_count(h, g) * cycle_fixing_centralizer_order(h.d, g);
    });
    Integer total = sum * mult;
    Integer df = factorial(static_cast<unsigned>(h.d));
    if (total % df != 0) throw InternalError("orbit count is not an integer");
    return total / df;
}

inline std::string data_key(const HurwitzData& h) {
    std::ostringstream os;
    os << h.d << '|';
    for (const auto& p : h.br) os << p.to_string();
    os << '|';
    for (int a = 0; a < h.num_a(); ++a) os << h.F[a] << ':' << h.rm[a] << ',';
    return os.str();
}

inline Integer count_covers(const HurwitzData& h, std::uint64_t limit = kDefaultTupleLimit) {
    static std::mutex mu;
    static std::map<std::string, Integer> cache;
    std::string key = data_key(h);
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    Integer c = count_covers(h, detail::default_order(h.num_b()), limit);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, c);
    return c;
}

/// Combinatorial type of an admissible cover over a target stratum tau.
/// sigma is the source stratum on A^full; fvert and dvert are indexed by sigma's canonical
/// vertices; source nodes are identified by their splits of A^full, with their local degree
/// and the target edge (split of B) under them.
struct CoverType {
    Stratum sigma;
    Stratum tau;
    std::vector<int> fvert;
    std::vector<int> dvert;
    std::map<Mask, int> node_r;
    std::map<Mask, Mask> node_edge;

    Integer multiplicity() const {
        Integer m = 1;
        for (const auto& [s, r] : node_r) m *= r;
        return m;
    }

    bool operator<(const CoverType& o) const {
        return std::tie(sigma, fvert, node_r, node_edge) < std::tie(o.sigma, o.fvert, o.node_r, o.node_edge);
    }
    bool operator==(const CoverType& o) const {
        return sigma == o.sigma && fvert == o.fvert && node_r == o.node_r && node_edge == o.node_edge;
    }
};

/// Restricted data at source vertex v: marks are the flags of v, targets the flags of f(v),
/// both in block order.
inline HurwitzData vertex_data(const HurwitzData& h, const CoverType& g, int v) {
    const Vertex& sv = g.sigma.vertex(v);
    const Vertex& tw = g.tau.vertex(g.fvert.at(v));
    Mask all_b = full_mask(g.tau.marks());
    HurwitzData out;
    for (int j = 0; j < sv.valence(); ++j) out.A.push_back("s" + std::to_string(j));
    for (int j = 0; j < tw.valence(); ++j) out.B.push_back("t" + std::to_string(j));
    std::vector<std::vector<int>> profile(tw.valence());
    for (Mask x : sv.blocks) {
        Mask target;
        int r;
        if (popcount(x) == 1) {
            int a = lowest_mark(x);
            target = bit(h.F[a]);
            r = h.rm[a];
        } else {
            Mask s = (x & 1) ? (full_mask(g.sigma.marks()) & ~x) : x;
            r = g.node_r.at(s);
            target = g.node_edge.at(s);
        }
        int idx = -1;
        for (int j = 0; j < tw.valence(); ++j)
            if (tw.blocks[j] == target || tw.blocks[j] == (all_b & ~target)) idx = j;
        if (idx < 0) throw InternalError("source flag does not lie over a flag of its target vertex");
        out.F.push_back(idx);
        out.rm.push_back(r);
        profile[idx].push_back(r);
    }
    out.d = g.dvert.at(v);
    for (auto& p : profile) {
        if (p.empty()) throw InternalError("target flag without preimage");
        out.br.emplace_back(std::move(p));
    }
    return out;
}

inline Integer type_count(const HurwitzData& h, const CoverType& g, std::uint64_t limit = kDefaultTupleLimit) {
    Integer c = 1;
    for (int v = 0; v < g.sigma.vertex_count(); ++v) c *= count_covers(vertex_data(h, g, v), limit);
    return c;
}

struct CoverTypeCount {
    CoverType type;
    Integer count;          // product of per-vertex cover counts
    Integer m;              // product of node local degrees
    Rational degenerations; // covers near tau degenerating to this type, from global monodromy
};

namespace detail {

/// Positions of B in a depth-first order of tau (every vertex subtree is an interval),
/// together with each tau vertex's interval.
struct TauLayout {
    std::vector<int> order;                 // position -> b
    std::vector<std::pair<int, int>> span;  // per tau vertex: [lo, hi)
    std::vector<std::vector<int>> child_of; // per tau vertex, per flag: child vertex or -1
};

inline TauLayout layout(const Stratum& tau) {
    TauLayout L;
    int nv = tau.vertex_count();
    L.span.assign(nv, {0, 0});
    L.child_of.assign(nv, {});
    Mask all = full_mask(tau.marks());
    std::map<Mask, int> child_by_block;
    for (int u = 1; u < nv; ++u) {
        Mask up = 0;
        for (Mask b : tau.vertex(u).blocks)
            if (b & 1) up = b;
        child_by_block[all & ~up] = u;
    }
    std::function<void(int)> dfs = [&](int w) {
        L.span[w].first = static_cast<int>(L.order.size());
        const auto& blocks = tau.vertex(w).blocks;
        L.child_of[w].assign(blocks.size(), -1);
        for (std::size_t f = 0; f < blocks.size(); ++f) {
            Mask b = blocks[f];
            if (popcount(b) == 1) {
                L.order.push_back(lowest_mark(b));
            } else if (!(b & 1)) {
                int u = child_by_block.at(b);
                L.child_of[w][f] = u;
                dfs(u);
            }
        }
        L.span[w].second = static_cast<int>(L.order.size());
    };
    dfs(0);
    return L;
}

} // namespace detail

/// All cover types over tau, found by degenerating every labeled global monodromy tuple
/// along tau, with per-vertex counts and node multiplicities.
inline std::vector<CoverTypeCount> enumerate_cover_types(const HurwitzData& h, const Stratum& tau,
                                                         std::uint64_t limit = kDefaultTupleLimit) {
    require_fully_marked(h);
    if (tau.marks() != h.num_b()) throw ValidationError("target stratum must be marked by B");
    int d = h.d, na = h.num_a();
    auto L = detail::layout(tau);
    int nv = tau.vertex_count();
    Mask all_b = full_mask(h.num_b());
    std::map<CoverType, Rational> tally;
    Rational dfact = Rational(factorial(static_cast<unsigned>(d)));

    std::vector<std::vector<int>> marks_over(h.num_b());
    for (int a = 0; a < na; ++a) marks_over[h.F[a]].push_back(a);

    const Integer mult = class_size(d, h.br[L.order[0]]);
    detail::for_each_tuple(h, L.order, limit, [&](const std::vector<Perm>& g) {
        auto interval = [&](int lo, int hi) {
            Perm p = identity_perm(d);
            for (int i = lo; i < hi; ++i) p = mul(p, g[L.order[i]]);
            return p;
        };
        // per tau vertex: flag monodromies and orbits
        std::vector<std::vector<int>> orbit(nv);
        std::vector<int> base(nv + 1, 0);
        for (int w = 0; w < nv; ++w) {
            const auto& blocks = tau.vertex(w).blocks;
            std::vector<Perm> gens;
            for (std::size_t f = 0; f < blocks.size(); ++f) {
                if (popcount(blocks[f]) == 1) gens.push_back(g[lowest_mark(blocks[f])]);
                else if (L.child_of[w][f] >= 0) {
                    auto [lo, hi] = L.span[L.child_of[w][f]];
                    gens.push_back(interval(lo, hi));
                } else {
                    gens.push_back(inverse(interval(L.span[w].first, L.span[w].second)));
                }
            }
            auto [ids, count] = orbits_of(d, gens);
            orbit[w] = std::move(ids);
            base[w + 1] = base[w] + count;
        }
        int source_vertices = base[nv];
        // nodes: cycles of each edge monodromy
        struct Node {
            int u, v, r;
            Mask target;
        };
        std::vector<Node> nodes;
        for (int u = 1; u < nv; ++u) {
            int p = tau.vertex(u).parent;
            auto [lo, hi] = L.span[u];
            Mask below = 0;
            for (int i = lo; i < hi; ++i) below |= bit(L.order[i]);
            Mask target = (below & 1) ? (all_b & ~below) : below;
            for (const auto& c : cycles_of(interval(lo, hi)))
                nodes.push_back({base[u] + orbit[u][c[0]], base[p] + orbit[p][c[0]], static_cast<int>(c.size()), target});
        }
        if (static_cast<int>(nodes.size()) != source_vertices - 1)
            throw InternalError("degenerate source is not a tree");
        Rational weight = Rational(cycle_fixing_centralizer_order(d, g)) * Rational(mult) / dfact;

        // labelings: per b, bijections from marks to cycles of equal length
        std::vector<std::vector<std::vector<int>>> cyc(h.num_b());
        for (int b = 0; b < h.num_b(); ++b) cyc[b] = cycles_of(g[b]);
        std::vector<int> leg_vertex(na, -1);
        std::function<void(int)> label = [&](int b) {
            if (b == h.num_b()) {
                MarkedTree t;
                t.n = na;
                t.vertex_count = source_vertices;
                for (const auto& nd : nodes) t.edges.emplace_back(nd.u, nd.v);
                t.leg_vertex = leg_vertex;
                Stratum sigma = Stratum::from_tree(t);
                auto vmap = canonical_vertex_map(t, sigma);
                CoverType ct{sigma, tau, std::vector<int>(sigma.vertex_count()), std::vector<int>(sigma.vertex_count()), {}, {}};
                for (int w = 0; w < nv; ++w)
                    for (int x = 0; x < d; ++x) ct.fvert[vmap[base[w] + orbit[w][x]]] = w;
                for (int w = 0; w < nv; ++w)
                    for (int x = 0; x < d; ++x) ++ct.dvert[vmap[base[w] + orbit[w][x]]];
                // each node contributes to the splits of sigma: find the split for edge (u,v)
                Mask all_a = full_mask(na);
                for (const auto& nd : nodes) {
                    const Vertex& a = sigma.vertex(vmap[nd.u]);
                    const Vertex& b2 = sigma.vertex(vmap[nd.v]);
                    Mask split = 0;
                    for (Mask x : a.blocks)
                        for (Mask y : b2.blocks)
                            if ((x | y) == all_a && (x & y) == 0) split = x;
                    if (!split) throw InternalError("node endpoints are not adjacent in the source tree");
                    if (split & 1) split = all_a & ~split;
                    ct.node_r[split] = nd.r;
                    ct.node_edge[split] = nd.target;
                }
                tally[ct] += weight;
                return;
            }
            int w = -1;
            for (int u = 0; u < nv; ++u)
                for (Mask blk : tau.vertex(u).blocks)
                    if (blk == bit(b)) w = u;
            std::vector<int> marks = marks_over[b];
            std::vector<int> cycles_by_len_idx(cyc[b].size());
            std::iota(cycles_by_len_idx.begin(), cycles_by_len_idx.end(), 0);
            // assign marks (fixed order) to a permutation of cycles, keeping lengths equal
            std::vector<int> perm = cycles_by_len_idx;
            do {
                bool ok = true;
                for (std::size_t i = 0; i < marks.size(); ++i)
                    if (static_cast<int>(cyc[b][perm[i]].size()) != h.rm[marks[i]]) {
                        ok = false;
                        break;
                    }
                if (!ok) continue;
                for (std::size_t i = 0; i < marks.size(); ++i)
                    leg_vertex[marks[i]] = base[w] + orbit[w][cyc[b][perm[i]][0]];
                label(b + 1);
            } while (std::next_permutation(perm.begin(), perm.end()));
        };
        label(0);
    });

    std::vector<CoverTypeCount> out;
    for (auto& [ct, n] : tally) {
        Integer m = ct.multiplicity();
        Integer c = type_count(h, ct, limit);
        out.push_back({ct, c, m, n});
    }
    return out;
}

/// Flatness check: sum over types of m * count equals the number of covers of a smooth target.
inline bool degeneration_degree_check(const HurwitzData& h, const Stratum& tau,
                                      std::uint64_t limit = kDefaultTupleLimit) {
    Integer total = 0;
    for (const auto& t : enumerate_cover_types(h, tau, limit)) total += t.m * t.count;
    return total == count_covers(h, limit);
}

} // namespace hdyn
