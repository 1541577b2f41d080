#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <vector>

#include "hdyn/errors.hpp"
#include "hdyn/numeric.hpp"
#include "hdyn/partition.hpp"

namespace hdyn {

/// Permutation of {0..d-1} as its image list.
using Perm = std::vector<int>;

inline Perm identity_perm(int d) {
    Perm p(d);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

/// Apply a, then b.
inline Perm mul(const Perm& a, const Perm& b) {
    Perm c(a.size());
    for (std::size_t x = 0; x < a.size(); ++x) c[x] = b[a[x]];
    return c;
}

inline Perm inverse(const Perm& a) {
    Perm c(a.size());
    for (std::size_t x = 0; x < a.size(); ++x) c[a[x]] = static_cast<int>(x);
    return c;
}

/// Cycles (including fixed points), each starting at its smallest element, ordered by that element.
inline std::vector<std::vector<int>> cycles_of(const Perm& p) {
    std::vector<std::vector<int>> out;
    std::vector<bool> seen(p.size(), false);
    for (std::size_t s = 0; s < p.size(); ++s) {
        if (seen[s]) continue;
        std::vector<int> c;
        for (int x = static_cast<int>(s); !seen[x]; x = p[x]) {
            seen[x] = true;
            c.push_back(x);
        }
        out.push_back(std::move(c));
    }
    return out;
}

inline Partition cycle_type(const Perm& p) {
    std::vector<int> parts;
    for (const auto& c : cycles_of(p)) parts.push_back(static_cast<int>(c.size()));
    return Partition(std::move(parts));
}

/// Size of the centralizer of any permutation with the given cycle type.
inline Integer centralizer_order(const Partition& lambda) {
    Integer z = 1;
    std::map<int, int> mult;
    for (int r : lambda.parts()) ++mult[r];
    for (auto [r, m] : mult) {
        for (int i = 0; i < m; ++i) z *= r;
        z *= factorial(static_cast<unsigned>(m));
    }
    return z;
}

inline Integer class_size(int d, const Partition& lambda) {
    return factorial(static_cast<unsigned>(d)) / centralizer_order(lambda);
}

/// Representative with consecutive cycles in nondecreasing length.
inline Perm class_representative(int d, const Partition& lambda) {
    if (lambda.total() != d) throw ValidationError("cycle type does not sum to the degree");
    Perm p(d);
    int start = 0;
    for (int r : lambda.parts()) {
        for (int i = 0; i < r; ++i) p[start + i] = start + (i + 1) % r;
        start += r;
    }
    return p;
}

inline constexpr int kMaxDegree = 8;

/// All permutations of the given cycle type, in lexicographic order. Cached.
inline const std::vector<Perm>& conjugacy_class(int d, const Partition& lambda) {
    if (d < 1 || d > kMaxDegree) throw ResourceLimitError("degree bounded to 1..8");
    if (lambda.total() != d) throw ValidationError("cycle type does not sum to the degree");
    static std::mutex mu;
    static std::map<std::pair<int, Partition>, std::vector<Perm>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(d, lambda);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    std::vector<Perm> out;
    Perm p = identity_perm(d);
    do {
        if (cycle_type(p) == lambda) out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return cache.emplace(key, std::move(out)).first->second;
}

/// Orbits of the group generated by `gens` on {0..d-1}: orbit id per point (ids in order of
/// smallest element) and the orbit count.
inline std::pair<std::vector<int>, int> orbits_of(int d, const std::vector<Perm>& gens) {
    std::vector<int> parent(d);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Perm& g : gens)
        for (int x = 0; x < d; ++x) {
            int a = find(x), b = find(g[x]);
            if (a != b) parent[std::max(a, b)] = std::min(a, b);
        }
    std::vector<int> id(d, -1), root_id(d, -1);
    int count = 0;
    for (int x = 0; x < d; ++x) {
        int r = find(x);
        if (root_id[r] < 0) root_id[r] = count++;
        id[x] = root_id[r];
    }
    return {id, count};
}

/// Elements of the centralizer of a transitive group that map every cycle of every generator
/// to itself. A centralizing element is fixed by its value at 0.
inline int cycle_fixing_centralizer_order(int d, const std::vector<Perm>& gens) {
    std::vector<std::vector<int>> cycle_id(gens.size(), std::vector<int>(d));
    for (std::size_t i = 0; i < gens.size(); ++i) {
        auto cs = cycles_of(gens[i]);
        for (std::size_t c = 0; c < cs.size(); ++c)
            for (int x : cs[c]) cycle_id[i][x] = static_cast<int>(c);
    }
    int count = 0;
    for (int y = 0; y < d; ++y) {
        Perm c(d, -1);
        c[0] = y;
        std::vector<int> stack{0};
        bool ok = true;
        while (!stack.empty() && ok) {
            int x = stack.back();
            stack.pop_back();
            for (const Perm& g : gens) {
                int gx = g[x], cgx = g[c[x]];
                if (c[gx] < 0) {
                    c[gx] = cgx;
                    stack.push_back(gx);
                } else if (c[gx] != cgx) {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok) continue;
        if (std::find(c.begin(), c.end(), -1) != c.end()) throw InternalError("centralizer test needs a transitive group");
        std::vector<bool> hit(d, false);
        for (int v : c) hit[v] = true;
        if (std::find(hit.begin(), hit.end(), false) != hit.end()) continue;
        for (std::size_t i = 0; i < gens.size() && ok; ++i)
            for (int x = 0; x < d; ++x)
                if (cycle_id[i][c[x]] != cycle_id[i][x]) {
                    ok = false;
                    break;
                }
        if (ok) ++count;
    }
    return count;
}

} // namespace hdyn
