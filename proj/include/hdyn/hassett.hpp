#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "hdyn/filtration.hpp"
#include "hdyn/numeric.hpp"
#include "hdyn/tree.hpp"

namespace hdyn {

/// Hassett weight datum: one rational weight in (0,1] per mark, total above 2.
struct WeightDatum {
    std::vector<Rational> weights;

    int size() const { return static_cast<int>(weights.size()); }
    Rational total() const {
        Rational t = 0;
        for (const auto& w : weights) t += w;
        return t;
    }

    void validate() const {
        if (weights.size() < 3) throw ValidationError("weight datum needs at least 3 weights");
        for (const auto& w : weights)
            if (w <= 0 || w > 1) throw ValidationError("weights must lie in (0,1], got " + to_fraction_string(w));
        if (total() <= 2) throw ValidationError("weights must sum to more than 2");
    }

    Rational block_weight(Mask block) const {
        Rational s = 0;
        for (int i = 0; i < size(); ++i)
            if (block & bit(i)) s += weights[i];
        return s;
    }
};

namespace detail {

inline std::vector<Rational> subset_sums(const std::vector<Rational>& w, std::size_t lo, std::size_t hi) {
    std::vector<Rational> sums{0};
    for (std::size_t i = lo; i < hi; ++i) {
        std::size_t m = sums.size();
        for (std::size_t j = 0; j < m; ++j) sums.push_back(sums[j] + w[i]);
    }
    return sums;
}

} // namespace detail

/// Minimal data: no subset sum lies in the window (1, T-1], T the total weight.
/// Meet in the middle over the two halves of the weight vector.
inline bool is_minimal(const WeightDatum& e) {
    e.validate();
    if (e.size() > 40) throw ResourceLimitError("minimality test bounded to 40 weights");
    std::size_t half = e.weights.size() / 2;
    auto left = detail::subset_sums(e.weights, 0, half);
    auto right = detail::subset_sums(e.weights, half, e.weights.size());
    std::sort(right.begin(), right.end());
    Rational hi = e.total() - 1;
    for (const auto& a : left) {
        // smallest b with a + b > 1
        auto it = std::upper_bound(right.begin(), right.end(), Rational(1) - a);
        if (it != right.end() && a + *it <= hi) return false;
    }
    return true;
}

inline WeightDatum epsilon_dagger(int n) {
    if (n < 4) throw ValidationError("the dagger datum needs N >= 4");
    Rational small = Rational(1, pow10(static_cast<unsigned>(n)));
    Rational base(2, n);
    WeightDatum e;
    if (n % 2 == 1) {
        e.weights.assign(n, base + small);
    } else {
        e.weights.assign(n, base - small / n);
        e.weights[0] = base + small;
    }
    return e;
}

/// Vertices v with sum over flags of min(1, weight beyond the flag) above 2.
inline std::vector<int> stable_vertices(const Stratum& s, const WeightDatum& e) {
    if (e.size() != s.marks()) throw ValidationError("weight datum size does not match the stratum");
    std::vector<int> out;
    for (int v = 0; v < s.vertex_count(); ++v) {
        Rational sum = 0;
        for (Mask b : s.vertex(v).blocks) sum += std::min(Rational(1), e.block_weight(b));
        if (sum > 2) out.push_back(v);
    }
    return out;
}

/// Set partition of the marks seen from the unique stable vertex.
struct ReductionImageType {
    std::vector<Mask> blocks; // sorted ascending
    int dim = 0;

    auto operator<=>(const ReductionImageType&) const = default;
};

namespace detail {

inline ReductionImageType image_type_of(const Stratum& s, const WeightDatum& e) {
    auto sv = stable_vertices(s, e);
    if (sv.size() != 1) throw InternalError("minimal datum without a unique stable vertex");
    ReductionImageType t;
    t.blocks = s.vertex(sv[0]).blocks;
    std::sort(t.blocks.begin(), t.blocks.end());
    t.dim = s.vertex(sv[0]).moduli_dim();
    return t;
}

} // namespace detail

inline ReductionImageType reduction_image_type(const Stratum& s, const WeightDatum& e) {
    if (!is_minimal(e)) throw ValidationError("reduction image types are defined for minimal weight data only");
    return detail::image_type_of(s, e);
}

/// Kernel of the reduction pushforward on H_{2k}, in homology quotient coordinates.
inline FiltrationSubspace reduction_kernel(int n, int k, const WeightDatum& e) {
    if (e.size() != n) throw ValidationError("weight datum size does not match n");
    if (!is_minimal(e)) throw ValidationError("reduction kernels are computed for minimal weight data only");
    auto p = homology_basis(n, k);
    FiltrationSubspace out{n, k, "ker", Subspace(p->rank())};
    std::map<ReductionImageType, std::vector<Rational>> representative;
    for (const Stratum& s : p->strata()) {
        auto t = detail::image_type_of(s, e);
        auto c = p->coords(s);
        if (t.dim < k) {
            out.space.add(c);
            continue;
        }
        auto [it, fresh] = representative.emplace(t, c);
        if (fresh) continue;
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= it->second[i];
        out.space.add(c);
    }
    return out;
}

} // namespace hdyn
