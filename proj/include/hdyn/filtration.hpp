#pragma once

#include <string>
#include <vector>

#include "hdyn/homology.hpp"
#include "hdyn/partition.hpp"

namespace hdyn {

/// A subspace of H_{2k}(M_{0,n}) in the quotient coordinates of `homology_basis(n, k)`.
struct FiltrationSubspace {
    int n = 0;
    int k = 0;
    std::string label;
    Subspace space;

    int dim() const { return space.dim(); }
};

/// Span of the strata whose induced partition satisfies `keep`.
template <class Pred>
Subspace strata_span(const HomologyPresentation& p, Pred keep) {
    Subspace s(p.rank());
    for (const Stratum& st : p.strata()) {
        if (s.dim() == p.rank()) break;
        if (keep(induced_partition(st))) s.add(p.coords(st));
    }
    return s;
}

/// Lambda^{<=lambda}: span of strata whose partition refines lambda.
inline FiltrationSubspace lambda_subspace(int n, int k, const Partition& lambda) {
    if (lambda.total() != k) throw ValidationError("partition " + lambda.to_string() + " does not sum to k");
    auto p = homology_basis(n, k);
    return {n, k, lambda.to_string(), strata_span(*p, [&](const Partition& mu) { return refines(mu, lambda); })};
}

/// Lambda^{<(k)}: span of strata whose partition has at least two parts.
inline FiltrationSubspace lambda_less_top(int n, int k) {
    auto p = homology_basis(n, k);
    return {n, k, "<(" + std::to_string(k) + ")",
            strata_span(*p, [](const Partition& mu) { return mu.length() >= 2; })};
}

/// Omega = H_{2k} / Lambda^{<(k)} with its projector from homology coordinates.
struct OmegaQuotient {
    int n = 0;
    int k = 0;
    int dim = 0;
    Matrix projector; // dim x rank(H_{2k})
    std::vector<int> section; // homology basis indices whose unit vectors map to the Omega basis
};

inline OmegaQuotient omega_quotient(int n, int k) {
    if (k < 1 || k > n - 3) throw ValidationError("omega quotient needs 1 <= k <= n-3");
    auto p = homology_basis(n, k);
    auto lam = lambda_less_top(n, k);
    Echelon e(p->rank());
    for (const auto& [c, row] : lam.space.echelon().rows()) e.add(row);
    Quotient q(std::move(e));
    OmegaQuotient out{n, k, q.dim(), Matrix(q.dim(), std::vector<Rational>(p->rank())), q.basis_columns()};
    for (int c = 0; c < p->rank(); ++c)
        for (const auto& [b, x] : q.image(c)) out.projector[b][c] = x;
    return out;
}

/// Realizable partitions of k on M_{0,n}, in partition order.
inline std::vector<Partition> realizable_partitions(int n, int k) {
    std::vector<Partition> out;
    for (const auto& lam : partitions_of(k))
        if (realizable(lam, n)) out.push_back(lam);
    return out;
}

/// Dimension of Lambda^{<(n-4)} predicted by the closed formula.
inline Integer lambda_less_formula(int n) {
    Integer p = 1;
    p <<= n;
    return (p - 2 - 2 * n - n * (n - 1)) / 2;
}

} // namespace hdyn
