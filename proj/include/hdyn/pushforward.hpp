#pragma once

#include <map>
#include <string>
#include <vector>

#include "hdyn/filtration.hpp"
#include "hdyn/homology.hpp"
#include "hdyn/hurwitz.hpp"

namespace hdyn {

/// Matrix of a pushforward in the quotient bases of `homology_basis`; columns are images of
/// source basis strata.
struct PushforwardMatrix {
    int source_n = 0;
    int target_n = 0;
    int k = 0;
    Matrix entries;
    std::vector<Stratum> source_basis;
    std::vector<Stratum> target_basis;

    int rows() const { return static_cast<int>(entries.size()); }
    int cols() const { return entries.empty() ? 0 : static_cast<int>(entries[0].size()); }
};

/// Degree of the target-curve map: count of the fully marked space divided by deg nu.
inline Rational pushforward_h0(const HurwitzData& h, std::uint64_t limit = kDefaultTupleLimit) {
    auto fm = fully_mark(h);
    Integer c = count_covers(fm.data, limit);
    if (c % fm.deg_nu != 0) throw InternalError("count is not divisible by deg nu");
    return Rational(c / fm.deg_nu);
}

/// Pairings of the curve traced by a connected cover with four branch flags against the
/// boundary divisors of its source space, from its degenerations over the three boundary
/// points of the target. Keys are splits in `boundary_splits(n)` form.
inline std::map<Mask, Rational> vertex_curve_pairings(const HurwitzData& hv, std::uint64_t limit = kDefaultTupleLimit) {
    if (hv.num_b() != 4) throw InternalError("curve classes come from covers of a four-pointed line");
    std::map<Mask, Rational> out;
    for (const auto& tau : enumerate_strata(4, 0))
        for (const auto& t : enumerate_cover_types(hv, tau, limit))
            for (const auto& [s, r] : t.type.node_r) out[s] += Rational(t.count * t.m / r);
    return out;
}

inline StrataVector vertex_curve_class(const HurwitzData& hv, std::uint64_t limit = kDefaultTupleLimit) {
    auto basis = curve_pairing_basis(hv.num_a());
    auto pair = vertex_curve_pairings(hv, limit);
    std::vector<Rational> y(basis->splits().size());
    for (std::size_t i = 0; i < y.size(); ++i)
        if (auto it = pair.find(basis->splits()[i]); it != pair.end()) y[i] = it->second;
    return basis->solve(y);
}

/// Image in H_2 of the source space of the part of the fully marked space lying over the
/// one-dimensional target stratum tau.
inline StrataVector cover_curve_over(const HurwitzData& full, const Stratum& tau,
                                     std::uint64_t limit = kDefaultTupleLimit) {
    if (tau.dim() != 1) throw ValidationError("target stratum must be one-dimensional");
    int wstar = -1;
    for (int w = 0; w < tau.vertex_count(); ++w)
        if (tau.vertex(w).valence() == 4) wstar = w;
    StrataVector total(full.num_a(), 1);
    for (const auto& t : enumerate_cover_types(full, tau, limit)) {
        const CoverType& g = t.type;
        int nv = g.sigma.vertex_count();
        std::vector<Integer> c(nv);
        std::vector<int> over;
        Integer base = t.m;
        for (int v = 0; v < nv; ++v) {
            c[v] = count_covers(vertex_data(full, g, v), limit);
            if (g.fvert[v] == wstar) over.push_back(v);
            else base *= c[v];
        }
        for (int v : over) {
            Integer coef = base;
            for (int u : over)
                if (u != v) coef *= c[u];
            if (coef == 0) continue;
            std::vector<Mask> splits = g.sigma.splits();
            for (int u = 0; u < nv; ++u)
                if (u != v && g.sigma.vertex(u).valence() >= 4) {
                    auto extra = lifted_splits(g.sigma, u, caterpillar(g.sigma.vertex(u).valence()));
                    splits.insert(splits.end(), extra.begin(), extra.end());
                }
            auto cls = vertex_curve_class(vertex_data(full, g, v), limit);
            for (const auto& [curve, q] : cls.coeffs) {
                auto all = splits;
                auto extra = lifted_splits(g.sigma, v, curve);
                all.insert(all.end(), extra.begin(), extra.end());
                total.add(Stratum::from_splits(full.num_a(), std::move(all)), q * Rational(coef));
            }
        }
    }
    return total;
}

/// Forgets down to A' and, with identify present, renames the kept marks by B.
inline StrataVector forget_and_relabel(const HurwitzData& h, const StrataVector& v) {
    std::vector<int> kept = h.kept();
    Mask mask = 0;
    for (int a : kept) mask |= bit(a);
    std::vector<int> rename(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) rename[i] = static_cast<int>(i);
    if (h.identify)
        for (int b = 0; b < h.num_b(); ++b) {
            auto it = std::find(kept.begin(), kept.end(), (*h.identify)[b]);
            rename[it - kept.begin()] = b;
        }
    StrataVector out(static_cast<int>(kept.size()), v.k);
    for (const auto& [s, q] : v.coeffs) {
        auto img = forget_pushforward(s, mask);
        if (img) out.add(relabel_marks(*img, rename), q);
    }
    return out;
}

/// Pushforward on H_2: columns indexed by the basis one-strata of the target space of B.
inline PushforwardMatrix pushforward_h2(const HurwitzData& h, std::uint64_t limit = kDefaultTupleLimit) {
    require_valid(h);
    int na = static_cast<int>(h.kept().size());
    if (na < 4 || h.num_b() < 4) throw ValidationError("H_2 pushforward needs at least 4 marks on both sides");
    auto fm = fully_mark(h);
    auto src = homology_basis(h.num_b(), 1);
    auto dst = homology_basis(na, 1);
    PushforwardMatrix out{h.num_b(), na, 1, Matrix(dst->rank(), std::vector<Rational>(src->rank())),
                          src->basis_strata(), dst->basis_strata()};
    for (int j = 0; j < src->rank(); ++j) {
        auto img = forget_and_relabel(h, cover_curve_over(fm.data, out.source_basis[j], limit));
        auto col = dst->reduce(img);
        for (int i = 0; i < dst->rank(); ++i) out.entries[i][j] = col[i] / Rational(fm.deg_nu);
    }
    return out;
}

/// Pushforward of a single target stratum class expressed through the curve machinery; used
/// to check that KM relations map to zero.
inline std::vector<Rational> pushforward_h2_stratum(const HurwitzData& h, const Stratum& tau,
                                                    std::uint64_t limit = kDefaultTupleLimit) {
    auto fm = fully_mark(h);
    auto dst = homology_basis(static_cast<int>(h.kept().size()), 1);
    auto col = dst->reduce(forget_and_relabel(h, cover_curve_over(fm.data, tau, limit)));
    for (auto& x : col) x /= Rational(fm.deg_nu);
    return col;
}

inline PushforwardMatrix self_correspondence_matrix(const HurwitzData& h, int k,
                                                    std::uint64_t limit = kDefaultTupleLimit) {
    require_valid(h);
    if (!h.identify) throw ValidationError("self-correspondence needs identify");
    if (static_cast<int>(h.kept().size()) != h.num_b()) throw ValidationError("|B| must equal |A'|");
    if (k == 0) {
        PushforwardMatrix m{h.num_b(), h.num_b(), 0, Matrix{{pushforward_h0(h, limit)}}, {}, {}};
        m.source_basis = m.target_basis = homology_basis(h.num_b(), 0)->basis_strata();
        return m;
    }
    if (k == 1) return pushforward_h2(h, limit);
    throw ValidationError("pushforward is computed for k = 0 and k = 1 only");
}

struct FiltrationBlocks {
    int n = 0;
    int k = 0;
    bool preserved = true;
    std::vector<std::string> violations;
    Matrix omega_block;
    Matrix lambda_block;
};

/// Checks that m keeps Lambda^{<(k)} and returns the induced maps on it and on Omega.
inline FiltrationBlocks filtration_blocks(const Matrix& m, int n, int k) {
    auto p = homology_basis(n, k);
    int rank = p->rank();
    if (static_cast<int>(m.size()) != rank)
        throw ValidationError("matrix must be " + std::to_string(rank) + "x" + std::to_string(rank));
    for (const auto& row : m)
        if (static_cast<int>(row.size()) != rank)
            throw ValidationError("matrix must be " + std::to_string(rank) + "x" + std::to_string(rank));
    FiltrationBlocks out{n, k, true, {}, {}, {}};
    if (k == 0 || k == n - 3) {
        out.omega_block = m;
        return out;
    }
    auto lam = lambda_less_top(n, k);
    auto gens = lam.space.basis();
    Matrix lbasis(rank, std::vector<Rational>(gens.size()));
    for (std::size_t j = 0; j < gens.size(); ++j)
        for (int i = 0; i < rank; ++i) lbasis[i][j] = gens[j][i];
    out.lambda_block.assign(gens.size(), std::vector<Rational>(gens.size()));
    for (std::size_t j = 0; j < gens.size(); ++j) {
        auto img = matvec(m, gens[j]);
        auto x = solve_linear(lbasis, img);
        if (!x) {
            out.preserved = false;
            std::string s = "generator " + std::to_string(j) + " of Lambda^<(" + std::to_string(k) + ") escapes; image [";
            for (int i = 0; i < rank; ++i) s += (i ? "," : "") + to_fraction_string(img[i]);
            out.violations.push_back(s + "]");
            continue;
        }
        for (std::size_t i = 0; i < gens.size(); ++i) out.lambda_block[i][j] = (*x)[i];
    }
    if (!out.preserved) out.lambda_block.clear();
    auto om = omega_quotient(n, k);
    out.omega_block.assign(om.dim, std::vector<Rational>(om.dim));
    for (int j = 0; j < om.dim; ++j) {
        std::vector<Rational> e(rank);
        e[om.section[j]] = 1;
        auto img = matvec(om.projector, matvec(m, e));
        for (int i = 0; i < om.dim; ++i) out.omega_block[i][j] = img[i];
    }
    return out;
}

} // namespace hdyn
