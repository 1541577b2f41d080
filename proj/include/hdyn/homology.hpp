#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "hdyn/echelon.hpp"
#include "hdyn/tree.hpp"

namespace hdyn {

/// Formal rational combination of k-dimensional strata of M_{0,n}.
struct StrataVector {
    int n = 0;
    int k = 0;
    std::map<Stratum, Rational> coeffs;

    StrataVector() = default;
    StrataVector(int n_, int k_) : n(n_), k(k_) {}

    void add(const Stratum& s, const Rational& c) {
        if (s.marks() != n || s.dim() != k) throw ValidationError("stratum does not match vector (n,k)");
        if (c == 0) return;
        auto& slot = coeffs[s];
        slot += c;
        if (slot == 0) coeffs.erase(s);
    }
    void add(const StrataVector& o, const Rational& c = 1) {
        if (o.n != n || o.k != k) throw ValidationError("strata vectors of different (n,k)");
        for (const auto& [s, q] : o.coeffs) add(s, q * c);
    }
    bool is_zero() const { return coeffs.empty(); }
};

/// Betti number of H_2 (equivalently H^2) of M_{0,n}.
inline Integer h2_rank_formula(int n) {
    Integer p = 1;
    p <<= n;
    return (p - n * n + n - 2) / 2;
}

/// The four-flag KM relations among k-strata of M_{0,n}, as two relations per choice of
/// (k+1)-stratum, vertex of valence >= 4 and four of its flags. Deduplicated.
inline std::vector<StrataVector> km_relations(int n, int k) {
    if (k < 0 || k > n - 3) throw ValidationError("k must satisfy 0 <= k <= n-3");
    std::vector<StrataVector> out;
    if (k == n - 3) return out;
    std::set<std::vector<std::pair<Stratum, Rational>>> seen;
    for (const Stratum& sigma : enumerate_strata(n, k + 1)) {
        for (const Vertex& v : sigma.vertices()) {
            int m = v.valence();
            if (m < 4) continue;
            for (int f1 = 0; f1 < m; ++f1)
                for (int f2 = f1 + 1; f2 < m; ++f2)
                    for (int f3 = f2 + 1; f3 < m; ++f3)
                        for (int f4 = f3 + 1; f4 < m; ++f4) {
                            std::vector<int> rest;
                            for (int f = 0; f < m; ++f)
                                if (f != f1 && f != f2 && f != f3 && f != f4) rest.push_back(f);
                            auto pair_sum = [&](int x, int y) {
                                StrataVector p(n, k);
                                for (Mask sub = 0; sub < (Mask{1} << rest.size()); ++sub) {
                                    Mask side = v.blocks[x] | v.blocks[y];
                                    for (std::size_t i = 0; i < rest.size(); ++i)
                                        if (sub & bit(static_cast<int>(i))) side |= v.blocks[rest[i]];
                                    auto splits = sigma.splits();
                                    splits.push_back(side);
                                    p.add(Stratum::from_splits(n, std::move(splits)), 1);
                                }
                                return p;
                            };
                            StrataVector p12 = pair_sum(f1, f2);
                            StrataVector p13 = pair_sum(f1, f3);
                            StrataVector p14 = pair_sum(f1, f4);
                            for (const StrataVector* other : {&p13, &p14}) {
                                StrataVector r = p12;
                                r.add(*other, -1);
                                if (r.is_zero()) continue;
                                std::vector<std::pair<Stratum, Rational>> key(r.coeffs.begin(), r.coeffs.end());
                                if (key.back().second < 0)
                                    for (auto& kv : key) kv.second = -kv.second;
                                if (seen.insert(key).second) out.push_back(std::move(r));
                            }
                        }
        }
    }
    return out;
}

/// KM presentation of H_{2k}(M_{0,n}) over Q.
class HomologyPresentation {
public:
    HomologyPresentation(int n, int k) : n_(n), k_(k), strata_(enumerate_strata(n, k)) {
        for (std::size_t i = 0; i < strata_.size(); ++i) index_.emplace(strata_[i], static_cast<int>(i));
        Echelon e(static_cast<int>(strata_.size()));
        auto rels = km_relations(n, k);
        relation_count_ = static_cast<int>(rels.size());
        for (const auto& r : rels) e.add(to_row(r));
        quotient_ = Quotient(std::move(e));
    }

    int n() const { return n_; }
    int k() const { return k_; }
    int rank() const { return quotient_.dim(); }
    int relation_count() const { return relation_count_; }
    const std::vector<Stratum>& strata() const { return strata_; }
    const Quotient& quotient() const { return quotient_; }

    int index_of(const Stratum& s) const {
        auto it = index_.find(s);
        return it == index_.end() ? -1 : it->second;
    }

    std::vector<Stratum> basis_strata() const {
        std::vector<Stratum> out;
        for (int c : quotient_.basis_columns()) out.push_back(strata_[c]);
        return out;
    }

    std::vector<Rational> coords(const Stratum& s) const {
        int i = index_of(s);
        if (i < 0) throw ValidationError("stratum does not belong to this presentation");
        return quotient_.reduce_dense({{i, Rational(1)}});
    }

    /// Coordinates of a strata combination in the quotient basis.
    std::vector<Rational> reduce(const StrataVector& v) const {
        if (v.n != n_ || v.k != k_) throw ValidationError("class_reduce: vector (n,k) does not match presentation");
        SparseVec sv;
        for (const auto& [s, q] : v.coeffs) sv.emplace_back(index_of(s), q);
        std::sort(sv.begin(), sv.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        return quotient_.reduce_dense(sv);
    }

    /// rank x |strata| matrix sending each stratum to its coordinates.
    Matrix projection() const {
        Matrix m(rank(), std::vector<Rational>(strata_.size()));
        for (std::size_t c = 0; c < strata_.size(); ++c)
            for (const auto& [b, q] : quotient_.image(static_cast<int>(c))) m[b][c] = q;
        return m;
    }

    SparseRow to_row(const StrataVector& v) const {
        SparseVec sv;
        for (const auto& [s, q] : v.coeffs) {
            int i = index_of(s);
            if (i < 0) throw InternalError("relation term outside stratum list");
            sv.emplace_back(i, q);
        }
        std::sort(sv.begin(), sv.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        return to_integer_row(sv);
    }

private:
    int n_, k_;
    std::vector<Stratum> strata_;
    std::map<Stratum, int> index_;
    int relation_count_ = 0;
    Quotient quotient_;
};

inline int default_homology_bound() { return 8; }

/// Cached presentation. Throws ResourceLimitError above `bound` marks.
inline std::shared_ptr<const HomologyPresentation> homology_basis(int n, int k, int bound = default_homology_bound()) {
    if (n < 3) throw ValidationError("n must be at least 3");
    if (k < 0 || k > n - 3) throw ValidationError("k must satisfy 0 <= k <= n-3");
    if (n > bound)
        throw ResourceLimitError("homology presentation requested for n=" + std::to_string(n) +
                                 " above bound " + std::to_string(bound));
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const HomologyPresentation>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find({n, k}); it != cache.end()) return it->second;
    }
    auto p = std::make_shared<const HomologyPresentation>(n, k);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(std::make_pair(n, k), std::move(p)).first->second;
}

inline std::vector<Rational> class_reduce(const StrataVector& v, const HomologyPresentation& p) { return p.reduce(v); }

/// All boundary divisor splits of n marks, normalized to exclude mark 0, sorted.
inline std::vector<Mask> boundary_splits(int n) {
    std::vector<Mask> out;
    Mask all = full_mask(n);
    for (Mask s = 0; s <= all; ++s) {
        if (s & 1) continue;
        if (popcount(s) >= 2 && popcount(all & ~s) >= 2) out.push_back(s);
    }
    return out;
}

/// The four blocks at the 4-valent vertex of a one-dimensional stratum.
inline const std::vector<Mask>& fcurve_blocks(const Stratum& s) {
    if (s.dim() != 1) throw ValidationError("pairing requires a one-dimensional stratum");
    for (const Vertex& v : s.vertices())
        if (v.valence() == 4) return v.blocks;
    throw InternalError("one-dimensional stratum without a 4-valent vertex");
}

/// Intersection number of an F-curve with the boundary divisor D_S.
inline int intersection_pairing_h2(const Stratum& s, Mask split) {
    Mask all = full_mask(s.marks());
    split &= all;
    if (popcount(split) < 2 || popcount(all & ~split) < 2) throw ValidationError("invalid boundary split");
    const auto& b = fcurve_blocks(s);
    Mask comp = all & ~split;
    for (int i = 0; i < 4; ++i) {
        if (split == b[i] || comp == b[i]) return -1;
        for (int j = i + 1; j < 4; ++j)
            if (split == (b[i] | b[j]) || comp == (b[i] | b[j])) return 1;
    }
    return 0;
}

/// Pairing vector of a one-dimensional class against `boundary_splits(n)`.
inline std::vector<Rational> pairing_vector(const StrataVector& v) {
    if (v.k != 1) throw ValidationError("pairing vector needs a curve class");
    auto splits = boundary_splits(v.n);
    std::vector<Rational> out(splits.size());
    for (const auto& [s, q] : v.coeffs)
        for (std::size_t i = 0; i < splits.size(); ++i) {
            int p = intersection_pairing_h2(s, splits[i]);
            if (p) out[i] += q * p;
        }
    return out;
}

/// A basis of H_2(M_{0,n}) made of F-curves whose pairing vectors are independent, with
/// the inverse of a nonsingular square block of the pairing matrix. Classes are recovered
/// from their divisor pairings without a KM presentation.
class CurvePairingBasis {
public:
    explicit CurvePairingBasis(int n) : n_(n), splits_(boundary_splits(n)) {
        Integer target = h2_rank_formula(n);
        Echelon e(static_cast<int>(splits_.size()));
        std::vector<std::vector<int>> rows;
        for (const Stratum& c : enumerate_strata(n, 1)) {
            if (Integer(static_cast<int>(curves_.size())) == target) break;
            std::vector<int> pv(splits_.size());
            SparseRow r;
            for (std::size_t i = 0; i < splits_.size(); ++i) {
                pv[i] = intersection_pairing_h2(c, splits_[i]);
                if (pv[i]) r.emplace_back(static_cast<int>(i), Integer(pv[i]));
            }
            if (e.add(std::move(r))) {
                curves_.push_back(c);
                rows.push_back(std::move(pv));
            }
        }
        for (const auto& [col, r] : e.rows()) pivots_.push_back(col);
        std::size_t m = curves_.size();
        // square system: sum_i x_i P[i][pivot_j] = y_j
        Matrix a(m, std::vector<Rational>(m));
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < m; ++i) a[j][i] = rows[i][pivots_[j]];
        inverse_.assign(m, std::vector<Rational>(m));
        for (std::size_t col = 0; col < m; ++col) {
            std::vector<Rational> unit(m);
            unit[col] = 1;
            auto x = solve_linear(a, unit);
            if (!x) throw InternalError("pairing block is singular");
            for (std::size_t i = 0; i < m; ++i) inverse_[i][col] = (*x)[i];
        }
        pairing_.resize(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t s = 0; s < splits_.size(); ++s) pairing_[i].push_back(rows[i][s]);
    }

    int n() const { return n_; }
    int rank() const { return static_cast<int>(curves_.size()); }
    const std::vector<Stratum>& curves() const { return curves_; }
    const std::vector<Mask>& splits() const { return splits_; }

    /// Unique combination of basis curves with the given pairing against every split.
    /// Throws InternalError naming a violated split when the vector is not in the image.
    StrataVector solve(const std::vector<Rational>& pairings) const {
        if (pairings.size() != splits_.size()) throw ValidationError("pairing vector has wrong length");
        std::size_t m = curves_.size();
        std::vector<Rational> y(m), x(m);
        for (std::size_t j = 0; j < m; ++j) y[j] = pairings[pivots_[j]];
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (inverse_[i][j] != 0 && y[j] != 0) x[i] += inverse_[i][j] * y[j];
        for (std::size_t s = 0; s < splits_.size(); ++s) {
            Rational got = 0;
            for (std::size_t i = 0; i < m; ++i)
                if (pairing_[i][s]) got += x[i] * pairing_[i][s];
            if (got != pairings[s])
                throw InternalError("inconsistent pairing vector: split mask " + std::to_string(splits_[s]) +
                                    " expects " + to_fraction_string(pairings[s]) + " but the solved class gives " +
                                    to_fraction_string(got));
        }
        StrataVector out(n_, 1);
        for (std::size_t i = 0; i < m; ++i) out.add(curves_[i], x[i]);
        return out;
    }

private:
    int n_;
    std::vector<Mask> splits_;
    std::vector<Stratum> curves_;
    std::vector<int> pivots_;
    Matrix inverse_;
    std::vector<std::vector<int>> pairing_;
};

inline std::shared_ptr<const CurvePairingBasis> curve_pairing_basis(int n) {
    if (n < 4) throw ValidationError("curve classes need at least 4 marks");
    if (n > 12) throw ResourceLimitError("curve pairing basis bounded to n <= 12");
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const CurvePairingBasis>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        if (auto it = cache.find(n); it != cache.end()) return it->second;
    }
    auto b = std::make_shared<const CurvePairingBasis>(n);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(n, std::move(b)).first->second;
}

/// Quotient coordinates of the curve class with the given split pairings.
inline std::vector<Rational> solve_class_from_pairings(const std::map<Mask, Rational>& pairings,
                                                       const HomologyPresentation& p) {
    if (p.k() != 1) throw ValidationError("solve_class_from_pairings needs the k=1 presentation");
    auto basis = curve_pairing_basis(p.n());
    Mask all = full_mask(p.n());
    std::vector<Rational> y(basis->splits().size());
    std::map<Mask, std::size_t> pos;
    for (std::size_t i = 0; i < basis->splits().size(); ++i) pos[basis->splits()[i]] = i;
    for (const auto& [s0, q] : pairings) {
        Mask s = (s0 & 1) ? (all & ~s0) : s0;
        auto it = pos.find(s);
        if (it == pos.end()) throw ValidationError("pairing given for an invalid split");
        y[it->second] = q;
    }
    return p.reduce(basis->solve(y));
}

} // namespace hdyn
