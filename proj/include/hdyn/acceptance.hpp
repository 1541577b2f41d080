#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hdyn/filtration.hpp"
#include "hdyn/hassett.hpp"
#include "hdyn/homology.hpp"
#include "hdyn/hurwitz.hpp"
#include "hdyn/json_io.hpp"
#include "hdyn/pushforward.hpp"
#include "hdyn/spectral.hpp"

namespace hdyn {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

namespace acceptance {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Orbits of labeled transitive tuples under all relabelings of the fiber, by listing every
/// tuple in S_d^|B| and keeping the least conjugate. Independent of the counting code.
inline Integer brute_force_covers(const HurwitzData& h, long long* tuples_seen = nullptr) {
    int d = h.d, nb = h.num_b(), na = h.num_a();
    std::vector<Perm> all;
    Perm p = identity_perm(d);
    do all.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    using Key = std::pair<std::vector<Perm>, std::vector<std::vector<int>>>;
    std::set<Key> seen;
    std::vector<Perm> g(nb);
    long long tuples = 0;
    std::function<void(int)> rec = [&](int b) {
        if (b < nb) {
            for (const Perm& x : all)
                if (cycle_type(x) == h.br[b]) {
                    g[b] = x;
                    rec(b + 1);
                }
            return;
        }
        ++tuples;
        Perm prod = identity_perm(d);
        for (const auto& x : g) prod = mul(prod, x);
        if (prod != identity_perm(d) || orbits_of(d, g).second != 1) return;
        std::vector<std::vector<std::vector<int>>> cyc(nb);
        for (int i = 0; i < nb; ++i) cyc[i] = cycles_of(g[i]);
        std::vector<std::vector<int>> lab(na);
        std::vector<std::vector<bool>> used(nb);
        for (int i = 0; i < nb; ++i) used[i].assign(cyc[i].size(), false);
        std::function<void(int)> label = [&](int a) {
            if (a == na) {
                Key best;
                bool first = true;
                for (const Perm& c : all) {
                    Perm ci = inverse(c);
                    Key k;
                    for (const auto& x : g) k.first.push_back(mul(mul(ci, x), c));
                    for (const auto& l : lab) {
                        std::vector<int> m;
                        for (int x : l) m.push_back(c[x]);
                        std::sort(m.begin(), m.end());
                        k.second.push_back(m);
                    }
                    if (first || k < best) best = k;
                    first = false;
                }
                seen.insert(best);
                return;
            }
            int fb = h.F[a];
            for (std::size_t i = 0; i < cyc[fb].size(); ++i) {
                if (used[fb][i] || static_cast<int>(cyc[fb][i].size()) != h.rm[a]) continue;
                used[fb][i] = true;
                lab[a] = cyc[fb][i];
                label(a + 1);
                used[fb][i] = false;
            }
        };
        label(0);
    };
    rec(0);
    if (tuples_seen) *tuples_seen = tuples;
    return Integer(seen.size());
}

/// Degree of the source map of a Hurwitz curve over a four-pointed line, read off raw
/// degeneration counts: the pairing with the pullback of the boundary point {x,y}|rest of the
/// source marks A.
inline Rational theta1_oracle(const HurwitzData& full, int num_original, int x, int y) {
    Mask orig = full_mask(num_original), all = full_mask(full.num_a());
    Mask want = bit(x) | bit(y);
    Rational s = 0;
    for (const auto& [split, q] : vertex_curve_pairings(full)) {
        Mask in = split & orig, out = (all & ~split) & orig;
        if (in == want || out == want) s += q;
    }
    return s;
}

inline std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i];
    return s;
}

inline CriterionResult c1_dimension_formula(std::ostream& log) {
    CriterionResult r{1, "dimension formula for H_2(N-4)", true, ""};
    std::vector<std::string> got;
    for (int n = 5; n <= 8; ++n) {
        auto t0 = Clock::now();
        int rank = homology_basis(n, n - 4)->rank();
        double t = seconds_since(t0);
        log << "  criterion 1: N=" << n << " rank " << rank << " in " << t << " s\n";
        got.push_back(std::to_string(rank));
        if (Integer(rank) != h2_rank_formula(n)) r.pass = false;
        double budget = n <= 7 ? 10.0 : 300.0;
        if (t > budget) {
            r.pass = false;
            r.detail = "N=" + std::to_string(n) + " over time budget; ";
        }
    }
    r.detail += "ranks " + join(got) + " (expected 5 16 42 99)";
    return r;
}

inline CriterionResult c2_duality() {
    CriterionResult r{2, "rank H_2 equals rank H_2(N-4)", true, ""};
    std::vector<std::string> got;
    for (int n = 5; n <= 7; ++n) {
        int a = homology_basis(n, 1)->rank(), b = homology_basis(n, n - 4)->rank();
        got.push_back(std::to_string(a) + "=" + std::to_string(b));
        if (a != b) r.pass = false;
    }
    r.detail = join(got);
    return r;
}

inline CriterionResult c3_omega_dims() {
    CriterionResult r{3, "Omega and Lambda^<(N-4) dimensions", true, ""};
    std::vector<std::string> got;
    for (int n = 5; n <= 8; ++n) {
        int om = omega_quotient(n, n - 4).dim;
        int lam = lambda_less_top(n, n - 4).dim();
        got.push_back("N=" + std::to_string(n) + ":" + std::to_string(om) + "/" + std::to_string(lam));
        if (om != n || Integer(lam) != lambda_less_formula(n)) r.pass = false;
    }
    r.detail = "dim Omega/dim Lambda " + join(got);
    return r;
}

inline CriterionResult c4_unique_stable_vertex() {
    CriterionResult r{4, "unique dagger-stable vertex on every tree, N <= 8", true, ""};
    long long trees = 0, bad = 0;
    for (int n = 4; n <= 8; ++n) {
        auto e = epsilon_dagger(n);
        for (const auto& s : all_strata(n)) {
            ++trees;
            if (stable_vertices(s, e).size() != 1) ++bad;
        }
    }
    r.pass = bad == 0;
    r.detail = std::to_string(trees) + " trees, " + std::to_string(bad) + " violations";
    return r;
}

inline CriterionResult c5_hassett_kernel() {
    CriterionResult r{5, "Lambda^<(k) inside the reduction kernel, equal for k >= (N-3)/2", true, ""};
    int checked = 0;
    std::vector<std::string> failures;
    for (int n = 4; n <= 7; ++n)
        for (int k = 0; k <= n - 3; ++k) {
            auto ker = reduction_kernel(n, k, epsilon_dagger(n));
            Subspace lam = k >= 1 ? lambda_less_top(n, k).space : Subspace(homology_basis(n, k)->rank());
            ++checked;
            bool ok = ker.space.contains(lam);
            if (2 * k >= n - 3) ok = ok && ker.space == lam;
            if (!ok) failures.push_back("(" + std::to_string(n) + "," + std::to_string(k) + ")");
        }
    r.pass = failures.empty();
    r.detail = std::to_string(checked) + " (N,k) pairs" + (failures.empty() ? "" : ", failing " + join(failures));
    return r;
}

inline CriterionResult c6_km_orthogonality() {
    CriterionResult r{6, "KM relations pair to zero with every boundary split", true, ""};
    long long rels = 0, bad = 0;
    for (int n = 5; n <= 7; ++n) {
        auto splits = boundary_splits(n);
        for (const auto& rel : km_relations(n, 1)) {
            ++rels;
            for (Mask s : splits) {
                Rational sum = 0;
                for (const auto& [st, q] : rel.coeffs) sum += q * intersection_pairing_h2(st, s);
                if (sum != 0) ++bad;
            }
        }
    }
    r.pass = bad == 0;
    r.detail = std::to_string(rels) + " relations for N=5..7, " + std::to_string(bad) + " violations";
    return r;
}

inline CriterionResult c7_hurwitz_counts(const std::string& data_dir, std::ostream& log) {
    CriterionResult r{7, "Hurwitz counts against brute force", true, ""};
    auto t0 = Clock::now();
    auto cubic = fully_mark(hurwitz_from_json(read_json_file(data_dir + "/fig1.json"))).data;
    Integer c = count_covers(cubic);
    long long tuples = 0;
    Integer brute = brute_force_covers(cubic, &tuples);
    auto d2 = fully_mark(hurwitz_from_json(read_json_file(data_dir + "/d2_b4.json"))).data;
    Integer c2 = count_covers(d2);
    Integer b2 = brute_force_covers(d2);
    double t = seconds_since(t0);
    log << "  criterion 7: " << t << " s\n";
    r.pass = c == 4 && brute == 4 && tuples == 81 && c2 == 2 && b2 == 2 && t < 1.0;
    r.detail = "cubic count " + c.str() + ", brute force " + brute.str() + " over " + std::to_string(tuples) +
               " tuples; d=2 count " + c2.str() + ", brute force " + b2.str();
    return r;
}

inline CriterionResult c8_degeneration_degree(const std::string& data_dir) {
    CriterionResult r{8, "sum of m*count over types equals deg pi_B on codim-1 strata", true, ""};
    std::vector<std::string> got;
    for (std::string f : {"fig1.json", "d2_b4.json"}) {
        auto h = fully_mark(hurwitz_from_json(read_json_file(data_dir + "/" + f))).data;
        Integer deg = count_covers(h);
        int ok = 0, total = 0;
        for (const auto& tau : enumerate_strata(h.num_b(), h.num_b() - 4)) {
            ++total;
            Integer sum = 0;
            for (const auto& t : enumerate_cover_types(h, tau)) sum += t.m * t.count;
            if (sum == deg) ++ok;
        }
        if (ok != total) r.pass = false;
        got.push_back(f + " " + std::to_string(ok) + "/" + std::to_string(total) + " (deg " + deg.str() + ")");
    }
    r.detail = join(got);
    return r;
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

inline CriterionResult c9_dynamics(const std::string& data_dir) {
    CriterionResult r{9, "dynamical degrees", true, ""};
    std::vector<std::string> notes;
    auto fig = hurwitz_from_json(read_json_file(data_dir + "/fig1_self.json"));
    auto full = fully_mark(fig).data;
    std::vector<Rational> oracle;
    for (int y = 1; y <= 3; ++y) oracle.push_back(theta1_oracle(full, fig.num_a(), 0, y));
    bool oracle_consistent = oracle[0] == oracle[1] && oracle[1] == oracle[2];
    auto m0 = self_correspondence_matrix(fig, 0).entries;
    auto m1 = self_correspondence_matrix(fig, 1).entries;
    auto t0 = dynamical_degree(m0), t1 = dynamical_degree(m1);
    bool fig_ok = t0.theta_exact && *t0.theta_exact == 4 && oracle_consistent && m1.size() == 1 &&
                  m1[0][0] == oracle[0] && t1.theta >= 1 && t1.theta <= 4;
    notes.push_back("cubic theta0=" + fmt(t0.theta) + " theta1=" + fmt(t1.theta) + " oracle=" +
                    to_fraction_string(oracle[0]));
    if (!fig_ok) r.pass = false;

    std::vector<std::pair<std::string, Matrix>> mats{{"cubic k0", m0}, {"cubic k1", m1}};
    for (std::string f : {"n5_d2_self.json", "identity5.json"}) {
        auto h = hurwitz_from_json(read_json_file(data_dir + "/" + f));
        mats.emplace_back(f + " k0", self_correspondence_matrix(h, 0).entries);
        mats.emplace_back(f + " k1", self_correspondence_matrix(h, 1).entries);
    }
    int real_ok = 0, square_ok = 0, stable_ok = 0;
    for (std::size_t i = 0; i < mats.size(); ++i) {
        auto rep = dynamical_degree(mats[i].second);
        auto sq = dynamical_degree(multiply(mats[i].second, mats[i].second));
        if (rep.dominant_real_nonnegative && rep.power_iteration_agrees) ++real_ok;
        if (std::abs(sq.theta - rep.theta * rep.theta) <= 1e-9 * std::max(1.0, sq.theta)) ++square_ok;
        if (i % 2 == 1) {
            auto lower = dynamical_degree(mats[i - 1].second);
            if (rep.theta <= lower.theta + 1e-9) ++stable_ok;
        }
    }
    int n = static_cast<int>(mats.size());
    if (real_ok != n || square_ok != n || stable_ok != n / 2) r.pass = false;
    notes.push_back("real dominant " + std::to_string(real_ok) + "/" + std::to_string(n) + ", squares " +
                    std::to_string(square_ok) + "/" + std::to_string(n) + ", theta1<=theta0 " +
                    std::to_string(stable_ok) + "/" + std::to_string(n / 2));
    auto id0 = dynamical_degree(mats[4].second), id1 = dynamical_degree(mats[5].second);
    bool id_ok = id0.theta_exact && *id0.theta_exact == 1 && id1.theta_exact && *id1.theta_exact == 1;
    if (!id_ok) r.pass = false;
    notes.push_back("d=1 theta0=" + fmt(id0.theta) + " theta1=" + fmt(id1.theta));
    r.detail = join(notes);
    return r;
}

inline CriterionResult c10_forgetful_preservation() {
    CriterionResult r{10, "forgetful pushforward N=7 -> 6 preserves Lambda^<=lambda, k <= 2", true, ""};
    long long images = 0, bad = 0;
    for (int k = 0; k <= 2; ++k) {
        auto src = homology_basis(7, k);
        auto tp = homology_basis(6, k);
        for (const auto& lam : partitions_of(k)) {
            auto target = lambda_subspace(6, k, lam);
            for (const auto& s : src->strata()) {
                if (!refines(induced_partition(s), lam)) continue;
                for (int j = 0; j < 7; ++j) {
                    auto img = forget_mark(s, j);
                    if (!img) continue;
                    ++images;
                    if (!target.space.contains(tp->coords(*img))) ++bad;
                }
            }
        }
    }
    r.pass = bad == 0;
    r.detail = std::to_string(images) + " images checked, " + std::to_string(bad) + " outside";
    return r;
}

/// Criteria 1-10; criterion 11 compares two runs of this report and lives with the CLI.
inline std::vector<CriterionResult> run_all(const std::string& data_dir, std::ostream& log) {
    std::vector<CriterionResult> out;
    auto guarded = [&](int id, const std::string& name, const std::function<CriterionResult()>& f) {
        try {
            out.push_back(f());
        } catch (const std::exception& e) {
            out.push_back({id, name, false, std::string("exception: ") + e.what()});
        }
    };
    guarded(1, "dimension formula", [&] { return c1_dimension_formula(log); });
    guarded(2, "duality", [] { return c2_duality(); });
    guarded(3, "Omega dimensions", [] { return c3_omega_dims(); });
    guarded(4, "unique stable vertex", [] { return c4_unique_stable_vertex(); });
    guarded(5, "Hassett kernel", [] { return c5_hassett_kernel(); });
    guarded(6, "KM orthogonality", [] { return c6_km_orthogonality(); });
    guarded(7, "Hurwitz counts", [&] { return c7_hurwitz_counts(data_dir, log); });
    guarded(8, "degeneration degree", [&] { return c8_degeneration_degree(data_dir); });
    guarded(9, "dynamics", [&] { return c9_dynamics(data_dir); });
    guarded(10, "forgetful preservation", [] { return c10_forgetful_preservation(); });
    return out;
}

inline std::string format_line(const CriterionResult& c) {
    return std::string(c.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(c.id) + ": " + c.name + " | " + c.detail;
}

} // namespace acceptance
} // namespace hdyn
