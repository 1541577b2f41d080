#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdyn/hassett.hpp"
#include "hdyn/hurwitz.hpp"
#include "hdyn/pushforward.hpp"
#include "hdyn/spectral.hpp"
#include "hdyn/tree.hpp"

namespace hdyn {

using Json = nlohmann::ordered_json;

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError("malformed JSON in " + path + ": " + e.what());
    }
}

/// {"n": N, "parents": [...], "legs": {"1": v, ...}}: canonical vertex order, root parent -1,
/// marks numbered from 1.
inline Json stratum_to_json(const Stratum& s) {
    Json parents = Json::array();
    for (int v = 0; v < s.vertex_count(); ++v) parents.push_back(s.vertex(v).parent);
    Json legs = Json::object();
    for (int i = 0; i < s.marks(); ++i) legs[std::to_string(i + 1)] = s.vertex_of_mark(i);
    return Json{{"n", s.marks()}, {"parents", parents}, {"legs", legs}};
}

inline Stratum stratum_from_json(const Json& j) {
    try {
        MarkedTree t;
        t.n = j.at("n").get<int>();
        const auto& parents = j.at("parents");
        t.vertex_count = static_cast<int>(parents.size());
        for (int v = 0; v < t.vertex_count; ++v) {
            int p = parents[v].get<int>();
            if (p >= t.vertex_count || (p < 0 && v != 0) || (v == 0 && p != -1))
                throw ValidationError("parents must list -1 for vertex 0 and valid indices otherwise");
            if (p >= 0) t.edges.emplace_back(p, v);
        }
        t.leg_vertex.assign(t.n, -1);
        for (const auto& [key, val] : j.at("legs").items()) {
            int mark = std::stoi(key);
            if (mark < 1 || mark > t.n) throw ValidationError("leg label out of range: " + key);
            int v = val.get<int>();
            if (v < 0 || v >= t.vertex_count) throw ValidationError("leg attached to unknown vertex");
            t.leg_vertex[mark - 1] = v;
        }
        return Stratum::from_tree(t);
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed stratum: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw ValidationError("leg labels must be integers");
    }
}

inline Partition partition_from_json(const Json& j) {
    std::vector<int> parts;
    for (const auto& x : j) {
        int r = x.get<int>();
        if (r < 1) throw ValidationError("partition parts must be positive");
        parts.push_back(r);
    }
    return Partition(std::move(parts));
}

inline Json partition_to_json(const Partition& p) {
    Json a = Json::array();
    for (int r : p.parts()) a.push_back(r);
    return a;
}

inline HurwitzData hurwitz_from_json(const Json& j) {
    try {
        HurwitzData h;
        h.A = j.at("A").get<std::vector<std::string>>();
        h.B = j.at("B").get<std::vector<std::string>>();
        h.d = j.at("d").get<int>();
        std::map<std::string, int> ai, bi;
        for (int i = 0; i < h.num_a(); ++i) ai[h.A[i]] = i;
        for (int i = 0; i < h.num_b(); ++i) bi[h.B[i]] = i;
        auto a_index = [&](const std::string& name) {
            auto it = ai.find(name);
            if (it == ai.end()) throw ValidationError("unknown source mark " + name);
            return it->second;
        };
        auto b_index = [&](const std::string& name) {
            auto it = bi.find(name);
            if (it == bi.end()) throw ValidationError("unknown target mark " + name);
            return it->second;
        };
        h.F.assign(h.num_a(), -1);
        h.rm.assign(h.num_a(), 0);
        h.br.assign(h.num_b(), Partition());
        for (const auto& [a, b] : j.at("F").items()) h.F[a_index(a)] = b_index(b.get<std::string>());
        for (const auto& [a, r] : j.at("rm").items()) h.rm[a_index(a)] = r.get<int>();
        std::vector<bool> seen(h.num_b(), false);
        for (const auto& [b, p] : j.at("br").items()) {
            int idx = b_index(b);
            h.br[idx] = partition_from_json(p);
            seen[idx] = true;
        }
        for (int a = 0; a < h.num_a(); ++a)
            if (h.F[a] < 0 || h.rm[a] == 0) throw ValidationError("F and rm must be given for " + h.A[a]);
        for (int b = 0; b < h.num_b(); ++b)
            if (!seen[b]) throw ValidationError("br must be given for " + h.B[b]);
        if (j.contains("forget_to")) {
            std::vector<int> k;
            for (const auto& a : j.at("forget_to")) k.push_back(a_index(a.get<std::string>()));
            h.forget_to = k;
        }
        if (j.contains("identify")) {
            std::vector<int> id(h.num_b(), -1);
            for (const auto& [b, a] : j.at("identify").items()) id[b_index(b)] = a_index(a.get<std::string>());
            h.identify = id;
        }
        return h;
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("malformed Hurwitz data: ") + e.what());
    }
}

inline Json hurwitz_to_json(const HurwitzData& h) {
    Json j;
    j["A"] = h.A;
    j["B"] = h.B;
    j["d"] = h.d;
    Json f = Json::object(), br = Json::object(), rm = Json::object();
    for (int a = 0; a < h.num_a(); ++a) {
        f[h.A[a]] = h.B[h.F[a]];
        rm[h.A[a]] = h.rm[a];
    }
    for (int b = 0; b < h.num_b(); ++b) br[h.B[b]] = partition_to_json(h.br[b]);
    j["F"] = f;
    j["br"] = br;
    j["rm"] = rm;
    if (h.forget_to) {
        Json k = Json::array();
        for (int a : *h.forget_to) k.push_back(h.A[a]);
        j["forget_to"] = k;
    }
    if (h.identify) {
        Json id = Json::object();
        for (int b = 0; b < h.num_b(); ++b) id[h.B[b]] = h.A[(*h.identify)[b]];
        j["identify"] = id;
    }
    return j;
}

/// Integral rationals as JSON integers, others as fraction strings.
inline Json rational_to_json(const Rational& q) {
    if (denominator_of(q) == 1) {
        Integer n = numerator_of(q);
        if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max())
            return Json(static_cast<long long>(n));
    }
    return Json(to_fraction_string(q));
}

inline Json integer_to_json(const Integer& n) {
    if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max())
        return Json(static_cast<long long>(n));
    return Json(n.str());
}

inline Json matrix_to_json(const Matrix& m) {
    Json exact = Json::array(), approx = Json::array();
    for (const auto& row : m) {
        Json r = Json::array(), f = Json::array();
        for (const auto& x : row) {
            r.push_back(to_fraction_string(x));
            f.push_back(to_double(x));
        }
        exact.push_back(r);
        approx.push_back(f);
    }
    return Json{{"rows", m.size()}, {"cols", m.empty() ? 0 : m[0].size()}, {"entries", exact}, {"entries_float", approx}};
}

inline Rational rational_from_json(const Json& x) {
    if (x.is_number_integer()) return Rational(x.get<long long>());
    if (x.is_string()) return parse_fraction(x.get<std::string>());
    throw ValidationError("matrix entries must be integers or fraction strings");
}

/// Accepts {"entries": [[...]]} or a bare array of rows.
inline Matrix matrix_from_json(const Json& j) {
    const Json& rows = j.is_object() ? j.at("entries") : j;
    if (!rows.is_array()) throw ValidationError("matrix must be an array of rows");
    Matrix m;
    for (const auto& row : rows) {
        if (!row.is_array()) throw ValidationError("matrix rows must be arrays");
        std::vector<Rational> r;
        for (const auto& x : row) r.push_back(rational_from_json(x));
        if (!m.empty() && r.size() != m[0].size()) throw ValidationError("matrix rows have different lengths");
        m.push_back(std::move(r));
    }
    return m;
}

inline Json pushforward_to_json(const PushforwardMatrix& p) {
    Json j = matrix_to_json(p.entries);
    j["k"] = p.k;
    j["source_n"] = p.source_n;
    j["target_n"] = p.target_n;
    Json sb = Json::array(), tb = Json::array();
    for (const auto& s : p.source_basis) sb.push_back(stratum_to_json(s));
    for (const auto& s : p.target_basis) tb.push_back(stratum_to_json(s));
    j["source_basis"] = sb;
    j["target_basis"] = tb;
    return j;
}

inline WeightDatum weights_from_json(const Json& j) {
    if (!j.is_array()) throw ValidationError("weights must be an array of fraction strings");
    WeightDatum w;
    for (const auto& x : j) w.weights.push_back(rational_from_json(x));
    return w;
}

inline Json degree_report_to_json(const DegreeReport& r) {
    Json j;
    if (r.theta_exact) j["theta"] = integer_to_json(*r.theta_exact);
    else j["theta"] = r.theta;
    j["method"] = r.method;
    return j;
}

inline Json degree_report_full_json(const DegreeReport& r) {
    Json j = degree_report_to_json(r);
    Json cp = Json::array();
    for (const auto& c : r.char_poly) cp.push_back(c.str());
    j["char_poly"] = cp;
    j["tolerance"] = r.tolerance;
    j["dominant_real_nonnegative"] = r.dominant_real_nonnegative;
    j["power_iteration"] = r.power_iteration;
    j["power_iteration_agrees"] = r.power_iteration_agrees;
    return j;
}

} // namespace hdyn
