#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdyn/echelon.hpp"
#include "hdyn/numeric.hpp"

namespace hdyn {

/// Polynomial with rational coefficients, lowest degree first.
using Poly = std::vector<Rational>;

inline void trim(Poly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

inline int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

inline Rational evaluate(const Poly& p, const Rational& x) {
    Rational v = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
    return v;
}

inline Poly derivative(const Poly& p) {
    Poly d;
    for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * Rational(static_cast<int>(i)));
    return d;
}

/// Remainder of a by b.
inline Poly poly_rem(Poly a, const Poly& b) {
    trim(a);
    int db = degree(b);
    while (degree(a) >= db && !a.empty()) {
        Rational f = a.back() / b.back();
        int shift = degree(a) - db;
        for (int i = 0; i <= db; ++i) a[shift + i] -= f * b[i];
        a.pop_back();
        trim(a);
    }
    return a;
}

inline Poly poly_div(Poly a, const Poly& b) {
    trim(a);
    int db = degree(b);
    if (degree(a) < db) return {};
    Poly q(degree(a) - db + 1);
    while (!a.empty() && degree(a) >= db) {
        Rational f = a.back() / b.back();
        int shift = degree(a) - db;
        q[shift] = f;
        for (int i = 0; i <= db; ++i) a[shift + i] -= f * b[i];
        a.pop_back();
        trim(a);
    }
    return q;
}

inline Poly poly_gcd(Poly a, Poly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = poly_rem(a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Rational lead = a.back();
        for (auto& c : a) c /= lead;
    }
    return a;
}

/// det(xI - M) by Faddeev-LeVerrier, exact.
inline Poly characteristic_polynomial(const Matrix& m) {
    int n = static_cast<int>(m.size());
    Poly c(n + 1);
    c[n] = 1;
    Matrix a = identity_matrix(n); // M_k
    Matrix prod;
    for (int k = 1; k <= n; ++k) {
        prod = multiply(m, a);
        Rational tr = 0;
        for (int i = 0; i < n; ++i) tr += prod[i][i];
        c[n - k] = -tr / Rational(k);
        a = prod;
        for (int i = 0; i < n; ++i) a[i][i] += c[n - k];
    }
    return c;
}

/// Integer coefficients with the same roots (denominators cleared, content removed).
inline std::vector<Integer> integer_polynomial(const Poly& p) {
    Integer l = 1;
    for (const auto& c : p) {
        Integer d = denominator_of(c);
        l = l / boost::multiprecision::gcd(l, d) * d;
    }
    std::vector<Integer> out;
    Integer g = 0;
    for (const auto& c : p) {
        out.push_back(numerator_of(c) * (l / denominator_of(c)));
        g = boost::multiprecision::gcd(g, boost::multiprecision::abs(out.back()));
    }
    if (g > 1)
        for (auto& x : out) x /= g;
    if (!out.empty() && out.back() < 0)
        for (auto& x : out) x = -x;
    return out;
}

class SturmChain {
public:
    explicit SturmChain(Poly p) {
        trim(p);
        Poly dp = derivative(p);
        Poly g = poly_gcd(p, dp);
        if (degree(g) > 0) p = poly_div(p, g);
        chain_.push_back(p);
        chain_.push_back(derivative(p));
        trim(chain_.back());
        while (!chain_.back().empty() && degree(chain_.back()) > 0) {
            Poly r = poly_rem(chain_[chain_.size() - 2], chain_.back());
            if (r.empty()) break;
            for (auto& c : r) c = -c;
            chain_.push_back(std::move(r));
        }
    }

    int sign_changes(const Rational& x) const {
        int changes = 0, last = 0;
        for (const auto& q : chain_) {
            if (q.empty()) continue;
            Rational v = evaluate(q, x);
            int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
            if (s == 0) continue;
            if (last != 0 && s != last) ++changes;
            last = s;
        }
        return changes;
    }

    /// Number of distinct real roots in (a, b].
    int roots_in(const Rational& a, const Rational& b) const { return sign_changes(a) - sign_changes(b); }

    const Poly& squarefree() const { return chain_.front(); }

private:
    std::vector<Poly> chain_;
};

inline Rational cauchy_bound(const Poly& p) {
    Rational m = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        Rational r = p[i] / p.back();
        if (r < 0) r = -r;
        if (r > m) m = r;
    }
    return m + 1;
}

/// Interval of width <= tol around the largest real root, or nullopt if there is none.
inline std::optional<std::pair<Rational, Rational>> largest_real_root(const Poly& p, const Rational& tol) {
    SturmChain s(p);
    Rational bound = cauchy_bound(s.squarefree());
    Rational lo = -bound, hi = bound;
    if (s.roots_in(lo, hi) == 0) return std::nullopt;
    // invariant: a root in (lo, hi] and none above hi
    while (hi - lo > tol) {
        Rational mid = (lo + hi) / 2;
        if (s.roots_in(mid, hi) > 0) lo = mid;
        else hi = mid;
    }
    return std::make_pair(lo, hi);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

struct DegreeReport {
    double theta = 0;                 // spectral radius
    std::optional<Integer> theta_exact; // when the spectral radius is an integer root
    std::vector<Integer> char_poly;   // lowest degree first
    std::string method;
    double tolerance = 1e-9;
    bool dominant_real_nonnegative = false;
    double power_iteration = 0;
    bool power_iteration_agrees = false;
};

namespace detail {

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
    int n = static_cast<int>(m.size());
    Eigen::MatrixXd e(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) e(i, j) = to_double(m[i][j]);
    return e;
}

/// Growth rate of ||M^t x|| measured over two steps, so that a dominant +/- pair does not
/// make the estimate oscillate.
inline double power_iteration(const Eigen::MatrixXd& m, int steps = 4000) {
    int n = static_cast<int>(m.rows());
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = 1.0 + 0.001 * (i + 1);
    double est = 0;
    for (int t = 0; t < steps; ++t) {
        Eigen::VectorXd y = m * (m * x);
        double ny = y.norm(), nx = x.norm();
        if (ny == 0 || nx == 0) return 0;
        est = std::sqrt(ny / nx);
        x = y / ny;
    }
    return est;
}

} // namespace detail

inline constexpr int kExactRootLimit = 64;

/// Spectral radius of a square rational matrix: exact characteristic polynomial with Sturm
/// isolation of the dominant real root, checked against Eigen and power iteration.
inline DegreeReport dynamical_degree(const Matrix& m, double tol = 1e-9) {
    int n = static_cast<int>(m.size());
    for (const auto& row : m)
        if (static_cast<int>(row.size()) != n) throw ValidationError("matrix must be square");
    DegreeReport rep;
    rep.tolerance = tol;
    if (n == 0) {
        rep.method = "exact_roots";
        rep.dominant_real_nonnegative = true;
        rep.power_iteration_agrees = true;
        return rep;
    }
    Eigen::MatrixXd em = detail::to_eigen(m);
    Eigen::EigenSolver<Eigen::MatrixXd> es(em, false);
    double radius = 0;
    for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(es.eigenvalues()[i]));
    double scale = std::max(1.0, radius);

    if (n <= kExactRootLimit) {
        Poly p = characteristic_polynomial(m);
        rep.char_poly = integer_polynomial(p);
        Rational rt = Rational(1, 1);
        // tolerance as a dyadic rational below tol
        while (to_double(rt) > tol) rt /= 2;
        auto top = largest_real_root(p, rt);
        // largest absolute real root: also look at -x
        Poly neg = p;
        for (std::size_t i = 1; i < neg.size(); i += 2) neg[i] = -neg[i];
        auto bottom = largest_real_root(neg, rt);
        double pos = top ? to_double((top->first + top->second) / 2) : -1;
        double negabs = bottom ? to_double((bottom->first + bottom->second) / 2) : -1;
        double real_radius = std::max(pos, negabs);
        if (real_radius >= 0 && std::abs(real_radius - radius) <= 1e-6 * scale) {
            rep.theta = real_radius;
            rep.method = "exact_roots";
            rep.dominant_real_nonnegative = pos >= 0 && pos + 1e-6 * scale >= radius;
            if (rep.dominant_real_nonnegative) {
                Integer r = Integer(static_cast<long long>(std::llround(pos)));
                if (evaluate(p, Rational(r)) == 0) {
                    rep.theta_exact = r;
                    rep.theta = static_cast<double>(r);
                }
            }
        } else {
            rep.theta = radius;
            rep.method = "eigen_modulus";
        }
    } else {
        rep.theta = detail::power_iteration(em);
        rep.method = "power_iteration";
        for (int i = 0; i < n; ++i) {
            auto z = es.eigenvalues()[i];
            if (std::abs(std::abs(z) - radius) <= 1e-6 * scale && std::abs(z.imag()) <= 1e-6 * scale && z.real() >= 0)
                rep.dominant_real_nonnegative = true;
        }
    }
    rep.power_iteration = detail::power_iteration(em);
    rep.power_iteration_agrees = std::abs(rep.power_iteration - rep.theta) <= 1e-6 * std::max(1.0, rep.theta);
    return rep;
}

} // namespace hdyn
