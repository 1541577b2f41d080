#include <gtest/gtest.h>

#include <random>

#include "hdyn/spectral.hpp"

using namespace hdyn;

namespace {

Matrix from_ints(const std::vector<std::vector<int>>& a) {
    Matrix m;
    for (const auto& row : a) {
        std::vector<Rational> r;
        for (int x : row) r.emplace_back(x);
        m.push_back(r);
    }
    return m;
}

} // namespace

TEST(Spectral, SmallExamples) {
    auto r = dynamical_degree(from_ints({{2}}));
    ASSERT_TRUE(r.theta_exact);
    EXPECT_EQ(*r.theta_exact, 2);
    EXPECT_EQ(r.method, "exact_roots");
    auto s = dynamical_degree(from_ints({{0, 1}, {1, 0}}));
    EXPECT_NEAR(s.theta, 1, 1e-12);
    EXPECT_TRUE(s.dominant_real_nonnegative);
    EXPECT_TRUE(s.power_iteration_agrees);
    auto g = dynamical_degree(from_ints({{1, 1}, {1, 0}}));
    EXPECT_NEAR(g.theta, (1 + std::sqrt(5.0)) / 2, 1e-9);
    EXPECT_FALSE(g.theta_exact);
}

TEST(Spectral, CharacteristicPolynomialOf2x2) {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> u(-9, 9);
    for (int t = 0; t < 50; ++t) {
        int a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        auto p = characteristic_polynomial(from_ints({{a, b}, {c, d}}));
        EXPECT_EQ(p[2], 1);
        EXPECT_EQ(p[1], -(a + d));
        EXPECT_EQ(p[0], a * d - b * c);
    }
}

TEST(Spectral, RationalEntries) {
    Matrix m{{Rational(1, 2), Rational(0)}, {Rational(1), Rational(1, 3)}};
    auto r = dynamical_degree(m);
    EXPECT_NEAR(r.theta, 0.5, 1e-9);
    EXPECT_EQ(r.char_poly, (std::vector<Integer>{1, -5, 6}));
}

TEST(Spectral, NonPerronCasesAreFlagged) {
    auto rot = dynamical_degree(from_ints({{0, -1}, {1, 0}}));
    EXPECT_FALSE(rot.dominant_real_nonnegative);
    EXPECT_NEAR(rot.theta, 1, 1e-9);
    auto neg = dynamical_degree(from_ints({{-3, 0}, {0, 1}}));
    EXPECT_FALSE(neg.dominant_real_nonnegative);
    EXPECT_NEAR(neg.theta, 3, 1e-9);
}

TEST(Spectral, AgreesWithEigenOnRandomNonnegativeMatrices) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> u(0, 5);
    for (int t = 0; t < 40; ++t) {
        int n = 2 + t % 6;
        std::vector<std::vector<int>> a(n, std::vector<int>(n));
        for (auto& row : a)
            for (auto& x : row) x = u(rng);
        a[0][0] += 1;
        Matrix m = from_ints(a);
        auto r = dynamical_degree(m);
        Eigen::MatrixXd e(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) e(i, j) = a[i][j];
        Eigen::EigenSolver<Eigen::MatrixXd> es(e, false);
        double rad = 0;
        for (int i = 0; i < n; ++i) rad = std::max(rad, std::abs(es.eigenvalues()[i]));
        EXPECT_NEAR(r.theta, rad, 1e-9 * std::max(1.0, rad));
        EXPECT_TRUE(r.dominant_real_nonnegative);
        EXPECT_EQ(r.method, "exact_roots");
        auto sq = dynamical_degree(multiply(m, m));
        EXPECT_NEAR(sq.theta, r.theta * r.theta, 1e-9 * std::max(1.0, sq.theta));
    }
}

TEST(Spectral, SturmCountsRoots) {
    // (x-1)(x-2)(x+3)^2
    Poly p{Rational(18), Rational(-15), Rational(-7), Rational(3), Rational(1)};
    SturmChain s(p);
    EXPECT_EQ(s.roots_in(Rational(-10), Rational(10)), 3);
    EXPECT_EQ(s.roots_in(Rational(0), Rational(3, 2)), 1);
    auto top = largest_real_root(p, Rational(1, 1 << 30));
    ASSERT_TRUE(top);
    EXPECT_NEAR(to_double(top->second), 2, 1e-9);
}
