#include <gtest/gtest.h>

#include "hdyn/hassett.hpp"

using namespace hdyn;

namespace {

WeightDatum uniform(int n, Rational w) { return WeightDatum{std::vector<Rational>(n, w)}; }

// Oracle: minimality checked over every subset directly.
bool minimal_by_definition(const WeightDatum& e) {
    int n = e.size();
    Rational t = e.total();
    for (Mask p = 0; p < (Mask{1} << n); ++p) {
        Rational s = e.block_weight(p);
        if ((s > 1) != (t - s < 1)) return false;
    }
    return true;
}

} // namespace

TEST(Hassett, DaggerValues) {
    auto e5 = epsilon_dagger(5);
    for (const auto& w : e5.weights) EXPECT_EQ(w, Rational(2, 5) + Rational(1, 100000));
    auto e6 = epsilon_dagger(6);
    EXPECT_EQ(e6.weights[0], Rational(1, 3) + Rational(1, 1000000));
    for (int i = 1; i < 6; ++i) EXPECT_EQ(e6.weights[i], Rational(1, 3) - Rational(1, 6000000));
    EXPECT_THROW(epsilon_dagger(3), ValidationError);
}

TEST(Hassett, Minimality) {
    for (int n = 4; n <= 14; ++n) EXPECT_TRUE(is_minimal(epsilon_dagger(n))) << n;
    for (int n = 4; n <= 8; ++n) EXPECT_FALSE(is_minimal(uniform(n, 1)));
    EXPECT_TRUE(is_minimal(uniform(5, Rational(41, 100))));
    EXPECT_FALSE(is_minimal(uniform(6, Rational(1, 2))));
    EXPECT_THROW(is_minimal(uniform(4, Rational(1, 2))), ValidationError);
    EXPECT_THROW(is_minimal(uniform(4, Rational(3, 2))), ValidationError);
}

TEST(Hassett, MinimalityMatchesDefinition) {
    std::vector<WeightDatum> cases;
    for (int n = 4; n <= 9; ++n) {
        cases.push_back(epsilon_dagger(n));
        for (int num = 1; num <= 20; ++num) {
            Rational w(num, 20);
            if (w * n > 2) cases.push_back(uniform(n, w));
        }
        WeightDatum mixed{std::vector<Rational>(n, Rational(1, 3))};
        mixed.weights[0] = 1;
        if (mixed.total() > 2) cases.push_back(mixed);
    }
    for (const auto& e : cases) EXPECT_EQ(is_minimal(e), minimal_by_definition(e));
}

TEST(Hassett, DaggerHeavySubsets) {
    for (int n = 4; n <= 10; ++n) {
        auto e = epsilon_dagger(n);
        for (Mask p = 0; p < (Mask{1} << n); ++p) {
            int sz = popcount(p);
            bool heavy = 2 * sz > n || (2 * sz == n && (p & 1));
            EXPECT_EQ(e.block_weight(p) > 1, heavy) << n << " " << p;
        }
    }
}

TEST(Hassett, StableVertices) {
    auto e6 = epsilon_dagger(6);
    EXPECT_EQ(stable_vertices(Stratum::single_vertex(6), e6), std::vector<int>{0});
    Stratum s = Stratum::from_splits(6, {bit(3) | bit(4) | bit(5)});
    auto sv = stable_vertices(s, e6);
    ASSERT_EQ(sv.size(), 1u);
    EXPECT_EQ(sv[0], s.vertex_of_mark(0));
    auto t = reduction_image_type(s, e6);
    EXPECT_EQ(t.dim, 1);
    EXPECT_EQ(t.blocks, (std::vector<Mask>{bit(0), bit(1), bit(2), bit(3) | bit(4) | bit(5)}));
    auto single = reduction_image_type(Stratum::single_vertex(6), e6);
    EXPECT_EQ(single.dim, 3);
    EXPECT_EQ(single.blocks.size(), 6u);
    EXPECT_THROW(reduction_image_type(s, uniform(6, 1)), ValidationError);
}

TEST(Hassett, UniqueStableVertexEverywhere) {
    for (int n = 4; n <= 8; ++n) {
        auto e = epsilon_dagger(n);
        for (const auto& s : all_strata(n)) EXPECT_EQ(stable_vertices(s, e).size(), 1u);
    }
}

TEST(Hassett, KernelExamples) {
    EXPECT_EQ(reduction_kernel(5, 1, epsilon_dagger(5)).dim(), 0);
    auto k62 = reduction_kernel(6, 2, epsilon_dagger(6));
    EXPECT_EQ(k62.dim(), 10);
    EXPECT_TRUE(k62.space == lambda_less_top(6, 2).space);
    auto p = homology_basis(6, 3);
    EXPECT_FALSE(reduction_kernel(6, 3, epsilon_dagger(6)).space.contains(p->coords(Stratum::single_vertex(6))));
    EXPECT_THROW(reduction_kernel(6, 2, uniform(6, 1)), ValidationError);
}

TEST(Hassett, KernelContainsLambdaLessAndEqualsInHalfRange) {
    for (int n = 4; n <= 7; ++n)
        for (int k = 0; k <= n - 3; ++k) {
            auto ker = reduction_kernel(n, k, epsilon_dagger(n));
            auto lam = k >= 1 ? lambda_less_top(n, k).space : Subspace(homology_basis(n, k)->rank());
            EXPECT_TRUE(ker.space.contains(lam)) << n << " " << k;
            if (2 * k >= n - 3) {
                EXPECT_TRUE(ker.space == lam) << n << " " << k;
            }
        }
}
