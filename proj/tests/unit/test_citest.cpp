#include "qpmix/citest.hpp"
#include "qpmix/errors.hpp"
#include "qpmix/rng.hpp"
#include "oracles/classical_tests.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace qpmix {
namespace {

MixedDataset make_dataset(int n_disc, std::vector<int> levels, IntMatrix disc, Eigen::MatrixXd cont) {
    std::vector<Mark> marks(static_cast<std::size_t>(n_disc), Mark::Discrete);
    marks.resize(static_cast<std::size_t>(n_disc + cont.cols()), Mark::Continuous);
    levels.resize(marks.size(), 0);
    return MixedDataset(std::move(marks), std::move(levels), std::move(disc), std::move(cont));
}

// Vertices: 0 = delta (k levels), 1 = x (binary), 2 = gamma, 3 = eta, 4 = z.
// gamma, eta and delta are mutually independent given {x, z}.
MixedDataset null_dataset(int n, int k, Rng& rng) {
    IntMatrix disc(n, 2);
    Eigen::MatrixXd cont(n, 3);
    for (int r = 0; r < n; ++r) {
        const int x = static_cast<int>(rng.uniform_int(2));
        const int delta = rng.uniform() < 0.6 ? x % k : static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k)));
        const double z = rng.normal();
        disc(r, 0) = delta;
        disc(r, 1) = x;
        cont(r, 0) = 0.6 * z + 0.8 * x + rng.normal();
        cont(r, 1) = -0.4 * z - 0.5 * x + rng.normal();
        cont(r, 2) = z;
    }
    return make_dataset(2, {k, 2}, disc, cont);
}

TEST(TestKind, Parse) {
    EXPECT_EQ(parse_test_kind("exact"), TestKind::Exact);
    EXPECT_EQ(parse_test_kind("asymptotic"), TestKind::Asymptotic);
    EXPECT_EQ(to_string(TestKind::Asymptotic), "asymptotic");
    EXPECT_THROW(parse_test_kind("fisher"), ConfigError);
}

TEST(ExactContinuous, MatchesPearsonTTest) {
    Rng rng(1);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 10 + static_cast<int>(rng.uniform_int(41));
        Eigen::MatrixXd y(n, 2);
        for (int r = 0; r < n; ++r) {
            y(r, 0) = rng.normal();
            y(r, 1) = 0.3 * y(r, 0) + rng.normal();
        }
        const auto d = make_dataset(0, {}, IntMatrix(n, 0), y);
        const auto res = ci_test(d, 0, 1, {}, 0.05);
        EXPECT_NEAR(res.p_exact, oracle::pearson_t_pvalue(y.col(0), y.col(1)), 1e-9) << "n=" << n;
    }
}

TEST(ExactMixed, MatchesAnovaFTest) {
    Rng rng(2);
    for (int rep = 0; rep < 200; ++rep) {
        const int k = rep % 2 ? 3 : 2;
        const int n = 10 + static_cast<int>(rng.uniform_int(41));
        IntMatrix x(n, 1);
        Eigen::MatrixXd y(n, 1);
        std::vector<int> group(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r) {
            group[static_cast<std::size_t>(r)] = x(r, 0) = r < k ? r : static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k)));
            y(r, 0) = 0.4 * x(r, 0) + rng.normal();
        }
        const auto d = make_dataset(1, {k}, x, y);
        const auto res = ci_test(d, 0, 1, {}, 0.05);
        EXPECT_NEAR(res.p_exact, oracle::anova_f_pvalue(group, y.col(0), k), 1e-9) << "n=" << n << " k=" << k;
        EXPECT_DOUBLE_EQ(res.beta_b, (k - 1) / 2.0);
    }
}

TEST(ExactTests, LambdaOneGivesPOne) {
    EXPECT_DOUBLE_EQ(exact_test_continuous(1.0, 25, 3, 2), 1.0);
    EXPECT_DOUBLE_EQ(exact_test_mixed(1.0, 25, 3, 4, 2, 2), 1.0);
    EXPECT_DOUBLE_EQ(asymptotic_test(1.0, 25, 2.0), 1.0);
}

TEST(ExactTests, ShapeArithmetic) {
    // n = 25, |Gamma| = 5, |I| = 4: a = (25 - 5 - 4 + 1) / 2.
    const double lambda = 0.7;
    EXPECT_DOUBLE_EQ(exact_test_continuous(lambda, 25, 5, 4), beta_lower_tail(lambda, 8.5, 0.5));
    // Ternary delta, |Gamma| = 1, |I| = 3, |I_rest| = 1: a = 11, b = 1.
    EXPECT_DOUBLE_EQ(exact_test_mixed(lambda, 25, 1, 3, 3, 1), beta_lower_tail(lambda, 11.0, 1.0));
    EXPECT_THROW(exact_test_continuous(0.5, 5, 5, 1), SampleSizeError);
    EXPECT_THROW(exact_test_mixed(0.5, 25, 1, 1, 1, 1), EmptyCellError);
    EXPECT_THROW(exact_test_continuous(1.5, 25, 2, 1), DomainError);
}

TEST(ExactTests, MonotoneInLambda) {
    double prev_c = 0.0, prev_m = 0.0, prev_a = 0.0;
    for (int k = 1; k <= 1000; ++k) {
        const double lambda = k / 1000.0;
        const double pc = exact_test_continuous(lambda, 30, 4, 2);
        const double pm = exact_test_mixed(lambda, 30, 3, 4, 2, 2);
        const double pa = asymptotic_test(lambda, 30, 2.0);
        EXPECT_GE(pc, prev_c);
        EXPECT_GE(pm, prev_m);
        EXPECT_GE(pa, prev_a);
        prev_c = pc, prev_m = pm, prev_a = pa;
    }
}

TEST(CiTest, DegreesOfFreedomAndShapes) {
    Rng rng(3);
    const auto d = null_dataset(60, 2, rng);
    const std::vector<Vertex> q{1, 4};
    const auto c = ci_test(d, 2, 3, q, 0.05);
    EXPECT_DOUBLE_EQ(c.df, 1.0);
    EXPECT_DOUBLE_EQ(c.beta_a, (60 - 3 - 2 + 1) / 2.0);
    EXPECT_DOUBLE_EQ(c.beta_b, 0.5);
    const auto m = ci_test(d, 0, 2, q, 0.05);
    EXPECT_DOUBLE_EQ(m.df, 2.0);  // |I_rest| (|I_delta| - 1) = 2 * 1
    EXPECT_DOUBLE_EQ(m.beta_a, (60 - 2 - 4 + 1) / 2.0);
    EXPECT_DOUBLE_EQ(m.beta_b, 1.0);
    EXPECT_EQ(m.effective_levels, 4);
    // Argument order does not matter.
    EXPECT_NEAR(ci_test(d, 2, 0, q, 0.05).p_exact, m.p_exact, 1e-12);
    EXPECT_NEAR(ci_test(d, 3, 2, q, 0.05).p_exact, c.p_exact, 1e-12);
    EXPECT_THROW(ci_test(d, 0, 1, {}, 0.05), DiscretePairError);
}

TEST(CiTest, RejectFlagFollowsKind) {
    Rng rng(4);
    const auto d = null_dataset(40, 2, rng);
    const auto exact = ci_test(d, 0, 2, {}, 0.5, TestKind::Exact);
    const auto asym = ci_test(d, 0, 2, {}, 0.5, TestKind::Asymptotic);
    EXPECT_EQ(exact.reject, exact.p_exact < 0.5);
    EXPECT_EQ(asym.reject, asym.p_asymptotic < 0.5);
}

TEST(CiTest, NullRejectionRate) {
    Rng rng(5);
    int rejections = 0;
    const int reps = 10000;
    for (int r = 0; r < reps; ++r) {
        Eigen::MatrixXd y(20, 2);
        for (int i = 0; i < 20; ++i) y(i, 0) = rng.normal(), y(i, 1) = rng.normal();
        rejections += ci_test(make_dataset(0, {}, IntMatrix(20, 0), y), 0, 1, {}, 0.05).reject;
    }
    EXPECT_NEAR(rejections / static_cast<double>(reps), 0.05, 0.01);
}

TEST(CiTest, PowerAtStrongMixedEffect) {
    // Means 0 and 4 (one sigma_h apart), unit variance.
    Rng rng(6);
    int strong = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        IntMatrix x(100, 1);
        Eigen::MatrixXd y(100, 1);
        for (int r = 0; r < 100; ++r) {
            x(r, 0) = static_cast<int>(rng.uniform_int(2));
            y(r, 0) = 4.0 * x(r, 0) + rng.normal();
        }
        const auto res = ci_test(make_dataset(1, {2}, x, y), 0, 1, {}, 0.05);
        strong += res.reject && res.p_exact < 1e-3;
    }
    EXPECT_GE(strong, 990);
}

class NullUniformity : public ::testing::TestWithParam<int> {};

TEST_P(NullUniformity, ExactPValuesAreUniform) {
    const int n = GetParam();
    Rng rng(static_cast<std::uint64_t>(700 + n));
    std::vector<double> pc, pm2, pm3;
    const std::vector<Vertex> q{1, 4};
    // Rare infeasible draws (a level of delta missing from every cell) are
    // skipped, as the non-rejection rate does.
    auto add = [&](std::vector<double>& out, const MixedDataset& d, Vertex a, Vertex b) {
        try {
            out.push_back(ci_test(d, a, b, q, 0.05).p_exact);
        } catch (const InfeasibleTestError&) {
        }
    };
    for (int rep = 0; rep < 10000; ++rep) {
        const auto d2 = null_dataset(n, 2, rng);
        add(pc, d2, 2, 3);
        add(pm2, d2, 0, 2);
        add(pm3, null_dataset(n, 3, rng), 0, 3);
    }
    EXPECT_GE(pm3.size(), 9900u);
    EXPECT_LE(oracle::ks_uniform(pc), 0.02);
    EXPECT_LE(oracle::ks_uniform(pm2), 0.02);
    EXPECT_LE(oracle::ks_uniform(pm3), 0.02);
}

INSTANTIATE_TEST_SUITE_P(SampleSizes, NullUniformity, ::testing::Values(25, 50, 75, 100));

TEST(CiTest, AsymptoticConvergesToExact) {
    Rng rng(8);
    double worst = 0.0;
    const std::vector<Vertex> q{1, 4};
    for (int rep = 0; rep < 50; ++rep) {
        const auto d = null_dataset(10000, 2, rng);
        for (const auto& [a, b] : {std::pair{2, 3}, std::pair{0, 2}}) {
            const auto res = ci_test(d, a, b, q, 0.05);
            worst = std::max(worst, std::fabs(res.p_exact - res.p_asymptotic));
        }
    }
    EXPECT_LE(worst, 0.01);
}

}  // namespace
}  // namespace qpmix
