#include "qpmix/errors.hpp"
#include "qpmix/rng.hpp"
#include "qpmix/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qpmix {
namespace {

MixedDataset make_dataset(int n_disc, std::vector<int> levels, IntMatrix disc, Eigen::MatrixXd cont) {
    std::vector<Mark> marks(static_cast<std::size_t>(n_disc), Mark::Discrete);
    marks.resize(static_cast<std::size_t>(n_disc + cont.cols()), Mark::Continuous);
    levels.resize(marks.size(), 0);
    return MixedDataset(std::move(marks), std::move(levels), std::move(disc), std::move(cont));
}

MixedDataset random_dataset(int n, int n_disc, int n_cont, std::uint64_t seed, int n_levels = 2) {
    Rng rng(seed);
    IntMatrix disc(n, n_disc);
    Eigen::MatrixXd cont(n, n_cont);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n_disc; ++c) disc(r, c) = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_levels)));
        for (int c = 0; c < n_cont; ++c) cont(r, c) = rng.normal() + 0.3 * (n_disc > 0 ? disc(r, 0) : 0);
    }
    return make_dataset(n_disc, std::vector<int>(static_cast<std::size_t>(n_disc), n_levels), disc, cont);
}

MixedDataset permute_rows(const MixedDataset& d, std::uint64_t seed) {
    std::vector<int> order(static_cast<std::size_t>(d.n()));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(i)]);
    IntMatrix disc(d.n(), d.n_discrete());
    Eigen::MatrixXd cont(d.n(), d.n_continuous());
    for (int r = 0; r < d.n(); ++r) {
        disc.row(r) = d.discrete_data().row(order[static_cast<std::size_t>(r)]);
        cont.row(r) = d.continuous_data().row(order[static_cast<std::size_t>(r)]);
    }
    std::vector<int> levels;
    for (int v = 0; v < d.p(); ++v) levels.push_back(d.is_discrete(v) ? d.levels(v) : 0);
    return MixedDataset(d.marks(), levels, disc, cont);
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const Eigen::ArrayXd dx = x.array() - x.mean(), dy = y.array() - y.mean();
    return (dx * dy).sum() / std::sqrt(dx.square().sum() * dy.square().sum());
}

TEST(SuffStats, SingleContinuousColumn) {
    Eigen::MatrixXd y(3, 1);
    y << 1, 2, 3;
    const auto d = make_dataset(0, {}, IntMatrix(3, 0), y);
    const std::vector<Vertex> vars{0};
    const auto s = compute_suffstats(d, vars);
    EXPECT_EQ(s.n, 3);
    EXPECT_EQ(s.n_i, std::vector<int>{3});
    EXPECT_DOUBLE_EQ(s.s_i(0, 0), 6.0);
    EXPECT_DOUBLE_EQ(s.ybar_i(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(s.ssd_i[0](0, 0), 2.0);
}

TEST(SuffStats, BinaryByContinuous) {
    IntMatrix x(3, 1);
    x << 0, 0, 1;
    Eigen::MatrixXd y(3, 1);
    y << 1, 3, 5;
    const auto d = make_dataset(1, {2}, x, y);
    const std::vector<Vertex> vars{0, 1};
    const auto s = compute_suffstats(d, vars);
    EXPECT_EQ(s.n_i, (std::vector<int>{2, 1}));
    EXPECT_DOUBLE_EQ(s.ybar_i(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(s.ybar_i(1, 0), 5.0);
    EXPECT_DOUBLE_EQ(s.ssd_i[0](0, 0), 2.0);
    EXPECT_DOUBLE_EQ(s.ssd_i[1](0, 0), 0.0);
    EXPECT_DOUBLE_EQ(s.pooled_ssd()(0, 0), 2.0);
    const std::vector<std::size_t> none;
    const std::vector<int> coords{0};
    // Unconditioned: values 1, 3, 5 around 3.
    EXPECT_DOUBLE_EQ(s.pooled_ssd(none, coords)(0, 0), 8.0);
    EXPECT_EQ(s.observed_cells(), 2);
}

TEST(SuffStats, MatchesTextbookCovariance) {
    const auto d = random_dataset(40, 0, 4, 3);
    const std::vector<Vertex> vars{0, 1, 2, 3};
    const auto s = compute_suffstats(d, vars);
    const Eigen::MatrixXd centered = d.continuous_data().rowwise() - d.continuous_data().colwise().mean();
    const Eigen::MatrixXd cov = centered.transpose() * centered / 39.0;
    EXPECT_LT((s.pooled_ssd() - 39.0 * cov).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(SuffStats, CellIdentitiesAndPooling) {
    const auto d = random_dataset(60, 2, 3, 4, 3);
    const std::vector<Vertex> vars{0, 1, 2, 3, 4};
    const auto s = compute_suffstats(d, vars);
    EXPECT_EQ(std::accumulate(s.n_i.begin(), s.n_i.end(), 0), 60);
    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(3, 3);
    for (std::size_t i = 0; i < s.cells.size(); ++i) {
        const auto& ssd = s.ssd_i[i];
        EXPECT_LT((ssd - ssd.transpose()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ssd).eigenvalues().minCoeff(), -1e-10);
        if (s.n_i[i] == 0) continue;
        // ssd(i) = ss(i) - s(i) s(i)' / n(i) with ss(i) computed independently.
        Eigen::MatrixXd ss = Eigen::MatrixXd::Zero(3, 3);
        for (int r = 0; r < d.n(); ++r) {
            const std::size_t cell = static_cast<std::size_t>(3 * d.discrete_data()(r, 0) + d.discrete_data()(r, 1));
            if (cell != i) continue;
            const Eigen::VectorXd y = d.continuous_data().row(r).transpose();
            ss += y * y.transpose();
        }
        const Eigen::VectorXd si = s.s_i.row(static_cast<Eigen::Index>(i)).transpose();
        EXPECT_LT((ssd - (ss - si * si.transpose() / s.n_i[i])).cwiseAbs().maxCoeff(), 1e-10);
        pooled += ssd;
    }
    EXPECT_LT((s.pooled_ssd() - pooled).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(LrContinuous, OneMinusRSquared) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto d = random_dataset(15 + static_cast<int>(seed), 0, 2, seed);
        const double r = pearson(d.continuous_data().col(0), d.continuous_data().col(1));
        const auto lr = lr_continuous(d, 0, 1, {});
        EXPECT_NEAR(lr.lambda, 1.0 - r * r, 1e-12);
        EXPECT_EQ(lr.n_continuous, 2);
        EXPECT_EQ(lr.observed_cells, 1);
    }
}

TEST(LrContinuous, PartialCorrelationGivenContinuous) {
    // Given one continuous z, Lambda = 1 - (partial r)^2.
    const auto d = random_dataset(30, 0, 3, 8);
    const auto& y = d.continuous_data();
    const double rxy = pearson(y.col(0), y.col(1)), rxz = pearson(y.col(0), y.col(2)), ryz = pearson(y.col(1), y.col(2));
    const double partial = (rxy - rxz * ryz) / std::sqrt((1 - rxz * rxz) * (1 - ryz * ryz));
    const std::vector<Vertex> q{2};
    EXPECT_NEAR(lr_continuous(d, 0, 1, q).lambda, 1.0 - partial * partial, 1e-12);
}

TEST(LrContinuous, DuplicatedColumnIsSingular) {
    Eigen::MatrixXd y(10, 2);
    Rng rng(1);
    for (int r = 0; r < 10; ++r) y(r, 0) = y(r, 1) = rng.normal();
    const auto d = make_dataset(0, {}, IntMatrix(10, 0), y);
    try {
        lr_continuous(d, 0, 1, {});
        FAIL();
    } catch (const SingularMatrixError& e) {
        EXPECT_FALSE(e.matrix().empty());
    }
}

TEST(LrMixed, AnovaRatio) {
    const auto d = random_dataset(25, 1, 1, 5);
    const auto lr = lr_mixed(d, 0, 1, {});
    const auto& y = d.continuous_data().col(0);
    const double grand = y.mean();
    double total = 0.0, within = 0.0;
    for (int level = 0; level < 2; ++level) {
        double sum = 0.0;
        int count = 0;
        for (int r = 0; r < 25; ++r)
            if (d.discrete_data()(r, 0) == level) sum += y(r), ++count;
        const double mean = sum / count;
        for (int r = 0; r < 25; ++r)
            if (d.discrete_data()(r, 0) == level) within += (y(r) - mean) * (y(r) - mean);
    }
    for (int r = 0; r < 25; ++r) total += (y(r) - grand) * (y(r) - grand);
    EXPECT_NEAR(lr.lambda, within / total, 1e-12);
    EXPECT_EQ(lr.observed_cells, 2);
    EXPECT_EQ(lr.observed_rest, 1);
}

TEST(LrMixed, ConstantContinuousIsSingular) {
    IntMatrix x(6, 1);
    x << 0, 1, 0, 1, 0, 1;
    const auto d = make_dataset(1, {2}, x, Eigen::MatrixXd::Constant(6, 1, 2.5));
    EXPECT_THROW(lr_mixed(d, 0, 1, {}), SingularMatrixError);
}

TEST(LrMixed, ConstantDiscreteUsesObservedCells) {
    Eigen::MatrixXd y(6, 1);
    y << 1, 2, 4, 3, 5, 0;
    const auto d = make_dataset(1, {2}, IntMatrix::Zero(6, 1), y);
    const auto lr = lr_mixed(d, 0, 1, {});
    EXPECT_DOUBLE_EQ(lr.lambda, 1.0);
    EXPECT_EQ(lr.observed_cells, 1);
    EXPECT_EQ(lr.observed_rest, 1);
}

TEST(LrStatistics, InUnitIntervalAndRowPermutationInvariant) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto d = random_dataset(30, 2, 5, seed);
        const auto shuffled = permute_rows(d, seed + 100);
        const std::vector<Vertex> q{1, 4, 5};
        const auto c = lr_continuous(d, 2, 3, q);
        const auto m = lr_mixed(d, 0, 2, q);
        EXPECT_GT(c.lambda, 0.0);
        EXPECT_LE(c.lambda, 1.0);
        EXPECT_GT(m.lambda, 0.0);
        EXPECT_LE(m.lambda, 1.0);
        EXPECT_NEAR(lr_continuous(shuffled, 2, 3, q).lambda, c.lambda, 1e-12);
        EXPECT_NEAR(lr_mixed(shuffled, 0, 2, q).lambda, m.lambda, 1e-12);
    }
}

TEST(LrMixed, LevelRelabelingInvariant) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto d = random_dataset(40, 2, 3, seed, 3);
        IntMatrix relabeled = d.discrete_data();
        for (Eigen::Index r = 0; r < relabeled.rows(); ++r) {
            relabeled(r, 0) = (relabeled(r, 0) + 1) % 3;
            relabeled(r, 1) = 2 - relabeled(r, 1);
        }
        const auto e = make_dataset(2, {3, 3}, relabeled, d.continuous_data());
        const std::vector<Vertex> q{1, 3};
        EXPECT_NEAR(lr_mixed(e, 0, 2, q).lambda, lr_mixed(d, 0, 2, q).lambda, 1e-12);
        EXPECT_NEAR(lr_continuous(e, 2, 4, q).lambda, lr_continuous(d, 2, 4, q).lambda, 1e-12);
    }
}

}  // namespace
}  // namespace qpmix
