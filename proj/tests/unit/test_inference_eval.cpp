#include "qpmix/errors.hpp"
#include "qpmix/inference_eval.hpp"
#include "qpmix/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qpmix {
namespace {

NrrMatrix matrix_with(int p, int n_disc, const std::vector<std::pair<Edge, double>>& entries) {
    std::vector<Mark> marks(static_cast<std::size_t>(p), Mark::Continuous);
    std::fill_n(marks.begin(), n_disc, Mark::Discrete);
    NrrMatrix m(marks, NrrOptions{});
    for (const auto& [e, v] : entries) m.set(e.first, e.second, v, 1);
    return m;
}

// Area under the piecewise-linear curve through (0, p_first), the points and
// down to the axis, via the shoelace formula on the closed polygon.
double shoelace_auc(const PrCurve& c) {
    std::vector<PrPoint> poly{{0.0, 0.0}, {0.0, c.points.front().precision}};
    poly.insert(poly.end(), c.points.begin(), c.points.end());
    poly.push_back({c.points.back().recall, 0.0});
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[(i + 1) % poly.size()];
        twice += a.recall * b.precision - b.recall * a.precision;
    }
    return std::fabs(twice) / 2.0 / c.recall_cap;
}

std::vector<Edge> admissible_true_first(const MarkedGraph& g, bool true_first) {
    std::vector<Edge> hits, misses;
    for (const auto& e : admissible_pairs(g.marks())) (g.adjacent(e.first, e.second) ? hits : misses).push_back(e);
    auto& front = true_first ? hits : misses;
    auto& back = true_first ? misses : hits;
    front.insert(front.end(), back.begin(), back.end());
    return front;
}

TEST(QpGraph, Thresholds) {
    const auto m = matrix_with(4, 1, {{{0, 1}, 0.2}, {{1, 2}, 1.0}, {{2, 3}, 0.5}, {{0, 3}, 0.0}});
    EXPECT_EQ(qp_graph(m, 0.0).n_edges(), 0u);
    EXPECT_EQ(qp_graph(m, 1.0).edges(), (std::vector<Edge>{{0, 1}, {0, 3}, {2, 3}}));
    EXPECT_EQ(qp_graph(m, 0.5).edges(), (std::vector<Edge>{{0, 1}, {0, 3}}));
    EXPECT_EQ(qp_graph(m, 0.5).marks(), m.marks());
    EXPECT_THROW(qp_graph(m, 1.5), RangeError);
}

TEST(QpGraph, ThresholdMonotonicity) {
    Rng rng(1);
    std::vector<std::pair<Edge, double>> entries;
    std::vector<Mark> marks(12, Mark::Continuous);
    marks[0] = marks[1] = Mark::Discrete;
    for (const auto& e : admissible_pairs(marks)) entries.push_back({e, static_cast<double>(rng.uniform_int(21)) / 20.0});
    const auto m = matrix_with(12, 2, entries);
    for (int i = 0; i <= 20; ++i)
        for (int j = i; j <= 20; ++j) {
            const auto small = qp_graph(m, i / 20.0), large = qp_graph(m, j / 20.0);
            for (const auto& [u, v] : small.edges()) ASSERT_TRUE(large.adjacent(u, v));
        }
}

TEST(QpGraph, RecoversStrongFixture) {
    // q = 5 > d, so most drawn sets contain a separator of a missing pair.
    const auto g = sample_dregular(10, 3, 2, 2011);
    const auto d = sample_dataset(build_model(g, 0.6, 3.0, {}, 2011), 100, 2012);
    NrrOptions opt;
    opt.q = 5;
    const auto est = qp_graph(nrr_matrix(d, opt), 0.5);
    ASSERT_GT(est.n_edges(), 0u);
    std::size_t hits = 0;
    for (const auto& [u, v] : est.edges()) hits += g.adjacent(u, v);
    EXPECT_GE(static_cast<double>(hits) / est.n_edges(), 0.8);
}

TEST(RankEdges, OrderAndTies) {
    EXPECT_EQ(rank_edges(matrix_with(3, 0, {{{0, 2}, 0.9}, {{0, 1}, 0.2}})), (std::vector<Edge>{{0, 1}, {0, 2}}));
    EXPECT_EQ(rank_edges(matrix_with(5, 0, {{{1, 3}, 0.5}, {{0, 4}, 0.5}})), (std::vector<Edge>{{0, 4}, {1, 3}}));
    // Insertion order does not matter.
    const std::vector<std::pair<Edge, double>> entries{{{2, 3}, 0.1}, {{0, 1}, 0.1}, {{1, 2}, 0.05}, {{0, 3}, 0.7}};
    auto reversed = entries;
    std::reverse(reversed.begin(), reversed.end());
    EXPECT_EQ(rank_edges(matrix_with(4, 0, entries)), rank_edges(matrix_with(4, 0, reversed)));
    EXPECT_EQ(rank_edges(matrix_with(4, 0, entries)), (std::vector<Edge>{{1, 2}, {0, 1}, {2, 3}, {0, 3}}));
}

TEST(PrecisionRecall, PerfectRanking) {
    const auto g = sample_dregular(20, 3, 2, 1);
    const auto c = precision_recall(admissible_true_first(g, true), g);
    for (const auto& pt : c.points) EXPECT_DOUBLE_EQ(pt.precision, 1.0);
    EXPECT_DOUBLE_EQ(c.points.back().recall, 1.0);
    EXPECT_DOUBLE_EQ(auc(c), 1.0);
}

TEST(PrecisionRecall, InvertedRankingEndsAtDensity) {
    const auto g = sample_dregular(20, 3, 2, 1);
    const auto c = precision_recall(admissible_true_first(g, false), g);
    const double admissible = static_cast<double>(admissible_pairs(g.marks()).size());
    EXPECT_DOUBLE_EQ(c.points.back().recall, 1.0);
    EXPECT_NEAR(c.points.back().precision, g.n_edges() / admissible, 1e-15);
}

TEST(PrecisionRecall, RandomRankingNearDensity) {
    const auto g = sample_dregular(50, 3, 2, 4);
    auto ranked = admissible_pairs(g.marks());
    const double density = g.n_edges() / static_cast<double>(ranked.size());
    Rng rng(5);
    std::vector<double> values;
    for (int s = 0; s < 100; ++s) {
        for (std::size_t i = ranked.size(); i > 1; --i) std::swap(ranked[i - 1], ranked[rng.uniform_int(i)]);
        values.push_back(auc(precision_recall(ranked, g)));
    }
    double mean = 0.0, var = 0.0;
    for (double v : values) mean += v / 100.0;
    for (double v : values) var += (v - mean) * (v - mean) / 99.0;
    EXPECT_NEAR(mean, density, 3.0 * std::sqrt(var));
}

TEST(PrecisionRecall, RecallCapInterpolates) {
    // Four true edges, ranking hit, miss, hit, hit, ...
    const auto g = MarkedGraph::with_discrete_prefix(5, 0, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
    const std::vector<Edge> ranked{{0, 1}, {1, 2}, {0, 2}, {0, 3}, {0, 4}};
    const auto c = precision_recall(ranked, g, 0.6);
    ASSERT_EQ(c.points.size(), 4u);
    EXPECT_DOUBLE_EQ(c.points[2].recall, 0.5);
    EXPECT_DOUBLE_EQ(c.points[2].precision, 2.0 / 3.0);
    EXPECT_NEAR(c.points[3].recall, 0.6, 1e-15);
    // Linear interpolation between (0.5, 2/3) and (0.75, 3/4).
    EXPECT_NEAR(c.points[3].precision, 2.0 / 3.0 + 0.4 * (0.75 - 2.0 / 3.0), 1e-15);
    EXPECT_NEAR(auc(c), shoelace_auc(c), 1e-12);
}

TEST(PrecisionRecall, ExcludesDiscretePairs) {
    const auto g = MarkedGraph::with_discrete_prefix(4, 2, {{0, 2}, {1, 3}});
    const auto c = precision_recall({{0, 1}, {0, 2}, {1, 3}}, g);
    ASSERT_EQ(c.points.size(), 2u);
    EXPECT_DOUBLE_EQ(c.points[0].precision, 1.0);
    EXPECT_THROW(precision_recall({{0, 2}}, MarkedGraph::with_discrete_prefix(4, 2, {}), 1.0), EmptyTruthError);
    EXPECT_THROW(precision_recall({{0, 2}}, g, 0.0), RangeError);
}

TEST(Auc, ClosedForms) {
    EXPECT_DOUBLE_EQ(auc(PrCurve{{{0.25, 1.0}, {0.5, 1.0}, {1.0, 1.0}}, 1.0}), 1.0);
    // A single point spans a rectangle from recall 0.
    EXPECT_DOUBLE_EQ(auc(PrCurve{{{0.4, 0.5}}, 0.4}), 0.5);
    EXPECT_DOUBLE_EQ(auc(PrCurve{{{0.4, 0.5}}, 1.0}), 0.2);
    EXPECT_THROW(auc(PrCurve{}), ConfigError);
}

TEST(Auc, MatchesShoelaceOnRandomCurves) {
    Rng rng(9);
    for (int rep = 0; rep < 200; ++rep) {
        const auto g = sample_dregular(16, 3, 2, static_cast<std::uint64_t>(rep));
        auto ranked = admissible_pairs(g.marks());
        for (std::size_t i = ranked.size(); i > 1; --i) std::swap(ranked[i - 1], ranked[rng.uniform_int(i)]);
        const double cap = 0.1 + 0.9 * rng.uniform();
        const auto c = precision_recall(ranked, g, cap);
        EXPECT_NEAR(auc(c), shoelace_auc(c), 1e-9);
    }
}

TEST(Fixtures, MatchShippedModels) {
    for (auto f : {CalibrationFixture::MissingContinuous, CalibrationFixture::MissingMixed}) {
        std::ifstream in(std::string(QPMIX_FIXTURE_DIR) + "/" + std::string(to_string(f)) + ".model.json");
        ASSERT_TRUE(in) << to_string(f);
        std::stringstream buf;
        buf << in.rdbuf();
        EXPECT_EQ(model_to_string(fixture_model(f)), buf.str());
    }
}

TEST(Fixtures, EncodeTheirMissingEdge) {
    const auto cont = fixture_model(CalibrationFixture::MissingContinuous);
    EXPECT_LE(std::fabs(cont.sigma.inverse()(0, 1)), 1e-8);  // vertices 2 and 3
    const auto mixed = fixture_model(CalibrationFixture::MissingMixed);
    const Eigen::MatrixXd h = mixed.mu_table * mixed.sigma.inverse();
    // h of vertex 2 ignores the level of vertex 0: cells (0, j) and (1, j) agree.
    EXPECT_NEAR(h(0, 0), h(2, 0), 1e-12);
    EXPECT_NEAR(h(1, 0), h(3, 0), 1e-12);
    EXPECT_EQ(parse_fixture("mixed"), CalibrationFixture::MissingMixed);
    EXPECT_THROW(parse_fixture("chain"), ConfigError);
}

TEST(Type1Experiment, SmallRunAndErrors) {
    Type1Config cfg;
    cfg.n_list = {25, 40};
    cfg.n_replicates = 200;
    cfg.threads = 4;
    const auto rows = type1_experiment(cfg);
    ASSERT_EQ(rows.size(), 8u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.replicates, 200);
        EXPECT_GT(r.feasible, 190);
        EXPECT_GE(r.alpha_hat, 0.0);
        EXPECT_LE(r.alpha_hat, 0.2);
    }
    cfg.threads = 1;
    std::ostringstream a, b;
    write_type1_table(a, describe(cfg), rows);
    write_type1_table(b, describe(cfg), type1_experiment(cfg));
    EXPECT_EQ(a.str(), b.str());
    cfg.n_replicates = 0;
    EXPECT_THROW(type1_experiment(cfg), EmptyTableError);
}

TEST(AccuracyExperiment, SmallRunIsDeterministic) {
    AccuracyConfig cfg;
    cfg.p = 16;
    cfg.d_list = {3};
    cfg.rho_list = {0.2, 0.8};
    cfg.sigma_list = {1.0, 4.0};
    cfg.n_graphs = cfg.n_paramsets = cfg.n_datasets = 2;
    cfg.n = 40;
    cfg.n_subsets = 30;
    cfg.threads = 4;
    const auto rows = accuracy_experiment(cfg);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        EXPECT_EQ(r.runs, 8);
        EXPECT_EQ(r.failed, 0);
        EXPECT_GT(r.mean_auc, 0.0);
        EXPECT_LE(r.mean_auc, 1.0);
    }
    EXPECT_GT(rows[1].mean_auc, rows[0].mean_auc);
    cfg.threads = 1;
    std::ostringstream a, b;
    write_accuracy_table(a, describe(cfg), rows);
    write_accuracy_table(b, describe(cfg), accuracy_experiment(cfg));
    EXPECT_EQ(a.str(), b.str());
    cfg.sigma_list = {1.0};
    EXPECT_THROW(accuracy_experiment(cfg), ConfigError);
}

TEST(AccuracyConfig, PresetAndScale) {
    const auto preset = AccuracyConfig::paper_preset();
    EXPECT_EQ(preset.p, 50);
    EXPECT_EQ(preset.d_list, (std::vector<int>{3, 4, 7}));
    EXPECT_EQ(preset.n, 25);
    EXPECT_EQ(preset.q, 3);
    const auto small = preset.scaled(0.2);
    EXPECT_EQ(small.n_graphs, 1);
    EXPECT_EQ(small.n_datasets, 1);
    EXPECT_THROW(preset.scaled(0.0), RangeError);
}

}  // namespace
}  // namespace qpmix
