#pragma once

#include "qpmix/cg_model.hpp"
#include "qpmix/citest.hpp"
#include "qpmix/marked_graph.hpp"
#include "qpmix/nrr.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qpmix {

/// Edges (a, b) with a defined non-rejection rate strictly below threshold.
MarkedGraph qp_graph(const NrrMatrix& m, double threshold);

/// Defined pairs by ascending NRR; ties broken by (min, max) index order.
std::vector<Edge> rank_edges(const NrrMatrix& m);

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;
};

struct PrCurve {
    std::vector<PrPoint> points;  // recall nondecreasing
    double recall_cap = 1.0;
};

/// Ranked-retrieval precision-recall curve against the admissible edges of
/// truth (discrete-discrete pairs are excluded from both sides). One point per
/// ranked pair until the recall cap is reached; the last point is
/// interpolated onto the cap when a step crosses it.
PrCurve precision_recall(const std::vector<Edge>& ranked, const MarkedGraph& truth, double recall_cap = 1.0);

/// Trapezoidal area under the curve on [0, recall_cap] divided by the cap.
/// The curve is extended to recall 0 at the precision of its first point.
double auc(const PrCurve& c);

// ---------------------------------------------------------------------------
// Type-I error calibration on two 4-vertex models (2 discrete, 2 continuous).

enum class CalibrationFixture {
    MissingContinuous,  // edges 0-2, 0-3, 1-2, 1-3; H0: 2 _||_ 3 | {0, 1}
    MissingMixed,       // edges 0-3, 1-2, 1-3, 2-3; H0: 0 _||_ 2 | {1, 3}
};

std::string_view to_string(CalibrationFixture f);
CalibrationFixture parse_fixture(std::string_view name);

struct FixtureSpec {
    MarkedGraph graph;
    Vertex a = 0;
    Vertex b = 0;
    std::vector<Vertex> q;
    double rho = 0.5;
    double sigma_h = 2.0;
    std::uint64_t seed = 0;
};

FixtureSpec fixture_spec(CalibrationFixture f);
/// The frozen model: build_model over the fixture graph with its documented seed.
CGModel fixture_model(CalibrationFixture f);

struct Type1Config {
    std::vector<int> n_list{25, 50, 75, 100};
    int n_replicates = 2000;
    double alpha = 0.05;
    std::vector<CalibrationFixture> fixtures{CalibrationFixture::MissingContinuous, CalibrationFixture::MissingMixed};
    std::vector<TestKind> tests{TestKind::Exact, TestKind::Asymptotic};
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct Type1Row {
    CalibrationFixture fixture;
    TestKind test;
    int n = 0;
    int replicates = 0;
    int feasible = 0;
    int rejections = 0;
    double alpha_hat = 0.0;  // rejections / feasible
};

/// Empirical rejection rate under H0 per (fixture, test, n). Replicate r of
/// (fixture f, n) samples with seed derive_seed(seed, {f, n, r}); all tests
/// are evaluated on the same datasets.
std::vector<Type1Row> type1_experiment(const Type1Config& cfg);

// ---------------------------------------------------------------------------
// Precision-recall accuracy grid over synthetic d-regular models.

struct AccuracyConfig {
    int p = 50;
    int n_discrete = 2;
    std::vector<int> levels;  // empty: 2 per discrete variable
    std::vector<int> d_list{3, 4, 7};
    // Interaction strengths: rho_list[k] is paired with sigma_list[k].
    std::vector<double> rho_list{0.2, 0.4, 0.6, 0.8};
    std::vector<double> sigma_list{1.0, 2.0, 3.0, 4.0};
    int n_graphs = 5;
    int n_paramsets = 5;
    int n_datasets = 5;
    int n = 25;
    int q = 3;
    int n_subsets = 100;
    double alpha = 0.05;
    double recall_cap = 1.0;
    bool restrict_continuous = false;
    TestKind test = TestKind::Exact;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    /// Grid of the synthetic-data study: p=50, 2 discrete, d in {3,4,7},
    /// four paired strengths, 5 graphs x 5 parameter sets x 5 datasets, n=25, q=3.
    static AccuracyConfig paper_preset();
    /// Multiplies the replicate counts by factor (each at least 1).
    AccuracyConfig scaled(double factor) const;
};

struct AccuracyRow {
    int d = 0;
    double rho = 0.0;
    double sigma = 0.0;
    double mean_auc = 0.0;  // NaN when every run of the cell failed
    double sd_auc = 0.0;
    int runs = 0;
    int failed = 0;
};

/// For each grid cell: sample graphs, build models, sample datasets, estimate
/// the NRR matrix, rank, and average the AUC. Failed runs are counted and
/// excluded from the mean.
std::vector<AccuracyRow> accuracy_experiment(const AccuracyConfig& cfg);

// ---------------------------------------------------------------------------
// Tab-separated experiment tables with "# key<TAB>value" metadata lines.

using Metadata = std::vector<std::pair<std::string, std::string>>;

Metadata describe(const Type1Config& cfg);
Metadata describe(const AccuracyConfig& cfg);
void write_type1_table(std::ostream& out, const Metadata& meta, const std::vector<Type1Row>& rows);
void write_accuracy_table(std::ostream& out, const Metadata& meta, const std::vector<AccuracyRow>& rows);
void write_pr_curve(std::ostream& out, const PrCurve& c);

}  // namespace qpmix
