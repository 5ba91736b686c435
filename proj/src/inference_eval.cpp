#include "qpmix/inference_eval.hpp"

#include "qpmix/dataset.hpp"
#include "qpmix/errors.hpp"
#include "qpmix/format.hpp"
#include "qpmix/parallel.hpp"
#include "qpmix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <ostream>

namespace qpmix {

MarkedGraph qp_graph(const NrrMatrix& m, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw RangeError("threshold must lie in [0, 1]");
    std::vector<Edge> edges;
    for (Vertex a = 0; a < m.p(); ++a)
        for (Vertex b = a + 1; b < m.p(); ++b)
            if (m.defined(a, b) && m.value(a, b) < threshold) edges.emplace_back(a, b);
    return MarkedGraph(m.marks(), std::move(edges));
}

std::vector<Edge> rank_edges(const NrrMatrix& m) {
    std::vector<Edge> pairs;
    for (Vertex a = 0; a < m.p(); ++a)
        for (Vertex b = a + 1; b < m.p(); ++b)
            if (m.defined(a, b)) pairs.emplace_back(a, b);
    std::stable_sort(pairs.begin(), pairs.end(),
                     [&](const Edge& x, const Edge& y) { return m.value(x.first, x.second) < m.value(y.first, y.second); });
    return pairs;
}

PrCurve precision_recall(const std::vector<Edge>& ranked, const MarkedGraph& truth, double recall_cap) {
    if (!(recall_cap > 0.0 && recall_cap <= 1.0)) throw RangeError("recall cap must lie in (0, 1]");
    std::size_t n_true = 0;
    for (const auto& [u, v] : truth.edges())
        if (!(truth.is_discrete(u) && truth.is_discrete(v))) ++n_true;
    if (n_true == 0) throw EmptyTruthError("generative graph has no admissible edges");

    PrCurve curve;
    curve.recall_cap = recall_cap;
    std::size_t seen = 0, hits = 0;
    for (auto [u, v] : ranked) {
        if (u > v) std::swap(u, v);
        if (u < 0 || v >= truth.n_vertices()) throw DimensionMismatchError("ranked pair outside the truth vertex set");
        if (truth.is_discrete(u) && truth.is_discrete(v)) continue;
        ++seen;
        if (truth.adjacent(u, v)) ++hits;
        const PrPoint point{static_cast<double>(hits) / n_true, static_cast<double>(hits) / seen};
        if (point.recall > recall_cap) {
            const PrPoint& prev = curve.points.empty() ? PrPoint{0.0, point.precision} : curve.points.back();
            const double t = (recall_cap - prev.recall) / (point.recall - prev.recall);
            curve.points.push_back({recall_cap, prev.precision + t * (point.precision - prev.precision)});
            break;
        }
        curve.points.push_back(point);
        if (point.recall >= recall_cap) break;
    }
    return curve;
}

double auc(const PrCurve& c) {
    if (c.points.empty()) throw ConfigError("empty precision-recall curve");
    double area = 0.0;
    PrPoint prev{0.0, c.points.front().precision};
    for (const auto& pt : c.points) {
        area += (pt.recall - prev.recall) * (pt.precision + prev.precision) / 2.0;
        prev = pt;
    }
    return area / c.recall_cap;
}

// ---------------------------------------------------------------------------

std::string_view to_string(CalibrationFixture f) {
    return f == CalibrationFixture::MissingContinuous ? "continuous" : "mixed";
}

CalibrationFixture parse_fixture(std::string_view name) {
    if (name == "continuous") return CalibrationFixture::MissingContinuous;
    if (name == "mixed") return CalibrationFixture::MissingMixed;
    throw ConfigError("unknown fixture '" + std::string(name) + "' (expected continuous or mixed)");
}

FixtureSpec fixture_spec(CalibrationFixture f) {
    FixtureSpec s;
    if (f == CalibrationFixture::MissingContinuous) {
        s.graph = MarkedGraph::with_discrete_prefix(4, 2, {{0, 2}, {0, 3}, {1, 2}, {1, 3}});
        s.a = 2;
        s.b = 3;
        s.q = {0, 1};
        s.seed = 20110001;
    } else {
        s.graph = MarkedGraph::with_discrete_prefix(4, 2, {{0, 3}, {1, 2}, {1, 3}, {2, 3}});
        s.a = 0;
        s.b = 2;
        s.q = {1, 3};
        s.seed = 20110002;
    }
    return s;
}

CGModel fixture_model(CalibrationFixture f) {
    const FixtureSpec s = fixture_spec(f);
    return build_model(s.graph, s.rho, s.sigma_h, {2, 2}, s.seed);
}

std::vector<Type1Row> type1_experiment(const Type1Config& cfg) {
    if (cfg.n_replicates <= 0 || cfg.n_list.empty() || cfg.fixtures.empty() || cfg.tests.empty())
        throw EmptyTableError("type-I experiment needs replicates, sample sizes, fixtures and tests");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw RangeError("alpha must lie in (0, 1)");
    for (int n : cfg.n_list)
        if (n < 1) throw ConfigError("sample sizes must be positive");

    struct Outcome {
        bool feasible = false;
        double p_exact = 1.0;
        double p_asymptotic = 1.0;
    };
    std::vector<Type1Row> rows;
    for (CalibrationFixture f : cfg.fixtures) {
        const FixtureSpec spec = fixture_spec(f);
        const CGModel model = fixture_model(f);
        for (int n : cfg.n_list) {
            std::vector<Outcome> outcomes(static_cast<std::size_t>(cfg.n_replicates));
            parallel_for(outcomes.size(), cfg.threads, [&](std::size_t r) {
                const auto seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(n), r});
                const MixedDataset data = sample_dataset(model, n, seed);
                try {
                    const TestResult t = ci_test(data, spec.a, spec.b, spec.q, cfg.alpha);
                    outcomes[r] = {true, t.p_exact, t.p_asymptotic};
                } catch (const InfeasibleTestError&) {
                }
            });
            for (TestKind kind : cfg.tests) {
                Type1Row row{f, kind, n, cfg.n_replicates, 0, 0, 0.0};
                for (const auto& o : outcomes) {
                    if (!o.feasible) continue;
                    ++row.feasible;
                    if ((kind == TestKind::Exact ? o.p_exact : o.p_asymptotic) < cfg.alpha) ++row.rejections;
                }
                row.alpha_hat = row.feasible ? static_cast<double>(row.rejections) / row.feasible
                                             : std::numeric_limits<double>::quiet_NaN();
                rows.push_back(row);
            }
        }
    }
    return rows;
}

// ---------------------------------------------------------------------------

AccuracyConfig AccuracyConfig::paper_preset() { return AccuracyConfig{}; }

AccuracyConfig AccuracyConfig::scaled(double factor) const {
    if (!(factor > 0.0)) throw RangeError("scale must be positive");
    auto scale = [factor](int count) { return std::max(1, static_cast<int>(std::lround(count * factor))); };
    AccuracyConfig out = *this;
    out.n_graphs = scale(n_graphs);
    out.n_paramsets = scale(n_paramsets);
    out.n_datasets = scale(n_datasets);
    return out;
}

std::vector<AccuracyRow> accuracy_experiment(const AccuracyConfig& cfg) {
    if (cfg.rho_list.size() != cfg.sigma_list.size())
        throw ConfigError("rho and sigma lists must have the same length (strengths are paired)");
    if (cfg.d_list.empty() || cfg.rho_list.empty() || cfg.n_graphs < 1 || cfg.n_paramsets < 1 || cfg.n_datasets < 1)
        throw EmptyTableError("accuracy grid is empty");
    if (!(cfg.q + 2 < cfg.n)) throw ConfigError("order q requires q + 2 < n");

    // One task per (d, graph, strength, parameter set); datasets run inside.
    struct Task {
        std::size_t d_idx, strength;
        int graph, paramset;
    };
    std::vector<Task> tasks;
    for (std::size_t di = 0; di < cfg.d_list.size(); ++di)
        for (int g = 0; g < cfg.n_graphs; ++g)
            for (std::size_t s = 0; s < cfg.rho_list.size(); ++s)
                for (int k = 0; k < cfg.n_paramsets; ++k) tasks.push_back({di, s, g, k});

    const auto n_data = static_cast<std::size_t>(cfg.n_datasets);
    std::vector<double> aucs(tasks.size() * n_data, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> errors(tasks.size());
    parallel_for(tasks.size(), cfg.threads, [&](std::size_t t) {
        const Task& task = tasks[t];
        const auto d = static_cast<std::uint64_t>(cfg.d_list[task.d_idx]);
        const auto g = static_cast<std::uint64_t>(task.graph);
        const auto s = static_cast<std::uint64_t>(task.strength);
        const auto k = static_cast<std::uint64_t>(task.paramset);
        try {
            const MarkedGraph graph =
                sample_dregular(cfg.p, cfg.d_list[task.d_idx], cfg.n_discrete, derive_seed(cfg.seed, {1, d, g}));
            const CGModel model = build_model(graph, cfg.rho_list[task.strength], cfg.sigma_list[task.strength],
                                              cfg.levels, derive_seed(cfg.seed, {2, d, g, s, k}));
            for (std::size_t m = 0; m < n_data; ++m) {
                const MixedDataset data = sample_dataset(model, cfg.n, derive_seed(cfg.seed, {3, d, g, s, k, m}));
                NrrOptions opt;
                opt.q = cfg.q;
                opt.n_subsets = cfg.n_subsets;
                opt.alpha = cfg.alpha;
                opt.restrict_continuous = cfg.restrict_continuous;
                opt.test = cfg.test;
                opt.seed = derive_seed(cfg.seed, {4, d, g, s, k, m});
                opt.threads = 1;
                const NrrMatrix nrr = nrr_matrix(data, opt);
                aucs[t * n_data + m] = auc(precision_recall(rank_edges(nrr), graph, cfg.recall_cap));
            }
        } catch (const Error& e) {
            errors[t] = e.what();
        }
    });

    std::vector<AccuracyRow> rows;
    for (std::size_t di = 0; di < cfg.d_list.size(); ++di)
        for (std::size_t s = 0; s < cfg.rho_list.size(); ++s) {
            AccuracyRow row{cfg.d_list[di], cfg.rho_list[s], cfg.sigma_list[s], 0.0, 0.0, 0, 0};
            std::vector<double> values;
            for (std::size_t t = 0; t < tasks.size(); ++t) {
                if (tasks[t].d_idx != di || tasks[t].strength != s) continue;
                if (!errors[t].empty())
                    std::cerr << "accuracy: d=" << row.d << " rho=" << format_double(row.rho) << " graph "
                              << tasks[t].graph << " paramset " << tasks[t].paramset << " failed: " << errors[t] << '\n';
                for (std::size_t m = 0; m < n_data; ++m) {
                    const double a = aucs[t * n_data + m];
                    if (std::isnan(a))
                        ++row.failed;
                    else
                        values.push_back(a);
                }
            }
            row.runs = static_cast<int>(values.size());
            if (values.empty()) {
                row.mean_auc = row.sd_auc = std::numeric_limits<double>::quiet_NaN();
            } else {
                double sum = 0.0;
                for (double v : values) sum += v;
                row.mean_auc = sum / values.size();
                double ss = 0.0;
                for (double v : values) ss += (v - row.mean_auc) * (v - row.mean_auc);
                row.sd_auc = values.size() > 1 ? std::sqrt(ss / (values.size() - 1)) : 0.0;
            }
            rows.push_back(row);
        }
    return rows;
}

// ---------------------------------------------------------------------------

namespace {

std::string number_or_na(double x) { return std::isnan(x) ? "NA" : format_double(x); }

void write_metadata(std::ostream& out, const Metadata& meta) {
    for (const auto& [key, value] : meta) out << "# " << key << '\t' << value << '\n';
}

std::string join_tests(const std::vector<TestKind>& tests) {
    std::string s;
    for (std::size_t i = 0; i < tests.size(); ++i) s += (i ? "," : "") + std::string(to_string(tests[i]));
    return s;
}

}  // namespace

Metadata describe(const Type1Config& cfg) {
    std::string fixtures;
    for (std::size_t i = 0; i < cfg.fixtures.size(); ++i) fixtures += (i ? "," : "") + std::string(to_string(cfg.fixtures[i]));
    Metadata meta{{"format", "qpmix-type1-v1"},
                  {"n", join(cfg.n_list, ",")},
                  {"replicates", std::to_string(cfg.n_replicates)},
                  {"alpha", format_double(cfg.alpha)},
                  {"fixtures", fixtures},
                  {"tests", join_tests(cfg.tests)},
                  {"seed", std::to_string(cfg.seed)},
                  {"replicate_seed", "splitmix64 chain over (seed, fixture, n, replicate)"}};
    for (CalibrationFixture f : cfg.fixtures) {
        const FixtureSpec s = fixture_spec(f);
        std::string edges;
        for (const auto& [u, v] : s.graph.edges()) edges += (edges.empty() ? "" : ",") + std::to_string(u) + "-" + std::to_string(v);
        meta.emplace_back("fixture_" + std::string(to_string(f)),
                          "edges=" + edges + " test=" + std::to_string(s.a) + "," + std::to_string(s.b) + "|" +
                              join(s.q, ",") + " rho=" + format_double(s.rho) + " sigma_h=" + format_double(s.sigma_h) +
                              " model_seed=" + std::to_string(s.seed));
    }
    return meta;
}

Metadata describe(const AccuracyConfig& cfg) {
    return {{"format", "qpmix-accuracy-v1"},
            {"p", std::to_string(cfg.p)},
            {"n_discrete", std::to_string(cfg.n_discrete)},
            {"levels", cfg.levels.empty() ? "2" : join(cfg.levels, ",")},
            {"d", join(cfg.d_list, ",")},
            {"rho", join(cfg.rho_list, ",")},
            {"sigma", join(cfg.sigma_list, ",")},
            {"graphs", std::to_string(cfg.n_graphs)},
            {"paramsets", std::to_string(cfg.n_paramsets)},
            {"datasets", std::to_string(cfg.n_datasets)},
            {"n", std::to_string(cfg.n)},
            {"q", std::to_string(cfg.q)},
            {"subsets", std::to_string(cfg.n_subsets)},
            {"alpha", format_double(cfg.alpha)},
            {"recall_cap", format_double(cfg.recall_cap)},
            {"restrict_continuous", cfg.restrict_continuous ? "1" : "0"},
            {"test", std::string(to_string(cfg.test))},
            {"seed", std::to_string(cfg.seed)},
            {"derived_seeds", "graph=(seed,1,d,g) model=(seed,2,d,g,s,k) data=(seed,3,d,g,s,k,m) nrr=(seed,4,d,g,s,k,m)"}};
}

void write_type1_table(std::ostream& out, const Metadata& meta, const std::vector<Type1Row>& rows) {
    write_metadata(out, meta);
    out << "fixture\ttest\tn\treplicates\tfeasible\trejections\talpha_hat\n";
    for (const auto& r : rows)
        out << to_string(r.fixture) << '\t' << to_string(r.test) << '\t' << r.n << '\t' << r.replicates << '\t'
            << r.feasible << '\t' << r.rejections << '\t' << number_or_na(r.alpha_hat) << '\n';
}

void write_accuracy_table(std::ostream& out, const Metadata& meta, const std::vector<AccuracyRow>& rows) {
    write_metadata(out, meta);
    out << "d\trho\tsigma\tmean_auc\tsd_auc\truns\tfailed\n";
    for (const auto& r : rows)
        out << r.d << '\t' << format_double(r.rho) << '\t' << format_double(r.sigma) << '\t' << number_or_na(r.mean_auc)
            << '\t' << number_or_na(r.sd_auc) << '\t' << r.runs << '\t' << r.failed << '\n';
}

void write_pr_curve(std::ostream& out, const PrCurve& c) {
    out << "# recall_cap\t" << format_double(c.recall_cap) << '\n';
    out << "recall\tprecision\n";
    for (const auto& p : c.points) out << format_double(p.recall) << '\t' << format_double(p.precision) << '\n';
}

}  // namespace qpmix
