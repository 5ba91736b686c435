#include "cli.hpp"

#include "qpmix/cg_model.hpp"
#include "qpmix/dataset.hpp"
#include "qpmix/errors.hpp"
#include "qpmix/format.hpp"
#include "qpmix/inference_eval.hpp"
#include "qpmix/marked_graph.hpp"
#include "qpmix/nrr.hpp"
#include "qpmix/rng.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qpmix::cli {

namespace {

constexpr const char* kVersion =
    "qpmix 1.0.0\n"
    "interface 1; formats: graph-v1, qpmix-model v1, csv-v1, qpmix-nrr-v1, qpmix-type1-v1, qpmix-accuracy-v1\n";

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return in;
}

// Writes all files or none: contents go to temporaries that are renamed once
// every write succeeded.
void write_files_atomically(const std::vector<std::pair<std::string, std::string>>& files) {
    std::vector<std::string> temps;
    auto cleanup = [&] {
        for (const auto& t : temps) std::remove(t.c_str());
    };
    for (const auto& [path, contents] : files) {
        const std::string tmp = path + ".tmp";
        std::ofstream out(tmp, std::ios::binary);
        temps.push_back(tmp);
        if (!(out << contents) || !(out.flush())) {
            cleanup();
            throw DataError("cannot write '" + path + "'");
        }
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        std::error_code ec;
        std::filesystem::rename(temps[i], files[i].first, ec);
        if (ec) {
            cleanup();
            throw DataError("cannot write '" + files[i].first + "': " + ec.message());
        }
    }
}

void emit(const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-") {
        std::cout << contents;
        std::cout.flush();
    } else {
        write_files_atomically({{path, contents}});
    }
}

std::vector<TestKind> parse_tests(const std::string& s) {
    if (s == "both") return {TestKind::Exact, TestKind::Asymptotic};
    return {parse_test_kind(s)};
}

std::vector<CalibrationFixture> parse_fixtures(const std::string& s) {
    if (s == "both") return {CalibrationFixture::MissingContinuous, CalibrationFixture::MissingMixed};
    return {parse_fixture(s)};
}

struct SimulateArgs {
    int p = 50, d = 3, n_discrete = 2, n = 25;
    std::vector<int> levels;
    double rho = 0.6, sigma_h = 3.0;
    std::uint64_t seed = 1;
    std::string prefix = "sim";
};

void cmd_simulate(const SimulateArgs& a) {
    const MarkedGraph g = sample_dregular(a.p, a.d, a.n_discrete, derive_seed(a.seed, {1}));
    const CGModel m = build_model(g, a.rho, a.sigma_h, a.levels, derive_seed(a.seed, {2}));
    const MixedDataset data = sample_dataset(m, a.n, derive_seed(a.seed, {3}));
    const std::vector<std::pair<std::string, std::string>> config{
        {"command", "simulate"},
        {"p", std::to_string(a.p)},
        {"d", std::to_string(a.d)},
        {"discrete", std::to_string(a.n_discrete)},
        {"levels", a.levels.empty() ? "2" : join(a.levels, ",")},
        {"rho", format_double(a.rho)},
        {"sigma_h", format_double(a.sigma_h)},
        {"n", std::to_string(a.n)},
        {"seed", std::to_string(a.seed)},
        {"derived_seeds", "graph=(seed,1) model=(seed,2) data=(seed,3)"}};
    write_files_atomically({{a.prefix + ".graph.txt", graph_to_string(g)},
                            {a.prefix + ".model.json", model_to_string(m, config)},
                            {a.prefix + ".csv", csv_to_string(data)}});
}

struct NrrArgs {
    std::string data;
    std::vector<int> q{3};
    int subsets = 100;
    double alpha = 0.05;
    bool restrict_continuous = false;
    std::string test = "exact";
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out = "-";
};

void cmd_nrr(const NrrArgs& a) {
    auto in = open_input(a.data);
    const MixedDataset data = read_csv(in, a.data);
    std::vector<NrrMatrix> ms;
    for (int q : a.q) {
        if (!(q + 2 < data.n()))
            throw ConfigError("q=" + std::to_string(q) + " violates q + 2 < n (n=" + std::to_string(data.n()) + ")");
        NrrOptions opt;
        opt.q = q;
        opt.n_subsets = a.subsets;
        opt.alpha = a.alpha;
        opt.restrict_continuous = a.restrict_continuous;
        opt.test = parse_test_kind(a.test);
        opt.seed = a.seed;
        opt.threads = a.threads;
        ms.push_back(nrr_matrix(data, opt));
    }
    emit(a.out, nrr_to_string(ms.size() == 1 ? ms.front() : average_nrr(ms)));
}

struct InferArgs {
    std::string nrr;
    double threshold = -1.0;
    bool rank = false;
    std::string out = "-";
};

void cmd_infer(const InferArgs& a, bool has_threshold) {
    if (has_threshold == a.rank) throw ConfigError("infer needs exactly one of --threshold or --rank");
    auto in = open_input(a.nrr);
    const NrrMatrix m = read_nrr(in, a.nrr);
    std::ostringstream out;
    if (a.rank) {
        out << "u\tv\tnrr\n";
        for (const auto& [u, v] : rank_edges(m)) out << u << '\t' << v << '\t' << format_double(m.value(u, v)) << '\n';
    } else {
        write_graph(out, qp_graph(m, a.threshold));
    }
    emit(a.out, out.str());
}

struct EvalArgs {
    std::string truth, nrr, curve_out;
    double recall_cap = 1.0;
};

void cmd_eval(const EvalArgs& a) {
    auto truth_in = open_input(a.truth);
    const MarkedGraph truth = read_graph(truth_in, a.truth);
    auto nrr_in = open_input(a.nrr);
    const NrrMatrix m = read_nrr(nrr_in, a.nrr);
    if (m.p() != truth.n_vertices() || m.marks() != truth.marks())
        throw DimensionMismatchError("truth graph and NRR matrix disagree on vertices or marks");
    const PrCurve curve = precision_recall(rank_edges(m), truth, a.recall_cap);
    const double value = auc(curve);
    if (!a.curve_out.empty()) {
        std::ostringstream out;
        write_pr_curve(out, curve);
        write_files_atomically({{a.curve_out, out.str()}});
    }
    std::cout << format_double(value) << '\n';
}

struct Type1Args {
    int replicates = 2000;
    std::vector<int> n{25, 50, 75, 100};
    std::string test = "both", fixture = "both";
    double alpha = 0.05;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out = "-";
};

void cmd_type1(const Type1Args& a) {
    Type1Config cfg;
    cfg.n_replicates = a.replicates;
    cfg.n_list = a.n;
    cfg.tests = parse_tests(a.test);
    cfg.fixtures = parse_fixtures(a.fixture);
    cfg.alpha = a.alpha;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    const auto rows = type1_experiment(cfg);
    std::ostringstream out;
    write_type1_table(out, describe(cfg), rows);
    emit(a.out, out.str());
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"qpmix: structure learning of mixed graphical models with limited-order tests", "qpmix"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
    app.require_subcommand(1);

    unsigned threads = 1;
    std::uint64_t seed = 1;

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Sample a d-regular marked graph, a CG model and a dataset");
    simulate->add_option("--p", sim.p, "Number of variables")->capture_default_str();
    simulate->add_option("--d", sim.d, "Vertex degree")->capture_default_str();
    simulate->add_option("--discrete", sim.n_discrete, "Number of discrete variables")->capture_default_str();
    simulate->add_option("--levels", sim.levels, "Levels per discrete variable (default 2 each)")->delimiter(',');
    simulate->add_option("--rho", sim.rho, "Nominal mean marginal correlation")->capture_default_str();
    simulate->add_option("--sigma-h", sim.sigma_h, "Spread of mixed interaction terms")->capture_default_str();
    simulate->add_option("--n", sim.n, "Sample size")->capture_default_str();
    simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    simulate->add_option("--out-prefix", sim.prefix, "Writes <prefix>.graph.txt, <prefix>.model.json, <prefix>.csv")
        ->capture_default_str();

    NrrArgs nrr;
    auto* nrr_cmd = app.add_subcommand("nrr", "Estimate non-rejection rates for every admissible pair");
    nrr_cmd->add_option("data", nrr.data, "Dataset CSV")->required();
    nrr_cmd->add_option("--q", nrr.q, "Conditioning order; repeat to average over several")->capture_default_str();
    nrr_cmd->add_option("--subsets", nrr.subsets, "Conditioning sets per pair")->capture_default_str();
    nrr_cmd->add_option("--alpha", nrr.alpha, "Significance level of each test")->capture_default_str();
    nrr_cmd->add_flag("--restrict-continuous", nrr.restrict_continuous, "Condition on continuous variables only");
    nrr_cmd->add_option("--test", nrr.test, "exact or asymptotic")->capture_default_str();
    nrr_cmd->add_option("--seed", nrr.seed, "Master seed")->capture_default_str();
    nrr_cmd->add_option("--threads", nrr.threads, "Worker threads")->capture_default_str();
    nrr_cmd->add_option("--out", nrr.out, "Output path ('-' for stdout)")->capture_default_str();

    InferArgs inf;
    auto* infer = app.add_subcommand("infer", "Threshold or rank an NRR matrix");
    infer->add_option("nrr", inf.nrr, "NRR TSV")->required();
    auto* threshold = infer->add_option("--threshold", inf.threshold, "Keep pairs with NRR below this cutoff");
    infer->add_flag("--rank", inf.rank, "Write all defined pairs ranked by ascending NRR");
    infer->add_option("--out", inf.out, "Output path ('-' for stdout)")->capture_default_str();

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Precision-recall and AUC of an NRR ranking against a true graph");
    eval->add_option("--truth", ev.truth, "Generating graph (edge list)")->required();
    eval->add_option("--nrr", ev.nrr, "NRR TSV")->required();
    eval->add_option("--recall-cap", ev.recall_cap, "Maximum recall for the AUC")->capture_default_str();
    eval->add_option("--curve-out", ev.curve_out, "Write the precision-recall curve here");

    Type1Args t1;
    auto* type1 = app.add_subcommand("type1", "Type-I error calibration on the two 4-variable fixtures");
    type1->add_option("--replicates", t1.replicates, "Datasets per sample size")->capture_default_str();
    type1->add_option("--n", t1.n, "Sample sizes")->delimiter(',')->capture_default_str();
    type1->add_option("--test", t1.test, "exact, asymptotic or both")->capture_default_str();
    type1->add_option("--fixture", t1.fixture, "continuous, mixed or both")->capture_default_str();
    type1->add_option("--alpha", t1.alpha, "Nominal level")->capture_default_str();
    type1->add_option("--seed", t1.seed, "Master seed")->capture_default_str();
    type1->add_option("--threads", t1.threads, "Worker threads")->capture_default_str();
    type1->add_option("--out", t1.out, "Output path ('-' for stdout)")->capture_default_str();

    AccuracyConfig acc = AccuracyConfig::paper_preset();
    std::string preset = "paper", acc_test = "exact", acc_out = "-";
    double scale = 1.0;
    auto* accuracy = app.add_subcommand("accuracy", "AUC over a grid of synthetic models");
    accuracy->add_option("--preset", preset, "Base grid (paper)")->check(CLI::IsMember({"paper"}))->capture_default_str();
    accuracy->add_option("--scale", scale, "Multiply graph/parameter/dataset counts (minimum 1)")->capture_default_str();
    accuracy->add_option("--p", acc.p, "Number of variables");
    accuracy->add_option("--discrete", acc.n_discrete, "Number of discrete variables");
    accuracy->add_option("--levels", acc.levels, "Levels per discrete variable")->delimiter(',');
    accuracy->add_option("--d", acc.d_list, "Vertex degrees")->delimiter(',');
    accuracy->add_option("--rho", acc.rho_list, "Mean correlations (paired with --sigma)")->delimiter(',');
    accuracy->add_option("--sigma", acc.sigma_list, "Interaction spreads (paired with --rho)")->delimiter(',');
    accuracy->add_option("--graphs", acc.n_graphs, "Graphs per degree");
    accuracy->add_option("--paramsets", acc.n_paramsets, "Parameter sets per graph and strength");
    accuracy->add_option("--datasets", acc.n_datasets, "Datasets per parameter set");
    accuracy->add_option("--n", acc.n, "Sample size");
    accuracy->add_option("--q", acc.q, "Conditioning order");
    accuracy->add_option("--subsets", acc.n_subsets, "Conditioning sets per pair");
    accuracy->add_option("--alpha", acc.alpha, "Significance level of each test");
    accuracy->add_option("--recall-cap", acc.recall_cap, "Maximum recall for the AUC");
    accuracy->add_flag("--restrict-continuous", acc.restrict_continuous, "Condition on continuous variables only");
    accuracy->add_option("--test", acc_test, "exact or asymptotic")->capture_default_str();
    accuracy->add_option("--seed", seed, "Master seed")->capture_default_str();
    accuracy->add_option("--threads", threads, "Worker threads")->capture_default_str();
    accuracy->add_option("--out", acc_out, "Output path ('-' for stdout)")->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ErrorKind::Config);
    }

    try {
        if (simulate->parsed()) {
            cmd_simulate(sim);
        } else if (nrr_cmd->parsed()) {
            cmd_nrr(nrr);
        } else if (infer->parsed()) {
            cmd_infer(inf, threshold->count() > 0);
        } else if (eval->parsed()) {
            cmd_eval(ev);
        } else if (type1->parsed()) {
            cmd_type1(t1);
        } else if (accuracy->parsed()) {
            // Explicit flags override the preset; the scale applies afterwards.
            AccuracyConfig cfg = acc.scaled(scale);
            cfg.test = parse_test_kind(acc_test);
            cfg.seed = seed;
            cfg.threads = threads;
            auto meta = describe(cfg);
            meta.insert(meta.begin() + 1, {"preset", preset});
            meta.insert(meta.begin() + 2, {"scale", format_double(scale)});
            const auto rows = accuracy_experiment(cfg);
            std::ostringstream out;
            write_accuracy_table(out, meta, rows);
            emit(acc_out, out.str());
        }
    } catch (const Error& e) {
        std::cerr << "qpmix: error: " << e.what() << '\n';
        return static_cast<int>(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "qpmix: error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Numerical);
    }
    return 0;
}

}  // namespace qpmix::cli
