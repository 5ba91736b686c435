#include "qpmix/cg_model.hpp"

#include "qpmix/errors.hpp"
#include "qpmix/linalg.hpp"
#include "qpmix/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace qpmix {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

}  // namespace

void validate(const CGModel& m) {
    const auto n_disc = static_cast<std::size_t>(m.graph.n_discrete());
    const auto n_cont = static_cast<Eigen::Index>(m.graph.n_vertices()) - static_cast<Eigen::Index>(n_disc);
    if (m.levels.n_variables() != n_disc) throw ConfigError("model: level count does not match discrete vertices");
    if (m.p_table.size() != m.levels.size()) throw ConfigError("model: p_table size does not match |I|");
    if (m.mu_table.rows() != static_cast<Eigen::Index>(m.levels.size()) || m.mu_table.cols() != n_cont)
        throw ConfigError("model: mu_table must be |I| x |Gamma|");
    if (m.sigma.rows() != n_cont || m.sigma.cols() != n_cont) throw ConfigError("model: sigma must be |Gamma| x |Gamma|");
    double total = 0.0;
    for (double p : m.p_table) {
        if (!(p >= 0.0)) throw ConfigError("model: negative level probability");
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw ConfigError("model: level probabilities do not sum to one");
    if ((m.sigma - m.sigma.transpose()).cwiseAbs().maxCoeff() > 0.0) throw ConfigError("model: sigma not symmetric");
    if (n_cont > 0 && !cholesky_log_det(m.sigma)) throw ConfigError("model: sigma not positive definite");
}

CanonicalParams moment_to_canonical(const CGModel& m) {
    const auto log_det = cholesky_log_det(m.sigma);
    auto k = spd_inverse(m.sigma);
    if (!log_det || !k) throw SingularMatrixError("sigma", "moment_to_canonical");
    CanonicalParams c{m.graph, m.levels, {}, {}, std::move(*k)};
    c.h_table = m.mu_table * c.k;  // rows: (K mu(i))' with K symmetric
    const double n_cont = static_cast<double>(m.sigma.rows());
    c.g_table.resize(m.p_table.size());
    for (std::size_t i = 0; i < m.p_table.size(); ++i) {
        const Eigen::VectorXd mu = m.mu_table.row(static_cast<Eigen::Index>(i)).transpose();
        c.g_table[i] = std::log(m.p_table[i]) - 0.5 * *log_det - 0.5 * mu.dot(c.k * mu) - 0.5 * n_cont * kLog2Pi;
    }
    return c;
}

CGModel canonical_to_moment(const CanonicalParams& c) {
    const auto log_det_k = cholesky_log_det(c.k);
    auto sigma = spd_inverse(c.k);
    if (!log_det_k || !sigma) throw SingularMatrixError("K", "canonical_to_moment");
    CGModel m{c.graph, c.levels, {}, c.h_table * *sigma, std::move(*sigma)};
    const double n_cont = static_cast<double>(c.k.rows());
    std::vector<double> log_p(c.g_table.size());
    for (std::size_t i = 0; i < log_p.size(); ++i) {
        const Eigen::VectorXd mu = m.mu_table.row(static_cast<Eigen::Index>(i)).transpose();
        // log|Sigma| = -log|K|
        log_p[i] = c.g_table[i] - 0.5 * *log_det_k + 0.5 * mu.dot(c.k * mu) + 0.5 * n_cont * kLog2Pi;
    }
    const double top = log_p.empty() ? 0.0 : *std::max_element(log_p.begin(), log_p.end());
    double total = 0.0;
    m.p_table.resize(log_p.size());
    for (std::size_t i = 0; i < log_p.size(); ++i) total += (m.p_table[i] = std::exp(log_p[i] - top));
    for (double& p : m.p_table) p /= total;
    return m;
}

Eigen::MatrixXd random_target_correlations(int n_cont, double rho, std::uint64_t seed) {
    if (n_cont < 1) throw ConfigError("need at least one continuous variable");
    const double lower = n_cont > 1 ? -1.0 / (n_cont - 1.0) : -1.0;
    if (!(rho > lower && rho < 1.0))
        throw RangeError("mean correlation rho=" + std::to_string(rho) + " outside (" + std::to_string(lower) +
                         ", 1) for " + std::to_string(n_cont) + " continuous variables");
    const auto n = static_cast<Eigen::Index>(n_cont);
    Rng rng(seed);
    Eigen::MatrixXd jitter = Eigen::MatrixXd::Zero(n, n);
    const double half_width = 0.1 * std::fabs(rho);
    for (Eigen::Index j = 1; j < n; ++j)
        for (Eigen::Index i = 0; i < j; ++i) jitter(i, j) = jitter(j, i) = half_width * (2.0 * rng.uniform() - 1.0);

    // Equicorrelation matrix is PD on the admissible rho range; shrink the
    // jitter toward it until the sum is PD.
    Eigen::MatrixXd base = Eigen::MatrixXd::Constant(n, n, rho);
    base.diagonal().setOnes();
    double scale = 1.0;
    for (int step = 0; step < 200; ++step, scale *= 0.9) {
        Eigen::MatrixXd candidate = base + scale * jitter;
        if (cholesky_log_det(candidate, 1e-6)) return candidate;
    }
    return base;
}

std::vector<std::vector<int>> maximal_cliques(const MarkedGraph& g, const std::vector<Vertex>& vertices) {
    const int n = static_cast<int>(vertices.size());
    auto adj = [&](int a, int b) { return g.adjacent(vertices[a], vertices[b]); };
    std::vector<std::vector<int>> cliques;
    // Bron-Kerbosch with pivoting.
    auto expand = [&](auto&& self, std::vector<int>& r, std::vector<int> p, std::vector<int> x) -> void {
        if (p.empty()) {
            if (x.empty()) {
                auto c = r;
                std::sort(c.begin(), c.end());
                cliques.push_back(std::move(c));
            }
            return;
        }
        int pivot = p.front();
        std::size_t best = 0;
        for (const auto* set : {&p, &x})
            for (int u : *set) {
                const auto cnt = static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [&](int v) { return adj(u, v); }));
                if (cnt > best) best = cnt, pivot = u;
            }
        std::vector<int> candidates;
        for (int v : p)
            if (!adj(pivot, v)) candidates.push_back(v);
        for (int v : candidates) {
            std::vector<int> p2, x2;
            for (int w : p)
                if (adj(v, w)) p2.push_back(w);
            for (int w : x)
                if (adj(v, w)) x2.push_back(w);
            r.push_back(v);
            self(self, r, std::move(p2), std::move(x2));
            r.pop_back();
            p.erase(std::find(p.begin(), p.end(), v));
            x.push_back(v);
        }
    };
    std::vector<int> r, all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[i] = i;
    expand(expand, r, all, {});
    std::sort(cliques.begin(), cliques.end());
    return cliques;
}

Eigen::MatrixXd complete_covariance(const MarkedGraph& g, const Eigen::MatrixXd& target, double tol, int max_sweeps) {
    const auto cont = g.continuous_vertices();
    const auto n = static_cast<Eigen::Index>(cont.size());
    if (target.rows() != n || target.cols() != n)
        throw DimensionMismatchError("target must be |Gamma| x |Gamma| for the graph's continuous vertices");
    if (n == 0) return Eigen::MatrixXd(0, 0);

    const auto cliques = maximal_cliques(g, cont);
    if (cliques.size() == 1) {
        // Complete continuous subgraph: nothing to fill in.
        if (!cholesky_log_det(target)) throw SingularMatrixError("target", "complete_covariance");
        return target;
    }
    std::vector<Eigen::MatrixXd> target_block_inv;
    target_block_inv.reserve(cliques.size());
    for (const auto& c : cliques) {
        auto inv = spd_inverse(principal_submatrix(target, c));
        if (!inv) throw SingularMatrixError("target clique block", "complete_covariance");
        target_block_inv.push_back(std::move(*inv));
    }

    auto max_violation = [&](const Eigen::MatrixXd& s) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            worst = std::max(worst, std::fabs(s(i, i) - target(i, i)));
            for (Eigen::Index j = i + 1; j < n; ++j)
                if (g.adjacent(cont[i], cont[j])) worst = std::max(worst, std::fabs(s(i, j) - target(i, j)));
        }
        return worst;
    };

    // K stays exactly zero off the clique blocks; Sigma is refreshed as K^-1
    // after every sweep so round-off does not accumulate.
    Eigen::MatrixXd k = target.diagonal().cwiseInverse().asDiagonal();
    Eigen::MatrixXd sigma = target.diagonal().asDiagonal();
    double violation = max_violation(sigma);
    for (int sweep = 0; sweep < max_sweeps && violation > 0.1 * tol; ++sweep) {
        for (std::size_t c = 0; c < cliques.size(); ++c) {
            const auto& idx = cliques[c];
            const auto m = static_cast<Eigen::Index>(idx.size());
            const Eigen::MatrixXd block = principal_submatrix(sigma, idx);
            auto block_inv = spd_inverse(block, 0.0);
            if (!block_inv) throw NonConvergenceError("covariance completion lost positive definiteness", violation);
            Eigen::MatrixXd cols(n, m);
            for (Eigen::Index j = 0; j < m; ++j) cols.col(j) = sigma.col(idx[j]);
            const Eigen::MatrixXd target_block = principal_submatrix(target, idx);
            // Sigma <- Sigma - Sigma[:,C] B^-1 (B - T) B^-1 Sigma[C,:], which sets Sigma[C,C] = T.
            const Eigen::MatrixXd middle = *block_inv * (block - target_block) * *block_inv;
            sigma -= cols * middle * cols.transpose();
            const Eigen::MatrixXd delta = target_block_inv[c] - *block_inv;
            for (Eigen::Index a = 0; a < m; ++a)
                for (Eigen::Index b = 0; b < m; ++b) k(idx[a], idx[b]) += delta(a, b);
        }
        k = (k + k.transpose()) / 2.0;
        auto refreshed = spd_inverse(k, 0.0);
        if (!refreshed) throw NonConvergenceError("covariance completion lost positive definiteness", violation);
        sigma = std::move(*refreshed);
        violation = max_violation(sigma);
    }
    if (violation > tol)
        throw NonConvergenceError("covariance completion did not converge in " + std::to_string(max_sweeps) +
                                      " sweeps (max violation " + std::to_string(violation) + ")",
                                  violation);
    return sigma;
}

Eigen::MatrixXd sample_mixed_interactions(const MarkedGraph& g, const LevelSpace& levels, double sigma_h,
                                          std::uint64_t seed) {
    if (!(sigma_h >= 0.0)) throw RangeError("sigma_h must be non-negative");
    const auto disc = g.discrete_vertices();
    const auto cont = g.continuous_vertices();
    if (levels.n_variables() != disc.size()) throw DimensionMismatchError("level count does not match discrete vertices");
    Rng rng(seed);
    Eigen::MatrixXd h(static_cast<Eigen::Index>(levels.size()), static_cast<Eigen::Index>(cont.size()));
    for (std::size_t c = 0; c < cont.size(); ++c) {
        std::vector<std::size_t> neighbours;  // positions into disc
        for (std::size_t k = 0; k < disc.size(); ++k)
            if (g.adjacent(cont[c], disc[k])) neighbours.push_back(k);
        const LevelSpace sub = levels.subspace(neighbours);
        std::vector<double> z(sub.size());
        for (double& value : z) value = rng.normal(0.0, sigma_h);
        for (std::size_t i = 0; i < levels.size(); ++i)
            h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = z[levels.project(i, neighbours)];
    }
    return h;
}

CGModel build_model(const MarkedGraph& g, double rho, double sigma_h, std::vector<int> levels, std::uint64_t seed) {
    const int n_disc = g.n_discrete();
    if (levels.empty()) levels.assign(static_cast<std::size_t>(n_disc), 2);
    if (static_cast<int>(levels.size()) != n_disc)
        throw ConfigError("expected " + std::to_string(n_disc) + " level cardinalities, got " +
                          std::to_string(levels.size()));
    if (!(sigma_h >= 0.0)) throw RangeError("sigma_h must be non-negative");
    LevelSpace space(std::move(levels));
    const int n_cont = g.n_vertices() - n_disc;

    Eigen::MatrixXd sigma(0, 0);
    if (n_cont > 0) {
        const Eigen::MatrixXd target = random_target_correlations(n_cont, rho, derive_seed(seed, {0}));
        sigma = complete_covariance(g, target);
    }
    const Eigen::MatrixXd h = sample_mixed_interactions(g, space, sigma_h, derive_seed(seed, {1}));
    CGModel m{g, space, std::vector<double>(space.size(), 1.0 / static_cast<double>(space.size())), h * sigma, sigma};
    return m;
}

void write_model(std::ostream& out, const CGModel& m,
                 const std::vector<std::pair<std::string, std::string>>& config) {
    if (!m.graph.has_discrete_prefix()) throw ConfigError("model file format requires discrete vertices first");
    nlohmann::ordered_json j;
    j["format"] = "qpmix-model";
    j["version"] = 1;
    j["n_vertices"] = m.graph.n_vertices();
    j["n_discrete"] = m.graph.n_discrete();
    auto edges = nlohmann::ordered_json::array();
    for (const auto& [u, v] : m.graph.edges()) edges.push_back({u, v});
    j["edges"] = edges;
    j["levels"] = m.levels.cardinalities();
    j["p_table"] = m.p_table;
    auto rows = [](const Eigen::MatrixXd& a) {
        auto out = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            auto row = nlohmann::ordered_json::array();
            for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
            out.push_back(row);
        }
        return out;
    };
    j["mu_table"] = rows(m.mu_table);
    j["sigma"] = rows(m.sigma);
    if (!config.empty()) {
        nlohmann::ordered_json c = nlohmann::ordered_json::object();
        for (const auto& [key, value] : config) c[key] = value;
        j["config"] = c;
    }
    out << j.dump(1) << '\n';
}

std::string model_to_string(const CGModel& m, const std::vector<std::pair<std::string, std::string>>& config) {
    std::ostringstream out;
    write_model(out, m, config);
    return out.str();
}

CGModel read_model(std::istream& in, const std::string& source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, 0, e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "qpmix-model" || j.at("version").get<int>() != 1)
            throw ParseError(source, 0, "not a qpmix-model v1 file");
        std::vector<Edge> edges;
        for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
        auto graph = MarkedGraph::with_discrete_prefix(j.at("n_vertices").get<int>(), j.at("n_discrete").get<int>(),
                                                       std::move(edges));
        auto matrix = [](const nlohmann::json& rows, Eigen::Index n_cols) {
            Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), n_cols);
            for (Eigen::Index r = 0; r < a.rows(); ++r) {
                const auto& row = rows.at(static_cast<std::size_t>(r));
                if (static_cast<Eigen::Index>(row.size()) != n_cols) throw std::out_of_range("ragged matrix row");
                for (Eigen::Index c = 0; c < n_cols; ++c) a(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
            }
            return a;
        };
        const auto n_cont = static_cast<Eigen::Index>(graph.n_vertices() - graph.n_discrete());
        CGModel m{std::move(graph), LevelSpace(j.at("levels").get<std::vector<int>>()),
                  j.at("p_table").get<std::vector<double>>(), matrix(j.at("mu_table"), n_cont),
                  matrix(j.at("sigma"), n_cont)};
        validate(m);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source, 0, e.what());
    } catch (const std::out_of_range& e) {
        throw ParseError(source, 0, e.what());
    }
}

}  // namespace qpmix
