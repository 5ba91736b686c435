#include "qpmix/stats.hpp"

#include "qpmix/errors.hpp"
#include "qpmix/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qpmix {

SuffStats compute_suffstats(const MixedDataset& d, std::span<const Vertex> vars) {
    if (vars.empty()) throw ConfigError("compute_suffstats needs at least one variable");
    SuffStats st;
    std::vector<int> cards;
    for (Vertex v : vars) {
        if (v < 0 || v >= d.p()) throw ConfigError("variable index out of range");
        if (d.is_discrete(v)) {
            st.discrete_vars.push_back(v);
            cards.push_back(d.levels(v));
        } else {
            st.continuous_vars.push_back(v);
        }
    }
    st.cells = LevelSpace(std::move(cards));
    st.n = d.n();
    const auto n_cells = static_cast<Eigen::Index>(st.cells.size());
    const auto n_cont = static_cast<Eigen::Index>(st.continuous_vars.size());
    st.n_i.assign(st.cells.size(), 0);
    st.s_i = Eigen::MatrixXd::Zero(n_cells, n_cont);
    st.ybar_i = Eigen::MatrixXd::Zero(n_cells, n_cont);
    st.ssd_i.assign(st.cells.size(), Eigen::MatrixXd::Zero(n_cont, n_cont));

    std::vector<int> disc_cols, cont_cols;
    for (Vertex v : st.discrete_vars) disc_cols.push_back(d.column(v));
    for (Vertex v : st.continuous_vars) cont_cols.push_back(d.column(v));
    const auto& dd = d.discrete_data();
    const auto& cd = d.continuous_data();

    std::vector<std::size_t> cell_of(static_cast<std::size_t>(d.n()));
    for (int r = 0; r < d.n(); ++r) {
        std::size_t cell = 0;
        for (std::size_t k = 0; k < disc_cols.size(); ++k)
            cell = cell * static_cast<std::size_t>(st.cells.cardinalities()[k]) + static_cast<std::size_t>(dd(r, disc_cols[k]));
        cell_of[static_cast<std::size_t>(r)] = cell;
        ++st.n_i[cell];
        for (Eigen::Index c = 0; c < n_cont; ++c) st.s_i(static_cast<Eigen::Index>(cell), c) += cd(r, cont_cols[c]);
    }
    for (Eigen::Index i = 0; i < n_cells; ++i)
        if (st.n_i[i] > 0) st.ybar_i.row(i) = st.s_i.row(i) / st.n_i[i];
    // Deviations from the cell mean (two-pass), equal to ss(i) - s(i)s(i)'/n(i).
    Eigen::VectorXd dev(n_cont);
    for (int r = 0; r < d.n(); ++r) {
        const auto cell = static_cast<Eigen::Index>(cell_of[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < n_cont; ++c) dev(c) = cd(r, cont_cols[c]) - st.ybar_i(cell, c);
        st.ssd_i[static_cast<std::size_t>(cell)].selfadjointView<Eigen::Lower>().rankUpdate(dev);
    }
    for (auto& m : st.ssd_i) m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
    return st;
}

Eigen::MatrixXd SuffStats::pooled_ssd(std::span<const std::size_t> keep, std::span<const int> coords) const {
    const auto m = static_cast<Eigen::Index>(coords.size());
    const LevelSpace groups = cells.subspace(keep);
    std::vector<int> group_n(groups.size(), 0);
    Eigen::MatrixXd group_sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(groups.size()), m);
    Eigen::MatrixXd pooled = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (n_i[i] == 0) continue;
        const auto g = static_cast<Eigen::Index>(cells.project(i, keep));
        group_n[static_cast<std::size_t>(g)] += n_i[i];
        for (Eigen::Index a = 0; a < m; ++a) {
            group_sum(g, a) += s_i(static_cast<Eigen::Index>(i), coords[a]);
            for (Eigen::Index b = 0; b < m; ++b) pooled(a, b) += ssd_i[i](coords[a], coords[b]);
        }
    }
    // Between-cell scatter within each group: sum n_i (ybar_i - ybar_g)(ybar_i - ybar_g)'.
    Eigen::VectorXd diff(m);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (n_i[i] == 0) continue;
        const auto g = static_cast<Eigen::Index>(cells.project(i, keep));
        if (group_n[static_cast<std::size_t>(g)] == n_i[i]) continue;
        for (Eigen::Index a = 0; a < m; ++a)
            diff(a) = ybar_i(static_cast<Eigen::Index>(i), coords[a]) - group_sum(g, a) / group_n[static_cast<std::size_t>(g)];
        pooled.noalias() += n_i[i] * diff * diff.transpose();
    }
    return pooled;
}

Eigen::MatrixXd SuffStats::pooled_ssd() const {
    std::vector<std::size_t> keep(discrete_vars.size());
    std::iota(keep.begin(), keep.end(), std::size_t{0});
    std::vector<int> coords(continuous_vars.size());
    std::iota(coords.begin(), coords.end(), 0);
    return pooled_ssd(keep, coords);
}

int SuffStats::observed_cells(std::span<const std::size_t> keep) const {
    const LevelSpace groups = cells.subspace(keep);
    std::vector<char> seen(groups.size(), 0);
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (n_i[i] > 0) seen[cells.project(i, keep)] = 1;
    return static_cast<int>(std::count(seen.begin(), seen.end(), 1));
}

int SuffStats::observed_cells() const {
    return static_cast<int>(std::count_if(n_i.begin(), n_i.end(), [](int c) { return c > 0; }));
}

namespace {

void check_conditioning(const MixedDataset& d, Vertex a, Vertex b, std::span<const Vertex> q) {
    if (a < 0 || b < 0 || a >= d.p() || b >= d.p()) throw ConfigError("vertex index out of range");
    if (a == b) throw ConfigError("test endpoints must differ");
    std::vector<Vertex> sorted(q.begin(), q.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ConfigError("conditioning set has repeated vertices");
    for (Vertex v : sorted) {
        if (v < 0 || v >= d.p()) throw ConfigError("conditioning vertex out of range");
        if (v == a || v == b) throw ConfigError("conditioning set contains a test endpoint");
    }
}

std::vector<int> without(int size, std::initializer_list<int> drop) {
    std::vector<int> out;
    for (int i = 0; i < size; ++i)
        if (std::find(drop.begin(), drop.end(), i) == drop.end()) out.push_back(i);
    return out;
}

double log_det_or_throw(const Eigen::MatrixXd& full, std::span<const int> idx, const char* name, const char* ctx) {
    const auto ld = cholesky_log_det(principal_submatrix(full, idx));
    if (!ld) throw SingularMatrixError(name, ctx);
    return *ld;
}

double lambda_from_log(double log_lambda) { return std::min(1.0, std::exp(log_lambda)); }

}  // namespace

LrStatistic lr_continuous(const MixedDataset& d, Vertex gamma, Vertex eta, std::span<const Vertex> q) {
    check_conditioning(d, gamma, eta, q);
    if (d.is_discrete(gamma) || d.is_discrete(eta)) throw ConfigError("lr_continuous needs two continuous vertices");
    std::vector<Vertex> vars{gamma, eta};
    vars.insert(vars.end(), q.begin(), q.end());
    const SuffStats st = compute_suffstats(d, vars);
    const Eigen::MatrixXd ssd = st.pooled_ssd();
    const int g = static_cast<int>(ssd.rows());
    // gamma is coordinate 0, eta coordinate 1.
    const auto all = without(g, {});
    const auto no_gamma = without(g, {0});
    const auto no_eta = without(g, {1});
    const auto neither = without(g, {0, 1});
    constexpr const char* ctx = "lr_continuous";
    const double log_lambda = log_det_or_throw(ssd, all, "ssd_Gamma", ctx) +
                              log_det_or_throw(ssd, neither, "ssd_Gamma\\{gamma,eta}", ctx) -
                              log_det_or_throw(ssd, no_gamma, "ssd_Gamma\\{gamma}", ctx) -
                              log_det_or_throw(ssd, no_eta, "ssd_Gamma\\{eta}", ctx);
    const int observed = st.observed_cells();
    return {lambda_from_log(log_lambda), d.n(), g, observed, observed};
}

LrStatistic lr_mixed(const MixedDataset& d, Vertex delta, Vertex gamma, std::span<const Vertex> q) {
    check_conditioning(d, delta, gamma, q);
    if (!d.is_discrete(delta) || d.is_discrete(gamma))
        throw ConfigError("lr_mixed needs a discrete and a continuous vertex");
    std::vector<Vertex> vars{delta, gamma};
    vars.insert(vars.end(), q.begin(), q.end());
    const SuffStats st = compute_suffstats(d, vars);
    // delta is discrete position 0, gamma continuous coordinate 0.
    const int g = static_cast<int>(st.continuous_vars.size());
    std::vector<std::size_t> all_disc(st.discrete_vars.size()), rest_disc;
    std::iota(all_disc.begin(), all_disc.end(), std::size_t{0});
    rest_disc.assign(all_disc.begin() + 1, all_disc.end());
    const auto coords = without(g, {});
    const Eigen::MatrixXd ssd_full = st.pooled_ssd(all_disc, coords);
    const Eigen::MatrixXd ssd_rest = st.pooled_ssd(rest_disc, coords);
    const auto no_gamma = without(g, {0});
    constexpr const char* ctx = "lr_mixed";
    const double log_lambda = log_det_or_throw(ssd_full, coords, "ssd_Gamma", ctx) +
                              log_det_or_throw(ssd_rest, no_gamma, "ssd_Gamma*(Delta*)", ctx) -
                              log_det_or_throw(ssd_full, no_gamma, "ssd_Gamma*", ctx) -
                              log_det_or_throw(ssd_rest, coords, "ssd_Gamma(Delta*)", ctx);
    return {lambda_from_log(log_lambda), d.n(), g, st.observed_cells(all_disc), st.observed_cells(rest_disc)};
}

}  // namespace qpmix
