#pragma once

#include "qpmix/dataset.hpp"
#include "qpmix/level_space.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace qpmix {

/// Cell-wise sufficient statistics of a marginal dataset.
///
/// Cells are the joint levels of `discrete_vars` (in the given order); the
/// continuous coordinates follow `continuous_vars`. Empty cells keep n(i) = 0
/// with zero sums.
struct SuffStats {
    std::vector<Vertex> discrete_vars;
    std::vector<Vertex> continuous_vars;
    LevelSpace cells;
    int n = 0;
    std::vector<int> n_i;
    Eigen::MatrixXd s_i;                // |I| x |B|
    Eigen::MatrixXd ybar_i;             // |I| x |B|, zero rows for empty cells
    std::vector<Eigen::MatrixXd> ssd_i; // ssd(i), |B| x |B|

    /// ssd of the continuous positions `coords`, pooled within the cells of
    /// the discrete positions `keep` (empty `keep`: no conditioning).
    Eigen::MatrixXd pooled_ssd(std::span<const std::size_t> keep, std::span<const int> coords) const;
    /// ssd of all continuous coordinates pooled within all cells.
    Eigen::MatrixXd pooled_ssd() const;
    /// Number of cells of the sub-space over `keep` with at least one observation.
    int observed_cells(std::span<const std::size_t> keep) const;
    int observed_cells() const;
};

/// Statistics over `vars`. Discrete and continuous vertices keep the order in
/// which they appear in `vars`.
SuffStats compute_suffstats(const MixedDataset& d, std::span<const Vertex> vars);

/// Likelihood-ratio statistic (raised to 2/n) together with the counts that
/// parameterize its null distribution.
struct LrStatistic {
    double lambda = 1.0;
    int n = 0;
    int n_continuous = 0;   // |Gamma| of the marginal {a, b} u Q
    int observed_cells = 1; // observed joint levels of the discrete part
    int observed_rest = 1;  // mixed: observed joint levels without delta
};

/// Lambda = |ssd_G| |ssd_{G\{g,e}}| / (|ssd_{G\{g}}| |ssd_{G\{e}}|) over the
/// marginal {gamma, eta} u Q, ssd pooled within the observed discrete cells.
LrStatistic lr_continuous(const MixedDataset& d, Vertex gamma, Vertex eta, std::span<const Vertex> q);

/// Lambda = |ssd_G| |ssd_{G*}(D*)| / (|ssd_{G*}| |ssd_G(D*)|), G* = G\{gamma},
/// D* = D\{delta}, over the marginal {delta, gamma} u Q.
LrStatistic lr_mixed(const MixedDataset& d, Vertex delta, Vertex gamma, std::span<const Vertex> q);

}  // namespace qpmix
