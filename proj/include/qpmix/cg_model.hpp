#pragma once

#include "qpmix/level_space.hpp"
#include "qpmix/marked_graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qpmix {

/// Homogeneous conditional-Gaussian model in moment form.
///
/// Discrete variables are the graph's discrete vertices in index order, the
/// continuous coordinates its continuous vertices in index order. Rows of
/// `mu_table` are indexed by joint level (see LevelSpace).
struct CGModel {
    MarkedGraph graph;
    LevelSpace levels;
    std::vector<double> p_table;
    Eigen::MatrixXd mu_table;  // |I| x |Gamma|
    Eigen::MatrixXd sigma;     // |Gamma| x |Gamma|

    int n_continuous() const noexcept { return static_cast<int>(sigma.rows()); }
};

/// Canonical form: log f(i, y) = g(i) + h(i)'y - y'Ky/2.
struct CanonicalParams {
    MarkedGraph graph;
    LevelSpace levels;
    std::vector<double> g_table;
    Eigen::MatrixXd h_table;  // |I| x |Gamma|
    Eigen::MatrixXd k;
};

/// Checks the CGModel invariants (shapes, probabilities, positive-definite
/// sigma) and throws ConfigError describing the first violation.
void validate(const CGModel& m);

CanonicalParams moment_to_canonical(const CGModel& m);
CGModel canonical_to_moment(const CanonicalParams& c);

/// Unit-diagonal correlation target with off-diagonal mean rho. Entries are
/// rho + U(-0.1|rho|, 0.1|rho|); the jitter is scaled down until the matrix is
/// positive definite. Requires -1/(n_cont-1) < rho < 1.
Eigen::MatrixXd random_target_correlations(int n_cont, double rho, std::uint64_t seed);

inline constexpr double kCompletionTolerance = 1e-8;
inline constexpr int kCompletionMaxSweeps = 5000;

/// Covariance selection: the positive-definite Sigma that agrees with `target`
/// on the diagonal and on every continuous-continuous edge of g, and whose
/// inverse vanishes on every missing continuous pair. Computed by iterative
/// proportional scaling over the maximal cliques of the continuous subgraph.
Eigen::MatrixXd complete_covariance(const MarkedGraph& g, const Eigen::MatrixXd& target,
                                    double tol = kCompletionTolerance, int max_sweeps = kCompletionMaxSweeps);

/// Maximal cliques of the subgraph induced by `vertices` (each clique lists
/// positions into `vertices`), sorted. Isolated vertices form singletons.
std::vector<std::vector<int>> maximal_cliques(const MarkedGraph& g, const std::vector<Vertex>& vertices);

/// Mixed linear interaction terms h(i), |I| x |Gamma|. For each continuous
/// vertex one N(0, sigma_h) value is drawn per joint level of its discrete
/// neighbours (a single value when it has none).
Eigen::MatrixXd sample_mixed_interactions(const MarkedGraph& g, const LevelSpace& levels, double sigma_h,
                                          std::uint64_t seed);

/// Full synthetic model: target correlations, completion, interactions,
/// uniform p(i) and mu(i) = Sigma h(i). Empty `levels` means 2 per discrete.
CGModel build_model(const MarkedGraph& g, double rho, double sigma_h, std::vector<int> levels, std::uint64_t seed);

/// JSON model file. `config` entries are stored verbatim under "config".
void write_model(std::ostream& out, const CGModel& m,
                 const std::vector<std::pair<std::string, std::string>>& config = {});
std::string model_to_string(const CGModel& m, const std::vector<std::pair<std::string, std::string>>& config = {});
CGModel read_model(std::istream& in, const std::string& source = "<model>");

}  // namespace qpmix
