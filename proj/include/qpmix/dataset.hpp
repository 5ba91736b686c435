#pragma once

#include "qpmix/cg_model.hpp"
#include "qpmix/marked_graph.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qpmix {

using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// n observations of p mixed variables. Vertex v maps to a column of
/// `discrete_data` or `continuous_data` (in vertex order within each kind).
class MixedDataset {
public:
    MixedDataset() = default;
    MixedDataset(std::vector<Mark> marks, std::vector<int> levels, IntMatrix discrete_data,
                 Eigen::MatrixXd continuous_data, std::vector<std::string> names = {});

    int n() const noexcept { return n_; }
    int p() const noexcept { return static_cast<int>(marks_.size()); }
    const std::vector<Mark>& marks() const noexcept { return marks_; }
    bool is_discrete(Vertex v) const { return marks_[static_cast<std::size_t>(v)] == Mark::Discrete; }
    int n_discrete() const noexcept { return static_cast<int>(discrete_data_.cols()); }
    int n_continuous() const noexcept { return static_cast<int>(continuous_data_.cols()); }

    /// Number of levels of a discrete vertex.
    int levels(Vertex v) const { return levels_[static_cast<std::size_t>(v)]; }
    /// Column index of vertex v within its kind's matrix.
    int column(Vertex v) const { return column_[static_cast<std::size_t>(v)]; }
    const std::string& name(Vertex v) const { return names_[static_cast<std::size_t>(v)]; }

    const IntMatrix& discrete_data() const noexcept { return discrete_data_; }
    const Eigen::MatrixXd& continuous_data() const noexcept { return continuous_data_; }

private:
    int n_ = 0;
    std::vector<Mark> marks_;
    std::vector<int> levels_;  // 0 for continuous vertices
    std::vector<int> column_;
    std::vector<std::string> names_;
    IntMatrix discrete_data_;
    Eigen::MatrixXd continuous_data_;
};

/// n i.i.d. rows: a joint level drawn from p(i), then y ~ N(mu(i), Sigma)
/// as mu(i) + L z with L the lower Cholesky factor of Sigma.
MixedDataset sample_dataset(const CGModel& m, int n, std::uint64_t seed);

/// CSV with a header of names suffixed ":d" or ":c". Discrete columns first.
/// Discrete values are level indices; on reading, level counts are taken as
/// 1 + max value unless a "name:d<k>" suffix declares k levels.
void write_csv(std::ostream& out, const MixedDataset& d);
std::string csv_to_string(const MixedDataset& d);
MixedDataset read_csv(std::istream& in, const std::string& source = "<csv>");

}  // namespace qpmix
