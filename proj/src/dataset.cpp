#include "qpmix/dataset.hpp"

#include "qpmix/errors.hpp"
#include "qpmix/format.hpp"
#include "qpmix/rng.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace qpmix {

MixedDataset::MixedDataset(std::vector<Mark> marks, std::vector<int> levels, IntMatrix discrete_data,
                           Eigen::MatrixXd continuous_data, std::vector<std::string> names)
    : n_(static_cast<int>(std::max(discrete_data.rows(), continuous_data.rows()))),
      marks_(std::move(marks)),
      levels_(std::move(levels)),
      names_(std::move(names)),
      discrete_data_(std::move(discrete_data)),
      continuous_data_(std::move(continuous_data)) {
    const auto p = marks_.size();
    if (levels_.size() != p) throw DimensionMismatchError("levels must have one entry per variable");
    int n_disc = 0, n_cont = 0;
    column_.resize(p);
    for (std::size_t v = 0; v < p; ++v) column_[v] = marks_[v] == Mark::Discrete ? n_disc++ : n_cont++;
    if (discrete_data_.cols() != n_disc || continuous_data_.cols() != n_cont)
        throw DimensionMismatchError("data matrices do not match the variable marks");
    if ((n_disc > 0 && discrete_data_.rows() != n_) || (n_cont > 0 && continuous_data_.rows() != n_))
        throw DimensionMismatchError("data matrices have different row counts");
    if (n_disc == 0) discrete_data_.resize(n_, 0);
    if (n_cont == 0) continuous_data_.resize(n_, 0);
    for (std::size_t v = 0; v < p; ++v) {
        if (marks_[v] != Mark::Discrete) {
            levels_[v] = 0;
            continue;
        }
        if (levels_[v] < 1) throw DataError("discrete variable with no levels");
        const auto col = discrete_data_.col(column_[v]);
        if (n_ > 0 && (col.minCoeff() < 0 || col.maxCoeff() >= levels_[v]))
            throw DataError("discrete value outside declared level range");
    }
    if (names_.empty())
        for (std::size_t v = 0; v < p; ++v) names_.push_back((marks_[v] == Mark::Discrete ? "X" : "Y") + std::to_string(v));
    if (names_.size() != p) throw DimensionMismatchError("names must have one entry per variable");
}

MixedDataset sample_dataset(const CGModel& m, int n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("sample size must be at least 1");
    const auto disc = m.graph.discrete_vertices();
    const Eigen::Index n_cont = m.sigma.rows();
    Eigen::MatrixXd chol(n_cont, n_cont);
    if (n_cont > 0) {
        Eigen::LLT<Eigen::MatrixXd> llt(m.sigma);
        if (llt.info() != Eigen::Success) throw SingularMatrixError("sigma", "sample_dataset");
        chol = llt.matrixL();
    }

    std::vector<double> cumulative(m.p_table.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cumulative.size(); ++i) cumulative[i] = acc += m.p_table[i];
    bool uniform = true;
    for (double p : m.p_table) uniform = uniform && p == m.p_table.front();

    Rng rng(seed);
    IntMatrix discrete(n, static_cast<Eigen::Index>(disc.size()));
    Eigen::MatrixXd continuous(n, n_cont);
    Eigen::VectorXd z(n_cont);
    for (int r = 0; r < n; ++r) {
        std::size_t level;
        if (uniform) {
            level = static_cast<std::size_t>(rng.uniform_int(m.p_table.size()));
        } else {
            const double u = rng.uniform() * acc;
            level = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
            level = std::min(level, cumulative.size() - 1);
        }
        for (std::size_t k = 0; k < disc.size(); ++k)
            discrete(r, static_cast<Eigen::Index>(k)) = m.levels.level_of(level, k);
        for (Eigen::Index c = 0; c < n_cont; ++c) z(c) = rng.normal();
        continuous.row(r) = m.mu_table.row(static_cast<Eigen::Index>(level)) + (chol * z).transpose();
    }
    std::vector<int> levels(static_cast<std::size_t>(m.graph.n_vertices()), 0);
    for (std::size_t k = 0; k < disc.size(); ++k) levels[static_cast<std::size_t>(disc[k])] = m.levels.cardinalities()[k];
    return MixedDataset(m.graph.marks(), std::move(levels), std::move(discrete), std::move(continuous));
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

void write_csv(std::ostream& out, const MixedDataset& d) {
    for (Vertex v = 0; v < d.p(); ++v) {
        if (v > 0 && !d.is_discrete(v - 1) && d.is_discrete(v))
            throw ConfigError("CSV format requires discrete columns first");
        out << (v ? "," : "") << d.name(v) << (d.is_discrete(v) ? ":d" : ":c");
    }
    out << '\n';
    for (int r = 0; r < d.n(); ++r) {
        for (Vertex v = 0; v < d.p(); ++v) {
            if (v) out << ',';
            if (d.is_discrete(v))
                out << d.discrete_data()(r, d.column(v));
            else
                out << format_double(d.continuous_data()(r, d.column(v)));
        }
        out << '\n';
    }
}

std::string csv_to_string(const MixedDataset& d) {
    std::ostringstream out;
    write_csv(out, d);
    return out.str();
}

MixedDataset read_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError(source, 1, "empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split(line, ',');
    std::vector<Mark> marks;
    std::vector<int> declared;
    std::vector<std::string> names;
    for (const auto& field : header) {
        const auto colon = field.rfind(':');
        if (colon == std::string::npos || colon + 1 >= field.size())
            throw ParseError(source, line_no, "column '" + field + "' lacks a ':d' or ':c' suffix");
        const std::string kind = field.substr(colon + 1);
        names.push_back(field.substr(0, colon));
        if (kind == "c") {
            marks.push_back(Mark::Continuous);
            declared.push_back(0);
        } else if (kind[0] == 'd') {
            if (!marks.empty() && marks.back() == Mark::Continuous)
                throw ParseError(source, line_no, "discrete column '" + field + "' after a continuous column");
            int k = 0;
            if (kind.size() > 1) {
                const auto res = std::from_chars(kind.data() + 1, kind.data() + kind.size(), k);
                if (res.ec != std::errc() || res.ptr != kind.data() + kind.size() || k < 1)
                    throw ParseError(source, line_no, "bad level count in '" + field + "'");
            }
            marks.push_back(Mark::Discrete);
            declared.push_back(k);
        } else {
            throw ParseError(source, line_no, "column '" + field + "' has unknown kind '" + kind + "'");
        }
    }
    const auto n_disc = std::count(marks.begin(), marks.end(), Mark::Discrete);
    const auto n_cont = static_cast<std::ptrdiff_t>(marks.size()) - n_disc;

    std::vector<std::vector<int>> disc_rows;
    std::vector<std::vector<double>> cont_rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != marks.size())
            throw ParseError(source, line_no,
                             "expected " + std::to_string(marks.size()) + " fields, got " + std::to_string(fields.size()));
        std::vector<int> drow;
        std::vector<double> crow;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto& f = fields[c];
            const char* end = f.data() + f.size();
            if (marks[c] == Mark::Discrete) {
                int value = -1;
                const auto res = std::from_chars(f.data(), end, value);
                if (res.ec != std::errc() || res.ptr != end || value < 0)
                    throw ParseError(source, line_no, "column " + std::to_string(c + 1) + ": '" + f +
                                                          "' is not a non-negative integer level");
                if (declared[c] > 0 && value >= declared[c])
                    throw ParseError(source, line_no, "column " + std::to_string(c + 1) + ": level " + f +
                                                          " beyond declared count " + std::to_string(declared[c]));
                drow.push_back(value);
            } else {
                double value = 0.0;
                const auto res = std::from_chars(f.data(), end, value);
                if (res.ec != std::errc() || res.ptr != end)
                    throw ParseError(source, line_no, "column " + std::to_string(c + 1) + ": '" + f + "' is not a number");
                crow.push_back(value);
            }
        }
        disc_rows.push_back(std::move(drow));
        cont_rows.push_back(std::move(crow));
    }
    const auto n = static_cast<Eigen::Index>(disc_rows.size());
    if (n == 0) throw ParseError(source, line_no, "no data rows");
    IntMatrix discrete(n, n_disc);
    Eigen::MatrixXd continuous(n, n_cont);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n_disc; ++c) discrete(r, c) = disc_rows[r][c];
        for (Eigen::Index c = 0; c < n_cont; ++c) continuous(r, c) = cont_rows[r][c];
    }
    std::vector<int> levels(marks.size(), 0);
    for (std::size_t v = 0, col = 0; v < marks.size(); ++v) {
        if (marks[v] != Mark::Discrete) continue;
        const int observed = discrete.col(static_cast<Eigen::Index>(col++)).maxCoeff() + 1;
        levels[v] = declared[v] > 0 ? declared[v] : observed;
    }
    return MixedDataset(std::move(marks), std::move(levels), std::move(discrete), std::move(continuous),
                        std::move(names));
}

}  // namespace qpmix
