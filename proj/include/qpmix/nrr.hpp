#pragma once

#include "qpmix/citest.hpp"
#include "qpmix/dataset.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qpmix {

struct NrrOptions {
    int q = 3;
    int n_subsets = 100;
    double alpha = 0.05;
    bool restrict_continuous = false;
    std::uint64_t seed = 1;
    TestKind test = TestKind::Exact;
    unsigned threads = 1;
};

struct NrrPairResult {
    double nrr = 0.0;
    int feasible = 0;  // conditioning sets whose test could be carried out
    int drawn = 0;     // conditioning sets evaluated (exhaustive or sampled)
};

/// Number of size-q subsets of m elements, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t m, std::uint64_t q);

/// Candidate conditioning vertices for the pair (a, b): every other vertex, or
/// only continuous ones when restrict_continuous is set.
std::vector<Vertex> conditioning_candidates(const MixedDataset& d, Vertex a, Vertex b, bool restrict_continuous);

/// The size-q conditioning sets evaluated for (a, b): all of them in
/// lexicographic order when there are at most n_subsets, otherwise n_subsets
/// uniform draws with replacement (each set sorted).
std::vector<std::vector<Vertex>> draw_conditioning_sets(const std::vector<Vertex>& candidates, int q, int n_subsets,
                                                        std::uint64_t seed);

/// Non-rejection rate of (a, b): fraction of feasible conditioning sets whose
/// test does not reject at alpha. Throws NoFeasibleSubsetError when no drawn
/// set yields a feasible test.
NrrPairResult nrr_pair(const MixedDataset& d, Vertex a, Vertex b, const NrrOptions& opt);

/// Seed used for pair (a, b) under master seed s: derive_seed(s, {min, max}).
std::uint64_t pair_seed(std::uint64_t master, Vertex a, Vertex b);

/// Symmetric p x p matrix of non-rejection rates. Undefined entries: the
/// diagonal, discrete-discrete pairs and pairs without a feasible test.
class NrrMatrix {
public:
    NrrMatrix() = default;
    NrrMatrix(std::vector<Mark> marks, NrrOptions options);

    int p() const noexcept { return static_cast<int>(marks_.size()); }
    const std::vector<Mark>& marks() const noexcept { return marks_; }
    bool is_discrete(Vertex v) const { return marks_[static_cast<std::size_t>(v)] == Mark::Discrete; }

    bool defined(Vertex a, Vertex b) const;
    double value(Vertex a, Vertex b) const;
    int feasible(Vertex a, Vertex b) const;
    void set(Vertex a, Vertex b, double nrr, int feasible);
    std::size_t n_defined() const;

    /// Orders the matrix was estimated at (several after averaging).
    const std::vector<int>& q_values() const noexcept { return q_values_; }
    const NrrOptions& options() const noexcept { return options_; }

    friend NrrMatrix average_nrr(const std::vector<NrrMatrix>& ms);
    friend NrrMatrix read_nrr(std::istream& in, const std::string& source);

private:
    std::size_t at(Vertex a, Vertex b) const { return static_cast<std::size_t>(a) * marks_.size() + static_cast<std::size_t>(b); }

    std::vector<Mark> marks_;
    std::vector<double> values_;  // NaN where undefined
    std::vector<int> feasible_;
    NrrOptions options_;
    std::vector<int> q_values_;
};

/// Pairs a < b that are not both discrete, in lexicographic order.
std::vector<Edge> admissible_pairs(const std::vector<Mark>& marks);

/// Evaluates nrr_pair for every admissible pair on opt.threads workers.
/// Output is independent of the thread count.
NrrMatrix nrr_matrix(const MixedDataset& d, const NrrOptions& opt);

/// Entrywise mean over the matrices in which an entry is defined.
NrrMatrix average_nrr(const std::vector<NrrMatrix>& ms);

/// Long-form TSV: "# key<TAB>value" metadata lines, a "u v nrr feasible"
/// header, then one line per defined pair (u < v). Discrete vertices first.
void write_nrr(std::ostream& out, const NrrMatrix& m);
std::string nrr_to_string(const NrrMatrix& m);
NrrMatrix read_nrr(std::istream& in, const std::string& source = "<nrr>");

}  // namespace qpmix
