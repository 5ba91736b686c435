#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace qpmix {

using Vertex = int;
using Edge = std::pair<Vertex, Vertex>;

enum class Mark : std::uint8_t { Discrete, Continuous };

/// Undirected simple graph whose vertices are marked discrete or continuous.
///
/// Edges are stored as ordered pairs (u < v) in lexicographic order; adjacency
/// is kept alongside for O(1) lookups. Immutable after construction.
class MarkedGraph {
public:
    MarkedGraph() = default;
    MarkedGraph(std::vector<Mark> marks, std::vector<Edge> edges);

    /// Graph with the first n_discrete vertices discrete, the rest continuous.
    static MarkedGraph with_discrete_prefix(int n_vertices, int n_discrete, std::vector<Edge> edges);

    int n_vertices() const noexcept { return static_cast<int>(marks_.size()); }
    const std::vector<Mark>& marks() const noexcept { return marks_; }
    Mark mark(Vertex v) const { return marks_[static_cast<std::size_t>(v)]; }
    bool is_discrete(Vertex v) const { return mark(v) == Mark::Discrete; }
    int n_discrete() const noexcept;

    /// True when all discrete vertices precede all continuous ones.
    bool has_discrete_prefix() const noexcept;

    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t n_edges() const noexcept { return edges_.size(); }
    bool adjacent(Vertex u, Vertex v) const;
    const std::vector<Vertex>& neighbors(Vertex v) const { return adjacency_[static_cast<std::size_t>(v)]; }
    int degree(Vertex v) const { return static_cast<int>(neighbors(v).size()); }

    std::vector<Vertex> discrete_vertices() const;
    std::vector<Vertex> continuous_vertices() const;

    friend bool operator==(const MarkedGraph& a, const MarkedGraph& b) {
        return a.marks_ == b.marks_ && a.edges_ == b.edges_;
    }

private:
    std::vector<Mark> marks_;
    std::vector<Edge> edges_;
    std::vector<std::vector<Vertex>> adjacency_;
    std::vector<std::uint8_t> matrix_;
};

/// Attempt cap shared by pairing-model restarts and discrete-edge rejections.
inline constexpr int kDregularMaxAttempts = 10000;

/// Uniform d-regular graph on p vertices (Steger-Wormald pairing with
/// incremental suitable-pair selection), rejecting graphs in which two discrete
/// vertices are adjacent. Vertices 0..n_discrete-1 are discrete.
MarkedGraph sample_dregular(int p, int d, int n_discrete, std::uint64_t seed,
                            int max_attempts = kDregularMaxAttempts);

/// No chordless cycle of length > 3, and no path between two non-adjacent
/// discrete vertices whose interior vertices are all continuous.
bool is_decomposable(const MarkedGraph& g);

/// |E| / (p (p-1) / 2). Requires at least two vertices.
double density(const MarkedGraph& g);

/// Edge-list text format:
///   p <n_vertices> <n_discrete>
///   u v            (one line per edge, u < v, lexicographic order)
/// Discrete vertices occupy the lowest indices.
void write_graph(std::ostream& out, const MarkedGraph& g);
std::string graph_to_string(const MarkedGraph& g);
MarkedGraph read_graph(std::istream& in, const std::string& source = "<graph>");

}  // namespace qpmix
