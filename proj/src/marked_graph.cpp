#include "qpmix/marked_graph.hpp"

#include "qpmix/errors.hpp"
#include "qpmix/rng.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace qpmix {

MarkedGraph::MarkedGraph(std::vector<Mark> marks, std::vector<Edge> edges) : marks_(std::move(marks)) {
    const int p = n_vertices();
    for (auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= p || v >= p) throw ConfigError("edge endpoint out of range");
        if (u == v) throw ConfigError("self-loop at vertex " + std::to_string(u));
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    adjacency_.assign(static_cast<std::size_t>(p), {});
    matrix_.assign(static_cast<std::size_t>(p) * static_cast<std::size_t>(p), 0);
    for (const auto& [u, v] : edges_) {
        adjacency_[static_cast<std::size_t>(u)].push_back(v);
        adjacency_[static_cast<std::size_t>(v)].push_back(u);
        matrix_[static_cast<std::size_t>(u) * p + v] = 1;
        matrix_[static_cast<std::size_t>(v) * p + u] = 1;
    }
    for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
}

MarkedGraph MarkedGraph::with_discrete_prefix(int n_vertices, int n_discrete, std::vector<Edge> edges) {
    if (n_vertices < 0 || n_discrete < 0 || n_discrete > n_vertices)
        throw ConfigError("invalid vertex counts");
    std::vector<Mark> marks(static_cast<std::size_t>(n_vertices), Mark::Continuous);
    std::fill_n(marks.begin(), n_discrete, Mark::Discrete);
    return MarkedGraph(std::move(marks), std::move(edges));
}

int MarkedGraph::n_discrete() const noexcept {
    return static_cast<int>(std::count(marks_.begin(), marks_.end(), Mark::Discrete));
}

bool MarkedGraph::has_discrete_prefix() const noexcept {
    return std::is_partitioned(marks_.begin(), marks_.end(), [](Mark m) { return m == Mark::Discrete; });
}

bool MarkedGraph::adjacent(Vertex u, Vertex v) const {
    return matrix_[static_cast<std::size_t>(u) * n_vertices() + v] != 0;
}

std::vector<Vertex> MarkedGraph::discrete_vertices() const {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < n_vertices(); ++v)
        if (is_discrete(v)) out.push_back(v);
    return out;
}

std::vector<Vertex> MarkedGraph::continuous_vertices() const {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < n_vertices(); ++v)
        if (!is_discrete(v)) out.push_back(v);
    return out;
}

namespace {

bool has_suitable_pair(const std::set<Edge>& edges, const std::map<Vertex, int>& remaining) {
    if (remaining.empty()) return true;
    for (auto a = remaining.begin(); a != remaining.end(); ++a)
        for (auto b = std::next(a); b != remaining.end(); ++b)
            if (!edges.contains({a->first, b->first})) return true;
    return false;
}

// One pass of the pairing model. Stubs are shuffled and paired; unsuitable
// pairs (loops, multi-edges) are returned to the pool, which is re-shuffled
// until empty or until no suitable pair remains.
bool try_pairing(int p, int d, Rng& rng, std::set<Edge>& edges) {
    edges.clear();
    std::vector<Vertex> stubs;
    stubs.reserve(static_cast<std::size_t>(p) * d);
    for (int k = 0; k < d; ++k)
        for (Vertex v = 0; v < p; ++v) stubs.push_back(v);

    while (!stubs.empty()) {
        for (std::size_t i = stubs.size(); i > 1; --i)
            std::swap(stubs[i - 1], stubs[rng.uniform_int(i)]);
        std::map<Vertex, int> leftover;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            Vertex u = stubs[i], v = stubs[i + 1];
            if (u > v) std::swap(u, v);
            if (u != v && !edges.contains({u, v})) {
                edges.insert({u, v});
            } else {
                ++leftover[u];
                ++leftover[v];
            }
        }
        if (!has_suitable_pair(edges, leftover)) return false;
        stubs.clear();
        for (const auto& [v, count] : leftover) stubs.insert(stubs.end(), static_cast<std::size_t>(count), v);
    }
    return true;
}

}  // namespace

MarkedGraph sample_dregular(int p, int d, int n_discrete, std::uint64_t seed, int max_attempts) {
    if (p <= 0 || d < 0 || d >= p || (static_cast<long long>(p) * d) % 2 != 0)
        throw InfeasibleDegreeError("no simple " + std::to_string(d) + "-regular graph on " + std::to_string(p) +
                                    " vertices (need d < p and p*d even)");
    if (n_discrete < 0 || n_discrete > p) throw ConfigError("n_discrete must lie in [0, p]");

    Rng rng(seed);
    std::set<Edge> edges;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        if (!try_pairing(p, d, rng, edges)) continue;
        const bool discrete_edge = std::any_of(edges.begin(), edges.end(),
                                               [&](const Edge& e) { return e.second < n_discrete; });
        if (discrete_edge) continue;
        return MarkedGraph::with_discrete_prefix(p, n_discrete, {edges.begin(), edges.end()});
    }
    throw RetryExhaustedError("could not sample a " + std::to_string(d) + "-regular graph on " + std::to_string(p) +
                              " vertices without discrete-discrete edges in " + std::to_string(max_attempts) +
                              " attempts");
}

namespace {

// Maximum cardinality search followed by the perfect-elimination check
// (Tarjan & Yannakakis 1984).
bool is_chordal(const MarkedGraph& g) {
    const int p = g.n_vertices();
    std::vector<int> weight(static_cast<std::size_t>(p), 0);
    std::vector<int> order_pos(static_cast<std::size_t>(p), -1);
    std::vector<Vertex> order;
    order.reserve(static_cast<std::size_t>(p));
    for (int step = 0; step < p; ++step) {
        Vertex best = -1;
        for (Vertex v = 0; v < p; ++v)
            if (order_pos[v] < 0 && (best < 0 || weight[v] > weight[best])) best = v;
        order_pos[best] = step;
        order.push_back(best);
        for (Vertex w : g.neighbors(best))
            if (order_pos[w] < 0) ++weight[w];
    }
    // Visiting order reversed is a perfect elimination ordering iff chordal:
    // for each v, its earlier-numbered neighbours must form a clique; it
    // suffices to check they are all adjacent to the latest of them.
    for (Vertex v : order) {
        Vertex parent = -1;
        for (Vertex w : g.neighbors(v))
            if (order_pos[w] < order_pos[v] && (parent < 0 || order_pos[w] > order_pos[parent])) parent = w;
        if (parent < 0) continue;
        for (Vertex w : g.neighbors(v))
            if (w != parent && order_pos[w] < order_pos[v] && !g.adjacent(w, parent)) return false;
    }
    return true;
}

bool has_forbidden_discrete_path(const MarkedGraph& g) {
    const auto discrete = g.discrete_vertices();
    const int p = g.n_vertices();
    for (Vertex source : discrete) {
        // Continuous vertices reachable from source through continuous vertices only.
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(p), 0);
        std::vector<Vertex> stack;
        for (Vertex w : g.neighbors(source))
            if (!g.is_discrete(w) && !seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        while (!stack.empty()) {
            const Vertex v = stack.back();
            stack.pop_back();
            for (Vertex w : g.neighbors(v)) {
                if (g.is_discrete(w)) {
                    if (w != source && !g.adjacent(source, w)) return true;
                } else if (!seen[w]) {
                    seen[w] = 1;
                    stack.push_back(w);
                }
            }
        }
    }
    return false;
}

}  // namespace

bool is_decomposable(const MarkedGraph& g) { return is_chordal(g) && !has_forbidden_discrete_path(g); }

double density(const MarkedGraph& g) {
    const double p = g.n_vertices();
    if (p < 2) throw ConfigError("density needs at least two vertices");
    return static_cast<double>(g.n_edges()) / (p * (p - 1.0) / 2.0);
}

void write_graph(std::ostream& out, const MarkedGraph& g) {
    if (!g.has_discrete_prefix()) throw ConfigError("graph file format requires discrete vertices first");
    out << "p " << g.n_vertices() << ' ' << g.n_discrete() << '\n';
    for (const auto& [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

std::string graph_to_string(const MarkedGraph& g) {
    std::ostringstream out;
    write_graph(out, g);
    return out.str();
}

MarkedGraph read_graph(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    int p = -1, n_discrete = -1;
    std::vector<Edge> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        if (p < 0) {
            std::string tag;
            if (!(fields >> tag >> p >> n_discrete) || tag != "p" || p < 0 || n_discrete < 0 || n_discrete > p)
                throw ParseError(source, line_no, "expected header 'p <n_vertices> <n_discrete>'");
            continue;
        }
        Vertex u, v;
        std::string rest;
        if (!(fields >> u >> v) || (fields >> rest)) throw ParseError(source, line_no, "expected 'u v'");
        if (u < 0 || v >= p || u >= v) throw ParseError(source, line_no, "edge must satisfy 0 <= u < v < p");
        edges.emplace_back(u, v);
    }
    if (p < 0) throw ParseError(source, line_no, "missing header line");
    return MarkedGraph::with_discrete_prefix(p, n_discrete, std::move(edges));
}

}  // namespace qpmix
