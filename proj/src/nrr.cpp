#include "qpmix/nrr.hpp"

#include "qpmix/errors.hpp"
#include "qpmix/format.hpp"
#include "qpmix/parallel.hpp"
#include "qpmix/rng.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace qpmix {

std::uint64_t binomial(std::uint64_t m, std::uint64_t q) {
    if (q > m) return 0;
    q = std::min(q, m - q);
    std::uint64_t result = 1;
    for (std::uint64_t k = 1; k <= q; ++k) {
        const std::uint64_t factor = m - q + k;
        // result * factor / k stays exact: result * factor is divisible by k.
        if (result > std::numeric_limits<std::uint64_t>::max() / factor) return std::numeric_limits<std::uint64_t>::max();
        result = result * factor / k;
    }
    return result;
}

std::vector<Vertex> conditioning_candidates(const MixedDataset& d, Vertex a, Vertex b, bool restrict_continuous) {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < d.p(); ++v)
        if (v != a && v != b && !(restrict_continuous && d.is_discrete(v))) out.push_back(v);
    return out;
}

std::vector<std::vector<Vertex>> draw_conditioning_sets(const std::vector<Vertex>& candidates, int q, int n_subsets,
                                                        std::uint64_t seed) {
    const auto m = candidates.size();
    if (q < 0 || static_cast<std::size_t>(q) > m)
        throw ConfigError("order q=" + std::to_string(q) + " exceeds the " + std::to_string(m) +
                          " available conditioning vertices");
    if (n_subsets < 1) throw ConfigError("n_subsets must be positive");
    std::vector<std::vector<Vertex>> sets;
    if (binomial(m, static_cast<std::uint64_t>(q)) <= static_cast<std::uint64_t>(n_subsets)) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(q));
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        for (;;) {
            std::vector<Vertex> s;
            for (std::size_t k : idx) s.push_back(candidates[k]);
            sets.push_back(std::move(s));
            // Next combination in lexicographic order.
            std::size_t k = idx.size();
            while (k > 0 && idx[k - 1] == m - idx.size() + (k - 1)) --k;
            if (k == 0) break;
            ++idx[k - 1];
            for (std::size_t j = k; j < idx.size(); ++j) idx[j] = idx[j - 1] + 1;
        }
        return sets;
    }
    Rng rng(seed);
    sets.reserve(static_cast<std::size_t>(n_subsets));
    for (int s = 0; s < n_subsets; ++s) {
        // Floyd's algorithm: uniform q-subset of {0, ..., m-1}.
        std::set<std::size_t> chosen;
        for (std::size_t j = m - static_cast<std::size_t>(q); j < m; ++j) {
            const auto t = static_cast<std::size_t>(rng.uniform_int(j + 1));
            if (!chosen.insert(t).second) chosen.insert(j);
        }
        std::vector<Vertex> subset;
        for (std::size_t k : chosen) subset.push_back(candidates[k]);
        sets.push_back(std::move(subset));
    }
    return sets;
}

std::uint64_t pair_seed(std::uint64_t master, Vertex a, Vertex b) {
    return derive_seed(master, {static_cast<std::uint64_t>(std::min(a, b)), static_cast<std::uint64_t>(std::max(a, b))});
}

NrrPairResult nrr_pair(const MixedDataset& d, Vertex a, Vertex b, const NrrOptions& opt) {
    if (a == b) throw ConfigError("nrr_pair needs two distinct vertices");
    if (a < 0 || b < 0 || a >= d.p() || b >= d.p()) throw ConfigError("vertex index out of range");
    if (d.is_discrete(a) && d.is_discrete(b)) throw DiscretePairError("discrete-discrete pairs are not tested");
    if (!(opt.q + 2 < d.n()))
        throw ConfigError("order q=" + std::to_string(opt.q) + " requires q + 2 < n (n=" + std::to_string(d.n()) + ")");
    const auto sets = draw_conditioning_sets(conditioning_candidates(d, a, b, opt.restrict_continuous), opt.q,
                                             opt.n_subsets, pair_seed(opt.seed, a, b));
    NrrPairResult r;
    int accepted = 0;
    for (const auto& s : sets) {
        ++r.drawn;
        try {
            const TestResult t = ci_test(d, a, b, s, opt.alpha, opt.test);
            ++r.feasible;
            if (!t.reject) ++accepted;
        } catch (const InfeasibleTestError&) {
        }
    }
    if (r.feasible == 0)
        throw NoFeasibleSubsetError("no feasible conditioning set for pair (" + std::to_string(a) + ", " +
                                    std::to_string(b) + ")");
    r.nrr = static_cast<double>(accepted) / r.feasible;
    return r;
}

NrrMatrix::NrrMatrix(std::vector<Mark> marks, NrrOptions options)
    : marks_(std::move(marks)),
      values_(marks_.size() * marks_.size(), std::numeric_limits<double>::quiet_NaN()),
      feasible_(marks_.size() * marks_.size(), 0),
      options_(options),
      q_values_{options.q} {}

bool NrrMatrix::defined(Vertex a, Vertex b) const { return !std::isnan(values_[at(a, b)]); }

double NrrMatrix::value(Vertex a, Vertex b) const { return values_[at(a, b)]; }

int NrrMatrix::feasible(Vertex a, Vertex b) const { return feasible_[at(a, b)]; }

void NrrMatrix::set(Vertex a, Vertex b, double nrr, int feasible) {
    if (a == b) throw ConfigError("diagonal entries are undefined");
    if (is_discrete(a) && is_discrete(b)) throw DiscretePairError("discrete-discrete entries are undefined");
    if (!(nrr >= 0.0 && nrr <= 1.0)) throw DomainError("non-rejection rate outside [0, 1]");
    values_[at(a, b)] = values_[at(b, a)] = nrr;
    feasible_[at(a, b)] = feasible_[at(b, a)] = feasible;
}

std::size_t NrrMatrix::n_defined() const {
    std::size_t count = 0;
    for (Vertex a = 0; a < p(); ++a)
        for (Vertex b = a + 1; b < p(); ++b) count += defined(a, b);
    return count;
}

std::vector<Edge> admissible_pairs(const std::vector<Mark>& marks) {
    std::vector<Edge> pairs;
    const auto p = static_cast<Vertex>(marks.size());
    for (Vertex a = 0; a < p; ++a)
        for (Vertex b = a + 1; b < p; ++b)
            if (!(marks[a] == Mark::Discrete && marks[b] == Mark::Discrete)) pairs.emplace_back(a, b);
    return pairs;
}

NrrMatrix nrr_matrix(const MixedDataset& d, const NrrOptions& opt) {
    if (!(opt.q + 2 < d.n()))
        throw ConfigError("order q=" + std::to_string(opt.q) + " requires q + 2 < n (n=" + std::to_string(d.n()) + ")");
    if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw RangeError("alpha must lie in (0, 1)");
    const auto pairs = admissible_pairs(d.marks());
    std::vector<NrrPairResult> results(pairs.size());
    std::vector<char> ok(pairs.size(), 0);
    parallel_for(pairs.size(), opt.threads, [&](std::size_t k) {
        try {
            results[k] = nrr_pair(d, pairs[k].first, pairs[k].second, opt);
            ok[k] = 1;
        } catch (const NoFeasibleSubsetError&) {
        }
    });
    NrrMatrix m(d.marks(), opt);
    for (std::size_t k = 0; k < pairs.size(); ++k)
        if (ok[k]) m.set(pairs[k].first, pairs[k].second, results[k].nrr, results[k].feasible);
    return m;
}

NrrMatrix average_nrr(const std::vector<NrrMatrix>& ms) {
    if (ms.empty()) throw ConfigError("average_nrr needs at least one matrix");
    NrrMatrix out(ms.front().marks_, ms.front().options_);
    out.q_values_.clear();
    for (const auto& m : ms) {
        if (m.marks_ != out.marks_) throw DimensionMismatchError("NRR matrices differ in size or marks");
        out.q_values_.insert(out.q_values_.end(), m.q_values_.begin(), m.q_values_.end());
    }
    for (Vertex a = 0; a < out.p(); ++a)
        for (Vertex b = a + 1; b < out.p(); ++b) {
            double sum = 0.0;
            int count = 0, feasible = 0;
            for (const auto& m : ms)
                if (m.defined(a, b)) {
                    sum += m.value(a, b);
                    feasible += m.feasible(a, b);
                    ++count;
                }
            if (count > 0) out.set(a, b, sum / count, feasible);
        }
    return out;
}

void write_nrr(std::ostream& out, const NrrMatrix& m) {
    const int n_disc = static_cast<int>(std::count(m.marks().begin(), m.marks().end(), Mark::Discrete));
    for (int v = 0; v < m.p(); ++v)
        if ((v < n_disc) != m.is_discrete(v)) throw ConfigError("NRR file format requires discrete vertices first");
    const auto& o = m.options();
    out << "# format\tqpmix-nrr-v1\n";
    out << "# p\t" << m.p() << '\n';
    out << "# n_discrete\t" << n_disc << '\n';
    out << "# q\t" << join(m.q_values(), ",") << '\n';
    out << "# n_subsets\t" << o.n_subsets << '\n';
    out << "# alpha\t" << format_double(o.alpha) << '\n';
    out << "# restrict_continuous\t" << (o.restrict_continuous ? 1 : 0) << '\n';
    out << "# test\t" << to_string(o.test) << '\n';
    out << "# seed\t" << o.seed << '\n';
    out << "# pair_seed\tsplitmix64 chain over (seed, min(u,v), max(u,v))\n";
    out << "u\tv\tnrr\tfeasible\n";
    for (Vertex a = 0; a < m.p(); ++a)
        for (Vertex b = a + 1; b < m.p(); ++b)
            if (m.defined(a, b)) out << a << '\t' << b << '\t' << format_double(m.value(a, b)) << '\t' << m.feasible(a, b) << '\n';
}

std::string nrr_to_string(const NrrMatrix& m) {
    std::ostringstream out;
    write_nrr(out, m);
    return out.str();
}

NrrMatrix read_nrr(std::istream& in, const std::string& source) {
    std::map<std::string, std::string> meta;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    NrrMatrix m;
    auto need = [&](const std::string& key) -> const std::string& {
        const auto it = meta.find(key);
        if (it == meta.end()) throw ParseError(source, line_no, "missing metadata '" + key + "'");
        return it->second;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const auto tab = line.find('\t');
            if (tab == std::string::npos) throw ParseError(source, line_no, "metadata line without a tab");
            meta[line.substr(2, tab - 2)] = line.substr(tab + 1);
            continue;
        }
        if (!header_seen) {
            if (line != "u\tv\tnrr\tfeasible") throw ParseError(source, line_no, "expected column header 'u v nrr feasible'");
            if (need("format") != "qpmix-nrr-v1") throw ParseError(source, line_no, "unsupported format");
            try {
                const int p = std::stoi(need("p"));
                const int n_disc = std::stoi(need("n_discrete"));
                if (p < 0 || n_disc < 0 || n_disc > p) throw ParseError(source, line_no, "bad p / n_discrete");
                std::vector<Mark> marks(static_cast<std::size_t>(p), Mark::Continuous);
                std::fill_n(marks.begin(), n_disc, Mark::Discrete);
                NrrOptions o;
                o.n_subsets = std::stoi(need("n_subsets"));
                o.alpha = std::stod(need("alpha"));
                o.restrict_continuous = need("restrict_continuous") == "1";
                o.test = parse_test_kind(need("test"));
                o.seed = std::stoull(need("seed"));
                m = NrrMatrix(std::move(marks), o);
                m.q_values_.clear();
                std::istringstream qs(need("q"));
                std::string item;
                while (std::getline(qs, item, ',')) m.q_values_.push_back(std::stoi(item));
                if (!m.q_values_.empty()) m.options_.q = m.q_values_.front();
            } catch (const std::logic_error&) {
                throw ParseError(source, line_no, "malformed metadata value");
            }
            header_seen = true;
            continue;
        }
        std::istringstream fields(line);
        Vertex u, v;
        double value;
        int feasible;
        std::string rest;
        if (!(fields >> u >> v >> value >> feasible) || (fields >> rest))
            throw ParseError(source, line_no, "expected 'u v nrr feasible'");
        if (u < 0 || v >= m.p() || u >= v) throw ParseError(source, line_no, "pair must satisfy 0 <= u < v < p");
        try {
            m.set(u, v, value, feasible);
        } catch (const Error& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    if (!header_seen) throw ParseError(source, line_no, "missing column header");
    return m;
}

}  // namespace qpmix
