#pragma once

// DAGs, equivalence-class patterns, structural Hamming distance and
// tournament-component analysis.

#include <qnml/error.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qnml {

/// Directed acyclic graph given by sorted parent lists. Acyclicity is
/// checked on construction.
class DagStructure {
public:
    DagStructure() = default;

    explicit DagStructure(std::size_t n) : parents_(n) {}

    DagStructure(std::vector<std::vector<std::size_t>> parents, std::vector<std::string> names = {})
        : parents_(std::move(parents)), names_(std::move(names)) {
        const std::size_t n = parents_.size();
        if (!names_.empty() && names_.size() != n) detail::data_error("DAG names and parent lists differ in length");
        for (std::size_t i = 0; i < n; ++i) {
            auto& p = parents_[i];
            std::sort(p.begin(), p.end());
            if (std::adjacent_find(p.begin(), p.end()) != p.end())
                detail::data_error("duplicate parent of node " + std::to_string(i));
            for (auto v : p) {
                if (v >= n) detail::data_error("parent index out of range");
                if (v == i) detail::data_error("node " + std::to_string(i) + " is its own parent");
            }
        }
        if (topological_order().size() != n) detail::data_error("graph contains a directed cycle");
    }

    /// From per-node parent bitmasks (n <= 64).
    static DagStructure from_masks(std::span<const std::uint64_t> masks) {
        std::vector<std::vector<std::size_t>> parents(masks.size());
        for (std::size_t i = 0; i < masks.size(); ++i)
            for (std::uint64_t m = masks[i]; m; m &= m - 1) parents[i].push_back(std::countr_zero(m));
        return DagStructure(std::move(parents));
    }

    std::size_t size() const noexcept { return parents_.size(); }
    const std::vector<std::size_t>& parents(std::size_t i) const { return parents_.at(i); }
    const std::vector<std::vector<std::size_t>>& all_parents() const noexcept { return parents_; }
    const std::vector<std::string>& names() const noexcept { return names_; }

    std::uint64_t parent_mask(std::size_t i) const {
        std::uint64_t m = 0;
        for (auto p : parents_.at(i)) m |= std::uint64_t{1} << p;
        return m;
    }

    bool has_arc(std::size_t a, std::size_t b) const {
        const auto& p = parents_.at(b);
        return std::binary_search(p.begin(), p.end(), a);
    }
    bool adjacent(std::size_t a, std::size_t b) const { return has_arc(a, b) || has_arc(b, a); }

    std::size_t arc_count() const {
        std::size_t c = 0;
        for (const auto& p : parents_) c += p.size();
        return c;
    }

    /// Kahn order with ties broken by smallest index; shorter than size() iff cyclic.
    std::vector<std::size_t> topological_order() const {
        const std::size_t n = parents_.size();
        std::vector<std::size_t> indeg(n), order;
        std::vector<std::vector<std::size_t>> children(n);
        for (std::size_t i = 0; i < n; ++i) {
            indeg[i] = parents_[i].size();
            for (auto p : parents_[i])
                if (p < n) children[p].push_back(i);
        }
        std::vector<bool> done(n, false);
        while (order.size() < n) {
            std::size_t pick = n;
            for (std::size_t i = 0; i < n; ++i)
                if (!done[i] && indeg[i] == 0) {
                    pick = i;
                    break;
                }
            if (pick == n) break;
            done[pick] = true;
            order.push_back(pick);
            for (auto c : children[pick]) --indeg[c];
        }
        return order;
    }

    DagStructure with_names(std::vector<std::string> names) const {
        DagStructure g = *this;
        if (!names.empty() && names.size() != size()) detail::data_error("DAG names and parent lists differ in length");
        g.names_ = std::move(names);
        return g;
    }

    friend bool operator==(const DagStructure& a, const DagStructure& b) { return a.parents_ == b.parents_; }

private:
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::string> names_;
};

// ---------------------------------------------------------------------------
// Covered arcs

/// True iff G_b = G_a ∪ {a} for the arc a -> b.
inline bool is_covered_arc(const DagStructure& g, std::size_t a, std::size_t b) {
    if (a >= g.size() || b >= g.size() || !g.has_arc(a, b))
        detail::data_error("arc " + std::to_string(a) + "->" + std::to_string(b) + " is not in the graph");
    std::vector<std::size_t> expect = g.parents(a);
    expect.push_back(a);
    std::sort(expect.begin(), expect.end());
    return expect == g.parents(b);
}

inline std::vector<std::pair<std::size_t, std::size_t>> covered_arcs(const DagStructure& g) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t b = 0; b < g.size(); ++b)
        for (auto a : g.parents(b))
            if (is_covered_arc(g, a, b)) out.emplace_back(a, b);
    return out;
}

inline DagStructure reverse_covered_arc(const DagStructure& g, std::size_t a, std::size_t b) {
    if (!is_covered_arc(g, a, b))
        detail::data_error("arc " + std::to_string(a) + "->" + std::to_string(b) + " is not covered");
    auto parents = g.all_parents();
    std::erase(parents[b], a);
    parents[a].push_back(b);
    return DagStructure(std::move(parents), g.names());
}

// ---------------------------------------------------------------------------
// Completed patterns

/// Completed partially directed graph: each node pair is absent, undirected,
/// or directed.
class Cpdag {
public:
    enum class Edge : std::uint8_t { none, undirected, forward, backward };  // forward: low -> high index

    explicit Cpdag(std::size_t n = 0) : n_(n), dir_(n * n, false), und_(n * n, false) {}

    std::size_t size() const noexcept { return n_; }

    bool directed(std::size_t a, std::size_t b) const { return dir_[a * n_ + b]; }
    bool undirected(std::size_t a, std::size_t b) const { return und_[a * n_ + b]; }
    bool adjacent(std::size_t a, std::size_t b) const {
        return directed(a, b) || directed(b, a) || undirected(a, b);
    }

    /// Status of the unordered pair {a, b}.
    Edge edge(std::size_t a, std::size_t b) const {
        if (a > b) std::swap(a, b);
        if (undirected(a, b)) return Edge::undirected;
        if (directed(a, b)) return Edge::forward;
        if (directed(b, a)) return Edge::backward;
        return Edge::none;
    }

    void set_undirected(std::size_t a, std::size_t b) {
        und_[a * n_ + b] = und_[b * n_ + a] = true;
        dir_[a * n_ + b] = dir_[b * n_ + a] = false;
    }
    void orient(std::size_t a, std::size_t b) {
        und_[a * n_ + b] = und_[b * n_ + a] = false;
        dir_[b * n_ + a] = false;
        dir_[a * n_ + b] = true;
    }

    std::vector<std::pair<std::size_t, std::size_t>> directed_edges() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = 0; b < n_; ++b)
                if (directed(a, b)) out.emplace_back(a, b);
        return out;
    }
    std::vector<std::pair<std::size_t, std::size_t>> undirected_edges() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t a = 0; a < n_; ++a)
            for (std::size_t b = a + 1; b < n_; ++b)
                if (undirected(a, b)) out.emplace_back(a, b);
        return out;
    }

    /// Applies Meek's rules R1-R4 until nothing changes; returns whether any
    /// edge was oriented.
    bool apply_orientation_rules() {
        bool any = false;
        for (bool changed = true; changed;) {
            changed = false;
            for (std::size_t a = 0; a < n_; ++a)
                for (std::size_t b = 0; b < n_; ++b)
                    if (a != b && undirected(a, b) && must_orient(a, b)) {
                        orient(a, b);
                        changed = any = true;
                    }
        }
        return any;
    }

    friend bool operator==(const Cpdag&, const Cpdag&) = default;

private:
    bool must_orient(std::size_t a, std::size_t b) const {
        for (std::size_t c = 0; c < n_; ++c) {
            if (c == a || c == b) continue;
            // R1: c -> a - b, c and b nonadjacent
            if (directed(c, a) && !adjacent(c, b)) return true;
            // R2: a -> c -> b with a - b
            if (directed(a, c) && directed(c, b)) return true;
        }
        for (std::size_t c = 0; c < n_; ++c) {
            if (c == a || c == b) continue;
            for (std::size_t d = c + 1; d < n_; ++d) {
                if (d == a || d == b) continue;
                // R3: a - c -> b, a - d -> b, c and d nonadjacent
                if (undirected(a, c) && undirected(a, d) && directed(c, b) && directed(d, b) && !adjacent(c, d))
                    return true;
            }
        }
        for (std::size_t c = 0; c < n_; ++c) {
            if (c == a || c == b || !undirected(a, c)) continue;
            for (std::size_t d = 0; d < n_; ++d) {
                if (d == a || d == b || d == c) continue;
                // R4: a - c -> d -> b, c and b nonadjacent, a and d adjacent
                if (directed(c, d) && directed(d, b) && !adjacent(c, b) && adjacent(a, d)) return true;
            }
        }
        return false;
    }

    std::size_t n_;
    std::vector<bool> dir_;
    std::vector<bool> und_;
};

/// Pattern of the equivalence class of g: skeleton, v-structure arcs
/// directed, then orientation rules to fixpoint.
inline Cpdag to_cpdag(const DagStructure& g) {
    const std::size_t n = g.size();
    Cpdag p(n);
    for (std::size_t b = 0; b < n; ++b)
        for (auto a : g.parents(b)) p.set_undirected(a, b);
    for (std::size_t c = 0; c < n; ++c) {
        const auto& pa = g.parents(c);
        for (std::size_t x = 0; x < pa.size(); ++x)
            for (std::size_t y = x + 1; y < pa.size(); ++y)
                if (!g.adjacent(pa[x], pa[y])) {
                    p.orient(pa[x], c);
                    p.orient(pa[y], c);
                }
    }
    p.apply_orientation_rules();
    return p;
}

inline std::size_t shd(const Cpdag& a, const Cpdag& b) {
    if (a.size() != b.size()) detail::data_error("SHD needs graphs over the same number of nodes");
    std::size_t d = 0;
    for (std::size_t x = 0; x < a.size(); ++x)
        for (std::size_t y = x + 1; y < a.size(); ++y)
            if (a.edge(x, y) != b.edge(x, y)) ++d;
    return d;
}

/// Structural Hamming distance between the completed patterns of two DAGs.
inline std::size_t shd(const DagStructure& g1, const DagStructure& g2) {
    if (g1.size() != g2.size()) detail::data_error("SHD needs graphs over the same number of nodes");
    return shd(to_cpdag(g1), to_cpdag(g2));
}

inline bool markov_equivalent(const DagStructure& g1, const DagStructure& g2) {
    return g1.size() == g2.size() && to_cpdag(g1) == to_cpdag(g2);
}

// ---------------------------------------------------------------------------
// Components and tournaments

/// Connected components of the skeleton, each sorted, ordered by smallest member.
inline std::vector<std::vector<std::size_t>> connected_components(const DagStructure& g) {
    const std::size_t n = g.size();
    std::vector<std::size_t> root(n);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](std::size_t x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    for (std::size_t b = 0; b < n; ++b)
        for (auto a : g.parents(b)) {
            const auto ra = find(a), rb = find(b);
            if (ra != rb) root[std::max(ra, rb)] = std::min(ra, rb);
        }
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = find(i);
        if (slot[r] == n) {
            slot[r] = out.size();
            out.emplace_back();
        }
        out[slot[r]].push_back(i);
    }
    return out;
}

/// True iff every connected component induces a complete DAG.
inline bool is_tournament_component_dag(const DagStructure& g) {
    for (const auto& comp : connected_components(g))
        for (std::size_t x = 0; x < comp.size(); ++x)
            for (std::size_t y = x + 1; y < comp.size(); ++y)
                if (!g.adjacent(comp[x], comp[y])) return false;
    return true;
}

/// Number of labeled n-node DAGs whose components are tournaments
/// (OEIS A000262): Σ over integer partitions of n of n! / Π_j m_j!, where
/// m_j are the multiplicities of the distinct part sizes.
inline std::uint64_t count_tournament_component_dags(std::size_t n) {
    if (n > 12) detail::resource_error("tournament-component count limited to n <= 12");
    auto factorial = [](std::size_t k) {
        std::uint64_t f = 1;
        for (std::size_t i = 2; i <= k; ++i) f *= i;
        return f;
    };
    const std::uint64_t nfact = factorial(n);
    std::uint64_t total = 0;
    // parts in nonincreasing order
    std::vector<std::size_t> parts;
    auto visit = [&](auto&& self, std::size_t remaining, std::size_t max_part) -> void {
        if (remaining == 0) {
            std::uint64_t denom = 1;
            for (std::size_t s = 0; s < parts.size();) {
                std::size_t e = s;
                while (e < parts.size() && parts[e] == parts[s]) ++e;
                denom *= factorial(e - s);
                s = e;
            }
            total += nfact / denom;
            return;
        }
        for (std::size_t p = std::min(remaining, max_part); p >= 1; --p) {
            parts.push_back(p);
            self(self, remaining - p, p);
            parts.pop_back();
        }
    };
    visit(visit, n, n);
    return total;
}

/// Every labeled DAG on n <= 5 nodes, as per-node parent bitmasks, in
/// increasing lexicographic order of the mask vector.
inline std::vector<std::vector<std::uint64_t>> enumerate_dag_masks(std::size_t n) {
    if (n > 5) detail::resource_error("DAG enumeration limited to n <= 5");
    std::vector<std::vector<std::uint64_t>> out;
    std::vector<std::uint64_t> masks(n, 0);
    const std::uint64_t full = (std::uint64_t{1} << n) - 1;
    auto acyclic = [&]() {
        std::uint64_t placed = 0;
        for (std::size_t round = 0; round < n; ++round) {
            bool progress = false;
            for (std::size_t i = 0; i < n; ++i)
                if (!(placed >> i & 1) && (masks[i] & ~placed) == 0) {
                    placed |= std::uint64_t{1} << i;
                    progress = true;
                }
            if (!progress) break;
        }
        return placed == full;
    };
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (i == n) {
            if (acyclic()) out.push_back(masks);
            return;
        }
        for (std::uint64_t m = 0; m <= full; ++m) {
            if (m >> i & 1) continue;
            masks[i] = m;
            self(self, i + 1);
        }
        masks[i] = 0;
    };
    rec(rec, 0);
    return out;
}

inline std::vector<DagStructure> enumerate_dags(std::size_t n) {
    std::vector<DagStructure> out;
    for (const auto& m : enumerate_dag_masks(n)) out.push_back(DagStructure::from_masks(m));
    return out;
}

/// All members of g's equivalence class (n <= 5).
inline std::vector<DagStructure> equivalence_class(const DagStructure& g) {
    const auto target = to_cpdag(g);
    std::vector<DagStructure> out;
    for (auto& d : enumerate_dags(g.size()))
        if (to_cpdag(d) == target) out.push_back(std::move(d));
    return out;
}

/// Σ_i q_i (r_i - 1) with full parent configuration counts.
inline std::uint64_t parameter_count(const DagStructure& g, std::span<const std::size_t> arities) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::uint64_t q = 1;
        for (auto p : g.parents(i)) q *= arities[p];
        total += q * (arities[i] - 1);
    }
    return total;
}

}  // namespace qnml
