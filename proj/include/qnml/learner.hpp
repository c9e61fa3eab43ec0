#pragma once

// Globally optimal structure learning by dynamic programming over variable
// subsets, plus an exhaustive oracle for small n.

#include <qnml/dag.hpp>
#include <qnml/dataset.hpp>
#include <qnml/scores.hpp>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

namespace qnml {

struct LearnOptions {
    std::optional<std::size_t> max_parents;
    unsigned threads = 1;
    std::uint64_t memory_budget = std::uint64_t{4} << 30;  // bytes
};

inline constexpr std::size_t max_vars_uncapped = 20;
inline constexpr std::size_t max_vars_capped = 31;

/// Local scores of every (child, parent set) pair, parent sets encoded as
/// bitmasks over the other n-1 variables (bit i of the full mask removed).
class LocalScoreTable {
public:
    LocalScoreTable() = default;
    LocalScoreTable(std::size_t n, std::optional<std::size_t> max_parents)
        : n_(n), max_parents_(max_parents), scores_(n, std::vector<double>(std::size_t{1} << (n - 1), unset)) {}

    static constexpr double unset = std::numeric_limits<double>::quiet_NaN();

    std::size_t num_vars() const noexcept { return n_; }
    std::optional<std::size_t> max_parents() const noexcept { return max_parents_; }

    static std::uint64_t compress(std::size_t child, std::uint64_t full_mask) {
        const std::uint64_t low = (std::uint64_t{1} << child) - 1;
        return (full_mask & low) | ((full_mask >> (child + 1)) << child);
    }
    static std::uint64_t expand(std::size_t child, std::uint64_t compact) {
        const std::uint64_t low = (std::uint64_t{1} << child) - 1;
        return (compact & low) | ((compact >> child) << (child + 1));
    }

    bool allowed(std::uint64_t mask) const {
        return !max_parents_ || static_cast<std::size_t>(std::popcount(mask)) <= *max_parents_;
    }

    /// Score of child with the given full-width parent mask.
    double at(std::size_t child, std::uint64_t full_mask) const { return scores_[child][compress(child, full_mask)]; }
    double& compact(std::size_t child, std::uint64_t c) { return scores_[child][c]; }
    const std::vector<double>& row(std::size_t child) const { return scores_[child]; }
    std::vector<double>& row(std::size_t child) { return scores_[child]; }

    std::size_t entries() const {
        std::size_t c = 0;
        for (const auto& r : scores_)
            for (double v : r)
                if (!std::isnan(v)) ++c;
        return c;
    }

private:
    std::size_t n_ = 0;
    std::optional<std::size_t> max_parents_;
    std::vector<std::vector<double>> scores_;
};

namespace detail {

inline std::vector<std::size_t> mask_to_list(std::uint64_t m) {
    std::vector<std::size_t> out;
    for (; m; m &= m - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
    return out;
}

inline void check_learn_size(std::size_t n, const LearnOptions& opt) {
    if (n == 0) data_error("no variables to learn over");
    if (!opt.max_parents && n > max_vars_uncapped)
        resource_error(std::to_string(n) + " variables exceed the limit of " + std::to_string(max_vars_uncapped) +
                       " without a parent cap");
    if (n > max_vars_capped)
        resource_error(std::to_string(n) + " variables exceed the limit of " + std::to_string(max_vars_capped));
    // local/best-parent scores + best-parent masks + sink table
    const double bytes = static_cast<double>(n) * std::ldexp(1.0, static_cast<int>(n) - 1) * 12.0 +
                         std::ldexp(1.0, static_cast<int>(n)) * 9.0;
    if (bytes > static_cast<double>(opt.memory_budget))
        resource_error("structure search over " + std::to_string(n) + " variables needs ~" +
                       std::to_string(static_cast<std::uint64_t>(bytes / (1 << 20))) + " MiB, over budget");
}

}  // namespace detail

inline LocalScoreTable compute_local_scores(const Dataset& data, const ScoreConfig& cfg, const LearnOptions& opt = {}) {
    const std::size_t n = data.num_vars();
    detail::check_learn_size(n, opt);
    LocalScoreTable table(n, opt.max_parents);
    const LocalScorer scorer(data, cfg);
    const std::uint64_t subsets = std::uint64_t{1} << (n - 1);

    auto work = [&](std::size_t child) {
        for (std::uint64_t c = 0; c < subsets; ++c) {
            const std::uint64_t full = LocalScoreTable::expand(child, c);
            if (!table.allowed(full)) continue;
            table.compact(child, c) = scorer(child, detail::mask_to_list(full));
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < n; i += workers) work(i);
            });
    }
    return table;
}

struct LearnResult {
    DagStructure network;
    double total_score = 0.0;
    std::vector<double> per_variable;
    double elapsed_seconds = 0.0;
    std::uint64_t structures_evaluated = 0;  // brute force only
};

namespace detail {

/// Strict preference between two parent sets of the same child: higher
/// score, then fewer parents, then smaller mask.
inline bool better_parent_set(double sa, std::uint64_t ma, double sb, std::uint64_t mb) {
    if (sa != sb) return sa > sb;
    const int pa = std::popcount(ma), pb = std::popcount(mb);
    if (pa != pb) return pa < pb;
    return ma < mb;
}

template <typename LocalFn>
LearnResult finish(const LocalFn& local, DagStructure g, const Dataset& data,
                   std::chrono::steady_clock::time_point start) {
    LearnResult res;
    for (std::size_t i = 0; i < g.size(); ++i) {
        res.per_variable.push_back(local(i, g.parent_mask(i)));
        res.total_score += res.per_variable.back();
    }
    res.network = g.with_names(data.names());
    res.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace detail

/// Exact search from a precomputed table: best parents within every
/// candidate set, best sink for every subset, then backtrack. The table's
/// rows are overwritten in place with best-parent scores.
inline DagStructure search_exact(LocalScoreTable table) {
    const std::size_t n = table.num_vars();
    const std::uint64_t half = std::uint64_t{1} << (n - 1);
    constexpr double ninf = -std::numeric_limits<double>::infinity();

    // after this pass row i holds, for each compact set C, the score of the
    // best parent set of i within C; best_mask holds that set
    std::vector<std::vector<std::uint32_t>> best_mask(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& bs = table.row(i);
        auto& bm = best_mask[i];
        bm.assign(half, 0);
        for (std::uint64_t c = 0; c < half; ++c) {
            double s = std::isnan(bs[c]) ? ninf : bs[c];
            std::uint64_t m = c;
            for (std::uint64_t rest = c; rest; rest &= rest - 1) {
                const std::uint64_t sub = c & ~(rest & (~rest + 1));
                if (detail::better_parent_set(bs[sub], bm[sub], s, m)) {
                    s = bs[sub];
                    m = bm[sub];
                }
            }
            bs[c] = s;
            bm[c] = static_cast<std::uint32_t>(m);
        }
    }

    const std::uint64_t all = (std::uint64_t{1} << n) - 1;
    std::vector<double> best(all + 1, ninf);
    std::vector<std::uint8_t> sink(all + 1, 0);
    best[0] = 0.0;
    for (std::uint64_t w = 1; w <= all; ++w) {
        for (std::uint64_t rest = w; rest; rest &= rest - 1) {
            const std::size_t s = static_cast<std::size_t>(std::countr_zero(rest));
            const std::uint64_t others = w & ~(std::uint64_t{1} << s);
            const double cand = best[others] + table.row(s)[LocalScoreTable::compress(s, others)];
            if (cand > best[w]) {
                best[w] = cand;
                sink[w] = static_cast<std::uint8_t>(s);
            }
        }
    }

    std::vector<std::uint64_t> masks(n, 0);
    for (std::uint64_t w = all; w;) {
        const std::size_t s = sink[w];
        const std::uint64_t others = w & ~(std::uint64_t{1} << s);
        masks[s] = LocalScoreTable::expand(s, best_mask[s][LocalScoreTable::compress(s, others)]);
        w = others;
    }
    return DagStructure::from_masks(masks);
}

inline LearnResult learn_exact(const Dataset& data, const ScoreConfig& cfg, const LearnOptions& opt = {}) {
    const auto start = std::chrono::steady_clock::now();
    auto g = search_exact(compute_local_scores(data, cfg, opt));
    const LocalScorer scorer(data, cfg);
    auto local = [&](std::size_t i, std::uint64_t mask) { return scorer(i, detail::mask_to_list(mask)); };
    return detail::finish(local, std::move(g), data, start);
}

/// Exhaustive search over all labeled DAGs (n <= 5). Ties go to fewer arcs,
/// then to the lexicographically smallest parent-mask vector.
inline LearnResult learn_bruteforce(const Dataset& data, const ScoreConfig& cfg, const LearnOptions& opt = {}) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = data.num_vars();
    if (n > 5) detail::resource_error("brute-force structure search limited to n <= 5");
    const auto table = compute_local_scores(data, cfg, opt);
    const auto dags = enumerate_dag_masks(n);

    std::uint64_t evaluated = 0;
    const std::vector<std::uint64_t>* best = nullptr;
    double best_total = -std::numeric_limits<double>::infinity();
    std::size_t best_arcs = 0;
    for (const auto& masks : dags) {
        bool ok = true;
        std::size_t arcs = 0;
        for (auto m : masks) {
            ok = ok && table.allowed(m);
            arcs += static_cast<std::size_t>(std::popcount(m));
        }
        if (!ok) continue;
        ++evaluated;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += table.at(i, masks[i]);
        if (!best || total > best_total || (total == best_total && arcs < best_arcs)) {
            best = &masks;
            best_total = total;
            best_arcs = arcs;
        }
    }
    auto local = [&](std::size_t i, std::uint64_t mask) { return table.at(i, mask); };
    auto res = detail::finish(local, DagStructure::from_masks(*best), data, start);
    res.structures_evaluated = evaluated;
    return res;
}

}  // namespace qnml
