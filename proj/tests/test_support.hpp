#pragma once

// Random instance generators shared by the unit and acceptance suites.

#include <qnml/dag.hpp>
#include <qnml/dataset.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace qnml::testing {

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return static_cast<std::size_t>(rng() % n);
}

/// n variables with arities in [min_arity, max_arity], N rows of uniform
/// noise with optional dependence: each variable copies an earlier one with
/// probability `copy_prob` per row (keeps scores away from the all-noise case).
inline Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t N, std::size_t max_arity,
                              std::size_t min_arity = 1, double copy_prob = 0.3) {
    std::vector<std::size_t> arities(n);
    for (auto& a : arities) a = min_arity + uniform_index(rng, max_arity - min_arity + 1);
    std::vector<std::vector<Category>> rows(N, std::vector<Category>(n));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& row : rows)
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0 && u(rng) < copy_prob) {
                const auto src = uniform_index(rng, i);
                row[i] = static_cast<Category>(row[src] % arities[i]);
            } else {
                row[i] = static_cast<Category>(uniform_index(rng, arities[i]));
            }
        }
    return Dataset::from_rows({}, arities, rows);
}

/// Random DAG: random node order, each forward pair joined with probability p.
inline DagStructure random_dag(std::mt19937_64& rng, std::size_t n, double p) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<std::size_t>> parents(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (u(rng) < p) parents[order[b]].push_back(order[a]);
    return DagStructure(std::move(parents));
}

inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("qnml_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace qnml::testing
