#pragma once

// Parameterized Bayesian networks: CPT fitting, ancestral sampling and
// predictive log-loss.

#include <qnml/dag.hpp>
#include <qnml/dataset.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace qnml {

/// DAG plus one q_i x r_i CPT per variable, rows in the mixed-radix parent
/// configuration order of `parent_configuration`.
struct BayesianNetwork {
    DagStructure structure;
    std::vector<std::string> names;
    std::vector<std::size_t> arities;
    std::vector<std::vector<std::string>> labels;  ///< per variable, one per category
    std::vector<std::vector<double>> cpts;         ///< per variable, row-major q_i x r_i

    std::size_t size() const noexcept { return arities.size(); }

    std::size_t configurations(std::size_t i) const {
        std::size_t q = 1;
        for (auto p : structure.parents(i)) q *= arities[p];
        return q;
    }

    double theta(std::size_t i, std::size_t j, std::size_t k) const { return cpts[i][j * arities[i] + k]; }

    std::size_t config_of(std::size_t i, std::span<const Category> row) const {
        std::size_t j = 0;
        for (auto p : structure.parents(i)) j = j * arities[p] + row[p];
        return j;
    }

    /// Throws DataError unless every CPT has the right shape and every row
    /// is a probability vector (sum within 1e-9 of 1).
    void validate() const {
        if (structure.size() != size() || names.size() != size())
            detail::data_error("network parts disagree on the number of variables");
        if (cpts.size() != size()) detail::data_error("network has no CPTs");
        for (std::size_t i = 0; i < size(); ++i) {
            const std::size_t q = configurations(i), r = arities[i];
            if (cpts[i].size() != q * r)
                detail::data_error("CPT of '" + names[i] + "' must have " + std::to_string(q) + " rows of " +
                                   std::to_string(r) + " entries");
            for (std::size_t j = 0; j < q; ++j) {
                double sum = 0.0;
                for (std::size_t k = 0; k < r; ++k) {
                    const double v = theta(i, j, k);
                    if (!(v >= 0.0)) detail::data_error("negative probability in CPT of '" + names[i] + "'");
                    sum += v;
                }
                if (std::abs(sum - 1.0) > 1e-9)
                    detail::data_error("CPT row " + std::to_string(j) + " of '" + names[i] + "' does not sum to 1");
            }
        }
    }
};

enum class ParamRule { ml, snml, bpp };

inline std::string_view to_string(ParamRule p) {
    switch (p) {
        case ParamRule::ml: return "ml";
        case ParamRule::snml: return "snml";
        case ParamRule::bpp: return "bpp";
    }
    return "?";
}

inline ParamRule parse_param_rule(std::string_view s) {
    if (s == "ml") return ParamRule::ml;
    if (s == "snml") return ParamRule::snml;
    if (s == "bpp") return ParamRule::bpp;
    detail::data_error("unknown parameter rule '" + std::string(s) + "'");
}

/// e(n) = ((n+1)/n)^n with e(0) = 1.
inline double snml_e(double n) { return n > 0.0 ? std::exp(n * std::log1p(1.0 / n)) : 1.0; }

namespace detail {

template <typename RowRule>
BayesianNetwork fit_with(const Dataset& data, const DagStructure& g, RowRule rule) {
    if (g.size() != data.num_vars()) data_error("graph and data differ in variable count");
    BayesianNetwork net;
    net.structure = g.with_names(data.names());
    net.names = data.names();
    net.arities = data.arities();
    for (std::size_t i = 0; i < data.num_vars(); ++i) net.labels.push_back(data.labels(i));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto tab = contingency(data, i, g.parents(i));
        const auto counts = tab.dense();
        const std::size_t r = tab.r;
        std::vector<double> cpt(counts.size() * r);
        std::vector<double> w(r);
        for (std::size_t j = 0; j < counts.size(); ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < r; ++k) sum += w[k] = rule(counts[j][k], counts[j], r, tab.q);
            for (std::size_t k = 0; k < r; ++k) cpt[j * r + k] = sum > 0.0 ? w[k] / sum : 1.0 / static_cast<double>(r);
        }
        net.cpts.push_back(std::move(cpt));
    }
    return net;
}

}  // namespace detail

/// θ_ijk = N_ijk / N_ij; unobserved configurations get uniform rows.
inline BayesianNetwork fit_ml(const Dataset& data, const DagStructure& g) {
    return detail::fit_with(data, g, [](std::uint32_t c, const auto&, std::size_t, std::uint64_t) {
        return static_cast<double>(c);
    });
}

/// θ_ijk ∝ e(N_ijk) (N_ijk + 1).
inline BayesianNetwork fit_snml(const Dataset& data, const DagStructure& g) {
    return detail::fit_with(data, g, [](std::uint32_t c, const auto&, std::size_t, std::uint64_t) {
        const double n = c;
        return snml_e(n) * (n + 1.0);
    });
}

/// θ_ijk ∝ N_ijk + 1 / (r_i q_i).
inline BayesianNetwork fit_bpp(const Dataset& data, const DagStructure& g) {
    return detail::fit_with(data, g, [](std::uint32_t c, const auto&, std::size_t r, std::uint64_t q) {
        return static_cast<double>(c) + 1.0 / (static_cast<double>(r) * static_cast<double>(q));
    });
}

inline BayesianNetwork fit(const Dataset& data, const DagStructure& g, ParamRule rule) {
    switch (rule) {
        case ParamRule::ml: return fit_ml(data, g);
        case ParamRule::snml: return fit_snml(data, g);
        case ParamRule::bpp: return fit_bpp(data, g);
    }
    return fit_ml(data, g);
}

/// Σ_i ln θ_{i, j(row), x_i}.
inline double log_predict(const BayesianNetwork& net, std::span<const Category> row) {
    if (row.size() != net.size()) detail::data_error("row width does not match the network");
    double s = 0.0;
    for (std::size_t i = 0; i < net.size(); ++i) {
        if (row[i] >= net.arities[i]) detail::data_error("value out of range for '" + net.names[i] + "'");
        s += std::log(net.theta(i, net.config_of(i, row), row[i]));
    }
    return s;
}

inline double mean_test_loglik(const BayesianNetwork& net, const Dataset& test) {
    if (test.num_vars() != net.size() || test.arities() != net.arities)
        detail::data_error("test data arities are incompatible with the network");
    if (test.num_rows() == 0) detail::data_error("mean log-likelihood of an empty test set is undefined");
    double s = 0.0;
    for (std::size_t t = 0; t < test.num_rows(); ++t) s += log_predict(net, test.row(t));
    return s / static_cast<double>(test.num_rows());
}

/// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Ancestral sampling. The stream is std::mt19937_64 seeded with `seed`;
/// rows are generated one after another, and within a row variables are
/// drawn in topological order (ties by index), one 64-bit draw each, by
/// inverse CDF over the CPT row.
inline Dataset sample(const BayesianNetwork& net, std::size_t N, std::uint64_t seed) {
    net.validate();
    const std::size_t n = net.size();
    const auto order = net.structure.topological_order();
    std::mt19937_64 rng(seed);
    std::vector<Category> cells(n * N);
    std::vector<Category> row(n, 0);
    for (std::size_t t = 0; t < N; ++t) {
        for (auto i : order) {
            const std::size_t j = net.config_of(i, row);
            const std::size_t r = net.arities[i];
            const double u = unit_uniform(rng);
            double cum = 0.0;
            std::size_t pick = r;
            std::size_t last_positive = 0;
            for (std::size_t k = 0; k < r; ++k) {
                const double p = net.theta(i, j, k);
                if (p > 0.0) last_positive = k;
                cum += p;
                if (u < cum && p > 0.0) {
                    pick = k;
                    break;
                }
            }
            row[i] = static_cast<Category>(pick < r ? pick : last_positive);
        }
        for (std::size_t i = 0; i < n; ++i) cells[i * N + t] = row[i];
    }
    return Dataset(net.names, net.arities, std::move(cells), N, net.labels);
}

}  // namespace qnml
