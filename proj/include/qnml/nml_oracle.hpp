#pragma once

// Exact NML of a whole network by enumerating every data matrix of the
// same shape. Only usable on toy instances; serves as a test oracle.

#include <qnml/dag.hpp>
#include <qnml/dataset.hpp>
#include <qnml/numeric.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

namespace qnml {

namespace detail {

/// ln P(D | θ̂(D; G)) for rows given as joint-configuration codes.
inline double network_max_loglik(const DagStructure& g, std::span<const std::size_t> arities,
                                  std::span<const std::vector<std::size_t>> rows) {
    double s = 0.0;
    std::vector<std::uint32_t> counts;
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t q = 1;
        for (auto p : g.parents(i)) q *= arities[p];
        const std::size_t r = arities[i];
        counts.assign(q * (r + 1), 0);
        for (const auto& row : rows) {
            std::size_t j = 0;
            for (auto p : g.parents(i)) j = j * arities[p] + row[p];
            ++counts[j * (r + 1) + row[i]];
            ++counts[j * (r + 1) + r];
        }
        for (std::size_t j = 0; j < q; ++j) {
            for (std::size_t k = 0; k < r; ++k) s += numeric::xlogx(counts[j * (r + 1) + k]);
            s -= numeric::xlogx(counts[j * (r + 1) + r]);
        }
    }
    return s;
}

}  // namespace detail

/// ln of Σ over all N x n data matrices of the maximized likelihood under g.
inline double nml_normalizer_bruteforce(const DagStructure& g, std::span<const std::size_t> arities, std::size_t N) {
    std::uint64_t joint = 1;
    for (auto a : arities)
        if (!numeric::mul_bounded(joint, a, std::uint64_t{1} << 24, joint))
            detail::resource_error("NML enumeration limited to (Π r_i)^N <= 2^24");
    std::uint64_t total = 1;
    for (std::size_t t = 0; t < N; ++t)
        if (!numeric::mul_bounded(total, joint, std::uint64_t{1} << 24, total))
            detail::resource_error("NML enumeration limited to (Π r_i)^N <= 2^24");

    const std::size_t n = arities.size();
    std::vector<std::vector<std::size_t>> rows(N, std::vector<std::size_t>(n, 0));
    double sum = 0.0;  // terms lie in (0, 1]
    for (std::uint64_t code = 0; code < total; ++code) {
        std::uint64_t c = code;
        for (std::size_t t = 0; t < N; ++t) {
            std::uint64_t cfg = c % joint;
            c /= joint;
            for (std::size_t i = n; i-- > 0;) {
                rows[t][i] = static_cast<std::size_t>(cfg % arities[i]);
                cfg /= arities[i];
            }
        }
        sum += std::exp(detail::network_max_loglik(g, arities, rows));
    }
    return std::log(sum);
}

/// ln P_NML(D; G) = ln P(D | θ̂(D; G)) - ln Σ_{D'} P(D' | θ̂(D'; G)).
inline double nml_bruteforce(const Dataset& data, const DagStructure& g) {
    if (g.size() != data.num_vars()) detail::data_error("graph and data differ in variable count");
    std::vector<std::vector<std::size_t>> rows(data.num_rows(), std::vector<std::size_t>(data.num_vars()));
    for (std::size_t t = 0; t < data.num_rows(); ++t)
        for (std::size_t i = 0; i < data.num_vars(); ++i) rows[t][i] = data.at(t, i);
    const double ml = detail::network_max_loglik(g, data.arities(), rows);
    return ml - nml_normalizer_bruteforce(g, data.arities(), data.num_rows());
}

}  // namespace qnml
