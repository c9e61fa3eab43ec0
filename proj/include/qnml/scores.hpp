#pragma once

// Decomposable local scores: BIC, BDeu, fNML, qNML and BDq.
// All values are log-scores in nats; larger is better.

#include <qnml/dag.hpp>
#include <qnml/dataset.hpp>
#include <qnml/regret.hpp>

#include <cmath>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace qnml {

enum class Criterion { bic, bdeu, fnml, qnml, bdq };

inline std::string_view to_string(Criterion c) {
    switch (c) {
        case Criterion::bic: return "bic";
        case Criterion::bdeu: return "bdeu";
        case Criterion::fnml: return "fnml";
        case Criterion::qnml: return "qnml";
        case Criterion::bdq: return "bdq";
    }
    return "?";
}

inline Criterion parse_criterion(std::string_view s) {
    if (s == "bic") return Criterion::bic;
    if (s == "bdeu") return Criterion::bdeu;
    if (s == "fnml") return Criterion::fnml;
    if (s == "qnml") return Criterion::qnml;
    if (s == "bdq") return Criterion::bdq;
    detail::data_error("unknown criterion '" + std::string(s) + "'");
}

struct ScoreConfig {
    Criterion criterion = Criterion::qnml;
    double bdeu_alpha = 1.0;  ///< equivalent sample size
    double bdq_alpha = 0.5;   ///< symmetric Dirichlet parameter (Jeffreys)
    RegretMethod regret_method = RegretMethod::szp_all_range;

    void validate() const {
        if (!(bdeu_alpha > 0.0) || !(bdq_alpha > 0.0)) detail::data_error("Dirichlet parameters must be positive");
    }
};

// ---------------------------------------------------------------------------
// Local scores from a contingency table

/// ln P(D_i | θ̂) - (q_i (r_i - 1) / 2) ln N, with the full q_i.
inline double bic_local(const ContingencyTable& tab, std::size_t N) {
    if (N == 0) detail::data_error("BIC needs at least one sample");
    const double dim = static_cast<double>(tab.q) * static_cast<double>(tab.r - 1);
    return max_loglik_conditional(tab) - 0.5 * dim * std::log(static_cast<double>(N));
}

/// Dirichlet marginal likelihood with θ_ij ~ Dir(α/(q r), ..., α/(q r)).
inline double bdeu_local(const ContingencyTable& tab, double alpha) {
    if (!(alpha > 0.0)) detail::data_error("BDeu alpha must be positive");
    const double q = static_cast<double>(tab.q);
    const double a_j = alpha / q;
    const double a_jk = a_j / static_cast<double>(tab.r);
    const double lg_aj = std::lgamma(a_j);
    const double lg_ajk = std::lgamma(a_jk);
    double s = 0.0;
    for (std::size_t a = 0; a < tab.observed(); ++a) {
        s += lg_aj - std::lgamma(a_j + tab.totals[a]);
        for (auto c : tab.observed_row(a))
            if (c) s += std::lgamma(a_jk + c) - lg_ajk;
    }
    return s;
}

/// Column-partition NML: Σ_j [ln ML_j - reg(N_ij, r_i)] over observed j.
inline double fnml_local(const ContingencyTable& tab, const RegretCache& reg) {
    double penalty = 0.0;
    for (std::size_t a = 0; a < tab.observed(); ++a) penalty += reg(tab.totals[a], tab.r);
    return max_loglik_conditional(tab) - penalty;
}

/// Quotient NML: ln ML(child | parents) - [reg(N, q r) - reg(N, q)].
inline double qnml_local(const ContingencyTable& tab, std::size_t N, const RegretCache& reg) {
    std::uint64_t qr = 0;
    if (!numeric::mul_bounded(tab.q, tab.r, max_configurations, qr))
        detail::resource_error("collapsed configuration count exceeds 2^62");
    return max_loglik_conditional(tab) - (reg(N, qr) - reg(N, tab.q));
}

namespace detail {

/// ln P¹ of a collapsed column with m cells under Dir(α, ..., α), given the
/// counts of the observed cells.
template <typename Counts>
double collapsed_marginal(double m, double alpha, std::size_t N, const Counts& cell_counts) {
    const double lg_a = std::lgamma(alpha);
    double s = std::lgamma(m * alpha) - std::lgamma(m * alpha + static_cast<double>(N));
    for (auto c : cell_counts)
        if (c) s += std::lgamma(alpha + c) - lg_a;
    return s;
}

}  // namespace detail

/// ln P¹(D_{i,G_i}; α) - ln P¹(D_{G_i}; α).
inline double bdq_local(const ContingencyTable& tab, std::size_t N, double alpha) {
    if (!(alpha > 0.0)) detail::data_error("BDq alpha must be positive");
    const double q = static_cast<double>(tab.q);
    const double joint = detail::collapsed_marginal(q * static_cast<double>(tab.r), alpha, N, tab.cells);
    const double marginal = detail::collapsed_marginal(q, alpha, N, tab.totals);
    return joint - marginal;
}

inline double local_score(const ContingencyTable& tab, const ScoreConfig& cfg, const RegretCache& reg) {
    switch (cfg.criterion) {
        case Criterion::bic: return bic_local(tab, tab.N);
        case Criterion::bdeu: return bdeu_local(tab, cfg.bdeu_alpha);
        case Criterion::fnml: return fnml_local(tab, reg);
        case Criterion::qnml: return qnml_local(tab, tab.N, reg);
        case Criterion::bdq: return bdq_local(tab, tab.N, cfg.bdq_alpha);
    }
    return 0.0;
}

/// Scores (child, parent set) families of one dataset under one config,
/// sharing a regret cache between calls.
class LocalScorer {
public:
    LocalScorer(const Dataset& data, ScoreConfig cfg)
        : data_(&data), cfg_(cfg), regret_(std::make_shared<RegretCache>(cfg.regret_method)) {
        cfg_.validate();
    }

    const Dataset& data() const noexcept { return *data_; }
    const ScoreConfig& config() const noexcept { return cfg_; }
    const RegretCache& regret_cache() const noexcept { return *regret_; }

    double operator()(std::size_t child, std::vector<std::size_t> parents) const {
        return local_score(contingency(*data_, child, std::move(parents)), cfg_, *regret_);
    }

private:
    const Dataset* data_;
    ScoreConfig cfg_;
    std::shared_ptr<RegretCache> regret_;
};

struct ScoreReport {
    double total = 0.0;
    std::vector<double> local;  ///< per variable, index order
};

inline ScoreReport score_network(const Dataset& data, const DagStructure& g, const ScoreConfig& cfg) {
    if (g.size() != data.num_vars())
        detail::data_error("graph has " + std::to_string(g.size()) + " nodes, data has " +
                           std::to_string(data.num_vars()) + " variables");
    const LocalScorer scorer(data, cfg);
    ScoreReport rep;
    for (std::size_t i = 0; i < g.size(); ++i) {
        rep.local.push_back(scorer(i, g.parents(i)));
        rep.total += rep.local.back();
    }
    return rep;
}

/// Σ_i local(i, G_i).
inline double total_score(const Dataset& data, const DagStructure& g, const ScoreConfig& cfg) {
    return score_network(data, g, cfg).total;
}

}  // namespace qnml
