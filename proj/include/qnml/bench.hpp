#pragma once

// Experiment harness: regret table, SHD-vs-N curves, predictive rank and
// parameter-count tables. Every experiment is a pure function of its spec.

#include <qnml/dag.hpp>
#include <qnml/dataset.hpp>
#include <qnml/learner.hpp>
#include <qnml/model.hpp>
#include <qnml/network_io.hpp>
#include <qnml/regret.hpp>
#include <qnml/scores.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace qnml::bench {

enum class ExperimentKind { regret_table, shd_curve, predict_rank, param_count };

inline std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::regret_table: return "regret-table";
        case ExperimentKind::shd_curve: return "shd-curve";
        case ExperimentKind::predict_rank: return "predict-rank";
        case ExperimentKind::param_count: return "param-count";
    }
    return "?";
}

inline ExperimentKind parse_kind(const std::string& s) {
    if (s == "regret-table") return ExperimentKind::regret_table;
    if (s == "shd-curve") return ExperimentKind::shd_curve;
    if (s == "predict-rank") return ExperimentKind::predict_rank;
    if (s == "param-count") return ExperimentKind::param_count;
    detail::data_error("unknown experiment kind '" + s + "'");
}

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::regret_table;
    std::vector<Criterion> criteria{Criterion::bic, Criterion::bdeu, Criterion::fnml, Criterion::qnml};
    std::vector<std::size_t> sample_sizes{10, 100, 1000, 10000};
    std::size_t repetitions = 50;
    std::uint64_t seed = 1;
    std::vector<std::string> networks;
    std::vector<std::string> datasets;
    std::vector<double> train_fractions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    ScoreConfig score;  ///< criterion field ignored; hyperparameters and regret method used

    void validate() const {
        if (repetitions < 1) detail::data_error("repetitions must be at least 1");
        for (auto n : sample_sizes)
            if (n == 0) detail::data_error("sample sizes must be positive");
        for (auto f : train_fractions)
            if (!(f > 0.0 && f < 1.0)) detail::data_error("train fractions must lie in (0, 1)");
        if (criteria.empty()) detail::data_error("at least one criterion is required");
        score.validate();
    }
};

inline std::string stem(const std::string& path) { return std::filesystem::path(path).stem().string(); }

/// Reads a spec document; relative file paths resolve against `base_dir`.
inline ExperimentSpec parse_spec(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    ExperimentSpec spec;
    try {
        spec.kind = parse_kind(doc.at("kind").get<std::string>());
        if (doc.contains("criteria")) {
            spec.criteria.clear();
            for (const auto& c : doc["criteria"]) spec.criteria.push_back(parse_criterion(c.get<std::string>()));
        }
        if (doc.contains("sample_sizes")) spec.sample_sizes = doc["sample_sizes"].get<std::vector<std::size_t>>();
        if (doc.contains("repetitions")) spec.repetitions = doc["repetitions"].get<std::size_t>();
        if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("train_fractions")) spec.train_fractions = doc["train_fractions"].get<std::vector<double>>();
        if (doc.contains("regret")) spec.score.regret_method = parse_regret_method(doc["regret"].get<std::string>());
        if (doc.contains("bdeu_alpha")) spec.score.bdeu_alpha = doc["bdeu_alpha"].get<double>();
        if (doc.contains("bdq_alpha")) spec.score.bdq_alpha = doc["bdq_alpha"].get<double>();
        auto resolve = [&](const std::string& p) {
            const std::filesystem::path fp(p);
            return (fp.is_absolute() ? fp : base_dir / fp).lexically_normal().string();
        };
        if (doc.contains("networks"))
            for (const auto& p : doc["networks"]) spec.networks.push_back(resolve(p.get<std::string>()));
        if (doc.contains("datasets"))
            for (const auto& p : doc["datasets"]) spec.datasets.push_back(resolve(p.get<std::string>()));
    } catch (const nlohmann::json::exception& e) {
        detail::data_error(std::string("experiment spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

/// Built-in specs over the bundled files in `data_dir`.
inline ExperimentSpec default_spec(ExperimentKind kind, const std::filesystem::path& data_dir) {
    ExperimentSpec spec;
    spec.kind = kind;
    switch (kind) {
        case ExperimentKind::regret_table: break;
        case ExperimentKind::shd_curve:
            spec.criteria = {Criterion::bic, Criterion::bdeu, Criterion::fnml, Criterion::qnml};
            spec.sample_sizes = {100, 1000, 10000};
            spec.repetitions = 50;
            spec.networks = {(data_dir / "networks" / "lab5.json").string()};
            break;
        case ExperimentKind::predict_rank:
        case ExperimentKind::param_count:
            spec.repetitions = 20;
            spec.datasets = {(data_dir / "datasets" / "synth4.csv").string(),
                             (data_dir / "datasets" / "mixed6.csv").string(),
                             (data_dir / "datasets" / "clinic8.csv").string()};
            break;
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Results

struct RegretRow {
    std::uint64_t N, r;
    double eq6, eq7, exact;
};

struct ShdRow {
    std::string network;
    Criterion criterion;
    std::size_t N;
    double mean_shd;
    double stderr_shd;
    double zero_fraction;  ///< share of repetitions with SHD 0
};

struct PredictRow {
    std::string dataset;
    Criterion criterion;
    std::string fraction;  ///< "0.1" ... or "all"
    double mean_loglik;
    double mean_rank;
};

struct ParamRow {
    std::string dataset;
    Criterion criterion;
    double fraction;
    double mean_params;
};

inline std::string fmt(double v, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string fraction_label(double f) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", f);
    return buf;
}

// ---------------------------------------------------------------------------
// Regret table

inline std::vector<RegretRow> run_regret_table() {
    std::vector<RegretRow> rows;
    for (std::uint64_t N : {50u, 500u, 5000u})
        for (std::uint64_t r : {10u, 100u, 1000u, 10000u})
            rows.push_back({N, r, regret_szp_small_r(N, r), regret_szp_all_range(N, r), regret_exact(N, r)});
    return rows;
}

inline std::string regret_table_csv(const std::vector<RegretRow>& rows) {
    std::ostringstream out;
    out << "N,r,eq6,eq7,exact\n";
    for (const auto& x : rows)
        out << x.N << ',' << x.r << ',' << fmt(x.eq6) << ',' << fmt(x.eq7) << ',' << fmt(x.exact) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// SHD curves

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double standard_error(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

inline std::vector<ShdRow> run_shd_curve(const ExperimentSpec& spec, const LearnOptions& opt = {}) {
    spec.validate();
    std::vector<ShdRow> rows;
    for (const auto& path : spec.networks) {
        const auto doc = read_network_file(path);
        if (!doc.has_cpts()) detail::data_error(path + ": generating network needs CPTs");
        if (doc.net.size() > max_vars_uncapped && !opt.max_parents)
            detail::resource_error(path + ": network too large for exact learning");
        const auto truth = to_cpdag(doc.net.structure);
        for (auto N : spec.sample_sizes) {
            std::map<Criterion, std::vector<double>> shds;
            for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
                const auto data = sample(doc.net, N, spec.seed + rep);
                for (auto c : spec.criteria) {
                    ScoreConfig cfg = spec.score;
                    cfg.criterion = c;
                    const auto res = learn_exact(data, cfg, opt);
                    shds[c].push_back(static_cast<double>(shd(to_cpdag(res.network), truth)));
                }
            }
            for (auto c : spec.criteria) {
                const auto& v = shds[c];
                const double zeros = static_cast<double>(std::count(v.begin(), v.end(), 0.0));
                rows.push_back({stem(path), c, N, mean(v), standard_error(v), zeros / static_cast<double>(v.size())});
            }
        }
    }
    return rows;
}

inline std::string shd_curve_csv(const std::vector<ShdRow>& rows) {
    std::ostringstream out;
    out << "network,criterion,N,meanSHD,stderr\n";
    for (const auto& x : rows)
        out << x.network << ',' << to_string(x.criterion) << ',' << x.N << ',' << fmt(x.mean_shd) << ','
            << fmt(x.stderr_shd) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// Prediction and parsimony

/// Parameter rule used to evaluate structures learned with each criterion:
/// Bayesian scores get Bayesian predictive parameters, the others sNML.
inline ParamRule prediction_rule(Criterion c) {
    return (c == Criterion::bdeu || c == Criterion::bdq) ? ParamRule::bpp : ParamRule::snml;
}

/// Ranks 1..k by descending value; equal values share the smallest rank.
inline std::vector<std::size_t> tied_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> ranks(values.size());
    for (std::size_t a = 0; a < values.size(); ++a) {
        std::size_t better = 0;
        for (std::size_t b = 0; b < values.size(); ++b)
            if (values[b] > values[a]) ++better;
        ranks[a] = better + 1;
    }
    return ranks;
}

/// Fisher-Yates permutation of 0..n-1 driven by std::mt19937_64(seed).
inline std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(i));
        std::swap(p[i - 1], p[std::min(j, i - 1)]);
    }
    return p;
}

struct SplitOutcome {
    double mean_loglik;
    std::uint64_t params;
};

struct PredictionTables {
    std::vector<PredictRow> ranks;
    std::vector<ParamRow> params;
};

inline PredictionTables run_prediction(const ExperimentSpec& spec, const LearnOptions& opt = {}) {
    spec.validate();
    PredictionTables out;
    const std::size_t k = spec.criteria.size();
    for (const auto& path : spec.datasets) {
        const auto data = load_dataset(path);
        const std::size_t N = data.num_rows();
        const std::size_t F = spec.train_fractions.size();
        // [fraction][criterion] accumulators
        std::vector<std::vector<double>> loglik(F, std::vector<double>(k, 0.0));
        std::vector<std::vector<double>> rank(F, std::vector<double>(k, 0.0));
        std::vector<std::vector<double>> params(F, std::vector<double>(k, 0.0));
        for (std::size_t rep = 0; rep < spec.repetitions; ++rep) {
            const auto perm = permutation(N, spec.seed + rep);
            for (std::size_t f = 0; f < F; ++f) {
                const auto n_train = static_cast<std::size_t>(std::floor(spec.train_fractions[f] * static_cast<double>(N)));
                if (n_train == 0 || n_train >= N)
                    detail::data_error(path + ": fraction " + fraction_label(spec.train_fractions[f]) +
                                       " leaves an empty train or test split");
                const std::span<const std::size_t> idx(perm);
                const auto train = data.select_rows(idx.first(n_train));
                const auto test = data.select_rows(idx.subspan(n_train));
                std::vector<double> ll(k);
                for (std::size_t c = 0; c < k; ++c) {
                    ScoreConfig cfg = spec.score;
                    cfg.criterion = spec.criteria[c];
                    const auto res = learn_exact(train, cfg, opt);
                    const auto net = fit(train, res.network, prediction_rule(spec.criteria[c]));
                    ll[c] = mean_test_loglik(net, test);
                    loglik[f][c] += ll[c];
                    params[f][c] += static_cast<double>(parameter_count(res.network, data.arities()));
                }
                const auto rk = tied_ranks(ll);
                for (std::size_t c = 0; c < k; ++c) rank[f][c] += static_cast<double>(rk[c]);
            }
        }
        const double reps = static_cast<double>(spec.repetitions);
        for (std::size_t c = 0; c < k; ++c) {
            double ll_all = 0.0, rank_all = 0.0;
            for (std::size_t f = 0; f < F; ++f) {
                out.ranks.push_back({stem(path), spec.criteria[c], fraction_label(spec.train_fractions[f]),
                                     loglik[f][c] / reps, rank[f][c] / reps});
                out.params.push_back({stem(path), spec.criteria[c], spec.train_fractions[f], params[f][c] / reps});
                ll_all += loglik[f][c] / reps;
                rank_all += rank[f][c] / reps;
            }
            out.ranks.push_back({stem(path), spec.criteria[c], "all", ll_all / static_cast<double>(F),
                                 rank_all / static_cast<double>(F)});
        }
    }
    return out;
}

inline std::vector<PredictRow> run_predict_rank(const ExperimentSpec& spec, const LearnOptions& opt = {}) {
    return run_prediction(spec, opt).ranks;
}

inline std::vector<ParamRow> run_param_count(const ExperimentSpec& spec, const LearnOptions& opt = {}) {
    return run_prediction(spec, opt).params;
}

inline std::string predict_rank_csv(const std::vector<PredictRow>& rows) {
    std::ostringstream out;
    out << "dataset,criterion,fraction,meanLogLik,rank\n";
    for (const auto& x : rows)
        out << x.dataset << ',' << to_string(x.criterion) << ',' << x.fraction << ',' << fmt(x.mean_loglik) << ','
            << fmt(x.mean_rank, 4) << '\n';
    return out.str();
}

inline std::string param_count_csv(const std::vector<ParamRow>& rows) {
    std::ostringstream out;
    out << "dataset,criterion,fraction,meanParamCount\n";
    for (const auto& x : rows)
        out << x.dataset << ',' << to_string(x.criterion) << ',' << fraction_label(x.fraction) << ','
            << fmt(x.mean_params, 4) << '\n';
    return out.str();
}

/// Runs one experiment and returns its CSV text.
inline std::string run_to_csv(const ExperimentSpec& spec, const LearnOptions& opt = {}) {
    switch (spec.kind) {
        case ExperimentKind::regret_table: return regret_table_csv(run_regret_table());
        case ExperimentKind::shd_curve: return shd_curve_csv(run_shd_curve(spec, opt));
        case ExperimentKind::predict_rank: return predict_rank_csv(run_predict_rank(spec, opt));
        case ExperimentKind::param_count: return param_count_csv(run_param_count(spec, opt));
    }
    return {};
}

}  // namespace qnml::bench
