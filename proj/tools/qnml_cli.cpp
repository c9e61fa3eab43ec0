// qnml command-line tool.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 resource guard (too many variables, enumeration too large).

#include <qnml/qnml.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#ifndef QNML_DATA_DIR
#define QNML_DATA_DIR "data"
#endif

namespace {

using namespace qnml;

constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_resource = 3;

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) detail::data_error("cannot write '" + path + "'");
    out << text;
    if (!out) detail::data_error("failed writing '" + path + "'");
}

ScoreConfig make_config(const std::string& criterion, std::optional<double> alpha, const std::string& regret) {
    ScoreConfig cfg;
    cfg.criterion = parse_criterion(criterion);
    cfg.regret_method = parse_regret_method(regret);
    if (alpha) {
        if (cfg.criterion == Criterion::bdq)
            cfg.bdq_alpha = *alpha;
        else
            cfg.bdeu_alpha = *alpha;
    }
    cfg.validate();
    return cfg;
}

std::string score_csv(const std::vector<std::string>& names, const std::vector<double>& local, double total) {
    std::ostringstream out;
    out << "variable,score\n";
    for (std::size_t i = 0; i < names.size(); ++i) out << names[i] << ',' << fixed(local[i], 10) << '\n';
    out << "total," << fixed(total, 10) << '\n';
    return out.str();
}

struct Options {
    // regret
    std::uint64_t n = 0, r = 0;
    std::string method = "szp2";
    bool table1 = false;
    // scoring / learning
    std::string data, network, criterion = "qnml", regret = "szp2", out, fit_rule;
    std::optional<double> alpha;
    std::optional<std::size_t> max_parents;
    unsigned threads = 1;
    // sampling
    std::string model;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    // shd
    std::string a, b;
    // predict
    std::string train, test, params;
    // bench
    std::string spec, data_dir = QNML_DATA_DIR;
    bool record_timing = false;
};

int run_regret(const Options& o, CLI::App& cmd) {
    if (o.table1) {
        std::cout << bench::regret_table_csv(bench::run_regret_table());
        return 0;
    }
    if (cmd.count("--n") == 0 || cmd.count("--r") == 0) throw CLI::RequiredError("--n and --r (or --table1)");
    std::cout << fixed(regret(parse_regret_method(o.method), o.n, o.r), 6) << '\n';
    return 0;
}

int run_score(const Options& o) {
    const auto doc = read_network_file(o.network);
    const auto data = load_dataset_for_network(o.data, doc);
    const auto rep = score_network(data, doc.net.structure, make_config(o.criterion, o.alpha, o.regret));
    std::cout << score_csv(data.names(), rep.local, rep.total);
    return 0;
}

LearnOptions learn_options(const Options& o) {
    LearnOptions opt;
    opt.max_parents = o.max_parents;
    opt.threads = std::max(1u, o.threads);
    return opt;
}

int run_learn(const Options& o) {
    const auto data = load_dataset(o.data);
    const auto cfg = make_config(o.criterion, o.alpha, o.regret);
    const auto res = learn_exact(data, cfg, learn_options(o));
    BayesianNetwork net;
    if (o.fit_rule.empty())
        net = structure_only(data, res.network);
    else
        net = fit(data, res.network, parse_param_rule(o.fit_rule));
    std::ostringstream doc;
    write_network(net, doc, !o.fit_rule.empty());
    write_file(o.out, doc.str());
    std::cout << score_csv(data.names(), res.per_variable, res.total_score);
    std::cerr << "learned " << res.network.arc_count() << " arcs in " << fixed(res.elapsed_seconds, 3) << " s\n";
    return 0;
}

int run_sample(const Options& o) {
    const auto doc = read_network_file(o.model);
    if (!doc.has_cpts()) detail::data_error(o.model + ": sampling needs CPTs");
    const auto data = sample(doc.net, o.count, o.seed);
    std::ostringstream csv;
    write_csv(data, csv);
    write_file(o.out, csv.str());
    return 0;
}

int run_shd(const Options& o) {
    const auto a = read_network_file(o.a);
    const auto b = read_network_file(o.b);
    if (a.net.names != b.net.names) detail::data_error("networks differ in their variables");
    std::cout << shd(a.net.structure, b.net.structure) << '\n';
    return 0;
}

int run_predict(const Options& o) {
    const std::vector<std::string> paths{o.train, o.test};
    const auto sets = load_datasets_jointly(paths);
    const auto cfg = make_config(o.criterion, o.alpha, o.regret);
    const auto res = learn_exact(sets[0], cfg, learn_options(o));
    const ParamRule rule = o.params.empty() ? bench::prediction_rule(cfg.criterion) : parse_param_rule(o.params);
    const auto net = fit(sets[0], res.network, rule);
    std::cout << fixed(mean_test_loglik(net, sets[1]), 10) << '\n';
    return 0;
}

int run_bench(const Options& o) {
    const auto start = std::chrono::steady_clock::now();
    bench::ExperimentSpec spec;
    std::string source;
    if (std::filesystem::is_regular_file(o.spec)) {
        std::ifstream in(o.spec);
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            detail::data_error(o.spec + ": " + e.what());
        }
        spec = bench::parse_spec(doc, std::filesystem::path(o.spec).parent_path());
        source = o.spec;
    } else {
        spec = bench::default_spec(bench::parse_kind(o.spec), o.data_dir);
        source = "builtin:" + o.spec;
    }
    const std::string csv = bench::run_to_csv(spec, learn_options(o));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.out.empty()) {
        std::cout << csv;
    } else {
        std::filesystem::create_directories(o.out);
        const std::string name = bench::to_string(spec.kind) + ".csv";
        write_file((std::filesystem::path(o.out) / name).string(), csv);
        nlohmann::ordered_json manifest;
        manifest["version"] = qnml::version;
        manifest["spec"] = source;
        manifest["kind"] = bench::to_string(spec.kind);
        manifest["base_seed"] = spec.seed;
        manifest["repetitions"] = spec.repetitions;
        nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
        for (std::size_t rep = 0; rep < spec.repetitions && spec.kind != bench::ExperimentKind::regret_table; ++rep)
            seeds.push_back(spec.seed + rep);
        manifest["seeds"] = seeds;
        manifest["regret"] = std::string(to_string(spec.score.regret_method));
        manifest["outputs"] = {name};
        if (o.record_timing) manifest["wall_time_seconds"] = wall;
        write_file((std::filesystem::path(o.out) / "manifest.json").string(), manifest.dump(2) + "\n");
    }
    std::cerr << "bench " << bench::to_string(spec.kind) << " finished in " << fixed(wall, 3) << " s\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qnml: Bayesian network structure learning with quotient NML and related scores"};
    app.require_subcommand(1);
    Options o;

    auto* regret_cmd = app.add_subcommand("regret", "Multinomial NML regret reg(N, r)");
    regret_cmd->add_option("--n", o.n, "Sample size N");
    regret_cmd->add_option("--r", o.r, "Number of categories r");
    regret_cmd->add_option("--method", o.method, "exact | szp1 | szp2")->check(CLI::IsMember({"exact", "szp1", "szp2"}));
    regret_cmd->add_flag("--table1", o.table1, "Print the regret comparison table as CSV");

    auto add_scoring = [&](CLI::App* cmd) {
        cmd->add_option("--criterion", o.criterion, "bic | bdeu | fnml | qnml | bdq")
            ->check(CLI::IsMember({"bic", "bdeu", "fnml", "qnml", "bdq"}));
        cmd->add_option("--alpha", o.alpha, "Dirichlet hyperparameter for bdeu (default 1) or bdq (default 0.5)");
        cmd->add_option("--regret", o.regret, "Regret method: exact | szp1 | szp2")
            ->check(CLI::IsMember({"exact", "szp1", "szp2"}));
    };
    auto add_search = [&](CLI::App* cmd) {
        cmd->add_option("--max-parents", o.max_parents, "Cap on parent set size");
        cmd->add_option("--threads", o.threads, "Worker threads for local score computation")
            ->check(CLI::PositiveNumber);
    };

    auto* score_cmd = app.add_subcommand("score", "Score a network structure on data");
    score_cmd->add_option("--data", o.data, "Dataset CSV")->required();
    score_cmd->add_option("--network", o.network, "Network JSON")->required();
    add_scoring(score_cmd);

    auto* learn_cmd = app.add_subcommand("learn", "Exact structure learning");
    learn_cmd->add_option("--data", o.data, "Dataset CSV")->required();
    learn_cmd->add_option("--out", o.out, "Output network JSON")->required();
    learn_cmd->add_option("--fit", o.fit_rule, "Also write CPTs: ml | snml | bpp")
        ->check(CLI::IsMember({"ml", "snml", "bpp"}));
    add_scoring(learn_cmd);
    add_search(learn_cmd);

    auto* sample_cmd = app.add_subcommand("sample", "Draw data from a network with CPTs");
    sample_cmd->add_option("--model", o.model, "Network JSON with CPTs")->required();
    sample_cmd->add_option("--n", o.count, "Number of rows")->required();
    sample_cmd->add_option("--seed", o.seed, "PRNG seed (std::mt19937_64)")->required();
    sample_cmd->add_option("--out", o.out, "Output CSV")->required();

    auto* shd_cmd = app.add_subcommand("shd", "Structural Hamming distance between two networks");
    shd_cmd->add_option("--a", o.a, "First network JSON")->required();
    shd_cmd->add_option("--b", o.b, "Second network JSON")->required();

    auto* predict_cmd = app.add_subcommand("predict", "Learn on train data and report mean test log-likelihood");
    predict_cmd->add_option("--train", o.train, "Training CSV")->required();
    predict_cmd->add_option("--test", o.test, "Test CSV")->required();
    predict_cmd->add_option("--params", o.params, "ml | snml | bpp (default: bpp for bdeu/bdq, snml otherwise)")
        ->check(CLI::IsMember({"ml", "snml", "bpp"}));
    add_scoring(predict_cmd);
    add_search(predict_cmd);

    auto* bench_cmd = app.add_subcommand("bench", "Run an experiment");
    bench_cmd->add_option("--spec", o.spec,
                          "Spec JSON file, or a built-in kind: regret-table | shd-curve | predict-rank | param-count")
        ->required();
    bench_cmd->add_option("--out", o.out, "Output directory (CSV + manifest.json); stdout when omitted");
    bench_cmd->add_option("--data-dir", o.data_dir, "Directory of bundled networks and datasets");
    bench_cmd->add_flag("--record-timing", o.record_timing, "Store wall time in the manifest");
    add_search(bench_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*regret_cmd) return run_regret(o, *regret_cmd);
        if (*score_cmd) return run_score(o);
        if (*learn_cmd) return run_learn(o);
        if (*sample_cmd) return run_sample(o);
        if (*shd_cmd) return run_shd(o);
        if (*predict_cmd) return run_predict(o);
        if (*bench_cmd) return run_bench(o);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_resource;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_data;
    }
    return exit_usage;
}
