#include <catch_amalgamated.hpp>

#include <qnml/learner.hpp>
#include <qnml/model.hpp>

#include "test_support.hpp"

using namespace qnml;

namespace {

using Parents = std::vector<std::vector<std::size_t>>;

constexpr Criterion all_criteria[] = {Criterion::bic, Criterion::bdeu, Criterion::fnml, Criterion::qnml, Criterion::bdq};

ScoreConfig config(Criterion c) {
    ScoreConfig cfg;
    cfg.criterion = c;
    cfg.regret_method = RegretMethod::exact;
    return cfg;
}

// A -> B, A -> C, {B, C} -> D with well-separated CPT rows.
BayesianNetwork diamond() {
    BayesianNetwork net;
    net.structure = DagStructure(Parents{{}, {0}, {0}, {1, 2}});
    net.names = {"A", "B", "C", "D"};
    net.arities = {2, 2, 2, 2};
    for (std::size_t i = 0; i < 4; ++i) net.labels.push_back(index_labels(2));
    net.cpts = {{0.4, 0.6}, {0.85, 0.15, 0.2, 0.8}, {0.25, 0.75, 0.9, 0.1}, {0.9, 0.1, 0.3, 0.7, 0.2, 0.8, 0.75, 0.25}};
    net.validate();
    return net;
}

}  // namespace

TEST_CASE("local score table sizes", "[learner]") {
    std::mt19937_64 rng(1);
    const auto d2 = testing::random_dataset(rng, 2, 20, 3);
    const auto t2 = compute_local_scores(d2, config(Criterion::qnml));
    CHECK(t2.entries() == 4);
    const auto d4 = testing::random_dataset(rng, 4, 20, 3);
    LearnOptions capped;
    capped.max_parents = 1;
    CHECK(compute_local_scores(d4, config(Criterion::qnml), capped).entries() == 16);
    CHECK(compute_local_scores(d4, config(Criterion::qnml)).entries() == 32);
}

TEST_CASE("local score table matches the scorer", "[learner]") {
    std::mt19937_64 rng(2);
    const auto d = testing::random_dataset(rng, 5, 40, 3);
    for (auto c : all_criteria) {
        LearnOptions opt;
        opt.threads = 3;
        const auto table = compute_local_scores(d, config(c), opt);
        const LocalScorer scorer(d, config(c));
        for (std::size_t i = 0; i < 5; ++i)
            for (std::uint64_t m = 0; m < 32; ++m) {
                if (m >> i & 1) continue;
                std::vector<std::size_t> parents;
                for (std::size_t v = 0; v < 5; ++v)
                    if (m >> v & 1) parents.push_back(v);
                CHECK(table.at(i, m) == scorer(i, parents));
            }
    }
}

TEST_CASE("exact search matches brute force", "[learner][oracle]") {
    std::mt19937_64 rng(3);
    for (auto c : all_criteria)
        for (int iter = 0; iter < 15; ++iter) {
            const auto d = testing::random_dataset(rng, 4, 1 + testing::uniform_index(rng, 60), 3);
            const auto ex = learn_exact(d, config(c));
            const auto bf = learn_bruteforce(d, config(c));
            CAPTURE(to_string(c), iter);
            CHECK(std::abs(ex.total_score - bf.total_score) <= 1e-9);
            CHECK(bf.structures_evaluated == 543);
            CHECK(ex.total_score == total_score(d, ex.network, config(c)));
            double sum = 0.0;
            for (double v : ex.per_variable) sum += v;
            CHECK(sum == ex.total_score);
        }
}

TEST_CASE("parent cap is respected by both searches", "[learner]") {
    std::mt19937_64 rng(4);
    LearnOptions opt;
    opt.max_parents = 1;
    for (int iter = 0; iter < 10; ++iter) {
        const auto d = testing::random_dataset(rng, 4, 50, 3, 2, 0.7);
        const auto ex = learn_exact(d, config(Criterion::bdeu), opt);
        const auto bf = learn_bruteforce(d, config(Criterion::bdeu), opt);
        for (std::size_t i = 0; i < 4; ++i) CHECK(ex.network.parents(i).size() <= 1);
        CHECK(std::abs(ex.total_score - bf.total_score) <= 1e-9);
    }
}

TEST_CASE("small learning cases", "[learner]") {
    SECTION("single variable") {
        const auto d = Dataset::from_rows({}, {3}, {{0}, {2}});
        const auto res = learn_exact(d, config(Criterion::qnml));
        CHECK(res.network.arc_count() == 0);
        CHECK(res.total_score == LocalScorer(d, config(Criterion::qnml))(0, {}));
    }
    SECTION("two variables evaluate three structures") {
        std::mt19937_64 rng(5);
        const auto d = testing::random_dataset(rng, 2, 10, 2);
        CHECK(learn_bruteforce(d, config(Criterion::qnml)).structures_evaluated == 3);
    }
    SECTION("no rows gives the empty graph") {
        const auto d = Dataset::from_rows({}, {2, 3, 2}, {});
        for (auto c : {Criterion::qnml, Criterion::fnml, Criterion::bdeu}) {
            CHECK(learn_exact(d, config(c)).network.arc_count() == 0);
            CHECK(learn_bruteforce(d, config(c)).network.arc_count() == 0);
        }
    }
    SECTION("copied column gives one arc") {
        std::mt19937_64 rng(6);
        std::vector<std::vector<Category>> rows;
        for (int t = 0; t < 100; ++t) {
            const auto v = static_cast<Category>(rng() % 2);
            rows.push_back({v, v});
        }
        const auto d = Dataset::from_rows({}, {2, 2}, rows);
        const auto res = learn_exact(d, config(Criterion::qnml));
        CHECK(res.network.arc_count() == 1);
        CHECK(res.network.adjacent(0, 1));
    }
    SECTION("independent uniform columns give the empty graph") {
        std::vector<std::vector<Category>> rows;
        for (Category a = 0; a < 2; ++a)
            for (Category b = 0; b < 2; ++b)
                for (Category c = 0; c < 2; ++c)
                    for (int rep = 0; rep < 50; ++rep) rows.push_back({a, b, c});
        const auto d = Dataset::from_rows({}, {2, 2, 2}, rows);
        CHECK(learn_exact(d, config(Criterion::qnml)).network.arc_count() == 0);
        CHECK(learn_bruteforce(d, config(Criterion::qnml)).network.arc_count() == 0);
    }
}

TEST_CASE("learned equivalence class members tie", "[learner][property]") {
    std::mt19937_64 rng(7);
    for (auto c : {Criterion::qnml, Criterion::bdeu, Criterion::bdq})
        for (int iter = 0; iter < 10; ++iter) {
            const auto d = testing::random_dataset(rng, 4, 10 + testing::uniform_index(rng, 50), 3, 2, 0.6);
            const auto res = learn_exact(d, config(c));
            for (const auto& h : equivalence_class(res.network))
                CHECK(std::abs(total_score(d, h, config(c)) - res.total_score) <= 1e-9);
        }
}

TEST_CASE("size guards", "[learner]") {
    const auto wide = Dataset::from_rows({}, std::vector<std::size_t>(21, 2), {});
    CHECK_THROWS_AS(compute_local_scores(wide, config(Criterion::qnml)), ResourceError);
    const auto wider = Dataset::from_rows({}, std::vector<std::size_t>(32, 2), {});
    LearnOptions opt;
    opt.max_parents = 1;
    CHECK_THROWS_AS(compute_local_scores(wider, config(Criterion::qnml), opt), ResourceError);
    LearnOptions tight;
    tight.memory_budget = 1000;
    const auto ten = Dataset::from_rows({}, std::vector<std::size_t>(10, 2), {});
    CHECK_THROWS_AS(learn_exact(ten, config(Criterion::qnml), tight), ResourceError);
    std::mt19937_64 rng(8);
    CHECK_THROWS_AS(learn_bruteforce(testing::random_dataset(rng, 6, 5, 2), config(Criterion::qnml)), ResourceError);
}

TEST_CASE("qNML recovers a sampled network more often with more data", "[learner][property]") {
    const auto net = diamond();
    std::vector<int> exact_hits;
    for (std::size_t N : {100, 1000, 10000}) {
        int hits = 0;
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            const auto d = sample(net, N, seed);
            hits += shd(learn_exact(d, ScoreConfig{}).network, net.structure) == 0;
        }
        exact_hits.push_back(hits);
    }
    CAPTURE(exact_hits);
    CHECK(exact_hits[0] <= exact_hits[1]);
    CHECK(exact_hits[1] <= exact_hits[2]);
    CHECK(exact_hits[2] >= 45);
}
