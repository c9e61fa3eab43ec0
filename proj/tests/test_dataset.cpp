#include <catch_amalgamated.hpp>

#include <qnml/dataset.hpp>

#include "test_support.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace qnml;
using Catch::Approx;

namespace {

Dataset from_text(const std::string& text, std::optional<std::vector<std::size_t>> arities = std::nullopt) {
    std::istringstream in(text);
    return parse_dataset(in, arities);
}

Dataset two_binary() { return Dataset::from_rows({"a", "b"}, {2, 2}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}); }

}  // namespace

TEST_CASE("csv values map to sorted category indices", "[dataset]") {
    const auto d = from_text("a,b\nx,1\ny,0\n");
    CHECK(d.arities() == std::vector<std::size_t>{2, 2});
    CHECK(d.row(0) == std::vector<Category>{0, 1});
    CHECK(d.row(1) == std::vector<Category>{1, 0});
    CHECK(d.label(0, 1) == "y");
}

TEST_CASE("header-only file yields an empty dataset", "[dataset]") {
    const auto d = from_text("a,b,c\n");
    CHECK(d.num_rows() == 0);
    CHECK(d.num_vars() == 3);
}

TEST_CASE("declared arity adds unseen categories", "[dataset]") {
    const auto d = from_text("v\nb\na\nc\na\n", std::vector<std::size_t>{5});
    CHECK(d.arity(0) == 5);
    const auto tab = contingency(d, 0, {});
    const auto dense = tab.dense();
    CHECK(dense[0] == std::vector<std::uint32_t>{2, 1, 1, 0, 0});
}

TEST_CASE("csv errors", "[dataset]") {
    CHECK_THROWS_AS(from_text(""), DataError);
    CHECK_THROWS_AS(from_text("a,b\n1\n"), DataError);
    CHECK_THROWS_AS(from_text("a,b\n1,\n"), DataError);
    CHECK_THROWS_AS(from_text("a\nx\ny\nz\n", std::vector<std::size_t>{2}), DataError);
    CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv"), DataError);
}

TEST_CASE("loading is independent of row order and repeatable", "[dataset]") {
    const auto d1 = from_text("a,b\nz,1\ny,0\nx,1\n");
    const auto d2 = from_text("a,b\nz,1\ny,0\nx,1\n");
    CHECK(d1 == d2);
    const auto d3 = from_text("a,b\nx,1\nz,1\ny,0\n");
    CHECK(d3.labels(0) == d1.labels(0));
}

TEST_CASE("contingency counts", "[dataset]") {
    const auto d = two_binary();
    SECTION("no parents") {
        const auto tab = contingency(d, 0, {});
        CHECK(tab.q == 1);
        CHECK(tab.dense() == std::vector<std::vector<std::uint32_t>>{{2, 2}});
        CHECK(tab.row_total(0) == 4);
    }
    SECTION("one parent") {
        const auto tab = contingency(d, 0, {1});
        CHECK(tab.dense() == std::vector<std::vector<std::uint32_t>>{{1, 1}, {1, 1}});
    }
    SECTION("errors") {
        CHECK_THROWS_AS(contingency(d, 0, {0}), DataError);
        CHECK_THROWS_AS(contingency(d, 2, {}), DataError);
        CHECK_THROWS_AS(contingency(d, 0, {5}), DataError);
    }
}

TEST_CASE("parent configuration encoding: ascending parents, last fastest", "[dataset]") {
    const auto d = Dataset::from_rows({}, {2, 2, 2}, {{0, 1, 0}});
    const std::vector<std::size_t> parents{1, 2};
    CHECK(parent_configuration(d, parents, 0) == 2);
    const auto tab = contingency(d, 0, {2, 1});  // canonicalized
    CHECK(tab.parents == parents);
    CHECK(tab.count(2, 0) == 1);
}

TEST_CASE("sparse and dense counting agree with a direct recount", "[dataset][property]") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 60; ++iter) {
        const std::size_t n = 2 + testing::uniform_index(rng, 5);
        // wide arities push some tables onto the sorting path
        const auto d = testing::random_dataset(rng, n, 1 + testing::uniform_index(rng, 40), iter % 2 ? 3 : 40);
        const std::size_t child = testing::uniform_index(rng, n);
        std::vector<std::size_t> parents;
        for (std::size_t v = 0; v < n; ++v)
            if (v != child && rng() % 2) parents.push_back(v);
        const auto tab = contingency(d, child, parents);
        std::map<std::pair<std::uint64_t, std::size_t>, std::uint32_t> recount;
        for (std::size_t t = 0; t < d.num_rows(); ++t) ++recount[{parent_configuration(d, parents, t), d.at(t, child)}];
        std::size_t total = 0;
        for (std::size_t a = 0; a < tab.observed(); ++a) {
            std::uint32_t row = 0;
            for (std::size_t k = 0; k < tab.r; ++k) {
                const auto c = tab.observed_row(a)[k];
                row += c;
                auto it = recount.find({tab.configs[a], k});
                CHECK(c == (it == recount.end() ? 0u : it->second));
            }
            CHECK(row == tab.totals[a]);
            total += row;
        }
        CHECK(total == d.num_rows());
    }
}

TEST_CASE("empirical conditional entropy", "[dataset]") {
    SECTION("deterministic child") {
        const auto d = Dataset::from_rows({}, {2, 2}, {{0, 0}, {1, 1}, {1, 1}});
        CHECK(empirical_cond_entropy(d, 1, {0}) == 0.0);
    }
    SECTION("uniform binary") {
        const auto d = Dataset::from_rows({}, {2}, {{0}, {0}, {1}, {1}});
        CHECK(empirical_cond_entropy(d, 0, {}) == Approx(std::log(2.0)).epsilon(1e-14));
    }
    SECTION("counts [[1,1],[2,0]]") {
        // child = column 1, parent = column 0
        const auto d = Dataset::from_rows({}, {2, 2}, {{0, 0}, {0, 1}, {1, 0}, {1, 0}});
        CHECK(empirical_cond_entropy(d, 1, {0}) == Approx(0.5 * std::log(2.0)).epsilon(1e-14));
    }
    SECTION("empty data") {
        const auto d = Dataset::from_rows({}, {2}, {});
        CHECK_THROWS_AS(empirical_cond_entropy(d, 0, {}), DataError);
    }
}

TEST_CASE("conditioning on more variables never raises empirical entropy", "[dataset][property]") {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 200; ++iter) {
        const auto d = testing::random_dataset(rng, 4, 1 + testing::uniform_index(rng, 30), 3);
        const double h0 = empirical_cond_entropy(d, 0, {});
        const double h1 = empirical_cond_entropy(d, 0, {1});
        const double h2 = empirical_cond_entropy(d, 0, {1, 2});
        const double h3 = empirical_cond_entropy(d, 0, {1, 2, 3});
        CHECK(h1 <= h0 + 1e-12);
        CHECK(h2 <= h1 + 1e-12);
        CHECK(h3 <= h2 + 1e-12);
        CHECK(h0 <= std::log(static_cast<double>(d.arity(0))) + 1e-12);
        CHECK(h3 >= 0.0);
    }
}
