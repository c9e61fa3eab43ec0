#include <catch_amalgamated.hpp>

#include <qnml/dag.hpp>
#include <qnml/nml_oracle.hpp>
#include <qnml/scores.hpp>

#include "test_support.hpp"

#include <set>

using namespace qnml;

namespace {

using Parents = std::vector<std::vector<std::size_t>>;
using Set = std::set<std::size_t>;

Set as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

Set with(Set s, std::size_t x) {
    s.insert(x);
    return s;
}

Set without(Set s, std::size_t x) {
    s.erase(x);
    return s;
}

const DagStructure chain(Parents{{}, {0}, {1}});     // A -> B -> C
const DagStructure collider(Parents{{}, {}, {0, 1}}); // A -> C <- B
const DagStructure tournament(Parents{{}, {0}, {0, 1}});

}  // namespace

TEST_CASE("dag construction", "[dag]") {
    CHECK_THROWS_AS(DagStructure(Parents{{1}, {0}}), DataError);
    CHECK_THROWS_AS(DagStructure(Parents{{0}}), DataError);
    CHECK_THROWS_AS(DagStructure(Parents{{3}, {}}), DataError);
    const DagStructure g(Parents{{}, {2, 0}, {}});
    CHECK(g.parents(1) == std::vector<std::size_t>{0, 2});
    CHECK(g.arc_count() == 2);
    CHECK(g.topological_order() == std::vector<std::size_t>{0, 2, 1});
    CHECK(g.parent_mask(1) == 0b101);
}

TEST_CASE("covered arcs", "[dag]") {
    CHECK(is_covered_arc(DagStructure(Parents{{}, {0}}), 0, 1));
    CHECK_FALSE(is_covered_arc(collider, 0, 2));
    CHECK(is_covered_arc(tournament, 1, 2));
    CHECK_THROWS_AS(is_covered_arc(collider, 2, 0), DataError);
    CHECK(reverse_covered_arc(DagStructure(Parents{{}, {0}}), 0, 1) == DagStructure(Parents{{1}, {}}));
    CHECK_THROWS_AS(reverse_covered_arc(collider, 0, 2), DataError);
}

TEST_CASE("covered arc reversal identities", "[dag][property]") {
    std::mt19937_64 rng(29);
    for (int iter = 0; iter < 300; ++iter) {
        const auto g = testing::random_dag(rng, 2 + testing::uniform_index(rng, 5), 0.6);
        for (auto [a, b] : covered_arcs(g)) {
            const auto h = reverse_covered_arc(g, a, b);
            const Set ga = as_set(g.parents(a)), gb = as_set(g.parents(b));
            const Set ha = as_set(h.parents(a)), hb = as_set(h.parents(b));
            CHECK(hb == without(gb, a));
            CHECK(ha == with(ga, b));
            CHECK(hb == ga);
            CHECK(with(gb, b) == with(with(ga, a), b));
            CHECK(with(gb, b) == with(ha, a));
            CHECK(ha == with(hb, b));
            CHECK(to_cpdag(g) == to_cpdag(h));
        }
    }
}

TEST_CASE("cpdag examples", "[dag]") {
    const auto two = to_cpdag(DagStructure(Parents{{}, {0}}));
    CHECK(two.undirected(0, 1));
    CHECK(two.directed_edges().empty());
    const auto v = to_cpdag(collider);
    CHECK(v.directed(0, 2));
    CHECK(v.directed(1, 2));
    CHECK(v.undirected_edges().empty());
    const auto c = to_cpdag(chain);
    CHECK(c.directed_edges().empty());
    CHECK(c.undirected_edges().size() == 2);
    // R1 propagates out of a collider: A -> C <- B, C -> D.
    const auto r1 = to_cpdag(DagStructure(Parents{{}, {}, {0, 1}, {2}}));
    CHECK(r1.directed(2, 3));
}

TEST_CASE("cpdag is a fixpoint and identifies equivalence classes", "[dag][property]") {
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto dags = enumerate_dags(n);
        for (const auto& g : dags) {
            auto p = to_cpdag(g);
            const auto before = p;
            CHECK_FALSE(p.apply_orientation_rules());
            CHECK(p == before);
            for (const auto& h : equivalence_class(g)) CHECK(to_cpdag(h) == before);
        }
        if (n == 3) {
            // pairs with equal patterns are exactly the equivalent pairs
            for (const auto& g : dags)
                for (const auto& h : dags) {
                    const bool same_skeleton_and_v = [&] {
                        for (std::size_t a = 0; a < n; ++a)
                            for (std::size_t b = 0; b < n; ++b)
                                if (g.adjacent(a, b) != h.adjacent(a, b)) return false;
                        for (std::size_t c = 0; c < n; ++c)
                            for (auto a : g.parents(c))
                                for (auto b : g.parents(c))
                                    if (a < b && !g.adjacent(a, b) && !(h.has_arc(a, c) && h.has_arc(b, c)))
                                        return false;
                        for (std::size_t c = 0; c < n; ++c)
                            for (auto a : h.parents(c))
                                for (auto b : h.parents(c))
                                    if (a < b && !h.adjacent(a, b) && !(g.has_arc(a, c) && g.has_arc(b, c)))
                                        return false;
                        return true;
                    }();
                    CHECK(markov_equivalent(g, h) == same_skeleton_and_v);
                }
        }
    }
}

TEST_CASE("structural Hamming distance", "[dag]") {
    CHECK(shd(chain, chain) == 0);
    CHECK(shd(DagStructure(Parents{{}, {0}}), DagStructure(Parents{{1}, {}})) == 0);
    CHECK(shd(chain, DagStructure(3)) == 2);
    CHECK(shd(chain, collider) == 3);  // every pair differs
    CHECK_THROWS_AS(shd(chain, DagStructure(2)), DataError);
}

TEST_CASE("shd is a pseudometric", "[dag][property]") {
    std::mt19937_64 rng(31);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t n = 2 + testing::uniform_index(rng, 5);
        const auto a = testing::random_dag(rng, n, 0.4);
        const auto b = testing::random_dag(rng, n, 0.4);
        const auto c = testing::random_dag(rng, n, 0.4);
        CHECK(shd(a, b) == shd(b, a));
        CHECK(shd(a, c) <= shd(a, b) + shd(b, c));
        CHECK(shd(a, a) == 0);
        CHECK((shd(a, b) == 0) == markov_equivalent(a, b));
    }
}

TEST_CASE("connected components and tournaments", "[dag]") {
    CHECK(connected_components(DagStructure(3)).size() == 3);
    const auto comps = connected_components(DagStructure(Parents{{}, {0}, {}}));
    CHECK(comps == std::vector<std::vector<std::size_t>>{{0, 1}, {2}});
    CHECK(connected_components(tournament).size() == 1);
    CHECK(is_tournament_component_dag(DagStructure(4)));
    CHECK(is_tournament_component_dag(tournament));
    CHECK_FALSE(is_tournament_component_dag(chain));
}

TEST_CASE("tournament-component counts", "[dag]") {
    const std::uint64_t expected[] = {1, 1, 3, 13, 73, 501, 4051, 37633, 394353, 4596553};
    for (std::size_t n = 0; n < 10; ++n) CHECK(count_tournament_component_dags(n) == expected[n]);
    CHECK(count_tournament_component_dags(12) == 12470162233ull);
    CHECK_THROWS_AS(count_tournament_component_dags(13), ResourceError);
    const std::size_t dag_counts[] = {1, 1, 3, 25, 543};
    for (std::size_t n = 0; n <= 4; ++n) {
        const auto dags = enumerate_dags(n);
        CHECK(dags.size() == dag_counts[n]);
        std::uint64_t t = 0;
        for (const auto& g : dags) t += is_tournament_component_dag(g);
        CHECK(t == count_tournament_component_dags(n));
    }
}

TEST_CASE("parameter count", "[dag]") {
    const std::vector<std::size_t> ar{2, 3, 2};
    CHECK(parameter_count(DagStructure(3), ar) == 1 + 2 + 1);
    CHECK(parameter_count(collider, ar) == 1 + 2 + 6);
}

TEST_CASE("brute-force NML", "[dag][oracle]") {
    ScoreConfig cfg;
    cfg.criterion = Criterion::qnml;
    cfg.regret_method = RegretMethod::exact;
    SECTION("single column") {
        const auto d = Dataset::from_rows({}, {3}, {{0}, {2}, {2}, {1}});
        const double ml = max_loglik_conditional(contingency(d, 0, {}));
        CHECK(std::abs(nml_bruteforce(d, DagStructure(1)) - (ml - regret_bruteforce_oracle(4, 3))) < 1e-12);
    }
    SECTION("empty graph factorizes") {
        const auto d = Dataset::from_rows({}, {2, 3}, {{0, 0}, {1, 2}, {1, 1}});
        double expect = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            expect += max_loglik_conditional(contingency(d, i, {})) - regret_exact(3, d.arity(i));
        CHECK(std::abs(nml_bruteforce(d, DagStructure(2)) - expect) < 1e-9);
    }
    SECTION("guard") {
        std::vector<std::vector<Category>> rows(20, std::vector<Category>{0, 0, 0});
        const auto d = Dataset::from_rows({}, {2, 2, 2}, rows);
        CHECK_THROWS_AS(nml_bruteforce(d, DagStructure(3)), ResourceError);
    }
    SECTION("qNML equals NML on tournament-component graphs only") {
        std::mt19937_64 rng(43);
        bool some_differ = false;
        for (std::size_t n = 2; n <= 3; ++n) {
            const auto dags = enumerate_dags(n);
            for (std::size_t N = 2; N <= 4; ++N)
                for (int rep = 0; rep < 6; ++rep) {
                    const auto d = testing::random_dataset(rng, n, N, 2, 2);
                    for (const auto& g : dags) {
                        const double diff = std::abs(nml_bruteforce(d, g) - total_score(d, g, cfg));
                        if (is_tournament_component_dag(g))
                            CHECK(diff < 1e-9);
                        else if (diff > 1e-6)
                            some_differ = true;
                    }
                }
        }
        CHECK(some_differ);
    }
}
