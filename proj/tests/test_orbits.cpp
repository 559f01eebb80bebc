#include <doctest.h>

#include "oracles.hpp"

#include <phylocsp/error.hpp>
#include <phylocsp/orbits.hpp>

#include <set>

using namespace phylo;

namespace {

std::vector<std::string> xs(int k)
{
    std::vector<std::string> v;
    for (int i = 1; i <= k; ++i)
        v.push_back("x" + std::to_string(i));
    return v;
}

OrbitRelation rel(const std::string & name)
{
    return relation_of(ConstraintLanguage{}.get(name));
}

std::size_t bell_weighted(int k)
{
    std::size_t total = 0;
    for (const auto & p : enumerate_patterns(k))
        total += oracle::double_factorial_trees(p.block_count());
    return total;
}

}  // namespace

TEST_CASE("equality patterns")
{
    CHECK(enumerate_patterns(3).size() == 5);
    CHECK(enumerate_patterns(5).size() == 52);
    EqualityPattern p({0, 0, 1});
    CHECK(p.to_string() == "{1,2}{3}");
    CHECK(EqualityPattern({3, 3, 7}) == p);
    CHECK(EqualityPattern::meet(EqualityPattern({0, 0, 1}), EqualityPattern({0, 1, 1})).distinct());
    CHECK(EqualityPattern::all_distinct(3).refines(p));
    CHECK_FALSE(p.refines(EqualityPattern::all_distinct(3)));
}

TEST_CASE("orbit catalogue sizes")
{
    CHECK(enumerate_orbits(1).size() == 1);
    CHECK(enumerate_orbits(2).size() == 2);
    CHECK(enumerate_orbits(3).size() == 7);
    CHECK(enumerate_orbits(4).size() == 41);
    for (int k = 1; k <= 6; ++k)
        CHECK(enumerate_orbits(k).size() == bell_weighted(k));
    CHECK_THROWS_AS(enumerate_orbits(7), BoundError);
}

TEST_CASE("orbit catalogue matches brute-force signatures")
{
    for (int k = 1; k <= 5; ++k)
        CHECK(enumerate_orbits(k).size() == oracle::orbit_count_by_signatures(k));
}

TEST_CASE("orbit keys are unique")
{
    std::set<std::string> keys;
    for (const auto & o : enumerate_orbits(5))
        keys.insert(o.key());
    CHECK(keys.size() == enumerate_orbits(5).size());
}

TEST_CASE("orbit of a tuple")
{
    Tree t = Tree::parse_newick("((a,b),c)");
    Orbit o = orbit_of(t, std::vector<std::string>{"c", "a", "b"});
    CHECK(o.pattern().distinct());
    CHECK(o.cone(0, 1, 2));
    CHECK(orbit_of(t, std::vector<std::string>{"a", "a", "a"}).all_equal());
    Tree u = Tree::parse_newick("(((a,b),c),d)");
    Orbit w = orbit_of(u, std::vector<std::string>{"a", "b", "d"});
    CHECK(w.cone(2, 0, 1));
}

TEST_CASE("relations of formulas")
{
    OrbitRelation c = rel("C");
    CHECK(c.size() == 2);
    for (const auto & [k, o] : c)
        CHECK(o.cone(0, 1, 2));
    CHECK(rel("N").size() == 4);
    CHECK(rel("Cd").size() == 1);
    CHECK(relation_of_formula(parse_formula("x1 = x2", xs(2)), 2).size() == 1);
}

TEST_CASE("faithfulness: formula evaluation equals orbit membership")
{
    ConstraintLanguage lang;
    std::vector<std::string> leaves{"a", "b", "c", "d", "e"};
    for (const char * name : {"C", "Q", "N", "Qd"}) {
        const RelationDef & r = lang.get(name);
        OrbitRelation orbits = relation_of(r);
        const int k = r.arity();
        for (const auto & t : enumerate_trees(leaves)) {
            std::vector<int> digits(k, 0);
            while (true) {
                std::vector<Tree::Node> nodes;
                for (int d : digits)
                    nodes.push_back(t.leaf_node(leaves[d]));
                REQUIRE(evaluate(r.def.body, t, nodes) == orbits.contains(orbit_of(t, nodes)));
                int i = 0;
                while (i < k && ++digits[i] == 5)
                    digits[i++] = 0;
                if (i == k)
                    break;
            }
        }
    }
}

TEST_CASE("projection")
{
    OrbitRelation c = rel("C");
    std::vector<int> first_two{0, 1};
    OrbitRelation p = project(c, first_two);
    REQUIRE(p.size() == 1);
    CHECK(p.orbits().front().pattern().distinct());
    std::vector<int> all{0, 1, 2};
    CHECK(project(c, all) == c);
    OrbitRelation eq(3);
    eq.insert(enumerate_orbits(3).front());
    CHECK(project(eq, first_two).orbits().front().all_equal());
    CHECK_THROWS_AS(project(c, std::vector<int>{}), Error);
}

TEST_CASE("projection commutes with existential quantification")
{
    ConstraintLanguage lang;
    for (const char * name : {"Q", "N", "C"}) {
        const RelationDef & r = lang.get(name);
        const int k = r.arity();
        // drop the last coordinate
        PPFormula pp{k - 1, k, {{name, {}}}};
        for (int i = 0; i < k; ++i)
            pp.atoms[0].args.push_back(i);
        std::vector<int> keep;
        for (int i = 0; i < k - 1; ++i)
            keep.push_back(i);
        CHECK(pp_relation(pp, lang) == project(relation_of(r), keep));
    }
}

TEST_CASE("pp definitions")
{
    ConstraintLanguage lang;
    // x != y as an existential over Cd
    PPFormula neq{2, 3, {{"Cd", {0, 1, 2}}}};
    CHECK(pp_relation(neq, lang) == relation_of(lang.get("Neq")));
    // C from Cd
    PPFormula c{3, 4, {{"Cd", {0, 1, 3}}, {"Cd", {0, 2, 3}}}};
    CHECK(pp_relation(c, lang) == rel("C"));
    // N from Cd and Nd: Cd(v,x,u), Cd(u,v,z), Nd(u,y,v)
    PPFormula n{3, 5, {{"Cd", {4, 0, 3}}, {"Cd", {3, 4, 2}}, {"Nd", {3, 1, 4}}}};
    CHECK(pp_relation(n, lang) == rel("N"));
    // with y and z exchanged the same atoms define N(x,z,y)
    PPFormula n_swapped{3, 5, {{"Cd", {4, 0, 3}}, {"Cd", {3, 4, 1}}, {"Nd", {3, 2, 4}}}};
    const std::vector<int> xzy{0, 2, 1};
    PPFormula n_perm{3, 3, {{"N", xzy}}};
    CHECK(pp_relation(n_swapped, lang) == pp_relation(n_perm, lang));
    CHECK(pp_relation(n_swapped, lang) != rel("N"));
    // Q from four Q atoms or four Qd atoms
    PPFormula q{4, 6, {{"Q", {4, 0, 5, 2}}, {"Q", {4, 0, 5, 3}}, {"Q", {4, 1, 5, 2}}, {"Q", {4, 1, 5, 3}}}};
    CHECK(pp_relation(q, lang) == rel("Q"));
    for (auto & a : q.atoms)
        a.relation = "Qd";
    CHECK(pp_relation(q, lang) == rel("Q"));
    // Cd from Nd
    PPFormula cd{3, 3, {{"Nd", {0, 2, 1}}, {"Nd", {0, 1, 2}}}};
    CHECK(pp_relation(cd, lang) == rel("Cd"));
    PPFormula too_big{4, 7, {{"Q", {0, 1, 2, 3}}}};
    CHECK_THROWS_AS(pp_relation(too_big, lang), BoundError);
}
