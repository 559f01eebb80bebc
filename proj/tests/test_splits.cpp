#include <doctest.h>

#include "oracles.hpp"

#include <phylocsp/error.hpp>
#include <phylocsp/splits.hpp>

#include <random>
#include <set>

using namespace phylo;

namespace {

BooleanRelation parse_rel(std::initializer_list<const char *> bits)
{
    std::vector<BitVector> v;
    int n = 0;
    for (const char * b : bits) {
        v.push_back(bits_from_string(b));
        n = static_cast<int>(std::string(b).size());
    }
    return BooleanRelation(n, v);
}

Orbit orbit(const std::string & newick, std::vector<std::string> tuple)
{
    return orbit_of(Tree::parse_newick(newick), tuple);
}

std::set<oracle::Bits> as_set(const BooleanRelation & b)
{
    return {b.vectors().begin(), b.vectors().end()};
}

std::vector<std::pair<oracle::Bits, bool>> as_rows(const std::vector<Gf2Row> & rows)
{
    std::vector<std::pair<oracle::Bits, bool>> out;
    for (const auto & r : rows) {
        oracle::Bits m = 0;
        for (int v : r.vars)
            m ^= oracle::Bits{1} << v;
        out.emplace_back(m, r.rhs);
    }
    return out;
}

}  // namespace

TEST_CASE("bit vector text")
{
    CHECK(bits_to_string(bits_from_string("011"), 3) == "011");
    CHECK(bits_from_string("100") == 1u);
    CHECK_THROWS_AS(bits_from_string("012"), ParseError);
}

TEST_CASE("split vectors of orbits")
{
    CHECK(split_vectors(orbit("((a,b),c)", {"c", "a", "b"})) == parse_rel({"000", "111", "011", "100"}));
    CHECK(split_vectors(orbit("a", {"a", "a", "a"})) == parse_rel({"000", "111"}));
    CHECK(split_vectors(orbit("((a,b),(c,d))", {"a", "b", "c", "d"}))
        == parse_rel({"0000", "1111", "0011", "1100"}));
    CHECK(split_vectors(orbit("((a,b),c)", {"a", "a", "c"})) == parse_rel({"000", "111", "001", "110"}));
}

TEST_CASE("split vectors are closed under complement")
{
    for (int k = 1; k <= 5; ++k)
        for (const auto & o : enumerate_orbits(k)) {
            BooleanRelation s = split_vectors(o);
            for (BitVector v : s.vectors())
                REQUIRE(s.contains(v ^ s.ones()));
        }
}

TEST_CASE("split relations")
{
    ConstraintLanguage lang;
    CHECK(split_relation(relation_of(lang.get("C"))) == parse_rel({"000", "011", "100", "111"}));
    CHECK(split_relation(relation_of(lang.get("N")))
        == parse_rel({"000", "111", "001", "011", "110", "100"}));
    CHECK(split_relation(OrbitRelation(3)).empty());
}

TEST_CASE("affineness")
{
    CHECK(is_affine(parse_rel({"000", "011", "100", "111"})));
    CHECK_FALSE(is_affine(parse_rel({"000", "111", "001", "011", "110", "100"})));
    CHECK(is_affine(parse_rel({"0000", "1100", "0011", "1111"})));
    CHECK(is_affine(BooleanRelation(3)));
    auto w = affine_violation(parse_rel({"000", "111", "001", "011", "110", "100"}));
    REQUIRE(w);
    CHECK(! parse_rel({"000", "111", "001", "011", "110", "100"}).contains((*w)[0] ^ (*w)[1] ^ (*w)[2]));
}

TEST_CASE("affine hulls")
{
    auto c = affine_hull(parse_rel({"000", "011", "100", "111"}));
    REQUIRE(c.size() == 1);
    CHECK(std::set<int>(c[0].vars.begin(), c[0].vars.end()) == std::set<int>{1, 2});
    CHECK_FALSE(c[0].rhs);
    auto even = affine_hull(parse_rel({"0000", "0011", "0101", "0110", "1001", "1010", "1100", "1111"}));
    REQUIRE(even.size() == 1);
    CHECK(even[0].vars.size() == 4);
    auto consts = affine_hull(parse_rel({"00000", "11111"}));
    CHECK(consts.size() == 4);
    CHECK(oracle::solutions(5, as_rows(consts)) == std::set<oracle::Bits>{0, 31});
    CHECK_THROWS_AS(affine_hull(BooleanRelation(3)), Error);
}

TEST_CASE("hull solutions equal the relation exactly when it is affine")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        std::set<oracle::Bits> b;
        const int size = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < size; ++i)
            b.insert(static_cast<oracle::Bits>(rng() % (1u << n)));
        BooleanRelation r(n, {b.begin(), b.end()});
        auto sols = oracle::solutions(n, as_rows(affine_hull(r)));
        CHECK(is_affine(r) == oracle::closed_under_xor3(b));
        CHECK(is_affine(r) == (sols == b));
        for (auto v : b)
            CHECK(sols.count(v));
        CHECK(as_set(r) == b);
    }
}

TEST_CASE("solution dimension and enumeration")
{
    Gf2System sys(4);
    sys.add_row({{0, 1, 2, 3}, false});
    CHECK(solution_dimension(sys) == 3);
    CHECK(enumerate_solutions(sys).size() == 8);
    Gf2System bad(2);
    bad.add_row({{0, 1}, false});
    bad.add_row({{0, 1}, true});
    CHECK_FALSE(solution_dimension(bad));
    CHECK(enumerate_solutions(bad).empty());
    Gf2System cancel(2);
    cancel.add_row({{0, 0}, false});
    CHECK(solution_dimension(cancel) == 2);
}

TEST_CASE("nontrivial solutions")
{
    Gf2System even(4);
    even.add_row({{0, 1, 2, 3}, false});
    auto s = nontrivial_solution(even);
    REQUIRE(s);
    CHECK(even.satisfied_by(*s));
    int ones = (*s)[0] + (*s)[1] + (*s)[2] + (*s)[3];
    CHECK(ones > 0);
    CHECK(ones < 4);

    Gf2System pair(2);
    pair.add_row({{0, 1}, false});
    CHECK_FALSE(nontrivial_solution(pair));

    auto free2 = nontrivial_solution(Gf2System(2));
    REQUIRE(free2);
    CHECK((*free2)[0] != (*free2)[1]);

    Gf2System bad(2);
    bad.add_row({{0}, true});
    bad.add_row({{0}, false});
    CHECK_THROWS_AS(nontrivial_solution(bad), Error);
}

TEST_CASE("nontrivial solutions exist exactly above dimension one")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 9);
        Gf2System sys(n);
        const int rows = static_cast<int>(rng() % (n + 2));
        for (int r = 0; r < rows; ++r) {
            // even-length rows keep both constant vectors as solutions
            Gf2Row row;
            for (int v = 0; v < n; ++v)
                if (rng() & 1)
                    row.vars.push_back(v);
            if (row.vars.size() % 2)
                row.vars.pop_back();
            sys.add_row(row);
        }
        auto dim = solution_dimension(sys);
        REQUIRE(dim);
        std::mt19937_64 pick(trial);
        for (std::mt19937_64 * g : {static_cast<std::mt19937_64 *>(nullptr), &pick}) {
            auto s = nontrivial_solution(sys, g);
            CHECK(s.has_value() == (*dim >= 2));
            if (s) {
                CHECK(sys.satisfied_by(*s));
                CHECK(std::count(s->begin(), s->end(), 1) % n != 0);
            }
        }
    }
}

TEST_CASE("system text uses names")
{
    Gf2System sys(std::vector<std::string>{"a", "b"});
    sys.add_row({{0, 1}, false});
    CHECK(sys.to_string() == "a + b = 0\n");
}
