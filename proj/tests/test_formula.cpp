#include <doctest.h>

#include "oracles.hpp"

#include <phylocsp/error.hpp>
#include <phylocsp/formula.hpp>

using namespace phylo;

namespace {

std::vector<std::string> xs(int k)
{
    std::vector<std::string> v;
    for (int i = 1; i <= k; ++i)
        v.push_back("x" + std::to_string(i));
    return v;
}

bool eval_on(const RelationDef & r, const std::string & newick, const std::vector<std::string> & leaves)
{
    Tree t = Tree::parse_newick(newick);
    std::map<std::string, std::string> a;
    for (std::size_t i = 0; i < leaves.size(); ++i)
        a[r.def.vars[i]] = leaves[i];
    return evaluate(r.def, t, a);
}

}  // namespace

TEST_CASE("language parsing")
{
    auto lang = parse_language("# a comment\nrel R/3 := cone(x1,x2,x3)\nrel S/2 := x1 != x2 or x1 = x2\n");
    REQUIRE(lang.declared().size() == 2);
    CHECK(lang.get("R").arity() == 3);
    CHECK(lang.get("R").def.body == Formula::cone(0, 1, 2));
    CHECK(lang.find("C") != nullptr);
    CHECK(lang.find("Zz") == nullptr);
    CHECK(lang.get("Nd").arity() == 3);
}

TEST_CASE("language errors carry positions")
{
    try {
        parse_language("rel R/3 := cone(x1,x2,x3)\nrel T/2 := x1 = \n");
        FAIL("expected a parse error");
    }
    catch (const ParseError & e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_language("rel R/2 := cone(x1,x2,x3)"), ParseError);
    CHECK_THROWS_AS(parse_language("rel R/1 := x1 = x1\nrel R/1 := x1 = x1"), ParseError);
    CHECK_THROWS_AS(parse_language("rel C/3 := cone(x1,x2,x3)"), ParseError);
    CHECK_THROWS_AS(parse_language("rel R/3 := exists(x1)"), ParseError);
    CHECK_THROWS_AS(parse_language("use Zz"), ParseError);
}

TEST_CASE("use declares builtins")
{
    auto lang = parse_language("use C, Q\nuse N");
    REQUIRE(lang.declared().size() == 3);
    CHECK(lang.declared()[1].name == "Q");
    CHECK(lang.declared()[1].builtin);
    CHECK(parse_language(to_phl(lang)).declared().size() == 3);
}

TEST_CASE("builtin definitions")
{
    const auto & q = ConstraintLanguage{}.get("Q");
    CHECK(eval_on(q, "((a,b),(c,d))", {"a", "b", "c", "d"}));
    CHECK(eval_on(q, "(((a,b),c),d)", {"a", "b", "c", "d"}));
    CHECK(eval_on(q, "(((c,d),a),b)", {"a", "b", "c", "d"}));
    CHECK_FALSE(eval_on(q, "((a,c),(b,d))", {"a", "b", "c", "d"}));
    const auto & nd = ConstraintLanguage{}.get("Nd");
    CHECK(eval_on(nd, "((a,b),c)", {"a", "b", "c"}));
    CHECK(eval_on(nd, "((b,c),a)", {"a", "b", "c"}));
    CHECK_FALSE(eval_on(nd, "((a,c),b)", {"a", "b", "c"}));
    CHECK_FALSE(eval_on(nd, "(a,c)", {"a", "a", "c"}));
    const auto & n = ConstraintLanguage{}.get("N");
    CHECK(eval_on(n, "(a,c)", {"a", "a", "c"}));
    const auto & cd = ConstraintLanguage{}.get("Cd");
    CHECK(eval_on(cd, "((a,b),c)", {"c", "a", "b"}));
    CHECK_FALSE(eval_on(cd, "(a,c)", {"c", "a", "a"}));
}

TEST_CASE("formula evaluation")
{
    auto vars = std::vector<std::string>{"x", "y", "z"};
    PhyloFormula f{vars, parse_formula("cone(x,y,z)", vars)};
    Tree t = Tree::parse_newick("((a,b),c)");
    CHECK(evaluate(f, t, {{"x", "c"}, {"y", "a"}, {"z", "b"}}));
    PhyloFormula e{vars, parse_formula("x = y", vars)};
    CHECK(evaluate(e, t, {{"x", "a"}, {"y", "a"}, {"z", "b"}}));
    CHECK_THROWS_AS(evaluate(e, t, {{"x", "a"}}), Error);
}

TEST_CASE("negated cone as a disjunction")
{
    auto vars = xs(3);
    Formula neg = parse_formula("not cone(x1,x2,x3)", vars);
    Formula disj = parse_formula("(x1 = x2 and x2 = x3) or cone(x2,x1,x3) or cone(x3,x1,x2) or "
                                 "(x1 = x2 and x1 != x3) or (x1 = x3 and x1 != x2)",
        vars);
    for (int n = 1; n <= 3; ++n) {
        std::vector<std::string> labels{"a", "b", "c"};
        labels.resize(n);
        for (const auto & t : enumerate_trees(labels))
            for (const auto & p : labels)
                for (const auto & q : labels)
                    for (const auto & r : labels) {
                        std::vector<Tree::Node> nodes{t.leaf_node(p), t.leaf_node(q), t.leaf_node(r)};
                        REQUIRE(evaluate(neg, t, nodes) == evaluate(disj, t, nodes));
                        REQUIRE(evaluate(neg, t, nodes) == evaluate(to_nnf(neg), t, nodes));
                    }
    }
}

TEST_CASE("printer round trip")
{
    auto vars = xs(4);
    for (const char * text : {"cone(x1,x2,x3) and x2 != x3", "not (x1 = x2 or cone(x4,x1,x2))",
             "(cone(x3,x1,x2) and cone(x4,x1,x2)) or (cone(x1,x3,x4) and cone(x2,x3,x4))", "true", "false",
             "not not x1 = x2"}) {
        Formula f = parse_formula(text, vars);
        CHECK(parse_formula(to_string(f, vars), vars) == f);
    }
    for (const auto & r : builtin_relations())
        CHECK(parse_formula(to_string(r.def.body, r.def.vars), r.def.vars) == r.def.body);
}

TEST_CASE("evaluation is invariant under leaf renaming")
{
    const auto & q = ConstraintLanguage{}.get("Q");
    std::vector<std::string> l{"a", "b", "c", "d"}, r{"p", "q", "r", "s"};
    for (const auto & t : enumerate_trees(l)) {
        std::string nw = t.to_newick();
        std::string renamed = nw;
        for (char & c : renamed)
            if (c >= 'a' && c <= 'd')
                c = static_cast<char>('p' + (c - 'a'));
        for (int m = 0; m < 256; ++m) {
            std::vector<std::string> a, b;
            for (int i = 0; i < 4; ++i) {
                a.push_back(l[m >> (2 * i) & 3]);
                b.push_back(r[m >> (2 * i) & 3]);
            }
            REQUIRE(eval_on(q, nw, a) == eval_on(q, renamed, b));
        }
    }
}

TEST_CASE("instance parsing")
{
    Instance t = parse_triples("a b | c\n");
    REQUIRE(t.constraints.size() == 1);
    CHECK(t.constraints[0].relation == "C");
    CHECK(t.vars[t.constraints[0].args[0]] == "c");
    CHECK(t.vars[t.constraints[0].args[1]] == "a");
    CHECK(t.vars[t.constraints[0].args[2]] == "b");
    Instance two = parse_triples("a b | c\nc d | a\n");
    CHECK(two.vars.size() == 4);
    CHECK(two.constraints.size() == 2);
    ConstraintLanguage lang;
    Instance q = parse_instance("Q(a,b,c,d)\n", &lang);
    CHECK(q.constraints[0].relation == "Q");
    Instance h = parse_instance("language lang.phl\nvars u\nC(a,b,c)\n");
    CHECK(h.language_file == "lang.phl");
    CHECK(h.vars.size() == 4);
    CHECK(parse_instance(to_phy(h)).vars == h.vars);
    CHECK_THROWS_AS(parse_instance("Zz(a)\n", &lang), ParseError);
    CHECK_THROWS_AS(parse_instance("C(a,b)\n", &lang), ParseError);
    CHECK_THROWS_AS(parse_instance("C(a,b,c\n", &lang), ParseError);
    CHECK_THROWS_AS(parse_triples("a b c\n"), ParseError);
}

TEST_CASE("solution verification")
{
    ConstraintLanguage lang;
    Instance inst = parse_triples("a b | c\n");
    Solution good{Tree::parse_newick("((a,b),c)"), {{"a", "a"}, {"b", "b"}, {"c", "c"}}};
    CHECK(verify_solution(inst, lang, good));
    Solution bad{Tree::parse_newick("((a,c),b)"), {{"a", "a"}, {"b", "b"}, {"c", "c"}}};
    CHECK_FALSE(verify_solution(inst, lang, bad));
    Instance eq = parse_instance("Eq(x,y)\n", &lang);
    Solution same{Tree::leaf("l"), {{"x", "l"}, {"y", "l"}}};
    CHECK(verify_solution(eq, lang, same));
    Solution unused_leaf{Tree::parse_newick("(l,m)"), {{"x", "l"}, {"y", "l"}}};
    CHECK_FALSE(verify_solution(eq, lang, unused_leaf));
    Solution partial{Tree::leaf("l"), {{"x", "l"}}};
    CHECK_FALSE(verify_solution(eq, lang, partial));
    CHECK(to_mapping(good) == "a -> a\nb -> b\nc -> c\n");
}
