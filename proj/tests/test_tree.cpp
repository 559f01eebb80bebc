#include <doctest.h>

#include "oracles.hpp"

#include <phylocsp/error.hpp>
#include <phylocsp/tree.hpp>

#include <set>

using namespace phylo;

namespace {

std::vector<std::string> labels(int n)
{
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i)
        out.push_back(std::string(1, static_cast<char>('a' + i)));
    return out;
}

}  // namespace

TEST_CASE("yca")
{
    Tree t = Tree::parse_newick("((a,b),c);");
    CHECK(t.yca({"a", "b"}) == t.parent(t.leaf_node("a")));
    CHECK(t.yca({"a", "c"}) == t.root());
    Tree u = Tree::parse_newick("(((a,b),c),d)");
    CHECK(u.yca({"b", "c", "d"}) == u.root());
    CHECK(u.yca({"b"}) == u.leaf_node("b"));
    CHECK_THROWS_AS(u.yca({"q"}), Error);
}

TEST_CASE("clan separation")
{
    Tree t = Tree::parse_newick("((a,b),(c,d));");
    CHECK(t.clan_separated({"a", "b"}, {"c", "d"}));
    CHECK(t.clan_separated({"c", "d"}, {"a", "b"}));
    Tree u = Tree::parse_newick("((a,b),c);");
    CHECK_FALSE(u.clan_separated({"a", "c"}, {"b"}));
    CHECK_FALSE(u.clan_separated({"a"}, {"a"}));
    CHECK_THROWS_AS(u.clan_separated({"a"}, {"z"}), Error);
}

TEST_CASE("cone")
{
    Tree t = Tree::parse_newick("((a,b),c);");
    CHECK(t.cone("c", "a", "b"));
    CHECK_FALSE(t.cone("a", "b", "c"));
    CHECK(t.cone("a", "c", "c"));
    CHECK(t.cone("c", "a", "a"));
    CHECK_FALSE(t.cone("a", "a", "b"));
    CHECK_FALSE(t.cone("a", "b", "a"));
    CHECK_FALSE(t.cone("a", "a", "a"));
}

TEST_CASE("cone agrees with the cluster definition on all small trees")
{
    for (int n = 1; n <= 5; ++n)
        for (const auto & t : enumerate_trees(labels(n))) {
            auto cl = oracle::clusters(t.to_newick());
            for (const auto & x : labels(n))
                for (const auto & y : labels(n))
                    for (const auto & z : labels(n))
                        REQUIRE(t.cone(x, y, z) == oracle::cone(cl, x, y, z));
        }
}

TEST_CASE("trichotomy on distinct leaves")
{
    for (const auto & t : enumerate_trees(labels(6))) {
        auto l = labels(6);
        for (std::size_t i = 0; i < l.size(); ++i)
            for (std::size_t j = i + 1; j < l.size(); ++j)
                for (std::size_t k = j + 1; k < l.size(); ++k) {
                    int n = t.cone(l[i], l[j], l[k]) + t.cone(l[j], l[i], l[k]) + t.cone(l[k], l[i], l[j]);
                    REQUIRE(n == 1);
                }
    }
}

TEST_CASE("clan separation matches its cone decomposition")
{
    auto l = labels(5);
    for (const auto & t : enumerate_trees(l))
        for (unsigned a = 1; a < 32; ++a)
            for (unsigned b = 1; b < 32; ++b) {
                if (a & b)
                    continue;
                std::vector<std::string> sa, sb;
                for (int i = 0; i < 5; ++i) {
                    if (a >> i & 1)
                        sa.push_back(l[i]);
                    if (b >> i & 1)
                        sb.push_back(l[i]);
                }
                bool decomposed = true;
                for (const auto & x : sa)
                    for (const auto & x2 : sa)
                        for (const auto & y : sb)
                            for (const auto & y2 : sb)
                                decomposed = decomposed && t.cone(y, x, x2) && t.cone(x, y, y2);
                REQUIRE(t.clan_separated(sa, sb) == decomposed);
                REQUIRE(t.clan_separated(sa, sb) == t.clan_separated(sb, sa));
            }
}

TEST_CASE("enumeration counts and distinctness")
{
    CHECK(enumerate_trees(labels(1)).size() == 1);
    CHECK(enumerate_trees(labels(3)).size() == 3);
    CHECK(enumerate_trees(labels(4)).size() == 15);
    for (int n = 2; n <= 7; ++n) {
        auto trees = enumerate_trees(labels(n));
        std::set<std::string> forms;
        for (const auto & t : trees)
            forms.insert(t.to_newick());
        CHECK(trees.size() == oracle::double_factorial_trees(n));
        CHECK(forms.size() == trees.size());
        CHECK(tree_count(n) == trees.size());
    }
    CHECK_THROWS_AS(enumerate_trees(labels(9)), BoundError);
}

TEST_CASE("newick round trip and canonical form")
{
    CHECK(Tree::parse_newick("(c,(b,a))").to_newick() == "((a,b),c);");
    CHECK(Tree::parse_newick("((d,c),(b,a));").to_newick() == "((a,b),(c,d));");
    CHECK(Tree::parse_newick("a;").to_newick() == "a;");
    CHECK(Tree::parse_newick(" ( ( a , b ) , c ) ; ").to_newick() == "((a,b),c);");
    for (const auto & t : enumerate_trees(labels(5)))
        CHECK(Tree::parse_newick(t.to_newick()) == t);
    CHECK(Tree::parse_newick("((a,b),c);") == Tree::parse_newick("(c,(b,a));"));
    Tree q = Tree::parse_newick("((a,b),(c,d));");
    CHECK(q.clan_separated({"a", "b"}, {"c", "d"}));
}

TEST_CASE("newick errors")
{
    CHECK_THROWS_AS(Tree::parse_newick("((a,b),c"), ParseError);
    CHECK_THROWS_AS(Tree::parse_newick("(a,b,c);"), ParseError);
    CHECK_THROWS_AS(Tree::parse_newick("((a,a),c);"), ParseError);
    CHECK_THROWS_AS(Tree::parse_newick("(a-b,c);"), ParseError);
    CHECK_THROWS_AS(Tree::parse_newick("(a,b);x"), ParseError);
    CHECK_THROWS_AS(Tree::parse_newick(""), ParseError);
}

TEST_CASE("join")
{
    Tree t = Tree::join(Tree::parse_newick("(a,b)"), Tree::leaf("c"));
    CHECK(t.cone("c", "a", "b"));
    CHECK(Tree::join(Tree::leaf("a"), Tree::leaf("b")).to_newick() == "(a,b);");
    Tree u = Tree::join(Tree::parse_newick("((a,b),c)"), Tree::parse_newick("(d,e)"));
    CHECK(u.clan_separated({"a", "c"}, {"d", "e"}));
    CHECK_THROWS_AS(Tree::join(Tree::leaf("a"), Tree::leaf("a")), Error);
}

TEST_CASE("induced subtree")
{
    Tree t = Tree::parse_newick("(((a,b),c),d)");
    std::vector<Tree::Node> sel{t.leaf_node("a"), t.leaf_node("b"), t.leaf_node("d")};
    CHECK(t.induced(sel, {"1", "2", "3"}).to_newick() == "((1,2),3);");
}

TEST_CASE("deep trees do not exhaust the stack")
{
    Tree::Builder b;
    Tree::Node top = b.add_leaf("v0");
    for (int i = 1; i < 50000; ++i)
        top = b.add_internal(top, b.add_leaf("v" + std::to_string(i)));
    Tree t = b.build(top);
    CHECK(t.leaf_count() == 50000);
    std::string s = t.to_newick();
    CHECK(Tree::parse_newick(s) == t);
    CHECK(t.cone("v49999", "v0", "v1"));
}

TEST_CASE("random trees are binary over the given labels")
{
    std::mt19937_64 rng(7);
    auto l = labels(8);
    for (int i = 0; i < 20; ++i) {
        Tree t = random_tree(l, rng);
        CHECK(t.leaf_count() == 8);
        CHECK(t.node_count() == 15);
    }
}
