#include <doctest.h>

#include <phylocsp/error.hpp>
#include <phylocsp/oracle.hpp>
#include <phylocsp/solver.hpp>

#include <random>

using namespace phylo;

namespace {

BooleanRelation parse_rel(int n, std::initializer_list<const char *> bits)
{
    std::vector<BitVector> v;
    for (const char * b : bits)
        v.push_back(bits_from_string(b));
    return BooleanRelation(n, v);
}

const BooleanRelation even4 = parse_rel(4, {"0000", "0011", "0101", "0110", "1001", "1010", "1100", "1111"});

// Satisfiability of an affine Horn formula by brute force over trees on
// partitions of its variables.
bool brute_force_sat(const AffineHornFormula & f)
{
    const int n = f.arity();
    for (const auto & p : enumerate_patterns(n)) {
        std::vector<std::string> labels;
        for (int b = 0; b < p.block_count(); ++b)
            labels.push_back("b" + std::to_string(b));
        bool found = false;
        for_each_tree(labels, [&](const Tree & t) {
            std::vector<Tree::Node> nodes;
            for (int v = 0; v < n; ++v)
                nodes.push_back(t.leaf_node(labels[p.block_of(v)]));
            found = evaluate(f, t, nodes);
            return ! found;
        });
        if (found)
            return true;
    }
    return false;
}

}  // namespace

TEST_CASE("contraction")
{
    AffineHornFormula f = parse_horn("vars x y z\nx != y or x != z\n");
    AffineHornFormula g = contract(f, {1, 2});
    CHECK(to_horn(g) == "vars x y\nx != y\n");

    AffineHornFormula h = parse_horn("vars x y z\nsplit{011,100 on (x,y,z)}\n");
    AffineHornFormula hc = contract(h, {0, 1});
    CHECK(to_horn(hc) == "vars x z\nsplit{on (x,z)}\n");

    AffineHornFormula e = parse_horn("vars x y\nx != y\n");
    CHECK(to_horn(contract(e, {0, 1})) == "vars x\nfalse\n");

    AffineHornFormula collapse = parse_horn("vars x y\nsplit{01,10 on (x,y)}\n");
    CHECK(to_horn(contract(collapse, {0, 1})) == "vars x\n");
}

TEST_CASE("split problem")
{
    AffineHornFormula f;
    for (const char * v : {"x1", "x2", "x3", "x4", "x5", "x6"})
        f.add_var(v);
    f.clauses.push_back(phi_b(even4, {0, 1, 2, 3}));
    f.clauses.push_back(phi_b(even4, {2, 3, 4, 5}));
    CHECK(build_split_problem(f).to_string() == "x1 + x2 + x3 + x4 = 0\nx3 + x4 + x5 + x6 = 0\n");

    AffineHornFormula c = parse_horn("vars x y z\nsplit{011,100 on (x,y,z)}\nx != y\n");
    CHECK(build_split_problem(c).to_string() == "y + z = 0\n");

    AffineHornFormula d = parse_horn("vars x y z\nx != y\ny != z or split{011,100 on (x,y,z)}\n");
    CHECK(build_split_problem(d).rows().empty());
}

TEST_CASE("spec")
{
    ConstraintLanguage lang;
    CertificateCache certs;
    Instance inst = parse_triples("a b | c\nc d | a\n");
    AffineHornFormula f = to_affine_horn(inst, lang, certs);
    SpecResult r = spec(f);
    REQUIRE(r.tree);
    CHECK(r.tree->leaf_count() == 4);
    Solution sol{*r.tree, {}};
    for (const auto & v : f.vars)
        sol.assignment[v] = v;
    CHECK(verify_solution(f, sol));

    AffineHornFormula forced = parse_horn("vars x y z\nsplit{on (x,y)}\nsplit{on (y,z)}\n");
    SpecResult fr = spec(forced);
    CHECK_FALSE(fr.tree);
    CHECK(fr.forced == std::vector<int>{0, 1, 2});
}

TEST_CASE("solve")
{
    ConstraintLanguage lang;
    Verdict sat = solve_instance(parse_triples("a b | c\nc d | a\n"), lang);
    CHECK(sat.sat);
    Verdict unsat = solve_instance(parse_triples("a b | c\nb c | a\na c | b\n"), lang);
    CHECK_FALSE(unsat.sat);
    CHECK_FALSE(unsat.reason.empty());
    Verdict eq = solve(parse_horn("vars x y\nsplit{on (x,y)}\nx != y\n"));
    CHECK_FALSE(eq.sat);
    Verdict empty = solve(AffineHornFormula{});
    CHECK(empty.sat);
}

TEST_CASE("solving refuses languages without certificates")
{
    ConstraintLanguage lang;
    CHECK_THROWS_AS(solve_instance(parse_instance("Q(a,b,c,d)\n", &lang), lang), NotAffineHornError);
}

TEST_CASE("repeated arguments are contracted inside constraints")
{
    ConstraintLanguage lang;
    Verdict v = solve_instance(parse_instance("C(a,b,b)\nC(b,a,a)\n", &lang), lang);
    CHECK(v.sat);
    Verdict w = solve_instance(parse_instance("Cd(a,b,b)\n", &lang), lang);
    CHECK_FALSE(w.sat);
}

TEST_CASE("forced sets are really forced")
{
    // variables reported as forced are equal in every solution
    std::mt19937_64 rng(23);
    const std::vector<BooleanRelation> parts{
        parse_rel(3, {"011", "100"}), parse_rel(2, {}), even4, parse_rel(4, {"0011", "1100"})};
    int forced_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        AffineHornFormula f;
        const int n = 4 + static_cast<int>(rng() % 2);
        for (int i = 0; i < n; ++i)
            f.add_var("v" + std::to_string(i));
        const int m = 1 + static_cast<int>(rng() % 4);
        for (int c = 0; c < m; ++c) {
            const auto & b = parts[rng() % parts.size()];
            std::vector<int> vars;
            while (static_cast<int>(vars.size()) < b.arity()) {
                int v = static_cast<int>(rng() % n);
                if (std::find(vars.begin(), vars.end(), v) == vars.end())
                    vars.push_back(v);
            }
            AffineHornClause cl = phi_b(b, vars);
            if (rng() % 3 == 0)
                cl.neq.emplace_back(vars[0], vars[1]);
            f.clauses.push_back(cl);
        }
        SpecResult r = spec(f);
        if (r.forced.empty())
            continue;
        ++forced_seen;
        // every solution identifies all forced variables
        const int k = f.arity();
        for (const auto & p : enumerate_patterns(k)) {
            std::vector<std::string> labels;
            for (int b = 0; b < p.block_count(); ++b)
                labels.push_back("b" + std::to_string(b));
            for_each_tree(labels, [&](const Tree & t) {
                std::vector<Tree::Node> nodes;
                for (int v = 0; v < k; ++v)
                    nodes.push_back(t.leaf_node(labels[p.block_of(v)]));
                if (evaluate(f, t, nodes))
                    for (int v : r.forced)
                        REQUIRE(p.equal(v, r.forced.front()));
                return true;
            });
        }
        Verdict v = solve(f);
        CHECK(v.sat == brute_force_sat(f));
    }
    CHECK(forced_seen > 0);
}

TEST_CASE("solver agrees with brute force on random formulas")
{
    std::mt19937_64 rng(29);
    const std::vector<BooleanRelation> parts{parse_rel(3, {"011", "100"}), parse_rel(2, {}), even4,
        parse_rel(4, {"0011", "1100"}), parse_rel(3, {"001", "110"})};
    for (int trial = 0; trial < 300; ++trial) {
        AffineHornFormula f;
        const int n = 2 + static_cast<int>(rng() % 4);
        for (int i = 0; i < n; ++i)
            f.add_var("v" + std::to_string(i));
        const int m = 1 + static_cast<int>(rng() % 5);
        for (int c = 0; c < m; ++c) {
            AffineHornClause cl;
            if (rng() % 4) {
                const auto & b = parts[rng() % parts.size()];
                std::vector<int> vars;
                for (int i = 0; i < b.arity(); ++i)
                    vars.push_back(static_cast<int>(rng() % n));
                cl.affine = AffinePart{vars, b};
            }
            const int neqs = static_cast<int>(rng() % 3);
            for (int i = 0; i < neqs; ++i)
                cl.neq.emplace_back(static_cast<int>(rng() % n), static_cast<int>(rng() % n));
            f.clauses.push_back(cl);
        }
        std::mt19937_64 pick(trial);
        Verdict a = solve(f);
        Verdict b = solve(f, &pick);
        bool truth = brute_force_sat(f);
        INFO(to_horn(f));
        CHECK(a.sat == truth);
        CHECK(b.sat == truth);
        if (a.sat)
            CHECK(verify_solution(f, *a.solution));
    }
}

TEST_CASE("contractions stay below the variable count")
{
    ConstraintLanguage lang;
    Instance inst = random_satisfiable_triples(30, 60, 4);
    Verdict v = solve_instance(inst, lang);
    CHECK(v.sat);
    CHECK(v.contractions < inst.vars.size());
}

TEST_CASE("large satisfiable triple instances")
{
    ConstraintLanguage lang;
    Instance inst = random_satisfiable_triples(500, 2000, 1);
    Verdict v = solve_instance(inst, lang);
    REQUIRE(v.sat);
    CHECK(verify_solution(inst, lang, *v.solution));
}

TEST_CASE("certificate cache")
{
    CertificateCache certs;
    ConstraintLanguage lang;
    const auto & c = certs.get(lang.get("C"));
    CHECK(c.arity() == 3);
    CHECK(certs.all().size() == 1);
    CHECK_THROWS_AS(certs.get(lang.get("N")), NotAffineHornError);
}
