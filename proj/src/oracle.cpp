#include <phylocsp/oracle.hpp>
#include <phylocsp/orbits.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace phylo {

std::size_t oracle_candidate_count(std::size_t n)
{
    if (n == 0)
        return 1;
    return orbit_count(static_cast<int>(n));
}

namespace {

struct ResolvedConstraint {
    const Formula * body;
    const std::vector<int> * args;
};

struct PartitionHit {
    Tree tree;
    std::size_t position = 0;  // 1-based index of the hit within the partition
};

}  // namespace

OracleResult oracle_solve(const Instance & inst, const ConstraintLanguage & lang, const OracleBudget & budget)
{
    check_instance(inst, lang);
    const std::size_t n = inst.vars.size();
    if (n > budget.max_leaves)
        throw OracleInconclusive("instance has " + std::to_string(n) + " variables; the oracle budget is "
            + std::to_string(budget.max_leaves) + " leaves");
    OracleResult result;
    result.candidates_total = oracle_candidate_count(n);
    if (budget.max_candidates && result.candidates_total > budget.max_candidates)
        throw OracleInconclusive("instance needs " + std::to_string(result.candidates_total)
            + " candidates; the oracle budget is " + std::to_string(budget.max_candidates));
    if (n == 0) {
        result.sat = inst.constraints.empty();
        if (result.sat)
            result.solution = Solution{};
        result.candidates_examined = 1;
        return result;
    }

    std::vector<ResolvedConstraint> cons;
    for (const auto & c : inst.constraints)
        cons.push_back({&lang.get(c.relation).def.body, &c.args});

    const auto patterns = enumerate_patterns(static_cast<int>(n));
    const auto start = std::chrono::steady_clock::now();
    auto out_of_time = [&] {
        if (budget.timeout_seconds <= 0)
            return false;
        std::chrono::duration<double> d = std::chrono::steady_clock::now() - start;
        return d.count() > budget.timeout_seconds;
    };

    std::atomic<bool> timed_out{false};
    auto search = [&](std::size_t pi) -> std::optional<PartitionHit> {
        const EqualityPattern & p = patterns[pi];
        std::vector<std::string> labels;
        for (const auto & blk : p.blocks())
            labels.push_back(inst.vars[blk.front()]);
        std::optional<PartitionHit> hit;
        std::size_t position = 0;
        std::vector<Tree::Node> var_node(n), args;
        for_each_tree(
            labels,
            [&](const Tree & t) {
                ++position;
                if ((position & 1023u) == 0 && out_of_time()) {
                    timed_out = true;
                    return false;
                }
                for (std::size_t v = 0; v < n; ++v)
                    var_node[v] = t.leaf_node(labels[p.block_of(static_cast<int>(v))]);
                for (const auto & c : cons) {
                    args.clear();
                    for (int a : *c.args)
                        args.push_back(var_node[a]);
                    if (! evaluate(*c.body, t, args))
                        return true;
                }
                hit = PartitionHit{t, position};
                return false;
            },
            budget.max_leaves);
        return hit;
    };

    std::size_t best = patterns.size();
    std::optional<PartitionHit> best_hit;
    if (budget.threads <= 1) {
        for (std::size_t i = 0; i < patterns.size() && ! best_hit; ++i) {
            if (out_of_time())
                timed_out = true;
            if (timed_out)
                break;
            if (auto h = search(i)) {
                best = i;
                best_hit = std::move(h);
            }
        }
    }
    else {
        std::atomic<std::size_t> next{0}, best_index{patterns.size()};
        std::mutex mu;
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < budget.threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next++) < patterns.size();) {
                    if (i > best_index || timed_out)
                        continue;
                    if (out_of_time()) {
                        timed_out = true;
                        continue;
                    }
                    if (auto h = search(i)) {
                        std::lock_guard lock(mu);
                        if (i < best_index) {
                            best_index = i;
                            best = i;
                            best_hit = std::move(h);
                        }
                    }
                }
            });
        for (auto & t : pool)
            t.join();
    }
    if (timed_out)
        throw OracleInconclusive("oracle timeout of " + std::to_string(budget.timeout_seconds) + " s exceeded");

    if (! best_hit) {
        result.candidates_examined = result.candidates_total;
        return result;
    }
    for (std::size_t i = 0; i < best; ++i)
        result.candidates_examined += tree_count(static_cast<std::size_t>(patterns[i].block_count()));
    result.candidates_examined += best_hit->position;
    Solution sol;
    sol.tree = std::move(best_hit->tree);
    const EqualityPattern & p = patterns[best];
    for (std::size_t v = 0; v < n; ++v)
        sol.assignment[inst.vars[v]] = inst.vars[p.blocks()[p.block_of(static_cast<int>(v))].front()];
    if (! verify_solution(inst, lang, sol))
        throw Error("internal error: oracle witness failed verification");
    result.sat = true;
    result.solution = std::move(sol);
    return result;
}

bool nae_satisfiable(const NaeInstance & nae)
{
    const std::size_t n = nae.vars.size();
    if (n > 24)
        throw BoundError("truth-table NAE check limited to 24 variables");
    for (std::uint32_t a = 0; a < (std::uint32_t{1} << n); ++a) {
        bool ok = std::all_of(nae.clauses.begin(), nae.clauses.end(), [&](const std::array<int, 3> & c) {
            unsigned x = a >> c[0] & 1u, y = a >> c[1] & 1u, z = a >> c[2] & 1u;
            return ! (x == y && y == z);
        });
        if (ok)
            return true;
    }
    return false;
}

NaeInstance identify(const NaeInstance & nae, const std::vector<std::pair<std::string, std::string>> & pairs)
{
    const int n = static_cast<int>(nae.vars.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v)
            v = parent[v] = parent[parent[v]];
        return v;
    };
    auto index = [&](const std::string & name) {
        auto it = std::find(nae.vars.begin(), nae.vars.end(), name);
        if (it == nae.vars.end())
            throw Error("unknown NAE variable '" + name + "'");
        return static_cast<int>(it - nae.vars.begin());
    };
    for (const auto & [a, b] : pairs) {
        int x = find(index(a)), y = find(index(b));
        if (x != y)
            parent[std::max(x, y)] = std::min(x, y);
    }
    NaeInstance out;
    std::vector<int> renumber(n, -1);
    for (int v = 0; v < n; ++v)
        if (find(v) == v) {
            renumber[v] = static_cast<int>(out.vars.size());
            out.vars.push_back(nae.vars[v]);
        }
    for (const auto & c : nae.clauses)
        out.clauses.push_back({renumber[find(c[0])], renumber[find(c[1])], renumber[find(c[2])]});
    return out;
}

Instance nae_to_phylo(const NaeInstance & nae)
{
    Instance inst;
    for (const auto & v : nae.vars) {
        if (v == "a" || v == "b" || v.rfind("w1_", 0) == 0 || v.rfind("w2_", 0) == 0)
            throw Error("NAE variable name '" + v + "' clashes with a gadget variable");
        inst.add_var(v);
    }
    const int a = inst.add_var("a");
    const int b = inst.add_var("b");
    for (std::size_t v = 0; v < nae.vars.size(); ++v)
        inst.constraints.push_back({"Nd", {a, static_cast<int>(v), b}});
    for (std::size_t ci = 0; ci < nae.clauses.size(); ++ci) {
        auto [x, y, z] = nae.clauses[ci];
        if (x == y && y == z) {
            inst.constraints.push_back({"Nd", {x, x, x}});
            continue;
        }
        if (x == y || y == z || x == z) {
            // two positions coincide: the clause says the remaining two differ
            int p = x, q = x == y ? z : y;
            if (y == z)
                q = y;
            inst.constraints.push_back({"Nd", {p, a, q}});
            inst.constraints.push_back({"Nd", {p, b, q}});
            continue;
        }
        std::string tag = std::to_string(ci + 1);
        const int w1 = inst.add_var("w1_" + tag);
        const int w2 = inst.add_var("w2_" + tag);
        inst.constraints.push_back({"Nd", {x, w1, y}});
        inst.constraints.push_back({"Nd", {w1, w2, z}});
        inst.constraints.push_back({"Nd", {w1, a, w2}});
        inst.constraints.push_back({"Nd", {w1, b, w2}});
    }
    inst.constraints.push_back({"Neq", {a, b}});
    return inst;
}

NaeInstance random_nae(int vars, int clauses, std::uint64_t seed)
{
    if (vars < 3 && clauses > 0)
        throw Error("random NAE clauses need at least three variables");
    std::mt19937_64 rng(seed);
    NaeInstance nae;
    for (int i = 1; i <= vars; ++i)
        nae.vars.push_back("v" + std::to_string(i));
    std::vector<int> idx(vars);
    std::iota(idx.begin(), idx.end(), 0);
    for (int c = 0; c < clauses; ++c) {
        std::shuffle(idx.begin(), idx.end(), rng);
        nae.clauses.push_back({idx[0], idx[1], idx[2]});
    }
    return nae;
}

Instance random_satisfiable_triples(int vars, int constraints, std::uint64_t seed)
{
    const std::uint64_t n = vars < 0 ? 0 : static_cast<std::uint64_t>(vars);
    const std::uint64_t available = n < 3 ? 0 : n * (n - 1) * (n - 2) / 6;
    if (constraints < 0 || static_cast<std::uint64_t>(constraints) > available)
        throw Error("cannot draw " + std::to_string(constraints) + " distinct triples over " + std::to_string(vars)
            + " variables");
    Instance inst;
    for (int i = 1; i <= vars; ++i)
        inst.add_var("v" + std::to_string(i));
    if (constraints == 0)
        return inst;
    std::mt19937_64 rng(seed);
    Tree t = random_tree(inst.vars, rng);
    std::vector<Tree::Node> node(vars);
    for (int i = 0; i < vars; ++i)
        node[i] = t.leaf_node(inst.vars[i]);
    std::set<std::array<int, 3>> used;
    std::uniform_int_distribution<int> pick(0, vars - 1);
    while (static_cast<int>(inst.constraints.size()) < constraints) {
        std::array<int, 3> s{pick(rng), pick(rng), pick(rng)};
        if (s[0] == s[1] || s[1] == s[2] || s[0] == s[2])
            continue;
        std::array<int, 3> key = s;
        std::sort(key.begin(), key.end());
        if (! used.insert(key).second)
            continue;
        auto [x, y, z] = s;
        // exactly one of the three rooted triples holds on distinct leaves
        if (t.cone(node[z], node[x], node[y]))
            inst.constraints.push_back({"C", {z, x, y}});
        else if (t.cone(node[y], node[x], node[z]))
            inst.constraints.push_back({"C", {y, x, z}});
        else
            inst.constraints.push_back({"C", {x, y, z}});
    }
    return inst;
}

Instance random_instance(const ConstraintLanguage & lang, const std::vector<std::string> & relations, int vars,
    int constraints, std::mt19937_64 & rng)
{
    if (relations.empty() || vars < 1)
        throw Error("random instance needs relations and variables");
    Instance inst;
    for (int i = 1; i <= vars; ++i)
        inst.add_var("v" + std::to_string(i));
    std::uniform_int_distribution<std::size_t> rel(0, relations.size() - 1);
    std::uniform_int_distribution<int> var(0, vars - 1);
    for (int c = 0; c < constraints; ++c) {
        const RelationDef & r = lang.get(relations[rel(rng)]);
        Constraint con{r.name, {}};
        for (int i = 0; i < r.arity(); ++i)
            con.args.push_back(var(rng));
        inst.constraints.push_back(std::move(con));
    }
    return inst;
}

std::string to_triples(const Instance & inst)
{
    std::ostringstream os;
    for (const auto & c : inst.constraints) {
        if (c.relation != "C" || c.args.size() != 3)
            throw Error("only C constraints can be written as triples");
        os << inst.vars[c.args[1]] << " " << inst.vars[c.args[2]] << " | " << inst.vars[c.args[0]] << "\n";
    }
    return os.str();
}

}  // namespace phylo
