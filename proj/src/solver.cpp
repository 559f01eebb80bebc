#include <phylocsp/solver.hpp>

#include <algorithm>
#include <numeric>
#include <variant>

namespace phylo {

namespace {

// Clause over original variable ids; the affine part keeps distinct variables.
struct Clause {
    std::vector<std::pair<int, int>> neq;
    bool affine = false;
    std::vector<int> avars;
    BooleanRelation b;
};

enum class Status { True, Empty, Equality, Keep };

Clause from_horn(const AffineHornClause & c)
{
    Clause out;
    out.neq = c.neq;
    if (c.affine) {
        out.affine = true;
        out.avars = c.affine->vars;
        out.b = c.affine->b;
    }
    return out;
}

AffineHornClause to_horn_clause(const Clause & c, const std::vector<int> & renumber)
{
    AffineHornClause out;
    for (auto [u, v] : c.neq)
        out.neq.emplace_back(renumber[u], renumber[v]);
    if (c.affine) {
        AffinePart a;
        for (int v : c.avars)
            a.vars.push_back(renumber[v]);
        a.b = c.b;
        out.affine = std::move(a);
    }
    return out;
}

template <typename Rep>
Status simplify(Clause & c, Rep && rep)
{
    std::vector<std::pair<int, int>> neq;
    for (auto [u, v] : c.neq) {
        int a = rep(u), b = rep(v);
        if (a == b)
            continue;
        neq.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(neq.begin(), neq.end());
    neq.erase(std::unique(neq.begin(), neq.end()), neq.end());
    c.neq = std::move(neq);

    if (c.affine) {
        std::vector<int> distinct, first, slot(c.avars.size());
        for (std::size_t i = 0; i < c.avars.size(); ++i) {
            int r = rep(c.avars[i]);
            auto it = std::find(distinct.begin(), distinct.end(), r);
            slot[i] = static_cast<int>(it - distinct.begin());
            if (it == distinct.end()) {
                distinct.push_back(r);
                first.push_back(static_cast<int>(i));
            }
        }
        if (distinct.size() == 1)
            return Status::True;
        if (distinct.size() != c.avars.size()) {
            std::vector<BitVector> kept;
            for (BitVector v : c.b.vectors()) {
                bool ok = true;
                for (std::size_t i = 0; i < slot.size() && ok; ++i)
                    ok = (v >> i & 1u) == (v >> first[slot[i]] & 1u);
                if (ok)
                    kept.push_back(v);
            }
            c.b = BooleanRelation(c.b.arity(), std::move(kept)).select(first);
        }
        c.avars = std::move(distinct);
        bool splits = std::any_of(c.b.vectors().begin(), c.b.vectors().end(),
            [&](BitVector v) { return v != 0 && v != c.b.ones(); });
        if (! splits && c.neq.empty())
            return Status::Equality;
    }
    if (c.neq.empty() && ! c.affine)
        return Status::Empty;
    return Status::Keep;
}

struct UnionFind {
    std::vector<int> parent, size;

    explicit UnionFind(int n) : parent(n), size(n, 1) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int v)
    {
        int r = v;
        while (parent[r] != r)
            r = parent[r];
        while (parent[v] != r) {
            int next = parent[v];
            parent[v] = r;
            v = next;
        }
        return r;
    }

    bool unite(int a, int b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        if (size[a] < size[b])
            std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
        return true;
    }
};

class HullCache {
public:
    const std::vector<Gf2Row> & get(const BooleanRelation & b)
    {
        auto key = std::make_pair(b.arity(), b.vectors());
        auto it = cache_.find(key);
        if (it == cache_.end())
            it = cache_.emplace(std::move(key), affine_hull(b.with_constants())).first;
        return it->second;
    }

private:
    std::map<std::pair<int, std::vector<BitVector>>, std::vector<Gf2Row>> cache_;
};

// Recursive split procedure over bare affine clauses.
class SpecEngine {
public:
    SpecEngine(const std::vector<Clause> & clauses, const std::vector<const std::vector<Gf2Row> *> & hulls,
        const std::vector<std::string> & names, std::mt19937_64 * rng) :
        clauses_(clauses), hulls_(hulls), names_(names), rng_(rng), local_(names.size(), -1), side_(names.size(), 0)
    {
    }

    // Node of the witness subtree, or the variables forced equal.
    std::variant<Tree::Node, std::vector<int>> run(const std::vector<int> & vars, const std::vector<int> & cidx)
    {
        if (vars.size() == 1)
            return builder_.add_leaf(names_[vars[0]]);
        for (std::size_t i = 0; i < vars.size(); ++i)
            local_[vars[i]] = static_cast<int>(i);
        Gf2System sys(static_cast<int>(vars.size()));
        for (int c : cidx) {
            const auto & avars = clauses_[c].avars;
            for (const auto & row : *hulls_[c]) {
                Gf2Row r;
                r.rhs = row.rhs;
                for (int pos : row.vars)
                    r.vars.push_back(local_[avars[pos]]);
                sys.add_row(std::move(r));
            }
        }
        auto s = nontrivial_solution(sys, rng_);
        if (! s)
            return vars;

        std::vector<int> part[2];
        for (std::size_t i = 0; i < vars.size(); ++i) {
            side_[vars[i]] = (*s)[i];
            part[(*s)[i]].push_back(vars[i]);
        }
        std::vector<int> sub[2];
        for (int c : cidx) {
            const auto & avars = clauses_[c].avars;
            int sd = side_[avars[0]];
            if (std::all_of(avars.begin(), avars.end(), [&](int v) { return side_[v] == sd; }))
                sub[sd].push_back(c);
        }
        auto left = run(part[0], sub[0]);
        if (std::holds_alternative<std::vector<int>>(left))
            return left;
        auto right = run(part[1], sub[1]);
        if (std::holds_alternative<std::vector<int>>(right))
            return right;
        return builder_.add_internal(std::get<Tree::Node>(left), std::get<Tree::Node>(right));
    }

    Tree build(Tree::Node root) const { return builder_.build(root); }

private:
    const std::vector<Clause> & clauses_;
    const std::vector<const std::vector<Gf2Row> *> & hulls_;
    const std::vector<std::string> & names_;
    std::mt19937_64 * rng_;
    std::vector<int> local_;
    std::vector<std::uint8_t> side_;
    Tree::Builder builder_;
};

// Runs the split procedure on `vars` with the bare affine clauses of `clauses`.
std::variant<Tree, std::vector<int>> run_spec(const std::vector<Clause> & clauses, const std::vector<int> & vars,
    const std::vector<std::string> & names, HullCache & hulls, std::mt19937_64 * rng)
{
    std::vector<const std::vector<Gf2Row> *> hull(clauses.size(), nullptr);
    std::vector<int> cidx;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        const Clause & c = clauses[i];
        if (! c.neq.empty() || ! c.affine)
            continue;
        hull[i] = &hulls.get(c.b);
        if (! hull[i]->empty())
            cidx.push_back(static_cast<int>(i));
    }
    SpecEngine engine(clauses, hull, names, rng);
    auto r = engine.run(vars, cidx);
    if (auto * forced = std::get_if<std::vector<int>>(&r))
        return *forced;
    return engine.build(std::get<Tree::Node>(r));
}

}  // namespace

AffineHornFormula contract(const AffineHornFormula & f, const std::vector<int> & x)
{
    if (x.empty())
        throw Error("contraction of an empty variable set");
    for (int v : x)
        if (v < 0 || v >= f.arity())
            throw Error("contraction variable out of range");
    int rep = *std::min_element(x.begin(), x.end());
    std::vector<std::uint8_t> merged(f.arity(), 0);
    for (int v : x)
        merged[v] = v != rep;
    auto map = [&](int v) { return merged[v] ? rep : v; };

    AffineHornFormula out;
    std::vector<int> renumber(f.arity(), -1);
    for (int v = 0; v < f.arity(); ++v)
        if (! merged[v]) {
            renumber[v] = out.arity();
            out.vars.push_back(f.vars[v]);
        }
    for (const auto & hc : f.clauses) {
        Clause c = from_horn(hc);
        Status st = simplify(c, map);
        if (st == Status::True)
            continue;
        if (st == Status::Empty)
            out.clauses.emplace_back();
        else
            out.clauses.push_back(to_horn_clause(c, renumber));
    }
    return out;
}

Gf2System build_split_problem(const AffineHornFormula & f)
{
    Gf2System sys(f.vars);
    HullCache hulls;
    for (const auto & c : f.clauses) {
        if (! c.is_bare_affine())
            continue;
        for (const auto & row : hulls.get(c.affine->b)) {
            Gf2Row r;
            r.rhs = row.rhs;
            for (int pos : row.vars)
                r.vars.push_back(c.affine->vars[pos]);
            sys.add_row(std::move(r));
        }
    }
    return sys;
}

SpecResult spec(const AffineHornFormula & f, std::mt19937_64 * rng)
{
    if (f.vars.empty())
        throw Error("spec needs at least one variable");
    std::vector<Clause> clauses;
    for (const auto & c : f.clauses)
        clauses.push_back(from_horn(c));
    std::vector<int> vars(f.arity());
    std::iota(vars.begin(), vars.end(), 0);
    HullCache hulls;
    auto r = run_spec(clauses, vars, f.vars, hulls, rng);
    SpecResult out;
    if (auto * t = std::get_if<Tree>(&r))
        out.tree = std::move(*t);
    else
        out.forced = std::get<std::vector<int>>(r);
    return out;
}

Verdict solve(const AffineHornFormula & f, std::mt19937_64 * rng)
{
    check_affine_horn(f);
    Verdict verdict;
    const int n = f.arity();
    UnionFind uf(n);
    std::vector<Clause> clauses;
    for (const auto & c : f.clauses)
        clauses.push_back(from_horn(c));

    // Simplify against the union-find, contracting pure equality clauses
    // until nothing changes. Returns false on an empty clause.
    auto normalize = [&]() {
        bool changed = true;
        while (changed) {
            changed = false;
            std::vector<Clause> kept;
            kept.reserve(clauses.size());
            for (auto & c : clauses) {
                switch (simplify(c, [&](int v) { return uf.find(v); })) {
                case Status::True:
                    break;
                case Status::Empty:
                    verdict.reason = "empty clause after contraction";
                    return false;
                case Status::Equality:
                    for (int v : c.avars)
                        changed |= uf.unite(c.avars[0], v);
                    break;
                case Status::Keep:
                    kept.push_back(std::move(c));
                    break;
                }
            }
            clauses = std::move(kept);
        }
        return true;
    };

    if (! normalize())
        return verdict;
    if (n == 0) {
        verdict.sat = true;
        verdict.solution = Solution{};
        return verdict;
    }

    HullCache hulls;
    while (true) {
        std::vector<int> reps;
        for (int v = 0; v < n; ++v)
            if (uf.find(v) == v)
                reps.push_back(v);
        auto r = run_spec(clauses, reps, f.vars, hulls, rng);
        if (auto * t = std::get_if<Tree>(&r)) {
            Solution sol;
            sol.tree = std::move(*t);
            for (int v = 0; v < n; ++v)
                sol.assignment[f.vars[v]] = f.vars[uf.find(v)];
            if (! verify_solution(f, sol))
                throw Error("internal error: solver witness failed verification");
            verdict.sat = true;
            verdict.solution = std::move(sol);
            return verdict;
        }
        const auto & forced = std::get<std::vector<int>>(r);
        for (int v : forced)
            uf.unite(forced[0], v);
        ++verdict.contractions;
        if (! normalize())
            return verdict;
    }
}

const AffineHornFormula & CertificateCache::get(const RelationDef & rel)
{
    auto it = certs_.find(rel.name);
    if (it != certs_.end())
        return it->second;
    RelationVerdict v = classify_relation(rel, max_arity_);
    if (! v.affine_horn)
        throw NotAffineHornError("relation " + rel.name + " is not affine Horn (" + v.witness()
            + "); use 'phylocsp oracle' for exhaustive search");
    return certs_.emplace(rel.name, std::move(*v.certificate)).first->second;
}

AffineHornFormula to_affine_horn(const Instance & inst, const ConstraintLanguage & lang, CertificateCache & certs)
{
    check_instance(inst, lang);
    AffineHornFormula f;
    f.vars = inst.vars;
    for (const auto & con : inst.constraints) {
        const AffineHornFormula & psi = certs.get(lang.get(con.relation));
        if (psi.arity() != static_cast<int>(con.args.size()))
            throw Error("certificate for " + con.relation + " has the wrong arity");
        for (const auto & c : psi.clauses) {
            AffineHornClause out;
            for (auto [u, v] : c.neq)
                out.neq.emplace_back(con.args[u], con.args[v]);
            if (c.affine) {
                AffinePart a;
                for (int v : c.affine->vars)
                    a.vars.push_back(con.args[v]);
                a.b = c.affine->b;
                out.affine = std::move(a);
            }
            f.clauses.push_back(std::move(out));
        }
    }
    return f;
}

Verdict solve_instance(const Instance & inst, const ConstraintLanguage & lang, CertificateCache & certs,
    std::mt19937_64 * rng)
{
    Verdict v = solve(to_affine_horn(inst, lang, certs), rng);
    if (v.sat && ! verify_solution(inst, lang, *v.solution))
        throw Error("internal error: witness does not satisfy the original instance");
    return v;
}

Verdict solve_instance(const Instance & inst, const ConstraintLanguage & lang, std::mt19937_64 * rng)
{
    CertificateCache certs;
    return solve_instance(inst, lang, certs, rng);
}

}  // namespace phylo
