#include <phylocsp/error.hpp>
#include <phylocsp/orbits.hpp>

#include <algorithm>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace phylo {

EqualityPattern::EqualityPattern(std::vector<int> labels)
{
    std::map<int, int> renumber;
    for (int & l : labels) {
        auto [it, fresh] = renumber.try_emplace(l, static_cast<int>(renumber.size()));
        l = it->second;
    }
    block_ = std::move(labels);
    blocks_ = static_cast<int>(renumber.size());
}

EqualityPattern EqualityPattern::all_distinct(int k)
{
    std::vector<int> v(k);
    for (int i = 0; i < k; ++i)
        v[i] = i;
    return EqualityPattern(std::move(v));
}

EqualityPattern EqualityPattern::all_equal(int k)
{
    return EqualityPattern(std::vector<int>(k, 0));
}

std::vector<std::vector<int>> EqualityPattern::blocks() const
{
    std::vector<std::vector<int>> out(blocks_);
    for (int i = 0; i < arity(); ++i)
        out[block_[i]].push_back(i);
    return out;
}

bool EqualityPattern::refines(const EqualityPattern & b) const
{
    for (int i = 0; i < arity(); ++i)
        for (int j = i + 1; j < arity(); ++j)
            if (equal(i, j) && ! b.equal(i, j))
                return false;
    return true;
}

EqualityPattern EqualityPattern::meet(const EqualityPattern & a, const EqualityPattern & b)
{
    if (a.arity() != b.arity())
        throw Error("meet: arity mismatch");
    std::vector<int> v(a.arity());
    for (int i = 0; i < a.arity(); ++i)
        v[i] = a.block_[i] * b.blocks_ + b.block_[i];
    return EqualityPattern(std::move(v));
}

std::string EqualityPattern::to_string() const
{
    std::string s;
    for (const auto & blk : blocks()) {
        s += "{";
        for (std::size_t i = 0; i < blk.size(); ++i)
            s += (i ? "," : "") + std::to_string(blk[i] + 1);
        s += "}";
    }
    return s;
}

std::vector<EqualityPattern> enumerate_patterns(int k)
{
    std::vector<EqualityPattern> out;
    if (k <= 0) {
        out.emplace_back();
        return out;
    }
    std::vector<int> rgs(k, 0), maxp(k, 0);
    while (true) {
        out.emplace_back(rgs);
        int i = k - 1;
        while (i > 0 && rgs[i] == maxp[i - 1] + 1)
            --i;
        if (i == 0)
            break;
        ++rgs[i];
        maxp[i] = std::max(maxp[i - 1], rgs[i]);
        for (int j = i + 1; j < k; ++j) {
            rgs[j] = 0;
            maxp[j] = maxp[i];
        }
    }
    return out;
}

namespace {

std::vector<std::string> block_labels(const EqualityPattern & p)
{
    std::vector<std::string> labels;
    for (const auto & blk : p.blocks())
        labels.push_back(std::to_string(blk.front() + 1));
    return labels;
}

}  // namespace

Orbit::Orbit(EqualityPattern pattern, Tree topology) : pattern_(std::move(pattern)), topology_(std::move(topology))
{
    auto labels = block_labels(pattern_);
    if (topology_.leaf_count() != labels.size())
        throw Error("orbit topology must have one leaf per block");
    std::vector<Tree::Node> block_node;
    for (const auto & l : labels)
        block_node.push_back(topology_.leaf_node(l));
    for (int i = 0; i < pattern_.arity(); ++i)
        nodes_.push_back(block_node[pattern_.block_of(i)]);
    std::string nwk = topology_.to_newick();
    nwk.pop_back();
    key_ = pattern_.to_string() + " " + nwk;
}

Orbit Orbit::restrict(std::span<const int> idx) const
{
    std::vector<Tree::Node> sub;
    for (int i : idx) {
        if (i < 0 || i >= arity())
            throw Error("restrict: coordinate out of range");
        sub.push_back(nodes_[i]);
    }
    return orbit_of(topology_, sub);
}

Orbit orbit_of(const Tree & t, std::span<const Tree::Node> tuple)
{
    if (tuple.empty())
        throw Error("orbit of an empty tuple");
    std::vector<Tree::Node> distinct;
    std::vector<int> rgs;
    for (Tree::Node v : tuple) {
        auto it = std::find(distinct.begin(), distinct.end(), v);
        rgs.push_back(static_cast<int>(it - distinct.begin()));
        if (it == distinct.end())
            distinct.push_back(v);
    }
    EqualityPattern p(std::move(rgs));
    return Orbit(p, t.induced(distinct, block_labels(p)));
}

Orbit orbit_of(const Tree & t, const std::vector<std::string> & labels)
{
    std::vector<Tree::Node> nodes;
    for (const auto & l : labels)
        nodes.push_back(t.leaf_node(l));
    return orbit_of(t, nodes);
}

const std::vector<Orbit> & enumerate_orbits(int k, int max_arity)
{
    if (k < 1 || k > max_arity)
        throw BoundError("orbit arity " + std::to_string(k) + " outside 1.." + std::to_string(max_arity));
    static std::mutex mu;
    static std::map<int, std::unique_ptr<std::vector<Orbit>>> cache;
    std::lock_guard lock(mu);
    auto & slot = cache[k];
    if (! slot) {
        auto out = std::make_unique<std::vector<Orbit>>();
        for (const auto & p : enumerate_patterns(k)) {
            for_each_tree(
                block_labels(p),
                [&](const Tree & t) {
                    out->emplace_back(p, t);
                    return true;
                },
                static_cast<std::size_t>(k));
        }
        slot = std::move(out);
    }
    return *slot;
}

std::size_t orbit_count(int k)
{
    std::size_t n = 0;
    for (const auto & p : enumerate_patterns(k))
        n += tree_count(static_cast<std::size_t>(p.block_count()));
    return n;
}

void OrbitRelation::insert(const Orbit & o)
{
    if (o.arity() != arity_)
        throw Error("orbit arity does not match relation arity");
    orbits_.emplace(o.key(), o);
}

std::vector<Orbit> OrbitRelation::orbits() const
{
    std::vector<Orbit> out;
    for (const auto & [key, o] : orbits_)
        out.push_back(o);
    return out;
}

OrbitRelation relation_of_formula(const Formula & f, int arity, int max_arity)
{
    if (variable_bound(f) > arity)
        throw Error("formula uses more variables than its arity");
    OrbitRelation r(arity);
    for (const auto & o : enumerate_orbits(arity, max_arity))
        if (evaluate(f, o.topology(), o.nodes()))
            r.insert(o);
    return r;
}

OrbitRelation relation_of_formula(const PhyloFormula & f, int max_arity)
{
    return relation_of_formula(f.body, f.arity(), max_arity);
}

OrbitRelation relation_of(const RelationDef & r, int max_arity)
{
    return relation_of_formula(r.def, max_arity);
}

OrbitRelation project(const OrbitRelation & r, std::span<const int> idx)
{
    if (idx.empty())
        throw Error("projection onto no coordinates");
    OrbitRelation out(static_cast<int>(idx.size()));
    for (const auto & [key, o] : r)
        out.insert(o.restrict(idx));
    return out;
}

namespace {

using ExtensionIndex = std::unordered_map<std::string, std::vector<int>>;

// Orbits of arity n grouped by their restriction to the first k coordinates.
const ExtensionIndex & extensions(int n, int k, int max_arity)
{
    const auto & cat = enumerate_orbits(n, max_arity);
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<ExtensionIndex>> cache;
    std::lock_guard lock(mu);
    auto & slot = cache[{n, k}];
    if (! slot) {
        slot = std::make_unique<ExtensionIndex>();
        std::vector<int> prefix(k);
        for (int i = 0; i < k; ++i)
            prefix[i] = i;
        for (std::size_t i = 0; i < cat.size(); ++i)
            (*slot)[cat[i].restrict(prefix).key()].push_back(static_cast<int>(i));
    }
    return *slot;
}

struct ResolvedAtom {
    const Formula * body;
    const std::vector<int> * args;
};

std::vector<ResolvedAtom> resolve(const PPFormula & pp, const ConstraintLanguage & lang)
{
    if (pp.free < 1 || pp.vars < pp.free)
        throw Error("pp-formula needs at least one free variable");
    std::vector<ResolvedAtom> out;
    for (const auto & a : pp.atoms) {
        const RelationDef & r = lang.get(a.relation);
        if (static_cast<int>(a.args.size()) != r.arity())
            throw Error("pp atom " + a.relation + " has the wrong number of arguments");
        for (int v : a.args)
            if (v < 0 || v >= pp.vars)
                throw Error("pp atom argument out of range");
        out.push_back({&r.def.body, &a.args});
    }
    return out;
}

bool eval_resolved(const std::vector<ResolvedAtom> & atoms, int n, int k, const Orbit & target, int max_arity)
{
    if (target.arity() != k)
        throw Error("target orbit arity does not match the free variables");
    const auto & cat = enumerate_orbits(n, max_arity);
    const auto & ext = extensions(n, k, max_arity);
    auto it = ext.find(target.key());
    if (it == ext.end())
        return false;
    std::vector<Tree::Node> args;
    for (int idx : it->second) {
        const Orbit & o = cat[idx];
        bool ok = true;
        for (const auto & a : atoms) {
            args.clear();
            for (int v : *a.args)
                args.push_back(o.node(v));
            if (! evaluate(*a.body, o.topology(), args)) {
                ok = false;
                break;
            }
        }
        if (ok)
            return true;
    }
    return false;
}

}  // namespace

bool eval_pp(const PPFormula & pp, const ConstraintLanguage & lang, const Orbit & target, int max_arity)
{
    return eval_resolved(resolve(pp, lang), pp.vars, pp.free, target, max_arity);
}

OrbitRelation pp_relation(const PPFormula & pp, const ConstraintLanguage & lang, int max_arity)
{
    auto atoms = resolve(pp, lang);
    OrbitRelation r(pp.free);
    for (const auto & o : enumerate_orbits(pp.free, max_arity))
        if (eval_resolved(atoms, pp.vars, pp.free, o, max_arity))
            r.insert(o);
    return r;
}

}  // namespace phylo
