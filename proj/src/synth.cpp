#include <phylocsp/error.hpp>
#include <phylocsp/synth.hpp>

#include <algorithm>
#include <atomic>
#include <bitset>
#include <cstdint>
#include <numeric>
#include <thread>

namespace phylo {

namespace {

constexpr int max_checker_arity = 8;
using TripleSet = std::bitset<max_checker_arity * max_checker_arity * max_checker_arity>;

int triple_index(int i, int j, int l, int k)
{
    return (i * k + j) * k + l;
}

struct OrbitFacts {
    const Orbit * orbit;
    BooleanRelation splits;
    TripleSet cones;  // (i,j,l) with t_i | t_j t_l
};

std::vector<OrbitFacts> facts_of(const OrbitRelation & r)
{
    const int k = r.arity();
    if (k > max_checker_arity)
        throw BoundError("checker arity limited to " + std::to_string(max_checker_arity));
    std::vector<OrbitFacts> out;
    for (const auto & [key, o] : r) {
        OrbitFacts f{&o, split_vectors(o), {}};
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                for (int l = 0; l < k; ++l)
                    if (o.cone(i, j, l))
                        f.cones.set(triple_index(i, j, l, k));
        out.push_back(std::move(f));
    }
    return out;
}

// Triples all of whose coordinates have colour `colour` under s.
TripleSet mono_mask(BitVector s, int k, int colour)
{
    TripleSet m;
    auto in = [&](int i) { return static_cast<int>(s >> i & 1u) == colour; };
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            for (int l = 0; l < k; ++l)
                if (in(i) && in(j) && in(l))
                    m.set(triple_index(i, j, l, k));
    return m;
}

}  // namespace

SeparationResult check_separated(const OrbitRelation & r)
{
    const int k = r.arity();
    auto facts = facts_of(r);
    for (const auto & t : facts) {
        if (t.orbit->all_equal())
            continue;
        for (const auto & tp : facts) {
            EqualityPattern m = EqualityPattern::meet(t.orbit->pattern(), tp.orbit->pattern());
            for (BitVector s : t.splits.vectors()) {
                TripleSet mask = mono_mask(s, k, 0) | mono_mask(s, k, 1);
                TripleSet need = tp.cones & mask;
                bool found = std::any_of(facts.begin(), facts.end(), [&](const OrbitFacts & tpp) {
                    return tpp.orbit->pattern() == m && tpp.splits.contains(s) && (need & ~tpp.cones).none();
                });
                if (! found)
                    return {false, *t.orbit, *tp.orbit, s};
            }
        }
    }
    return {};
}

SeparationResult check_free(const OrbitRelation & r)
{
    const int k = r.arity();
    auto facts = facts_of(r);
    for (const auto & t : facts) {
        for (const auto & tp : facts) {
            if (! (t.orbit->pattern() == tp.orbit->pattern()))
                continue;
            for (BitVector s : t.splits.vectors()) {
                if (! tp.splits.contains(s))
                    continue;
                TripleSet m0 = mono_mask(s, k, 0), m1 = mono_mask(s, k, 1);
                TripleSet want0 = t.cones & m0, want1 = tp.cones & m1;
                bool found = std::any_of(facts.begin(), facts.end(), [&](const OrbitFacts & tpp) {
                    return tpp.splits.contains(s) && (tpp.cones & m0) == want0 && (tpp.cones & m1) == want1;
                });
                if (! found)
                    return {false, *t.orbit, *tp.orbit, s};
            }
        }
    }
    return {};
}

Formula chi(const EqualityPattern & a)
{
    std::vector<Formula> kids;
    for (int i = 0; i < a.arity(); ++i)
        for (int j = i + 1; j < a.arity(); ++j)
            kids.push_back(a.equal(i, j) ? Formula::eq(i, j) : Formula::neq(i, j));
    if (kids.empty())
        return Formula::truth(true);
    return Formula::conj(std::move(kids));
}

namespace {

std::vector<std::pair<int, int>> equal_pairs(const EqualityPattern & p)
{
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < p.arity(); ++i)
        for (int j = i + 1; j < p.arity(); ++j)
            if (p.equal(i, j))
                out.emplace_back(i, j);
    return out;
}

std::vector<std::string> standard_names(int k)
{
    std::vector<std::string> v;
    for (int i = 1; i <= k; ++i)
        v.push_back("x" + std::to_string(i));
    return v;
}

}  // namespace

std::variant<std::vector<AffineHornClause>, MeetFailure> synth_psi0(const std::vector<EqualityPattern> & e_in, int k)
{
    std::vector<EqualityPattern> e = e_in;
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    for (const auto & p : e)
        if (p.arity() != k)
            throw Error("pattern arity mismatch");
    auto in_e = [&](const EqualityPattern & p) { return std::binary_search(e.begin(), e.end(), p); };
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j)
            if (! in_e(EqualityPattern::meet(e[i], e[j])))
                return MeetFailure{e[i], e[j]};

    std::vector<AffineHornClause> clauses;
    for (const auto & pi : enumerate_patterns(k)) {
        if (in_e(pi))
            continue;
        AffineHornClause c;
        c.neq = equal_pairs(pi);
        std::optional<EqualityPattern> mu;
        for (const auto & sigma : e)
            if (pi.refines(sigma))
                mu = mu ? EqualityPattern::meet(*mu, sigma) : sigma;
        if (mu) {
            for (const auto & [j, l] : equal_pairs(*mu))
                if (! pi.equal(j, l)) {
                    c.affine = AffinePart{{j, l}, BooleanRelation(2)};
                    break;
                }
        }
        clauses.push_back(std::move(c));
    }
    return clauses;
}

namespace {

// Drops clauses whose rejected orbits are all rejected by other kept
// clauses, trying the narrowest clauses first. The relation is unchanged.
void prune_redundant(AffineHornFormula & psi)
{
    const auto & cat = enumerate_orbits(psi.arity(), std::max(psi.arity(), default_max_arity));
    const std::size_t m = psi.clauses.size();
    std::vector<std::vector<std::uint32_t>> rejects(m);
    std::vector<int> cover(cat.size(), 0);
    for (std::size_t c = 0; c < m; ++c)
        for (std::size_t o = 0; o < cat.size(); ++o)
            if (! evaluate(psi.clauses[c], cat[o].topology(), cat[o].nodes())) {
                rejects[c].push_back(static_cast<std::uint32_t>(o));
                ++cover[o];
            }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
        [&](std::size_t a, std::size_t b) { return rejects[a].size() < rejects[b].size(); });
    std::vector<bool> keep(m, true);
    for (std::size_t c : order) {
        if (! std::all_of(rejects[c].begin(), rejects[c].end(), [&](std::uint32_t o) { return cover[o] > 1; }))
            continue;
        keep[c] = false;
        for (std::uint32_t o : rejects[c])
            --cover[o];
    }
    std::vector<AffineHornClause> kept;
    for (std::size_t c = 0; c < m; ++c)
        if (keep[c])
            kept.push_back(std::move(psi.clauses[c]));
    psi.clauses = std::move(kept);
}

}  // namespace

std::variant<AffineHornFormula, MeetFailure, SplitFailure> synth_psi(const OrbitRelation & r)
{
    const int k = r.arity();
    AffineHornFormula psi;
    psi.vars = standard_names(k);
    if (r.empty()) {
        psi.clauses.push_back(AffineHornClause{{{0, 0}}, std::nullopt});
        return psi;
    }

    std::map<EqualityPattern, OrbitRelation> groups;
    for (const auto & [key, o] : r)
        groups.try_emplace(o.pattern(), k).first->second.insert(o);

    std::vector<EqualityPattern> e;
    for (const auto & [p, g] : groups)
        e.push_back(p);
    auto psi0 = synth_psi0(e, k);
    if (auto * f = std::get_if<MeetFailure>(&psi0))
        return *f;
    psi.clauses = std::get<std::vector<AffineHornClause>>(std::move(psi0));

    for (const auto & [a, group] : groups) {
        std::vector<int> q;
        for (const auto & blk : a.blocks())
            q.push_back(blk.front());
        OrbitRelation injective = project(group, q);
        const int p = static_cast<int>(q.size());
        auto guard = equal_pairs(a);
        for (BitVector mask = 1; mask < (BitVector{1} << p); ++mask) {
            std::vector<int> sub, coords;
            for (int i = 0; i < p; ++i)
                if (mask >> i & 1u) {
                    sub.push_back(i);
                    coords.push_back(q[i]);
                }
            BooleanRelation b = split_relation(project(injective, sub));
            if (! is_affine(b.with_constants()))
                return SplitFailure{a, coords, b};
            AffineHornClause c;
            c.neq = guard;
            c.affine = AffinePart{coords, b};
            psi.clauses.push_back(std::move(c));
        }
    }
    prune_redundant(psi);
    return psi;
}

std::optional<Orbit> verify_equivalence(const OrbitRelation & r, const AffineHornFormula & psi)
{
    if (psi.arity() != r.arity())
        throw Error("certificate arity differs from relation arity");
    for (const auto & o : enumerate_orbits(r.arity(), std::max(r.arity(), default_max_arity)))
        if (evaluate(psi, o.topology(), o.nodes()) != r.contains(o))
            return o;
    return std::nullopt;
}

OrbitRelation relation_of_horn(const AffineHornFormula & psi)
{
    OrbitRelation out(psi.arity());
    for (const auto & o : enumerate_orbits(psi.arity(), std::max(psi.arity(), default_max_arity)))
        if (evaluate(psi, o.topology(), o.nodes()))
            out.insert(o);
    return out;
}

std::string RelationVerdict::witness() const
{
    if (meet_failure)
        return "pattern set not closed under meets: " + meet_failure->a.to_string() + " and "
            + meet_failure->b.to_string();
    if (split_failure) {
        std::string coords;
        for (std::size_t i = 0; i < split_failure->coords.size(); ++i)
            coords += (i ? "," : "") + std::to_string(split_failure->coords[i] + 1);
        return "non-affine split relation " + split_failure->split.with_constants().to_string()
            + " of projection [" + coords + "] in pattern " + split_failure->pattern.to_string();
    }
    if (equivalence_failure)
        return "certificate disagrees on orbit " + equivalence_failure->key();
    return "";
}

RelationVerdict classify_relation(const RelationDef & rel, int max_arity)
{
    RelationVerdict v;
    v.name = rel.name;
    v.arity = rel.arity();
    if (v.arity > max_arity)
        throw BoundError("relation " + rel.name + " has arity " + std::to_string(v.arity) + " above the bound "
            + std::to_string(max_arity));
    OrbitRelation r = relation_of(rel, max_arity);

    v.contains_all_equal = r.contains(enumerate_orbits(v.arity, max_arity).front());
    std::map<EqualityPattern, std::size_t> per_pattern;
    for (const auto & [key, o] : r)
        ++per_pattern[o.pattern()];
    v.pattern_only = std::all_of(per_pattern.begin(), per_pattern.end(), [](const auto & kv) {
        return kv.second == tree_count(static_cast<std::size_t>(kv.first.block_count()));
    });

    auto res = synth_psi(r);
    if (auto * m = std::get_if<MeetFailure>(&res))
        v.meet_failure = *m;
    else if (auto * s = std::get_if<SplitFailure>(&res))
        v.split_failure = *s;
    else {
        auto & psi = std::get<AffineHornFormula>(res);
        if (auto bad = verify_equivalence(r, psi))
            v.equivalence_failure = *bad;
        else {
            v.affine_horn = true;
            v.certificate = std::move(psi);
        }
    }
    return v;
}

LanguageVerdict classify_language(const ConstraintLanguage & lang, int max_arity, unsigned threads)
{
    const auto & rels = lang.declared();
    for (const auto & r : rels)
        if (r.arity() > max_arity)
            throw BoundError("relation " + r.name + " has arity " + std::to_string(r.arity()) + " above the bound "
                + std::to_string(max_arity));

    LanguageVerdict out;
    out.relations.resize(rels.size());
    if (threads <= 1 || rels.size() <= 1) {
        for (std::size_t i = 0; i < rels.size(); ++i)
            out.relations[i] = classify_relation(rels[i], max_arity);
    }
    else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(rels.size());
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < std::min<std::size_t>(threads, rels.size()); ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next++) < rels.size();) {
                    try {
                        out.relations[i] = classify_relation(rels[i], max_arity);
                    }
                    catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (auto & t : pool)
            t.join();
        for (auto & e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    out.tractable = std::all_of(out.relations.begin(), out.relations.end(), [](const auto & v) { return v.affine_horn; });
    out.trivially_satisfiable =
        std::all_of(out.relations.begin(), out.relations.end(), [](const auto & v) { return v.contains_all_equal; });
    out.equality_language =
        std::all_of(out.relations.begin(), out.relations.end(), [](const auto & v) { return v.pattern_only; });
    if (out.equality_language) {
        out.equality_constant = out.trivially_satisfiable;
        out.equality_injective = std::all_of(out.relations.begin(), out.relations.end(),
            [](const auto & v) { return ! v.meet_failure.has_value(); });
    }
    return out;
}

std::string LanguageVerdict::summary() const
{
    std::string s = tractable ? "tractable (affine Horn): every relation has a verified affine Horn definition, so the "
                                "CSP is solvable in polynomial time"
                              : "not affine Horn: NP-complete whenever C is primitive positive definable in the "
                                "language; otherwise the language is a degenerate case outside this test";
    if (trivially_satisfiable)
        s += "\nflag: trivially satisfiable (every relation contains the all-equal orbit)";
    if (equality_language) {
        s += "\nflag: equality language (membership depends only on the equality pattern); tractable iff preserved "
             "by a constant operation or an injective binary operation:";
        s += std::string(" constant ") + (equality_constant ? "yes" : "no");
        s += std::string(", injective binary ") + (equality_injective ? "yes" : "no");
    }
    return s;
}

}  // namespace phylo
