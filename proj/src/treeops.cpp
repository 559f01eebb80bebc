#include <phylocsp/error.hpp>
#include <phylocsp/treeops.hpp>

#include <algorithm>
#include <bit>
#include <map>

namespace phylo {

OrderedLeafStructure::OrderedLeafStructure(Tree tree, std::vector<std::string> order) :
    tree_(std::move(tree)), order_(std::move(order))
{
    if (order_.size() != tree_.leaf_count())
        throw Error("order must list every leaf exactly once");
    rank_of_node_.assign(tree_.node_count(), -1);
    for (std::size_t i = 0; i < order_.size(); ++i) {
        Tree::Node v = tree_.leaf_node(order_[i]);
        if (rank_of_node_[v] != -1)
            throw Error("order lists leaf '" + order_[i] + "' twice");
        rank_of_node_[v] = static_cast<int>(i);
        nodes_.push_back(v);
    }
    const int n = size();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c)
                if (cone(b, a, c))
                    throw Error("leaf order is not convex: " + order_[a] + order_[c] + "|" + order_[b]);
}

namespace {

std::vector<std::string> layout_order(const Tree & t)
{
    std::vector<std::string> out;
    for (Tree::Node v : t.leaves())
        out.push_back(t.label(v));
    return out;
}

}  // namespace

OrderedLeafStructure::OrderedLeafStructure(Tree tree) : OrderedLeafStructure(tree, layout_order(tree)) {}

int OrderedLeafStructure::rank(std::string_view label) const
{
    return rank_of_node_[tree_.leaf_node(label)];
}

OrderedLeafStructure random_ordered_structure(int n, std::mt19937_64 & rng)
{
    std::vector<std::string> labels;
    for (int i = 1; i <= n; ++i)
        labels.push_back("a" + std::to_string(i));
    return OrderedLeafStructure(random_tree(labels, rng));
}

FiniteBinaryOp::FiniteBinaryOp(OrderedLeafStructure domain, Tree codomain, std::vector<Tree::Node> table) :
    domain_(std::move(domain)), codomain_(std::move(codomain)), table_(std::move(table))
{
    if (table_.size() != static_cast<std::size_t>(size() * size()))
        throw Error("operation table must cover X×X");
    for (Tree::Node v : table_)
        if (v < 0 || v >= static_cast<Tree::Node>(codomain_.node_count()) || ! codomain_.is_leaf(v))
            throw Error("operation table must map to codomain leaves");
}

bool FiniteBinaryOp::injective() const
{
    std::vector<Tree::Node> t = table_;
    std::sort(t.begin(), t.end());
    return std::adjacent_find(t.begin(), t.end()) == t.end();
}

namespace {

class TxBuilder {
public:
    TxBuilder(const OrderedLeafStructure & x, std::mt19937_64 * rng) : x_(x), rng_(rng)
    {
        const Tree & t = x.tree();
        min_rank_.assign(t.node_count(), 0);
        for (Tree::Node v = static_cast<Tree::Node>(t.node_count()) - 1; v >= 0; --v)
            min_rank_[v] = t.is_leaf(v) ? x.rank(t.label(v))
                                        : std::min(min_rank_[t.child(v, 0)], min_rank_[t.child(v, 1)]);
    }

    Tree::Node build(Tree::Node v)
    {
        const Tree & t = x_.tree();
        if (t.is_leaf(v)) {
            int r = min_rank_[v];
            return b_.add_leaf(name(r, r));
        }
        Tree::Node x0 = t.child(v, 0), x1 = t.child(v, 1);
        if (min_rank_[x1] < min_rank_[x0])
            std::swap(x0, x1);
        Tree::Node f00 = build(x0);
        Tree::Node f11 = build(x1);
        // f01: X0's shape, each u replaced by X1's shape over (u, v)
        Tree::Node f01 = nest(x0, [&](int u) { return nest(x1, [&](int w) { return b_.add_leaf(name(u, w)); }); });
        // f10: X0's shape, each v replaced by X1's shape over (u, v), u in X1
        Tree::Node f10 = nest(x0, [&](int w) { return nest(x1, [&](int u) { return b_.add_leaf(name(u, w)); }); });
        return join(join(f00, f11), join(f01, f10));
    }

    Tree finish(Tree::Node root) const { return b_.build(root); }

private:
    template <typename LeafFn>
    Tree::Node nest(Tree::Node v, LeafFn && leaf)
    {
        const Tree & t = x_.tree();
        if (t.is_leaf(v))
            return leaf(min_rank_[v]);
        Tree::Node a = nest(t.child(v, 0), leaf);
        Tree::Node c = nest(t.child(v, 1), leaf);
        return join(a, c);
    }

    Tree::Node join(Tree::Node a, Tree::Node c)
    {
        if (rng_ && ((*rng_)() & 1u))
            std::swap(a, c);
        return b_.add_internal(a, c);
    }

    static std::string name(int i, int j) { return "p" + std::to_string(i + 1) + "_" + std::to_string(j + 1); }

    const OrderedLeafStructure & x_;
    std::mt19937_64 * rng_;
    std::vector<int> min_rank_;
    Tree::Builder b_;
};

}  // namespace

FiniteBinaryOp build_finite_tx(const OrderedLeafStructure & x, std::size_t max_size, std::mt19937_64 * rng)
{
    if (static_cast<std::size_t>(x.size()) > max_size)
        throw BoundError("tree operation domain of size " + std::to_string(x.size()) + " exceeds bound "
            + std::to_string(max_size));
    TxBuilder tb(x, rng);
    Tree codomain = tb.finish(tb.build(x.tree().root()));
    const int n = x.size();
    std::vector<Tree::Node> table(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            table[i * n + j] = codomain.leaf_node("p" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
    return FiniteBinaryOp(x, std::move(codomain), std::move(table));
}

namespace {

std::vector<int> members(RankSet s)
{
    std::vector<int> out;
    for (int i = 0; s; ++i, s >>= 1)
        if (s & 1u)
            out.push_back(i);
    return out;
}

// f applied with the dominant argument first.
Tree::Node apply(const FiniteBinaryOp & f, int d, int e, DominantArg arg)
{
    return arg == DominantArg::First ? f.at(d, e) : f.at(e, d);
}

bool images_separated(const FiniteBinaryOp & f, const std::vector<std::pair<int, int>> & a,
    const std::vector<std::pair<int, int>> & b)
{
    if (a.empty() || b.empty())
        return true;
    std::vector<Tree::Node> na, nb;
    for (auto [x, y] : a)
        na.push_back(f.at(x, y));
    for (auto [x, y] : b)
        nb.push_back(f.at(x, y));
    return f.codomain().clan_separated(na, nb);
}

std::vector<std::pair<int, int>> product(RankSet a, RankSet b)
{
    std::vector<std::pair<int, int>> out;
    for (int x : members(a))
        for (int y : members(b))
            out.emplace_back(x, y);
    return out;
}

bool domain_separated(const OrderedLeafStructure & x, RankSet a, RankSet b)
{
    std::vector<Tree::Node> na, nb;
    for (int i : members(a))
        na.push_back(x.node(i));
    for (int i : members(b))
        nb.push_back(x.node(i));
    return x.tree().clan_separated(na, nb);
}

class SemidominationChecker {
public:
    SemidominationChecker(const FiniteBinaryOp & f, PartitionSearch mode) : f_(f), mode_(mode) {}

    bool check(RankSet u)
    {
        if (std::popcount(u) <= 1)
            return true;
        auto it = memo_.find(u);
        if (it != memo_.end())
            return it->second;
        bool ok = false;
        if (mode_ == PartitionSearch::RootSplit) {
            auto [a, b] = root_split(u);
            ok = witnesses(u, a, b) || witnesses(u, b, a);
        }
        else {
            for (RankSet a = (u - 1) & u; a && ! ok; a = (a - 1) & u)
                ok = domain_separated(f_.domain(), a, u & ~a) && witnesses(u, a, u & ~a);
        }
        memo_[u] = ok;
        return ok;
    }

private:
    std::pair<RankSet, RankSet> root_split(RankSet u) const
    {
        const auto & x = f_.domain();
        std::vector<Tree::Node> nodes;
        for (int i : members(u))
            nodes.push_back(x.node(i));
        Tree::Node y = x.tree().yca(nodes);
        Tree::Node c0 = x.tree().child(y, 0);
        RankSet a = 0;
        for (int i : members(u))
            if (x.tree().below(x.node(i), c0))
                a |= RankSet{1} << i;
        return {a, u & ~a};
    }

    bool witnesses(RankSet u, RankSet u1, RankSet u2)
    {
        (void)u;
        if (! u1 || ! u2)
            return false;
        auto p11 = product(u1, u1), p22 = product(u2, u2), p12 = product(u1, u2), p21 = product(u2, u1);
        auto same = p11;
        same.insert(same.end(), p22.begin(), p22.end());
        auto cross = p12;
        cross.insert(cross.end(), p21.begin(), p21.end());
        return check(u1) && check(u2) && images_separated(f_, p11, p22) && images_separated(f_, p12, p21)
            && images_separated(f_, same, cross) && check_perfect_dominance(f_, u1, u2, DominantArg::First)
            && check_perfect_dominance(f_, u2, u1, DominantArg::Second);
    }

    const FiniteBinaryOp & f_;
    PartitionSearch mode_;
    std::map<RankSet, bool> memo_;
};

}  // namespace

bool check_perfect_dominance(const FiniteBinaryOp & f, RankSet u, RankSet v, DominantArg arg)
{
    const auto & x = f.domain();
    const Tree & c = f.codomain();
    // the dominant argument ranges over the first factor for First and over
    // the second factor for Second
    auto dom = members(arg == DominantArg::First ? u : v);
    auto other = members(arg == DominantArg::First ? v : u);
    for (int d1 : dom)
        for (int d2 : dom)
            for (int d3 : dom) {
                if (! x.cone(d1, d2, d3))
                    continue;
                for (int e1 : other)
                    for (int e2 : other)
                        for (int e3 : other)
                            if (! c.cone(apply(f, d1, e1, arg), apply(f, d2, e2, arg), apply(f, d3, e3, arg)))
                                return false;
            }
    for (int d : dom)
        for (int e1 : other)
            for (int e2 : other)
                for (int e3 : other)
                    if (x.cone(e1, e2, e3) && ! c.cone(apply(f, d, e1, arg), apply(f, d, e2, arg), apply(f, d, e3, arg)))
                        return false;
    return true;
}

bool check_semidominated(const FiniteBinaryOp & f, RankSet u, PartitionSearch mode)
{
    if (! f.injective())
        return false;
    return SemidominationChecker(f, mode).check(u);
}

bool check_swap_symmetry(const FiniteBinaryOp & f)
{
    const int n = f.size();
    const Tree & c = f.codomain();
    std::vector<Tree::Node> img, swapped;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            img.push_back(f.at(i, j));
            swapped.push_back(f.at(j, i));
        }
    const std::size_t m = img.size();
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            for (std::size_t d = b; d < m; ++d)
                if (c.cone(img[a], img[b], img[d]) != c.cone(swapped[a], swapped[b], swapped[d]))
                    return false;
    return true;
}

TxChecks check_tx(const FiniteBinaryOp & f, PartitionSearch mode)
{
    TxChecks r;
    const int n = f.size();
    const RankSet all = n == 32 ? ~RankSet{0} : (RankSet{1} << n) - 1;
    for (RankSet u = 0;; ++u) {
        ++r.subsets;
        r.semidominated = r.semidominated && check_semidominated(f, u, mode);
        if (u == all)
            break;
    }
    for (RankSet u0 = 1; u0 <= all; ++u0) {
        const int last = std::bit_width(u0) - 1;
        const RankSet later = all & ~((RankSet{2} << last) - 1);
        for (RankSet u1 = later; u1; u1 = (u1 - 1) & later) {
            if (! domain_separated(f.domain(), u0, u1))
                continue;
            ++r.clan_pairs;
            r.perfect_dominance = r.perfect_dominance && check_perfect_dominance(f, u0, u1, DominantArg::First)
                && check_perfect_dominance(f, u1, u0, DominantArg::Second);
        }
    }
    r.swap_symmetric = check_swap_symmetry(f);
    return r;
}

bool clause_holds(const OrderedLeafStructure & x, const AffineHornClause & clause, const std::vector<int> & t)
{
    std::vector<Tree::Node> nodes;
    for (int r : t)
        nodes.push_back(x.node(r));
    return evaluate(clause, x.tree(), nodes);
}

bool check_preserves_clause(const FiniteBinaryOp & f, const AffineHornClause & clause, const std::vector<int> & t1,
    const std::vector<int> & t2)
{
    if (t1.size() != t2.size())
        throw Error("tuples must have equal length");
    std::vector<Tree::Node> image;
    for (std::size_t i = 0; i < t1.size(); ++i)
        image.push_back(f.at(t1[i], t2[i]));
    return evaluate(clause, f.codomain(), image);
}

NViolation n_violation_witness()
{
    OrderedLeafStructure x(Tree::parse_newick("((x,y),(yp,z));"), {"x", "y", "yp", "z"});
    FiniteBinaryOp op = build_finite_tx(x);
    const int rx = x.rank("x"), ry = x.rank("y"), ryp = x.rank("yp"), rz = x.rank("z");
    Tree::Node fxx = op.at(rx, rx), fyy = op.at(ry, ryp), fzz = op.at(rz, rz);
    const Tree & c = op.codomain();
    bool outgroup = c.cone(fyy, fxx, fzz);
    bool in_n = c.cone(fzz, fxx, fyy) || c.cone(fxx, fyy, fzz);
    return NViolation{std::move(op), fxx, fyy, fzz, outgroup, in_n};
}

}  // namespace phylo
