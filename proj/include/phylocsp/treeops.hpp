#pragma once

#include <phylocsp/horn.hpp>
#include <phylocsp/tree.hpp>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace phylo {

inline constexpr std::size_t default_max_tx_domain = 8;

/// A tree with a linear order on its leaves. The order must be convex:
/// x ≺ y ≺ z never has xz|y.
class OrderedLeafStructure {
public:
    /// `order` lists every leaf label, smallest first. Throws if not convex.
    OrderedLeafStructure(Tree tree, std::vector<std::string> order);
    /// Orders the leaves left to right as stored, which is always convex.
    explicit OrderedLeafStructure(Tree tree);

    const Tree & tree() const { return tree_; }
    int size() const { return static_cast<int>(order_.size()); }
    const std::string & label(int rank) const { return order_[rank]; }
    Tree::Node node(int rank) const { return nodes_[rank]; }
    int rank(std::string_view label) const;
    bool cone(int a, int b, int c) const { return tree_.cone(nodes_[a], nodes_[b], nodes_[c]); }

private:
    Tree tree_;
    std::vector<std::string> order_;
    std::vector<Tree::Node> nodes_;
    std::vector<int> rank_of_node_;
};

/// A convex-ordered structure on n leaves "a1".."an" over a random tree.
OrderedLeafStructure random_ordered_structure(int n, std::mt19937_64 & rng);

/// An injective table X×X → leaves of a codomain tree. Leaves are addressed
/// by rank in the domain order.
class FiniteBinaryOp {
public:
    FiniteBinaryOp(OrderedLeafStructure domain, Tree codomain, std::vector<Tree::Node> table);

    const OrderedLeafStructure & domain() const { return domain_; }
    const Tree & codomain() const { return codomain_; }
    int size() const { return domain_.size(); }
    Tree::Node at(int x, int y) const { return table_[x * size() + y]; }
    bool injective() const;

private:
    OrderedLeafStructure domain_;
    Tree codomain_;
    std::vector<Tree::Node> table_;
};

/// Recursive construction splitting at the root clan. Codomain leaves are
/// "p{i}_{j}" for 1-based domain ranks i, j. With an rng the codomain child
/// order is shuffled, which leaves the canonical form unchanged.
FiniteBinaryOp build_finite_tx(const OrderedLeafStructure & x, std::size_t max_size = default_max_tx_domain,
    std::mt19937_64 * rng = nullptr);

/// Domain subsets are bitmasks over ranks.
using RankSet = std::uint32_t;

enum class DominantArg { First, Second };

/// With the dominant argument d and the other argument e: d1|d2d3 forces the
/// images to form the same cone whatever e is, and for a fixed d, e1|e2e3
/// forces the images to form that cone.
bool check_perfect_dominance(const FiniteBinaryOp & f, RankSet u, RankSet v, DominantArg arg);

enum class PartitionSearch { RootSplit, All };

/// The recursive semidomination condition on U×U. RootSplit tries only the
/// two orientations of the child clans of yca(U); All tries every U1|U2.
bool check_semidominated(const FiniteBinaryOp & f, RankSet u, PartitionSearch mode = PartitionSearch::RootSplit);

/// f(x,y) ↦ f(y,x) preserves cone triples both ways on the image.
bool check_swap_symmetry(const FiniteBinaryOp & f);

/// Applies f coordinatewise to two domain tuples (ranks) and evaluates the
/// clause on the image in the codomain.
bool check_preserves_clause(const FiniteBinaryOp & f, const AffineHornClause & clause, const std::vector<int> & t1,
    const std::vector<int> & t2);

/// Evaluates a clause on a domain tuple of ranks.
bool clause_holds(const OrderedLeafStructure & x, const AffineHornClause & clause, const std::vector<int> & t);

struct TxChecks {
    bool semidominated = true;      // on every subset of the domain
    bool perfect_dominance = true;  // on every ordered clan pair
    bool swap_symmetric = true;
    std::size_t subsets = 0, clan_pairs = 0;
};

/// Runs the three checkers exhaustively. Ordered clan pairs are disjoint
/// nonempty U0|U1 with U0 ≺ U1; f must be dominated by the first argument on
/// U0×U1 and by the second on U1×U0.
TxChecks check_tx(const FiniteBinaryOp & f, PartitionSearch mode = PartitionSearch::RootSplit);

struct NViolation {
    FiniteBinaryOp op;
    // images of (x,x), (y,y'), (z,z) for x ≺ y ≺ y' ≺ z on ((x,y),(y',z))
    Tree::Node fxx, fyy, fzz;
    bool outgroup_yy;  // f(x,x)f(z,z)|f(y,y')
    bool in_n;         // the image triple satisfies N
};

NViolation n_violation_witness();

}  // namespace phylo
