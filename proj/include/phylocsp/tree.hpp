#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace phylo {

/// Rooted binary tree with uniquely labelled leaves.
///
/// Nodes are dense integer ids. Every internal node has exactly two
/// children; the children are unordered, so equality compares canonical
/// Newick forms. A single leaf is a legal tree (its root is the leaf).
/// Trees are immutable once built.
class Tree {
public:
    using Node = int;
    static constexpr Node none = -1;

    /// Incremental construction. Nodes not reachable from the root passed
    /// to build() are discarded.
    class Builder {
    public:
        Node add_leaf(std::string label);
        Node add_internal(Node left, Node right);
        /// Copies `t` into the builder and returns the id of its root.
        Node add_tree(const Tree & t);
        Tree build(Node root) const;

    private:
        struct Rec {
            Node child[2] = {none, none};
            std::string label;
        };
        std::vector<Rec> recs_;
    };

    Tree() = default;

    static Tree leaf(std::string label);
    /// New root with `a` and `b` as its two subtrees. Leaf labels must be disjoint.
    static Tree join(const Tree & a, const Tree & b);
    /// Accepts binary Newick; the trailing ';' is optional.
    static Tree parse_newick(std::string_view text);

    /// Canonical Newick: children ordered by their smallest leaf label.
    std::string to_newick() const;

    bool empty() const noexcept { return nodes_.empty(); }
    Node root() const noexcept { return root_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t leaf_count() const noexcept { return leaves_.size(); }
    /// Leaf nodes in left-to-right order of the stored layout.
    std::span<const Node> leaves() const noexcept { return leaves_; }
    std::vector<std::string> leaf_labels() const;

    bool is_leaf(Node v) const { return nodes_[v].child[0] == none; }
    Node parent(Node v) const { return nodes_[v].parent; }
    Node child(Node v, int i) const { return nodes_[v].child[i]; }
    int depth(Node v) const { return nodes_[v].depth; }
    const std::string & label(Node v) const { return nodes_[v].label; }

    bool has_leaf(std::string_view label) const;
    /// Throws phylo::Error for unknown labels.
    Node leaf_node(std::string_view label) const;

    /// Youngest common ancestor of a pair of nodes.
    Node lca(Node u, Node v) const;
    Node yca(std::span<const Node> nodes) const;
    Node yca(const std::vector<std::string> & labels) const;

    /// True if `u` lies below `v` (u == v counts).
    bool below(Node u, Node v) const;

    /// x|yz over leaf nodes: x differs from y and z and yca(y,z) lies strictly
    /// below yca(x,y,z). y == z is allowed.
    bool cone(Node x, Node y, Node z) const;
    bool cone(std::string_view x, std::string_view y, std::string_view z) const;

    /// S1|S2: neither yca lies below the other. Both sets must be non-empty.
    bool clan_separated(std::span<const Node> a, std::span<const Node> b) const;
    bool clan_separated(const std::vector<std::string> & a, const std::vector<std::string> & b) const;

    /// Induced subtree on the given distinct leaves with degree-2 nodes
    /// suppressed; leaf `leaves[i]` is relabelled `labels[i]`.
    Tree induced(std::span<const Node> leaves, const std::vector<std::string> & labels) const;

    /// Leaves below `v`.
    std::vector<Node> leaves_below(Node v) const;

    friend bool operator==(const Tree & a, const Tree & b) { return a.to_newick() == b.to_newick(); }

private:
    struct NodeRec {
        Node parent = none;
        Node child[2] = {none, none};
        int depth = 0;
        std::string label;
    };

    std::vector<NodeRec> nodes_;
    std::vector<Node> leaves_;
    std::unordered_map<std::string, Node> by_label_;
    Node root_ = none;
};

bool is_valid_label(std::string_view label);

/// Default bound for exhaustive tree enumeration.
inline constexpr std::size_t default_max_enumeration_leaves = 8;

/// Calls `fn` once for every rooted binary topology on `labels`. Returns
/// false from `fn` to stop early. Throws BoundError above `max_leaves`.
void for_each_tree(const std::vector<std::string> & labels, const std::function<bool(const Tree &)> & fn,
    std::size_t max_leaves = default_max_enumeration_leaves);

std::vector<Tree> enumerate_trees(const std::vector<std::string> & labels,
    std::size_t max_leaves = default_max_enumeration_leaves);

/// (2n-3)!! for n >= 2, 1 for n <= 1.
std::size_t tree_count(std::size_t n);

/// Random tree built by joining uniformly chosen pairs of subtrees, with
/// random child order. Throws for an empty label list.
Tree random_tree(const std::vector<std::string> & labels, std::mt19937_64 & rng);

}  // namespace phylo
