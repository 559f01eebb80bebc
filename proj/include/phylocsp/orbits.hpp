#pragma once

#include <phylocsp/formula.hpp>
#include <phylocsp/tree.hpp>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace phylo {

inline constexpr int default_max_arity = 6;

/// Kernel partition of a k-tuple, stored as a restricted growth string:
/// block[i] is the block of coordinate i, blocks numbered by first occurrence.
class EqualityPattern {
public:
    EqualityPattern() = default;
    /// Accepts any labelling; it is normalised to restricted growth form.
    explicit EqualityPattern(std::vector<int> labels);

    static EqualityPattern all_distinct(int k);
    static EqualityPattern all_equal(int k);

    int arity() const { return static_cast<int>(block_.size()); }
    int block_count() const { return blocks_; }
    bool distinct() const { return blocks_ == arity(); }
    int block_of(int i) const { return block_[i]; }
    bool equal(int i, int j) const { return block_[i] == block_[j]; }
    const std::vector<int> & rgs() const { return block_; }
    /// Coordinates of each block, ascending.
    std::vector<std::vector<int>> blocks() const;

    /// Equal pairs of `a` are equal pairs of `b`.
    bool refines(const EqualityPattern & b) const;
    /// Pattern whose equal pairs are those equal in both.
    static EqualityPattern meet(const EqualityPattern & a, const EqualityPattern & b);

    /// "{1}{2,3}" with 1-based coordinates.
    std::string to_string() const;

    friend bool operator==(const EqualityPattern &, const EqualityPattern &) = default;
    friend auto operator<=>(const EqualityPattern & a, const EqualityPattern & b) { return a.block_ <=> b.block_; }

private:
    std::vector<int> block_;
    int blocks_ = 0;
};

/// All set partitions of {0..k-1} in restricted-growth lexicographic order.
std::vector<EqualityPattern> enumerate_patterns(int k);

/// One orbit of k-tuples: an equality pattern plus a binary topology on its
/// blocks. A block's leaf is labelled by its smallest 1-based coordinate.
class Orbit {
public:
    Orbit() = default;
    Orbit(EqualityPattern pattern, Tree topology);

    const EqualityPattern & pattern() const { return pattern_; }
    const Tree & topology() const { return topology_; }
    int arity() const { return pattern_.arity(); }
    /// Leaf node of coordinate i's block.
    Tree::Node node(int i) const { return nodes_[i]; }
    std::span<const Tree::Node> nodes() const { return nodes_; }
    bool cone(int i, int j, int l) const { return topology_.cone(nodes_[i], nodes_[j], nodes_[l]); }
    bool all_equal() const { return pattern_.block_count() == 1; }

    /// Orbit of the sub-tuple (t_{idx[0]}, t_{idx[1]}, ...).
    Orbit restrict(std::span<const int> idx) const;

    /// "{1}{2,3} (1,2)".
    const std::string & key() const { return key_; }

    friend bool operator==(const Orbit & a, const Orbit & b) { return a.key_ == b.key_; }
    friend auto operator<=>(const Orbit & a, const Orbit & b) { return a.key_ <=> b.key_; }

private:
    EqualityPattern pattern_;
    Tree topology_;
    std::vector<Tree::Node> nodes_;
    std::string key_;
};

/// Orbit of the tuple of leaf nodes of `t`.
Orbit orbit_of(const Tree & t, std::span<const Tree::Node> tuple);
Orbit orbit_of(const Tree & t, const std::vector<std::string> & labels);

/// The orbit catalogue of arity k, in pattern order then topology order.
/// Cached; throws BoundError for k < 1 or k > max_arity.
const std::vector<Orbit> & enumerate_orbits(int k, int max_arity = default_max_arity);

/// Σ over partitions of (2m-3)!!.
std::size_t orbit_count(int k);

/// A k-ary relation over (L;C) as a set of orbits, ordered by key.
class OrbitRelation {
public:
    OrbitRelation() = default;
    explicit OrbitRelation(int arity) : arity_(arity) {}

    int arity() const { return arity_; }
    std::size_t size() const { return orbits_.size(); }
    bool empty() const { return orbits_.empty(); }
    bool contains(const Orbit & o) const { return orbits_.count(o.key()) != 0; }
    void insert(const Orbit & o);
    /// Orbits ordered by key.
    std::vector<Orbit> orbits() const;

    auto begin() const { return orbits_.begin(); }
    auto end() const { return orbits_.end(); }

    friend bool operator==(const OrbitRelation &, const OrbitRelation &) = default;

private:
    int arity_ = 0;
    std::map<std::string, Orbit> orbits_;
};

OrbitRelation relation_of_formula(const Formula & f, int arity, int max_arity = default_max_arity);
OrbitRelation relation_of_formula(const PhyloFormula & f, int max_arity = default_max_arity);
OrbitRelation relation_of(const RelationDef & r, int max_arity = default_max_arity);

/// Orbit-wise restriction to the given coordinates. Throws on an empty list.
OrbitRelation project(const OrbitRelation & r, std::span<const int> idx);

struct PPAtom {
    std::string relation;
    std::vector<int> args;  // 0..free-1 are free variables, the rest existential
};

/// ∃ x_free..x_{vars-1} (atom_1 ∧ ... ∧ atom_m).
struct PPFormula {
    int free = 0;
    int vars = 0;
    std::vector<PPAtom> atoms;
};

/// True iff some orbit of arity pp.vars restricting to `target` on the free
/// coordinates satisfies every atom.
bool eval_pp(const PPFormula & pp, const ConstraintLanguage & lang, const Orbit & target,
    int max_arity = default_max_arity);

/// The relation defined by `pp` over all orbits of arity pp.free.
OrbitRelation pp_relation(const PPFormula & pp, const ConstraintLanguage & lang, int max_arity = default_max_arity);

}  // namespace phylo
