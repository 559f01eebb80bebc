#pragma once

#include <phylocsp/orbits.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace phylo {

/// A 0/1 vector of length n; bit i is coordinate i+1.
using BitVector = std::uint32_t;

inline constexpr int max_boolean_arity = 31;

/// "011" style text, coordinate 1 first.
std::string bits_to_string(BitVector v, int n);
/// Inverse of bits_to_string; throws ParseError on bad characters or length.
BitVector bits_from_string(std::string_view s);

/// A set of 0/1 vectors of a fixed length, kept sorted and duplicate-free.
class BooleanRelation {
public:
    BooleanRelation() = default;
    explicit BooleanRelation(int arity);
    BooleanRelation(int arity, std::vector<BitVector> vectors);

    int arity() const { return arity_; }
    std::size_t size() const { return vecs_.size(); }
    bool empty() const { return vecs_.empty(); }
    bool contains(BitVector v) const;
    void insert(BitVector v);
    const std::vector<BitVector> & vectors() const { return vecs_; }

    BitVector ones() const { return arity_ >= 32 ? ~0u : (1u << arity_) - 1; }
    BooleanRelation with_constants() const;
    BooleanRelation without_constants() const;
    /// Same vectors with coordinates permuted: result coordinate i is old coordinate idx[i].
    BooleanRelation select(std::span<const int> idx) const;

    /// "{000,011,100,111}", sorted as strings.
    std::string to_string() const;

    friend bool operator==(const BooleanRelation &, const BooleanRelation &) = default;

private:
    int arity_ = 0;
    std::vector<BitVector> vecs_;
};

/// Split vectors of an orbit: constant on blocks and either constant or
/// naming a clan split of the topology.
BooleanRelation split_vectors(const Orbit & o);
/// Union of split_vectors over the relation's orbits.
BooleanRelation split_relation(const OrbitRelation & r);

/// Closed under coordinatewise x⊕y⊕z. The empty set is affine.
bool is_affine(const BooleanRelation & b);
/// Three members whose XOR is outside `b`, if any.
std::optional<std::array<BitVector, 3>> affine_violation(const BooleanRelation & b);

/// Σ_{v ∈ vars} s_v = rhs over GF(2). A variable listed twice cancels.
struct Gf2Row {
    std::vector<int> vars;
    bool rhs = false;

    friend bool operator==(const Gf2Row &, const Gf2Row &) = default;
};

/// Linear equations over GF(2) on variables 0..n-1, optionally named.
class Gf2System {
public:
    Gf2System() = default;
    explicit Gf2System(int variables) : n_(variables) {}
    explicit Gf2System(std::vector<std::string> names) :
        n_(static_cast<int>(names.size())), names_(std::move(names))
    {
    }

    int variable_count() const { return n_; }
    const std::vector<std::string> & names() const { return names_; }
    const std::vector<Gf2Row> & rows() const { return rows_; }
    void add_row(Gf2Row row);

    bool satisfied_by(const std::vector<std::uint8_t> & s) const;
    /// "s1 + s2 = 0" lines (names when present).
    std::string to_string() const;

private:
    int n_ = 0;
    std::vector<std::string> names_;
    std::vector<Gf2Row> rows_;
};

/// Equations on coordinates 0..n-1 whose solution set is the affine hull of
/// `b`. Throws for an empty `b`.
std::vector<Gf2Row> affine_hull(const BooleanRelation & b);
Gf2System affine_hull_system(const BooleanRelation & b);

/// Solution-space dimension, or nullopt when inconsistent.
std::optional<int> solution_dimension(const Gf2System & sys);

/// Every solution, as bit vectors; requires at most 24 variables.
std::vector<BitVector> enumerate_solutions(const Gf2System & sys);

/// A solution that is neither all-zero nor all-one, if one exists. With an
/// rng the free variables are drawn at random; otherwise the choice is the
/// particular solution or its first free-variable perturbation. Throws Error
/// on an inconsistent system.
std::optional<std::vector<std::uint8_t>> nontrivial_solution(const Gf2System & sys, std::mt19937_64 * rng = nullptr);

}  // namespace phylo
