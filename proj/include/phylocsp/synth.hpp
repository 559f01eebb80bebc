#pragma once

#include <phylocsp/horn.hpp>
#include <phylocsp/orbits.hpp>
#include <phylocsp/splits.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace phylo {

struct SeparationResult {
    bool ok = true;
    // counterexample: t, t' and the split vector of t that found no partner
    std::optional<Orbit> t, t_prime;
    BitVector s = 0;
};

/// For every orbit pair (t, t') with t not all-equal and every split vector s
/// of t, some t'' has the meet pattern, split vector s, and every cone of t'
/// on an s-monochromatic triple.
SeparationResult check_separated(const OrbitRelation & r);

/// For every pair with equal patterns and a common split vector s, some t''
/// has split vector s and matches t on the 0-side and t' on the 1-side.
SeparationResult check_free(const OrbitRelation & r);

/// Equalities and disequalities forcing exactly pattern `a`.
Formula chi(const EqualityPattern & a);

/// Two patterns of E whose meet is missing from E.
struct MeetFailure {
    EqualityPattern a, b;
};

/// Horn-over-equality clauses accepting exactly the patterns in E, or the
/// failing pair when E is not closed under meets. Variables are 0..k-1.
std::variant<std::vector<AffineHornClause>, MeetFailure> synth_psi0(const std::vector<EqualityPattern> & e, int k);

/// A projection whose split relation (constants adjoined) is not affine.
struct SplitFailure {
    EqualityPattern pattern;  // pattern group the projection came from
    std::vector<int> coords;  // 0-based original coordinates
    BooleanRelation split;
};

/// The canonical affine Horn candidate for R over variables x1..xk, with
/// clauses implied by the others removed.
std::variant<AffineHornFormula, MeetFailure, SplitFailure> synth_psi(const OrbitRelation & r);

/// First orbit of the arity on which ψ and membership in R disagree.
std::optional<Orbit> verify_equivalence(const OrbitRelation & r, const AffineHornFormula & psi);

/// ψ's relation over the orbit catalogue.
OrbitRelation relation_of_horn(const AffineHornFormula & psi);

struct RelationVerdict {
    std::string name;
    int arity = 0;
    bool affine_horn = false;
    std::optional<AffineHornFormula> certificate;
    // exactly one set when not affine Horn
    std::optional<MeetFailure> meet_failure;
    std::optional<SplitFailure> split_failure;
    std::optional<Orbit> equivalence_failure;
    bool contains_all_equal = false;
    bool pattern_only = false;

    /// One-line reason for a negative verdict.
    std::string witness() const;
};

struct LanguageVerdict {
    std::vector<RelationVerdict> relations;
    bool tractable = false;
    bool trivially_satisfiable = false;
    bool equality_language = false;
    bool equality_constant = false;
    bool equality_injective = false;

    std::string summary() const;
};

RelationVerdict classify_relation(const RelationDef & rel, int max_arity = default_max_arity);

/// Per-relation classification of the declared relations; `threads` > 1
/// classifies relations concurrently with results in declaration order.
LanguageVerdict classify_language(const ConstraintLanguage & lang, int max_arity = default_max_arity,
    unsigned threads = 1);

}  // namespace phylo
