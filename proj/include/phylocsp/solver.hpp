#pragma once

#include <phylocsp/error.hpp>
#include <phylocsp/formula.hpp>
#include <phylocsp/horn.hpp>
#include <phylocsp/splits.hpp>
#include <phylocsp/synth.hpp>

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace phylo {

struct Verdict {
    bool sat = false;
    std::optional<Solution> solution;
    std::string reason;  // for UNSAT
    std::size_t contractions = 0;
};

/// Replaces every variable of X by the smallest one and simplifies: x≠x
/// disjuncts vanish, affine parts collapsed to one variable make their
/// clause true, and split vectors that separate merged positions are
/// removed. Merged variables leave the variable list.
AffineHornFormula contract(const AffineHornFormula & f, const std::vector<int> & x);

/// Equations from the bare affine clauses (no disequality disjuncts).
Gf2System build_split_problem(const AffineHornFormula & f);

struct SpecResult {
    std::optional<Tree> tree;  // injective witness, leaves named by variable
    std::vector<int> forced;   // variables forced equal otherwise
};

/// The recursive split procedure on all variables of f.
SpecResult spec(const AffineHornFormula & f, std::mt19937_64 * rng = nullptr);

/// Decides an affine Horn formula; SAT witnesses are verified.
Verdict solve(const AffineHornFormula & f, std::mt19937_64 * rng = nullptr);

/// A relation used by the instance is not affine Horn.
class NotAffineHornError : public Error {
public:
    using Error::Error;
};

/// Certificates keyed by relation name; filled on demand by classification.
class CertificateCache {
public:
    explicit CertificateCache(int max_arity = default_max_arity) : max_arity_(max_arity) {}
    void add(const std::string & name, AffineHornFormula cert) { certs_[name] = std::move(cert); }
    /// Throws NotAffineHornError when the relation has no affine Horn definition.
    const AffineHornFormula & get(const RelationDef & rel);
    const std::map<std::string, AffineHornFormula> & all() const { return certs_; }

private:
    int max_arity_;
    std::map<std::string, AffineHornFormula> certs_;
};

/// Conjunction of the certificates instantiated on each constraint's arguments.
AffineHornFormula to_affine_horn(const Instance & inst, const ConstraintLanguage & lang, CertificateCache & certs);

/// Solves an instance through the relation certificates. SAT witnesses are
/// verified against the original instance.
Verdict solve_instance(const Instance & inst, const ConstraintLanguage & lang, CertificateCache & certs,
    std::mt19937_64 * rng = nullptr);
Verdict solve_instance(const Instance & inst, const ConstraintLanguage & lang, std::mt19937_64 * rng = nullptr);

}  // namespace phylo
