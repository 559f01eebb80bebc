#pragma once

#include <phylocsp/formula.hpp>
#include <phylocsp/splits.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace phylo {

/// φ_B(z1..zn): z1=…=zn, or some vector of B names the clan split
/// {z_i : t_i=0} | {z_i : t_i=1}. B is stored as given.
struct AffinePart {
    std::vector<int> vars;
    BooleanRelation b;

    friend bool operator==(const AffinePart &, const AffinePart &) = default;
};

/// Disjunction of disequalities plus at most one affine part. No disjuncts
/// at all is the empty (false) clause.
struct AffineHornClause {
    std::vector<std::pair<int, int>> neq;
    std::optional<AffinePart> affine;

    bool is_empty() const { return neq.empty() && ! affine; }
    bool is_bare_affine() const { return neq.empty() && affine.has_value(); }

    friend bool operator==(const AffineHornClause &, const AffineHornClause &) = default;
};

struct AffineHornFormula {
    std::vector<std::string> vars;
    std::vector<AffineHornClause> clauses;

    int arity() const { return static_cast<int>(vars.size()); }
    int var_index(std::string_view name) const;
    int add_var(const std::string & name);
};

/// The affine clause for B on `vars`. Throws unless B with constants adjoined is affine.
AffineHornClause phi_b(const BooleanRelation & b, std::vector<int> vars);

/// Throws Error if a clause is malformed or an affine part is not affine.
void check_affine_horn(const AffineHornFormula & f);

bool affine_part_holds(const AffinePart & a, const Tree & t, std::span<const Tree::Node> nodes);
bool evaluate(const AffineHornClause & c, const Tree & t, std::span<const Tree::Node> nodes);
bool evaluate(const AffineHornFormula & f, const Tree & t, std::span<const Tree::Node> nodes);

/// Shape check plus every clause under the assignment.
bool verify_solution(const AffineHornFormula & f, const Solution & sol);

/// "x1 != x2 or split{011,100 on (x1,x2,x3)}"; the empty clause is "false".
std::string to_string(const AffineHornClause & c, const std::vector<std::string> & vars);
/// .horn text: a "vars" line, then one clause per line.
std::string to_horn(const AffineHornFormula & f);
/// Clause lines over the given variables, which are extended on first use.
AffineHornClause parse_clause(std::string_view text, std::vector<std::string> & vars, int line = 0);
AffineHornFormula parse_horn(std::string_view text);

/// Certificate files: "cert NAME/k" headers followed by clause lines over x1..xk.
std::string to_certificates(const std::map<std::string, AffineHornFormula> & certs);
std::map<std::string, AffineHornFormula> parse_certificates(std::string_view text);

}  // namespace phylo
