#pragma once

#include <phylocsp/tree.hpp>

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace phylo {

/// Quantifier-free phylogeny formula body. Variables are indices into the
/// owning PhyloFormula's declared variable list.
struct Formula {
    enum class Op { True, False, Cone, Eq, Not, And, Or };

    Op op = Op::True;
    std::array<int, 3> args{};  // Cone: x|yz as (x,y,z); Eq: (x,y)
    std::vector<Formula> kids;

    static Formula truth(bool value);
    static Formula cone(int x, int y, int z);
    static Formula eq(int x, int y);
    static Formula neq(int x, int y);
    static Formula negate(Formula f);
    static Formula conj(std::vector<Formula> kids);
    static Formula disj(std::vector<Formula> kids);

    friend bool operator==(const Formula &, const Formula &) = default;
};

/// Negation normal form: Not appears only directly above Cone or Eq.
Formula to_nnf(const Formula & f);

/// Largest variable index used plus one.
int variable_bound(const Formula & f);

struct PhyloFormula {
    std::vector<std::string> vars;
    Formula body;

    int arity() const { return static_cast<int>(vars.size()); }
};

/// Evaluates `f` with variable i bound to the leaf node `nodes[i]` of `t`.
bool evaluate(const Formula & f, const Tree & t, std::span<const Tree::Node> nodes);

/// Label-based convenience: assignment maps each variable name to a leaf label.
bool evaluate(const PhyloFormula & f, const Tree & t, const std::map<std::string, std::string> & assignment);

/// Text in the .phl formula syntax, using the given variable names.
std::string to_string(const Formula & f, const std::vector<std::string> & vars);

/// Parses a formula over the given variable names (.phl formula syntax).
Formula parse_formula(std::string_view text, const std::vector<std::string> & vars);

struct RelationDef {
    std::string name;
    PhyloFormula def;
    bool builtin = false;

    int arity() const { return def.arity(); }
};

/// Builtin relations C, Cd, Q, Qd, N, Nd, plus Eq and Neq for equality and
/// disequality. Variables are x1..xk.
const std::vector<RelationDef> & builtin_relations();

/// Relations declared in a .phl file. Builtins are resolvable by name but are
/// not part of `declared()`.
class ConstraintLanguage {
public:
    ConstraintLanguage() = default;

    /// Throws on duplicate names (including clashes with builtins).
    void add(RelationDef rel);
    const std::vector<RelationDef> & declared() const { return declared_; }
    /// Declared relations first, then builtins.
    const RelationDef * find(std::string_view name) const;
    const RelationDef & get(std::string_view name) const;

    /// Language whose declared relations are the given builtins.
    static ConstraintLanguage of_builtins(const std::vector<std::string> & names);

private:
    std::vector<RelationDef> declared_;
};

ConstraintLanguage parse_language(std::string_view text);
/// .phl text for the declared relations.
std::string to_phl(const ConstraintLanguage & lang);

struct Constraint {
    std::string relation;
    std::vector<int> args;  // indices into Instance::vars

    friend bool operator==(const Constraint &, const Constraint &) = default;
};

/// Phylo instance: a variable set plus relation applications.
struct Instance {
    std::vector<std::string> vars;
    std::vector<Constraint> constraints;
    /// Optional path from a "language FILE" header.
    std::optional<std::string> language_file;

    int var_index(std::string_view name) const;  // -1 if absent
    int add_var(const std::string & name);       // existing index or new
};

/// .phy text: optional "language FILE" header, optional "vars a b ..." lines,
/// constraint lines NAME(v1,...,vk). Unknown symbols and arity mismatches are
/// errors when `lang` is given.
Instance parse_instance(std::string_view text, const ConstraintLanguage * lang = nullptr);
/// .triples text: lines "x y | z", each becoming C(z,x,y).
Instance parse_triples(std::string_view text);
std::string to_phy(const Instance & inst);

/// Throws if a constraint names an unknown relation or has the wrong arity.
void check_instance(const Instance & inst, const ConstraintLanguage & lang);

struct Solution {
    Tree tree;
    std::map<std::string, std::string> assignment;  // variable -> leaf label
};

/// Shape check (total assignment onto leaves, every leaf used) plus every
/// constraint's defining formula under the assignment.
bool verify_solution(const Instance & inst, const ConstraintLanguage & lang, const Solution & sol);

/// "var -> leaf" lines.
std::string to_mapping(const Solution & sol);

}  // namespace phylo
