#pragma once

#include <phylocsp/error.hpp>
#include <phylocsp/formula.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace phylo {

/// The search would exceed its budget; never a verdict.
class OracleInconclusive : public Error {
public:
    using Error::Error;
};

struct OracleBudget {
    std::size_t max_leaves = 7;
    std::size_t max_candidates = 0;  // 0 = unlimited
    double timeout_seconds = 0;      // 0 = none
    unsigned threads = 1;
};

struct OracleResult {
    bool sat = false;
    std::optional<Solution> solution;
    std::size_t candidates_examined = 0;
    std::size_t candidates_total = 0;
};

/// Number of (partition, topology on its blocks) candidates for n variables.
std::size_t oracle_candidate_count(std::size_t n);

/// Exhaustive search over partitions of the variables (restricted growth
/// order) and topologies on the blocks. The first verifying candidate in
/// that order is returned, whatever the thread count.
OracleResult oracle_solve(const Instance & inst, const ConstraintLanguage & lang, const OracleBudget & budget = {});

/// Positive not-all-equal 3SAT.
struct NaeInstance {
    std::vector<std::string> vars;
    std::vector<std::array<int, 3>> clauses;
};

bool nae_satisfiable(const NaeInstance & nae);

/// Merges each pair of variables (by name); the first name of a class survives.
NaeInstance identify(const NaeInstance & nae, const std::vector<std::pair<std::string, std::string>> & pairs);

/// Translation into an Nd instance with extra variables a, b and w1_c, w2_c
/// per clause c, plus Neq(a,b).
Instance nae_to_phylo(const NaeInstance & nae);

/// Random clauses over n variables "v1".."vn", three distinct variables each.
NaeInstance random_nae(int vars, int clauses, std::uint64_t seed);

/// Triples valid in a random tree on "v1".."vn"; distinct variable sets.
Instance random_satisfiable_triples(int vars, int constraints, std::uint64_t seed);

/// Random constraints over the given relations on "v1".."vn".
Instance random_instance(const ConstraintLanguage & lang, const std::vector<std::string> & relations, int vars,
    int constraints, std::mt19937_64 & rng);

/// .triples text; every constraint must be a C constraint.
std::string to_triples(const Instance & inst);

}  // namespace phylo
