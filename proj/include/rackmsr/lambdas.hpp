#ifndef RACKMSR_LAMBDAS_HPP
#define RACKMSR_LAMBDAS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rackmsr/gf.hpp"
#include "rackmsr/params.hpp"

namespace rackmsr {

// One local determinant condition on a group's coefficients.  The twisted
// family ranges over every nonempty rack subset B of the group and every
// assignment of nonempty twist sets G_b; the power-u family has a single
// untwisted case per (a, B) evaluated at the u-th powers.
struct ConstraintCase {
    enum class Family { twisted, power_u };
    Family family = Family::twisted;
    uint32_t a = 0;                       // group index
    std::vector<uint32_t> B;              // rack positions within the group, sorted
    std::vector<std::vector<uint32_t>> G; // per position in B; empty for power_u
    std::string label() const;
};

struct LambdaSet {
    enum class Mode { searched, explicit_assignment };
    std::vector<Felt> lam; // parent_nbar * sbar entries; group a owns
                           // lam[a*group*sbar + b*sbar + j]
    Felt theta;            // order u
    Mode mode = Mode::explicit_assignment;
    std::string strategy;  // "greedy" or "random" when searched
    uint64_t seed = 0;     // random strategy only
    bool verified = false;
};

struct CheckResult {
    bool ok = true;
    size_t cases_checked = 0;
    std::string first_failure; // empty when ok
};

// Complete deterministic list for every group a in [ntil].  Exponential in
// group*u; capped at group*u <= 8.
std::vector<ConstraintCase> enumerate_constraints(const CodeParams& p);

// Evaluates every case of one group (both families) on a candidate of
// group*sbar elements.  Fail is a value, not an error.
CheckResult check_constraints(const Field* F, const CodeParams& p,
                              const std::vector<Felt>& group_candidate, Felt theta);

enum class SearchStrategy { greedy, random };

// Per-group selection from the pool Q = {xi^alpha : alpha < (q-1)/u}, which is
// pre-partitioned into contiguous per-group chunks.  Throws pool_exhausted
// when a chunk is too small or the try budget runs out.
LambdaSet search_lambdas(const Field* F, const CodeParams& p, SearchStrategy strategy,
                         uint64_t seed = 0, uint64_t max_tries = 200000);

// lambda_i = xi^i, verified group by group (the guarantee threshold is never
// assumed).  Throws explicit_unavailable when the powers leave the pool and
// verification_failed when a constraint fails; callers fall back to search.
LambdaSet explicit_lambdas(const Field* F, const CodeParams& p);

// Re-verification for deserialized sets: pool membership, distinctness of the
// theta-orbits, and both constraint families on every group.
CheckResult validate_lambda_set(const Field* F, const CodeParams& p, const LambdaSet& ls);

// Coefficient vector (sbar entries) of one parent rack.
std::vector<Felt> rack_lambdas(const CodeParams& p, const LambdaSet& ls, uint32_t rack);

} // namespace rackmsr

#endif
