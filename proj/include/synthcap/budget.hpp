#pragma once

#include <cstdint>

namespace synthcap {

// Enumeration budget in accumulation terms.  Defaults to 2^30 and can be
// overridden with the SYNTHCAP_BUDGET environment variable.
std::uint64_t enumeration_budget();

// Throws BudgetError when `terms` exceeds the budget.  `what` names the
// operation for the diagnostic.
void check_budget(std::uint64_t terms, const char* what);

// Multiplies with saturation so budget checks cannot overflow.
std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b);

// a^b with saturation.
std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp);

}  // namespace synthcap
