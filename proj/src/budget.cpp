#include "synthcap/budget.hpp"

#include <cstdlib>
#include <limits>
#include <string>

#include "synthcap/errors.hpp"

namespace synthcap {

std::uint64_t enumeration_budget() {
  static const std::uint64_t budget = [] {
    const char* env = std::getenv("SYNTHCAP_BUDGET");
    if (env != nullptr) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (end != env && v > 0) return static_cast<std::uint64_t>(v);
    }
    return std::uint64_t{1} << 30;
  }();
  return budget;
}

void check_budget(std::uint64_t terms, const char* what) {
  if (terms > enumeration_budget())
    throw BudgetError(std::string(what) + ": " + std::to_string(terms) +
                      " accumulation terms exceed budget " +
                      std::to_string(enumeration_budget()));
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > std::numeric_limits<std::uint64_t>::max() / b)
    return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) out = saturating_mul(out, base);
  return out;
}

}  // namespace synthcap
