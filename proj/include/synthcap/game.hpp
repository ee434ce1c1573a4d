#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "synthcap/prob.hpp"
#include "synthcap/regions.hpp"

namespace synthcap {

// Payoff table pi(x, y, z) for the two-player team against a minimizing
// opponent.  Strategy sets are capped at 4x4x4.
class PayoffTable {
 public:
  PayoffTable(std::size_t nx, std::size_t ny, std::size_t nz, std::vector<double> values);
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t nz() const { return nz_; }
  double at(std::size_t x, std::size_t y, std::size_t z) const {
    return values_[(x * ny_ + y) * nz_ + z];
  }

 private:
  std::size_t nx_, ny_, nz_;
  std::vector<double> values_;
};

struct GamePoint {
  double rate = 0.0;
  double payoff = 0.0;
};

struct GameConfig {
  int restarts = 16;
  int max_iters = 1500;
  std::uint64_t seed = 0;
  // Inner common-information evaluations reuse the region optimizer with a
  // reduced restart budget; the region is therefore a heuristic upper bound.
  int inner_restarts = 8;
};

// Worst-case expected payoff min_z E_P pi(X,Y,z) for a joint action pmf
// given as a flattened |X|*|Y| table.
double worst_case_payoff(const PayoffTable& payoff, std::span<const double> joint);

// Best worst-case payoff over product strategies (zero-rate coordination).
double best_product_payoff(const PayoffTable& payoff, int restarts, std::uint64_t seed);

// Best worst-case payoff over all joint strategies, with the maximizing
// joint returned through argmax when non-null.
double maximin_joint_payoff(const PayoffTable& payoff, int restarts, std::uint64_t seed,
                            std::vector<double>* argmax = nullptr);

// Upper boundary of the achievable (rate, payoff) pairs: evaluated points are
// convexified, since splitting time between two strategies may be optimal.
std::vector<GamePoint> game_region(const PayoffTable& payoff, std::span<const double> r_grid,
                                   const GameConfig& cfg);

}  // namespace synthcap
