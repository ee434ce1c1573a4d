#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "synthcap/prob.hpp"

namespace synthcap {

// Auxiliary decomposition (p_U, p_{X|U}, p_{Y_1|U}, ..., p_{Y_m|U}) realizing
// a joint where X and every Y_i are conditionally independent given U.  The
// single-receiver case has exactly one entry in p_y_given_u.
struct AuxDecomposition {
  Pmf p_u;
  Channel p_x_given_u;
  std::vector<Channel> p_y_given_u;

  // Joint over (X, Y_1, ..., Y_m) implied by the decomposition.
  JointPmf reconstruct() const;
  // Joint over (X, Y_1, ..., Y_m, U).
  JointPmf full_joint() const;

  // Rates in bits computed from the exactly-factorized joint.
  double i_x_u() const;    // I(X;U)
  double i_xy_u() const;   // I(X,Y_1..Y_m;U)
  double h_y_given_u() const;  // H(Y_1..Y_m|U)
};

// Conditionally independent decomposition with U = Y (single receiver).
// Always feasible and realizes the unlimited-common-randomness corner.
AuxDecomposition aux_from_u_equals_y(const Pmf& q_x, const Channel& q_ygx);

struct RatePoint {
  double r = 0.0;
  double r0 = 0.0;
  std::optional<double> r_l;
};

struct BoundaryPoint {
  double r = 0.0;
  double r0 = 0.0;
  std::optional<double> r_l;
  bool attainable = true;
  std::optional<AuxDecomposition> witness;
};

struct RegionBoundary {
  std::vector<BoundaryPoint> points;
  std::string target_description;
  std::uint64_t seed = 0;
  int restarts = 0;
  // The scalarization may miss non-exposed points of a non-convex frontier;
  // boundaries carry this caveat in their metadata.
  std::string method_note;
};

struct OptimizerConfig {
  int restarts = 32;
  std::vector<double> mu_grid;  // empty selects the default grid
  int max_iters = 3200;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  // Accepted witnesses must reconstruct the target within this total
  // variation; restarts that fail it are discarded.
  double feasibility_tol = 1e-6;
  int threads = 0;  // 0 = hardware concurrency
};

// One candidate point on the (I(X;U), I(X,Y;U)) frontier.
struct FrontierPoint {
  double i_x_u = 0.0;
  double i_xy_u = 0.0;
  AuxDecomposition witness;
};

// Pareto-minimal frontier of {(I(X;U), I(X,Y_1..Y_m;U))} over conditionally
// independent decompositions of the target, traced by scalarized multi-start
// descent over the mu grid.  Shared by every region computation below.
std::vector<FrontierPoint> trace_frontier(const JointPmf& target, const OptimizerConfig& cfg);

// Least I(X,Y;U) subject to I(X;U) <= r_cap, warm-started from frontier
// witnesses; nullopt when r_cap is below every achievable I(X;U).
std::optional<FrontierPoint> min_sum_information_at(const JointPmf& target,
                                                    std::span<const FrontierPoint> frontier,
                                                    double r_cap, const OptimizerConfig& cfg,
                                                    std::uint64_t solve_index);

// Theorem-1 region: for each R in r_grid, the least common-randomness rate
// max(I(X,Y;U) - R, 0) over witnesses with I(X;U) <= R.  Grid points below
// every achievable I(X;U) are marked unattainable.
RegionBoundary synthesis_region(const Pmf& q_x, const Channel& q_ygx,
                                std::span<const double> r_grid, const OptimizerConfig& cfg);

struct CommonInformationResult {
  double bits = 0.0;
  AuxDecomposition witness;
};

// Minimum of I(X,Y;U) over decompositions of the joint.
CommonInformationResult wyner_common_information(const JointPmf& q_xy,
                                                 const OptimizerConfig& cfg);

// Minimum H(f(Y)|X) over deterministic maps f with X - f(Y) - Y Markov,
// found by exhaustive partition search (|Y| <= 8).
double necessary_conditional_entropy(const JointPmf& q_xy);

// Closed-form boundaries for the worked examples.
RegionBoundary erasure_region(double p, std::span<const double> r_samples);
RegionBoundary reverse_erasure_region(double p, std::span<const double> r_samples);
RegionBoundary scatter_region(int m);

// Broadcast synthesis with per-receiver outputs conditionally independent
// given U.  q_ys_gx maps X to the product alphabet of (Y_1,...,Y_m) whose
// per-receiver sizes are given in y_sizes.  m = 1 reduces to
// synthesis_region.
RegionBoundary broadcast_region(const Pmf& q_x, const Channel& q_ys_gx,
                                std::span<const std::size_t> y_sizes,
                                std::span<const double> r_grid, const OptimizerConfig& cfg);

// Public-communication region: frontier of (I(X;U), I(X,Y;U)) with the
// common-randomness axis carrying the full information term.
RegionBoundary public_channel_region(const Pmf& q_x, const Channel& q_ygx,
                                     const OptimizerConfig& cfg);

// Relaxed fidelity for statistical tests with memory fraction b: the
// sum-rate requirement shrinks to b * I(X,Y;U).
RegionBoundary limited_memory_region(const Pmf& q_x, const Channel& q_ygx, double b,
                                     std::span<const double> r_grid,
                                     const OptimizerConfig& cfg);

// Rate triples (R, R0, R_L) where the decoder draws local randomness at rate
// R_L >= H(Y|U).
std::vector<BoundaryPoint> local_randomness_region(const Pmf& q_x, const Channel& q_ygx,
                                                   const OptimizerConfig& cfg);

}  // namespace synthcap
