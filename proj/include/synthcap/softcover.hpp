#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "synthcap/prob.hpp"

namespace synthcap {

// Explicit codebook of channel-input sequences for resolvability experiments.
struct SoftCodebook {
  int n = 0;
  Alphabet u_alphabet;
  std::vector<std::vector<std::size_t>> entries;  // symbol indices, length n each
};

// Number of Monte Carlo trials, or exhaustive enumeration over all codebook
// realizations.
struct TrialSpec {
  static TrialSpec exhaustive() { return TrialSpec{true, 0}; }
  static TrialSpec count(int trials) { return TrialSpec{false, trials}; }
  bool is_exhaustive = false;
  int trials = 0;
};

// Output distribution over V^n induced by mixing the codebook entries with
// the given weights through the memoryless channel.
Pmf induced_output(const SoftCodebook& codebook, const Channel& channel,
                   std::span<const double> weights);

// TV between the uniform-mixture induced output and the n-fold product of
// the single-letter target.
double soft_cover_tv(const SoftCodebook& codebook, const Channel& channel, const Pmf& target);

// Expected TV over random codebooks of M entries drawn i.i.d. from
// codebook_dist: Monte Carlo or exact enumeration.
struct ExpectedTv {
  double mean = 0.0;
  double stddev = 0.0;
};
ExpectedTv expected_tv(const Pmf& codebook_dist, const Channel& channel, std::size_t m, int n,
                       const TrialSpec& trials, std::uint64_t seed);

// Single-shot bound components for the general source-and-channel statement:
// the atypical mass of {i(w,u;v) - i(w) > tau}, the exact delta term, and its
// relaxation 2^{tau/2}/2.
struct Theorem2Bound {
  double p_atypical = 0.0;
  double delta = 0.0;
  double delta_relaxed = 0.0;
  double total() const { return p_atypical + delta; }
};
Theorem2Bound theorem2_bound(const JointPmf& joint_wuv, double tau);

// Same components for the uniform-codebook special case with M entries.
struct Corollary1Bound {
  double p_atypical = 0.0;
  double delta_prime = 0.0;
  double bound = 0.0;
};
Corollary1Bound corollary1_bound(const JointPmf& joint_uv, std::size_t m, double tau);

// Minimum of the corollary bound over a tau grid (256 points across the
// information-density range, the atom values themselves, and a golden-section
// refinement).
struct TauOptimum {
  double tau = 0.0;
  double bound = 0.0;
};
TauOptimum corollary1_bound_min(const JointPmf& joint_uv, std::size_t m);
TauOptimum theorem2_bound_min(const JointPmf& joint_wuv);

struct RenyiSample {
  double alpha = 0.0;
  double i_breve = 0.0;
  double i_bar = 0.0;
};

// Total-variation decay exponents for a codebook distribution and channel at
// rate R, all in bits per symbol.  gamma comes from the two-parameter form,
// gamma_hat restricts to alpha in [1,2], gamma_hathat drops the second term.
struct ExponentReport {
  double rate = 0.0;
  double i_uv = 0.0;
  std::vector<RenyiSample> renyi_curve;
  double gamma = 0.0;
  double gamma_hat = 0.0;
  double gamma_hathat = 0.0;
  double gamma_alpha = 1.0;
  double gamma_alpha_prime = 1.0;
  double gamma_hat_alpha = 1.0;
  double gamma_hathat_alpha = 1.0;
  // Numerical derivative of the order-alpha information at alpha = 1; the
  // small-gap regime has gamma ~ (delta_i / 2) (R - I)^2.
  double delta_i = 0.0;
};
ExponentReport exponents(const JointPmf& joint_uv, double rate);

// (3/2) 2^{-gamma n} with gamma from exponents(); vacuous (1.5) at gamma = 0.
double lemma2_bound(const JointPmf& joint_uv, double rate, int n);

// Mean TV for the source-and-index encoder: the codebook is keyed by
// (w^{rn}, j) with j in [2^{nR}].  Codewords are drawn i.i.d. from
// codebook_dist, or per-letter from codebook_cond given the key's source
// sequence (synchronous case r = 1 only); codebook_cond must induce the same
// marginal on U.
double source_encoder_sim(const Pmf& source_w, const Pmf& codebook_dist, const Channel& channel,
                          double rate, double r, int n, const TrialSpec& trials,
                          std::uint64_t seed,
                          const std::optional<Channel>& codebook_cond = std::nullopt);

// Mean TV for the two-layer superposition construction: an outer codebook of
// w^n(j) at rate R1 and an inner codebook u^n(j,k) at rate R2 drawn from
// p_{U|W} along the outer codeword.  channel_v takes the flattened (W,U)
// product alphabet as input (index w*|U|+u).
double superposition_sim(const Pmf& p_w, const Channel& p_u_given_w, const Channel& channel_v,
                         double rate1, double rate2, int n, int trials, std::uint64_t seed);

// Mean TV of the conditional output against the desired per-letter
// conditional law, for a fixed source sequence w_seq and a codebook drawn
// from prod_t p_{U|W=w_t}.
double local_synthesis_sim(const Channel& p_u_given_w, const Channel& channel_v, double rate,
                           std::span<const std::size_t> w_seq, int trials, std::uint64_t seed);

// Rate threshold I(U;V|W) under the empirical distribution of w_seq.
double local_synthesis_rate_threshold(const Channel& p_u_given_w, const Channel& channel_v,
                                      std::span<const std::size_t> w_seq);

// Brute-force minimum of TV(induced, prod target) over all codebooks of m
// sequences and all mixing weights with entropy at most entropy_budget bits.
struct MeanResolvabilityResult {
  double min_tv = 0.0;
  std::vector<std::vector<std::size_t>> codebook;
  std::vector<double> weights;
};
MeanResolvabilityResult mean_resolvability_search(const Pmf& codebook_dist,
                                                  const Channel& channel, const Pmf& target,
                                                  int n, std::size_t m, double entropy_budget);

}  // namespace synthcap
