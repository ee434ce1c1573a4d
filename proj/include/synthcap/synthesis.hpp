#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "synthcap/prob.hpp"
#include "synthcap/regions.hpp"
#include "synthcap/rng.hpp"

namespace synthcap {

// Random codebook of u-sequences indexed by (j, k) with j in [M], k in [M0],
// M = ceil(2^{nR}), M0 = ceil(2^{nR0}).  Immutable after generation.
struct SynthesisCode {
  int n = 0;
  double rate_r = 0.0;
  double rate_r0 = 0.0;
  std::size_t m = 1;
  std::size_t m0 = 1;
  AuxDecomposition aux;  // single-receiver decomposition used for generation
  // codewords[k * m + j] is the symbol-index sequence u^n(j, k).
  std::vector<std::vector<std::uint8_t>> codewords;

  std::span<const std::uint8_t> codeword(std::size_t j, std::size_t k) const {
    return codewords[k * m + j];
  }
};

// Draws every codeword i.i.d. across (j,k) and positions from p_U.
// Deterministic given the seed.
SynthesisCode generate_code(const AuxDecomposition& aux, int n, double r, double r0,
                            std::uint64_t seed);

// Codebook sizes from rates; exposed for tests.
std::size_t codebook_size(int n, double rate);

// Samples j with probability proportional to prod_t p_{X|U}(x_t | u_t(j,k));
// a sub-codebook with all-zero likelihood falls back to the uniform
// distribution.
std::size_t likelihood_encode(const SynthesisCode& code, std::span<const std::size_t> x_seq,
                              std::size_t k, Rng& rng);

// Encoder posterior over j for a fixed (x^n, k); exposed because the exact
// induced distribution and the sampler must share it.
std::vector<double> encoder_posterior(const SynthesisCode& code,
                                      std::span<const std::size_t> x_seq, std::size_t k);

// Draws y_t independently from p_{Y|U}(. | u_t(j,k)).
std::vector<std::size_t> decode_sample(const SynthesisCode& code, std::size_t j, std::size_t k,
                                       Rng& rng);

// Exact induced input-output distribution over (X^n, Y^n) as a two-coordinate
// joint on sequence alphabets, computed by exhaustive summation.  Guarded by
// the enumeration budget.
JointPmf exact_induced_joint(const SynthesisCode& code, const Pmf& q_x);

// n-fold desired distribution prod q_X q_{Y|X} on the same axes.
JointPmf desired_joint(const Pmf& q_x, const Channel& q_ygx, int n);

// Total variation between the exact induced distribution and the desired
// memoryless distribution.
double synthesis_tv(const SynthesisCode& code, const Pmf& q_x, const Channel& q_ygx);

// TV between the reverse-constructed joint of (X^n, K) and uniform(K) x
// prod q_X; the quantity the construction drives to zero.
double key_independence_tv(const SynthesisCode& code, const Pmf& q_x);

// Plug-in Monte Carlo estimate of synthesis_tv from sampled pairs.  Biased
// (documented); accepted only for n <= 4.
double monte_carlo_synthesis_tv(const SynthesisCode& code, const Pmf& q_x,
                                const Channel& q_ygx, int trials, std::uint64_t seed);

struct DecayRow {
  int n = 0;
  double mean_tv = 0.0;
  double std_tv = 0.0;
  int trials = 0;
};

// Per-n average of synthesis_tv over fresh codebooks with the given seeds.
std::vector<DecayRow> tv_decay_experiment(const AuxDecomposition& aux, const Pmf& q_x,
                                          const Channel& q_ygx, const RatePoint& rates,
                                          std::span<const int> n_list,
                                          std::span<const std::uint64_t> seeds);

// Deterministic test mapping (x^n, y^n) to a verdict; true flags synthetic.
using Detector =
    std::function<bool(std::span<const std::size_t>, std::span<const std::size_t>)>;

struct DetectorErrors {
  double alpha = 0.0;  // P(flag synthetic | genuine)
  double beta = 0.0;   // P(flag genuine | synthetic)
  int trials = 0;
};

// Monte Carlo estimate of the detector error pair against the genuine
// memoryless law and the synthesized pipeline.
DetectorErrors detector_demo(const SynthesisCode& code, const Pmf& q_x, const Channel& q_ygx,
                             const Detector& detector, int trials, std::uint64_t seed);

}  // namespace synthcap
