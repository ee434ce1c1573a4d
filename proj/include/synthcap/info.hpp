#pragma once

#include <span>

#include "synthcap/prob.hpp"

namespace synthcap {

// All information quantities are in bits (log base 2) with 0*log(0) := 0.
// Information density on zero joint mass is the -infinity sentinel; such
// atoms carry no probability and are excluded from every expectation.

double entropy(const Pmf& p);
double binary_entropy(double p);

// Joint entropy of the full table.
double entropy(const JointPmf& joint);

// I(A;B) for a two-coordinate joint.
double mutual_information(const JointPmf& joint);

// H(coord_a | coord_b) for a two-coordinate joint.
double conditional_entropy(const JointPmf& joint);

// I(A;B|C) for a three-coordinate joint with the conditioning variable last.
double conditional_mutual_information(const JointPmf& joint_abc);

double total_variation(const Pmf& p, const Pmf& q);
double total_variation(const JointPmf& p, const JointPmf& q);

// log2 p(u,v) / (p(u) p(v)); -inf when the joint mass is zero.
double information_density(const JointPmf& joint, std::size_t u, std::size_t v);
double information_density(const JointPmf& joint, const std::string& u, const std::string& v);

// Order-alpha Renyi divergence between the joint and the product of its
// marginals; alpha = 1 returns mutual information (the continuous limit).
// Requires alpha >= 1.
double renyi_information(const JointPmf& joint, double alpha);

// The smaller companion quantity with the expectation over the second
// marginal pulled outside a square root.  Defined for alpha in (0,2] on the
// public surface (alpha = 1 returns mutual information); the internal
// evaluator accepts any alpha != 1 for exponent searches.
double renyi_information_bar(const JointPmf& joint, double alpha);
double renyi_information_bar_unchecked(const JointPmf& joint, double alpha);

// Lower bound on alpha+beta for any detector distinguishing two hypotheses
// at the given total variation.
double hypothesis_floor(double tv);

// Mixture of per-coordinate marginals weighted by a distribution over time
// indices.  All coordinates must share one alphabet.
Pmf random_time_marginal(const JointPmf& seq, const Pmf& t_weights);

// log2(sum_i 2^{x_i}) with -inf entries ignored; returns -inf on empty input.
double log2_sum_exp2(std::span<const double> xs);

}  // namespace synthcap
