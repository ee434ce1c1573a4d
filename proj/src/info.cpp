#include "synthcap/info.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "synthcap/errors.hpp"

namespace synthcap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }
}  // namespace

double entropy(const Pmf& p) {
  double h = 0.0;
  for (double v : p.probs()) h += plogp(v);
  return h;
}

double binary_entropy(double p) {
  if (p < 0.0 || p > 1.0) throw ParseError("binary_entropy: p outside [0,1]");
  return plogp(p) + plogp(1.0 - p);
}

double entropy(const JointPmf& joint) {
  double h = 0.0;
  for (double v : joint.table()) h += plogp(v);
  return h;
}

double mutual_information(const JointPmf& joint) {
  if (joint.rank() != 2) throw ParseError("mutual_information: two coordinates required");
  Pmf a = joint.marginal(0);
  Pmf b = joint.marginal(1);
  return entropy(a) + entropy(b) - entropy(joint);
}

double conditional_entropy(const JointPmf& joint) {
  if (joint.rank() != 2) throw ParseError("conditional_entropy: two coordinates required");
  return entropy(joint) - entropy(joint.marginal(1));
}

double conditional_mutual_information(const JointPmf& joint_abc) {
  if (joint_abc.rank() != 3)
    throw ParseError("conditional_mutual_information: three coordinates required");
  const std::size_t ac[] = {0, 2}, bc[] = {1, 2};
  // I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C)
  return entropy(joint_abc.marginal_joint(ac)) + entropy(joint_abc.marginal_joint(bc)) -
         entropy(joint_abc) - entropy(joint_abc.marginal(2));
}

double total_variation(const Pmf& p, const Pmf& q) {
  if (p.atoms() != q.atoms()) throw ParseError("total_variation: alphabet mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

double total_variation(const JointPmf& p, const JointPmf& q) {
  if (p.axes() != q.axes()) throw ParseError("total_variation: alphabet mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p.at_flat(i) - q.at_flat(i));
  return 0.5 * sum;
}

double information_density(const JointPmf& joint, std::size_t u, std::size_t v) {
  if (joint.rank() != 2) throw ParseError("information_density: two coordinates required");
  if (u >= joint.axis(0).size() || v >= joint.axis(1).size())
    throw ParseError("information_density: index outside alphabet");
  const std::size_t idx[] = {u, v};
  double juv = joint.at(idx);
  if (juv <= 0.0) return -kInf;
  return std::log2(juv) - std::log2(joint.marginal(0)[u]) - std::log2(joint.marginal(1)[v]);
}

double information_density(const JointPmf& joint, const std::string& u, const std::string& v) {
  auto find = [](const Alphabet& a, const std::string& s) {
    auto it = std::find(a.begin(), a.end(), s);
    if (it == a.end()) throw ParseError("information_density: unknown atom '" + s + "'");
    return static_cast<std::size_t>(it - a.begin());
  };
  return information_density(joint, find(joint.axis(0), u), find(joint.axis(1), v));
}

double log2_sum_exp2(std::span<const double> xs) {
  double m = -kInf;
  for (double x : xs) m = std::max(m, x);
  if (m == -kInf) return -kInf;
  double acc = 0.0;
  for (double x : xs) acc += std::exp2(x - m);
  return m + std::log2(acc);
}

namespace {

// log2 of the joint probabilities and the information densities, flattened;
// atoms with zero joint mass are skipped by callers (log_j = -inf there).
struct DensityTable {
  std::vector<double> log_j;   // log2 joint
  std::vector<double> dens;    // information density
  std::vector<double> log_pu;  // log2 of marginal 0 per atom
  std::vector<double> log_pv;  // log2 of marginal 1 per atom
};

DensityTable density_table(const JointPmf& joint) {
  Pmf pu = joint.marginal(0);
  Pmf pv = joint.marginal(1);
  DensityTable t;
  const std::size_t nv = pv.size();
  t.log_j.resize(joint.size());
  t.dens.resize(joint.size());
  t.log_pu.resize(pu.size());
  t.log_pv.resize(nv);
  for (std::size_t u = 0; u < pu.size(); ++u)
    t.log_pu[u] = pu[u] > 0 ? std::log2(pu[u]) : -kInf;
  for (std::size_t v = 0; v < nv; ++v) t.log_pv[v] = pv[v] > 0 ? std::log2(pv[v]) : -kInf;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    double j = joint.at_flat(i);
    t.log_j[i] = j > 0 ? std::log2(j) : -kInf;
    t.dens[i] = j > 0 ? t.log_j[i] - t.log_pu[i / nv] - t.log_pv[i % nv] : -kInf;
  }
  return t;
}

}  // namespace

double renyi_information(const JointPmf& joint, double alpha) {
  if (joint.rank() != 2) throw ParseError("renyi_information: two coordinates required");
  if (alpha < 1.0) throw ParseError("renyi_information: alpha must be >= 1");
  if (alpha == 1.0) return mutual_information(joint);
  DensityTable t = density_table(joint);
  // (1/(a-1)) log2 E 2^{(a-1) i(U;V)}, accumulated in the log domain so large
  // alpha does not overflow.
  std::vector<double> terms;
  terms.reserve(joint.size());
  for (std::size_t i = 0; i < joint.size(); ++i)
    if (t.log_j[i] != -kInf) terms.push_back(t.log_j[i] + (alpha - 1.0) * t.dens[i]);
  return log2_sum_exp2(terms) / (alpha - 1.0);
}

double renyi_information_bar_unchecked(const JointPmf& joint, double alpha) {
  if (joint.rank() != 2) throw ParseError("renyi_information_bar: two coordinates required");
  if (alpha == 1.0) return mutual_information(joint);
  DensityTable t = density_table(joint);
  const std::size_t nv = joint.axis(1).size();
  const std::size_t nu = joint.axis(0).size();
  // (1/(a-1)) log2 ( E_V sqrt( E_{U|V} 2^{(a-1) i(U;V)} ) )^2
  std::vector<double> inner;
  std::vector<double> outer;
  outer.reserve(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    if (t.log_pv[v] == -kInf) continue;
    inner.clear();
    for (std::size_t u = 0; u < nu; ++u) {
      std::size_t i = u * nv + v;
      if (t.log_j[i] == -kInf) continue;
      // log2 of  p(u|v) * 2^{(a-1) i}
      inner.push_back(t.log_j[i] - t.log_pv[v] + (alpha - 1.0) * t.dens[i]);
    }
    outer.push_back(t.log_pv[v] + 0.5 * log2_sum_exp2(inner));
  }
  return 2.0 * log2_sum_exp2(outer) / (alpha - 1.0);
}

double renyi_information_bar(const JointPmf& joint, double alpha) {
  if (!(alpha > 0.0) || alpha > 2.0)
    throw ParseError("renyi_information_bar: alpha outside (0,2]");
  return renyi_information_bar_unchecked(joint, alpha);
}

double hypothesis_floor(double tv) {
  if (tv < 0.0 || tv > 1.0) throw ParseError("hypothesis_floor: tv outside [0,1]");
  return 1.0 - tv;
}

Pmf random_time_marginal(const JointPmf& seq, const Pmf& t_weights) {
  const std::size_t n = seq.rank();
  if (t_weights.size() != n)
    throw ParseError("random_time_marginal: weight/coordinate count mismatch");
  for (std::size_t c = 1; c < n; ++c)
    if (seq.axis(c) != seq.axis(0))
      throw ParseError("random_time_marginal: coordinates must share one alphabet");
  std::vector<double> out(seq.axis(0).size(), 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    Pmf m = seq.marginal(t);
    for (std::size_t a = 0; a < out.size(); ++a) out[a] += t_weights[t] * m[a];
  }
  return Pmf(seq.axis(0), std::move(out));
}

}  // namespace synthcap
