#include "synthcap/softcover.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "synthcap/budget.hpp"
#include "synthcap/errors.hpp"
#include "synthcap/info.hpp"
#include "synthcap/rng.hpp"

namespace synthcap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t pow_size(std::size_t base, int n) {
  std::size_t out = 1;
  for (int i = 0; i < n; ++i) out *= base;
  return out;
}

void unflatten_seq(std::size_t flat, std::size_t base, std::span<std::size_t> out) {
  for (std::size_t t = out.size(); t-- > 0;) {
    out[t] = flat % base;
    flat /= base;
  }
}

std::vector<double> product_target(const Pmf& single, int n) {
  const std::size_t total = pow_size(single.size(), n);
  std::vector<double> out(total);
  std::vector<std::size_t> seq(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < total; ++i) {
    unflatten_seq(i, single.size(), seq);
    double p = 1.0;
    for (int t = 0; t < n; ++t) p *= single[seq[t]];
    out[i] = p;
  }
  return out;
}

double half_l1(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return 0.5 * sum;
}

}  // namespace

Pmf induced_output(const SoftCodebook& codebook, const Channel& channel,
                   std::span<const double> weights) {
  if (codebook.entries.empty()) throw ParseError("induced_output: empty codebook");
  if (weights.size() != codebook.entries.size())
    throw ParseError("induced_output: one weight per entry required");
  const std::size_t nv = channel.num_outputs();
  const std::size_t vn = pow_size(nv, codebook.n);
  check_budget(saturating_mul(saturating_mul(vn, codebook.entries.size()),
                              static_cast<std::uint64_t>(codebook.n)),
               "induced_output");
  std::vector<double> out(vn, 0.0);
  std::vector<std::size_t> vseq(static_cast<std::size_t>(codebook.n));
  for (std::size_t e = 0; e < codebook.entries.size(); ++e) {
    if (weights[e] <= 0.0) continue;
    const auto& u = codebook.entries[e];
    for (std::size_t vi = 0; vi < vn; ++vi) {
      unflatten_seq(vi, nv, vseq);
      double p = weights[e];
      for (int t = 0; t < codebook.n; ++t) p *= channel.at(u[t], vseq[t]);
      out[vi] += p;
    }
  }
  return Pmf(sequence_alphabet(channel.output(), static_cast<std::size_t>(codebook.n)),
             std::move(out));
}

double soft_cover_tv(const SoftCodebook& codebook, const Channel& channel, const Pmf& target) {
  if (target.size() != channel.num_outputs())
    throw ParseError("soft_cover_tv: target must live on the channel output alphabet");
  std::vector<double> uniform(codebook.entries.size(),
                              1.0 / static_cast<double>(codebook.entries.size()));
  Pmf induced = induced_output(codebook, channel, uniform);
  return half_l1(induced.probs(), product_target(target, codebook.n));
}

ExpectedTv expected_tv(const Pmf& codebook_dist, const Channel& channel, std::size_t m, int n,
                       const TrialSpec& trials, std::uint64_t seed) {
  if (codebook_dist.size() != channel.num_inputs())
    throw ParseError("expected_tv: codebook distribution must match channel input");
  if (m == 0) throw ParseError("expected_tv: at least one codeword required");
  if (!trials.is_exhaustive && trials.trials <= 0)
    throw ParseError("expected_tv: empty sample rejected");

  const Pmf target = JointPmf::from_input_and_channel(codebook_dist, channel).marginal(1);
  const std::vector<double> target_n = product_target(target, n);
  const std::size_t nu = codebook_dist.size();
  std::vector<double> uniform(m, 1.0 / static_cast<double>(m));

  SoftCodebook cb;
  cb.n = n;
  cb.u_alphabet = codebook_dist.atoms();
  cb.entries.assign(m, std::vector<std::size_t>(static_cast<std::size_t>(n), 0));

  auto tv_of_current = [&]() {
    Pmf induced = induced_output(cb, channel, uniform);
    return half_l1(induced.probs(), target_n);
  };

  double sum = 0.0, sum2 = 0.0;
  if (trials.is_exhaustive) {
    const std::size_t slots = m * static_cast<std::size_t>(n);
    const std::uint64_t count = saturating_pow(nu, slots);
    check_budget(saturating_mul(count, pow_size(channel.num_outputs(), n)),
                 "expected_tv exhaustive");
    std::vector<std::size_t> digits(slots, 0);
    for (std::uint64_t it = 0; it < count; ++it) {
      double w = 1.0;
      for (std::size_t s = 0; s < slots; ++s) {
        cb.entries[s / n][s % n] = digits[s];
        w *= codebook_dist[digits[s]];
      }
      if (w > 0.0) {
        const double tv = tv_of_current();
        sum += w * tv;
        sum2 += w * tv * tv;
      }
      for (std::size_t s = slots; s-- > 0;) {
        if (++digits[s] < nu) break;
        digits[s] = 0;
      }
    }
    const double var = std::max(0.0, sum2 - sum * sum);
    return ExpectedTv{sum, std::sqrt(var)};
  }

  for (int trial = 0; trial < trials.trials; ++trial) {
    Rng rng(seed, rng_stream::kCodebook, static_cast<std::uint64_t>(trial));
    for (std::size_t j = 0; j < m; ++j)
      for (int t = 0; t < n; ++t) cb.entries[j][t] = rng.sample(codebook_dist.probs());
    const double tv = tv_of_current();
    sum += tv;
    sum2 += tv * tv;
  }
  const double cnt = static_cast<double>(trials.trials);
  const double mean = sum / cnt;
  const double var = std::max(0.0, sum2 / cnt - mean * mean);
  return ExpectedTv{mean, std::sqrt(var)};
}

namespace {

// Statistic, probability, and conditional layout shared by the two bounds.
struct BoundAtoms {
  std::vector<double> stat;   // per atom
  std::vector<double> prob;   // joint probability per atom
  std::vector<double> pv;     // marginal of V
  std::vector<std::size_t> v_of;  // V index per atom
};

// Bound components at a given tau: atypical mass and
// (scale) * E_V sqrt(E_{.|V} 2^{stat} 1{stat <= tau}).
std::pair<double, double> bound_components(const BoundAtoms& atoms, double tau, double scale) {
  double p_atypical = 0.0;
  std::vector<double> inner(atoms.pv.size(), 0.0);
  for (std::size_t i = 0; i < atoms.stat.size(); ++i) {
    if (atoms.prob[i] <= 0.0) continue;
    if (atoms.stat[i] > tau) {
      p_atypical += atoms.prob[i];
    } else {
      inner[atoms.v_of[i]] += atoms.prob[i] * std::exp2(atoms.stat[i]);
    }
  }
  double delta = 0.0;
  for (std::size_t v = 0; v < atoms.pv.size(); ++v) {
    if (atoms.pv[v] <= 0.0) continue;
    // inner holds p(v) E_{.|v}[...]; sqrt with the conditional normalization.
    delta += atoms.pv[v] * std::sqrt(inner[v] / atoms.pv[v]);
  }
  return {p_atypical, scale * delta};
}

TauOptimum minimize_over_tau(const BoundAtoms& atoms, double scale,
                             const std::function<double(double)>& relaxed_total) {
  std::vector<double> candidates;
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < atoms.stat.size(); ++i) {
    if (atoms.prob[i] <= 0.0) continue;
    candidates.push_back(atoms.stat[i]);
    lo = std::min(lo, atoms.stat[i]);
    hi = std::max(hi, atoms.stat[i]);
  }
  if (candidates.empty()) return TauOptimum{0.0, 0.0};
  if (hi <= lo) hi = lo + 1.0;
  for (int g = 0; g < 256; ++g)
    candidates.push_back(lo + (hi - lo) * g / 255.0);
  auto total_at = [&](double tau) {
    auto [pa, delta] = bound_components(atoms, tau, scale);
    double total = pa + std::min(delta, relaxed_total ? relaxed_total(tau) : kInf);
    return std::min(total, 1.0);  // TV never exceeds 1
  };
  TauOptimum best{candidates[0], total_at(candidates[0])};
  for (double tau : candidates) {
    const double v = total_at(tau);
    if (v < best.bound) best = TauOptimum{tau, v};
  }
  // Golden-section refinement around the best candidate.
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = best.tau - (hi - lo) / 255.0, b = best.tau + (hi - lo) / 255.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = total_at(x1), f2 = total_at(x2);
  for (int it = 0; it < 40; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = total_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = total_at(x2);
    }
  }
  const double mid = 0.5 * (a + b);
  if (total_at(mid) < best.bound) best = TauOptimum{mid, total_at(mid)};
  return best;
}

BoundAtoms theorem2_atoms(const JointPmf& joint_wuv) {
  if (joint_wuv.rank() != 3) throw ParseError("theorem2_bound: (W,U,V) joint required");
  BoundAtoms atoms;
  const Pmf pw = joint_wuv.marginal(0);
  const Pmf pv = joint_wuv.marginal(2);
  const std::size_t wu[] = {0, 1};
  const JointPmf pwu = joint_wuv.marginal_joint(wu);
  const std::size_t nv = pv.size();
  const std::size_t nu = joint_wuv.axis(1).size();
  atoms.pv = pv.probs();
  atoms.stat.resize(joint_wuv.size());
  atoms.prob.resize(joint_wuv.size());
  atoms.v_of.resize(joint_wuv.size());
  std::vector<std::size_t> idx(3);
  for (std::size_t i = 0; i < joint_wuv.size(); ++i) {
    joint_wuv.unflatten(i, idx);
    const double p = joint_wuv.at_flat(i);
    atoms.prob[i] = p;
    atoms.v_of[i] = idx[2];
    if (p <= 0.0) {
      atoms.stat[i] = -kInf;
      continue;
    }
    const double p_wu = pwu.at_flat(idx[0] * nu + idx[1]);
    // i(w,u;v) - i(w) = log2( p(w) p(v|w,u) / p(v) )
    atoms.stat[i] = std::log2(pw[idx[0]]) + std::log2(p / p_wu) - std::log2(pv[idx[2]]);
  }
  return atoms;
}

BoundAtoms corollary1_atoms(const JointPmf& joint_uv) {
  if (joint_uv.rank() != 2) throw ParseError("corollary1_bound: (U,V) joint required");
  BoundAtoms atoms;
  const Pmf pu = joint_uv.marginal(0);
  const Pmf pv = joint_uv.marginal(1);
  const std::size_t nv = pv.size();
  atoms.pv = pv.probs();
  atoms.stat.resize(joint_uv.size());
  atoms.prob.resize(joint_uv.size());
  atoms.v_of.resize(joint_uv.size());
  for (std::size_t i = 0; i < joint_uv.size(); ++i) {
    const double p = joint_uv.at_flat(i);
    atoms.prob[i] = p;
    atoms.v_of[i] = i % nv;
    atoms.stat[i] =
        p > 0.0 ? std::log2(p) - std::log2(pu[i / nv]) - std::log2(pv[i % nv]) : -kInf;
  }
  return atoms;
}

}  // namespace

Theorem2Bound theorem2_bound(const JointPmf& joint_wuv, double tau) {
  BoundAtoms atoms = theorem2_atoms(joint_wuv);
  auto [pa, delta] = bound_components(atoms, tau, 0.5);
  return Theorem2Bound{pa, delta, 0.5 * std::exp2(tau / 2.0)};
}

Corollary1Bound corollary1_bound(const JointPmf& joint_uv, std::size_t m, double tau) {
  if (m == 0) throw ParseError("corollary1_bound: M must be positive");
  BoundAtoms atoms = corollary1_atoms(joint_uv);
  auto [pa, delta] = bound_components(atoms, tau, 0.5 / std::sqrt(static_cast<double>(m)));
  return Corollary1Bound{pa, delta, pa + delta};
}

TauOptimum corollary1_bound_min(const JointPmf& joint_uv, std::size_t m) {
  BoundAtoms atoms = corollary1_atoms(joint_uv);
  const double scale = 0.5 / std::sqrt(static_cast<double>(m));
  return minimize_over_tau(atoms, scale, [&](double tau) {
    return 0.5 * std::sqrt(std::exp2(tau) / static_cast<double>(m));
  });
}

TauOptimum theorem2_bound_min(const JointPmf& joint_wuv) {
  BoundAtoms atoms = theorem2_atoms(joint_wuv);
  return minimize_over_tau(atoms, 0.5,
                           [](double tau) { return 0.5 * std::exp2(tau / 2.0); });
}

namespace {

double gamma_hat_objective(double alpha, double rate, double i_breve) {
  return (alpha - 1.0) / alpha * (rate - i_breve);
}

double gamma_hathat_objective(double alpha, double rate, double i_breve) {
  return (alpha - 1.0) / (2.0 * alpha - 1.0) * (rate - i_breve);
}

double golden_max_1d(const std::function<double(double)>& f, double a, double b, int iters) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iters; ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

ExponentReport exponents(const JointPmf& joint_uv, double rate) {
  if (rate < 0.0) throw ParseError("exponents: rate must be nonnegative");
  ExponentReport report;
  report.rate = rate;
  report.i_uv = mutual_information(joint_uv);
  report.delta_i = (renyi_information(joint_uv, 1.001) - report.i_uv) / 0.001;

  for (double alpha : {1.001, 1.1, 1.25, 1.5, 1.75, 2.0})
    report.renyi_curve.push_back(RenyiSample{alpha, renyi_information(joint_uv, alpha),
                                             renyi_information_bar_unchecked(joint_uv, alpha)});

  auto i_breve = [&](double alpha) {
    return alpha <= 1.0 ? report.i_uv : renyi_information(joint_uv, alpha);
  };
  auto i_bar = [&](double alpha_prime) {
    return std::abs(alpha_prime - 1.0) < 1e-9
               ? report.i_uv
               : renyi_information_bar_unchecked(joint_uv, alpha_prime);
  };

  // gamma_hat: alpha in [1,2].
  {
    auto f = [&](double a) { return gamma_hat_objective(a, rate, i_breve(a)); };
    double best_a = 1.0, best = 0.0;
    for (int g = 0; g <= 256; ++g) {
      const double a = 1.0 + g / 256.0;
      const double v = f(a);
      if (v > best) {
        best = v;
        best_a = a;
      }
    }
    best_a = golden_max_1d(f, std::max(1.0, best_a - 1.0 / 256.0),
                           std::min(2.0, best_a + 1.0 / 256.0), 48);
    report.gamma_hat = std::max({0.0, f(best_a), best});
    report.gamma_hat_alpha = best_a;
  }

  // gamma_hathat: alpha >= 1 capped at 64 (log-spaced grid with plateau
  // detection via the flat tail of the objective).
  {
    auto f = [&](double a) { return gamma_hathat_objective(a, rate, i_breve(a)); };
    double best_a = 1.0, best = 0.0;
    for (int g = 0; g <= 384; ++g) {
      const double a = std::exp2(6.0 * g / 384.0);  // 1..64
      const double v = f(a);
      if (v > best) {
        best = v;
        best_a = a;
      }
    }
    best_a = golden_max_1d(f, std::max(1.0, best_a * 0.97), std::min(64.0, best_a * 1.03), 48);
    report.gamma_hathat = std::max({0.0, f(best_a), best});
    report.gamma_hathat_alpha = best_a;
  }

  // gamma: grid over alpha in [1,64], alpha' in [-8,2], plus the feasible
  // points that reproduce the two restricted exponents, then coordinate
  // refinement.
  {
    auto f = [&](double a, double ap) {
      const double ib = i_breve(a);
      return (a - 1.0) / (2.0 * a - ap) * (rate - ib + (ap - 1.0) * (ib - i_bar(ap)));
    };
    double best = 0.0, best_a = 1.0, best_ap = 1.0;
    auto consider = [&](double a, double ap) {
      if (a < 1.0 || a > 64.0 || ap > 2.0 || ap < -8.0) return;
      const double v = f(a, ap);
      if (v > best) {
        best = v;
        best_a = a;
        best_ap = ap;
      }
    };
    for (int ga = 0; ga <= 48; ++ga) {
      const double a = std::exp2(6.0 * ga / 48.0);
      for (int gp = 0; gp <= 40; ++gp) consider(a, -8.0 + 10.0 * gp / 40.0);
    }
    consider(report.gamma_hat_alpha, report.gamma_hat_alpha);
    consider(report.gamma_hathat_alpha, 1.0);
    for (int round = 0; round < 4; ++round) {
      const double a0 = best_a, ap0 = best_ap;
      const double a_ref = golden_max_1d([&](double a) { return f(a, ap0); },
                                         std::max(1.0, a0 * 0.8), std::min(64.0, a0 * 1.25), 40);
      consider(a_ref, ap0);
      const double ap_ref = golden_max_1d([&](double ap) { return f(best_a, ap); },
                                          std::max(-8.0, best_ap - 0.6),
                                          std::min(2.0, best_ap + 0.6), 40);
      consider(best_a, ap_ref);
    }
    report.gamma = best;
    report.gamma_alpha = best_a;
    report.gamma_alpha_prime = best_ap;
  }
  // The feasible set of gamma contains both restricted choices.
  report.gamma = std::max({report.gamma, report.gamma_hat, report.gamma_hathat});
  return report;
}

double lemma2_bound(const JointPmf& joint_uv, double rate, int n) {
  if (n < 0) throw ParseError("lemma2_bound: n must be nonnegative");
  const ExponentReport report = exponents(joint_uv, rate);
  return 1.5 * std::exp2(-report.gamma * static_cast<double>(n));
}

namespace {

std::size_t checked_codebook_size(int n, double rate) {
  const double raw = std::exp2(static_cast<double>(n) * rate);
  if (raw > 1e12) throw BudgetError("codebook size 2^{nR} too large");
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

}  // namespace

double source_encoder_sim(const Pmf& source_w, const Pmf& codebook_dist, const Channel& channel,
                          double rate, double r, int n, const TrialSpec& trials,
                          std::uint64_t seed, const std::optional<Channel>& codebook_cond) {
  if (r < 0.0) throw ParseError("source_encoder_sim: r must be nonnegative");
  const double rn_raw = r * n;
  const int rn = static_cast<int>(std::llround(rn_raw));
  if (std::abs(rn_raw - rn) > 1e-9)
    throw ParseError("source_encoder_sim: r*n must be an integer");
  if (codebook_cond) {
    if (rn != n)
      throw ParseError("source_encoder_sim: conditional codebook requires r = 1");
    if (codebook_cond->num_inputs() != source_w.size() ||
        codebook_cond->num_outputs() != codebook_dist.size())
      throw ParseError("source_encoder_sim: conditional codebook shape mismatch");
    // The conditional construction must induce the declared marginal on U.
    for (std::size_t u = 0; u < codebook_dist.size(); ++u) {
      double marg = 0.0;
      for (std::size_t w = 0; w < source_w.size(); ++w)
        marg += source_w[w] * codebook_cond->at(w, u);
      if (std::abs(marg - codebook_dist[u]) > 1e-9)
        throw ParseError("source_encoder_sim: conditional codebook marginal mismatch");
    }
  }
  const std::size_t m = checked_codebook_size(n, rate);
  const std::size_t nw = source_w.size();
  const std::size_t n_wseq = pow_size(nw, rn);
  const std::size_t nu = codebook_dist.size();
  const std::size_t nv = channel.num_outputs();
  const std::size_t vn = pow_size(nv, n);

  const Pmf target = JointPmf::from_input_and_channel(codebook_dist, channel).marginal(1);
  const std::vector<double> target_n = product_target(target, n);

  // Source sequence probabilities.
  std::vector<double> w_prob(n_wseq, 1.0);
  std::vector<std::size_t> wseq(static_cast<std::size_t>(std::max(rn, 1)));
  for (std::size_t wi = 0; wi < n_wseq; ++wi) {
    if (rn == 0) break;
    unflatten_seq(wi, nw, std::span<std::size_t>(wseq.data(), static_cast<std::size_t>(rn)));
    double p = 1.0;
    for (int t = 0; t < rn; ++t) p *= source_w[wseq[t]];
    w_prob[wi] = p;
  }

  const std::size_t slots = n_wseq * m * static_cast<std::size_t>(n);
  check_budget(saturating_mul(saturating_mul(slots, vn), std::uint64_t{2}),
               "source_encoder_sim");

  // For a codebook given as flat symbol assignments, the induced output and
  // its TV from the product target.
  std::vector<std::size_t> assign(slots, 0);
  std::vector<double> induced(vn);
  std::vector<std::size_t> vseq(static_cast<std::size_t>(n));
  auto tv_of_assign = [&]() {
    std::fill(induced.begin(), induced.end(), 0.0);
    for (std::size_t wi = 0; wi < n_wseq; ++wi) {
      if (w_prob[wi] <= 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t base = (wi * m + j) * n;
        const double w = w_prob[wi] / static_cast<double>(m);
        for (std::size_t vi = 0; vi < vn; ++vi) {
          unflatten_seq(vi, nv, vseq);
          double p = w;
          for (int t = 0; t < n; ++t) p *= channel.at(assign[base + t], vseq[t]);
          induced[vi] += p;
        }
      }
    }
    return half_l1(induced, target_n);
  };
  // Generation probability of symbol u in a given slot.
  auto slot_prob = [&](std::size_t slot, std::size_t u) {
    if (!codebook_cond) return codebook_dist[u];
    const std::size_t wi = slot / (m * n);
    const int t = static_cast<int>(slot % static_cast<std::size_t>(n));
    unflatten_seq(wi, nw, std::span<std::size_t>(wseq.data(), static_cast<std::size_t>(rn)));
    return codebook_cond->at(wseq[t], u);
  };

  if (trials.is_exhaustive) {
    const std::uint64_t count = saturating_pow(nu, slots);
    check_budget(saturating_mul(count, vn), "source_encoder_sim exhaustive");
    double mean = 0.0;
    std::vector<std::size_t> digits(slots, 0);
    for (std::uint64_t it = 0; it < count; ++it) {
      double w = 1.0;
      for (std::size_t s = 0; s < slots; ++s) {
        assign[s] = digits[s];
        w *= slot_prob(s, digits[s]);
      }
      if (w > 0.0) mean += w * tv_of_assign();
      for (std::size_t s = slots; s-- > 0;) {
        if (++digits[s] < nu) break;
        digits[s] = 0;
      }
    }
    return mean;
  }

  if (trials.trials <= 0) throw ParseError("source_encoder_sim: empty sample rejected");
  double sum = 0.0;
  for (int trial = 0; trial < trials.trials; ++trial) {
    Rng rng(seed, rng_stream::kCodebook, static_cast<std::uint64_t>(trial));
    for (std::size_t s = 0; s < slots; ++s) {
      if (!codebook_cond) {
        assign[s] = rng.sample(codebook_dist.probs());
      } else {
        const std::size_t wi = s / (m * n);
        const int t = static_cast<int>(s % static_cast<std::size_t>(n));
        unflatten_seq(wi, nw, std::span<std::size_t>(wseq.data(), static_cast<std::size_t>(rn)));
        assign[s] = rng.sample(codebook_cond->row(wseq[t]));
      }
    }
    sum += tv_of_assign();
  }
  return sum / trials.trials;
}

double superposition_sim(const Pmf& p_w, const Channel& p_u_given_w, const Channel& channel_v,
                         double rate1, double rate2, int n, int trials, std::uint64_t seed) {
  if (trials <= 0) throw ParseError("superposition_sim: trials must be positive");
  const std::size_t nw = p_w.size();
  const std::size_t nu = p_u_given_w.num_outputs();
  if (p_u_given_w.num_inputs() != nw)
    throw ParseError("superposition_sim: p_{U|W} input mismatch");
  if (channel_v.num_inputs() != nw * nu)
    throw ParseError("superposition_sim: channel input must be the (W,U) product alphabet");
  const std::size_t m1 = checked_codebook_size(n, rate1);
  const std::size_t m2 = checked_codebook_size(n, rate2);
  const std::size_t nv = channel_v.num_outputs();
  const std::size_t vn = pow_size(nv, n);
  check_budget(saturating_mul(saturating_mul(m1, m2),
                              saturating_mul(vn, static_cast<std::uint64_t>(n))),
               "superposition_sim");

  // Desired single-letter output.
  std::vector<double> target(nv, 0.0);
  for (std::size_t w = 0; w < nw; ++w)
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t v = 0; v < nv; ++v)
        target[v] += p_w[w] * p_u_given_w.at(w, u) * channel_v.at(w * nu + u, v);
  Pmf target_pmf(channel_v.output(), target);
  const std::vector<double> target_n = product_target(target_pmf, n);

  std::vector<double> induced(vn);
  std::vector<std::size_t> vseq(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(seed, rng_stream::kCodebook, static_cast<std::uint64_t>(trial));
    std::vector<std::vector<std::size_t>> w_words(m1, std::vector<std::size_t>(n));
    for (std::size_t j = 0; j < m1; ++j)
      for (int t = 0; t < n; ++t) w_words[j][t] = rng.sample(p_w.probs());
    std::vector<std::vector<std::size_t>> u_words(m1 * m2, std::vector<std::size_t>(n));
    for (std::size_t j = 0; j < m1; ++j)
      for (std::size_t k = 0; k < m2; ++k)
        for (int t = 0; t < n; ++t)
          u_words[j * m2 + k][t] = rng.sample(p_u_given_w.row(w_words[j][t]));
    std::fill(induced.begin(), induced.end(), 0.0);
    const double unit = 1.0 / static_cast<double>(m1 * m2);
    for (std::size_t j = 0; j < m1; ++j) {
      for (std::size_t k = 0; k < m2; ++k) {
        const auto& ww = w_words[j];
        const auto& uu = u_words[j * m2 + k];
        for (std::size_t vi = 0; vi < vn; ++vi) {
          unflatten_seq(vi, nv, vseq);
          double p = unit;
          for (int t = 0; t < n; ++t) p *= channel_v.at(ww[t] * nu + uu[t], vseq[t]);
          induced[vi] += p;
        }
      }
    }
    sum += half_l1(induced, target_n);
  }
  return sum / trials;
}

double local_synthesis_sim(const Channel& p_u_given_w, const Channel& channel_v, double rate,
                           std::span<const std::size_t> w_seq, int trials, std::uint64_t seed) {
  if (trials <= 0) throw ParseError("local_synthesis_sim: trials must be positive");
  const int n = static_cast<int>(w_seq.size());
  if (n == 0) throw ParseError("local_synthesis_sim: empty source sequence");
  const std::size_t nw = p_u_given_w.num_inputs();
  const std::size_t nu = p_u_given_w.num_outputs();
  if (channel_v.num_inputs() != nw * nu)
    throw ParseError("local_synthesis_sim: channel input must be the (W,U) product alphabet");
  for (std::size_t w : w_seq)
    if (w >= nw) throw ParseError("local_synthesis_sim: source symbol outside alphabet");
  const std::size_t m = checked_codebook_size(n, rate);
  const std::size_t nv = channel_v.num_outputs();
  const std::size_t vn = pow_size(nv, n);
  check_budget(saturating_mul(saturating_mul(m, vn), static_cast<std::uint64_t>(n)),
               "local_synthesis_sim");

  // Desired conditional law prod_t Phi(v | w_t).
  std::vector<double> target_n(vn, 1.0);
  std::vector<std::size_t> vseq(static_cast<std::size_t>(n));
  for (std::size_t vi = 0; vi < vn; ++vi) {
    unflatten_seq(vi, nv, vseq);
    double p = 1.0;
    for (int t = 0; t < n; ++t) {
      double pv = 0.0;
      for (std::size_t u = 0; u < nu; ++u)
        pv += p_u_given_w.at(w_seq[t], u) * channel_v.at(w_seq[t] * nu + u, vseq[t]);
      p *= pv;
    }
    target_n[vi] = p;
  }

  std::vector<double> induced(vn);
  double sum = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(seed, rng_stream::kCodebook, static_cast<std::uint64_t>(trial));
    std::fill(induced.begin(), induced.end(), 0.0);
    std::vector<std::size_t> word(static_cast<std::size_t>(n));
    for (std::size_t j = 0; j < m; ++j) {
      for (int t = 0; t < n; ++t) word[t] = rng.sample(p_u_given_w.row(w_seq[t]));
      for (std::size_t vi = 0; vi < vn; ++vi) {
        unflatten_seq(vi, nv, vseq);
        double p = 1.0 / static_cast<double>(m);
        for (int t = 0; t < n; ++t) p *= channel_v.at(w_seq[t] * nu + word[t], vseq[t]);
        induced[vi] += p;
      }
    }
    sum += half_l1(induced, target_n);
  }
  return sum / trials;
}

double local_synthesis_rate_threshold(const Channel& p_u_given_w, const Channel& channel_v,
                                      std::span<const std::size_t> w_seq) {
  const std::size_t nw = p_u_given_w.num_inputs();
  const std::size_t nu = p_u_given_w.num_outputs();
  const std::size_t nv = channel_v.num_outputs();
  std::vector<double> emp(nw, 0.0);
  for (std::size_t w : w_seq) emp[w] += 1.0 / static_cast<double>(w_seq.size());
  // Joint (U, V, W) with the conditioning coordinate last.
  std::vector<double> table(nu * nv * nw, 0.0);
  for (std::size_t w = 0; w < nw; ++w)
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t v = 0; v < nv; ++v)
        table[(u * nv + v) * nw + w] =
            emp[w] * p_u_given_w.at(w, u) * channel_v.at(w * nu + u, v);
  Alphabet wa = p_u_given_w.input();
  JointPmf joint({p_u_given_w.output(), channel_v.output(), wa}, std::move(table));
  return conditional_mutual_information(joint);
}

MeanResolvabilityResult mean_resolvability_search(const Pmf& codebook_dist,
                                                  const Channel& channel, const Pmf& target,
                                                  int n, std::size_t m, double entropy_budget) {
  if (codebook_dist.size() != channel.num_inputs())
    throw ParseError("mean_resolvability_search: codebook distribution/channel mismatch");
  const std::size_t nu = codebook_dist.size();
  const std::size_t un = pow_size(nu, n);
  if (un > 64 || m > 4)
    throw BudgetError("mean_resolvability_search: instance too large (|U|^n <= 64, M <= 4)");
  if (entropy_budget < 0.0)
    throw ParseError("mean_resolvability_search: entropy budget must be nonnegative");

  // Weight grid over the M-simplex in steps of 1/24, filtered by entropy.
  constexpr int kGrid = 24;
  std::vector<std::vector<double>> weight_grid;
  std::vector<int> comp(m, 0);
  std::function<void(std::size_t, int)> gen = [&](std::size_t pos, int left) {
    if (pos + 1 == m) {
      comp[pos] = left;
      std::vector<double> w(m);
      double h = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        w[i] = static_cast<double>(comp[i]) / kGrid;
        if (w[i] > 0.0) h -= w[i] * std::log2(w[i]);
      }
      if (h <= entropy_budget + 1e-12) weight_grid.push_back(std::move(w));
      return;
    }
    for (int c = 0; c <= left; ++c) {
      comp[pos] = c;
      gen(pos + 1, left - c);
    }
  };
  gen(0, kGrid);

  const std::uint64_t n_codebooks = saturating_pow(un, m);
  check_budget(saturating_mul(saturating_mul(n_codebooks, weight_grid.size()),
                              pow_size(channel.num_outputs(), n)),
               "mean_resolvability_search");

  const std::vector<double> target_n = product_target(target, n);
  SoftCodebook cb;
  cb.n = n;
  cb.u_alphabet = codebook_dist.atoms();
  cb.entries.assign(m, std::vector<std::size_t>(static_cast<std::size_t>(n), 0));

  MeanResolvabilityResult best;
  best.min_tv = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick(m, 0);
  for (std::uint64_t it = 0; it < n_codebooks; ++it) {
    for (std::size_t e = 0; e < m; ++e)
      unflatten_seq(pick[e], nu, cb.entries[e]);
    for (const auto& w : weight_grid) {
      Pmf induced = induced_output(cb, channel, w);
      const double tv = half_l1(induced.probs(), target_n);
      if (tv < best.min_tv) {
        best.min_tv = tv;
        best.codebook = cb.entries;
        best.weights = w;
      }
    }
    for (std::size_t e = m; e-- > 0;) {
      if (++pick[e] < un) break;
      pick[e] = 0;
    }
  }
  return best;
}

}  // namespace synthcap
