#include "synthcap/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "synthcap/budget.hpp"
#include "synthcap/errors.hpp"
#include "synthcap/info.hpp"

namespace synthcap {

std::size_t codebook_size(int n, double rate) {
  const double raw = std::exp2(static_cast<double>(n) * rate);
  if (raw > 1e15) throw BudgetError("codebook_size: 2^{nR} too large");
  return static_cast<std::size_t>(std::ceil(raw - 1e-9));
}

SynthesisCode generate_code(const AuxDecomposition& aux, int n, double r, double r0,
                            std::uint64_t seed) {
  if (n <= 0) throw ParseError("generate_code: n must be positive");
  if (r < 0.0 || r0 < 0.0) throw ParseError("generate_code: rates must be nonnegative");
  if (aux.p_u.size() > 255) throw ParseError("generate_code: auxiliary alphabet too large");
  SynthesisCode code;
  code.n = n;
  code.rate_r = r;
  code.rate_r0 = r0;
  code.m = codebook_size(n, r);
  code.m0 = codebook_size(n, r0);
  code.aux = aux;
  check_budget(saturating_mul(saturating_mul(code.m, code.m0), static_cast<std::uint64_t>(n)),
               "generate_code");
  code.codewords.resize(code.m * code.m0);
  std::span<const double> pu(aux.p_u.probs());
  for (std::size_t k = 0; k < code.m0; ++k) {
    for (std::size_t j = 0; j < code.m; ++j) {
      Rng rng(seed, rng_stream::kCodebook, k * code.m + j);
      std::vector<std::uint8_t> word(static_cast<std::size_t>(n));
      for (int t = 0; t < n; ++t) word[t] = static_cast<std::uint8_t>(rng.sample(pu));
      code.codewords[k * code.m + j] = std::move(word);
    }
  }
  return code;
}

std::vector<double> encoder_posterior(const SynthesisCode& code,
                                      std::span<const std::size_t> x_seq, std::size_t k) {
  if (x_seq.size() != static_cast<std::size_t>(code.n))
    throw ParseError("encoder_posterior: sequence length mismatch");
  if (k >= code.m0) throw ParseError("encoder_posterior: k out of range");
  const Channel& pxgu = code.aux.p_x_given_u;
  for (std::size_t x : x_seq)
    if (x >= pxgu.num_outputs()) throw ParseError("encoder_posterior: symbol outside X alphabet");
  // Log-domain likelihoods with max subtraction; an all-zero sub-codebook
  // yields the uniform distribution.
  std::vector<double> logl(code.m);
  double mx = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < code.m; ++j) {
    std::span<const std::uint8_t> u = code.codeword(j, k);
    double acc = 0.0;
    for (std::size_t t = 0; t < x_seq.size(); ++t) {
      const double p = pxgu.at(u[t], x_seq[t]);
      if (p <= 0.0) {
        acc = -std::numeric_limits<double>::infinity();
        break;
      }
      acc += std::log(p);
    }
    logl[j] = acc;
    mx = std::max(mx, acc);
  }
  std::vector<double> post(code.m);
  if (mx == -std::numeric_limits<double>::infinity()) {
    std::fill(post.begin(), post.end(), 1.0 / static_cast<double>(code.m));
    return post;
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < code.m; ++j) {
    post[j] = logl[j] == -std::numeric_limits<double>::infinity() ? 0.0 : std::exp(logl[j] - mx);
    denom += post[j];
  }
  for (double& p : post) p /= denom;
  return post;
}

std::size_t likelihood_encode(const SynthesisCode& code, std::span<const std::size_t> x_seq,
                              std::size_t k, Rng& rng) {
  std::vector<double> post = encoder_posterior(code, x_seq, k);
  return rng.sample(post);
}

std::vector<std::size_t> decode_sample(const SynthesisCode& code, std::size_t j, std::size_t k,
                                       Rng& rng) {
  if (j >= code.m || k >= code.m0) throw ParseError("decode_sample: index out of range");
  const Channel& pygu = code.aux.p_y_given_u.at(0);
  std::span<const std::uint8_t> u = code.codeword(j, k);
  std::vector<std::size_t> y(u.size());
  for (std::size_t t = 0; t < u.size(); ++t) y[t] = rng.sample(pygu.row(u[t]));
  return y;
}

namespace {

// Pushes seq index arithmetic for |A|^n tables.
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

}  // namespace

JointPmf exact_induced_joint(const SynthesisCode& code, const Pmf& q_x) {
  const Channel& pygu = code.aux.p_y_given_u.at(0);
  const std::size_t nx = q_x.size();
  const std::size_t ny = pygu.num_outputs();
  const int n = code.n;
  const std::size_t xn = pow_size(nx, n);
  const std::size_t yn = pow_size(ny, n);
  check_budget(saturating_mul(saturating_mul(saturating_mul(xn, yn),
                                             saturating_mul(code.m, code.m0)),
                              static_cast<std::uint64_t>(n)),
               "exact_induced_joint");

  // Per-codeword output product tables, shared across x^n.
  std::vector<std::vector<double>> ytab(code.m * code.m0, std::vector<double>(yn, 1.0));
  std::vector<std::size_t> yseq(static_cast<std::size_t>(n));
  for (std::size_t jk = 0; jk < ytab.size(); ++jk) {
    const auto& word = code.codewords[jk];
    for (std::size_t yi = 0; yi < yn; ++yi) {
      unflatten_seq(yi, ny, yseq);
      double p = 1.0;
      for (int t = 0; t < n; ++t) p *= pygu.at(word[t], yseq[t]);
      ytab[jk][yi] = p;
    }
  }

  std::vector<double> table(xn * yn, 0.0);
  std::vector<std::size_t> xseq(static_cast<std::size_t>(n));
  const double inv_m0 = 1.0 / static_cast<double>(code.m0);
  for (std::size_t xi = 0; xi < xn; ++xi) {
    unflatten_seq(xi, nx, xseq);
    double qx = 1.0;
    for (int t = 0; t < n; ++t) qx *= q_x[xseq[t]];
    if (qx <= 0.0) continue;
    for (std::size_t k = 0; k < code.m0; ++k) {
      std::vector<double> post = encoder_posterior(code, xseq, k);
      for (std::size_t j = 0; j < code.m; ++j) {
        const double w = qx * inv_m0 * post[j];
        if (w <= 0.0) continue;
        const auto& row = ytab[k * code.m + j];
        double* out = table.data() + xi * yn;
        for (std::size_t yi = 0; yi < yn; ++yi) out[yi] += w * row[yi];
      }
    }
  }
  Alphabet xn_alpha = sequence_alphabet(q_x.atoms(), static_cast<std::size_t>(n));
  Alphabet yn_alpha = sequence_alphabet(pygu.output(), static_cast<std::size_t>(n));
  return JointPmf({std::move(xn_alpha), std::move(yn_alpha)}, std::move(table));
}

JointPmf desired_joint(const Pmf& q_x, const Channel& q_ygx, int n) {
  const std::size_t nx = q_x.size();
  const std::size_t ny = q_ygx.num_outputs();
  const std::size_t xn = pow_size(nx, n);
  const std::size_t yn = pow_size(ny, n);
  check_budget(saturating_mul(xn, yn), "desired_joint");
  std::vector<double> table(xn * yn);
  std::vector<std::size_t> xseq(static_cast<std::size_t>(n)), yseq(static_cast<std::size_t>(n));
  for (std::size_t xi = 0; xi < xn; ++xi) {
    unflatten_seq(xi, nx, xseq);
    double qx = 1.0;
    for (int t = 0; t < n; ++t) qx *= q_x[xseq[t]];
    for (std::size_t yi = 0; yi < yn; ++yi) {
      unflatten_seq(yi, ny, yseq);
      double p = qx;
      for (int t = 0; t < n; ++t) p *= q_ygx.at(xseq[t], yseq[t]);
      table[xi * yn + yi] = p;
    }
  }
  Alphabet xn_alpha = sequence_alphabet(q_x.atoms(), static_cast<std::size_t>(n));
  Alphabet yn_alpha = sequence_alphabet(q_ygx.output(), static_cast<std::size_t>(n));
  return JointPmf({std::move(xn_alpha), std::move(yn_alpha)}, std::move(table));
}

double synthesis_tv(const SynthesisCode& code, const Pmf& q_x, const Channel& q_ygx) {
  return total_variation(exact_induced_joint(code, q_x), desired_joint(q_x, q_ygx, code.n));
}

double key_independence_tv(const SynthesisCode& code, const Pmf& q_x) {
  const Channel& pxgu = code.aux.p_x_given_u;
  const std::size_t nx = q_x.size();
  const int n = code.n;
  const std::size_t xn = pow_size(nx, n);
  check_budget(saturating_mul(saturating_mul(xn, saturating_mul(code.m, code.m0)),
                              static_cast<std::uint64_t>(n)),
               "key_independence_tv");
  const double inv_m = 1.0 / static_cast<double>(code.m);
  const double inv_m0 = 1.0 / static_cast<double>(code.m0);
  std::vector<std::size_t> xseq(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (std::size_t xi = 0; xi < xn; ++xi) {
    unflatten_seq(xi, nx, xseq);
    double qx = 1.0;
    for (int t = 0; t < n; ++t) qx *= q_x[xseq[t]];
    for (std::size_t k = 0; k < code.m0; ++k) {
      double upsilon = 0.0;
      for (std::size_t j = 0; j < code.m; ++j) {
        std::span<const std::uint8_t> u = code.codeword(j, k);
        double lik = 1.0;
        for (int t = 0; t < n; ++t) lik *= pxgu.at(u[t], xseq[t]);
        upsilon += inv_m * lik;
      }
      sum += std::abs(inv_m0 * upsilon - inv_m0 * qx);
    }
  }
  return 0.5 * sum;
}

double monte_carlo_synthesis_tv(const SynthesisCode& code, const Pmf& q_x,
                                const Channel& q_ygx, int trials, std::uint64_t seed) {
  if (trials <= 0) throw ParseError("monte_carlo_synthesis_tv: trials must be positive");
  if (code.n > 4)
    throw BudgetError("monte_carlo_synthesis_tv: plug-in estimate accepted only for n <= 4");
  const std::size_t nx = q_x.size();
  const std::size_t ny = q_ygx.num_outputs();
  const std::size_t xn = pow_size(nx, code.n);
  const std::size_t yn = pow_size(ny, code.n);
  std::vector<double> counts(xn * yn, 0.0);
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(seed, rng_stream::kTrial, static_cast<std::uint64_t>(trial));
    std::vector<std::size_t> xseq(static_cast<std::size_t>(code.n));
    for (auto& x : xseq) x = rng.sample(q_x.probs());
    const std::size_t k = rng.next_index(code.m0);
    const std::size_t j = likelihood_encode(code, xseq, k, rng);
    std::vector<std::size_t> yseq = decode_sample(code, j, k, rng);
    std::size_t xi = 0, yi = 0;
    for (int t = 0; t < code.n; ++t) {
      xi = xi * nx + xseq[t];
      yi = yi * ny + yseq[t];
    }
    counts[xi * yn + yi] += 1.0 / trials;
  }
  JointPmf desired = desired_joint(q_x, q_ygx, code.n);
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) sum += std::abs(counts[i] - desired.at_flat(i));
  return 0.5 * sum;
}

std::vector<DecayRow> tv_decay_experiment(const AuxDecomposition& aux, const Pmf& q_x,
                                          const Channel& q_ygx, const RatePoint& rates,
                                          std::span<const int> n_list,
                                          std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw ParseError("tv_decay_experiment: at least one seed required");
  std::vector<DecayRow> rows;
  for (int n : n_list) {
    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t seed : seeds) {
      SynthesisCode code = generate_code(aux, n, rates.r, rates.r0, seed);
      const double tv = synthesis_tv(code, q_x, q_ygx);
      sum += tv;
      sum2 += tv * tv;
    }
    const double cnt = static_cast<double>(seeds.size());
    const double mean = sum / cnt;
    const double var = std::max(0.0, sum2 / cnt - mean * mean);
    rows.push_back(DecayRow{n, mean, std::sqrt(var), static_cast<int>(seeds.size())});
  }
  return rows;
}

DetectorErrors detector_demo(const SynthesisCode& code, const Pmf& q_x, const Channel& q_ygx,
                             const Detector& detector, int trials, std::uint64_t seed) {
  if (trials <= 0) throw ParseError("detector_demo: trials must be positive");
  DetectorErrors errs;
  errs.trials = trials;
  int false_pos = 0, false_neg = 0;
  for (int trial = 0; trial < trials; ++trial) {
    // Genuine channel: x iid from q_X, y per-letter from q_{Y|X}.
    Rng rng_g(seed, rng_stream::kDetector, 2 * static_cast<std::uint64_t>(trial));
    std::vector<std::size_t> xg(static_cast<std::size_t>(code.n)), yg(code.n);
    for (int t = 0; t < code.n; ++t) {
      xg[t] = rng_g.sample(q_x.probs());
      yg[t] = rng_g.sample(q_ygx.row(xg[t]));
    }
    if (detector(xg, yg)) ++false_pos;
    // Synthetic pipeline.
    Rng rng_s(seed, rng_stream::kDetector, 2 * static_cast<std::uint64_t>(trial) + 1);
    std::vector<std::size_t> xs(static_cast<std::size_t>(code.n));
    for (auto& x : xs) x = rng_s.sample(q_x.probs());
    const std::size_t k = rng_s.next_index(code.m0);
    const std::size_t j = likelihood_encode(code, xs, k, rng_s);
    std::vector<std::size_t> ys = decode_sample(code, j, k, rng_s);
    if (!detector(xs, ys)) ++false_neg;
  }
  errs.alpha = static_cast<double>(false_pos) / trials;
  errs.beta = static_cast<double>(false_neg) / trials;
  return errs;
}

}  // namespace synthcap
