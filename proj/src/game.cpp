#include "synthcap/game.hpp"

#include <algorithm>
#include <cmath>

#include "synthcap/errors.hpp"
#include "synthcap/info.hpp"
#include "synthcap/rng.hpp"

namespace synthcap {

PayoffTable::PayoffTable(std::size_t nx, std::size_t ny, std::size_t nz,
                         std::vector<double> values)
    : nx_(nx), ny_(ny), nz_(nz), values_(std::move(values)) {
  if (nx_ == 0 || ny_ == 0 || nz_ == 0 || values_.size() != nx_ * ny_ * nz_)
    throw ParseError("PayoffTable: shape mismatch");
  if (nx_ > 4 || ny_ > 4 || nz_ > 4)
    throw BudgetError("PayoffTable: strategy sets above the 4x4x4 limit");
}

double worst_case_payoff(const PayoffTable& payoff, std::span<const double> joint) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t z = 0; z < payoff.nz(); ++z) {
    double e = 0.0;
    for (std::size_t x = 0; x < payoff.nx(); ++x)
      for (std::size_t y = 0; y < payoff.ny(); ++y)
        e += joint[x * payoff.ny() + y] * payoff.at(x, y, z);
    best = std::min(best, e);
  }
  return best;
}

namespace {

// Ascent on softmax logits of a joint (or marginal) pmf against the smoothed
// minimum; tau annealed toward the exact min_z objective.
std::vector<double> ascend_joint(const PayoffTable& payoff, int iters, Rng& rng,
                                 std::vector<double>* theta_io) {
  const std::size_t n = payoff.nx() * payoff.ny();
  std::vector<double> theta = theta_io ? *theta_io : std::vector<double>(n, 0.0);
  if (!theta_io)
    for (double& t : theta) t = rng.uniform(-1.0, 1.0);
  std::vector<double> p(n), g(n), ez(payoff.nz()), w(payoff.nz());
  const double lr = 0.1;
  for (int it = 0; it < iters; ++it) {
    const double tau = std::max(0.003, 0.3 * std::exp(-4.0 * it / iters));
    double mx = *std::max_element(theta.begin(), theta.end());
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) denom += std::exp(theta[i] - mx);
    for (std::size_t i = 0; i < n; ++i) p[i] = std::exp(theta[i] - mx) / denom;
    for (std::size_t z = 0; z < payoff.nz(); ++z) {
      ez[z] = 0.0;
      for (std::size_t x = 0; x < payoff.nx(); ++x)
        for (std::size_t y = 0; y < payoff.ny(); ++y)
          ez[z] += p[x * payoff.ny() + y] * payoff.at(x, y, z);
    }
    // Soft-min weights over z.
    double mn = *std::min_element(ez.begin(), ez.end());
    double wsum = 0.0;
    for (std::size_t z = 0; z < payoff.nz(); ++z) {
      w[z] = std::exp(-(ez[z] - mn) / tau);
      wsum += w[z];
    }
    for (double& v : w) v /= wsum;
    // Gradient of soft-min wrt p, then softmax backprop.
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t x = 0; x < payoff.nx(); ++x)
      for (std::size_t y = 0; y < payoff.ny(); ++y)
        for (std::size_t z = 0; z < payoff.nz(); ++z)
          g[x * payoff.ny() + y] += w[z] * payoff.at(x, y, z);
    double dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) dot += p[i] * g[i];
    for (std::size_t i = 0; i < n; ++i)
      theta[i] = std::clamp(theta[i] + lr * p[i] * (g[i] - dot), -30.0, 30.0);
  }
  double mx = *std::max_element(theta.begin(), theta.end());
  double denom = 0.0;
  for (std::size_t i = 0; i < n; ++i) denom += std::exp(theta[i] - mx);
  for (std::size_t i = 0; i < n; ++i) p[i] = std::exp(theta[i] - mx) / denom;
  if (theta_io) *theta_io = theta;
  return p;
}

JointPmf joint_from_table(const PayoffTable& payoff, const std::vector<double>& p) {
  Alphabet ax, ay;
  for (std::size_t x = 0; x < payoff.nx(); ++x) ax.push_back("x" + std::to_string(x));
  for (std::size_t y = 0; y < payoff.ny(); ++y) ay.push_back("y" + std::to_string(y));
  std::vector<double> t = p;
  double sum = 0.0;
  for (double& v : t) {
    v = std::max(v, 0.0);
    sum += v;
  }
  for (double& v : t) v /= sum;
  return JointPmf({ax, ay}, std::move(t));
}

double inner_common_information(const PayoffTable& payoff, const std::vector<double>& p,
                                int restarts, std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.restarts = restarts;
  cfg.max_iters = 1600;
  cfg.seed = seed;
  cfg.mu_grid = {0.0};
  return wyner_common_information(joint_from_table(payoff, p), cfg).bits;
}

}  // namespace

double best_product_payoff(const PayoffTable& payoff, int restarts, std::uint64_t seed) {
  // Alternating maximization over the two marginals with a grid refinement;
  // min_z is piecewise linear, so a moderately fine simplex grid plus local
  // polish settles the tiny instances this supports.
  double best = -std::numeric_limits<double>::infinity();
  const std::size_t nx = payoff.nx(), ny = payoff.ny();
  std::vector<double> joint(nx * ny);
  for (int rs = 0; rs < restarts; ++rs) {
    Rng rng(seed, rng_stream::kRestart, 1000 + rs);
    std::vector<double> px(nx), py(ny);
    double sx = 0.0, sy = 0.0;
    for (double& v : px) {
      v = -std::log(1.0 - rng.next_double());
      sx += v;
    }
    for (double& v : py) {
      v = -std::log(1.0 - rng.next_double());
      sy += v;
    }
    for (double& v : px) v /= sx;
    for (double& v : py) v /= sy;

    auto value = [&](const std::vector<double>& a, const std::vector<double>& b) {
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) joint[x * ny + y] = a[x] * b[y];
      return worst_case_payoff(payoff, joint);
    };

    // Coordinate polish: move mass between pairs of atoms of one marginal.
    double cur = value(px, py);
    for (int round = 0; round < 60; ++round) {
      bool improved = false;
      for (int side = 0; side < 2; ++side) {
        std::vector<double>& v = side == 0 ? px : py;
        for (std::size_t i = 0; i < v.size(); ++i) {
          for (std::size_t j = 0; j < v.size(); ++j) {
            if (i == j) continue;
            for (double step : {0.2, 0.05, 0.01, 0.002}) {
              if (v[j] < step) continue;
              v[i] += step;
              v[j] -= step;
              double cand = value(px, py);
              if (cand > cur + 1e-12) {
                cur = cand;
                improved = true;
              } else {
                v[i] -= step;
                v[j] += step;
              }
            }
          }
        }
      }
      if (!improved) break;
    }
    best = std::max(best, cur);
  }
  return best;
}

double maximin_joint_payoff(const PayoffTable& payoff, int restarts, std::uint64_t seed,
                            std::vector<double>* argmax) {
  double best = -std::numeric_limits<double>::infinity();
  for (int rs = 0; rs < restarts; ++rs) {
    Rng rng(seed, rng_stream::kRestart, 2000 + rs);
    std::vector<double> p = ascend_joint(payoff, 2500, rng, nullptr);
    double v = worst_case_payoff(payoff, p);
    if (v > best) {
      best = v;
      if (argmax) *argmax = p;
    }
  }
  return best;
}

std::vector<GamePoint> game_region(const PayoffTable& payoff, std::span<const double> r_grid,
                                   const GameConfig& cfg) {
  std::vector<double> p_star;
  const double v_star = maximin_joint_payoff(payoff, cfg.restarts, cfg.seed, &p_star);
  const double r_star = inner_common_information(payoff, p_star, cfg.inner_restarts, cfg.seed);
  const double v_prod = best_product_payoff(payoff, cfg.restarts, cfg.seed);

  // Verified achievable points.  Independent play costs zero rate; the
  // unconstrained optimum costs its common information.
  std::vector<GamePoint> pts{{0.0, v_prod}, {r_star, v_star}};

  // Intermediate budgets: shrink the optimum toward the best product
  // distribution until the (heuristically evaluated) common information fits
  // the budget.  Payoff is linear along the path, the rate is re-verified.
  std::vector<double> p_prod;
  {
    // Recover a concrete product maximizer for the path endpoint.
    const std::size_t nx = payoff.nx(), ny = payoff.ny();
    p_prod.assign(nx * ny, 1.0 / static_cast<double>(nx * ny));
    double bestv = worst_case_payoff(payoff, p_prod);
    Rng rng(cfg.seed, rng_stream::kRestart, 3000);
    for (int rs = 0; rs < 200; ++rs) {
      std::vector<double> px(nx), py(ny);
      double sx = 0.0, sy = 0.0;
      for (double& v : px) sx += (v = -std::log(1.0 - rng.next_double()));
      for (double& v : py) sy += (v = -std::log(1.0 - rng.next_double()));
      std::vector<double> cand(nx * ny);
      for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y) cand[x * ny + y] = (px[x] / sx) * (py[y] / sy);
      double v = worst_case_payoff(payoff, cand);
      if (v > bestv) {
        bestv = v;
        p_prod = cand;
      }
    }
  }
  for (double r : r_grid) {
    if (r <= 1e-9 || r >= r_star) continue;
    double lo = 0.0, hi = 1.0;  // mixing weight toward p_prod
    std::vector<double> mix(p_star.size());
    for (int it = 0; it < 12; ++it) {
      const double t = 0.5 * (lo + hi);
      for (std::size_t i = 0; i < mix.size(); ++i)
        mix[i] = (1.0 - t) * p_star[i] + t * p_prod[i];
      const double c = inner_common_information(payoff, mix, 2, cfg.seed + 1);
      (c <= r ? hi : lo) = t;
    }
    for (std::size_t i = 0; i < mix.size(); ++i)
      mix[i] = (1.0 - hi) * p_star[i] + hi * p_prod[i];
    const double c = inner_common_information(payoff, mix, cfg.inner_restarts, cfg.seed);
    if (c <= r + 1e-6) pts.push_back(GamePoint{r, worst_case_payoff(payoff, mix)});
  }

  // Upper concave envelope, flat beyond the largest rate.
  std::sort(pts.begin(), pts.end(), [](const GamePoint& a, const GamePoint& b) {
    if (a.rate != b.rate) return a.rate < b.rate;
    return a.payoff > b.payoff;
  });
  std::vector<GamePoint> hull;
  for (const auto& pt : pts) {
    if (!hull.empty() && pt.rate == hull.back().rate) continue;
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.rate - a.rate) * (pt.payoff - a.payoff) -
                           (pt.rate - a.rate) * (b.payoff - a.payoff);
      if (cross >= 0.0)
        hull.pop_back();
      else
        break;
    }
    // Payoff must be nondecreasing in rate; drop dominated tails.
    if (!hull.empty() && pt.payoff <= hull.back().payoff) continue;
    hull.push_back(pt);
  }

  auto envelope_at = [&](double r) {
    if (hull.empty()) return 0.0;
    if (r <= hull.front().rate) return hull.front().payoff;
    if (r >= hull.back().rate) return hull.back().payoff;
    for (std::size_t i = 1; i < hull.size(); ++i) {
      if (r <= hull[i].rate) {
        const double t = (r - hull[i - 1].rate) / (hull[i].rate - hull[i - 1].rate);
        return hull[i - 1].payoff + t * (hull[i].payoff - hull[i - 1].payoff);
      }
    }
    return hull.back().payoff;
  };

  std::vector<GamePoint> out;
  for (double r : r_grid) out.push_back(GamePoint{r, envelope_at(r)});
  return out;
}

}  // namespace synthcap
