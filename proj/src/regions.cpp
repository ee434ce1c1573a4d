#include "synthcap/regions.hpp"
#include <cstdio>
#include <cstdlib>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "scalarized_internal.hpp"
#include "synthcap/budget.hpp"
#include "synthcap/errors.hpp"
#include "synthcap/info.hpp"
#include "synthcap/rng.hpp"

namespace synthcap {

namespace {

Alphabet make_u_alphabet(std::size_t n) {
  Alphabet a;
  a.reserve(n);
  for (std::size_t i = 0; i < n; ++i) a.push_back("u" + std::to_string(i));
  return a;
}

std::vector<double> normalized(std::vector<double> v) {
  double sum = 0.0;
  for (double& x : v) {
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  if (sum <= 0.0) {
    std::fill(v.begin(), v.end(), 1.0 / static_cast<double>(v.size()));
    return v;
  }
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace

JointPmf AuxDecomposition::reconstruct() const {
  JointPmf full = full_joint();
  std::vector<std::size_t> coords(full.rank() - 1);
  for (std::size_t c = 0; c + 1 < full.rank(); ++c) coords[c] = c;
  return full.marginal_joint(coords);
}

JointPmf AuxDecomposition::full_joint() const {
  std::vector<Alphabet> axes;
  axes.push_back(p_x_given_u.output());
  for (const auto& ch : p_y_given_u) axes.push_back(ch.output());
  axes.push_back(p_u.atoms());
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.size();
  std::vector<double> table(total, 0.0);
  const std::size_t ncoords = axes.size();
  std::vector<std::size_t> idx(ncoords);
  std::vector<std::size_t> sizes(ncoords);
  for (std::size_t c = 0; c < ncoords; ++c) sizes[c] = axes[c].size();
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    for (std::size_t c = ncoords; c-- > 0;) {
      idx[c] = rem % sizes[c];
      rem /= sizes[c];
    }
    const std::size_t u = idx[ncoords - 1];
    double p = p_u[u] * p_x_given_u.at(u, idx[0]);
    for (std::size_t r = 0; r < p_y_given_u.size(); ++r)
      p *= p_y_given_u[r].at(u, idx[1 + r]);
    table[i] = p;
  }
  return JointPmf(std::move(axes), std::move(table));
}

double AuxDecomposition::i_x_u() const {
  JointPmf full = full_joint();
  const std::size_t ga[] = {0};
  const std::size_t gb[] = {full.rank() - 1};
  return mutual_information(full.merge_axes(ga, gb));
}

double AuxDecomposition::i_xy_u() const {
  JointPmf full = full_joint();
  std::vector<std::size_t> ga(full.rank() - 1);
  for (std::size_t c = 0; c + 1 < full.rank(); ++c) ga[c] = c;
  const std::size_t gb[] = {full.rank() - 1};
  return mutual_information(full.merge_axes(ga, gb));
}

double AuxDecomposition::h_y_given_u() const {
  JointPmf full = full_joint();
  std::vector<std::size_t> ga;
  for (std::size_t c = 1; c + 1 < full.rank(); ++c) ga.push_back(c);
  const std::size_t gb[] = {full.rank() - 1};
  return conditional_entropy(full.merge_axes(ga, gb));
}

AuxDecomposition aux_from_u_equals_y(const Pmf& q_x, const Channel& q_ygx) {
  JointPmf joint = JointPmf::from_input_and_channel(q_x, q_ygx);
  Pmf p_y = joint.marginal(1);
  const std::size_t nx = q_x.size(), ny = p_y.size();
  // p(x|y) rows; zero-mass y rows fall back to the input marginal.
  std::vector<std::vector<double>> x_rows(ny, std::vector<double>(nx, 0.0));
  for (std::size_t y = 0; y < ny; ++y) {
    if (p_y[y] > 0.0) {
      for (std::size_t x = 0; x < nx; ++x)
        x_rows[y][x] = joint.at_flat(x * ny + y) / p_y[y];
      x_rows[y] = normalized(std::move(x_rows[y]));
    } else {
      x_rows[y] = q_x.probs();
    }
  }
  std::vector<std::vector<double>> y_rows(ny, std::vector<double>(ny, 0.0));
  for (std::size_t y = 0; y < ny; ++y) y_rows[y][y] = 1.0;
  return AuxDecomposition{p_y, Channel(p_y.atoms(), q_x.atoms(), std::move(x_rows)),
                          {Channel(p_y.atoms(), p_y.atoms(), std::move(y_rows))}};
}

// ---------------------------------------------------------------------------
// Scalarized optimizer over p(U | X, Y_1..Y_m).
//
// The feasible set is parameterized by the conditional p(u|z) (z ranging over
// the target's support), which matches the target marginal automatically.
// Conditional independence of the coordinates given U is driven in by an
// escalating quadratic penalty on
//     e(z,u) = p(z,u) p(u)^{K} - prod_c p(z_c,u),   K = #coords - 1,
// which vanishes exactly when each conditional p(z|u) factorizes.
// ---------------------------------------------------------------------------

namespace detail {

OptProblem make_problem(const JointPmf& target, double mu) {
  OptProblem prob;
  prob.q = target.table();
  prob.ncoords = target.rank();
  prob.nz = target.size();
  prob.nu = prob.nz + 1;  // cardinality bound |U| = |Z| + 1, used in full
  prob.mu = mu;
  prob.sizes.resize(prob.ncoords);
  for (std::size_t c = 0; c < prob.ncoords; ++c) prob.sizes[c] = target.axis(c).size();
  prob.coord_of.assign(prob.ncoords, std::vector<std::size_t>(prob.nz));
  std::vector<std::size_t> idx(prob.ncoords);
  for (std::size_t z = 0; z < prob.nz; ++z) {
    target.unflatten(z, idx);
    for (std::size_t c = 0; c < prob.ncoords; ++c) prob.coord_of[c][z] = idx[c];
  }
  prob.qx = target.marginal(0).probs();
  return prob;
}

// Fills scratch marginals from theta; theta layout matches c: [u*nz + z].
void forward(const OptProblem& pr, std::span<const double> theta, OptScratch& s) {
  const std::size_t nz = pr.nz, nu = pr.nu;
  s.c.resize(nu * nz);
  s.p.resize(nu * nz);
  s.pu.assign(nu, 0.0);
  s.pm.resize(pr.ncoords);
  for (std::size_t c = 0; c < pr.ncoords; ++c) s.pm[c].assign(pr.sizes[c] * nu, 0.0);
  for (std::size_t z = 0; z < nz; ++z) {
    double mx = -1e300;
    for (std::size_t u = 0; u < nu; ++u) mx = std::max(mx, theta[u * nz + z]);
    double denom = 0.0;
    for (std::size_t u = 0; u < nu; ++u) denom += std::exp(theta[u * nz + z] - mx);
    for (std::size_t u = 0; u < nu; ++u) {
      double cu = std::exp(theta[u * nz + z] - mx) / denom;
      s.c[u * nz + z] = cu;
      double pz = pr.q[z] * cu;
      s.p[u * nz + z] = pz;
      s.pu[u] += pz;
      for (std::size_t c = 0; c < pr.ncoords; ++c)
        s.pm[c][pr.coord_of[c][z] * nu + u] += pz;
    }
  }
}

// Objective (nats) = I(Z;U) + mu I(X;U) + lambda * sum e^2, with gradient in
// s.g when grad is true.
double objective(const OptProblem& pr, double lambda, bool grad, OptScratch& s) {
  const std::size_t nz = pr.nz, nu = pr.nu;
  const std::size_t K = pr.ncoords - 1;
  double i_all = 0.0, i_x = 0.0, pen = 0.0;
  if (grad) s.g.assign(nu * nz, 0.0);
  s.e.resize(nu * nz);
  s.bprod.resize(nu * nz);

  for (std::size_t u = 0; u < nu; ++u) {
    const double pu = s.pu[u];
    const double log_pu = pu > 0 ? std::log(pu) : 0.0;
    const double puK = std::pow(pu, static_cast<double>(K));
    const double puKm1 = K > 0 ? std::pow(pu, static_cast<double>(K - 1)) : 0.0;
    double S0 = 0.0;
    for (std::size_t z = 0; z < nz; ++z) {
      const std::size_t i = u * nz + z;
      const double pz = s.p[i];
      double bp = 1.0;
      for (std::size_t c = 0; c < pr.ncoords; ++c) bp *= s.pm[c][pr.coord_of[c][z] * nu + u];
      s.bprod[i] = bp;
      const double e = pz * puK - bp;
      s.e[i] = e;
      pen += e * e;
      S0 += e * pz;
      if (pz > 0.0) {
        const double log_c = std::log(s.c[i]);
        i_all += pz * (log_c - log_pu);
        const double pxu = s.pm[0][pr.coord_of[0][z] * nu + u];
        if (grad) s.g[i] += (log_c - log_pu) + pr.mu * (std::log(pxu) - log_pu);
      }
    }
    // I(X;U) value term and penalty gradient pieces.
    for (std::size_t x = 0; x < pr.sizes[0]; ++x) {
      const double pxu = s.pm[0][x * nu + u];
      if (pxu > 0.0 && pu > 0.0 && pr.qx[x] > 0.0)
        i_x += pxu * std::log(pxu / (pr.qx[x] * pu));
    }
    if (grad && lambda > 0.0) {
      // Penalty gradient via per-coordinate sums
      //   T_c(s) = sum_{z: z_c = s} e(z,u) * prod_{c' != c} pm[c'].
      thread_local std::vector<std::vector<double>> tc;
      tc.resize(pr.ncoords);
      for (std::size_t c = 0; c < pr.ncoords; ++c) tc[c].assign(pr.sizes[c], 0.0);
      for (std::size_t z = 0; z < nz; ++z) {
        const std::size_t i = u * nz + z;
        const double e = s.e[i];
        if (e == 0.0) continue;
        for (std::size_t c = 0; c < pr.ncoords; ++c) {
          double partial = 1.0;
          for (std::size_t c2 = 0; c2 < pr.ncoords; ++c2) {
            if (c2 == c) continue;
            partial *= s.pm[c2][pr.coord_of[c2][z] * nu + u];
          }
          tc[c][pr.coord_of[c][z]] += e * partial;
        }
      }
      for (std::size_t z = 0; z < nz; ++z) {
        const std::size_t i = u * nz + z;
        double t_all = 0.0;
        for (std::size_t c = 0; c < pr.ncoords; ++c) t_all += tc[c][pr.coord_of[c][z]];
        s.g[i] += lambda * 2.0 *
                  (s.e[i] * puK + static_cast<double>(K) * puKm1 * S0 - t_all);
      }
    }
  }
  // Scale gradient by q(z) (common factor of every term above) and attribute.
  if (grad) {
    for (std::size_t z = 0; z < nz; ++z)
      for (std::size_t u = 0; u < nu; ++u) s.g[u * nz + z] *= pr.q[z];
  }
  return i_all + pr.mu * i_x + lambda * pen;
}

// Gradient in theta space from the gradient in c space (softmax backprop).
void backprop_softmax(const OptProblem& pr, const OptScratch& s, std::vector<double>& gtheta) {
  const std::size_t nz = pr.nz, nu = pr.nu;
  gtheta.assign(nu * nz, 0.0);
  for (std::size_t z = 0; z < nz; ++z) {
    double dot = 0.0;
    for (std::size_t u = 0; u < nu; ++u) dot += s.c[u * nz + z] * s.g[u * nz + z];
    for (std::size_t u = 0; u < nu; ++u) {
      const std::size_t i = u * nz + z;
      gtheta[i] = s.c[i] * (s.g[i] - dot);
    }
  }
}

FactorLayout make_factor_layout(const OptProblem& pr) {
  FactorLayout layout;
  layout.nu = pr.nu;
  layout.sizes = pr.sizes;
  layout.total = pr.nu;
  for (std::size_t c = 0; c < pr.ncoords; ++c) layout.total += pr.nu * pr.sizes[c];
  return layout;
}

namespace {
void softmax_span(std::span<const double> logits, std::span<double> probs) {
  double mx = -1e300;
  for (double l : logits) mx = std::max(mx, l);
  double denom = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i)
    denom += (probs[i] = std::exp(logits[i] - mx));
  for (double& p : probs) p /= denom;
}
}  // namespace

void factor_forward(const OptProblem& pr, const FactorLayout& layout,
                    std::span<const double> theta, FactorScratch& s) {
  const std::size_t nu = pr.nu, nz = pr.nz, nc = pr.ncoords;
  s.pu.resize(nu);
  softmax_span(theta.subspan(layout.u_offset(), nu), s.pu);
  s.cond.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    s.cond[c].resize(nu * pr.sizes[c]);
    for (std::size_t u = 0; u < nu; ++u)
      softmax_span(theta.subspan(layout.row_offset(c, u), pr.sizes[c]),
                   std::span<double>(s.cond[c].data() + u * pr.sizes[c], pr.sizes[c]));
  }
  s.w.assign(nz * nu, 0.0);
  s.recon.assign(nz, 0.0);
  s.recon_x.assign(pr.sizes[0], 0.0);
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t u = 0; u < nu; ++u) {
      double w = s.pu[u];
      for (std::size_t c = 0; c < nc; ++c)
        w *= s.cond[c][u * pr.sizes[c] + pr.coord_of[c][z]];
      s.w[z * nu + u] = w;
      s.recon[z] += w;
    }
  }
  for (std::size_t z = 0; z < nz; ++z) s.recon_x[pr.coord_of[0][z]] += s.recon[z];
}

double factor_objective(const OptProblem& pr, const FactorLayout& layout,
                        std::span<const double> theta, double kappa, bool grad,
                        FactorScratch& s, std::vector<double>* gtheta, double r_cap,
                        double sigma, double info_weight) {
  factor_forward(pr, layout, theta, s);
  const std::size_t nu = pr.nu, nz = pr.nz, nc = pr.ncoords;
  const std::size_t nx = pr.sizes[0];

  double i_all = 0.0, i_x = 0.0, r_err = 0.0;
  // I(Z;U) and the reconstruction error.
  for (std::size_t z = 0; z < nz; ++z) {
    const double d = s.recon[z] - pr.q[z];
    r_err += d * d;
    const double log_recon = std::log(std::max(s.recon[z], 1e-300));
    for (std::size_t u = 0; u < nu; ++u) {
      const double w = s.w[z * nu + u];
      if (w > 0.0) i_all += w * (std::log(w) - std::log(s.pu[u]) - log_recon);
    }
  }
  // I(X;U) on the coordinate-0 marginal W_x(x,u) = pu(u) cond_0(x|u).
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t x = 0; x < nx; ++x) {
      const double cv = s.cond[0][u * nx + x];
      if (cv > 0.0 && s.pu[u] > 0.0)
        i_x += s.pu[u] * cv * (std::log(cv) - std::log(std::max(s.recon_x[x], 1e-300)));
    }
  }
  const double cap_excess = sigma > 0.0 ? std::max(0.0, i_x - r_cap) : 0.0;
  const double value = info_weight * (i_all + pr.mu * i_x) + kappa * r_err +
                       sigma * cap_excess * cap_excess;
  // The rate cap acts through the same I(X;U) gradient path with an
  // activation-dependent weight.
  const double mu_eff = info_weight * pr.mu + 2.0 * sigma * cap_excess;
  if (!grad) return value;

  // Value-space gradients.
  std::vector<double> g_pu(nu, 0.0);
  std::vector<std::vector<double>> g_cond(nc);
  for (std::size_t c = 0; c < nc; ++c) g_cond[c].assign(nu * pr.sizes[c], 0.0);
  for (std::size_t z = 0; z < nz; ++z) {
    const double log_recon = std::log(std::max(s.recon[z], 1e-300));
    const double d2 = 2.0 * (s.recon[z] - pr.q[z]);
    for (std::size_t u = 0; u < nu; ++u) {
      const double w = s.w[z * nu + u];
      if (w <= 0.0) continue;
      // i*(z,u) for I(Z;U) plus the reconstruction term share the same
      // product structure.
      const double istar = std::log(w) - std::log(s.pu[u]) - log_recon;
      const double common = info_weight * istar + kappa * d2;
      g_pu[u] += (w / s.pu[u]) * common;
      for (std::size_t c = 0; c < nc; ++c) {
        const double cv = s.cond[c][u * pr.sizes[c] + pr.coord_of[c][z]];
        if (cv > 0.0) g_cond[c][u * pr.sizes[c] + pr.coord_of[c][z]] += (w / cv) * common;
      }
    }
  }
  if (mu_eff != 0.0) {
    for (std::size_t u = 0; u < nu; ++u) {
      for (std::size_t x = 0; x < nx; ++x) {
        const double cv = s.cond[0][u * nx + x];
        if (cv <= 0.0) continue;
        const double ixstar = std::log(cv) - std::log(std::max(s.recon_x[x], 1e-300));
        g_pu[u] += mu_eff * cv * ixstar;
        g_cond[0][u * nx + x] += mu_eff * s.pu[u] * ixstar;
      }
    }
  }
  // Softmax backprop row by row.
  gtheta->assign(layout.total, 0.0);
  auto backprop_row = [&](std::span<const double> probs, std::span<const double> grads,
                          std::size_t offset) {
    double dot = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) dot += probs[i] * grads[i];
    for (std::size_t i = 0; i < probs.size(); ++i)
      (*gtheta)[offset + i] = probs[i] * (grads[i] - dot);
  };
  backprop_row(s.pu, g_pu, layout.u_offset());
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t u = 0; u < nu; ++u)
      backprop_row(std::span<const double>(s.cond[c].data() + u * pr.sizes[c], pr.sizes[c]),
                   std::span<const double>(g_cond[c].data() + u * pr.sizes[c], pr.sizes[c]),
                   layout.row_offset(c, u));
  return value;
}

double lbfgs_minimize(std::vector<double>& x, int max_iters, double tol,
                      const std::function<double(const std::vector<double>&,
                                                 std::vector<double>*)>& fg) {
  const std::size_t n = x.size();
  constexpr std::size_t kHistory = 8;
  std::vector<std::vector<double>> s_hist, y_hist;
  std::vector<double> rho_hist;
  std::vector<double> grad(n), grad_new(n), direction(n), x_new(n), alpha(kHistory);
  double f = fg(x, &grad);
  int small_improves = 0;
  for (int it = 0; it < max_iters; ++it) {
    // Two-loop recursion.
    direction = grad;
    const std::size_t h = s_hist.size();
    for (std::size_t i = h; i-- > 0;) {
      double a = 0.0;
      for (std::size_t j = 0; j < n; ++j) a += s_hist[i][j] * direction[j];
      a *= rho_hist[i];
      alpha[i] = a;
      for (std::size_t j = 0; j < n; ++j) direction[j] -= a * y_hist[i][j];
    }
    if (h > 0) {
      double yy = 0.0, sy = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        yy += y_hist[h - 1][j] * y_hist[h - 1][j];
        sy += s_hist[h - 1][j] * y_hist[h - 1][j];
      }
      const double scale = yy > 0.0 ? sy / yy : 1.0;
      for (double& d : direction) d *= scale;
    }
    for (std::size_t i = 0; i < h; ++i) {
      double b = 0.0;
      for (std::size_t j = 0; j < n; ++j) b += y_hist[i][j] * direction[j];
      b *= rho_hist[i];
      for (std::size_t j = 0; j < n; ++j) direction[j] += s_hist[i][j] * (alpha[i] - b);
    }
    double descent = 0.0;
    for (std::size_t j = 0; j < n; ++j) descent += grad[j] * direction[j];
    if (descent <= 0.0) {
      // Not a descent direction: reset to steepest descent.
      direction = grad;
      descent = 0.0;
      for (std::size_t j = 0; j < n; ++j) descent += grad[j] * grad[j];
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      if (descent <= 1e-30) return f;
    }
    // Armijo backtracking along -direction.
    double step = 1.0;
    double f_new = f;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      for (std::size_t j = 0; j < n; ++j)
        x_new[j] = std::clamp(x[j] - step * direction[j], -60.0, 60.0);
      f_new = fg(x_new, &grad_new);
      if (f_new <= f - 1e-4 * step * descent) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (s_hist.empty()) return f;
      // Retry from steepest descent with fresh curvature history.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      continue;
    }
    // Curvature update.
    std::vector<double> s_vec(n), y_vec(n);
    double sy = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s_vec[j] = x_new[j] - x[j];
      y_vec[j] = grad_new[j] - grad[j];
      sy += s_vec[j] * y_vec[j];
    }
    const double improve = f - f_new;
    x.swap(x_new);
    grad.swap(grad_new);
    f = f_new;
    if (sy > 1e-12) {
      if (s_hist.size() == kHistory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
      s_hist.push_back(std::move(s_vec));
      y_hist.push_back(std::move(y_vec));
      rho_hist.push_back(1.0 / sy);
    }
    small_improves = improve < tol * std::max(1.0, std::abs(f)) ? small_improves + 1 : 0;
    if (small_improves >= 3) return f;
  }
  return f;
}

}  // namespace detail

namespace {

using detail::FactorLayout;
using detail::FactorScratch;
using detail::OptProblem;
using detail::factor_forward;
using detail::factor_objective;
using detail::make_factor_layout;
using detail::make_problem;

struct RestartResult {
  bool accepted = false;
  double objective = 0.0;  // scalarized value, penalty excluded
  FrontierPoint point;
};

// Factor-layout logits of a witness, padded with low-mass uniform rows up to
// nu auxiliary symbols.  The floor keeps dead coordinates shallow enough for
// gradient descent to revive them.
std::vector<double> theta_from_witness(const OptProblem& pr, const FactorLayout& layout,
                                       const AuxDecomposition& aux) {
  static constexpr double kFloor = -12.0;
  const std::size_t nu_w = aux.p_u.size();
  std::vector<double> theta(layout.total, 0.0);
  auto logit = [](double v) {
    return v > 1e-300 ? std::max(std::log(v), kFloor) : kFloor;
  };
  for (std::size_t u = 0; u < layout.nu; ++u)
    theta[layout.u_offset() + u] = u < nu_w ? logit(aux.p_u[u]) : kFloor;
  for (std::size_t c = 0; c < pr.ncoords; ++c) {
    for (std::size_t u = 0; u < layout.nu; ++u) {
      for (std::size_t sym = 0; sym < pr.sizes[c]; ++sym) {
        double v = 1.0 / static_cast<double>(pr.sizes[c]);
        if (u < nu_w)
          v = c == 0 ? aux.p_x_given_u.at(u, sym) : aux.p_y_given_u[c - 1].at(u, sym);
        theta[layout.row_offset(c, u) + sym] = logit(v);
      }
    }
  }
  return theta;
}

// Feasibility polish: descend the squared reconstruction error over the
// decomposition's own softmax parameters.  The factorized structure stays
// exact by construction; only the mismatch with the target moves.
void polish_reconstruction(const OptProblem& pr, std::vector<double>& pu,
                           std::vector<std::vector<std::vector<double>>>& rows) {
  const FactorLayout layout = make_factor_layout(pr);
  std::vector<double> theta(layout.total);
  auto logit = [](double v) {
    return v > 1e-300 ? std::max(std::log(v), -40.0) : -40.0;
  };
  for (std::size_t u = 0; u < pr.nu; ++u) theta[layout.u_offset() + u] = logit(pu[u]);
  for (std::size_t c = 0; c < pr.ncoords; ++c)
    for (std::size_t u = 0; u < pr.nu; ++u)
      for (std::size_t sym = 0; sym < pr.sizes[c]; ++sym)
        theta[layout.row_offset(c, u) + sym] = logit(rows[c][u][sym]);

  FactorScratch s;
  detail::lbfgs_minimize(theta, 1500, 1e-22,
                         [&](const std::vector<double>& th, std::vector<double>* grad) {
                           return factor_objective(pr, layout, th, 1.0, true, s, grad, 0.0,
                                                   0.0, /*info_weight=*/0.0);
                         });
  factor_forward(pr, layout, theta, s);
  pu = s.pu;
  for (std::size_t c = 0; c < pr.ncoords; ++c)
    for (std::size_t u = 0; u < pr.nu; ++u)
      for (std::size_t sym = 0; sym < pr.sizes[c]; ++sym)
        rows[c][u][sym] = s.cond[c][u * pr.sizes[c] + sym];
}

// Witness from factor-space probabilities: reconstruction-polish, then the
// feasibility gate.
std::optional<AuxDecomposition> extract_witness(const OptProblem& pr, const JointPmf& target,
                                                const FactorScratch& s, double feas_tol) {
  const std::size_t nu = pr.nu;
  std::vector<double> pu = normalized(s.pu);
  std::vector<std::vector<std::vector<double>>> rows(pr.ncoords);
  for (std::size_t c = 0; c < pr.ncoords; ++c) {
    rows[c].resize(nu);
    for (std::size_t u = 0; u < nu; ++u)
      rows[c][u] = normalized(std::vector<double>(
          s.cond[c].begin() + u * pr.sizes[c], s.cond[c].begin() + (u + 1) * pr.sizes[c]));
  }
  polish_reconstruction(pr, pu, rows);

  Alphabet u_alpha = make_u_alphabet(nu);
  std::vector<Channel> conds;
  for (std::size_t c = 0; c < pr.ncoords; ++c)
    conds.emplace_back(u_alpha, target.axis(c), rows[c]);
  AuxDecomposition aux{Pmf(u_alpha, normalized(std::move(pu))), conds[0],
                       std::vector<Channel>(conds.begin() + 1, conds.end())};
  JointPmf recon = aux.reconstruct();
  const double recon_tv = total_variation(recon, target);
  if (recon_tv > feas_tol) {
    if (std::getenv("SYNTHCAP_DEBUG_FRONTIER") != nullptr)
      std::fprintf(stderr, "  witness rejected: recon_tv=%.3e\n", recon_tv);
    return std::nullopt;
  }
  return aux;
}

// Deterministic structured seeds in the factor layout.
std::vector<double> factor_seed(const OptProblem& pr, const FactorLayout& layout, int kind) {
  const std::size_t nz = pr.nz;
  const std::size_t ny_block = nz / pr.sizes[0];
  std::vector<double> pu(layout.nu, 0.0);
  std::vector<std::vector<std::vector<double>>> rows(pr.ncoords);
  for (std::size_t c = 0; c < pr.ncoords; ++c)
    rows[c].assign(layout.nu, std::vector<double>(pr.sizes[c], 0.0));
  auto block_of = [&](std::size_t z) {
    if (kind == 0) return z % ny_block;  // U = (Y_1..Y_m)
    if (kind == 1) return z / ny_block;  // U = X
    return z;                            // U = Z
  };
  for (std::size_t z = 0; z < nz; ++z) {
    const std::size_t u = block_of(z);
    pu[u] += pr.q[z];
    for (std::size_t c = 0; c < pr.ncoords; ++c)
      rows[c][u][pr.coord_of[c][z]] += pr.q[z];
  }
  std::vector<double> theta(layout.total, 0.0);
  auto logit = [](double v) { return v > 1e-300 ? std::max(std::log(v), -12.0) : -12.0; };
  for (std::size_t u = 0; u < layout.nu; ++u) theta[layout.u_offset() + u] = logit(pu[u]);
  for (std::size_t c = 0; c < pr.ncoords; ++c)
    for (std::size_t u = 0; u < layout.nu; ++u) {
      std::vector<double> row = normalized(rows[c][u]);
      for (std::size_t sym = 0; sym < pr.sizes[c]; ++sym)
        theta[layout.row_offset(c, u) + sym] = logit(row[sym]);
    }
  return theta;
}

// Shared Adam loop over softmax logits with staged penalty weights (the
// second weight of each stage drives the optional rate cap).
struct PenaltyStage {
  double primary = 0.0;
  double secondary = 0.0;
};

template <class ObjectiveFn>
void adam_stages(std::span<const PenaltyStage> stages, int stage_iters, double tol,
                 std::vector<double>& theta, ObjectiveFn&& obj) {
  const std::size_t nparam = theta.size();
  std::vector<double> grad, m_adam(nparam, 0.0), v_adam(nparam, 0.0);
  const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-12;
  for (const PenaltyStage& stage : stages) {
    std::fill(m_adam.begin(), m_adam.end(), 0.0);
    std::fill(v_adam.begin(), v_adam.end(), 0.0);
    double f_window = 1e300;
    int t_adam = 0;
    for (int it = 0; it < stage_iters; ++it) {
      const double f = obj(stage, theta, &grad);
      ++t_adam;
      const double bc1 = 1.0 - std::pow(b1, t_adam);
      const double bc2 = 1.0 - std::pow(b2, t_adam);
      for (std::size_t i = 0; i < nparam; ++i) {
        m_adam[i] = b1 * m_adam[i] + (1 - b1) * grad[i];
        v_adam[i] = b2 * v_adam[i] + (1 - b2) * grad[i] * grad[i];
        theta[i] -= lr * (m_adam[i] / bc1) / (std::sqrt(v_adam[i] / bc2) + eps);
        theta[i] = std::clamp(theta[i], -40.0, 40.0);
      }
      if (it % 50 == 49) {
        if (std::abs(f_window - f) < tol * std::max(1.0, std::abs(f))) break;
        f_window = f;
      }
    }
  }
}

RestartResult finish_restart(const OptProblem& pr, const JointPmf& target,
                             const OptimizerConfig& cfg,
                             std::optional<AuxDecomposition> witness) {
  RestartResult out;
  if (!witness) return out;
  out.accepted = true;
  out.point.witness = *witness;
  out.point.i_x_u = witness->i_x_u();
  out.point.i_xy_u = witness->i_xy_u();
  out.objective = out.point.i_xy_u + pr.mu * out.point.i_x_u;
  (void)cfg;
  (void)target;
  return out;
}

// Cold restart: explores over the conditional parameterization p(u|z), where
// the target marginal is automatic and an escalating penalty drives in the
// factorization.  Good at discovering basins; the extraction polish restores
// exact feasibility.
RestartResult run_restart_cold(const OptProblem& pr, const JointPmf& target,
                               const OptimizerConfig& cfg, int restart_index,
                               std::uint64_t mu_index) {
  const std::size_t nz = pr.nz, nu = pr.nu;
  std::vector<double> theta(nu * nz, 0.0);
  Rng rng(cfg.seed, rng_stream::kRestart,
          (mu_index << 32) | static_cast<std::uint64_t>(restart_index));
  const std::size_t ny_block = nz / pr.sizes[0];
  if (restart_index == 0) {
    for (std::size_t z = 0; z < nz; ++z) theta[(z % ny_block) * nz + z] = 10.0;  // U = Y
  } else if (restart_index == 1) {
    for (std::size_t z = 0; z < nz; ++z) theta[(z / ny_block) * nz + z] = 10.0;  // U = X
  } else if (restart_index == 2) {
    for (std::size_t z = 0; z < nz; ++z) theta[z * nz + z] = 10.0;  // U = Z
  } else {
    static constexpr double kScales[] = {0.5, 1.0, 2.0, 4.0};
    const double scale = kScales[restart_index % 4];
    for (double& t : theta) t = rng.uniform(-scale, scale);
  }

  detail::OptScratch s;
  static constexpr PenaltyStage kLambdas[] = {{1e2, 0},  {1e4, 0},  {1e6, 0}, {1e8, 0},
                                              {1e10, 0}, {1e12, 0}, {1e14, 0}};
  adam_stages(kLambdas, std::max(200, cfg.max_iters / 4), cfg.tol, theta,
              [&](const PenaltyStage& stage, const std::vector<double>& th,
                  std::vector<double>* grad) {
                detail::forward(pr, th, s);
                const double f = detail::objective(pr, stage.primary, true, s);
                detail::backprop_softmax(pr, s, *grad);
                return f;
              });

  // Markovize the final joint into factor space and extract.
  detail::forward(pr, theta, s);
  FactorScratch fs;
  fs.pu = s.pu;
  fs.cond.resize(pr.ncoords);
  for (std::size_t c = 0; c < pr.ncoords; ++c) {
    fs.cond[c].assign(nu * pr.sizes[c], 0.0);
    for (std::size_t u = 0; u < nu; ++u)
      for (std::size_t sym = 0; sym < pr.sizes[c]; ++sym)
        fs.cond[c][u * pr.sizes[c] + sym] =
            s.pu[u] > 1e-300 ? s.pm[c][sym * nu + u] / s.pu[u]
                             : 1.0 / static_cast<double>(pr.sizes[c]);
  }
  return finish_restart(pr, target, cfg,
                        extract_witness(pr, target, fs, cfg.feasibility_tol));
}

// Warm restart: tracks along the exactly factorized parameterization from a
// witness-derived initialization, with the reconstruction attachment and an
// optional cap on I(X;U).
RestartResult run_restart_warm(const OptProblem& pr, const JointPmf& target,
                               const OptimizerConfig& cfg, int restart_index,
                               std::uint64_t mu_index,
                               const std::vector<std::vector<double>>& warm_inits, bool fast,
                               double r_cap_bits = -1.0) {
  const FactorLayout layout = make_factor_layout(pr);
  Rng rng(cfg.seed, rng_stream::kRestart,
          (mu_index << 32) | static_cast<std::uint64_t>(restart_index));
  std::vector<double> theta = warm_inits[restart_index % warm_inits.size()];
  if (restart_index >= static_cast<int>(warm_inits.size()))
    for (double& t : theta) t += rng.uniform(-0.3, 0.3);

  // A small margin keeps the converged penalty slack inside the cap.
  const double ln2 = std::log(2.0);
  const double r_cap_nats = r_cap_bits >= 0.0 ? std::max(0.0, r_cap_bits - 2e-4) * ln2 : 0.0;
  FactorScratch s;
  // Curvature-aware descent traverses the flat frontier valley that
  // first-order steps crawl along.
  static constexpr PenaltyStage kStages[] = {{1e6, 1e4}, {1e9, 1e6}};
  const int chunks = fast ? 3 : 6;
  for (const PenaltyStage& stage : kStages) {
    double prev = 1e300;
    for (int chunk = 0; chunk < chunks; ++chunk) {
      const double f = detail::lbfgs_minimize(
          theta, 250, cfg.tol,
          [&](const std::vector<double>& th, std::vector<double>* grad) {
            return factor_objective(pr, layout, th, stage.primary, true, s, grad, r_cap_nats,
                                    r_cap_bits >= 0.0 ? stage.secondary : 0.0);
          });
      if (prev - f < 1e-9 * std::max(1.0, std::abs(f))) break;
      prev = f;
    }
  }

  factor_forward(pr, layout, theta, s);
  return finish_restart(pr, target, cfg,
                        extract_witness(pr, target, s, cfg.feasibility_tol));
}

std::vector<double> default_mu_grid() {
  // Basin discovery only; the capped per-point solves do the fine tracing.
  return {0.0, 0.0625, 0.25, 0.5, 1.0, 2.0, 4.0, 16.0, 64.0};
}

// Direct candidate decompositions that are exactly feasible for many targets
// (and exactly realize the region corners when they are).
std::vector<AuxDecomposition> seed_candidates(const JointPmf& target, double feas_tol) {
  std::vector<AuxDecomposition> out;
  const std::size_t ncoords = target.rank();
  const std::size_t nz = target.size();
  std::vector<std::size_t> idx(ncoords);

  // U = Z.
  {
    Alphabet u_alpha = make_u_alphabet(nz);
    std::vector<Channel> conds;
    for (std::size_t c = 0; c < ncoords; ++c) {
      std::vector<std::vector<double>> rows(nz, std::vector<double>(target.axis(c).size(), 0.0));
      for (std::size_t z = 0; z < nz; ++z) {
        target.unflatten(z, idx);
        rows[z][idx[c]] = 1.0;
      }
      conds.emplace_back(u_alpha, target.axis(c), std::move(rows));
    }
    out.push_back(AuxDecomposition{Pmf(u_alpha, target.table()), conds[0],
                                   std::vector<Channel>(conds.begin() + 1, conds.end())});
  }

  // U = X and U = (Y_1..Y_m): conditionals given the selected block; these
  // are only admitted when the implied factorization reconstructs the target.
  auto try_block = [&](bool use_x) {
    const std::size_t bsize = use_x ? target.axis(0).size() : nz / target.axis(0).size();
    Alphabet u_alpha = make_u_alphabet(bsize);
    std::vector<double> pu(bsize, 0.0);
    const std::size_t ny_block = nz / target.axis(0).size();
    for (std::size_t z = 0; z < nz; ++z)
      pu[use_x ? z / ny_block : z % ny_block] += target.at_flat(z);
    std::vector<Channel> conds;
    for (std::size_t c = 0; c < ncoords; ++c) {
      std::vector<std::vector<double>> rows(bsize,
                                            std::vector<double>(target.axis(c).size(), 0.0));
      for (std::size_t z = 0; z < nz; ++z) {
        target.unflatten(z, idx);
        const std::size_t u = use_x ? z / ny_block : z % ny_block;
        rows[u][idx[c]] += target.at_flat(z);
      }
      for (auto& row : rows) row = normalized(std::move(row));
      conds.emplace_back(u_alpha, target.axis(c), std::move(rows));
    }
    AuxDecomposition aux{Pmf(u_alpha, normalized(std::move(pu))), conds[0],
                         std::vector<Channel>(conds.begin() + 1, conds.end())};
    if (total_variation(aux.reconstruct(), target) <= feas_tol) out.push_back(std::move(aux));
  };
  try_block(true);
  try_block(false);
  return out;
}

}  // namespace

namespace {

// Pareto-minimal staircase: sorted by I(X;U) with strictly improving
// I(X,Y;U).
std::vector<FrontierPoint> pareto_prune(std::vector<FrontierPoint> cloud) {
  std::sort(cloud.begin(), cloud.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
    if (a.i_x_u != b.i_x_u) return a.i_x_u < b.i_x_u;
    return a.i_xy_u < b.i_xy_u;
  });
  std::vector<FrontierPoint> frontier;
  double best_b = 1e300;
  for (auto& pt : cloud) {
    if (pt.i_xy_u < best_b - 1e-12) {
      best_b = pt.i_xy_u;
      frontier.push_back(std::move(pt));
    }
  }
  return frontier;
}

}  // namespace

std::vector<FrontierPoint> trace_frontier(const JointPmf& target, const OptimizerConfig& cfg) {
  std::vector<double> mu_grid = cfg.mu_grid.empty() ? default_mu_grid() : cfg.mu_grid;
  std::vector<FrontierPoint> cloud;

  for (const AuxDecomposition& aux : seed_candidates(target, cfg.feasibility_tol))
    cloud.push_back(FrontierPoint{aux.i_x_u(), aux.i_xy_u(), aux});

  const int nthreads = cfg.threads > 0 ? cfg.threads
                                       : std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t mi = 0; mi < mu_grid.size(); ++mi) {
    OptProblem pr = make_problem(target, mu_grid[mi]);
    std::vector<RestartResult> results(cfg.restarts);
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        int r = next.fetch_add(1);
        if (r >= cfg.restarts) return;
        results[r] = run_restart_cold(pr, target, cfg, r, mi);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& res : results)
      if (res.accepted) cloud.push_back(std::move(res.point));
  }
  return pareto_prune(cloud);
}

std::optional<FrontierPoint> min_sum_information_at(const JointPmf& target,
                                                    std::span<const FrontierPoint> frontier,
                                                    double r_cap, const OptimizerConfig& cfg,
                                                    std::uint64_t solve_index) {
  if (frontier.empty()) return std::nullopt;
  const OptProblem pr = make_problem(target, 0.0);
  const FactorLayout layout = make_factor_layout(pr);

  // Warm starts: the two nearest frontier witnesses below the cap and the
  // nearest above.
  const FrontierPoint* below = nullptr;
  const FrontierPoint* below2 = nullptr;
  const FrontierPoint* above = nullptr;
  for (const auto& pt : frontier) {
    if (pt.i_x_u <= r_cap + 1e-9) {
      if (below == nullptr || pt.i_x_u > below->i_x_u) {
        below2 = below;
        below = &pt;
      } else if (below2 == nullptr || pt.i_x_u > below2->i_x_u) {
        below2 = &pt;
      }
    } else if (above == nullptr || pt.i_x_u < above->i_x_u) {
      above = &pt;
    }
  }
  if (below == nullptr) return std::nullopt;  // r_cap below every achievable I(X;U)
  std::vector<std::vector<double>> warm;
  warm.push_back(theta_from_witness(pr, layout, below->witness));
  if (above != nullptr) warm.push_back(theta_from_witness(pr, layout, above->witness));
  if (below2 != nullptr) warm.push_back(theta_from_witness(pr, layout, below2->witness));
  // Lifted variants wake the dormant auxiliary symbols that steep frontier
  // segments need.
  const std::size_t base_warm = warm.size();
  for (std::size_t i = 0; i < base_warm; ++i) {
    for (double t : {0.25, 0.6}) {
      std::vector<double> lifted = warm[i];
      for (double& v : lifted) v *= 1.0 - t;
      warm.push_back(std::move(lifted));
    }
  }

  const int n_restarts = std::min<int>(cfg.restarts, static_cast<int>(warm.size()) + 3);
  std::vector<RestartResult> results(n_restarts);
  std::atomic<int> next{0};
  const int nthreads = cfg.threads > 0 ? cfg.threads
                                       : std::max(1u, std::thread::hardware_concurrency());
  auto worker = [&] {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= n_restarts) return;
      results[r] = run_restart_warm(pr, target, cfg, r, (solve_index << 20) | 0xe50000ULL, warm,
                                    false, r_cap);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Best feasible sum-information, including the warm anchor itself.
  FrontierPoint best = *below;
  for (auto& res : results) {
    if (std::getenv("SYNTHCAP_DEBUG_RESTARTS") != nullptr)
      std::fprintf(stderr, "  cap=%.4f restart: %s (%.5f, %.5f)\n", r_cap,
                   res.accepted ? "ok" : "REJECT", res.point.i_x_u, res.point.i_xy_u);
    if (!res.accepted) continue;
    if (res.point.i_x_u <= r_cap + 1e-9 && res.point.i_xy_u < best.i_xy_u)
      best = std::move(res.point);
  }
  return best;
}

namespace {

// Removes zero-probability input symbols; they contribute nothing to any
// information term.
std::pair<Pmf, Channel> drop_null_inputs(const Pmf& q_x, const Channel& q_ygx) {
  if (q_x.size() != q_ygx.num_inputs())
    throw ParseError("input pmf does not match channel input alphabet");
  Alphabet atoms;
  std::vector<double> probs;
  std::vector<std::vector<double>> rows;
  for (std::size_t x = 0; x < q_x.size(); ++x) {
    if (q_x[x] <= 0.0) continue;
    atoms.push_back(q_x.atoms()[x]);
    probs.push_back(q_x[x]);
    rows.push_back(q_ygx.row(x));
  }
  if (atoms.empty()) throw ParseError("input distribution has empty support");
  return {Pmf(atoms, normalized(std::move(probs))),
          Channel(atoms, q_ygx.output(), std::move(rows))};
}

RegionBoundary assemble_from_frontier(const JointPmf& target,
                                      const std::vector<FrontierPoint>& frontier,
                                      std::span<const double> r_grid, double sum_factor,
                                      const OptimizerConfig& cfg, std::string description) {
  RegionBoundary region;
  region.target_description = std::move(description);
  region.seed = cfg.seed;
  region.restarts = cfg.restarts;
  region.method_note =
      "mu-grid scalarization with per-point capped solves; non-exposed frontier "
      "points of a non-convex frontier may be missed";
  std::vector<double> grid(r_grid.begin(), r_grid.end());
  std::sort(grid.begin(), grid.end());
  // Capped solves join the candidate pool as the grid ascends, which keeps
  // R0 nonincreasing by construction; a second pass re-solves each point from
  // the pool its neighbors populated.
  std::vector<FrontierPoint> pool = frontier;
  std::uint64_t solve_index = 1;
  for (int pass = 0; pass < 2; ++pass)
    for (double r : grid)
      if (auto solved = min_sum_information_at(target, pool, r, cfg, solve_index++))
        pool.push_back(std::move(*solved));
  for (double r : grid) {
    BoundaryPoint pt;
    pt.r = r;
    const FrontierPoint* best = nullptr;
    for (const auto& f : pool) {
      if (f.i_x_u > r + 1e-9) continue;
      if (best == nullptr || f.i_xy_u < best->i_xy_u) best = &f;
    }
    if (best == nullptr) {
      pt.attainable = false;
      pt.r0 = 0.0;
    } else {
      pt.r0 = std::max(sum_factor * best->i_xy_u - r, 0.0);
      pt.witness = best->witness;
    }
    region.points.push_back(std::move(pt));
  }
  return region;
}

}  // namespace

RegionBoundary synthesis_region(const Pmf& q_x, const Channel& q_ygx,
                                std::span<const double> r_grid, const OptimizerConfig& cfg) {
  auto [qx, ch] = drop_null_inputs(q_x, q_ygx);
  JointPmf target = JointPmf::from_input_and_channel(qx, ch);
  auto frontier = trace_frontier(target, cfg);
  return assemble_from_frontier(target, frontier, r_grid, 1.0, cfg, "synthesis");
}

CommonInformationResult wyner_common_information(const JointPmf& q_xy,
                                                 const OptimizerConfig& cfg) {
  OptimizerConfig c = cfg;
  if (c.mu_grid.empty()) c.mu_grid = {0.0, 0.0625, 0.25};
  auto frontier = trace_frontier(q_xy, c);
  const FrontierPoint* best = nullptr;
  for (const auto& f : frontier)
    if (best == nullptr || f.i_xy_u < best->i_xy_u) best = &f;
  if (best == nullptr) throw InvariantError("wyner_common_information: no feasible witness");
  return CommonInformationResult{best->i_xy_u, best->witness};
}

double necessary_conditional_entropy(const JointPmf& q_xy) {
  if (q_xy.rank() != 2) throw ParseError("necessary_conditional_entropy: two coordinates");
  const std::size_t nx = q_xy.axis(0).size();
  const std::size_t ny = q_xy.axis(1).size();
  if (ny > 8)
    throw BudgetError("necessary_conditional_entropy: |Y| above partition-search limit 8");

  std::vector<double> py(ny, 0.0), qx(nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      py[y] += q_xy.at_flat(x * ny + y);
      qx[x] += q_xy.at_flat(x * ny + y);
    }

  double best = std::numeric_limits<double>::infinity();
  // Enumerate set partitions of Y via restricted growth strings.
  std::vector<std::size_t> label(ny, 0);
  auto evaluate = [&]() {
    const std::size_t nblocks = *std::max_element(label.begin(), label.end()) + 1;
    // Block masses per x and overall.
    std::vector<double> qxw(nx * nblocks, 0.0), pw(nblocks, 0.0);
    for (std::size_t y = 0; y < ny; ++y) {
      pw[label[y]] += py[y];
      for (std::size_t x = 0; x < nx; ++x) qxw[x * nblocks + label[y]] += q_xy.at_flat(x * ny + y);
    }
    // Markov validity: q(x,y) == qxw(x, w(y)) * p(y)/p(w) exactly.
    for (std::size_t y = 0; y < ny; ++y) {
      const std::size_t w = label[y];
      if (pw[w] <= 0.0) continue;
      const double r = py[y] / pw[w];
      for (std::size_t x = 0; x < nx; ++x)
        if (std::abs(q_xy.at_flat(x * ny + y) - qxw[x * nblocks + w] * r) > 1e-12) return;
    }
    double h = 0.0;
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t w = 0; w < nblocks; ++w) {
        const double v = qxw[x * nblocks + w];
        if (v > 0.0 && qx[x] > 0.0) h -= v * std::log2(v / qx[x]);
      }
    best = std::min(best, h);
  };
  // Iterative restricted-growth enumeration: label[0] = 0 and
  // label[i] <= 1 + max(label[0..i-1]).
  for (;;) {
    evaluate();
    std::size_t i = ny - 1;
    for (; i >= 1; --i) {
      std::size_t cap = 0;
      for (std::size_t j = 0; j < i; ++j) cap = std::max(cap, label[j]);
      if (label[i] <= cap) break;
    }
    if (i == 0) return best;
    ++label[i];
    for (std::size_t j = i + 1; j < ny; ++j) label[j] = 0;
  }
}

namespace {
AuxDecomposition erasure_cascade_witness(double p1, double p2) {
  // X -> U erasure(p1) over {0,e,1}, U -> Y erasure(p2); uniform binary X.
  Alphabet xy{"0", "1"};
  Alphabet ue{"0", "e", "1"};
  std::vector<double> pu{(1 - p1) / 2, p1, (1 - p1) / 2};
  // p(x|u): u=0 -> x=0, u=1 -> x=1, u=e -> uniform.
  std::vector<std::vector<double>> xrows{{1, 0}, {0.5, 0.5}, {0, 1}};
  // p(y|u): erasure p2 into {0,e,1}.
  std::vector<std::vector<double>> yrows{
      {1 - p2, p2, 0}, {0, 1, 0}, {0, p2, 1 - p2}};
  return AuxDecomposition{Pmf(ue, pu), Channel(ue, xy, xrows),
                          {Channel(ue, Alphabet{"0", "e", "1"}, yrows)}};
}
}  // namespace

RegionBoundary erasure_region(double p, std::span<const double> r_samples) {
  if (!(p > 0.0 && p < 1.0)) throw ParseError("erasure_region: p outside (0,1)");
  const double r_star = std::min(2.0 * (1.0 - p), 1.0);
  RegionBoundary region;
  region.target_description = "erasure p=" + std::to_string(p);
  region.method_note = "closed form";
  std::vector<double> rs(r_samples.begin(), r_samples.end());
  std::sort(rs.begin(), rs.end());
  for (double r : rs) {
    if (r < 1.0 - p - 1e-12 || r > r_star + 1e-12)
      throw InfeasibleError("erasure_region: r outside [1-p, r*]");
    r = std::clamp(r, 1.0 - p, r_star);
    BoundaryPoint pt;
    pt.r = r;
    pt.r0 = binary_entropy(p) + r * (1.0 - binary_entropy((1.0 - p) / r)) - r;
    pt.r0 = std::max(pt.r0, 0.0);
    pt.witness = erasure_cascade_witness(1.0 - r, 1.0 - (1.0 - p) / r);
    region.points.push_back(std::move(pt));
  }
  return region;
}

RegionBoundary reverse_erasure_region(double p, std::span<const double> r_samples) {
  if (!(p > 0.0 && p < 1.0)) throw ParseError("reverse_erasure_region: p outside (0,1)");
  const double r_star = std::min(2.0 * (1.0 - p), 1.0);
  RegionBoundary region;
  region.target_description = "reverse-erasure p=" + std::to_string(p);
  region.method_note = "closed form";
  std::vector<double> rs(r_samples.begin(), r_samples.end());
  std::sort(rs.begin(), rs.end(), std::greater<>());
  for (double r : rs) {
    if (r < r_star - 1e-12 || r > 1.0 + 1e-12)
      throw InfeasibleError("reverse_erasure_region: r outside [r*, 1]");
    r = std::clamp(r, r_star, 1.0);
    const double common = binary_entropy(p) - r * binary_entropy((1.0 - p) / r);
    BoundaryPoint pt;
    pt.r = common + (1.0 - p);
    pt.r0 = std::max(common + r - pt.r, 0.0);
    region.points.push_back(std::move(pt));
  }
  std::sort(region.points.begin(), region.points.end(),
            [](const BoundaryPoint& a, const BoundaryPoint& b) { return a.r < b.r; });
  return region;
}

namespace {
// All size-a subsets of {0..m-1}.
void subsets_of_size(std::size_t m, std::size_t a,
                     std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> cur(a);
  for (std::size_t i = 0; i < a; ++i) cur[i] = i;
  for (;;) {
    out.push_back(cur);
    std::size_t i = a;
    while (i-- > 0) {
      if (cur[i] + (a - i) < m) {
        ++cur[i];
        for (std::size_t j = i + 1; j < a; ++j) cur[j] = cur[j - 1] + 1;
        break;
      }
      if (i == 0) return;
    }
  }
}

AuxDecomposition scatter_corner_witness(std::size_t m, std::size_t a) {
  Alphabet symbols;
  for (std::size_t i = 1; i <= m; ++i) symbols.push_back(std::to_string(i));
  std::vector<std::vector<std::size_t>> subsets;
  subsets_of_size(m, a, subsets);
  Alphabet u_alpha = make_u_alphabet(subsets.size());
  std::vector<std::vector<double>> xrows, yrows;
  for (const auto& sub : subsets) {
    std::vector<double> xr(m, 0.0), yr(m, 1.0 / static_cast<double>(m - a));
    for (std::size_t s : sub) {
      xr[s] = 1.0 / static_cast<double>(a);
      yr[s] = 0.0;
    }
    xrows.push_back(std::move(xr));
    yrows.push_back(std::move(yr));
  }
  return AuxDecomposition{Pmf::uniform(u_alpha), Channel(u_alpha, symbols, xrows),
                          {Channel(u_alpha, symbols, yrows)}};
}
}  // namespace

RegionBoundary scatter_region(int m) {
  if (m < 3) throw ParseError("scatter_region: m must be >= 3");
  RegionBoundary region;
  region.target_description = "scatter m=" + std::to_string(m);
  region.method_note = "closed-form corner points plus sum-rate intercept";
  const std::size_t mm = static_cast<std::size_t>(m);
  const std::size_t a_min = (mm + 1) / 2;
  for (std::size_t a = mm - 1; a >= a_min; --a) {
    BoundaryPoint pt;
    pt.r = std::log2(static_cast<double>(mm) / static_cast<double>(a));
    pt.r0 = std::log2(static_cast<double>(mm - 1) / static_cast<double>(mm - a));
    if (mm <= 12) pt.witness = scatter_corner_witness(mm, a);
    region.points.push_back(std::move(pt));
    if (a == a_min) break;
  }
  // R0 = 0 intercept of the sum-rate line through the last corner.
  BoundaryPoint corner = region.points.back();
  BoundaryPoint intercept;
  intercept.r = corner.r + corner.r0;
  intercept.r0 = 0.0;
  region.points.push_back(std::move(intercept));
  return region;
}

RegionBoundary broadcast_region(const Pmf& q_x, const Channel& q_ys_gx,
                                std::span<const std::size_t> y_sizes,
                                std::span<const double> r_grid, const OptimizerConfig& cfg) {
  auto [qx, ch] = drop_null_inputs(q_x, q_ys_gx);
  std::size_t prod = 1;
  for (std::size_t s : y_sizes) prod *= s;
  if (prod != ch.num_outputs())
    throw ParseError("broadcast_region: receiver sizes do not match channel output");
  // Split the product output axis into per-receiver axes.  Output labels that
  // are m-part tuples keep their per-position labels; otherwise generic
  // labels are generated.
  std::vector<Alphabet> axes;
  axes.push_back(qx.atoms());
  {
    std::vector<Alphabet> y_axes(y_sizes.size());
    bool splittable = true;
    for (std::size_t o = 0; o < ch.num_outputs() && splittable; ++o) {
      const std::string& label = ch.output()[o];
      std::vector<std::string> parts;
      std::size_t start = 0;
      for (std::size_t i = 0; i <= label.size(); ++i) {
        if (i == label.size() || label[i] == ',') {
          parts.push_back(label.substr(start, i - start));
          start = i + 1;
        }
      }
      if (parts.size() != y_sizes.size()) {
        splittable = false;
        break;
      }
      std::size_t rem = o;
      for (std::size_t c = y_sizes.size(); c-- > 0;) {
        const std::size_t sym = rem % y_sizes[c];
        rem /= y_sizes[c];
        if (y_axes[c].size() <= sym) y_axes[c].resize(sym + 1);
        if (y_axes[c][sym].empty())
          y_axes[c][sym] = parts[c];
        else if (y_axes[c][sym] != parts[c])
          splittable = false;
      }
    }
    if (!splittable) {
      for (std::size_t c = 0; c < y_sizes.size(); ++c) {
        y_axes[c].clear();
        for (std::size_t s = 0; s < y_sizes[c]; ++s)
          y_axes[c].push_back("y" + std::to_string(c) + "_" + std::to_string(s));
      }
    }
    for (auto& a : y_axes) axes.push_back(std::move(a));
  }
  std::vector<double> table(qx.size() * prod);
  for (std::size_t x = 0; x < qx.size(); ++x)
    for (std::size_t o = 0; o < prod; ++o) table[x * prod + o] = qx[x] * ch.at(x, o);
  JointPmf target(std::move(axes), std::move(table));
  auto frontier = trace_frontier(target, cfg);
  return assemble_from_frontier(target, frontier, r_grid, 1.0, cfg, "broadcast");
}

RegionBoundary public_channel_region(const Pmf& q_x, const Channel& q_ygx,
                                     const OptimizerConfig& cfg) {
  auto [qx, ch] = drop_null_inputs(q_x, q_ygx);
  JointPmf target = JointPmf::from_input_and_channel(qx, ch);
  std::vector<FrontierPoint> frontier = trace_frontier(target, cfg);
  if (frontier.empty()) throw InvariantError("public_channel_region: empty frontier");
  // Densify between the extremes with capped solves.
  {
    const double lo = frontier.front().i_x_u;
    const double hi = frontier.back().i_x_u;
    std::vector<FrontierPoint> pool = frontier;
    std::uint64_t solve_index = 4000;
    for (int i = 1; i + 1 < 12; ++i) {
      const double r = lo + (hi - lo) * i / 11.0;
      if (auto solved = min_sum_information_at(target, pool, r, cfg, solve_index++))
        pool.push_back(std::move(*solved));
    }
    frontier = pareto_prune(std::move(pool));
  }
  RegionBoundary region;
  region.target_description = "public-channel";
  region.seed = cfg.seed;
  region.restarts = cfg.restarts;
  region.method_note = "frontier of (I(X;U), I(X,Y;U)); R0 carries the full term";
  for (const auto& f : frontier) {
    if (f.i_xy_u < f.i_x_u - 1e-9)
      throw InvariantError("public_channel_region: I(X,Y;U) < I(X;U)");
    BoundaryPoint pt;
    pt.r = f.i_x_u;
    pt.r0 = f.i_xy_u;
    pt.witness = f.witness;
    region.points.push_back(std::move(pt));
  }
  return region;
}

RegionBoundary limited_memory_region(const Pmf& q_x, const Channel& q_ygx, double b,
                                     std::span<const double> r_grid,
                                     const OptimizerConfig& cfg) {
  if (b < 0.0 || b > 1.0) throw ParseError("limited_memory_region: b outside [0,1]");
  auto [qx, ch] = drop_null_inputs(q_x, q_ygx);
  JointPmf target = JointPmf::from_input_and_channel(qx, ch);
  auto frontier = trace_frontier(target, cfg);
  return assemble_from_frontier(target, frontier, r_grid, b, cfg, "limited-memory");
}

std::vector<BoundaryPoint> local_randomness_region(const Pmf& q_x, const Channel& q_ygx,
                                                   const OptimizerConfig& cfg) {
  auto [qx, ch] = drop_null_inputs(q_x, q_ygx);
  JointPmf target = JointPmf::from_input_and_channel(qx, ch);
  std::vector<FrontierPoint> frontier = trace_frontier(target, cfg);
  if (!frontier.empty()) {
    const double lo = frontier.front().i_x_u;
    const double hi = frontier.back().i_x_u;
    std::vector<FrontierPoint> pool = frontier;
    std::uint64_t solve_index = 5000;
    for (int i = 1; i + 1 < 10; ++i) {
      const double r = lo + (hi - lo) * i / 9.0;
      if (auto solved = min_sum_information_at(target, pool, r, cfg, solve_index++))
        pool.push_back(std::move(*solved));
    }
    frontier = pareto_prune(std::move(pool));
  }
  std::vector<BoundaryPoint> out;
  for (const auto& f : frontier) {
    BoundaryPoint pt;
    pt.r = f.i_x_u;
    pt.r0 = std::max(f.i_xy_u - f.i_x_u, 0.0);
    pt.r_l = f.witness.h_y_given_u();
    pt.witness = f.witness;
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace synthcap
