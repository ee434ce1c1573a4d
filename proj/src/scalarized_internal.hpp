#pragma once

// Internal seams of the scalarized decomposition optimizer, shared between
// regions.cpp and the gradient tests.  Not part of the installed interface.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "synthcap/prob.hpp"

namespace synthcap::detail {

struct OptProblem {
  std::vector<double> q;               // target over Z, flattened row-major
  std::vector<std::size_t> sizes;      // per-coordinate sizes
  std::vector<std::vector<std::size_t>> coord_of;  // [c][z] -> symbol
  std::vector<double> qx;              // coordinate-0 marginal
  std::size_t nz = 0, nu = 0, ncoords = 0;
  double mu = 0.0;
};

OptProblem make_problem(const JointPmf& target, double mu);

struct OptScratch {
  std::vector<double> c;   // p(u|z), laid out [u*nz + z]
  std::vector<double> p;   // p(z,u) = q(z) c(u|z)
  std::vector<double> pu;  // p(u)
  std::vector<std::vector<double>> pm;  // per coord: [s*nu + u]
  std::vector<double> e;   // factorization residual per (z,u)
  std::vector<double> g;   // d objective / d c(u|z)
  std::vector<double> bprod;
};

void forward(const OptProblem& pr, std::span<const double> theta, OptScratch& s);

// Objective (nats) = I(Z;U) + mu I(X;U) + lambda sum e^2; fills s.g with the
// c-space gradient when grad is set.
double objective(const OptProblem& pr, double lambda, bool grad, OptScratch& s);

// theta-space gradient via softmax backprop.
void backprop_softmax(const OptProblem& pr, const OptScratch& s, std::vector<double>& gtheta);

// ---------------------------------------------------------------------------
// Factorized parameterization: softmax logits of (p_U, p_{X|U}, p_{Y_i|U}).
// Conditional independence holds exactly; the target joint is attached by a
// quadratic reconstruction penalty.
// ---------------------------------------------------------------------------

// Parameter layout inside one flat vector: nu logits for p_U, then for each
// coordinate c and each u a row of sizes[c] logits.
struct FactorLayout {
  std::size_t nu = 0;
  std::vector<std::size_t> sizes;
  std::size_t total = 0;
  std::size_t u_offset() const { return 0; }
  std::size_t row_offset(std::size_t c, std::size_t u) const {
    std::size_t off = nu;
    for (std::size_t cc = 0; cc < c; ++cc) off += nu * sizes[cc];
    return off + u * sizes[c];
  }
};
FactorLayout make_factor_layout(const OptProblem& pr);

struct FactorScratch {
  std::vector<double> pu;                          // nu
  std::vector<std::vector<double>> cond;           // per coord: [u*sizes[c]+s]
  std::vector<double> recon;                       // nz
  std::vector<double> recon_x;                     // sizes[0]
  std::vector<double> w;                           // nz*nu joint, [z*nu+u]
  std::vector<double> g;                           // gradient in value space
};

// Probabilities from logits.
void factor_forward(const OptProblem& pr, const FactorLayout& layout,
                    std::span<const double> theta, FactorScratch& s);

// Objective (nats) = I(Z;U) + mu I(X;U) + kappa sum_z (recon - q)^2
//                    + sigma max(0, I(X;U) - r_cap)^2
// with the theta-space gradient (softmax backprop included) in gtheta when
// requested.  r_cap is in nats; sigma = 0 disables the rate cap.
double factor_objective(const OptProblem& pr, const FactorLayout& layout,
                        std::span<const double> theta, double kappa, bool grad,
                        FactorScratch& s, std::vector<double>* gtheta,
                        double r_cap = 0.0, double sigma = 0.0, double info_weight = 1.0);

// Limited-memory BFGS with Armijo backtracking.  fg(x, &grad) returns the
// objective and fills the gradient.  Returns the final objective value.
double lbfgs_minimize(std::vector<double>& x, int max_iters, double tol,
                      const std::function<double(const std::vector<double>&,
                                                 std::vector<double>*)>& fg);

}  // namespace synthcap::detail
