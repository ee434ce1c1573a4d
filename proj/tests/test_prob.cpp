#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "synthcap/builtins.hpp"
#include "synthcap/errors.hpp"
#include "synthcap/info.hpp"
#include "synthcap/prob.hpp"
#include "synthcap/rng.hpp"

using namespace synthcap;

namespace {

// Random pmf over n atoms; Dirichlet(1) via exponentials.
std::vector<double> random_pmf_probs(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  double sum = 0.0;
  for (double& x : v) {
    x = -std::log(1.0 - rng.next_double());
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

Pmf random_pmf(Rng& rng, const Alphabet& atoms) { return Pmf(atoms, random_pmf_probs(rng, atoms.size())); }

JointPmf random_joint2(Rng& rng, const Alphabet& a, const Alphabet& b) {
  return JointPmf({a, b}, random_pmf_probs(rng, a.size() * b.size()));
}

const Alphabet kBits{"0", "1"};

JointPmf uniform_diagonal_binary() {
  return JointPmf({kBits, kBits}, {0.5, 0.0, 0.0, 0.5});
}

}  // namespace

TEST_CASE("pmf validation") {
  CHECK_THROWS_AS(Pmf({"a", "b"}, {0.5, 0.6}), ParseError);
  CHECK_THROWS_AS(Pmf({"a", "b"}, {1.5, -0.5}), ParseError);
  CHECK_THROWS_AS(Pmf({"a"}, {0.5, 0.5}), ParseError);
  Pmf p({"a", "b"}, {0.25, 0.75});
  CHECK(p.index_of("b") == 1);
  CHECK_THROWS_AS(p.index_of("c"), ParseError);
}

TEST_CASE("joint pmf marginals and merges") {
  JointPmf j({kBits, Alphabet{"a", "b", "c"}}, {0.1, 0.2, 0.3, 0.15, 0.15, 0.1});
  Pmf mx = j.marginal(0);
  CHECK(mx[0] == doctest::Approx(0.6).epsilon(1e-12));
  Pmf my = j.marginal(1);
  CHECK(my[1] == doctest::Approx(0.35).epsilon(1e-12));
  Pmf flat = j.flatten();
  CHECK(flat.size() == 6);
  CHECK(flat.atoms()[1] == "0,b");

  // Three coordinates, merged two ways.
  JointPmf j3({kBits, kBits, kBits},
              {0.1, 0.1, 0.05, 0.05, 0.2, 0.1, 0.25, 0.15});
  const std::size_t ga[] = {0, 1};
  const std::size_t gb[] = {2};
  JointPmf merged = j3.merge_axes(ga, gb);
  CHECK(merged.rank() == 2);
  CHECK(merged.axis(0).size() == 4);
  const std::size_t i00[] = {std::size_t{0}, std::size_t{0}};
  CHECK(merged.at(i00) == doctest::Approx(0.1));
}

TEST_CASE("entropy examples") {
  CHECK(entropy(Pmf(kBits, {1.0, 0.0})) == doctest::Approx(0.0));
  CHECK(entropy(Pmf(kBits, {0.5, 0.5})) == doctest::Approx(1.0));
  // h(0.25) evaluated in closed form.
  CHECK(entropy(Pmf(kBits, {0.75, 0.25})) == doctest::Approx(0.811278).epsilon(1e-6));
  CHECK(binary_entropy(0.25) == doctest::Approx(0.8112781244591328).epsilon(1e-12));
}

TEST_CASE("mutual information examples") {
  // Independent uniform pair.
  CHECK(mutual_information(JointPmf::product(Pmf::uniform(kBits), Pmf::uniform(kBits))) ==
        doctest::Approx(0.0));
  // Identity coupling.
  CHECK(mutual_information(uniform_diagonal_binary()) == doctest::Approx(1.0));
  // Erasure channel joint at p = 0.5 with uniform input: I = 1 - p.
  auto [input, channel] = builtin_channel("erasure", 0.5);
  CHECK(mutual_information(JointPmf::from_input_and_channel(input, channel)) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("total variation examples") {
  Pmf p(kBits, {0.5, 0.5});
  CHECK(total_variation(p, p) == doctest::Approx(0.0));
  CHECK(total_variation(Pmf(kBits, {1.0, 0.0}), Pmf(kBits, {0.0, 1.0})) == doctest::Approx(1.0));
  CHECK(total_variation(p, Pmf(kBits, {0.3, 0.7})) == doctest::Approx(0.2));
  CHECK_THROWS_AS(total_variation(p, Pmf({"a", "b"}, {0.5, 0.5})), ParseError);
}

TEST_CASE("information density examples") {
  JointPmf indep = JointPmf::product(Pmf::uniform(kBits), Pmf::uniform(kBits));
  CHECK(information_density(indep, 0, 1) == doctest::Approx(0.0));
  JointPmf diag = uniform_diagonal_binary();
  CHECK(information_density(diag, 0, 0) == doctest::Approx(1.0));
  CHECK(information_density(diag, 0, 1) == -std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(information_density(diag, 2, 0), ParseError);
  CHECK(information_density(diag, "0", "0") == doctest::Approx(1.0));
}

TEST_CASE("renyi information examples") {
  JointPmf indep = JointPmf::product(Pmf::uniform(kBits), Pmf::uniform(kBits));
  CHECK(renyi_information(indep, 2.0) == doctest::Approx(0.0));
  JointPmf diag = uniform_diagonal_binary();
  CHECK(renyi_information(diag, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(renyi_information(diag, 0.5), ParseError);

  CHECK(renyi_information_bar(indep, 2.0) == doctest::Approx(0.0));
  CHECK(renyi_information_bar(diag, 2.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(renyi_information_bar(diag, 2.5), ParseError);
}

TEST_CASE("renyi limits and ordering on random joints") {
  Rng rng(7, rng_stream::kTest);
  const Alphabet a3{"a", "b", "c"};
  for (int trial = 0; trial < 200; ++trial) {
    JointPmf j = random_joint2(rng, kBits, a3);
    const double mi = mutual_information(j);
    // alpha -> 1+ recovers mutual information.
    CHECK(renyi_information(j, 1.0) == doctest::Approx(mi));
    CHECK(renyi_information(j, 1.001) == doctest::Approx(mi).epsilon(5e-4));
    // Nondecreasing in alpha.
    double prev = -1e9;
    for (double alpha : {1.0, 1.25, 1.5, 2.0}) {
      const double v = renyi_information(j, alpha);
      CHECK(v >= prev - 1e-10);
      prev = v;
    }
    // The bar variant sits below on (1,2].
    for (double alpha : {1.25, 1.5, 2.0})
      CHECK(renyi_information_bar(j, alpha) <= renyi_information(j, alpha) + 1e-10);
  }
}

TEST_CASE("information density expectation equals mutual information") {
  Rng rng(11, rng_stream::kTest);
  const Alphabet a3{"a", "b", "c"};
  for (int trial = 0; trial < 50; ++trial) {
    JointPmf j = random_joint2(rng, a3, kBits);
    double expect = 0.0;
    for (std::size_t u = 0; u < 3; ++u)
      for (std::size_t v = 0; v < 2; ++v) {
        const std::size_t idx[] = {u, v};
        const double mass = j.at(idx);
        if (mass > 0.0) expect += mass * information_density(j, u, v);
      }
    CHECK(expect == doctest::Approx(mutual_information(j)).epsilon(1e-9));
  }
}

TEST_CASE("hypothesis floor") {
  CHECK(hypothesis_floor(0.0) == doctest::Approx(1.0));
  CHECK(hypothesis_floor(1.0) == doctest::Approx(0.0));
  CHECK(hypothesis_floor(0.2) == doctest::Approx(0.8));
  CHECK_THROWS_AS(hypothesis_floor(1.5), ParseError);
}

TEST_CASE("random time marginal") {
  // i.i.d. sequence with uniform T returns the single-letter marginal.
  Pmf letter(kBits, {0.3, 0.7});
  JointPmf seq = JointPmf::iid(letter, 3);
  Pmf mixed = random_time_marginal(seq, Pmf::uniform({"1", "2", "3"}));
  CHECK(total_variation(mixed, letter) == doctest::Approx(0.0).epsilon(1e-12));

  // n = 1 degenerate index.
  JointPmf one({kBits}, {0.4, 0.6});
  Pmf same = random_time_marginal(one, Pmf({"1"}, {1.0}));
  CHECK(same[0] == doctest::Approx(0.4));

  // n = 2 with distinct marginals and T = (0.5, 0.5): direct mixture.
  JointPmf two({kBits, kBits}, {0.54, 0.06, 0.16, 0.24});  // P(X1=0)=0.6, P(X2=0)=0.7
  Pmf mix = random_time_marginal(two, Pmf::uniform({"1", "2"}));
  CHECK(mix[0] == doctest::Approx(0.5 * 0.6 + 0.5 * 0.7));

  CHECK_THROWS_AS(random_time_marginal(two, Pmf({"1"}, {1.0})), ParseError);
}

// Total variation between marginals never exceeds total variation between
// the joints.
TEST_CASE("property: tv marginal monotonicity") {
  Rng rng(13, rng_stream::kTest);
  const Alphabet a3{"a", "b", "c"};
  for (int trial = 0; trial < 1000; ++trial) {
    JointPmf p = random_joint2(rng, kBits, a3);
    JointPmf q = random_joint2(rng, kBits, a3);
    const double joint_tv = total_variation(p, q);
    CHECK(total_variation(p.marginal(0), q.marginal(0)) <= joint_tv + 1e-12);
    CHECK(total_variation(p.marginal(1), q.marginal(1)) <= joint_tv + 1e-12);
  }
}

// Passing two inputs through one channel preserves TV on the input-output
// joints.
TEST_CASE("property: tv preserved by a common channel") {
  Rng rng(17, rng_stream::kTest);
  const Alphabet a3{"a", "b", "c"};
  for (int trial = 0; trial < 1000; ++trial) {
    Pmf p = random_pmf(rng, a3);
    Pmf q = random_pmf(rng, a3);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < 3; ++i) rows.push_back(random_pmf_probs(rng, 2));
    Channel w(a3, kBits, rows);
    const double lhs = total_variation(JointPmf::from_input_and_channel(p, w),
                                       JointPmf::from_input_and_channel(q, w));
    CHECK(lhs == doctest::Approx(total_variation(p, q)).epsilon(1e-12));
  }
}

// TV between random-time samples never exceeds TV between the sequences.
TEST_CASE("property: random time index bound") {
  Rng rng(19, rng_stream::kTest);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + trial % 3;
    std::vector<Alphabet> axes(n, kBits);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 2;
    JointPmf p(axes, random_pmf_probs(rng, total));
    JointPmf q(axes, random_pmf_probs(rng, total));
    Alphabet t_atoms;
    for (std::size_t i = 0; i < n; ++i) t_atoms.push_back(std::to_string(i));
    Pmf t(t_atoms, random_pmf_probs(rng, n));
    const double lhs = total_variation(random_time_marginal(p, t), random_time_marginal(q, t));
    CHECK(lhs <= total_variation(p, q) + 1e-12);
  }
}

// |E_p f - E_q f| <= 2 max|f| TV(p,q).
TEST_CASE("property: bounded function expectation bound") {
  Rng rng(23, rng_stream::kTest);
  const Alphabet a4{"a", "b", "c", "d"};
  for (int trial = 0; trial < 1000; ++trial) {
    Pmf p = random_pmf(rng, a4);
    Pmf q = random_pmf(rng, a4);
    std::vector<double> f(4);
    double fmax = 0.0;
    for (double& v : f) {
      v = rng.uniform(-3.0, 3.0);
      fmax = std::max(fmax, std::abs(v));
    }
    double ep = 0.0, eq = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      ep += p[i] * f[i];
      eq += q[i] * f[i];
    }
    CHECK(std::abs(ep - eq) <= 2.0 * fmax * total_variation(p, q) + 1e-12);
  }
}

TEST_CASE("log2 sum exp2 handles extreme exponents") {
  std::vector<double> xs{-2000.0, -2000.0};
  CHECK(log2_sum_exp2(xs) == doctest::Approx(-1999.0));
  std::vector<double> big{3000.0, 3000.0};
  CHECK(log2_sum_exp2(big) == doctest::Approx(3001.0));
  std::vector<double> none;
  CHECK(log2_sum_exp2(none) == -std::numeric_limits<double>::infinity());
}
