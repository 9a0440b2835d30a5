#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "grslab/seqspace.hpp"

using namespace grslab;
using namespace grslab::seqspace;

namespace {

LatticeSeq geometric(int K, double base) {
  return LatticeSeq::from_fn(K, [base](int k) { return std::pow(base, std::abs(k)); });
}

// Closed-form 1 + 2 q (1 - q^K) / (1 - q) for sum_{|k|<=K} q^{|k|}.
double two_sided_geometric_sum(double q, int K) {
  return 1.0 + 2.0 * q * (1.0 - std::pow(q, K)) / (1.0 - q);
}

}  // namespace

TEST_CASE("weighted_lp_norm") {
  LatticeSeq delta = LatticeSeq::from_fn(8, [](int k) { return k == 0 ? 1.0 : 0.0; });
  for (const auto& w : {Weight::constant(), Weight::polynomial(2), Weight::subexp(1, 1)})
    CHECK(weighted_lp_norm(delta, w, 1.0) == doctest::Approx(w.eval1(0.0)).epsilon(1e-14));

  // Geometric series oracle: sum 2^{-|k|} over |k| <= 60 is 3 up to 2^{-59}.
  LatticeSeq a = geometric(60, 0.5);
  CHECK(weighted_lp_norm(a, Weight::constant(), 1.0) ==
        doctest::Approx(3.0).epsilon(1e-12));

  // Ratio e^{0.5}/2 geometric series.
  double q = std::exp(0.5) / 2.0;
  double expect = two_sided_geometric_sum(q, 60);
  CHECK(weighted_lp_norm(a, Weight::subexp(0.5, 1), 1.0) ==
        doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect == doctest::Approx(10.388).epsilon(1e-4));
}

TEST_CASE("norm properties") {
  LatticeSeq a = LatticeSeq::from_fn(40, [](int k) { return std::cos(0.3 * k) / (1.0 + k * k); });

  // Unweighted p = 2 equals the Euclidean norm of the stored values.
  double euclid = 0.0;
  for (double v : a.values()) euclid += v * v;
  euclid = std::sqrt(euclid);
  CHECK(weighted_lp_norm(a, Weight::constant(), 2.0) ==
        doctest::Approx(euclid).epsilon(1e-12));

  // Scaling: |lambda| factors out for every p.
  LatticeSeq b = LatticeSeq::from_fn(40, [&](int k) { return -2.5 * a.at(k); });
  for (double p : {0.5, 1.0, 2.0, std::numeric_limits<double>::infinity()})
    CHECK(weighted_lp_norm(b, Weight::polynomial(1), p) ==
          doctest::Approx(2.5 * weighted_lp_norm(a, Weight::polynomial(1), p))
              .epsilon(1e-12));

  // Pointwise weight domination is monotone in the norm.
  CHECK(weighted_lp_norm(a, Weight::polynomial(1), 1.0) <=
        weighted_lp_norm(a, Weight::polynomial(5), 1.0));

  CHECK_THROWS_AS(weighted_lp_norm(a, Weight::constant(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(weighted_lp_norm(a, Weight::constant(), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(weighted_lp_norm(a, Weight::constant(2), 1.0), std::invalid_argument);
}

TEST_CASE("lattice section caps") {
  CHECK_THROWS_AS(LatticeSeq(1, 513), std::invalid_argument);
  CHECK_THROWS_AS(LatticeSeq(2, 65), std::invalid_argument);
  CHECK_THROWS_AS(LatticeSeq(3, 4), std::invalid_argument);
  LatticeSeq ok(2, 64);
  CHECK_THROWS_AS(ok.at(65, 0), std::out_of_range);
}

TEST_CASE("tail_growth_probe") {
  LatticeSeq a = geometric(512, 0.5);
  CHECK(tail_growth_probe(a, Weight::constant(), 1.0, 8) == TailVerdict::summable);

  // Terms (e/2)^{|k|} grow: ratio e/2 > 1.
  CHECK(tail_growth_probe(a, Weight::subexp(1, 1), 1.0, 8) == TailVerdict::divergent);

  // Brute-force partial sums of (1+|k|)^{-2} (1+|k|)^3 = 1+|k| grow.
  LatticeSeq b = LatticeSeq::from_fn(512, [](int k) { return std::pow(1.0 + std::abs(k), -2.0); });
  CHECK(tail_growth_probe(b, Weight::polynomial(3), 1.0, 8) == TailVerdict::divergent);

  // Finite support: tail increments vanish.
  LatticeSeq delta = LatticeSeq::from_fn(512, [](int k) { return k == 0 ? 1.0 : 0.0; });
  CHECK(tail_growth_probe(delta, Weight::subexp(2, 0.9), 1.0, 8) == TailVerdict::summable);

  // Overflowing partial sums count as growth.
  LatticeSeq ones = LatticeSeq::from_fn(512, [](int) { return 1.0; });
  CHECK(tail_growth_probe(ones, Weight::subexp(1, 1), 2.0, 8) == TailVerdict::divergent);

  CHECK_THROWS_AS(tail_growth_probe(a, Weight::constant(), 1.0, 2), std::invalid_argument);
}

TEST_CASE("tail_growth_probe in the sup form") {
  LatticeSeq a = geometric(512, 0.5);
  CHECK(tail_growth_probe(a, Weight::constant(), std::numeric_limits<double>::infinity(), 8) ==
        TailVerdict::summable);
  CHECK(tail_growth_probe(a, Weight::subexp(1, 1), std::numeric_limits<double>::infinity(), 8) ==
        TailVerdict::divergent);
}

TEST_CASE("identity_experiment on the shipped test set") {
  auto seqs = shipped_sequences();
  auto battery = default_identity_battery();
  std::vector<double> eps = {1.0, 0.5, 0.1, 0.05, 0.01};
  IdentityReport rep = identity_experiment(seqs, battery, eps, 1.0);

  REQUIRE(rep.rows.size() == 6);
  CHECK(rep.all_agree);
  CHECK(rep.decisive_rows == 6);
  CHECK(rep.agreeing_rows == rep.decisive_rows);

  for (const auto& row : rep.rows) {
    CAPTURE(row.sequence_id);
    bool should_pass = row.sequence_id != "ones" && row.sequence_id != "polyinv2";
    CHECK(row.left == (should_pass ? TailVerdict::summable : TailVerdict::divergent));
    CHECK(row.right == row.left);
  }
}

TEST_CASE("identity_experiment rejects non-conforming batteries") {
  auto seqs = shipped_sequences(64);
  std::vector<Weight> bad = {Weight::constant(), Weight::subexp(1, 1)};
  CHECK_THROWS_AS(identity_experiment(seqs, bad, {1.0}, 1.0), std::invalid_argument);
}
