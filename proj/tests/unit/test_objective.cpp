// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "vmhan/error.hpp"
#include "vmhan/objective.hpp"
#include "vmhan/rng.hpp"

using namespace vmhan;

namespace {

constexpr double kEps = 1e-6;

GaussianStates states_from(std::size_t n, std::size_t d,
                           const std::vector<double>& mu,
                           const std::vector<double>& variance) {
  GaussianStates s{Tensor({n, d}, mu), Tensor({n, d})};
  for (std::size_t i = 0; i < variance.size(); ++i) {
    s.sigma_raw[i] = fixtures::raw_for_variance(variance[i], kEps);
  }
  return s;
}

GaussianStates random_states(Rng& rng, std::size_t n, std::size_t d) {
  GaussianStates s{Tensor({n, d}), Tensor({n, d})};
  for (double& v : s.mu.values()) v = rng.uniform(-3, 3);
  for (double& v : s.sigma_raw.values()) v = rng.uniform(-8, 5);
  return s;
}

}  // namespace

TEST_CASE("vocabulary: none is appended last and lookups are exact") {
  const RelationVocabulary v({"born_in", "member_of"});
  CHECK(v.size() == 3);
  CHECK(v.label(v.none_index()) == "none");
  CHECK(v.index_of("member_of") == 1);
  CHECK(v.contains("born_in"));
  CHECK_FALSE(v.contains("nope"));
  CHECK_THROWS_AS(v.index_of("nope"), ValidationError);
  CHECK(RelationVocabulary({"a", "none"}) == RelationVocabulary({"a"}));
  CHECK_THROWS_AS(RelationVocabulary({"none", "a"}), ValidationError);
  CHECK_THROWS_AS(RelationVocabulary({"a", "a"}), ValidationError);
  CHECK_THROWS_AS(RelationVocabulary({""}), ValidationError);
}

TEST_CASE("classify: softmax of affine logits") {
  const Tensor w = Tensor::matrix(2, 1, {std::log(3.0), 0.0});
  const Tensor b = Tensor::vector({0.0, 0.0});
  const std::vector<double> r{1.0};
  const auto p = classify(r, w, b);
  CHECK(p[0] == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(loss_classification(p, 0) == doctest::Approx(-std::log(0.75)));
  const std::vector<double> r2{1.0, 2.0};
  CHECK_THROWS_AS(classify(r2, w, b), DimensionError);
}

TEST_CASE("classification loss: uniform over 23 classes and the floor") {
  const std::vector<double> uniform(23, 1.0 / 23.0);
  CHECK(loss_classification(uniform, 7) == doctest::Approx(std::log(23.0)).epsilon(1e-14));
  const std::vector<double> zero{1.0, 0.0};
  CHECK(loss_classification(zero, 1) == doctest::Approx(-std::log(1e-12)));
  CHECK_THROWS_AS(loss_classification(zero, 2), ValidationError);
}

TEST_CASE("reconstruction loss: hand example and zero at the targets") {
  const auto s = states_from(1, 1, {1.0}, {2.0});
  ReconTargets t{Tensor({1, 1}, {0.0}), Tensor({1, 1}, {1.0})};
  CHECK(loss_reconstruction(s, t, kEps) == doctest::Approx(2.0).epsilon(1e-12));

  Rng rng(8);
  const auto r = random_states(rng, 4, 5);
  CHECK(loss_reconstruction(r, ReconTargets::from_states(r, kEps), kEps) == 0.0);

  ReconTargets wrong{Tensor({2, 1}), Tensor({2, 1})};
  CHECK_THROWS_AS(loss_reconstruction(s, wrong, kEps), DimensionError);
}

TEST_CASE("kl: closed-form values") {
  const auto standard = states_from(1, 3, {0, 0, 0}, {1, 1, 1});
  CHECK(std::abs(loss_kl(standard, kEps)) < 1e-12);
  const auto shifted = states_from(1, 2, {1, 0}, {1, 1});
  CHECK(loss_kl(shifted, kEps) == doctest::Approx(0.5).epsilon(1e-12));
  // Node average: two nodes at 0.5 and 0 give 0.25.
  const auto pair = states_from(2, 2, {1, 0, 0, 0}, {1, 1, 1, 1});
  CHECK(loss_kl(pair, kEps) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("kl: agrees with the log-sigma form and is non-negative") {
  Rng rng(12);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto s = random_states(rng, 1 + rng.below(4), 1 + rng.below(6));
    const double kl = loss_kl(s, kEps);
    CHECK(kl >= -1e-12);
    double ref = 0.0;
    for (std::size_t i = 0; i < s.mu.size(); ++i) {
      const double var = std::log1p(std::exp(s.sigma_raw[i])) + kEps;
      const double sigma = std::sqrt(var);
      ref += -std::log(sigma) + (var + s.mu[i] * s.mu[i]) / 2.0 - 0.5;
    }
    ref /= static_cast<double>(s.count());
    CHECK(std::abs(kl - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("loss_total weights the three terms") {
  CHECK(loss_total(1, 2, 3, {1, 1, 1}) == 6.0);
  CHECK(loss_total(1, 2, 3, {}) == doctest::Approx(1.0 + 0.2 + 0.03));
  LossWeights bad{-1, 0, 0};
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  LossWeights none{0, 0, 0};
  CHECK_THROWS_AS(none.validate(), ValidationError);
}

TEST_CASE("loss gradients match central differences") {
  Rng rng(21);
  const std::size_t n = 3, d = 4;
  auto s = random_states(rng, n, d);
  const auto t = ReconTargets::from_states(random_states(rng, n, d), kEps);
  Tensor dmu({n, d}), dsig({n, d});
  loss_reconstruction_grad(s, t, kEps, 1.0, dmu, dsig);
  Tensor kmu({n, d}), ksig({n, d});
  loss_kl_grad(s, kEps, 1.0, kmu, ksig);

  const double h = 1e-6;
  auto central = [&](double& x, auto f) {
    const double keep = x;
    x = keep + h;
    const double up = f();
    x = keep - h;
    const double down = f();
    x = keep;
    return (up - down) / (2 * h);
  };
  auto rec = [&] { return loss_reconstruction(s, t, kEps); };
  auto kl = [&] { return loss_kl(s, kEps); };
  for (std::size_t i = 0; i < n * d; ++i) {
    CHECK(dmu[i] == doctest::Approx(central(s.mu[i], rec)).epsilon(1e-6));
    CHECK(dsig[i] == doctest::Approx(central(s.sigma_raw[i], rec)).epsilon(1e-6));
    CHECK(kmu[i] == doctest::Approx(central(s.mu[i], kl)).epsilon(1e-6));
    CHECK(ksig[i] == doctest::Approx(central(s.sigma_raw[i], kl)).epsilon(1e-6));
  }
}
