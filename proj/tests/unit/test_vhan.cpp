// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fixtures.hpp"
#include "naive_vmhan.hpp"
#include "vmhan/error.hpp"
#include "vmhan/model.hpp"
#include "vmhan/probe.hpp"
#include "vmhan/vhan.hpp"

using namespace vmhan;

namespace {

double max_abs_diff(const Tensor& t, const naive::Mat& m) {
  double worst = 0.0;
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < m[r].size(); ++c) {
      worst = std::max(worst, std::abs(t(r, c) - m[r][c]));
    }
  }
  return worst;
}

MultiModalHypergraph with_objects_permuted(const MultiModalHypergraph& g,
                                           const std::vector<std::size_t>& perm) {
  std::vector<Feature> objects;
  for (std::size_t p : perm) objects.push_back(g.node(3 + p).feature);
  return build_hypergraph(g.node(0).feature, g.node(1).feature,
                          g.node(2).feature, objects);
}

}  // namespace

TEST_CASE("vhan config validation") {
  VhanConfig c;
  CHECK_NOTHROW(c.validate());
  c.heads = 3;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = VhanConfig{};
  c.layers = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = VhanConfig{};
  c.dropout = 1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("vhan: zero layer maps add exactly one half per layer") {
  for (std::size_t layers : {1u, 2u, 3u}) {
    const auto config = fixtures::small_config(8, layers);
    VmHanModel model(config, 5);
    for (const auto& ls : model.slots().layers) {
      for (std::size_t s : {ls.w_e_mu, ls.w_e_sigma, ls.w_x_mu, ls.w_x_sigma}) {
        model.params()[s].value.fill(0.0);
      }
    }
    Rng rng(9);
    const auto g = random_hypergraph(rng, 3, 12, 20);
    const auto trace = forward_trace(g, model.params(), model.slots(),
                                     config.encoder, Mode::Eval, nullptr);
    const double shift = 0.5 * static_cast<double>(layers);
    const auto& a = trace.initial();
    const auto& b = trace.final();
    for (std::size_t i = 0; i < a.nodes.mu.size(); ++i) {
      CHECK(b.nodes.mu[i] - a.nodes.mu[i] == doctest::Approx(shift).epsilon(1e-12));
      CHECK(b.nodes.sigma_raw[i] - a.nodes.sigma_raw[i] ==
            doctest::Approx(shift).epsilon(1e-12));
    }
    for (std::size_t i = 0; i < a.edges.mu.size(); ++i) {
      CHECK(b.edges.mu[i] - a.edges.mu[i] == doctest::Approx(shift).epsilon(1e-12));
    }
  }
}

TEST_CASE("vhan: layer-0 hyperedges are member means") {
  const auto config = fixtures::small_config();
  VmHanModel model(config, 2);
  Rng rng(3);
  const auto g = random_hypergraph(rng, 2, 12, 20);
  const auto s = variational_init(g, model.params(), model.slots(), config.encoder);
  for (std::size_t j = 0; j < g.edge_count(); ++j) {
    const auto& members = g.edge(j).members;
    for (std::size_t c = 0; c < config.encoder.d; ++c) {
      double mu = 0.0, sig = 0.0;
      for (std::size_t i : members) {
        mu += s.nodes.mu(i, c);
        sig += s.nodes.sigma_raw(i, c);
      }
      CHECK(s.edges.mu(j, c) == doctest::Approx(mu / members.size()).epsilon(1e-12));
      CHECK(s.edges.sigma_raw(j, c) ==
            doctest::Approx(sig / members.size()).epsilon(1e-12));
    }
  }
}

TEST_CASE("vhan: attention columns sum to one on random graphs") {
  for (std::size_t heads : {1u, 4u}) {
    const auto config = fixtures::small_config(8, 2, heads);
    VmHanModel model(config, 17);
    Rng rng(100 + heads);
    for (int trial = 0; trial < 50; ++trial) {
      const auto g = random_hypergraph(rng, rng.below(5), 12, 20);
      const auto trace = forward_trace(g, model.params(), model.slots(),
                                       config.encoder, Mode::Eval, nullptr);
      const std::size_t n = g.node_count(), m = g.edge_count();
      for (const auto& c : trace.caches) {
        for (std::size_t h = 0; h < heads; ++h) {
          for (std::size_t j = 0; j < m; ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) sum += c.alpha[(j * n + i) * heads + h];
            CHECK(std::abs(sum - 1.0) < 1e-9);
          }
          for (std::size_t i = 0; i < n; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < m; ++j) sum += c.beta[(j * n + i) * heads + h];
            CHECK(std::abs(sum - 1.0) < 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("edge_attention: a singleton edge puts all weight on its member") {
  const auto config = fixtures::small_config();
  VmHanModel model(config, 1);
  Rng rng(2);
  const auto g = random_hypergraph(rng, 0, 12, 20);
  const auto s = variational_init(g, model.params(), model.slots(), config.encoder);
  const auto& ls = model.slots().layers[0];
  const Hyperedge visual = g.edge(2);
  REQUIRE(visual.members.size() == 1);
  const auto a = edge_attention(visual, s.nodes.mu, s.edges.mu.row(2),
                                model.params()[ls.w_x].value,
                                model.params()[ls.w_e].value, 1);
  REQUIRE(a.size() == 1);
  CHECK(a[0] == 1.0);
  CHECK_THROWS_AS(edge_attention({HyperedgeKind::Global, {}}, s.nodes.mu,
                                 s.edges.mu.row(0), model.params()[ls.w_x].value,
                                 model.params()[ls.w_e].value, 1),
                  InvalidHyperedgeError);
}

TEST_CASE("vhan: effective variances stay positive through four layers") {
  const auto config = fixtures::small_config(8, 4);
  VmHanModel model(config, 23);
  Rng rng(24);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = random_hypergraph(rng, rng.below(4), 12, 20);
    const auto trace = forward_trace(g, model.params(), model.slots(),
                                     config.encoder, Mode::Eval, nullptr);
    for (const auto& st : trace.states) {
      for (double v : effective_variance(st.nodes.sigma_raw.values(), 1e-6)) {
        CHECK(v > 0.0);
      }
      for (double v : effective_variance(st.edges.sigma_raw.values(), 1e-6)) {
        CHECK(v > 0.0);
      }
    }
  }
}

TEST_CASE("readout concatenates means and effective variances") {
  const double r1 = fixtures::raw_for_variance(1.0);
  const double r2 = fixtures::raw_for_variance(2.0);
  const std::vector<double> hm{1, 2}, hs{r1, r1}, tm{3, 4}, ts{r2, r2};
  const auto out = readout(hm, hs, tm, ts, 1e-6);
  const std::vector<double> expected{1, 2, 1, 1, 3, 4, 2, 2};
  REQUIRE(out.size() == expected.size());
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(std::abs(out[i] - expected[i]) < 1e-12);
  const std::vector<double> short_tail{3};
  CHECK_THROWS_AS(readout(hm, hs, short_tail, short_tail, 1e-6), DimensionError);
}

TEST_CASE("vhan: feature of the wrong width is a dimension error") {
  const auto config = fixtures::small_config();
  VmHanModel model(config, 1);
  Rng rng(5);
  const auto g = random_hypergraph(rng, 1, 11, 20);
  CHECK_THROWS_AS(model.predict(g), DimensionError);
}

TEST_CASE("vhan: huge weights surface as a numeric error naming the layer") {
  const auto config = fixtures::small_config(8, 2);
  VmHanModel model(config, 1);
  for (auto& p : model.params().params()) {
    if (p.name.rfind("layer", 0) == 0) p.value.fill(1e300);
  }
  Rng rng(6);
  const auto g = random_hypergraph(rng, 2, 12, 20);
  try {
    forward(g, model.params(), model.slots(), config.encoder, Mode::Eval);
    FAIL("expected a NumericInstabilityError");
  } catch (const NumericInstabilityError& e) {
    CHECK(std::string(e.what()).find("layer ") != std::string::npos);
  }
}

TEST_CASE("vhan: library matches the loop reference") {
  int cases = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    for (std::size_t heads : {1u, 2u}) {
      const std::size_t layers = 1 + seed % 2;
      const auto config = fixtures::small_config(8, layers, heads);
      VmHanModel model(config, seed);
      Rng rng(seed * 31);
      const auto g = random_hypergraph(rng, seed % 5, 12, 20);
      const std::size_t gold = seed % config.relations.size();

      const auto trace = forward_trace(g, model.params(), model.slots(),
                                       config.encoder, Mode::Eval, nullptr);
      const auto lib = model.loss(g, gold, LossWeights{});
      const auto ref = naive::run(g, model.params(), {8, layers, heads, 1e-6}, gold);

      CHECK(max_abs_diff(trace.initial().nodes.mu, ref.initial.node_mu) < 1e-9);
      CHECK(max_abs_diff(trace.final().nodes.mu, ref.final.node_mu) < 1e-9);
      CHECK(max_abs_diff(trace.final().nodes.sigma_raw, ref.final.node_sigma) < 1e-9);
      CHECK(max_abs_diff(trace.final().edges.mu, ref.final.edge_mu) < 1e-9);
      CHECK(max_abs_diff(trace.final().edges.sigma_raw, ref.final.edge_sigma) < 1e-9);
      const std::size_t n = g.node_count();
      for (std::size_t l = 0; l < layers; ++l) {
        for (std::size_t j = 0; j < g.edge_count(); ++j) {
          const auto& members = g.edge(j).members;
          for (std::size_t p = 0; p < members.size(); ++p) {
            for (std::size_t h = 0; h < heads; ++h) {
              CHECK(std::abs(trace.caches[l].alpha[(j * n + members[p]) * heads + h] -
                             ref.alpha[l][j][p * heads + h]) < 1e-9);
            }
          }
        }
      }
      for (std::size_t r = 0; r < lib.probs.size(); ++r) {
        CHECK(std::abs(lib.probs[r] - ref.probs[r]) < 1e-9);
      }
      CHECK(std::abs(lib.classification - ref.loss_c) < 1e-9);
      CHECK(std::abs(lib.reconstruction - ref.loss_rec) < 1e-9);
      CHECK(std::abs(lib.kl - ref.loss_kl) < 1e-9);
      ++cases;
    }
  }
  CHECK(cases == 16);
}

TEST_CASE("vhan: relabelling objects permutes their states only") {
  const auto config = fixtures::small_config(8, 2, 2);
  VmHanModel model(config, 77);
  Rng rng(78);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t k = 2 + rng.below(3);
    const auto g = random_hypergraph(rng, k, 12, 20);
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(std::span<std::size_t>(perm));
    const auto gp = with_objects_permuted(g, perm);

    const auto a = forward(g, model.params(), model.slots(), config.encoder, Mode::Eval);
    const auto b = forward(gp, model.params(), model.slots(), config.encoder, Mode::Eval);
    for (std::size_t c = 0; c < config.encoder.d; ++c) {
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(a.mu(i, c) - b.mu(i, c)) < 1e-12);
        CHECK(std::abs(a.sigma_raw(i, c) - b.sigma_raw(i, c)) < 1e-12);
      }
      for (std::size_t s = 0; s < k; ++s) {
        CHECK(std::abs(a.mu(3 + perm[s], c) - b.mu(3 + s, c)) < 1e-12);
      }
    }
  }
}

TEST_CASE("vhan: dropout only acts in training mode") {
  auto config = fixtures::small_config(8, 2);
  config.encoder.dropout = 0.5;
  VmHanModel model(config, 3);
  Rng g_rng(4);
  const auto g = random_hypergraph(g_rng, 2, 12, 20);
  Rng r1(1), r2(1), r3(2);
  const auto eval = forward(g, model.params(), model.slots(), config.encoder, Mode::Eval, &r1);
  const auto eval2 = forward(g, model.params(), model.slots(), config.encoder, Mode::Eval);
  CHECK(eval.mu == eval2.mu);
  const auto t1 = forward(g, model.params(), model.slots(), config.encoder, Mode::Train, &r2);
  Rng r2b(1);
  const auto t1b = forward(g, model.params(), model.slots(), config.encoder, Mode::Train, &r2b);
  const auto t2 = forward(g, model.params(), model.slots(), config.encoder, Mode::Train, &r3);
  CHECK(t1.mu == t1b.mu);
  CHECK(t1.mu != eval.mu);
  CHECK(t1.mu != t2.mu);
}

TEST_CASE("model gradient matches central differences") {
  for (std::uint64_t seed : {1u, 2u}) {
    for (std::size_t layers : {1u, 2u}) {
      for (std::size_t heads : {1u, 4u}) {
        ModelGradcheckCase c;
        c.seed = seed;
        c.layers = layers;
        c.heads = heads;
        c.k = seed == 1 ? 3 : 0;
        const auto report = gradcheck_model(c);
        INFO("seed " << seed << " layers " << layers << " heads " << heads
                     << " worst " << report.worst_param);
        CHECK(report.passed);
        CHECK(report.max_rel_error < 1e-4);
        CHECK(report.checked > 100);
      }
    }
  }
}
