// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <stdexcept>

#include "doctest.h"
#include "fixtures.hpp"
#include "vmhan/parallel.hpp"
#include "vmhan/probe.hpp"
#include "vmhan/trainer.hpp"

using namespace vmhan;

namespace {

Dataset random_dataset(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  Dataset data;
  for (std::size_t i = 0; i < count; ++i) {
    data.push_back({"p" + std::to_string(i), random_hypergraph(rng, i % 4, 12, 20),
                    static_cast<std::size_t>(rng.below(4))});
  }
  return data;
}

}  // namespace

TEST_CASE("configured_threads reads VMHAN_THREADS") {
  const char* saved = std::getenv("VMHAN_THREADS");
  const std::string keep = saved ? saved : "";
  ::unsetenv("VMHAN_THREADS");
  CHECK(configured_threads() == 1);
  ::setenv("VMHAN_THREADS", "3", 1);
  CHECK(configured_threads() == 3);
  ::setenv("VMHAN_THREADS", "0", 1);
  CHECK(configured_threads() == 1);
  ::setenv("VMHAN_THREADS", "lots", 1);
  CHECK(configured_threads() == 1);
  if (saved) {
    ::setenv("VMHAN_THREADS", keep.c_str(), 1);
  } else {
    ::unsetenv("VMHAN_THREADS");
  }
}

TEST_CASE("parallel_for visits every index and rethrows the lowest failure") {
  for (int threads : {1, 4}) {
    std::vector<int> hits(100, 0);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 100);
    try {
      parallel_for(50, threads, [](std::size_t i) {
        if (i == 17 || i == 40) throw std::runtime_error(std::to_string(i));
      });
      FAIL("expected a throw");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "17");
    }
  }
}

TEST_CASE("threaded training and evaluation are bit-identical to serial") {
  const auto config = fixtures::small_config(8, 2, 2, 3);
  const auto data = random_dataset(40, 11);
  const auto val = random_dataset(12, 12);
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 8;
  tc.threads = 1;
  const auto serial = train(config, data, val, tc);
  tc.threads = 4;
  const auto threaded = train(config, data, val, tc);
  REQUIRE(serial.history.size() == threaded.history.size());
  for (std::size_t e = 0; e < serial.history.size(); ++e) {
    CHECK(to_json_line(serial.history[e]) == to_json_line(threaded.history[e]));
  }
  for (std::size_t s = 0; s < serial.model.params().size(); ++s) {
    CHECK(serial.model.params()[s].value == threaded.model.params()[s].value);
  }
  const auto p1 = predict_all(serial.model, val, 1);
  const auto p4 = predict_all(serial.model, val, 4);
  for (std::size_t i = 0; i < val.size(); ++i) {
    CHECK(p1[i].label == p4[i].label);
    CHECK(p1[i].probability == p4[i].probability);
  }
}
