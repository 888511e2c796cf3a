// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

// Serial vs OpenMP timing of one epoch's gradient accumulation and of
// evaluation on random instances at the default model size.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "CLI11.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vmhan/parallel.hpp"
#include "vmhan/probe.hpp"
#include "vmhan/trainer.hpp"

using namespace vmhan;

namespace {

struct Timing {
  double seconds;
  double checksum;
};

template <typename F>
Timing best_of(int repeats, F&& f) {
  Timing best{1e300, 0.0};
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const double sum = f();
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (s < best.seconds) best = {s, sum};
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vmhan serial vs OpenMP benchmark"};
  std::size_t instances = 64;
  std::size_t batch = 16;
  int threads = 0;
  int repeats = 3;
  app.add_option("--instances", instances, "random instances");
  app.add_option("--batch", batch, "instances per gradient batch");
  app.add_option("--threads", threads, "OpenMP workers (0: all available)");
  app.add_option("--repeats", repeats, "timed repetitions, best is kept");
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads <= 0) threads = omp_get_max_threads();
#else
  threads = 1;
#endif

  ModelConfig config;
  config.relations = RelationVocabulary({"a", "b", "c", "d", "e"});
  const VmHanModel model(config, 1);
  Rng rng(2);
  Dataset data;
  for (std::size_t i = 0; i < instances; ++i) {
    data.push_back({"b" + std::to_string(i),
                    random_hypergraph(rng, 3, config.encoder.text_dim,
                                      config.encoder.visual_dim),
                    static_cast<std::size_t>(rng.below(config.relations.size()))});
  }

  std::vector<GradientBuffer> buffers(batch, GradientBuffer(model.params()));
  std::vector<double> losses(batch);
  auto epoch_gradients = [&](int t) {
    double sum = 0.0;
    for (std::size_t start = 0; start < data.size(); start += batch) {
      const std::size_t count = std::min(batch, data.size() - start);
      parallel_for(count, t, [&](std::size_t b) {
        buffers[b].zero();
        losses[b] = model
                        .loss_and_gradient(data[start + b].graph, data[start + b].label,
                                           LossWeights{}, Mode::Eval, nullptr, buffers[b])
                        .total;
      });
      for (std::size_t b = 0; b < count; ++b) sum += losses[b] + buffers[b][0][0];
    }
    return sum;
  };
  auto evaluation = [&](int t) { return evaluate(model, data, t).accuracy; };

  std::printf("instances %zu, batch %zu, d %zu, text %zu, visual %zu, threads %d\n",
              instances, batch, config.encoder.d, config.encoder.text_dim,
              config.encoder.visual_dim, threads);
  std::printf("%-12s %12s %12s %9s %s\n", "phase", "serial s", "openmp s", "speedup",
              "results");
  for (const auto& [name, fn] :
       std::vector<std::pair<const char*, std::function<double(int)>>>{
           {"gradients", epoch_gradients}, {"evaluate", evaluation}}) {
    const Timing serial = best_of(repeats, [&] { return fn(1); });
    const Timing parallel = best_of(repeats, [&] { return fn(threads); });
    std::printf("%-12s %12.4f %12.4f %8.2fx %s\n", name, serial.seconds, parallel.seconds,
                serial.seconds / parallel.seconds,
                serial.checksum == parallel.checksum ? "identical" : "DIFFER");
  }
  return 0;
}
