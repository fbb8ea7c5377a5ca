#include <benchmark/benchmark.h>

#include "patchprior/denoise.hpp"
#include "patchprior/em_train.hpp"
#include "patchprior/synthetic.hpp"

namespace pp = patchprior;

namespace {

pp::Gmm trained_prior(std::size_t k) {
  const auto img = pp::textured_image(96, 96, 11, 0.3);
  pp::EmConfig config;
  config.components = k;
  config.max_iters = 10;
  return pp::em_fit(pp::extract_patches(img, 8, 1), config).model;
}

void BM_Denoise(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const pp::Gmm prior = trained_prior(static_cast<std::size_t>(state.range(1)));
  const auto noisy = pp::add_gaussian_noise(pp::textured_image(side, side, 5, 1.1), 20.0, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pp::denoise(noisy, 20.0, prior, pp::default_schedule(20.0)).image);
  }
}

void BM_Responsibilities(benchmark::State& state) {
  const pp::Gmm prior = trained_prior(static_cast<std::size_t>(state.range(0)));
  const auto patches = pp::extract_patches(pp::textured_image(64, 64, 5, 1.1), 8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(pp::responsibilities(prior, patches).gamma);
}

}  // namespace

BENCHMARK(BM_Denoise)->Args({64, 10})->Args({64, 20})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Responsibilities)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
