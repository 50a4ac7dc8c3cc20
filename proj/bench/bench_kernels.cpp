// Copyright 2026 The mret Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial reference vs OpenMP kernels on representative inputs.

#include <benchmark/benchmark.h>

#include <vector>

#include "mret/reference.hpp"

using namespace mret;

namespace {

RangeImage noisy_image(Rng& rng, std::size_t rows, std::size_t cols) {
  std::vector<Return> cells(rows * cols);
  for (auto& c : cells)
    if (!rng.bernoulli(0.05)) c.range = rng.uniform(2.0, 40.0);
  return RangeImage(rows, cols, {-16.0, 0.5, 0.0, 360.0 / static_cast<double>(cols)},
                    std::move(cells));
}

const RangeImage& frame_64x1024() {
  static const RangeImage img = [] {
    Rng rng(1);
    return noisy_image(rng, 64, 1024);
  }();
  return img;
}

const FrameSequence& sequence_30() {
  static const FrameSequence seq = [] {
    Rng rng(2);
    std::vector<RangeImage> frames;
    for (int k = 0; k < 30; ++k) frames.push_back(noisy_image(rng, 64, 256));
    return FrameSequence(std::move(frames), 10.0);
  }();
  return seq;
}

SceneFile corner_scene() {
  auto f = preset_scene("corner", 3);
  f.beam->rows = 16;
  return f;
}

RegistrationConfig reg_config() {
  RegistrationConfig c;
  c.seed = 5;
  c.fraction = 0.1;
  c.gap = 0.1;
  c.noise_sigma = 0.01;
  return c;
}

void BM_MonitorSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(reference::scan_frame(frame_64x1024(), {}));
}
void BM_MonitorParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(scan_frame(frame_64x1024(), {}));
}

void BM_StatsMapSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(reference::temporal_stats_map(sequence_30()));
}
void BM_StatsMapParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(temporal_stats_map(sequence_30()));
}

void BM_CompensateSerial(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(reference::compensate(sequence_30(), {32, 100}));
}
void BM_CompensateParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(compensate(sequence_30(), {32, 100}));
}

void BM_SimulateSerial(benchmark::State& st) {
  const auto f = corner_scene();
  for (auto _ : st) benchmark::DoNotOptimize(reference::simulate_sequence(f.scene, *f.beam, 2));
}
void BM_SimulateParallel(benchmark::State& st) {
  const auto f = corner_scene();
  for (auto _ : st) benchmark::DoNotOptimize(simulate_sequence(f.scene, *f.beam, 2));
}

void BM_RegistrationSerial(benchmark::State& st) {
  const auto algo = st.range(0) == 0 ? Algorithm::icp : Algorithm::ndt;
  for (auto _ : st) benchmark::DoNotOptimize(reference::run_trials(reg_config(), algo, 16));
}
void BM_RegistrationParallel(benchmark::State& st) {
  const auto algo = st.range(0) == 0 ? Algorithm::icp : Algorithm::ndt;
  for (auto _ : st) benchmark::DoNotOptimize(run_trials(reg_config(), algo, 16));
}

}  // namespace

BENCHMARK(BM_MonitorSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonitorParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_StatsMapSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StatsMapParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CompensateSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CompensateParallel)->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_SimulateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RegistrationSerial)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegistrationParallel)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
