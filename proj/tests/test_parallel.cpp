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

#include <doctest.h>

#include <omp.h>

#include <vector>

#include "mret/reference.hpp"
#include "support.hpp"

using namespace mret;
using mret::test::random_image;
using mret::test::sequence_of;

namespace {

const std::vector<int> kThreadCounts{1, 2, 3, 8};

struct ThreadGuard {
  int saved = omp_get_max_threads();
  ~ThreadGuard() { omp_set_num_threads(saved); }
};

bool same_stats(const std::optional<CdfStats>& a, const std::optional<CdfStats>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->count == b->count && a->total == b->total && a->mean == b->mean &&
         a->std == b->std && a->min == b->min && a->max == b->max && a->span == b->span;
}

bool same_result(const RegistrationResult& a, const RegistrationResult& b) {
  return a.estimate.angle == b.estimate.angle && a.estimate.translation == b.estimate.translation &&
         a.translation_error == b.translation_error && a.trace.size() == b.trace.size();
}

}  // namespace

TEST_CASE("monitor scan matches the serial reference") {
  ThreadGuard guard;
  Rng rng(1);
  const auto img = random_image(rng, 24, 90, 0.15, 8.0, 9.0);
  const auto serial = reference::scan_frame(img, {});
  for (int t : kThreadCounts) {
    omp_set_num_threads(t);
    CHECK(scan_frame(img, {}) == serial);
  }
}

TEST_CASE("simulation matches the serial reference") {
  ThreadGuard guard;
  auto f = preset_scene("foliage", 3);
  f.beam->rows = 6;
  f.beam->cols = 40;
  f.beam->calibration.az_start = 16.0;
  const auto serial = reference::simulate_sequence(f.scene, *f.beam, 4);
  for (int t : kThreadCounts) {
    omp_set_num_threads(t);
    const auto par = simulate_sequence(f.scene, *f.beam, 4);
    CHECK(par.frames == serial.frames);
    CHECK(par.labels == serial.labels);
  }
}

TEST_CASE("compensation matches the exhaustive serial search") {
  ThreadGuard guard;
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<RangeImage> frames;
    for (int k = 0; k < 8; ++k) frames.push_back(random_image(rng, 9, 20, 0.2, 5.0, 7.0));
    const auto seq = sequence_of(std::move(frames));
    const RaypathId anchor{static_cast<std::size_t>(rng.uniform() * 9),
                           static_cast<std::size_t>(rng.uniform() * 20)};
    const auto serial = reference::compensate(seq, anchor);
    for (int t : kThreadCounts) {
      omp_set_num_threads(t);
      const auto par = compensate(seq, anchor);
      CHECK(par.cdf == serial.cdf);
      CHECK(par.trace == serial.trace);
    }
  }
}

TEST_CASE("temporal stats map matches the serial reference") {
  ThreadGuard guard;
  Rng rng(3);
  std::vector<RangeImage> frames;
  for (int k = 0; k < 10; ++k) frames.push_back(random_image(rng, 12, 30, 0.5));
  const auto seq = sequence_of(std::move(frames));
  const auto serial = reference::temporal_stats_map(seq);
  for (int t : kThreadCounts) {
    omp_set_num_threads(t);
    const auto par = temporal_stats_map(seq);
    REQUIRE(par.size() == serial.size());
    for (std::size_t p = 0; p < par.size(); ++p) CHECK(same_stats(par[p], serial[p]));
  }
}

TEST_CASE("registration trials match the serial reference") {
  ThreadGuard guard;
  RegistrationConfig cfg;
  cfg.seed = 4;
  cfg.fraction = 0.1;
  cfg.gap = 0.1;
  cfg.noise_sigma = 0.01;
  for (auto algo : {Algorithm::icp, Algorithm::ndt}) {
    const auto serial = reference::run_trials(cfg, algo, 6);
    for (int t : kThreadCounts) {
      omp_set_num_threads(t);
      const auto par = run_trials(cfg, algo, 6);
      REQUIRE(par.size() == serial.size());
      for (std::size_t i = 0; i < par.size(); ++i) CHECK(same_result(par[i], serial[i]));
    }
  }
}
