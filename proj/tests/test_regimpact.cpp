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

#include <cmath>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "mret/errors.hpp"
#include "mret/regimpact.hpp"
#include "mret/rng.hpp"

using namespace mret;

namespace {

RegistrationConfig clean_config(std::uint64_t seed = 1) {
  RegistrationConfig c;
  c.seed = seed;
  return c;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double standard_error(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::vector<double> biases(const RegistrationConfig& cfg, Algorithm algo, std::size_t trials) {
  std::vector<double> out;
  for (const auto& r : run_trials(cfg, algo, trials))
    out.push_back(r.bias_along(injection_direction()));
  return out;
}

}  // namespace

TEST_CASE("rigid transform algebra") {
  const Rigid2 a{0.3, {1.0, -2.0}};
  const Rigid2 b{-1.1, {0.5, 0.25}};
  const Vec2 p{0.7, 3.0};
  CHECK((a.inverse().apply(a.apply(p)) - p).norm() < 1e-12);
  CHECK((a.compose(b).apply(p) - a.apply(b.apply(p))).norm() < 1e-12);
  const auto id = a.compose(a.inverse());
  CHECK(std::abs(id.angle) < 1e-12);
  CHECK(id.translation.norm() < 1e-12);
}

TEST_CASE("Procrustes recovers a known transform from exact pairs") {
  Rng rng(3);
  Cloud from;
  for (int i = 0; i < 20; ++i) from.emplace_back(rng.uniform(-5, 5), rng.uniform(-5, 5));
  const Rigid2 t{0.2, {0.4, -0.1}};
  const auto est = procrustes(from, transform(from, t));
  CHECK(est.angle == doctest::Approx(0.2).epsilon(1e-12));
  CHECK((est.translation - t.translation).norm() < 1e-12);
}

TEST_CASE("zero gap without noise gives congruent clouds") {
  auto cfg = clean_config();
  cfg.fraction = 0.2;
  const auto e = make_experiment(cfg, 0);
  REQUIRE(e.current.size() == e.reference.size());
  const auto moved = transform(e.current, e.truth);
  for (std::size_t i = 0; i < moved.size(); ++i)
    CHECK((moved[i] - e.reference[i]).norm() < 1e-12);
}

TEST_CASE("map reference carries both clusters") {
  auto cfg = clean_config();
  cfg.fraction = 0.2;
  cfg.gap = 0.1;
  const auto scan = make_experiment(cfg, 2);
  cfg.reference = ReferenceKind::map;
  const auto map = make_experiment(cfg, 2);
  CHECK(map.multi_return_rays > 0);
  CHECK(map.reference.size() == scan.reference.size() + map.multi_return_rays);
  CHECK(map.current.size() == scan.current.size());
}

TEST_CASE("experiments are reproducible per seed and trial") {
  auto cfg = clean_config(9);
  cfg.fraction = 0.1;
  cfg.gap = 0.1;
  cfg.noise_sigma = 0.01;
  const auto a = make_experiment(cfg, 4);
  const auto b = make_experiment(cfg, 4);
  CHECK(a.current == b.current);
  CHECK(a.reference == b.reference);
  CHECK(a.truth.angle == b.truth.angle);
  CHECK_FALSE(make_experiment(cfg, 5).current == a.current);
}

TEST_CASE("ICP on identical clouds is the identity") {
  const auto e = make_experiment(clean_config(), 0);
  const auto r = run_icp(e.reference, e.reference, {});
  CHECK(std::abs(r.estimate.angle) < 1e-9);
  CHECK(r.estimate.translation.norm() < 1e-9);
}

TEST_CASE("ICP recovers a pure translation") {
  const auto e = make_experiment(clean_config(), 0);
  const Rigid2 truth{0.0, {0.1, 0.0}};
  const auto current = transform(e.reference, truth.inverse());
  const auto r = run_icp(current, e.reference, {}, truth);
  CHECK((r.estimate.translation - Vec2(0.1, 0.0)).norm() < 1e-6);
  CHECK(r.translation_error < 1e-6);
}

TEST_CASE("ICP matched-pair RMS is non-increasing") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto cfg = clean_config(seed);
    cfg.noise_sigma = 0.01;
    cfg.fraction = 0.1;
    cfg.gap = 0.1;
    const auto e = make_experiment(cfg, 0);
    const auto r = run_icp(e.current, e.reference, cfg.icp, e.truth);
    REQUIRE(r.trace.size() >= 2);
    for (std::size_t i = 1; i < r.trace.size(); ++i)
      CHECK(r.trace[i].rms <= r.trace[i - 1].rms + 1e-12);
  }
}

TEST_CASE("registrars report degenerate inputs") {
  const Cloud a{{0, 0}, {1, 0}};
  const Cloud b{{100, 100}, {101, 100}};
  try {
    run_icp(a, b, {});
    FAIL("expected degenerate");
  } catch (const DataError& e) {
    CHECK(e.kind() == DataErrorKind::degenerate);
  }
  try {
    run_ndt_lite(a, b, {});
    FAIL("expected degenerate");
  } catch (const DataError& e) {
    CHECK(e.kind() == DataErrorKind::degenerate);
  }
}

TEST_CASE("NDT-lite on identical clouds is the identity") {
  const auto e = make_experiment(clean_config(), 0);
  const auto r = run_ndt_lite(e.reference, e.reference, {});
  CHECK(std::abs(r.estimate.angle) < 1e-9);
  CHECK(r.estimate.translation.norm() < 1e-9);
}

TEST_CASE("clean registration is exact") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto cfg = clean_config(seed);
    CHECK(run_trials(cfg, Algorithm::icp, 1)[0].translation_error < 1e-6);
    CHECK(run_trials(cfg, Algorithm::ndt, 1)[0].translation_error < 1e-6);
  }
}

TEST_CASE("without injection the gap has no effect") {
  auto cfg = clean_config(4);
  cfg.noise_sigma = 0.01;
  for (auto algo : {Algorithm::icp, Algorithm::ndt}) {
    cfg.gap = 0.0;
    const auto a = biases(cfg, algo, 5);
    cfg.gap = 0.2;
    const auto b = biases(cfg, algo, 5);
    CHECK(a == b);
  }
}

TEST_CASE("small-gap injection biases along the injected direction") {
  auto cfg = clean_config(1);
  cfg.fraction = 0.2;
  cfg.gap = 0.2;
  for (auto algo : {Algorithm::icp, Algorithm::ndt}) {
    const auto b = biases(cfg, algo, 60);
    const double expected = cfg.fraction * cfg.gap / 2;
    CHECK(std::abs(mean(b) - expected) <= 4 * standard_error(b));
  }
}

TEST_CASE("large-gap bias stays under the association bounds") {
  auto cfg = clean_config(2);
  cfg.fraction = 0.2;
  cfg.gap = 3.0;
  for (const auto& r : run_trials(cfg, Algorithm::icp, 20))
    CHECK(r.translation_error <= cfg.fraction * cfg.icp.max_radius);
  for (const auto& r : run_trials(cfg, Algorithm::ndt, 20))
    CHECK(r.translation_error <= cfg.fraction * cfg.ndt.voxel_size * std::sqrt(2.0) / 2);
}

TEST_CASE("bias report shape and determinism") {
  SweepConfig sweep;
  sweep.gaps = {0.0, 0.1};
  sweep.trials = 3;
  sweep.base.seed = 5;
  const auto rows = bias_report(sweep);
  CHECK(rows.size() == 2 * 2 * 2);
  for (const auto& r : rows) {
    CHECK(r.trials == 3);
    CHECK(r.mean_bias >= 0.0);
    CHECK(r.max_bias >= r.mean_bias);
  }
  CHECK(rows[0].mean_bias < 1e-6);
  const auto csv = bias_report_csv(rows);
  CHECK(csv.rfind("delta,algorithm,reference,mean_bias,std_bias,max_bias,trials\n", 0) == 0);
  CHECK(bias_report_csv(bias_report(sweep)) == csv);
}

TEST_CASE("sweep JSON round trip and errors") {
  SweepConfig sweep;
  sweep.gaps = {0.05, 3.0};
  sweep.algorithms = {Algorithm::ndt};
  sweep.references = {ReferenceKind::map};
  sweep.trials = 7;
  sweep.base.seed = 11;
  sweep.base.icp.max_radius = 0.4;
  const auto text = sweep_to_json(sweep);
  const auto back = parse_sweep_json(text);
  CHECK(back.gaps == sweep.gaps);
  CHECK(back.trials == 7);
  CHECK(back.base.seed == 11);
  CHECK(back.base.icp.max_radius == 0.4);
  CHECK(sweep_to_json(back) == text);
  CHECK_THROWS_AS(parse_sweep_json("{\"algorithms\":[\"loam\"]}"), ParseError);
  CHECK_THROWS_AS(parse_sweep_json("[1,"), ParseError);
}

TEST_CASE("configuration validation") {
  auto c = clean_config();
  CHECK_NOTHROW(c.validate());
  c.gap = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = clean_config();
  c.icp.max_radius = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = clean_config();
  c.ndt.voxel_size = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = clean_config();
  c.fraction = 1.5;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
