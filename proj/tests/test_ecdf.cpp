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

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <vector>

#include "mret/ecdf.hpp"
#include "mret/errors.hpp"
#include "support.hpp"

using namespace mret;
using mret::test::image_of;
using mret::test::random_image;
using mret::test::sequence_of;

namespace {

double brute_eval(const std::vector<double>& samples, std::size_t n, double x) {
  std::size_t c = 0;
  for (double d : samples) c += static_cast<std::size_t>(step(x - d));
  return static_cast<double>(c) / static_cast<double>(n);
}

// Sup over a dense probe set of both sides of every jump.
double brute_ks(const EmpiricalCdf& a, const EmpiricalCdf& b) {
  std::vector<double> xs(a.samples().begin(), a.samples().end());
  xs.insert(xs.end(), b.samples().begin(), b.samples().end());
  double best = 0.0;
  for (double x : xs)
    for (double p : {x, std::nextafter(x, -INFINITY)})
      best = std::max(best, std::abs(a.eval(p) - b.eval(p)));
  return best;
}

}  // namespace

TEST_CASE("eval boundary behavior") {
  const EmpiricalCdf cdf({3.0, 1.0, 2.0}, 4);
  CHECK(cdf.eval(0.5) == 0.0);
  CHECK(cdf.eval(1.0) == 0.25);
  CHECK(cdf.eval_below(1.0) == 0.0);
  CHECK(cdf.eval(2.5) == 0.5);
  CHECK(cdf.eval(100.0) == 0.75);
  CHECK(cdf.return_fraction() == 0.75);
}

TEST_CASE("eval matches the step-sum definition exactly") {
  Rng rng(3);
  for (int t = 0; t < 30; ++t) {
    const auto n = 1 + static_cast<std::size_t>(rng.uniform() * 2000);
    std::vector<double> samples;
    for (std::size_t i = 0; i < n; ++i)
      if (!rng.bernoulli(0.2)) samples.push_back(std::round(rng.uniform(0, 20) * 100) / 100);
    const EmpiricalCdf cdf(samples, n);
    double prev = 0.0;
    for (int p = 0; p < 100; ++p) {
      const double x = -1.0 + 0.22 * p;
      const double v = cdf.eval(x);
      CHECK(v == brute_eval(samples, n, x));
      CHECK(v >= prev);
      prev = v;
    }
    for (double s : samples) CHECK(cdf.eval(s) == brute_eval(samples, n, s));
  }
}

TEST_CASE("temporal CDF counts non-returns in N") {
  const auto seq = sequence_of({image_of(1, 1, {5.0}), image_of(1, 1, {kNoReturn}),
                                image_of(1, 1, {6.0}), image_of(1, 1, {kNoReturn})});
  const auto cdf = temporal_cdf(seq, {0, 0});
  CHECK(cdf.total_count() == 4);
  CHECK(cdf.sample_count() == 2);
  CHECK(cdf.eval(1e9) == 0.5);
  CHECK(cdf.source().kind == CdfSource::Kind::temporal);
  CHECK_THROWS_AS(temporal_cdf(seq, {1, 0}), std::out_of_range);
}

TEST_CASE("one-frame temporal CDF equals the 1x1 spatial CDF") {
  Rng rng(9);
  const auto img = random_image(rng, 4, 6, 0.3);
  const auto seq = sequence_of({img});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      const auto t = temporal_cdf(seq, {i, j});
      const auto s = spatial_cdf(img, {i, j}, NeighborhoodSpec{});
      CHECK(std::equal(t.samples().begin(), t.samples().end(), s.samples().begin(),
                       s.samples().end()));
      CHECK(t.total_count() == s.total_count());
    }
}

TEST_CASE("spatial CDF over a truncated patch uses only existing rows") {
  const auto img = image_of(3, 3, {1, 2, 3, 4, 5, kNoReturn, 7, 8, 9});
  const auto cdf = spatial_cdf(img, {0, 1}, NeighborhoodSpec::parse("3x3"));
  CHECK(cdf.total_count() == 6);
  CHECK(cdf.sample_count() == 5);
  CHECK(cdf.source().kind == CdfSource::Kind::spatial);
}

TEST_CASE("frame order does not change the temporal CDF") {
  Rng rng(21);
  std::vector<RangeImage> frames;
  for (int k = 0; k < 12; ++k) frames.push_back(random_image(rng, 2, 2, 0.25));
  auto shuffled = frames;
  std::shuffle(shuffled.begin(), shuffled.end(), rng.engine());
  const auto a = temporal_cdf(sequence_of(frames), {1, 1});
  const auto b = temporal_cdf(sequence_of(shuffled), {1, 1});
  CHECK(a == b);
}

TEST_CASE("KS distance examples") {
  const EmpiricalCdf a({1.0, 2.0, 3.0}, 3);
  CHECK(ks_distance(a, a) == 0.0);
  CHECK(ks_distance(EmpiricalCdf({1.0}, 1), EmpiricalCdf({2.0}, 1)) == 1.0);
  const std::vector<double> s{1, 2, 3, 4};
  CHECK(ks_distance(EmpiricalCdf(s, 5), EmpiricalCdf(s, 4)) == doctest::Approx(0.2));
  const auto r = ks_compare(EmpiricalCdf({1.0}, 1).curve(), EmpiricalCdf({2.0}, 1).curve());
  CHECK(r.location == 1.0);
}

TEST_CASE("KS distance is symmetric and exact") {
  Rng rng(77);
  for (int t = 0; t < 50; ++t) {
    auto make = [&] {
      const auto n = 1 + static_cast<std::size_t>(rng.uniform() * 40);
      std::vector<double> s;
      for (std::size_t i = 0; i < n; ++i)
        if (!rng.bernoulli(0.2)) s.push_back(std::round(rng.uniform(0, 10)));
      return EmpiricalCdf(s, n);
    };
    const auto a = make();
    const auto b = make();
    const double d = ks_distance(a, b);
    CHECK(d == ks_distance(b, a));
    CHECK(d >= 0.0);
    CHECK(d == doctest::Approx(brute_ks(a, b)).epsilon(1e-15));
    CHECK((d == 0.0) == (brute_ks(a, b) == 0.0));
  }
}

TEST_CASE("cdf_stats") {
  const auto s = cdf_stats(EmpiricalCdf({1.0, 2.0, 3.0}, 3));
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.std == doctest::Approx(0.8165).epsilon(1e-4));
  CHECK(s.span == 2.0);

  const auto c = cdf_stats(EmpiricalCdf({4.5, 4.5, 4.5}, 3));
  CHECK(c.std == 0.0);
  CHECK(c.span == 0.0);

  const auto f = cdf_stats(EmpiricalCdf(std::vector<double>(40, 1.0), 50));
  CHECK(f.return_fraction == doctest::Approx(0.8));
  CHECK(f.count == 40);
  CHECK(f.total == 50);

  try {
    cdf_stats(EmpiricalCdf({}, 3));
    FAIL("expected no_data");
  } catch (const DataError& e) {
    CHECK(e.kind() == DataErrorKind::no_data);
  }
}

TEST_CASE("temporal_stats_map agrees with per-pixel stats") {
  Rng rng(8);
  std::vector<RangeImage> frames;
  for (int k = 0; k < 6; ++k) frames.push_back(random_image(rng, 5, 7, 0.4));
  frames[0].at(2, 3).range = kNoReturn;
  for (auto& f : frames) f.at(4, 6).range = kNoReturn;
  const auto seq = sequence_of(std::move(frames));
  const auto map = temporal_stats_map(seq);
  REQUIRE(map.size() == 35);
  CHECK_FALSE(map[4 * 7 + 6].has_value());
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 7; ++j) {
      const auto cdf = temporal_cdf(seq, {i, j});
      const auto& m = map[i * 7 + j];
      if (cdf.sample_count() == 0) {
        CHECK_FALSE(m.has_value());
        continue;
      }
      REQUIRE(m.has_value());
      const auto s = cdf_stats(cdf);
      CHECK(m->mean == s.mean);
      CHECK(m->std == s.std);
      CHECK(m->count == s.count);
    }
}

TEST_CASE("reflectance summary") {
  RangeImage a(1, 1), b(1, 1), c(1, 1);
  a.at(0, 0) = {5.0, 80.0};
  b.at(0, 0) = {5.1, 90.0};
  c.at(0, 0) = {5.2, std::nullopt};
  const auto r = reflectance_stats(sequence_of({a, b, c}), {0, 0});
  REQUIRE(r.has_value());
  CHECK(r->count == 2);
  CHECK(r->mean == doctest::Approx(85.0));
  CHECK(r->std == doctest::Approx(5.0));
  CHECK_FALSE(reflectance_stats(sequence_of({c}), {0, 0}).has_value());
  const auto j = nlohmann::json::parse(stats_to_json(cdf_stats(EmpiricalCdf({1.0}, 1)), r));
  CHECK(j["reflectance"]["count"] == 2);
}

TEST_CASE("CSV export round trip") {
  const EmpiricalCdf cdf({1.0, 1.0, 2.5, 4.0}, 5);
  const auto csv = cdf_to_csv(cdf.curve());
  CHECK(csv.rfind("x,F\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 3);
  const auto back = parse_cdf_csv(csv);
  for (double x : {0.0, 1.0, 2.0, 2.5, 3.0, 4.0, 9.0}) CHECK(back.eval(x) == cdf.eval(x));
  CHECK(back.top() == doctest::Approx(0.8));
  CHECK_THROWS_AS(parse_cdf_csv("x,F\n1,0\n"), ParseError);
  CHECK_THROWS_AS(parse_cdf_csv("a,b\n"), ParseError);
  CHECK_THROWS_AS(parse_cdf_csv("x,F\n1,0\n2,0.5\n"), ParseError);
}

TEST_CASE("stats JSON and SVG render") {
  const auto j = nlohmann::json::parse(stats_to_json(cdf_stats(EmpiricalCdf({1.0, 3.0}, 4))));
  CHECK(j["mean"] == 2.0);
  CHECK(j["return_fraction"] == 0.5);
  CHECK_FALSE(j.contains("reflectance"));
  const std::vector<StepCurve> curves{EmpiricalCdf({1.0, 3.0}, 4).curve()};
  const auto svg = cdf_to_svg(curves, "pixel");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<path") != std::string::npos);
}
