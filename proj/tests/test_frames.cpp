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
#include <numbers>
#include <string>

#include "mret/errors.hpp"
#include "mret/frames.hpp"
#include "support.hpp"

using namespace mret;
using mret::test::image_of;
using mret::test::random_image;
using mret::test::sequence_of;

namespace {

const std::string kHeader2x2 =
    "RIF1 rows=2 cols=2 frames=1 rate_hz=10 elev_start=0 elev_step=1 az_start=0 az_step=1\n";

std::size_t parse_error_line(const std::string& doc) {
  try {
    parse_frames(doc);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("minimal document parses to one 2x2 frame") {
  const auto seq = parse_frames(kHeader2x2 + "1,2\n3,4\n");
  CHECK(seq.size() == 1);
  CHECK(seq.rows() == 2);
  CHECK(seq.cols() == 2);
  CHECK(seq.frame(0).at(1, 0).range == 3.0);
  CHECK(seq.rate_hz() == 10.0);
}

TEST_CASE("sentinel -1 becomes NO_RETURN") {
  const auto seq = parse_frames(kHeader2x2 + "1,-1\n3,4\n");
  CHECK_FALSE(seq.frame(0).at(0, 1).has_range());
  CHECK(seq.frame(0).at(0, 1).range == kNoReturn);
}

TEST_CASE("short data row reports its line") {
  CHECK(parse_error_line(kHeader2x2 + "1,2\n3\n") == 3);
  CHECK(parse_error_line(kHeader2x2 + "1,2,3\n4,5\n") == 2);
}

TEST_CASE("malformed documents are rejected") {
  CHECK(parse_error_line(kHeader2x2 + "1,-2\n3,4\n") == 2);
  CHECK(parse_error_line(kHeader2x2 + "1,x\n3,4\n") == 2);
  CHECK(parse_error_line(kHeader2x2 + "1,nan\n3,4\n") == 2);
  CHECK(parse_error_line(kHeader2x2 + "1,2\n") == 3);
  CHECK(parse_error_line(kHeader2x2 + "1,2\n3,4\n5,6\n") == 4);
  CHECK(parse_error_line("RIF2 rows=2\n") == 1);
  CHECK(parse_error_line("RIF1 rows=2 cols=2 frames=1 rate_hz=10 elev_start=0 elev_step=1\n") == 1);
  CHECK(parse_error_line("RIF1 rows=2 cols=2 frames=1 rate_hz=10 elev_start=0 elev_step=1 "
                         "az_start=0 az_step=1 color=3\n1,2\n3,4\n") == 1);
  CHECK(parse_error_line("RIF1 rows=2 rows=2 cols=2 frames=1 rate_hz=10 elev_start=0 "
                         "elev_step=1 az_start=0 az_step=1\n") == 1);
  CHECK(parse_error_line("") == 1);
}

TEST_CASE("header fields may come in any order and frames may be separated") {
  const auto seq = parse_frames(
      "RIF1 frames=2 az_step=1 rows=1 cols=2 rate_hz=5 elev_start=-1 elev_step=1 az_start=0\n"
      "1,2\n\n3,4\n");
  CHECK(seq.size() == 2);
  CHECK(seq.frame(1).at(0, 1).range == 4.0);
  CHECK(seq.calibration().elev_start == -1.0);
}

TEST_CASE("write_frames round trip") {
  const auto seq = sequence_of({image_of(2, 2, {1.25, kNoReturn, 3.0, 1e-3})});
  const auto doc = write_frames(seq);
  CHECK(doc.find("-1") != std::string::npos);
  CHECK(parse_frames(doc) == seq);
  CHECK(write_frames(parse_frames(doc)) == doc);
}

TEST_CASE("header carries the declared shape") {
  std::vector<RangeImage> frames(30, RangeImage(64, 1024, {-16.6, 0.53, 0.0, 360.0 / 1024}));
  const auto doc = write_frames(sequence_of(std::move(frames)));
  const auto header = doc.substr(0, doc.find('\n'));
  CHECK(header.rfind("RIF1 ", 0) == 0);
  CHECK(header.find(" frames=30") != std::string::npos);
  CHECK(header.find(" rows=64") != std::string::npos);
  CHECK(header.find(" cols=1024") != std::string::npos);
}

TEST_CASE("reflectance sidecar round trip") {
  Rng rng(5);
  std::vector<RangeImage> frames;
  for (int k = 0; k < 3; ++k) frames.push_back(random_image(rng, 3, 4, 0.2, 1.0, 50.0, true));
  const auto seq = sequence_of(std::move(frames));
  CHECK(seq.has_reflectance());
  const auto refl = write_reflectance(seq);
  REQUIRE(refl.has_value());
  CHECK(parse_frames(write_frames(seq), *refl) == seq);
  CHECK_FALSE(write_reflectance(sequence_of({image_of(1, 1, {2.0})})).has_value());
}

TEST_CASE("sidecar of another shape is rejected") {
  const auto ranges = kHeader2x2 + "1,2\n3,4\n";
  const auto refl =
      "RIF1 rows=1 cols=2 frames=1 rate_hz=10 elev_start=0 elev_step=1 az_start=0 az_step=1\n"
      "1,2\n";
  CHECK_THROWS_AS(parse_frames(ranges, std::string_view(refl)), ParseError);
}

TEST_CASE("invalid images are refused") {
  CHECK_THROWS_AS(image_of(1, 2, {1.0, -2.0}), std::invalid_argument);
  CHECK_THROWS_AS(image_of(1, 2, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(RangeImage(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(RangeImage(1, 800, {0, 1, 0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(sequence_of({RangeImage(1, 2), RangeImage(2, 1)}), std::invalid_argument);
  CHECK_THROWS_AS(sequence_of({}), std::invalid_argument);
}

TEST_CASE("to_point_cloud geometry") {
  SUBCASE("axis aligned") {
    const auto pts = to_point_cloud(image_of(1, 1, {1.0}, {0, 1, 0, 1}));
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].x == doctest::Approx(1.0));
    CHECK(pts[0].y == doctest::Approx(0.0));
    CHECK(pts[0].z == doctest::Approx(0.0));
  }
  SUBCASE("zenith") {
    const auto pts = to_point_cloud(image_of(1, 1, {2.0}, {90, 1, 0, 1}));
    CHECK(std::abs(pts[0].x) < 1e-12);
    CHECK(std::abs(pts[0].y) < 1e-12);
    CHECK(pts[0].z == doctest::Approx(2.0));
  }
  SUBCASE("oblique downward ray") {
    const auto pts = to_point_cloud(image_of(1, 1, {21.0}, {-9, 1, 0, 1}));
    CHECK(pts[0].x == doctest::Approx(21.0 * std::cos(9.0 * std::numbers::pi / 180.0)).epsilon(1e-12));
    CHECK(pts[0].x == doctest::Approx(20.74146).epsilon(1e-6));
    CHECK(pts[0].z == doctest::Approx(-3.28512).epsilon(1e-5));
  }
  SUBCASE("non-returns emit nothing") {
    CHECK(to_point_cloud(image_of(1, 3, {kNoReturn, 4.0, kNoReturn})).size() == 1);
  }
}

TEST_CASE("to_point_cloud preserves range") {
  Rng rng(11);
  const auto img = random_image(rng, 16, 64, 0.1, 0.5, 120.0, false, {-15, 1, -180, 5.625});
  std::size_t n = 0;
  for (const auto& p : to_point_cloud(img)) {
    ++n;
    const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    CHECK(r > 0.0);
  }
  std::size_t k = 0;
  const auto pts = to_point_cloud(img);
  for (const auto& c : img.cells()) {
    if (!c.has_range()) continue;
    const auto& p = pts[k++];
    const double r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    CHECK(std::abs(r - c.range) <= 1e-9 * c.range);
  }
  CHECK(k == n);
}

TEST_CASE("neighborhood extraction") {
  std::vector<double> ranges(8 * 10);
  for (std::size_t i = 0; i < ranges.size(); ++i) ranges[i] = static_cast<double>(i);
  const auto img = image_of(8, 10, ranges);

  SUBCASE("5x5 interior") {
    const auto n = neighborhood(img, {4, 5}, NeighborhoodSpec::parse("5x5"));
    CHECK(n.cells.size() == 25);
    CHECK(n.omitted == 0);
  }
  SUBCASE("3x3 at column 0 wraps") {
    const auto n = neighborhood(img, {3, 0}, NeighborhoodSpec::parse("3x3"));
    REQUIRE(n.cells.size() == 9);
    CHECK(n.cells[0].range == 2 * 10 + 9);
    CHECK(n.cells[3].range == 3 * 10 + 9);
  }
  SUBCASE("3x3 at row 0 truncates") {
    const auto n = neighborhood(img, {0, 4}, NeighborhoodSpec::parse("3x3"));
    CHECK(n.cells.size() == 6);
    CHECK(n.omitted == 3);
  }
  SUBCASE("1x1 is the center") {
    const auto n = neighborhood(img, {6, 7}, NeighborhoodSpec{});
    REQUIRE(n.cells.size() == 1);
    CHECK(n.cells[0].range == 67);
  }
  SUBCASE("non-returns are values") {
    auto copy = img;
    copy.at(4, 5).range = kNoReturn;
    CHECK(neighborhood(copy, {4, 5}, {1, 1}).cells.size() == 9);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(neighborhood(img, {8, 0}, {1, 1}), std::out_of_range);
    CHECK_THROWS_AS(neighborhood(img, {4, 4}, {5, 0}), std::invalid_argument);
  }
}

TEST_CASE("patch spec parsing") {
  CHECK(NeighborhoodSpec::parse("5x5") == NeighborhoodSpec{2, 2});
  CHECK(NeighborhoodSpec::parse("3x7") == NeighborhoodSpec{1, 3});
  CHECK(NeighborhoodSpec::parse("1x1").cells() == 1);
  CHECK_THROWS_AS(NeighborhoodSpec::parse("4x4"), std::invalid_argument);
  CHECK_THROWS_AS(NeighborhoodSpec::parse("5"), std::invalid_argument);
}

TEST_CASE("randomized parse/write round trips") {
  Rng rng(2024);
  for (int doc = 0; doc < 20; ++doc) {
    const auto rows = 1 + static_cast<std::size_t>(rng.uniform() * 6);
    const auto cols = 1 + static_cast<std::size_t>(rng.uniform() * 9);
    const auto k = 1 + static_cast<std::size_t>(rng.uniform() * 4);
    std::vector<RangeImage> frames;
    for (std::size_t f = 0; f < k; ++f)
      frames.push_back(random_image(rng, rows, cols, 0.3, 0.0, 200.0, doc % 2 == 0));
    const auto seq = sequence_of(std::move(frames), rng.uniform(1.0, 20.0));
    const auto refl = write_reflectance(seq);
    const auto back = refl ? parse_frames(write_frames(seq), *refl) : parse_frames(write_frames(seq));
    CHECK(back == seq);
  }
}
