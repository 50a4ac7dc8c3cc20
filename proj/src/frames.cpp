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

#include "mret/frames.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mret/io.hpp"

namespace mret {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void check_return(const Return& r) {
  if (r.range != kNoReturn && !(std::isfinite(r.range) && r.range >= 0.0))
    throw std::invalid_argument("range must be finite and >= 0, or kNoReturn");
  if (r.reflectance && !(std::isfinite(*r.reflectance) && *r.reflectance >= 0.0))
    throw std::invalid_argument("reflectance must be finite and >= 0");
}

void check_calibration(const Calibration& cal, std::size_t cols) {
  for (double v : {cal.elev_start, cal.elev_step, cal.az_start, cal.az_step})
    if (!std::isfinite(v)) throw std::invalid_argument("calibration values must be finite");
  if (std::abs(cal.az_step) * static_cast<double>(cols) > 360.0 + 1e-6)
    throw std::invalid_argument("azimuth lattice spans more than 360 degrees");
}

}  // namespace

NeighborhoodSpec NeighborhoodSpec::parse(std::string_view text) {
  const auto parts = io::split(io::trim(text), 'x');
  if (parts.size() != 2) throw std::invalid_argument("patch must look like 5x5");
  std::size_t dims[2]{};
  for (int n = 0; n < 2; ++n) {
    double v = 0;
    if (!io::parse_double(parts[n], v) || v < 1 || v != std::floor(v) ||
        static_cast<long long>(v) % 2 == 0)
      throw std::invalid_argument("patch dimensions must be odd positive integers");
    dims[n] = static_cast<std::size_t>(v);
  }
  return {dims[0] / 2, dims[1] / 2};
}

RangeImage::RangeImage(std::size_t rows, std::size_t cols, Calibration calibration)
    : RangeImage(rows, cols, calibration, std::vector<Return>(rows * cols)) {}

RangeImage::RangeImage(std::size_t rows, std::size_t cols, Calibration calibration,
                       std::vector<Return> cells)
    : rows_(rows), cols_(cols), calibration_(calibration), cells_(std::move(cells)) {
  if (rows_ == 0 || cols_ == 0) throw std::invalid_argument("range image must be at least 1x1");
  if (cells_.size() != rows_ * cols_)
    throw std::invalid_argument("cell count does not match rows*cols");
  check_calibration(calibration_, cols_);
  for (const auto& c : cells_) check_return(c);
}

std::size_t RangeImage::index(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) throw std::out_of_range("pixel index out of range");
  return row * cols_ + col;
}

bool RangeImage::has_reflectance() const noexcept {
  for (const auto& c : cells_)
    if (c.reflectance) return true;
  return false;
}

FrameSequence::FrameSequence(std::vector<RangeImage> frames, double rate_hz)
    : frames_(std::move(frames)), rate_hz_(rate_hz) {
  if (frames_.empty()) throw std::invalid_argument("frame sequence needs at least one frame");
  if (!(std::isfinite(rate_hz_) && rate_hz_ > 0.0))
    throw std::invalid_argument("rate_hz must be positive");
  const auto& first = frames_.front();
  for (const auto& f : frames_)
    if (f.rows() != first.rows() || f.cols() != first.cols() ||
        !(f.calibration() == first.calibration()))
      throw std::invalid_argument("frames must share shape and calibration");
}

bool FrameSequence::has_reflectance() const noexcept {
  for (const auto& f : frames_)
    if (f.has_reflectance()) return true;
  return false;
}

std::vector<Point> to_point_cloud(const RangeImage& image) {
  std::vector<Point> points;
  const auto& cal = image.calibration();
  for (std::size_t i = 0; i < image.rows(); ++i) {
    const double el = cal.elevation_deg(i) * kDeg;
    const double cos_el = std::cos(el);
    const double sin_el = std::sin(el);
    for (std::size_t j = 0; j < image.cols(); ++j) {
      const auto& cell = image.at(i, j);
      if (!cell.has_range()) continue;
      const double az = cal.azimuth_deg(j) * kDeg;
      const double r = cell.range;
      points.push_back(
          {r * cos_el * std::cos(az), r * cos_el * std::sin(az), r * sin_el, cell.reflectance});
    }
  }
  return points;
}

Neighborhood neighborhood(const RangeImage& image, RaypathId center, NeighborhoodSpec spec) {
  if (!image.contains(center)) throw std::out_of_range("neighborhood center out of range");
  if (spec.rows() > image.rows())
    throw std::invalid_argument("neighborhood taller than the image");
  Neighborhood out;
  out.cells.reserve(spec.cells());
  const auto hr = static_cast<std::ptrdiff_t>(spec.half_rows);
  const auto hc = static_cast<std::ptrdiff_t>(spec.half_cols);
  const auto ci = static_cast<std::ptrdiff_t>(center.row);
  const auto cj = static_cast<std::ptrdiff_t>(center.col);
  for (std::ptrdiff_t m = -hr; m <= hr; ++m) {
    const auto row = ci + m;
    if (row < 0 || row >= static_cast<std::ptrdiff_t>(image.rows())) {
      out.omitted += spec.cols();
      continue;
    }
    for (std::ptrdiff_t n = -hc; n <= hc; ++n)
      out.cells.push_back(image.at(static_cast<std::size_t>(row), image.wrap_col(cj + n)));
  }
  return out;
}

}  // namespace mret
