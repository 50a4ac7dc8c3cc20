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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mret {

/// Range value used for a pulse that produced no detection. Written as `-1`
/// in RIF documents.
inline constexpr double kNoReturn = -1.0;

/// One pixel of one frame.
struct Return {
  double range = kNoReturn;                ///< meters, or kNoReturn
  std::optional<double> reflectance;       ///< 0-255 scale; 100 = Lambertian

  bool has_range() const noexcept { return range >= 0.0; }

  friend bool operator==(const Return&, const Return&) = default;
};

/// Uniform-step angular lattice, degrees.
struct Calibration {
  double elev_start = 0.0;
  double elev_step = 1.0;
  double az_start = 0.0;
  double az_step = 1.0;

  double elevation_deg(std::size_t row) const noexcept {
    return elev_start + static_cast<double>(row) * elev_step;
  }
  double azimuth_deg(std::size_t col) const noexcept {
    return az_start + static_cast<double>(col) * az_step;
  }

  friend bool operator==(const Calibration&, const Calibration&) = default;
};

struct RaypathId {
  std::size_t row = 0;  ///< elevation channel
  std::size_t col = 0;  ///< azimuth bin

  friend bool operator==(const RaypathId&, const RaypathId&) = default;
};

/// Rectangular pixel window of (2*half_rows+1) x (2*half_cols+1) cells.
struct NeighborhoodSpec {
  std::size_t half_rows = 0;
  std::size_t half_cols = 0;

  std::size_t rows() const noexcept { return 2 * half_rows + 1; }
  std::size_t cols() const noexcept { return 2 * half_cols + 1; }
  std::size_t cells() const noexcept { return rows() * cols(); }

  /// Parses "5x5" / "3x3" / "1x1" (rows x cols, both odd).
  static NeighborhoodSpec parse(std::string_view text);

  friend bool operator==(const NeighborhoodSpec&, const NeighborhoodSpec&) = default;
};

class RangeImage {
 public:
  /// All cells start as NO_RETURN.
  RangeImage(std::size_t rows, std::size_t cols, Calibration calibration = {});
  RangeImage(std::size_t rows, std::size_t cols, Calibration calibration,
             std::vector<Return> cells);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const Calibration& calibration() const noexcept { return calibration_; }

  const Return& at(std::size_t row, std::size_t col) const { return cells_[index(row, col)]; }
  Return& at(std::size_t row, std::size_t col) { return cells_[index(row, col)]; }
  const Return& at(RaypathId id) const { return at(id.row, id.col); }
  Return& at(RaypathId id) { return at(id.row, id.col); }

  /// Range at a row and a column offset that wraps modulo cols().
  double range_wrapped(std::size_t row, std::ptrdiff_t col) const noexcept {
    return cells_[row * cols_ + wrap_col(col)].range;
  }

  std::span<const Return> cells() const noexcept { return cells_; }

  bool contains(RaypathId id) const noexcept { return id.row < rows_ && id.col < cols_; }

  std::size_t wrap_col(std::ptrdiff_t col) const noexcept {
    const auto c = static_cast<std::ptrdiff_t>(cols_);
    return static_cast<std::size_t>(((col % c) + c) % c);
  }

  bool has_reflectance() const noexcept;

  friend bool operator==(const RangeImage&, const RangeImage&) = default;

 private:
  std::size_t index(std::size_t row, std::size_t col) const;

  std::size_t rows_;
  std::size_t cols_;
  Calibration calibration_;
  std::vector<Return> cells_;
};

/// Time-ordered frames sharing one shape and calibration.
class FrameSequence {
 public:
  FrameSequence(std::vector<RangeImage> frames, double rate_hz);

  std::size_t size() const noexcept { return frames_.size(); }
  std::size_t rows() const noexcept { return frames_.front().rows(); }
  std::size_t cols() const noexcept { return frames_.front().cols(); }
  const Calibration& calibration() const noexcept { return frames_.front().calibration(); }
  double rate_hz() const noexcept { return rate_hz_; }

  const RangeImage& frame(std::size_t k) const { return frames_.at(k); }
  std::span<const RangeImage> frames() const noexcept { return frames_; }

  bool contains(RaypathId id) const noexcept { return frames_.front().contains(id); }
  bool has_reflectance() const noexcept;

  friend bool operator==(const FrameSequence&, const FrameSequence&) = default;

 private:
  std::vector<RangeImage> frames_;
  double rate_hz_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::optional<double> reflectance;
};

/// One point per returned cell; x forward, z up, azimuth counter-clockwise.
std::vector<Point> to_point_cloud(const RangeImage& image);

struct Neighborhood {
  std::vector<Return> cells;  ///< row-major over the rows that exist
  std::size_t omitted = 0;    ///< cells dropped because their row is outside the image
};

/// Columns wrap around the spin; rows outside [0, rows) are dropped.
Neighborhood neighborhood(const RangeImage& image, RaypathId center, NeighborhoodSpec spec);

// ---- RIF text format -------------------------------------------------------

/// Parses a RIF1 range document and, optionally, its reflectance sidecar.
FrameSequence parse_frames(std::string_view ranges,
                           std::optional<std::string_view> reflectance = std::nullopt);

/// Canonical RIF1 document for the ranges of `seq`.
std::string write_frames(const FrameSequence& seq);

/// Reflectance sidecar, or nullopt when no cell carries reflectance.
std::optional<std::string> write_reflectance(const FrameSequence& seq);

FrameSequence read_frames_file(const std::filesystem::path& ranges,
                               const std::optional<std::filesystem::path>& reflectance =
                                   std::nullopt);

}  // namespace mret
