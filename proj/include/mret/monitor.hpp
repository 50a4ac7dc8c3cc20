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
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mret/frames.hpp"
#include "mret/mixture.hpp"

namespace mret {

struct MonitorConfig {
  NeighborhoodSpec patch{1, 1};
  double span_threshold = 0.25;  ///< meters
  double min_gap = kDefaultMinGap;
  std::size_t min_cluster_count = 2;
  double max_nonreturn_fraction = 0.3;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

enum class Reason { span, clusters, nonreturn, clear };

std::string_view to_string(Reason reason) noexcept;

struct MonitorVerdict {
  RaypathId ray{};
  bool flagged = false;
  double span = 0.0;
  std::size_t cluster_count = 0;
  double nonreturn_fraction = 0.0;
  Reason reason = Reason::clear;

  friend bool operator==(const MonitorVerdict&, const MonitorVerdict&) = default;
};

/// Spatial-CDF test for one pixel. Criteria are checked in the order
/// span, clusters, non-returns; the first that fires is the reason.
MonitorVerdict classify_raypath(const RangeImage& image, RaypathId ray, const MonitorConfig& cfg);

/// Row-major verdicts for every pixel. OpenMP-parallel over rows.
std::vector<MonitorVerdict> scan_frame(const RangeImage& image, const MonitorConfig& cfg);

/// Binary per-pixel grid (monitor masks and simulator labels).
struct Mask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> cells;  ///< row-major, 0 or 1

  friend bool operator==(const Mask&, const Mask&) = default;
};

Mask to_mask(std::size_t rows, std::size_t cols, std::span<const MonitorVerdict> verdicts);

/// Plain PGM (P2, maxval 1).
std::string mask_to_pgm(const Mask& mask);
Mask parse_mask_pgm(std::string_view text);

/// `i,j,flagged,reason,span,clusters,nonreturn_fraction`
std::string verdicts_csv(std::span<const MonitorVerdict> verdicts);

struct MonitorScore {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  std::size_t true_negative = 0;
  double precision = 1.0;  ///< 1 when nothing was flagged
  double recall = 1.0;     ///< 1 when there are no positives

  MonitorScore& operator+=(const MonitorScore& other);
};

/// Confusion counts of flagged vs labeled pixels. DataError(alignment) on a
/// length mismatch.
MonitorScore evaluate_monitor(std::span<const MonitorVerdict> verdicts,
                              std::span<const std::uint8_t> labels);

}  // namespace mret
