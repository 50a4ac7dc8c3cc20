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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mret/frames.hpp"

namespace mret {

/// Unit step: 0 for y < 0, 1 for y >= 0.
constexpr int step(double y) noexcept { return y < 0.0 ? 0 : 1; }

struct CdfSource {
  enum class Kind { temporal, spatial, compensated, external };

  Kind kind = Kind::external;
  RaypathId ray{};
  std::size_t frame = 0;  ///< meaningful for spatial CDFs only

  friend bool operator==(const CdfSource&, const CdfSource&) = default;
};

/// A jump of a right-continuous step function: value `before` just left of
/// `x`, value `after` at and right of `x`.
struct CdfJump {
  double x = 0.0;
  double before = 0.0;
  double after = 0.0;

  friend bool operator==(const CdfJump&, const CdfJump&) = default;
};

/// Right-continuous, nondecreasing step function starting at 0. Used for
/// CDFs read back from CSV, where only the jump table survives.
class StepCurve {
 public:
  StepCurve() = default;
  /// Jumps must have strictly increasing x and chain (before == previous after).
  explicit StepCurve(std::vector<CdfJump> jumps);

  double eval(double x) const noexcept;
  double eval_below(double x) const noexcept;
  double top() const noexcept { return jumps_.empty() ? 0.0 : jumps_.back().after; }
  std::span<const CdfJump> jumps() const noexcept { return jumps_; }

 private:
  std::vector<CdfJump> jumps_;
};

/// Empirical sub-distribution over range. Non-returns count toward N but
/// contribute no step, so the function tops out at sample_count()/N.
class EmpiricalCdf {
 public:
  EmpiricalCdf(std::vector<double> samples, std::size_t total_count, CdfSource source = {});

  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t sample_count() const noexcept { return samples_.size(); }
  std::size_t total_count() const noexcept { return total_; }
  double return_fraction() const noexcept {
    return static_cast<double>(samples_.size()) / static_cast<double>(total_);
  }
  const CdfSource& source() const noexcept { return source_; }

  /// (# samples <= x) / N.
  double eval(double x) const noexcept;
  /// (# samples < x) / N, the left limit at x.
  double eval_below(double x) const noexcept;

  StepCurve curve() const;

  friend bool operator==(const EmpiricalCdf&, const EmpiricalCdf&) = default;

 private:
  std::vector<double> samples_;
  std::size_t total_;
  CdfSource source_;
};

inline double eval_cdf(const EmpiricalCdf& cdf, double x) noexcept { return cdf.eval(x); }

EmpiricalCdf temporal_cdf(const FrameSequence& seq, RaypathId ray);
EmpiricalCdf spatial_cdf(const RangeImage& image, RaypathId ray, NeighborhoodSpec spec);

struct KsResult {
  double distance = 0.0;
  double location = 0.0;  ///< range where the supremum is attained
};

/// Exact sup |A - B| over the union of jump points, checking both sides of
/// every jump.
KsResult ks_compare(const StepCurve& a, const StepCurve& b);
double ks_distance(const EmpiricalCdf& a, const EmpiricalCdf& b);

struct CdfStats {
  std::size_t count = 0;  ///< finite samples
  std::size_t total = 0;  ///< N, including non-returns
  double return_fraction = 0.0;
  double mean = 0.0;
  double std = 0.0;  ///< population
  double min = 0.0;
  double max = 0.0;
  double span = 0.0;
};

/// Throws DataError(no_data) when the CDF holds no finite sample.
CdfStats cdf_stats(const EmpiricalCdf& cdf);

/// Per-pixel temporal statistics for the whole image, row-major. Pixels that
/// never returned are nullopt. OpenMP-parallel over rows.
std::vector<std::optional<CdfStats>> temporal_stats_map(const FrameSequence& seq);

/// Reflectance over the frames where the raypath returned with a reflectance.
struct ReflectanceStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  ///< population
  double min = 0.0;
  double max = 0.0;
};

/// nullopt when no frame carries a reflectance for `ray`.
std::optional<ReflectanceStats> reflectance_stats(const FrameSequence& seq, RaypathId ray);

// ---- export ---------------------------------------------------------------

/// `x,F` CSV with two rows per jump (pre- and post-jump value).
std::string cdf_to_csv(const StepCurve& curve);
StepCurve parse_cdf_csv(std::string_view text);

std::string stats_to_json(const CdfStats& stats,
                          const std::optional<ReflectanceStats>& reflectance = std::nullopt);

/// Minimal SVG step plot of one or more curves.
std::string cdf_to_svg(std::span<const StepCurve> curves, std::string_view title);

}  // namespace mret
