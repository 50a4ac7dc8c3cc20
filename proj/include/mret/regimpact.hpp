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
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace mret {

using Vec2 = Eigen::Vector2d;
using Cloud = std::vector<Vec2>;

/// Planar rigid transform p -> R(angle) p + translation.
struct Rigid2 {
  double angle = 0.0;  ///< radians
  Vec2 translation = Vec2::Zero();

  Vec2 apply(const Vec2& p) const;
  Rigid2 inverse() const;
  /// (this * other)(p) == this->apply(other.apply(p))
  Rigid2 compose(const Rigid2& other) const;
};

Cloud transform(const Cloud& cloud, const Rigid2& t);

/// Least-squares rigid alignment taking `from[i]` onto `to[i]`.
Rigid2 procrustes(const Cloud& from, const Cloud& to);

enum class ReferenceKind { scan, map };
enum class Algorithm { icp, ndt };

std::string_view to_string(ReferenceKind kind) noexcept;
std::string_view to_string(Algorithm algo) noexcept;

/// Rectangular room around the sensor, sampled by a full-circle ray fan.
/// Each wall is a row of panels `panel_width` wide centred in consecutive
/// `panel_pitch` cells; rays through the gaps return nothing. Setting
/// panel_width == panel_pitch gives solid walls. Multi-return rays are drawn
/// from those hitting the +x wall, and their second cluster sits `gap`
/// farther along +x.
struct RoomTemplate {
  double half_x = 3.5;
  double half_y = 6.5;
  std::size_t rays = 360;
  double panel_pitch = 1.0;
  double panel_width = 0.6;
};

struct IcpParams {
  double max_radius = 0.5;  ///< meters
  std::size_t iterations = 100;
  double tolerance = 1e-12;
};

struct NdtParams {
  double voxel_size = 1.0;  ///< meters
  std::size_t iterations = 100;
  double tolerance = 1e-12;
};

struct RegistrationConfig {
  RoomTemplate room;
  double gap = 0.0;       ///< Delta, meters
  double fraction = 0.0;  ///< expected share of returned rays that are multi-return
  ReferenceKind reference = ReferenceKind::scan;
  IcpParams icp;
  NdtParams ndt;
  double noise_sigma = 0.0;          ///< isotropic point noise, meters
  double max_truth_translation = 0.1;
  double max_truth_rotation = 0.01;  ///< radians
  std::uint64_t seed = 0;

  void validate() const;
};

/// Unit vector along which the injected cluster is displaced.
inline Vec2 injection_direction() { return Vec2::UnitX(); }

struct Experiment {
  Cloud current;    ///< in the current sensor frame
  Cloud reference;
  Rigid2 truth;     ///< maps current-frame points into the reference frame
  std::size_t multi_return_rays = 0;
  std::size_t far_in_current = 0;
};

/// Trial `trial` of the configuration; deterministic in (cfg.seed, trial).
Experiment make_experiment(const RegistrationConfig& cfg, std::uint64_t trial = 0);

struct IterationTrace {
  std::size_t matched = 0;
  double rms = 0.0;  ///< matched-pair RMS before the update
};

struct RegistrationResult {
  Rigid2 estimate;
  Rigid2 truth;
  double translation_error = 0.0;  ///< |t_est - t_truth|
  std::vector<IterationTrace> trace;

  /// Apparent shift of the current scan along `direction`: (t_truth - t_est) . d
  double bias_along(const Vec2& direction) const;
};

/// Point-to-point ICP: nearest neighbours within max_radius, closed-form
/// alignment, repeat until the update falls below tolerance.
/// DataError(degenerate) when nothing associates.
RegistrationResult run_icp(const Cloud& current, const Cloud& reference, const IcpParams& params,
                           const Rigid2& truth = {});

/// Centroid-only NDT: voxel centroids of both clouds aligned over voxels
/// populated in both. DataError(degenerate) without common voxels.
RegistrationResult run_ndt_lite(const Cloud& current, const Cloud& reference,
                                const NdtParams& params, const Rigid2& truth = {});

/// Sweep base: the defaults above with 10% multi-return points.
inline RegistrationConfig default_sweep_base() {
  RegistrationConfig c;
  c.fraction = 0.1;
  return c;
}

struct SweepConfig {
  RegistrationConfig base = default_sweep_base();
  std::vector<double> gaps{0.0, 0.05, 0.1, 0.2, 3.0};
  std::vector<Algorithm> algorithms{Algorithm::icp, Algorithm::ndt};
  std::vector<ReferenceKind> references{ReferenceKind::scan, ReferenceKind::map};
  std::size_t trials = 20;
};

struct BiasRow {
  double gap = 0.0;
  Algorithm algorithm = Algorithm::icp;
  ReferenceKind reference = ReferenceKind::scan;
  double mean_bias = 0.0;  ///< mean translation error magnitude
  double std_bias = 0.0;
  double max_bias = 0.0;
  std::size_t trials = 0;
};

/// Per-trial translation errors for one sweep cell, in trial order.
/// OpenMP-parallel over trials.
std::vector<RegistrationResult> run_trials(const RegistrationConfig& cfg, Algorithm algo,
                                           std::size_t trials);

/// One row per (gap, algorithm, reference); deterministic for fixed seeds.
std::vector<BiasRow> bias_report(const SweepConfig& sweep);

/// `delta,algorithm,reference,mean_bias,std_bias,max_bias,trials`
std::string bias_report_csv(const std::vector<BiasRow>& rows);

SweepConfig parse_sweep_json(std::string_view text);
std::string sweep_to_json(const SweepConfig& sweep);

}  // namespace mret
