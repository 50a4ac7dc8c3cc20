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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "mret/frames.hpp"
#include "mret/monitor.hpp"
#include "mret/rng.hpp"

namespace mret {

enum class SurfaceKind { plane, rectangle, porous };

/// Planar scatterer. Rectangles and porous screens are bounded by
/// |u| <= half_u, |v| <= half_v in the (u_axis, normal x u_axis) frame.
struct Surface {
  SurfaceKind kind = SurfaceKind::plane;
  Eigen::Vector3d point = Eigen::Vector3d::Zero();  ///< plane point or rectangle center
  Eigen::Vector3d normal = Eigen::Vector3d::UnitX();
  Eigen::Vector3d u_axis = Eigen::Vector3d::UnitY();
  double half_u = 0.0;
  double half_v = 0.0;
  /// Backscatter relative to a Lambertian reflector; > 1 models retroreflectors.
  double reflectivity = 1.0;
  /// Per-sub-ray chance that a porous screen stops the ray.
  double hit_probability = 1.0;
  std::string name;

  static Surface plane(Eigen::Vector3d point, Eigen::Vector3d normal, double reflectivity);
  static Surface rectangle(Eigen::Vector3d center, Eigen::Vector3d normal, Eigen::Vector3d u_axis,
                           double half_u, double half_v, double reflectivity);
  static Surface porous(Eigen::Vector3d center, Eigen::Vector3d normal, Eigen::Vector3d u_axis,
                        double half_u, double half_v, double reflectivity,
                        double hit_probability);

  /// Throws std::invalid_argument when an invariant does not hold.
  void validate() const;

  /// Ray parameter t > 0 of the intersection, if any. `direction` is unit.
  std::optional<double> intersect(const Eigen::Vector3d& origin,
                                  const Eigen::Vector3d& direction) const;
};

struct Scene {
  std::vector<Surface> surfaces;
  std::uint64_t seed = 0;
};

enum class DetectorPolicy { strongest, last };

struct BeamSpec {
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  std::size_t rows = 1;
  std::size_t cols = 1;
  Calibration calibration;
  double half_angle = 0.0015;  ///< divergence half-angle, radians
  std::size_t subrays = 64;
  double range_sigma = 0.0;  ///< meters
  DetectorPolicy policy = DetectorPolicy::strongest;
  double rate_hz = 10.0;

  void validate() const;
};

struct Ray {
  Eigen::Vector3d origin;
  Eigen::Vector3d direction;  ///< unit
};

/// Beam axis of pixel (i, j); same angle convention as to_point_cloud.
Ray beam_axis(const BeamSpec& spec, RaypathId ray);

struct Pulse {
  Return ret;
  std::optional<std::size_t> surface;  ///< index of the selected surface
};

/// One pulse: M sub-rays uniform over the divergence disk, first non-passed
/// hit per sub-ray, hits grouped per surface, one group selected by policy.
Pulse fire_pulse(const Scene& scene, const Ray& axis, const BeamSpec& spec, Rng& rng);

inline Return cast_beam(const Scene& scene, const Ray& axis, const BeamSpec& spec, Rng& rng) {
  return fire_pulse(scene, axis, spec, rng).ret;
}

/// Per-pixel, per-frame random stream.
inline Rng pulse_stream(std::uint64_t seed, RaypathId ray, std::size_t frame) {
  return Rng::stream(seed, {ray.row, ray.col, frame});
}

/// Selection probability of each scene surface (scene order) for a pulse
/// along `axis`, by dense equal-area quadrature of the beam disk. Opaque
/// scenes only: porous surfaces raise DataError(unsupported).
std::vector<double> analytic_cluster_weights(const Scene& scene, const Ray& axis,
                                             const BeamSpec& spec, std::size_t dense = 100000);

/// True when the beam cone can produce returns from two or more surfaces.
bool multi_surface_label(const Scene& scene, const Ray& axis, const BeamSpec& spec);

struct Simulation {
  FrameSequence frames;
  Mask labels;
};

/// K frames of one pulse per pixel. Deterministic for scene.seed regardless of
/// thread count. OpenMP-parallel over pixels.
Simulation simulate_sequence(const Scene& scene, const BeamSpec& spec, std::size_t frames);

/// Ground-truth label grid alone.
Mask label_grid(const Scene& scene, const BeamSpec& spec);

// ---- JSON -------------------------------------------------------------------

/// `{"seed":.., "surfaces":[{"kind":"plane|rectangle|porous", ...}], "beam":{...}}`
struct SceneFile {
  Scene scene;
  std::optional<BeamSpec> beam;
};

SceneFile parse_scene_json(std::string_view text);
std::string scene_to_json(const Scene& scene, const std::optional<BeamSpec>& beam = std::nullopt);

// ---- preset scenes -------------------------------------------------------------

/// Named synthetic scenes: wall, corner, window, foliage, split, occluder,
/// three-surface. Each comes with the beam it was designed for.
SceneFile preset_scene(std::string_view name, std::uint64_t seed);
std::vector<std::string> preset_names();

}  // namespace mret
