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

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "mret/beamsim.hpp"
#include "mret/errors.hpp"

namespace mret {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kDeg = std::numbers::pi / 180.0;

Eigen::Vector3d vec3(const json& j, const char* key) {
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 3)
    throw ParseError(0, std::string("'") + key + "' must be a 3-element array");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

ojson vec3_json(const Eigen::Vector3d& v) { return ojson::array({v.x(), v.y(), v.z()}); }

Surface surface_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const double refl = j.value("reflectivity", 1.0);
  Surface s;
  if (kind == "plane") {
    s = Surface::plane(vec3(j, "point"), vec3(j, "normal"), refl);
  } else if (kind == "rectangle" || kind == "porous") {
    const auto center = vec3(j, "center");
    const auto normal = vec3(j, "normal");
    const auto u = vec3(j, "u_axis");
    const double hu = j.at("half_u").get<double>();
    const double hv = j.at("half_v").get<double>();
    s = kind == "rectangle"
            ? Surface::rectangle(center, normal, u, hu, hv, refl)
            : Surface::porous(center, normal, u, hu, hv, refl, j.at("hit_probability").get<double>());
  } else {
    throw ParseError(0, "unknown surface kind '" + kind + "'");
  }
  s.name = j.value("name", std::string());
  return s;
}

BeamSpec beam_from_json(const json& j) {
  BeamSpec b;
  if (j.contains("origin")) b.origin = vec3(j, "origin");
  b.rows = j.value("rows", b.rows);
  b.cols = j.value("cols", b.cols);
  b.calibration.elev_start = j.value("elev_start", b.calibration.elev_start);
  b.calibration.elev_step = j.value("elev_step", b.calibration.elev_step);
  b.calibration.az_start = j.value("az_start", b.calibration.az_start);
  b.calibration.az_step = j.value("az_step", b.calibration.az_step);
  b.half_angle = j.value("half_angle", b.half_angle);
  b.subrays = j.value("subrays", b.subrays);
  b.range_sigma = j.value("range_sigma", b.range_sigma);
  b.rate_hz = j.value("rate_hz", b.rate_hz);
  const auto policy = j.value("policy", std::string("strongest"));
  if (policy == "strongest") b.policy = DetectorPolicy::strongest;
  else if (policy == "last") b.policy = DetectorPolicy::last;
  else throw ParseError(0, "unknown detector policy '" + policy + "'");
  b.validate();
  return b;
}

/// Single-pixel beam looking down +x.
BeamSpec pixel_beam(double half_angle, std::size_t subrays, double sigma) {
  BeamSpec b;
  b.rows = 1;
  b.cols = 1;
  b.calibration = {0.0, 1.0, 0.0, 1.0};
  b.half_angle = half_angle;
  b.subrays = subrays;
  b.range_sigma = sigma;
  return b;
}

/// Grid shared by the monitor corpus scenes: 32 x 128 pixels at 0.5 deg.
BeamSpec corpus_beam() {
  BeamSpec b;
  b.rows = 32;
  b.cols = 128;
  b.calibration = {-8.0, 0.5, -32.0, 0.5};
  b.half_angle = 0.35 * kDeg;
  b.subrays = 64;
  b.range_sigma = 0.02;
  return b;
}

const Eigen::Vector3d kToSensor = -Eigen::Vector3d::UnitX();

/// Fraction of the unit disk on the far side of the chord at offset c.
double disk_segment_fraction(double c) {
  return (std::acos(c) - c * std::sqrt(1.0 - c * c)) / std::numbers::pi;
}

}  // namespace

SceneFile parse_scene_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    SceneFile f;
    f.scene.seed = j.value("seed", std::uint64_t{0});
    for (const auto& s : j.at("surfaces")) f.scene.surfaces.push_back(surface_from_json(s));
    if (j.contains("beam")) f.beam = beam_from_json(j.at("beam"));
    return f;
  } catch (const json::exception& e) {
    throw ParseError(0, std::string("scene JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, std::string("scene JSON: ") + e.what());
  }
}

std::string scene_to_json(const Scene& scene, const std::optional<BeamSpec>& beam) {
  ojson j;
  j["seed"] = scene.seed;
  j["surfaces"] = ojson::array();
  for (const auto& s : scene.surfaces) {
    ojson o;
    if (!s.name.empty()) o["name"] = s.name;
    switch (s.kind) {
      case SurfaceKind::plane:
        o["kind"] = "plane";
        o["point"] = vec3_json(s.point);
        o["normal"] = vec3_json(s.normal);
        break;
      case SurfaceKind::rectangle:
      case SurfaceKind::porous:
        o["kind"] = s.kind == SurfaceKind::rectangle ? "rectangle" : "porous";
        o["center"] = vec3_json(s.point);
        o["normal"] = vec3_json(s.normal);
        o["u_axis"] = vec3_json(s.u_axis);
        o["half_u"] = s.half_u;
        o["half_v"] = s.half_v;
        if (s.kind == SurfaceKind::porous) o["hit_probability"] = s.hit_probability;
        break;
    }
    o["reflectivity"] = s.reflectivity;
    j["surfaces"].push_back(o);
  }
  if (beam) {
    ojson b;
    b["origin"] = vec3_json(beam->origin);
    b["rows"] = beam->rows;
    b["cols"] = beam->cols;
    b["elev_start"] = beam->calibration.elev_start;
    b["elev_step"] = beam->calibration.elev_step;
    b["az_start"] = beam->calibration.az_start;
    b["az_step"] = beam->calibration.az_step;
    b["half_angle"] = beam->half_angle;
    b["subrays"] = beam->subrays;
    b["range_sigma"] = beam->range_sigma;
    b["policy"] = beam->policy == DetectorPolicy::strongest ? "strongest" : "last";
    b["rate_hz"] = beam->rate_hz;
    j["beam"] = b;
  }
  return j.dump(2) + "\n";
}

std::vector<std::string> preset_names() {
  return {"wall", "corner", "foliage", "window", "split", "occluder", "three-surface",
          "window-pixel"};
}

SceneFile preset_scene(std::string_view name, std::uint64_t seed) {
  SceneFile f;
  f.scene.seed = seed;
  auto& s = f.scene.surfaces;
  if (name == "wall") {
    s.push_back(Surface::plane({10, 0, 0}, kToSensor, 0.8));
    f.beam = corpus_beam();
  } else if (name == "corner") {
    // Interior right-angle corner 10 m ahead, edge along z at azimuth 0.
    s.push_back(Surface::plane({10, 0, 0}, {-1, -1, 0}, 0.8));
    s.push_back(Surface::plane({10, 0, 0}, {-1, 1, 0}, 0.8));
    f.beam = corpus_beam();
  } else if (name == "foliage") {
    // Full-height porous screen; its azimuth edges fall between pixel centers.
    s.push_back(Surface::porous({8, 0, 0}, kToSensor, Eigen::Vector3d::UnitY(),
                                8 * std::tan(26.25 * kDeg), 20, 0.6, 0.5));
    s.push_back(Surface::plane({11, 0, 0}, kToSensor, 0.6));
    f.beam = corpus_beam();
  } else if (name == "window") {
    s.push_back(Surface::porous({7.5, 0, 0}, kToSensor, Eigen::Vector3d::UnitY(),
                                7.5 * std::tan(26.25 * kDeg), 20, 0.6, 0.4));
    s.push_back(Surface::plane({10, 0, 0}, kToSensor, 0.6));
    f.beam = corpus_beam();
  } else if (name == "split") {
    // Two opaque half-planes meeting on the beam axis, equal reflectivity.
    s.push_back(Surface::rectangle({10, -50, 0}, kToSensor, Eigen::Vector3d::UnitY(), 50, 50, 0.5));
    s.push_back(Surface::rectangle({12, 50, 0}, kToSensor, Eigen::Vector3d::UnitY(), 50, 50, 0.5));
    f.beam = pixel_beam(0.003, 64, 0.0);
  } else if (name == "occluder") {
    // Front rectangle covering 30% of the beam disk, full backplane behind.
    const double half_angle = 0.003;
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (disk_segment_fraction(mid) > 0.3 ? lo : hi) = mid;
    }
    const double edge = 0.5 * (lo + hi) * 10.0 * std::tan(half_angle);
    s.push_back(
        Surface::rectangle({10, edge + 50, 0}, kToSensor, Eigen::Vector3d::UnitY(), 50, 50, 0.5));
    s.push_back(Surface::plane({13, 0, 0}, kToSensor, 0.5));
    f.beam = pixel_beam(half_angle, 64, 0.0);
  } else if (name == "three-surface") {
    // Three stripes at 9, 11 and 15 m splitting the disk unevenly.
    const double half_angle = 0.003;
    const double r9 = 9 * std::tan(half_angle);
    const double r11 = 11 * std::tan(half_angle);
    s.push_back(Surface::rectangle({9, -r9 * 0.4 - 50, 0}, kToSensor, Eigen::Vector3d::UnitY(),
                                   50, 50, 0.7));
    s.push_back(Surface::rectangle({11, r11 * 0.25 + 50, 0}, kToSensor, Eigen::Vector3d::UnitY(),
                                   50, 50, 0.7));
    s.push_back(Surface::plane({15, 0, 0}, kToSensor, 0.7));
    f.beam = pixel_beam(half_angle, 64, 0.0);
  } else if (name == "window-pixel") {
    // Glass stopping 10% of sub-rays ahead of an interior wall.
    s.push_back(Surface::porous({11.2, 0, 0}, kToSensor, Eigen::Vector3d::UnitY(), 2, 2, 0.6, 0.1));
    s.push_back(Surface::plane({14, 0, 0}, kToSensor, 0.6));
    f.beam = pixel_beam(0.003, 64, 0.02);
  } else {
    throw std::invalid_argument("unknown preset scene '" + std::string(name) + "'");
  }
  return f;
}

}  // namespace mret
